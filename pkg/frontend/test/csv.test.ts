import { describe, expect, it } from "vitest";

import {
  SchemaError,
  groupBy,
  mean,
  numericColumn,
  parseCsv,
  requireColumns,
  sampleStd,
} from "../src/csv.js";

describe("parseCsv", () => {
  it("splits header and rows", () => {
    const table = parseCsv("a,b\n1,2\n3,4\n");
    expect(table.header).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      ["1", "2"],
      ["3", "4"],
    ]);
  });

  it("accepts CRLF endings and trailing newline", () => {
    const table = parseCsv("a,b\r\n1,2\r\n");
    expect(table.rows).toEqual([["1", "2"]]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/row 1 has 1 fields/);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("")).toThrow(/empty/);
  });
});

describe("requireColumns", () => {
  it("names the first missing column", () => {
    const table = parseCsv("a,b\n1,2\n");
    expect(() => requireColumns(table, ["a", "eta_over_n"], "test input")).toThrow(SchemaError);
    try {
      requireColumns(table, ["eta_over_n"], "test input");
    } catch (error) {
      expect((error as SchemaError).column).toBe("eta_over_n");
      expect((error as SchemaError).message).toContain("eta_over_n");
    }
  });
});

describe("numericColumn", () => {
  it("parses 17-significant-digit floats", () => {
    const table = parseCsv("x\n0.0065831691035186805\n");
    expect(numericColumn(table, "x")[0]).toBeCloseTo(0.0065831691035186805, 18);
  });

  it("rejects non-numeric cells with position info", () => {
    const table = parseCsv("x\ntrue\n");
    expect(() => numericColumn(table, "x")).toThrow(/row 1/);
  });
});

describe("statistics", () => {
  it("mean and sample std match hand values", () => {
    expect(mean([1, 2, 3, 4])).toBe(2.5);
    expect(sampleStd([1, 2, 3, 4])).toBeCloseTo(Math.sqrt(5 / 3), 12);
    expect(sampleStd([7])).toBe(0);
  });

  it("groupBy preserves first-seen key order", () => {
    const groups = groupBy([3, 1, 4, 1, 5], (v) => String(v % 2));
    expect([...groups.keys()]).toEqual(["1", "0"]);
    expect(groups.get("1")).toEqual([3, 1, 1, 5]);
  });
});
