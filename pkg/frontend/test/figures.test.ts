import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { SchemaError, parseCsv } from "../src/csv.js";
import {
  FIGURE_KINDS,
  renderDocScaling,
  renderFigure,
  renderNDependence,
  renderPhaseHistogram,
  renderSummaryBars,
} from "../src/figures.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string) {
  return parseCsv(readFileSync(join(FIXTURES, name), "utf-8"));
}

const GOLDEN: Record<string, string> = {
  "summary-bars": "summary.csv",
  "doc-scaling": "sweep-doc.csv",
  "n-dependence": "sweep-n.csv",
  "phase-histogram": "mirror.csv",
};

describe("all four figure kinds render from the golden CSVs", () => {
  for (const kind of FIGURE_KINDS) {
    it(`renders ${kind}`, () => {
      const result = renderFigure(kind, fixture(GOLDEN[kind]));
      expect(result.svg.startsWith("<svg")).toBe(true);
      expect(result.svg.endsWith("</svg>")).toBe(true);
      expect(result.kind).toBe(kind);
    });
  }

  it("is deterministic: rendering twice gives identical bytes", () => {
    const table = fixture("summary.csv");
    expect(renderSummaryBars(table).svg).toBe(renderSummaryBars(table).svg);
  });

  it("does not mutate its input table", () => {
    const table = fixture("sweep-doc.csv");
    const snapshot = JSON.stringify(table);
    renderDocScaling(table);
    expect(JSON.stringify(table)).toBe(snapshot);
  });
});

describe("summary bars", () => {
  it("draws one bar per (config, model) group", () => {
    const result = renderSummaryBars(fixture("summary.csv"));
    const bars = result.svg.match(/data-role="bar"/g) ?? [];
    expect(bars.length).toBe(10); // 5 configurations x 2 medium models
    expect(result.series.length).toBe(10);
  });

  it("ten-group toy input stays legible (distinct bars and keys)", () => {
    const rows = Array.from(
      { length: 10 },
      (_, i) => `cfg-${i},unitary,8,1,0,1,0.01,0.001,10,0.${i + 1},,true,0,analytic-unitary`,
    );
    const toy = parseCsv(
      "config,model,n,doc,realization,seed,p_opt,p0,eta,eta_over_n,sigma1_sq,converged,iterations,baseline_mode\n" +
        rows.join("\n") +
        "\n",
    );
    const result = renderSummaryBars(toy);
    expect((result.svg.match(/data-role="bar"/g) ?? []).length).toBe(10);
    const keys = new Set(result.series.map((s) => s.key));
    expect(keys.size).toBe(10);
  });

  it("reference levels come from the formulas", () => {
    const result = renderSummaryBars(fixture("summary.csv"), {
      references: ["pi4", "pi4sq", "one"],
    });
    const byName = Object.fromEntries(result.refLines.map((r) => [r.name, r]));
    expect(byName.pi4.value).toBeCloseTo(Math.PI / 4, 14);
    expect(byName.pi4sq.value).toBeCloseTo((Math.PI / 4) ** 2, 14);
    expect(byName.one.value).toBe(1);
  });

  it("summary statistics agree with a direct recomputation", () => {
    const table = fixture("summary.csv");
    const result = renderSummaryBars(table);
    const configIdx = table.header.indexOf("config");
    const modelIdx = table.header.indexOf("model");
    const valueIdx = table.header.indexOf("eta_over_n");
    const opcRows = table.rows.filter(
      (r) => r[configIdx] === "2p-is-opc" && r[modelIdx] === "unitary",
    );
    const expected =
      opcRows.reduce((acc, r) => acc + Number(r[valueIdx]), 0) / opcRows.length;
    const series = result.series.find((s) => s.key === "2p-is-opc/unitary");
    expect(series?.points[0].mean).toBeCloseTo(expected, 12);
    expect(series?.points[0].mean).toBeCloseTo(1.0, 9);
  });
});

describe("doc scaling", () => {
  it("requires the sweep_value column and names it when absent", () => {
    expect(() => renderDocScaling(fixture("summary.csv"))).toThrow(SchemaError);
    try {
      renderDocScaling(fixture("summary.csv"));
    } catch (error) {
      expect((error as SchemaError).column).toBe("sweep_value");
    }
  });

  it("draws dashed reference slope lines with the analytic slopes", () => {
    const result = renderDocScaling(fixture("sweep-doc.csv"), { references: ["pi4", "pi2"] });
    expect(result.svg).toContain('data-role="reference"');
    expect(result.svg).toContain('data-name="pi4"');
    expect(result.svg).toContain('data-name="pi2"');
    for (const ref of result.refLines) {
      const [[x0, y0], [x1, y1]] = ref.data;
      expect(ref.kind).toBe("slope");
      expect((y1 - y0) / (x1 - x0)).toBeCloseTo(ref.value, 12);
    }
    const slopes = result.refLines.map((r) => r.value);
    expect(slopes).toContain(Math.PI / 4);
    expect(slopes).toContain(Math.PI / 2);
  });

  it("one series per configuration/model with points sorted by DOC", () => {
    const result = renderDocScaling(fixture("sweep-doc.csv"));
    expect(result.series.map((s) => s.key).sort()).toEqual([
      "1p-s/unitary",
      "2p-is-opc/unitary",
    ]);
    for (const series of result.series) {
      const xs = series.points.map((p) => p.x);
      expect([...xs].sort((a, b) => a - b)).toEqual(xs);
      expect(xs[xs.length - 1]).toBe(1);
    }
  });
});

describe("n dependence", () => {
  it("renders the enhancement and the singular-value bound series", () => {
    const result = renderNDependence(fixture("sweep-n.csv"));
    const keys = result.series.map((s) => s.key);
    expect(keys).toContain("2p-ds/gaussian");
    expect(keys).toContain("2p-ds/gaussian σ₁²");
    const main = result.series.find((s) => s.key === "2p-ds/gaussian")!;
    const bound = result.series.find((s) => s.key === "2p-ds/gaussian σ₁²")!;
    for (let i = 0; i < main.points.length; i += 1) {
      expect(main.points[i].mean).toBeLessThanOrEqual(bound.points[i].mean);
    }
  });

  it("keeps the level reference at 1", () => {
    const result = renderNDependence(fixture("sweep-n.csv"));
    expect(result.refLines[0].name).toBe("one");
    expect(result.refLines[0].data[0][1]).toBe(1);
  });
});

describe("phase histogram", () => {
  function syntheticAntipodal(theta: number, count = 256): string {
    const lines = ["mode,phase,modulus"];
    for (let i = 0; i < count; i += 1) {
      const phase = i % 2 === 0 ? theta : theta + Math.PI;
      lines.push(`${i},${phase},1.0`);
    }
    return lines.join("\n") + "\n";
  }

  it("antipodal input occupies exactly two bins separated by pi", () => {
    const result = renderPhaseHistogram(parseCsv(syntheticAntipodal(0.7)), { bins: 36 });
    const occupied = result.bins!.filter((b) => b.count > 0);
    expect(occupied.length).toBe(2);
    const separation = Math.abs(occupied[1].center - occupied[0].center);
    expect(separation).toBeCloseTo(Math.PI, 12);
    expect(occupied[0].count + occupied[1].count).toBe(256);
    expect((result.svg.match(/data-role="hist-bar"/g) ?? []).length).toBe(2);
  });

  it("wraps phases outside (-pi, pi] into range", () => {
    const table = parseCsv("mode,phase,modulus\n0,7.0,1\n1,-7.0,1\n");
    const result = renderPhaseHistogram(table, { bins: 8 });
    const total = result.bins!.reduce((acc, b) => acc + b.count, 0);
    expect(total).toBe(2);
  });

  it("renders the golden mirror-field dump", () => {
    const result = renderPhaseHistogram(fixture("mirror.csv"));
    const total = result.bins!.reduce((acc, b) => acc + b.count, 0);
    expect(total).toBe(48);
  });

  it("requires the phase column", () => {
    expect(() => renderPhaseHistogram(fixture("summary.csv"))).toThrow(/phase/);
  });
});
