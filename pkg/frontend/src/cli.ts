#!/usr/bin/env node
/**
 * qwfs-plot <figure-kind> --in <csv> --out <svg> [--ref a,b] [--bins N]
 *           [--no-error-bars] [--width W] [--height H]
 *
 * Exit codes: 0 success, 1 I/O failure, 2 usage or schema error.  Inputs are
 * only ever read; rendering the same CSV twice produces identical bytes.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { SchemaError, parseCsv } from "./csv.js";
import { FIGURE_KINDS, FigureKind, REFERENCES, RenderOptions, renderFigure } from "./figures.js";
import { DEFAULT_FRAME } from "./svg.js";

const USAGE = `usage: qwfs-plot <${FIGURE_KINDS.join("|")}> --in <csv> --out <svg>
options:
  --ref a,b           reference lines (${Object.keys(REFERENCES).join(", ")}); empty string disables
  --bins N            histogram bin count (phase-histogram, default 36)
  --no-error-bars     hide ensemble standard-deviation bars
  --width W           figure width in px (default ${DEFAULT_FRAME.width})
  --height H          figure height in px (default ${DEFAULT_FRAME.height})`;

export function runCli(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        ref: { type: "string" },
        bins: { type: "string" },
        "no-error-bars": { type: "boolean" },
        width: { type: "string" },
        height: { type: "string" },
      },
    });
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  const [kind] = parsed.positionals;
  if (!kind || !FIGURE_KINDS.includes(kind as FigureKind)) {
    console.error(`error: expected a figure kind, got ${JSON.stringify(kind ?? null)}`);
    console.error(USAGE);
    return 2;
  }
  const { in: input, out: output } = parsed.values;
  if (!input || !output) {
    console.error("error: both --in and --out are required");
    console.error(USAGE);
    return 2;
  }

  const options: RenderOptions = {};
  if (parsed.values.ref !== undefined) {
    options.references = parsed.values.ref === "" ? [] : parsed.values.ref.split(",");
  }
  if (parsed.values.bins !== undefined) {
    const bins = Number(parsed.values.bins);
    if (!Number.isInteger(bins) || bins < 2) {
      console.error(`error: --bins must be an integer >= 2, got ${parsed.values.bins}`);
      return 2;
    }
    options.bins = bins;
  }
  if (parsed.values["no-error-bars"]) {
    options.errorBars = false;
  }
  if (parsed.values.width !== undefined || parsed.values.height !== undefined) {
    options.frame = {
      ...DEFAULT_FRAME,
      width: Number(parsed.values.width ?? DEFAULT_FRAME.width),
      height: Number(parsed.values.height ?? DEFAULT_FRAME.height),
    };
  }

  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (error) {
    console.error(`error: cannot read ${input}: ${(error as Error).message}`);
    return 1;
  }

  let result;
  try {
    result = renderFigure(kind as FigureKind, parseCsv(text), options);
  } catch (error) {
    if (error instanceof SchemaError) {
      console.error(`schema mismatch: ${error.message}`);
    } else {
      console.error(`error: ${(error as Error).message}`);
    }
    return 2;
  }

  try {
    writeFileSync(output, result.svg, "utf-8");
  } catch (error) {
    console.error(`error: cannot write ${output}: ${(error as Error).message}`);
    return 1;
  }
  console.log(`rendered ${kind} -> ${output}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  fileURLToPath(import.meta.url) === resolve(process.argv[1]);
if (invokedDirectly) {
  process.exit(runCli(process.argv.slice(2)));
}
