/**
 * The four figure renderers over the simulator's CSV schemas.
 *
 * Each renderer returns the finished SVG document plus a structured layout
 * (series statistics, reference-line endpoints in data coordinates,
 * histogram bins) so rendering decisions stay testable without parsing SVG
 * geometry.  Reference lines are always computed from their defining
 * formulas, never from pixel constants.
 */

import {
  Table,
  groupBy,
  mean,
  numericColumn,
  requireColumns,
  sampleStd,
} from "./csv.js";
import {
  DEFAULT_FRAME,
  Frame,
  PALETTE,
  Scale,
  document,
  line,
  linearScale,
  logScale,
  plotArea,
  px,
  tag,
  text,
  ticks,
} from "./svg.js";

export type FigureKind = "summary-bars" | "doc-scaling" | "n-dependence" | "phase-histogram";

export const FIGURE_KINDS: FigureKind[] = [
  "summary-bars",
  "doc-scaling",
  "n-dependence",
  "phase-histogram",
];

/** Named analytic reference values drawable as level or slope lines. */
export const REFERENCES: Record<string, { value: number; label: string }> = {
  pi4: { value: Math.PI / 4, label: "π/4" },
  pi4sq: { value: (Math.PI / 4) ** 2, label: "(π/4)²" },
  one: { value: 1, label: "1" },
  pi2: { value: Math.PI / 2, label: "π/2" },
};

export interface RenderOptions {
  references?: string[];
  bins?: number;
  errorBars?: boolean;
  frame?: Frame;
}

export interface SeriesPoint {
  x: number;
  mean: number;
  std: number;
  count: number;
}

export interface SeriesSummary {
  key: string;
  points: SeriesPoint[];
}

export interface RefLine {
  name: string;
  kind: "level" | "slope";
  value: number;
  /** Endpoints in data coordinates. */
  data: [[number, number], [number, number]];
}

export interface HistogramBin {
  lo: number;
  hi: number;
  center: number;
  count: number;
}

export interface RenderResult {
  kind: FigureKind;
  svg: string;
  series: SeriesSummary[];
  refLines: RefLine[];
  bins?: HistogramBin[];
}

function resolveReferences(names: string[] | undefined, defaults: string[]): string[] {
  const picked = names ?? defaults;
  for (const name of picked) {
    if (!(name in REFERENCES)) {
      throw new Error(
        `unknown reference "${name}", expected one of ${Object.keys(REFERENCES).join(", ")}`,
      );
    }
  }
  return picked;
}

function axes(
  frame: Frame,
  x: Scale,
  y: Scale,
  xTicks: number[],
  yTicks: number[],
  xLabel: string,
  yLabel: string,
  xFormat: (v: number) => string = (v) => String(v),
): string {
  const area = plotArea(frame);
  const parts: string[] = [];
  parts.push(
    line(area.x0, area.y0, area.x1, area.y0, { stroke: "#000", "stroke-width": 1 }),
    line(area.x0, area.y0, area.x0, area.y1, { stroke: "#000", "stroke-width": 1 }),
  );
  for (const v of xTicks) {
    const xi = x(v);
    parts.push(line(xi, area.y0, xi, area.y0 + 5, { stroke: "#000", "stroke-width": 1 }));
    parts.push(
      text(xi, area.y0 + 20, xFormat(v), { "text-anchor": "middle", "font-size": 11 }),
    );
  }
  for (const v of yTicks) {
    const yi = y(v);
    parts.push(line(area.x0 - 5, yi, area.x0, yi, { stroke: "#000", "stroke-width": 1 }));
    parts.push(
      line(area.x0, yi, area.x1, yi, { stroke: "#eeeeee", "stroke-width": 1 }),
    );
    parts.push(
      text(area.x0 - 8, yi + 4, String(v), { "text-anchor": "end", "font-size": 11 }),
    );
  }
  parts.push(
    text((area.x0 + area.x1) / 2, frame.height - 12, xLabel, {
      "text-anchor": "middle",
      "font-size": 13,
    }),
    tag(
      "text",
      {
        x: 16,
        y: (area.y0 + area.y1) / 2,
        transform: `rotate(-90 16 ${px((area.y0 + area.y1) / 2)})`,
        "text-anchor": "middle",
        "font-size": 13,
        "font-family": "sans-serif",
      },
      yLabel,
    ),
  );
  return parts.join("");
}

function legend(frame: Frame, entries: { label: string; color: string; dashed?: boolean }[]): string {
  const area = plotArea(frame);
  const parts: string[] = [];
  entries.forEach((entry, index) => {
    const yi = area.y1 + 14 + 16 * index;
    const xi = area.x1 - 170;
    parts.push(
      line(xi, yi - 4, xi + 22, yi - 4, {
        stroke: entry.color,
        "stroke-width": 3,
        ...(entry.dashed ? { "stroke-dasharray": "6 3" } : {}),
      }),
      text(xi + 28, yi, entry.label, { "font-size": 11 }),
    );
  });
  return parts.join("");
}

function errorBar(xi: number, lo: number, hi: number, color: string): string {
  return [
    line(xi, lo, xi, hi, { stroke: color, "stroke-width": 1.5, "data-role": "error-bar" }),
    line(xi - 4, lo, xi + 4, lo, { stroke: color, "stroke-width": 1.5 }),
    line(xi - 4, hi, xi + 4, hi, { stroke: color, "stroke-width": 1.5 }),
  ].join("");
}

interface Row {
  config: string;
  model: string;
  value: number;
  sweep?: number;
  sigma?: number;
}

function resultRows(table: Table, context: string, needSweep: boolean): Row[] {
  const required = ["config", "model", "eta_over_n"];
  if (needSweep) required.unshift("sweep_value");
  requireColumns(table, required, context);
  const configs = table.rows.map((r) => r[table.header.indexOf("config")]);
  const models = table.rows.map((r) => r[table.header.indexOf("model")]);
  const values = numericColumn(table, "eta_over_n");
  const sweeps = needSweep ? numericColumn(table, "sweep_value") : undefined;
  const sigmaIndex = table.header.indexOf("sigma1_sq");
  return table.rows.map((row, i) => ({
    config: configs[i],
    model: models[i],
    value: values[i],
    sweep: sweeps?.[i],
    sigma: sigmaIndex >= 0 && row[sigmaIndex] !== "" ? Number(row[sigmaIndex]) : undefined,
  }));
}

// ---------------------------------------------------------------------------
// summary bars

export function renderSummaryBars(table: Table, options: RenderOptions = {}): RenderResult {
  const frame = options.frame ?? DEFAULT_FRAME;
  const refs = resolveReferences(options.references, ["pi4", "pi4sq", "one"]);
  const drawErrors = options.errorBars ?? true;
  const rows = resultRows(table, "summary-bars input", false);

  const configs = [...new Set(rows.map((r) => r.config))];
  const models = [...new Set(rows.map((r) => r.model))];
  const series: SeriesSummary[] = [];
  const stats = new Map<string, { mean: number; std: number; count: number }>();
  for (const [key, group] of groupBy(rows, (r) => `${r.config}/${r.model}`)) {
    const values = group.map((r) => r.value);
    const entry = { mean: mean(values), std: sampleStd(values), count: values.length };
    stats.set(key, entry);
    series.push({ key, points: [{ x: 0, ...entry }] });
  }

  const area = plotArea(frame);
  const top = Math.max(
    ...[...stats.values()].map((s) => s.mean + s.std),
    ...refs.map((r) => REFERENCES[r].value),
  );
  const y = linearScale([0, 1.1 * top], [area.y0, area.y1]);
  const yTicks = ticks(0, 1.1 * top, 6);

  const band = (area.x1 - area.x0) / configs.length;
  const slot = band / (models.length + 1);
  const parts: string[] = [];
  parts.push(axes(frame, linearScale([0, 1], [area.x0, area.x1]), y, [], yTicks, "configuration", "enhancement pre-factor η/N"));

  configs.forEach((config, ci) => {
    const x0 = area.x0 + ci * band;
    parts.push(
      text(x0 + band / 2, area.y0 + 20, config, { "text-anchor": "middle", "font-size": 11 }),
    );
    models.forEach((model, mi) => {
      const entry = stats.get(`${config}/${model}`);
      if (!entry) return;
      const color = PALETTE[mi % PALETTE.length];
      const xi = x0 + slot * (mi + 0.5);
      const yTop = y(entry.mean);
      parts.push(
        tag("rect", {
          x: xi,
          y: yTop,
          width: slot * 0.9,
          height: area.y0 - yTop,
          fill: color,
          "fill-opacity": 0.85,
          "data-role": "bar",
          "data-key": `${config}/${model}`,
        }),
      );
      if (drawErrors && entry.count > 1) {
        parts.push(
          errorBar(xi + slot * 0.45, y(entry.mean - entry.std), y(entry.mean + entry.std), "#333"),
        );
      }
    });
  });

  const refLines: RefLine[] = refs.map((name) => {
    const value = REFERENCES[name].value;
    parts.push(
      line(area.x0, y(value), area.x1, y(value), {
        stroke: "#555",
        "stroke-width": 1,
        "stroke-dasharray": "6 4",
        "data-role": "reference",
        "data-name": name,
      }),
      text(area.x1 - 4, y(value) - 4, REFERENCES[name].label, {
        "text-anchor": "end",
        "font-size": 11,
        fill: "#555",
      }),
    );
    return {
      name,
      kind: "level",
      value,
      data: [
        [0, value],
        [1, value],
      ],
    };
  });

  parts.push(legend(frame, models.map((m, i) => ({ label: m, color: PALETTE[i % PALETTE.length] }))));
  return {
    kind: "summary-bars",
    svg: document(frame, "Enhancement summary", parts.join("")),
    series,
    refLines,
  };
}

// ---------------------------------------------------------------------------
// shared line-plot machinery for the two sweep figures

function sweepSeries(rows: Row[]): SeriesSummary[] {
  const series: SeriesSummary[] = [];
  for (const [key, group] of groupBy(rows, (r) => `${r.config}/${r.model}`)) {
    const byX = groupBy(group, (r) => String(r.sweep));
    const points: SeriesPoint[] = [...byX.values()].map((bucket) => {
      const values = bucket.map((r) => r.value);
      return {
        x: bucket[0].sweep as number,
        mean: mean(values),
        std: sampleStd(values),
        count: values.length,
      };
    });
    points.sort((a, b) => a.x - b.x);
    series.push({ key, points });
  }
  return series;
}

function drawSeries(
  series: SeriesSummary[],
  x: Scale,
  y: Scale,
  drawErrors: boolean,
  dashed = false,
): string {
  const parts: string[] = [];
  series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords = s.points.map((p) => `${px(x(p.x))},${px(y(p.mean))}`).join(" ");
    parts.push(
      tag("polyline", {
        points: coords,
        fill: "none",
        stroke: color,
        "stroke-width": 2,
        ...(dashed ? { "stroke-dasharray": "5 4" } : {}),
        "data-role": "series",
        "data-key": s.key,
      }),
    );
    for (const p of s.points) {
      parts.push(
        tag("circle", { cx: x(p.x), cy: y(p.mean), r: 3, fill: color, "data-role": "point" }),
      );
      if (drawErrors && p.count > 1 && p.std > 0) {
        parts.push(errorBar(x(p.x), y(p.mean - p.std), y(p.mean + p.std), color));
      }
    }
  });
  return parts.join("");
}

export function renderDocScaling(table: Table, options: RenderOptions = {}): RenderResult {
  const frame = options.frame ?? DEFAULT_FRAME;
  const refs = resolveReferences(options.references, ["pi4", "pi2"]);
  const drawErrors = options.errorBars ?? true;
  const rows = resultRows(table, "doc-scaling input", true);
  const series = sweepSeries(rows);

  const area = plotArea(frame);
  const xMax = Math.max(...rows.map((r) => r.sweep as number));
  const yMax = Math.max(...series.flatMap((s) => s.points.map((p) => p.mean + p.std)), 0.1);
  const x = linearScale([0, 1.05 * xMax], [area.x0, area.x1]);
  const y = linearScale([0, 1.15 * yMax], [area.y0, area.y1]);

  const parts: string[] = [];
  parts.push(
    axes(frame, x, y, ticks(0, xMax, 5), ticks(0, 1.15 * yMax, 6), "degree of control M/N", "enhancement pre-factor η/N"),
  );

  // Dashed analytic slope lines through the origin, clipped to the frame.
  const refLines: RefLine[] = refs.map((name) => {
    const slope = REFERENCES[name].value;
    const xEnd = Math.min(1.05 * xMax, (1.15 * yMax) / slope);
    parts.push(
      line(x(0), y(0), x(xEnd), y(slope * xEnd), {
        stroke: "#555",
        "stroke-width": 1,
        "stroke-dasharray": "6 4",
        "data-role": "reference",
        "data-name": name,
        "data-slope": String(slope),
      }),
      text(x(xEnd), y(slope * xEnd) - 6, REFERENCES[name].label, {
        "text-anchor": "end",
        "font-size": 11,
        fill: "#555",
      }),
    );
    return {
      name,
      kind: "slope",
      value: slope,
      data: [
        [0, 0],
        [xEnd, slope * xEnd],
      ],
    };
  });

  parts.push(drawSeries(series, x, y, drawErrors));
  parts.push(
    legend(
      frame,
      series.map((s, i) => ({ label: s.key, color: PALETTE[i % PALETTE.length] })),
    ),
  );
  return {
    kind: "doc-scaling",
    svg: document(frame, "Enhancement vs degree of control", parts.join("")),
    series,
    refLines,
  };
}

export function renderNDependence(table: Table, options: RenderOptions = {}): RenderResult {
  const frame = options.frame ?? DEFAULT_FRAME;
  const refs = resolveReferences(options.references, ["one"]);
  const drawErrors = options.errorBars ?? true;
  const rows = resultRows(table, "n-dependence input", true);
  const series = sweepSeries(rows);

  // The squared-top-singular-value bound rides along where the CSV carries it.
  const sigmaRows = rows.filter((r) => r.sigma !== undefined);
  const sigmaSeries = sweepSeries(
    sigmaRows.map((r) => ({ ...r, value: r.sigma as number })),
  ).map((s) => ({ ...s, key: `${s.key} σ₁²` }));

  const area = plotArea(frame);
  const xs = rows.map((r) => r.sweep as number);
  const xValues = [...new Set(xs)].sort((a, b) => a - b);
  const allPoints = [...series, ...sigmaSeries].flatMap((s) => s.points);
  const yMax = Math.max(...allPoints.map((p) => p.mean + p.std), 1);
  const x = logScale([Math.min(...xs) / 1.2, Math.max(...xs) * 1.2], [area.x0, area.x1]);
  const y = linearScale([0, 1.15 * yMax], [area.y0, area.y1]);

  const parts: string[] = [];
  parts.push(
    axes(frame, x, y, xValues, ticks(0, 1.15 * yMax, 6), "system size N (log scale)", "enhancement pre-factor η/N"),
  );

  const refLines: RefLine[] = refs.map((name) => {
    const value = REFERENCES[name].value;
    parts.push(
      line(area.x0, y(value), area.x1, y(value), {
        stroke: "#555",
        "stroke-width": 1,
        "stroke-dasharray": "6 4",
        "data-role": "reference",
        "data-name": name,
      }),
    );
    return {
      name,
      kind: "level",
      value,
      data: [
        [xValues[0], value],
        [xValues[xValues.length - 1], value],
      ],
    };
  });

  parts.push(drawSeries(series, x, y, drawErrors));
  parts.push(drawSeries(sigmaSeries, x, y, false, true));
  parts.push(
    legend(frame, [
      ...series.map((s, i) => ({ label: s.key, color: PALETTE[i % PALETTE.length] })),
      ...sigmaSeries.map((s, i) => ({
        label: s.key,
        color: PALETTE[i % PALETTE.length],
        dashed: true,
      })),
    ]),
  );
  return {
    kind: "n-dependence",
    svg: document(frame, "Enhancement vs system size", parts.join("")),
    series: [...series, ...sigmaSeries],
    refLines,
  };
}

// ---------------------------------------------------------------------------
// phase histogram

const TWO_PI = 2 * Math.PI;

function wrapToPi(value: number): number {
  let v = ((value + Math.PI) % TWO_PI + TWO_PI) % TWO_PI;
  return v - Math.PI;
}

export function renderPhaseHistogram(table: Table, options: RenderOptions = {}): RenderResult {
  const frame = options.frame ?? DEFAULT_FRAME;
  const binCount = options.bins ?? 36;
  requireColumns(table, ["phase"], "phase-histogram input");
  const phases = numericColumn(table, "phase").map(wrapToPi);

  const width = TWO_PI / binCount;
  const bins: HistogramBin[] = Array.from({ length: binCount }, (_, i) => ({
    lo: -Math.PI + i * width,
    hi: -Math.PI + (i + 1) * width,
    center: -Math.PI + (i + 0.5) * width,
    count: 0,
  }));
  for (const phase of phases) {
    let index = Math.floor((phase + Math.PI) / width);
    if (index === binCount) index = binCount - 1;
    bins[index].count += 1;
  }

  const area = plotArea(frame);
  const x = linearScale([-Math.PI, Math.PI], [area.x0, area.x1]);
  const yMax = Math.max(...bins.map((b) => b.count), 1);
  const y = linearScale([0, 1.1 * yMax], [area.y0, area.y1]);

  const parts: string[] = [];
  const piTicks = [-Math.PI, -Math.PI / 2, 0, Math.PI / 2, Math.PI];
  const piLabels = new Map(piTicks.map((v, i) => [v, ["-π", "-π/2", "0", "π/2", "π"][i]]));
  parts.push(
    axes(frame, x, y, piTicks, ticks(0, 1.1 * yMax, 5), "phase (rad)", "mode count", (v) =>
      piLabels.get(v) ?? String(v),
    ),
  );
  for (const bin of bins) {
    if (bin.count === 0) continue;
    parts.push(
      tag("rect", {
        x: x(bin.lo) + 0.5,
        y: y(bin.count),
        width: x(bin.hi) - x(bin.lo) - 1,
        height: area.y0 - y(bin.count),
        fill: PALETTE[0],
        "fill-opacity": 0.85,
        "data-role": "hist-bar",
        "data-center": String(Math.round(bin.center * 1e6) / 1e6),
        "data-count": String(bin.count),
      }),
    );
  }
  return {
    kind: "phase-histogram",
    svg: document(frame, "Mirror-plane phase histogram", parts.join("")),
    series: [],
    refLines: [],
    bins,
  };
}

export function renderFigure(
  kind: FigureKind,
  table: Table,
  options: RenderOptions = {},
): RenderResult {
  switch (kind) {
    case "summary-bars":
      return renderSummaryBars(table, options);
    case "doc-scaling":
      return renderDocScaling(table, options);
    case "n-dependence":
      return renderNDependence(table, options);
    case "phase-histogram":
      return renderPhaseHistogram(table, options);
  }
}
