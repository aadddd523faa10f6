/**
 * Minimal SVG construction: scales, tick generation, and element helpers.
 * Everything is plain string assembly, so figures render identically in any
 * environment and never need a DOM or canvas.
 */

export interface Scale {
  (value: number): number;
  readonly domain: [number, number];
  readonly range: [number, number];
}

function makeScale(
  domain: [number, number],
  range: [number, number],
  transform: (v: number) => number,
): Scale {
  const [d0, d1] = [transform(domain[0]), transform(domain[1])];
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) =>
    range[0] + ((transform(value) - d0) / span) * (range[1] - range[0])) as Scale;
  Object.defineProperty(scale, "domain", { value: domain });
  Object.defineProperty(scale, "range", { value: range });
  return scale;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale(domain, range, (v) => v);
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  return makeScale(domain, range, Math.log10);
}

/** Round-valued ticks covering [lo, hi], at most `count + 1` of them. */
export function ticks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / count;
  const magnitude = 10 ** Math.floor(Math.log10(rawStep));
  const residual = rawStep / magnitude;
  const step = (residual >= 5 ? 5 : residual >= 2 ? 2 : 1) * magnitude;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export const px = (value: number): string => String(Math.round(value * 100) / 100);

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  children = "",
): string {
  const rendered = Object.entries(attrs)
    .map(([key, value]) => `${key}="${typeof value === "number" ? px(value) : esc(value)}"`)
    .join(" ");
  return children === "" && name !== "text"
    ? `<${name} ${rendered}/>`
    : `<${name} ${rendered}>${children}</${name}>`;
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  attrs: Record<string, string | number> = {},
): string {
  return tag("line", { x1, y1, x2, y2, ...attrs });
}

export function text(
  x: number,
  y: number,
  content: string,
  attrs: Record<string, string | number> = {},
): string {
  return tag("text", { x, y, "font-family": "sans-serif", ...attrs }, esc(content));
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
];

export interface Frame {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_FRAME: Frame = {
  width: 720,
  height: 460,
  margin: { top: 40, right: 24, bottom: 56, left: 64 },
};

export function plotArea(frame: Frame): { x0: number; x1: number; y0: number; y1: number } {
  return {
    x0: frame.margin.left,
    x1: frame.width - frame.margin.right,
    y0: frame.height - frame.margin.bottom, // y grows downward in SVG
    y1: frame.margin.top,
  };
}

export function document(frame: Frame, title: string, body: string): string {
  const header =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
    `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}">`;
  const background = tag("rect", {
    x: 0,
    y: 0,
    width: frame.width,
    height: frame.height,
    fill: "#ffffff",
  });
  const caption = text(frame.width / 2, frame.margin.top - 16, title, {
    "text-anchor": "middle",
    "font-size": 15,
    "font-weight": "bold",
  });
  return `${header}${background}${caption}${body}</svg>`;
}
