// Hand-rolled SVG line chart — no chart library, no math beyond pixel
// placement of server-provided values.

import type { SeriesSpec } from "./series.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const PALETTE = [
  "#2563eb",
  "#d97706",
  "#059669",
  "#dc2626",
  "#7c3aed",
  "#0891b2",
  "#be185d",
];

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export type Scale = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function polylinePoints(xs: number[], ys: number[], x: Scale, y: Scale): string {
  return xs.map((step, i) => `${x(step).toFixed(2)},${y(ys[i]).toFixed(2)}`).join(" ");
}

export function valueBounds(series: SeriesSpec[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s.values) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [Math.min(lo, 0), hi];
}

function el(name: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function colorFor(series: SeriesSpec, enrolled: string[]): string {
  if (series.state === null) return "#111827";
  return PALETTE[enrolled.indexOf(series.state) % PALETTE.length];
}

export function renderChart(
  svg: SVGSVGElement,
  steps: number[],
  series: SeriesSpec[],
  enrolled: string[],
  margins: Margins = { top: 12, right: 16, bottom: 28, left: 56 },
): void {
  svg.replaceChildren();
  const width = svg.viewBox.baseVal.width || 640;
  const height = svg.viewBox.baseVal.height || 360;
  if (steps.length === 0) return;

  const [lo, hi] = valueBounds(series);
  const x = linearScale(steps[0], steps[steps.length - 1], margins.left, width - margins.right);
  const y = linearScale(lo, hi, height - margins.bottom, margins.top);

  // axes and gridlines
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const value = lo + ((hi - lo) * i) / ticks;
    const py = y(value);
    svg.appendChild(el("line", {
      x1: String(margins.left), x2: String(width - margins.right),
      y1: py.toFixed(2), y2: py.toFixed(2),
      stroke: "#e5e7eb", "stroke-width": "1",
    }));
    const label = el("text", {
      x: String(margins.left - 8), y: (py + 4).toFixed(2),
      "text-anchor": "end", "font-size": "11", fill: "#6b7280",
    });
    label.textContent = Math.round(value).toLocaleString();
    svg.appendChild(label);
  }
  for (const step of steps) {
    const label = el("text", {
      x: x(step).toFixed(2), y: String(height - margins.bottom + 18),
      "text-anchor": "middle", "font-size": "11", fill: "#6b7280",
    });
    label.textContent = String(step);
    svg.appendChild(label);
  }
  svg.appendChild(el("line", {
    x1: String(margins.left), x2: String(width - margins.right),
    y1: String(height - margins.bottom), y2: String(height - margins.bottom),
    stroke: "#9ca3af", "stroke-width": "1",
  }));

  for (const s of series) {
    svg.appendChild(el("polyline", {
      points: polylinePoints(steps, s.values, x, y),
      fill: "none",
      stroke: colorFor(s, enrolled),
      "stroke-width": s.state === null ? "2.5" : "1.75",
      "stroke-dasharray": s.kind === "scenario" ? "6 4" : "none",
      opacity: s.kind === "scenario" ? "0.85" : "1",
    }));
  }
}
