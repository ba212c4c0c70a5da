/**
 * Deterministic SVG assembly: fixed coordinate precision, pinned font stack,
 * no timestamps or random ids, so identical inputs yield identical bytes.
 */

import type { Scale } from "./scale.js";

export const FONT_STACK = "DejaVu Sans, Liberation Sans, Helvetica, sans-serif";

export const LAYOUT = {
  width: 640,
  height: 430,
  margin: { left: 62, right: 16, top: 18, bottom: 46 },
};

export function plotArea() {
  const { width, height, margin } = LAYOUT;
  return {
    x0: margin.left,
    x1: width - margin.right,
    y0: height - margin.bottom, // SVG y grows downward; y0 is the axis line
    y1: margin.top,
  };
}

const fmt = (v: number) => (Object.is(v, -0) ? "0" : v.toFixed(2));

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const rendered = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
  return body === "" ? `<${tag}${rendered}/>` : `<${tag}${rendered}>${body}</${tag}>`;
}

export function path(xs: number[], ys: number[], attrs: Record<string, string | number>): string {
  const parts: string[] = [];
  let pen = false;
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i]!;
    const y = ys[i]!;
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      pen = false;
      continue;
    }
    parts.push(`${pen ? "L" : "M"}${fmt(x)},${fmt(y)}`);
    pen = true;
  }
  return el("path", { d: parts.join(" "), fill: "none", ...attrs });
}

export function axes(x: Scale, y: Scale, xLabel: string, yLabel: string): string {
  const a = plotArea();
  const parts: string[] = [];
  parts.push(el("rect", {
    x: a.x0, y: a.y1, width: a.x1 - a.x0, height: a.y0 - a.y1,
    fill: "white", stroke: "#222", "stroke-width": 1,
  }));
  for (const tick of x.ticks()) {
    const px = x(tick.value);
    parts.push(el("line", { x1: px, y1: a.y0, x2: px, y2: a.y0 - 6, stroke: "#222" }));
    parts.push(el("text", {
      x: px, y: a.y0 + 18, "text-anchor": "middle", "font-size": 12,
      "font-family": FONT_STACK,
    }, tick.label));
  }
  for (const v of x.minorTicks()) {
    const px = x(v);
    parts.push(el("line", { x1: px, y1: a.y0, x2: px, y2: a.y0 - 3, stroke: "#222" }));
  }
  for (const tick of y.ticks()) {
    const py = y(tick.value);
    parts.push(el("line", { x1: a.x0, y1: py, x2: a.x0 + 6, y2: py, stroke: "#222" }));
    parts.push(el("text", {
      x: a.x0 - 8, y: py + 4, "text-anchor": "end", "font-size": 12,
      "font-family": FONT_STACK,
    }, tick.label));
  }
  for (const v of y.minorTicks()) {
    const py = y(v);
    parts.push(el("line", { x1: a.x0, y1: py, x2: a.x0 + 3, y2: py, stroke: "#222" }));
  }
  parts.push(el("text", {
    x: (a.x0 + a.x1) / 2, y: LAYOUT.height - 10, "text-anchor": "middle",
    "font-size": 13, "font-family": FONT_STACK,
  }, xLabel));
  parts.push(el("text", {
    x: 16, y: (a.y0 + a.y1) / 2, "text-anchor": "middle", "font-size": 13,
    "font-family": FONT_STACK,
    transform: `rotate(-90 16 ${fmt((a.y0 + a.y1) / 2)})`,
  }, yLabel));
  return parts.join("\n");
}

export interface LegendEntry {
  label: string;
  color: string;
  marker: "line" | "dot";
}

export function legend(entries: LegendEntry[]): string {
  const a = plotArea();
  const parts: string[] = [];
  entries.forEach((entry, i) => {
    const yy = a.y1 + 16 + 18 * i;
    const xx = a.x1 - 150;
    if (entry.marker === "line") {
      parts.push(el("line", {
        x1: xx, y1: yy - 4, x2: xx + 22, y2: yy - 4,
        stroke: entry.color, "stroke-width": 2,
      }));
    } else {
      parts.push(el("circle", { cx: xx + 11, cy: yy - 4, r: 3, fill: entry.color }));
    }
    parts.push(el("text", {
      x: xx + 28, y: yy, "font-size": 12, "font-family": FONT_STACK,
    }, entry.label));
  });
  return parts.join("\n");
}

export function document(title: string, body: string): string {
  const { width, height } = LAYOUT;
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    el("title", {}, title),
    body,
    "</svg>",
    "",
  ].join("\n");
}
