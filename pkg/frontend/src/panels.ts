/**
 * Figure panels built from harness run directories:
 *
 *   a, b, c  survival curve vs the crossover formula (log-log vs tau)
 *   d        stationary plateau vs coupling, with the closed-form and
 *            golden-rule overlays (log-log vs gamma)
 *   e        one survival curve per symmetry class with the class-profile
 *            overlays (log-log vs tau)
 *
 * Overlay files are optional: a missing theory CSV yields a data-only plot,
 * while a present file with wrong columns fails loudly.
 */

import { existsSync } from "node:fs";
import { join } from "node:path";

import { readCsv, requireColumns, SchemaError } from "./csv.js";
import { decadeDomain, logScale, type Scale } from "./scale.js";
import { axes, document as svgDocument, el, legend, path, plotArea, type LegendEntry } from "./svg.js";

export const PANELS = ["a", "b", "c", "d", "e"] as const;
export type PanelId = (typeof PANELS)[number];

const MC_COLOR = "#1a1a1a";
const THEORY_COLOR = "#d62728";
const ASYMPTOTE_COLOR = "#9467bd";
const RESIDENCE_COLOR = "#7f7f7f";
const CLASS_COLORS: Record<string, string> = { U: "#1f77b4", O: "#2ca02c", S: "#d62728" };

interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  marker: "line" | "dot";
  err?: number[];
  dash?: boolean;
}

function clipPositive(s: Series): Series {
  const x: number[] = [];
  const y: number[] = [];
  const err: number[] = [];
  for (let i = 0; i < s.x.length; i++) {
    const xv = s.x[i]!;
    const yv = s.y[i]!;
    if (xv > 0 && yv > 0 && Number.isFinite(xv) && Number.isFinite(yv)) {
      x.push(xv);
      y.push(yv);
      if (s.err) err.push(s.err[i]!);
    }
  }
  return { ...s, x, y, err: s.err ? err : undefined };
}

function renderSeries(series: Series[], xLabel: string, yLabel: string, title: string): string {
  const area = plotArea();
  const clipped = series.map(clipPositive).filter((s) => s.x.length > 0);
  if (clipped.length === 0) throw new SchemaError("no positive data to plot");
  const x: Scale = logScale(decadeDomain(clipped.map((s) => s.x)), [area.x0, area.x1]);
  const y: Scale = logScale(decadeDomain(clipped.map((s) => s.y)), [area.y0, area.y1]);

  const parts: string[] = [axes(x, y, xLabel, yLabel)];
  for (const s of clipped) {
    const px = s.x.map(x);
    const py = s.y.map(y);
    if (s.marker === "line") {
      const attrs: Record<string, string | number> = { stroke: s.color, "stroke-width": 1.6 };
      if (s.dash) attrs["stroke-dasharray"] = "6 3";
      parts.push(path(px, py, attrs));
    } else {
      if (s.err) {
        for (let i = 0; i < px.length; i++) {
          const lo = s.y[i]! - s.err[i]!;
          const hi = s.y[i]! + s.err[i]!;
          if (lo > 0) {
            parts.push(el("line", {
              x1: px[i]!, x2: px[i]!, y1: y(lo), y2: y(hi),
              stroke: s.color, "stroke-width": 1,
            }));
          }
        }
      }
      for (let i = 0; i < px.length; i++) {
        parts.push(el("circle", { cx: px[i]!, cy: py[i]!, r: 2.6, fill: s.color }));
      }
    }
  }
  const entries: LegendEntry[] = clipped.map((s) => ({
    label: s.label, color: s.color, marker: s.marker,
  }));
  parts.push(legend(entries));
  return svgDocument(title, parts.join("\n"));
}

function survivalSeries(dir: string, file: string, label: string, color: string): Series {
  const p = join(dir, file);
  const table = readCsv(p);
  const [tau, mean] = requireColumns(table, p, ["tau", "p_mean"]);
  return { x: tau!, y: mean!, color, label, marker: "line" };
}

function theorySeries(dir: string, file: string, label: string, color: string): Series | null {
  const p = join(dir, file);
  if (!existsSync(p)) return null;
  const table = readCsv(p);
  const [tau, vals] = requireColumns(table, p, ["tau", "p_theory"]);
  return { x: tau!, y: vals!, color, label, marker: "line", dash: true };
}

function panelSurvival(dir: string, title: string): string {
  const series: Series[] = [survivalSeries(dir, "survival_curve.csv", "Monte Carlo", MC_COLOR)];
  const overlays: Array<[string, string, string]> = [
    ["theory_crossover.csv", "crossover formula", THEORY_COLOR],
    ["theory_strong_coupling.csv", "strong-coupling asymptote", ASYMPTOTE_COLOR],
  ];
  for (const [file, label, color] of overlays) {
    const s = theorySeries(dir, file, label, color);
    if (s) series.push(s);
  }
  return renderSeries(series, "tau (Heisenberg units)", "P(tau)", title);
}

function panelSweep(dir: string): string {
  const sweepPath = join(dir, "sweep.csv");
  const table = readCsv(sweepPath);
  const [gamma, late, err] = requireColumns(table, sweepPath, ["gamma", "p_late", "p_late_stderr"]);
  const series: Series[] = [
    { x: gamma!, y: late!, err: err!, color: "#1f77b4", label: "Monte Carlo", marker: "dot" },
  ];
  const residencePath = join(dir, "theory_residence.csv");
  if (existsSync(residencePath)) {
    // dense analytic overlays written by the theory runner
    const th = readCsv(residencePath);
    const [g, pres, fgr] = requireColumns(th, residencePath,
      ["gamma", "p_residence", "p_golden_rule"]);
    series.push({ x: g!, y: pres!, color: RESIDENCE_COLOR, label: "stationary formula", marker: "line" });
    series.push({ x: g!, y: fgr!, color: ASYMPTOTE_COLOR, label: "golden rule 1/gamma", marker: "line" });
  } else {
    // the sweep table carries the analytic values at the sampled couplings
    const [pres, fgr] = requireColumns(table, sweepPath, ["p_residence", "p_golden_rule"]);
    series.push({ x: gamma!, y: pres!, color: RESIDENCE_COLOR, label: "stationary formula", marker: "line", dash: true });
    series.push({ x: gamma!, y: fgr!, color: ASYMPTOTE_COLOR, label: "golden rule 1/gamma", marker: "line", dash: true });
  }
  return renderSeries(series, "gamma", "P_res", "stationary residence probability vs coupling");
}

function panelClasses(dir: string): string {
  const series: Series[] = [];
  for (const cls of ["U", "O", "S"]) {
    const mcPath = join(dir, `survival_${cls}.csv`);
    if (!existsSync(mcPath)) {
      throw new SchemaError(`${mcPath}: missing class curve for panel e`);
    }
    series.push(survivalSeries(dir, `survival_${cls}.csv`, `class ${cls}`, CLASS_COLORS[cls]!));
    const overlay = theorySeries(dir, `theory_class_profile_${cls}.csv`,
      `profile ${cls}`, CLASS_COLORS[cls]!);
    if (overlay) {
      overlay.color = CLASS_COLORS[cls]!;
      series.push({ ...overlay, label: `profile ${cls}` });
    }
  }
  return renderSeries(series, "tau (Heisenberg units)", "P(tau)",
    "form-factor recovery by symmetry class");
}

export function renderPanel(panel: PanelId, dir: string): string {
  switch (panel) {
    case "a":
      return panelSurvival(dir, "survival at strong coupling");
    case "b":
      return panelSurvival(dir, "survival at intermediate coupling");
    case "c":
      return panelSurvival(dir, "survival at weak coupling");
    case "d":
      return panelSweep(dir);
    case "e":
      return panelClasses(dir);
  }
}
