// Side-panel text: every number shown is read from a service response.

import type { AnalyzeReport, SimulateResult } from "./types.js";

export function timingPanelText(timing: SimulateResult | null): string {
  if (timing === null) {
    return "timing: —";
  }
  return `timing: ${timing.totalMs} ms (${timing.events.length} events)`;
}

export interface Badge {
  label: string;
  /** null while either input is missing */
  ok: boolean | null;
}

export function feasibilityBadge(
  foldCount: number | null,
  report: AnalyzeReport | null,
): Badge {
  if (foldCount === null || report === null) {
    return { label: "feasibility: —", ok: null };
  }
  const limit = report.max_particles;
  if (foldCount < limit) {
    return { label: `OK (${foldCount} of ${limit.toFixed(1)} worst-case)`, ok: true };
  }
  return {
    label: `exceeds worst-case limit (${foldCount} ≥ ${limit.toFixed(1)})`,
    ok: false,
  };
}

export function metricsText(plan: { metrics?: { mean_err_mm: number; max_err_mm: number } } | null): string {
  if (plan === null || plan.metrics === undefined) {
    return "approximation: —";
  }
  const { mean_err_mm, max_err_mm } = plan.metrics;
  return `approximation: mean ${mean_err_mm.toFixed(2)} mm, max ${max_err_mm.toFixed(2)} mm`;
}
