import { describe, expect, it } from "vitest";

import { parseSimulateOutput } from "../src/api.js";
import { feasibilityBadge, metricsText, timingPanelText } from "../src/panels.js";
import type { AnalyzeReport, PlanFile } from "../src/types.js";
import { fixtureJson, fixtureText } from "./helpers.js";

const REPORT = fixtureJson<AnalyzeReport>("analyze_default.json");

describe("timing panel", () => {
  it("shows 1672 ms for the committed one-fold run under the measured preset", () => {
    const timing = parseSimulateOutput(fixtureText("one_fold_timeline.txt"));
    expect(timing.totalMs).toBe(1672);
    expect(timingPanelText(timing)).toContain("1672 ms");
  });

  it("shows a placeholder before the first simulate response", () => {
    expect(timingPanelText(null)).toBe("timing: —");
  });
});

describe("feasibility badge", () => {
  it("is OK while the fold count sits below the reported limit", () => {
    const badge = feasibilityBadge(10, REPORT);
    expect(badge.ok).toBe(true);
    expect(badge.label.startsWith("OK")).toBe(true);
  });

  it("flags plans beyond the reported worst-case limit", () => {
    const over = Math.ceil(REPORT.max_particles);
    const badge = feasibilityBadge(over, REPORT);
    expect(badge.ok).toBe(false);
    expect(badge.label).toContain("exceeds worst-case limit");
  });

  it("uses only the service's number as the threshold", () => {
    const below = Math.floor(REPORT.max_particles);
    expect(feasibilityBadge(below, REPORT).ok).toBe(true);
    expect(feasibilityBadge(below + 1, REPORT).ok).toBe(false);
  });

  it("stays neutral while either input is missing", () => {
    expect(feasibilityBadge(null, REPORT).ok).toBeNull();
    expect(feasibilityBadge(3, null).ok).toBeNull();
  });
});

describe("metrics line", () => {
  it("formats the plan's approximation metrics", () => {
    const plan = fixtureJson<PlanFile>("vertical_plan.json");
    const text = metricsText(plan);
    expect(text).toContain("mean 4.56 mm");
    expect(text).toContain("max 12.73 mm");
  });

  it("shows a placeholder without a plan", () => {
    expect(metricsText(null)).toBe("approximation: —");
  });
});
