import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import {
  applyPlanResponse,
  applySimulateResponse,
  canPlan,
  editPoints,
  foldCount,
  initialState,
} from "../src/state.js";
import type { CurveFile, PlanFile } from "../src/types.js";
import { fixtureJson, fixtureText, jsonResponse } from "./helpers.js";

const VERTICAL_CURVE = fixtureJson<CurveFile>("vertical_curve.json");
const VERTICAL_PLAN = fixtureJson<PlanFile>("vertical_plan.json");

describe("overlay fidelity to service bytes", () => {
  it("shows exactly the fold count the command line planned for the vertical fixture", async () => {
    // the committed plan fixture was produced by `foldchain plan` on the
    // committed curve fixture; the stubbed service replays those bytes
    const client = new ServiceClient("", async (url) => {
      expect(url).toBe("/plan");
      return jsonResponse(fixtureText("vertical_plan.json"));
    });

    let state = initialState();
    state = editPoints(state, VERTICAL_CURVE.points);
    expect(canPlan(state)).toBe(true);

    state = applyPlanResponse(state, await client.plan(VERTICAL_CURVE));
    expect(state.plan).toEqual(VERTICAL_PLAN); // verbatim, nothing recomputed
    expect(foldCount(state)).toBe(VERTICAL_PLAN.folds.length);
    expect(foldCount(state)).toBe(5);
    expect(state.plan!.folds).toEqual(["R", "R", "L", "L", "R"]);
  });

  it("disables planning below two points", () => {
    let state = initialState();
    expect(canPlan(state)).toBe(false);
    state = editPoints(state, [[6, -9]]);
    expect(canPlan(state)).toBe(false);
    state = editPoints(state, [[6, -9], [6, 75]]);
    expect(canPlan(state)).toBe(true);
  });

  it("never lets an older accepted response overwrite a newer one", () => {
    const newer = { ...VERTICAL_PLAN, folds: VERTICAL_PLAN.folds.slice(0, 1) };
    let state = initialState();
    state = applyPlanResponse(state, { kind: "ok", seq: 2, value: newer });
    const clobber = applyPlanResponse(state, {
      kind: "ok",
      seq: 1,
      value: VERTICAL_PLAN,
    });
    expect(clobber).toBe(state);
    expect(clobber.plan).toEqual(newer);
  });

  it("clears the error banner on the next accepted plan", () => {
    let state = initialState();
    state = applyPlanResponse(state, {
      kind: "error",
      seq: 1,
      message: "service unreachable",
      code: null,
    });
    expect(state.banner).toBe("service unreachable");
    state = applyPlanResponse(state, { kind: "ok", seq: 2, value: VERTICAL_PLAN });
    expect(state.banner).toBeNull();
  });

  it("degrades the timing panel independently of the overlay", () => {
    let state = initialState();
    state = applyPlanResponse(state, { kind: "ok", seq: 1, value: VERTICAL_PLAN });
    state = applySimulateResponse(state, { kind: "ok", seq: 1, value: { events: [], totalMs: 8360 } });
    expect(state.timing!.totalMs).toBe(8360);

    state = applySimulateResponse(state, {
      kind: "error",
      seq: 2,
      message: "boom",
      code: 6,
    });
    expect(state.timing).toBeNull();
    expect(state.plan).toEqual(VERTICAL_PLAN);
  });
});
