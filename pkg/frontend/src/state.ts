// Editor state and the rules for folding service responses into it. The
// displayed overlay always comes from the newest accepted /plan response;
// stale or out-of-order results never overwrite a newer one.

import type { Settled } from "./api.js";
import type {
  AnalyzeReport,
  PlanFile,
  Point,
  SimulateResult,
  TimingPreset,
} from "./types.js";

export interface EditorState {
  points: Point[];
  pitchMm: number;
  timingPreset: TimingPreset;
  plan: PlanFile | null;
  planSeq: number;
  timing: SimulateResult | null;
  timingSeq: number;
  report: AnalyzeReport | null;
  reportSeq: number;
  banner: string | null;
}

export function initialState(): EditorState {
  return {
    points: [],
    pitchMm: 30.0,
    timingPreset: "measured",
    plan: null,
    planSeq: 0,
    timing: null,
    timingSeq: 0,
    report: null,
    reportSeq: 0,
    banner: null,
  };
}

export function canPlan(state: EditorState): boolean {
  return state.points.length >= 2;
}

export function foldCount(state: EditorState): number | null {
  return state.plan === null ? null : state.plan.folds.length;
}

export function editPoints(state: EditorState, points: Point[]): EditorState {
  return { ...state, points };
}

export function applyPlanResponse(
  state: EditorState,
  settled: Settled<PlanFile>,
): EditorState {
  if (settled.kind === "stale" || settled.seq <= state.planSeq) {
    return state;
  }
  if (settled.kind === "error") {
    // keep the last good overlay; the editor stays usable
    return { ...state, banner: settled.message };
  }
  return { ...state, plan: settled.value, planSeq: settled.seq, banner: null };
}

export function applySimulateResponse(
  state: EditorState,
  settled: Settled<SimulateResult>,
): EditorState {
  if (settled.kind === "stale" || settled.seq <= state.timingSeq) {
    return state;
  }
  if (settled.kind === "error") {
    // panels degrade independently; the overlay is untouched
    return { ...state, timing: null, timingSeq: settled.seq };
  }
  return { ...state, timing: settled.value, timingSeq: settled.seq };
}

export function applyAnalyzeResponse(
  state: EditorState,
  settled: Settled<AnalyzeReport>,
): EditorState {
  if (settled.kind === "stale" || settled.seq <= state.reportSeq) {
    return state;
  }
  if (settled.kind === "error") {
    return { ...state, report: null, reportSeq: settled.seq };
  }
  return { ...state, report: settled.value, reportSeq: settled.seq };
}
