// Wire formats of the foldchain HTTP service. The editor never computes
// these itself; every field below is read back from a response.

export type Point = [number, number];

export interface CurveFile {
  pitch_mm: number;
  points: Point[];
}

/** Lattice vertex key (k, j); plane position is derived only for drawing. */
export type VertexKey = [number, number];
export type EdgeKey = [VertexKey, VertexKey];

export type FoldLetter = "L" | "R";

export interface StripElement {
  q: number;
  r: number;
  up: boolean;
  entry: EdgeKey;
  exit: EdgeKey | null;
}

export interface AnchorPose {
  q: number;
  r: number;
  up: boolean;
  entry: EdgeKey;
}

export interface PlanMetrics {
  mean_err_mm: number;
  max_err_mm: number;
}

export interface PlanFile {
  pitch_mm: number;
  anchor: AnchorPose;
  folds: FoldLetter[];
  strip: StripElement[];
  metrics?: PlanMetrics;
}

export interface TimelineEvent {
  t_start_ms: number;
  t_end_ms: number;
  event: string;
  particle: number | null;
}

export interface SimulateResult {
  events: TimelineEvent[];
  totalMs: number;
}

export interface FeasibilityRow {
  n: number;
  thread_force_N: number;
  unlock_required_N: number;
  unlock_available_N: number;
  feasible: boolean;
}

export interface AnalyzeReport {
  advantage: number;
  F_s_available_N: number;
  F_s_available_kgf: number;
  max_particles: number;
  max_particles_printed: number;
  quoted_design_limit: number;
  note: string;
  feasibility: FeasibilityRow[];
}

export interface ServiceErrorBody {
  error: string;
  code: number;
}

export type TimingPreset = "measured" | "nominal";
