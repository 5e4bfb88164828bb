// Canvas editor wiring: draw a polyline, debounce edits, fetch the plan,
// then fetch timing and feasibility for every accepted plan. All numbers
// on screen come from service responses.

import { ServiceClient, SingleFlight } from "./api.js";
import { Debouncer } from "./debounce.js";
import {
  fromCanvas,
  stripPolygons,
  toCanvas,
  vertexXy,
  type Viewport,
} from "./lattice.js";
import { feasibilityBadge, metricsText, timingPanelText } from "./panels.js";
import {
  applyAnalyzeResponse,
  applyPlanResponse,
  applySimulateResponse,
  canPlan,
  foldCount,
  initialState,
  type EditorState,
} from "./state.js";
import type { CurveFile, Point, TimingPreset } from "./types.js";

const LEFT_FILL = "#bfe0bf";
const RIGHT_FILL = "#e8c9e0";
const HIT_RADIUS_PX = 9;

function mustGet<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing #${id}`);
  }
  return el as T;
}

class Studio {
  private state: EditorState = initialState();
  private client = new ServiceClient("");
  private debouncer = new Debouncer();
  private dragIndex: number | null = null;

  private canvas = mustGet<HTMLCanvasElement>("editor");
  private bannerEl = mustGet<HTMLDivElement>("banner");
  private foldsEl = mustGet<HTMLDivElement>("folds");
  private timingEl = mustGet<HTMLDivElement>("timing");
  private badgeEl = mustGet<HTMLDivElement>("badge");
  private metricsEl = mustGet<HTMLDivElement>("metrics");
  private presetEl = mustGet<HTMLSelectElement>("preset");

  private planFlight = new SingleFlight<CurveFile>(async (curve) => {
    const settled = await this.client.plan(curve);
    this.state = applyPlanResponse(this.state, settled);
    if (settled.kind === "ok") {
      this.refreshPanels();
    }
    this.draw();
  });

  private simulateFlight = new SingleFlight<TimingPreset>(async (preset) => {
    if (this.state.plan === null) {
      return;
    }
    const settled = await this.client.simulate(this.state.plan, { timing: preset });
    this.state = applySimulateResponse(this.state, settled);
    this.draw();
  });

  private analyzeFlight = new SingleFlight<void>(async () => {
    const settled = await this.client.analyze();
    this.state = applyAnalyzeResponse(this.state, settled);
    this.draw();
  });

  constructor() {
    this.canvas.addEventListener("pointerdown", (ev) => this.onPointerDown(ev));
    this.canvas.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
    this.canvas.addEventListener("pointerup", () => (this.dragIndex = null));
    this.canvas.addEventListener("dblclick", (ev) => this.onDoubleClick(ev));
    this.presetEl.addEventListener("change", () => {
      this.state = { ...this.state, timingPreset: this.preset() };
      this.refreshPanels();
    });
    this.analyzeFlight.submit(undefined);
    this.draw();
  }

  private preset(): TimingPreset {
    return this.presetEl.value === "nominal" ? "nominal" : "measured";
  }

  private viewport(): Viewport {
    return {
      scale: 48,
      offsetX: this.canvas.width / 2,
      offsetY: this.canvas.height / 4,
      height: this.canvas.height,
    };
  }

  /** World position in mm for a pointer event (lattice math uses pitch units). */
  private eventWorldMm(ev: PointerEvent | MouseEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    const [u, v] = fromCanvas(
      [ev.clientX - rect.left, ev.clientY - rect.top],
      this.viewport(),
    );
    return [u * this.state.pitchMm, v * this.state.pitchMm];
  }

  private hitTest(ev: PointerEvent | MouseEvent): number | null {
    const rect = this.canvas.getBoundingClientRect();
    const px: Point = [ev.clientX - rect.left, ev.clientY - rect.top];
    const vp = this.viewport();
    for (let i = 0; i < this.state.points.length; i++) {
      const p = this.state.points[i]!;
      const q = toCanvas([p[0] / this.state.pitchMm, p[1] / this.state.pitchMm], vp);
      if (Math.hypot(q[0] - px[0], q[1] - px[1]) <= HIT_RADIUS_PX) {
        return i;
      }
    }
    return null;
  }

  private onPointerDown(ev: PointerEvent): void {
    const hit = this.hitTest(ev);
    if (hit !== null) {
      this.dragIndex = hit;
      return;
    }
    this.setPoints([...this.state.points, this.eventWorldMm(ev)]);
  }

  private onPointerMove(ev: PointerEvent): void {
    if (this.dragIndex === null) {
      return;
    }
    const points = this.state.points.slice();
    points[this.dragIndex] = this.eventWorldMm(ev);
    this.setPoints(points);
  }

  private onDoubleClick(ev: MouseEvent): void {
    const hit = this.hitTest(ev);
    if (hit !== null) {
      this.setPoints(this.state.points.filter((_, i) => i !== hit));
    }
  }

  private setPoints(points: Point[]): void {
    this.state = { ...this.state, points };
    this.draw();
    if (!canPlan(this.state)) {
      return; // plan action disabled below two points
    }
    this.debouncer.schedule(() => {
      this.planFlight.submit({
        pitch_mm: this.state.pitchMm,
        points: this.state.points,
      });
    });
  }

  private refreshPanels(): void {
    this.simulateFlight.submit(this.preset());
    this.analyzeFlight.submit(undefined);
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) {
      return;
    }
    const vp = this.viewport();
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    this.drawLattice(ctx, vp);

    const plan = this.state.plan;
    if (plan !== null) {
      const polys = stripPolygons(plan.strip);
      polys.forEach((tri, i) => {
        ctx.beginPath();
        const pts = tri.map((p) => toCanvas(p, vp));
        ctx.moveTo(pts[0]![0], pts[0]![1]);
        ctx.lineTo(pts[1]![0], pts[1]![1]);
        ctx.lineTo(pts[2]![0], pts[2]![1]);
        ctx.closePath();
        ctx.fillStyle = plan.folds[i] === "L" ? LEFT_FILL : RIGHT_FILL;
        ctx.fill();
        ctx.strokeStyle = "#444444";
        ctx.stroke();
      });
    }

    ctx.strokeStyle = "#c0392b";
    ctx.lineWidth = 2;
    ctx.beginPath();
    this.state.points.forEach((p, i) => {
      const q = toCanvas([p[0] / this.state.pitchMm, p[1] / this.state.pitchMm], vp);
      if (i === 0) {
        ctx.moveTo(q[0], q[1]);
      } else {
        ctx.lineTo(q[0], q[1]);
      }
    });
    ctx.stroke();
    ctx.lineWidth = 1;
    for (const p of this.state.points) {
      const q = toCanvas([p[0] / this.state.pitchMm, p[1] / this.state.pitchMm], vp);
      ctx.beginPath();
      ctx.arc(q[0], q[1], 4, 0, 2 * Math.PI);
      ctx.fillStyle = "#c0392b";
      ctx.fill();
    }

    this.bannerEl.textContent = this.state.banner ?? "";
    this.bannerEl.style.display = this.state.banner === null ? "none" : "block";
    const count = foldCount(this.state);
    this.foldsEl.textContent = count === null ? "folds: —" : `folds: ${count}`;
    this.timingEl.textContent = timingPanelText(this.state.timing);
    const badge = feasibilityBadge(count, this.state.report);
    this.badgeEl.textContent = badge.label;
    this.badgeEl.dataset["ok"] = badge.ok === null ? "" : String(badge.ok);
    this.metricsEl.textContent = metricsText(this.state.plan);
  }

  private drawLattice(ctx: CanvasRenderingContext2D, vp: Viewport): void {
    ctx.strokeStyle = "#e3e3e3";
    ctx.lineWidth = 1;
    const span = 14;
    for (let j = -span; j <= span; j++) {
      for (let k = -span; k <= span; k++) {
        const a = toCanvas(vertexXy(k, j), vp);
        for (const [dk, dj] of [
          [1, 0],
          [0, 1],
          [1, -1],
        ] as const) {
          const b = toCanvas(vertexXy(k + dk, j + dj), vp);
          ctx.beginPath();
          ctx.moveTo(a[0], a[1]);
          ctx.lineTo(b[0], b[1]);
          ctx.stroke();
        }
      }
    }
  }
}

new Studio();
