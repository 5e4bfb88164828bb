// Service client with per-endpoint request sequence numbers. A response is
// only usable when no newer request for the same endpoint has started in
// the meantime; everything else comes back marked stale so the caller can
// drop it on the floor.

import type {
  AnalyzeReport,
  CurveFile,
  PlanFile,
  ServiceErrorBody,
  SimulateResult,
  TimingPreset,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type Endpoint = "plan" | "simulate" | "render" | "analyze";

export type Settled<T> =
  | { kind: "ok"; seq: number; value: T }
  | { kind: "stale"; seq: number }
  | { kind: "error"; seq: number; message: string; code: number | null };

export interface SimulateOptions {
  timing?: TimingPreset;
  group?: "one" | "batch";
  seed?: number;
  chain?: number;
}

/** Timeline JSON plus the trailing total_ms= line, as one text body. */
export function parseSimulateOutput(text: string): SimulateResult {
  const cut = text.lastIndexOf("total_ms=");
  if (cut < 0) {
    throw new Error("simulate response is missing its total_ms line");
  }
  const totalMs = Number(text.slice(cut + "total_ms=".length).trim());
  if (!Number.isFinite(totalMs)) {
    throw new Error("simulate response has a malformed total_ms line");
  }
  return { events: JSON.parse(text.slice(0, cut)), totalMs };
}

export class ServiceClient {
  private seq: Record<Endpoint, number> = {
    plan: 0,
    simulate: 0,
    render: 0,
    analyze: 0,
  };

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  /** Sequence number of the newest request ever started for the endpoint. */
  latestSeq(endpoint: Endpoint): number {
    return this.seq[endpoint];
  }

  plan(curve: CurveFile): Promise<Settled<PlanFile>> {
    return this.request("plan", "/plan", curve, (raw) => JSON.parse(raw) as PlanFile);
  }

  simulate(plan: PlanFile, options: SimulateOptions = {}): Promise<Settled<SimulateResult>> {
    return this.request("simulate", "/simulate", { plan, ...options }, parseSimulateOutput);
  }

  render(plan: PlanFile, curve?: CurveFile): Promise<Settled<string>> {
    const body = curve === undefined ? { plan } : { plan, curve };
    return this.request("render", "/render", body, (raw) => raw);
  }

  analyze(query: Record<string, string | number> = {}): Promise<Settled<AnalyzeReport>> {
    const qs = new URLSearchParams(
      Object.entries(query).map(([k, v]): [string, string] => [k, String(v)]),
    ).toString();
    const path = qs ? `/analyze?${qs}` : "/analyze";
    return this.request("analyze", path, undefined, (raw) => JSON.parse(raw) as AnalyzeReport);
  }

  private async request<T>(
    endpoint: Endpoint,
    path: string,
    body: unknown,
    parse: (raw: string) => T,
  ): Promise<Settled<T>> {
    const mine = ++this.seq[endpoint];
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method: body === undefined ? "GET" : "POST",
        body: body === undefined ? undefined : JSON.stringify(body),
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      });
    } catch (err) {
      if (mine !== this.seq[endpoint]) {
        return { kind: "stale", seq: mine };
      }
      return { kind: "error", seq: mine, message: String(err), code: null };
    }
    const raw = await response.text();
    if (mine !== this.seq[endpoint]) {
      // a newer request for this endpoint started while we were waiting
      return { kind: "stale", seq: mine };
    }
    if (!response.ok) {
      let message = `HTTP ${response.status}`;
      let code: number | null = null;
      try {
        const parsed = JSON.parse(raw) as ServiceErrorBody;
        message = parsed.error;
        code = parsed.code;
      } catch {
        // error body was not the service's JSON shape; keep the status text
      }
      return { kind: "error", seq: mine, message, code };
    }
    try {
      return { kind: "ok", seq: mine, value: parse(raw) };
    } catch (err) {
      return { kind: "error", seq: mine, message: String(err), code: null };
    }
  }
}

/**
 * Keeps at most one request in flight: while busy, only the newest queued
 * arguments survive, and they are submitted as soon as the current request
 * settles.
 */
export class SingleFlight<A> {
  private busy = false;
  private queued: A | undefined;
  private hasQueued = false;

  constructor(private run: (args: A) => Promise<void>) {}

  submit(args: A): void {
    if (this.busy) {
      this.queued = args;
      this.hasQueued = true;
      return;
    }
    this.busy = true;
    void this.run(args).finally(() => {
      this.busy = false;
      if (this.hasQueued) {
        const next = this.queued as A;
        this.hasQueued = false;
        this.queued = undefined;
        this.submit(next);
      }
    });
  }

  get inFlight(): boolean {
    return this.busy;
  }
}
