// Shared test plumbing: committed service fixtures (generated by the
// foldchain command line) and hand-resolvable fetch stubs.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

export function fixtureJson<T>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

export function jsonResponse(body: string, status = 200): Response {
  return new Response(body, {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (error: unknown) => void;
}

export function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  let reject!: (error: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

/** Fetch stub that parks every call on a deferred the test settles itself. */
export function manualFetch(): {
  fetch: (url: string, init?: RequestInit) => Promise<Response>;
  calls: { url: string; init?: RequestInit; reply: Deferred<Response> }[];
} {
  const calls: { url: string; init?: RequestInit; reply: Deferred<Response> }[] = [];
  return {
    calls,
    fetch: (url, init) => {
      const reply = deferred<Response>();
      calls.push({ url, init, reply });
      return reply.promise;
    },
  };
}
