import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/client.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

export function fixture<T>(name: string): T {
  return JSON.parse(fixtureText(name)) as T;
}

export interface RecordedRoute {
  method: string;
  path: string;
  status: number;
  body: string;
}

/** A fetch stub that replays recorded responses and logs what it saw. */
export function makeFetch(routes: RecordedRoute[]): {
  fetch: FetchLike;
  calls: { url: string; method: string; body?: string }[];
} {
  const calls: { url: string; method: string; body?: string }[] = [];
  const fetch: FetchLike = (url, init) => {
    const method = init?.method ?? "GET";
    calls.push({ url, method, body: init?.body });
    const route = routes.find((r) => r.method === method && url.endsWith(r.path));
    if (route === undefined) {
      return Promise.resolve({
        status: 404,
        text: () => Promise.resolve(JSON.stringify({ detail: "NOT_FOUND" })),
      });
    }
    return Promise.resolve({
      status: route.status,
      text: () => Promise.resolve(route.body),
    });
  };
  return { fetch, calls };
}
