import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api";
import type {
  AnswerResponse,
  ArgumentPayload,
  CaseDoc,
  CaseList,
  ClustersPayload,
  CqRow,
  EvaluationPayload,
  ReportPayload,
} from "../src/types";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf8")) as T;
}

export const CASE_ID = "marketplace-takedown";

export interface RequestLogEntry {
  path: string;
  method: string;
  body: string | null;
}

export interface FakeService {
  fetch: FetchLike;
  requests: RequestLogEntry[];
  answered: boolean;
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/**
 * Replays the recorded service responses. State is a single switch: before
 * the answer POST the *_before fixtures are served, afterwards the *_after
 * ones, exactly like the live service would behave.
 */
export function fakeService(): FakeService {
  const service: FakeService = { requests: [], answered: false, fetch: undefined as never };
  const base = `/api/cases/${CASE_ID}`;

  service.fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input, "http://service.test");
    const method = (init?.method ?? "GET").toUpperCase();
    const body = typeof init?.body === "string" ? init.body : null;
    service.requests.push({ path: url.pathname + url.search, method, body });

    if (method === "POST" && url.pathname === `${base}/arguments/a7/cqs/cq1/answer`) {
      service.answered = true;
      return jsonResponse(fixture<AnswerResponse>("answer_response.json"));
    }
    if (method !== "GET") {
      return jsonResponse({ error: `unexpected ${method} ${url.pathname}` }, 400);
    }
    switch (url.pathname) {
      case "/api/cases":
        return jsonResponse(fixture<CaseList>("cases.json"));
      case "/api/schemes":
        return jsonResponse(fixture<unknown>("schemes.json"));
      case base:
        return jsonResponse(fixture<CaseDoc>("case.json"));
      case `${base}/clusters`:
        return jsonResponse(fixture<ClustersPayload>("clusters.json"));
      case `${base}/arguments`:
        return jsonResponse(fixture<{ arguments: ArgumentPayload[] }>(
          service.answered ? "arguments_after.json" : "arguments_before.json"));
      case `${base}/evaluation`:
        return jsonResponse(
          service.answered
            ? fixture<AnswerResponse>("answer_response.json").evaluation
            : fixture<EvaluationPayload>("evaluation_before.json"));
      case `${base}/cqs`:
        return jsonResponse(fixture<{ cqs: CqRow[] }>(
          service.answered ? "cqs_after.json" : "cqs_before.json"));
      case `${base}/report`:
        return jsonResponse(fixture<ReportPayload>(
          service.answered ? "report_after.json" : "report_before.json"));
      default:
        return jsonResponse({ error: `unknown id ${url.pathname}` }, 404);
    }
  };
  return service;
}
