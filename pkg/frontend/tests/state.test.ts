import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import {
  argumentsById,
  describeError,
  dismissToast,
  fetchCaseState,
  initialState,
  pushToast,
  submitAnswer,
} from "../src/state";
import { CASE_ID, fakeService } from "./helpers";

describe("case state loading", () => {
  it("assembles every panel input in one round of requests", async () => {
    const service = fakeService();
    const client = new ApiClient("", service.fetch);
    const state = await fetchCaseState(client, CASE_ID);
    expect(state.caseId).toBe(CASE_ID);
    expect(state.doc.case_id).toBe(CASE_ID);
    expect(state.args.length).toBe(11);
    expect(state.evaluation.labelling["a7"]).toBe("IN");
    expect(state.cqs.length).toBeGreaterThan(0);
    expect(state.report.findings.length).toBeGreaterThan(0);
    const paths = service.requests.map((r) => r.path);
    for (const suffix of ["", "/clusters", "/arguments", "/evaluation", "/cqs", "/report"]) {
      expect(paths.some((p) => p.startsWith(`/api/cases/${CASE_ID}${suffix}`))).toBe(true);
    }
  });

  it("indexes arguments by id", async () => {
    const service = fakeService();
    const state = await fetchCaseState(new ApiClient("", service.fetch), CASE_ID);
    const index = argumentsById(state.args);
    expect(index.get("a7")?.scheme_id).toBeTruthy();
    expect(index.size).toBe(state.args.length);
  });
});

describe("answer submission", () => {
  it("posts then refetches everything the labelling touches", async () => {
    const service = fakeService();
    const client = new ApiClient("", service.fetch);
    const before = await fetchCaseState(client, CASE_ID);
    const requestCountBefore = service.requests.length;

    const outcome = await submitAnswer(
      client, before, "a7", "cq1", "unfavourable", "pool records disagree");

    const post = service.requests[requestCountBefore];
    expect(post?.method).toBe("POST");
    expect(post?.path).toBe(`/api/cases/${CASE_ID}/arguments/a7/cqs/cq1/answer`);
    expect(JSON.parse(post?.body ?? "{}")).toEqual({
      answer: "unfavourable",
      justification: "pool records disagree",
    });

    expect(outcome.state.evaluation.labelling["a7"]).toBe("OUT");
    expect(outcome.state.evaluation.revision).toBeGreaterThan(before.evaluation.revision);
    const cq = outcome.state.cqs.find((r) => r.arg_id === "a7" && r.cq_id === "cq1");
    expect(cq?.state).toBe("unfavourable");
    const final = outcome.state.report.findings.find(
      (f) => f.statement === "connected(defendant-x, offence-wsm-admin)");
    expect(final?.tier).toBe("defeated");
    expect(before.report.findings.every((f) => f.tier === "presumptive")).toBe(true);
  });

  it("reports which nodes changed label", async () => {
    const service = fakeService();
    const client = new ApiClient("", service.fetch);
    const before = await fetchCaseState(client, CASE_ID);
    const outcome = await submitAnswer(client, before, "a7", "cq1", "unfavourable", "why");
    const flippedArgs = outcome.changedArgIds.filter((n) => !n.startsWith("cq:"));
    expect(flippedArgs).toEqual(["a11", "a7", "a9"]);
  });

  it("leaves the caller's state untouched on failure", async () => {
    const service = fakeService();
    const client = new ApiClient("", service.fetch);
    const before = await fetchCaseState(client, CASE_ID);
    const failingClient = new ApiClient("", async () =>
      new Response(JSON.stringify({ error: "a justification is required" }), { status: 400 }));
    const failure = await submitAnswer(failingClient, before, "a7", "cq1", "unfavourable", "")
      .catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(before.evaluation.labelling["a7"]).toBe("IN");
    expect(before.report.findings.every((f) => f.tier === "presumptive")).toBe(true);
  });
});

describe("toasts and error text", () => {
  it("pushes and dismisses toasts immutably", () => {
    const state = initialState();
    const withToast = pushToast(state, "error", "nope");
    expect(state.toasts.length).toBe(0);
    expect(withToast.toasts.length).toBe(1);
    const id = withToast.toasts[0]!.id;
    const cleared = dismissToast(withToast, id);
    expect(cleared.toasts.length).toBe(0);
    expect(withToast.toasts.length).toBe(1);
  });

  it("describes busy errors with the retry hint", () => {
    const busy = new ApiError("case busy", "busy", 503, 1);
    expect(describeError(busy)).toBe("case is busy; retry in 1s");
    const plain = new ApiError("unknown id x", "api", 404);
    expect(describeError(plain)).toBe("unknown id x");
    expect(describeError(new Error("boom"))).toContain("boom");
  });
});
