import { describe, expect, it } from "vitest";

import type {
  AnswerResponse,
  ArgumentPayload,
  CqRow,
  EvaluationPayload,
  ReportPayload,
} from "../src/types";
import {
  LABEL_COLORS,
  argumentGraphView,
  checkAnswerForm,
  clusterTooltip,
  cqQueue,
  findingBadges,
  formatBtc,
} from "../src/viewmodel";
import { fixture } from "./helpers";

const EVAL_BEFORE = fixture<EvaluationPayload>("evaluation_before.json");
const EVAL_AFTER = fixture<AnswerResponse>("answer_response.json").evaluation;
const ARGS_BEFORE = fixture<{ arguments: ArgumentPayload[] }>("arguments_before.json").arguments;
const REPORT_BEFORE = fixture<ReportPayload>("report_before.json");
const REPORT_AFTER = fixture<ReportPayload>("report_after.json");

function byId(args: ArgumentPayload[]): Map<string, ArgumentPayload> {
  return new Map(args.map((a) => [a.arg_id, a]));
}

describe("argument graph view", () => {
  it("colors accepted arguments green", () => {
    const view = argumentGraphView(EVAL_BEFORE, byId(ARGS_BEFORE));
    const a7 = view.nodes.find((n) => n.id === "a7");
    expect(a7?.label).toBe("IN");
    expect(a7?.color).toBe(LABEL_COLORS.IN);
    expect(a7?.color).toBe("#2e8b57");
  });

  it("colors defeated arguments red after the unfavourable answer", () => {
    const view = argumentGraphView(EVAL_AFTER, byId(ARGS_BEFORE));
    for (const id of ["a7", "a9", "a11"]) {
      const node = view.nodes.find((n) => n.id === id);
      expect(node?.label).toBe("OUT");
      expect(node?.color).toBe("#c0392b");
    }
    const a1 = view.nodes.find((n) => n.id === "a1");
    expect(a1?.color).toBe("#2e8b57");
  });

  it("defaults unlabelled nodes to amber UNDEC", () => {
    const stripped: EvaluationPayload = {
      ...EVAL_BEFORE,
      labelling: {},
    };
    const view = argumentGraphView(stripped, byId(ARGS_BEFORE));
    for (const node of view.nodes) {
      expect(node.label).toBe("UNDEC");
      expect(node.color).toBe("#e6a817");
    }
  });

  it("titles objection nodes with their question and target", () => {
    // objection nodes appear only once a question attacks, i.e. after the answer
    const view = argumentGraphView(EVAL_AFTER, byId(ARGS_BEFORE));
    const objection = view.nodes.find((n) => n.id === "cq:a7:cq1");
    expect(objection?.kind).toBe("objection");
    expect(objection?.title).toBe("objection cq1 on a7");
    expect(objection?.label).toBe("IN");
  });

  it("titles argument nodes with scheme and conclusion", () => {
    const view = argumentGraphView(EVAL_BEFORE, byId(ARGS_BEFORE));
    const a7 = view.nodes.find((n) => n.id === "a7");
    expect(a7?.title).toContain(":");
    const payload = ARGS_BEFORE.find((a) => a.arg_id === "a7")!;
    expect(a7?.title).toBe(`${payload.scheme_name}: ${payload.conclusion.statement}`);
  });

  it("carries every attack as an edge", () => {
    const view = argumentGraphView(EVAL_BEFORE, byId(ARGS_BEFORE));
    expect(view.edges.length).toBe(EVAL_BEFORE.framework.attacks.length);
    const ids = new Set(view.nodes.map((n) => n.id));
    for (const edge of view.edges) {
      expect(ids.has(edge.from)).toBe(true);
      expect(ids.has(edge.to)).toBe(true);
    }
  });
});

describe("report badges", () => {
  it("maps every tier to its badge class", () => {
    const before = findingBadges(REPORT_BEFORE);
    expect(before.length).toBeGreaterThan(0);
    for (const badge of before) {
      expect(badge.tier).toBe("presumptive");
      expect(badge.badgeClass).toBe("badge-presumptive");
    }
  });

  it("flips the final statement to a defeated badge", () => {
    const final = "connected(defendant-x, offence-wsm-admin)";
    const after = findingBadges(REPORT_AFTER);
    const badge = after.find((b) => b.statement === final);
    expect(badge?.tier).toBe("defeated");
    expect(badge?.badgeClass).toBe("badge-defeated");
    expect(badge?.status).toBe("OUT");
  });
});

describe("critical question queue", () => {
  it("lists open questions before answered ones, order preserved", () => {
    const rows = [
      { arg_id: "a1", cq_id: "cq1", kind: "exception", state: "favourable", text: "t", justification: "j" },
      { arg_id: "a1", cq_id: "cq2", kind: "exception", state: "open", text: "t", justification: "" },
      { arg_id: "a2", cq_id: "cq1", kind: "assumption", state: "open", text: "t", justification: "" },
      { arg_id: "a2", cq_id: "cq2", kind: "exception", state: "unfavourable", text: "t", justification: "j" },
    ] as CqRow[];
    const queue = cqQueue(rows);
    expect(queue.map((r) => `${r.arg_id}/${r.cq_id}`)).toEqual([
      "a1/cq2", "a2/cq1", "a1/cq1", "a2/cq2",
    ]);
  });
});

describe("answer form validation", () => {
  it("requires a recognised answer", () => {
    const check = checkAnswerForm({ answer: "", justification: "solid" });
    expect(check.ok).toBe(false);
    expect(check.message).toBe("pick favourable or unfavourable");
  });

  it("requires a non-blank justification", () => {
    const check = checkAnswerForm({ answer: "unfavourable", justification: "   " });
    expect(check.ok).toBe(false);
    expect(check.message).toBe("a justification is required");
  });

  it("passes a complete form through typed", () => {
    const check = checkAnswerForm({ answer: "favourable", justification: "ledger shows it" });
    expect(check.ok).toBe(true);
    expect(check.answer).toBe("favourable");
  });
});

describe("cluster tooltip", () => {
  it("cites merge provenance and tags", () => {
    const text = clusterTooltip({
      addresses: ["addr-w2-a", "addr-w2-b"],
      entities: ["dudebuy"],
      mergeTxids: ["tx-fund-w1"],
    });
    expect(text).toContain("addresses: addr-w2-a, addr-w2-b");
    expect(text).toContain("tagged: dudebuy");
    expect(text).toContain("merged by: tx-fund-w1");
  });

  it("says so when a node has no merges", () => {
    const text = clusterTooltip({ addresses: ["x"], entities: [], mergeTxids: [] });
    expect(text).toContain("no co-spend merges");
    expect(text).not.toContain("tagged:");
  });
});

describe("value formatting", () => {
  it("prints whole and fractional bitcoin without trailing zeros", () => {
    expect(formatBtc(100_000_000)).toBe("1 BTC");
    expect(formatBtc(95_000_000)).toBe("0.95 BTC");
    expect(formatBtc(1)).toBe("0.00000001 BTC");
    expect(formatBtc(0)).toBe("0 BTC");
  });
});
