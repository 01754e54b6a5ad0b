import type {
  ArgumentPayload,
  CqRow,
  CqState,
  EvaluationPayload,
  Label,
  ReportPayload,
  Tier,
} from "./types";

// Node colors are a fixed function of the latest evaluation response:
// accepted green, defeated red, undecided amber, objections gray.
export const LABEL_COLORS: Record<Label, string> = {
  IN: "#2e8b57",
  OUT: "#c0392b",
  UNDEC: "#e6a817",
};

export const TIER_BADGES: Record<Tier, string> = {
  corroborated: "badge-corroborated",
  presumptive: "badge-presumptive",
  contested: "badge-contested",
  defeated: "badge-defeated",
};

export interface ArgumentNodeView {
  id: string;
  kind: "argument" | "objection";
  label: Label;
  color: string;
  title: string;
}

export interface ArgumentEdgeView {
  from: string;
  to: string;
  reason: string;
}

export interface ArgumentGraphView {
  nodes: ArgumentNodeView[];
  edges: ArgumentEdgeView[];
}

export function argumentGraphView(
  evaluation: EvaluationPayload,
  argumentsById: Map<string, ArgumentPayload>,
): ArgumentGraphView {
  const nodes = evaluation.framework.nodes.map((node) => {
    const label = evaluation.labelling[node.id] ?? "UNDEC";
    let title: string;
    if (node.kind === "objection") {
      const ref = evaluation.framework.objections[node.id];
      title = ref ? `objection ${ref.cq_id} on ${ref.arg_id}` : node.id;
    } else {
      const argument = argumentsById.get(node.id);
      title = argument
        ? `${argument.scheme_name}: ${argument.conclusion.statement}`
        : node.id;
    }
    return {
      id: node.id,
      kind: node.kind === "objection" ? ("objection" as const) : ("argument" as const),
      label,
      color: LABEL_COLORS[label],
      title,
    };
  });
  const edges = evaluation.framework.attacks.map((attack) => ({
    from: attack.attacker,
    to: attack.target,
    reason: attack.reason,
  }));
  return { nodes, edges };
}

export interface FindingBadge {
  statement: string;
  tier: Tier;
  badgeClass: string;
  status: Label;
}

export function findingBadges(report: ReportPayload): FindingBadge[] {
  return report.findings.map((finding) => ({
    statement: finding.statement,
    tier: finding.tier,
    badgeClass: TIER_BADGES[finding.tier],
    status: finding.status,
  }));
}

/** Open questions first (analyst queue), then answered ones for the record. */
export function cqQueue(rows: CqRow[]): CqRow[] {
  const open = rows.filter((row) => row.state === "open");
  const answered = rows.filter((row) => row.state !== "open");
  return [...open, ...answered];
}

export interface AnswerFormInput {
  answer: string;
  justification: string;
}

export interface AnswerFormCheck {
  ok: boolean;
  message: string;
  answer?: CqState;
}

/** Client-side validation mirroring the service's rules, to fail fast. */
export function checkAnswerForm(input: AnswerFormInput): AnswerFormCheck {
  if (input.answer !== "favourable" && input.answer !== "unfavourable") {
    return { ok: false, message: "pick favourable or unfavourable" };
  }
  if (input.justification.trim() === "") {
    return { ok: false, message: "a justification is required" };
  }
  return { ok: true, message: "", answer: input.answer };
}

export function clusterTooltip(node: {
  addresses: string[];
  entities: string[];
  mergeTxids: string[];
}): string {
  const lines = [`addresses: ${node.addresses.join(", ")}`];
  if (node.entities.length > 0) {
    lines.push(`tagged: ${node.entities.join(", ")}`);
  }
  if (node.mergeTxids.length > 0) {
    lines.push(`merged by: ${node.mergeTxids.join(", ")}`);
  } else {
    lines.push("no co-spend merges");
  }
  return lines.join("\n");
}

export function formatBtc(valueSat: number): string {
  return `${(valueSat / 100_000_000).toFixed(8).replace(/0+$/, "").replace(/\.$/, "")} BTC`;
}
