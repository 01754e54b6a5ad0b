// Response shapes of the chaincase REST service. Everything the UI renders
// comes from one of these; the client never re-derives labels or tiers.

export type Label = "IN" | "OUT" | "UNDEC";
export type CqState = "open" | "favourable" | "unfavourable";
export type CqKind = "assumption" | "exception" | "supportive";
export type Tier = "corroborated" | "presumptive" | "contested" | "defeated";

export interface CaseList {
  cases: string[];
}

export interface StatementJson {
  predicate: string;
  args: string[];
  negated: boolean;
}

export interface CaseDoc {
  format_version: string;
  case_id: string;
  chain: { embedded?: ChainDoc; path?: string };
  entities: { entity_id: string; label: string; kind: string }[];
  offences: { offence_id: string; label: string }[];
  evidence: {
    evidence_id: string;
    statement: StatementJson;
    source: string;
    obtained_via: string;
  }[];
  arguments: unknown[];
  cq_answers: {
    seq: number;
    arg_id: string;
    cq_id: string;
    answer: string;
    justification: string;
  }[];
  attribution_tags: { addresses: string[]; entity_id: string; source: string }[];
}

export interface ChainDoc {
  transactions: {
    txid: string;
    coinbase: boolean;
    inputs: { txid: string; vout: number }[];
    outputs: { address: string; value_sat: number }[];
  }[];
}

export interface ClustersPayload {
  coinjoin_filter: boolean;
  clusters: { addresses: string[]; entities: string[] }[];
  merges: { txid: string; address_a: string; address_b: string }[];
  coinjoin_flagged: { txid: string; reason: string }[];
}

export interface CqRow {
  arg_id: string;
  cq_id: string;
  kind: CqKind;
  state: CqState;
  text: string;
  justification: string;
}

export interface ArgumentPayload {
  arg_id: string;
  scheme_id: string;
  scheme_name: string;
  bindings: Record<string, string>;
  premises: {
    text: string;
    statement: string;
    support: { kind: "evidence" | "argument"; ref: string };
  }[];
  conclusion: { text: string; statement: string };
  label: Label | null;
  critical_questions: {
    cq_id: string;
    kind: CqKind;
    text: string;
    state: CqState;
    justification: string;
  }[];
}

export interface FrameworkPayload {
  nodes: { id: string; kind: string }[];
  attacks: { attacker: string; target: string; reason: string; via: string | null }[];
  objections: Record<string, { arg_id: string; cq_id: string }>;
}

export interface EvaluationPayload {
  case_id: string;
  revision: number;
  semantics: string;
  open_assumptions_attack: boolean;
  labelling: Record<string, Label>;
  statements: Record<string, Label>;
  framework: FrameworkPayload;
}

export interface AnswerResponse {
  arg_id: string;
  cq_id: string;
  state: CqState;
  justification: string;
  evaluation: EvaluationPayload;
}

export interface ReportPayload {
  case_id: string;
  revision: number;
  semantics: string;
  open_assumptions_attack: boolean;
  findings: {
    statement: string;
    status: Label;
    tier: Tier;
    concluding_args: string[];
    chain: {
      arg_id: string;
      scheme_id: string;
      scheme_name: string;
      label: Label;
      conclusion: string;
    }[];
    critical_questions: CqRow[];
    open_cq_count: number;
    defeaters: { attacker: string; target: string; reason: string; text: string }[];
  }[];
  clusters: { addresses: string[]; entities: string[]; merge_txids: string[] }[];
}

export interface SchemeCatalog {
  schemes: Record<
    string,
    {
      name: string;
      variables: string[];
      premises: string[];
      conclusion: string;
      critical_questions: { cq_id: string; text: string; kind: CqKind; target: string }[];
    }
  >;
}
