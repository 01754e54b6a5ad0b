import { ApiClient, ApiError } from "./api";
import type {
  ArgumentPayload,
  CaseDoc,
  ClustersPayload,
  CqRow,
  CqState,
  EvaluationPayload,
  ReportPayload,
} from "./types";

export interface Toast {
  id: number;
  kind: "error" | "info";
  message: string;
}

export interface CaseState {
  caseId: string;
  doc: CaseDoc;
  clusters: ClustersPayload;
  args: ArgumentPayload[];
  evaluation: EvaluationPayload;
  cqs: CqRow[];
  report: ReportPayload;
}

export interface AppState {
  cases: string[];
  current: CaseState | null;
  toasts: Toast[];
  loading: boolean;
  /** set when the service cannot be reached at all -> retry screen */
  unreachable: boolean;
}

export function initialState(): AppState {
  return { cases: [], current: null, toasts: [], loading: false, unreachable: false };
}

let toastCounter = 0;

export function pushToast(state: AppState, kind: Toast["kind"], message: string): AppState {
  toastCounter += 1;
  return { ...state, toasts: [...state.toasts, { id: toastCounter, kind, message }] };
}

export function dismissToast(state: AppState, id: number): AppState {
  return { ...state, toasts: state.toasts.filter((t) => t.id !== id) };
}

export function argumentsById(args: ArgumentPayload[]): Map<string, ArgumentPayload> {
  return new Map(args.map((a) => [a.arg_id, a]));
}

/** Everything a case view renders, fetched together. */
export async function fetchCaseState(client: ApiClient, caseId: string): Promise<CaseState> {
  const [doc, clusters, args, evaluation, cqs, report] = await Promise.all([
    client.getCase(caseId),
    client.getClusters(caseId),
    client.getArguments(caseId),
    client.getEvaluation(caseId),
    client.getCqs(caseId),
    client.getReport(caseId),
  ]);
  return {
    caseId,
    doc,
    clusters,
    args: args.arguments,
    evaluation,
    cqs: cqs.cqs,
    report,
  };
}

export interface AnswerOutcome {
  state: CaseState;
  changedArgIds: string[];
}

/**
 * The critical-question loop: POST the answer, then refresh every view that
 * depends on the labelling. The returned state replaces the old one only on
 * success; on failure the caller keeps the old state and shows a toast.
 */
export async function submitAnswer(
  client: ApiClient,
  current: CaseState,
  argId: string,
  cqId: string,
  answer: CqState,
  justification: string,
): Promise<AnswerOutcome> {
  const response = await client.answerCq(current.caseId, argId, cqId, answer, justification);
  const [args, cqs, report] = await Promise.all([
    client.getArguments(current.caseId),
    client.getCqs(current.caseId),
    client.getReport(current.caseId),
  ]);
  const next: CaseState = {
    ...current,
    args: args.arguments,
    evaluation: response.evaluation,
    cqs: cqs.cqs,
    report,
  };
  const changed: string[] = [];
  for (const [node, label] of Object.entries(response.evaluation.labelling)) {
    if (current.evaluation.labelling[node] !== label) changed.push(node);
  }
  for (const node of Object.keys(current.evaluation.labelling)) {
    if (!(node in response.evaluation.labelling)) changed.push(node);
  }
  return { state: next, changedArgIds: changed.sort() };
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    if (error.kind === "busy") {
      const wait = error.retryAfterSeconds ?? 1;
      return `case is busy; retry in ${wait}s`;
    }
    return error.message;
  }
  return String(error);
}
