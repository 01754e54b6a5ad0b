import type {
  AnswerResponse,
  ArgumentPayload,
  CaseDoc,
  CaseList,
  ClustersPayload,
  CqRow,
  CqState,
  EvaluationPayload,
  ReportPayload,
  SchemeCatalog,
} from "./types";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Error from the service or the transport; `kind` picks the UI reaction. */
export class ApiError extends Error {
  readonly kind: "network" | "busy" | "api";
  readonly status: number | null;
  readonly retryAfterSeconds: number | null;

  constructor(
    message: string,
    kind: "network" | "busy" | "api",
    status: number | null = null,
    retryAfterSeconds: number | null = null,
  ) {
    super(message);
    this.kind = kind;
    this.status = status;
    this.retryAfterSeconds = retryAfterSeconds;
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // non-JSON error body; keep the status message
  }
  if (response.status === 503) {
    const header = response.headers.get("Retry-After");
    const seconds = header === null ? null : Number(header);
    return new ApiError(message, "busy", 503, Number.isFinite(seconds) ? seconds : null);
  }
  return new ApiError(message, "api", response.status);
}

/** Thin typed client over the case service; every view reads through here. */
export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (cause) {
      throw new ApiError(`cannot reach the case service: ${String(cause)}`, "network");
    }
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  listCases(): Promise<CaseList> {
    return this.request("/api/cases");
  }

  getCase(caseId: string): Promise<CaseDoc> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}`);
  }

  getClusters(caseId: string, coinjoinFilter = true): Promise<ClustersPayload> {
    const flag = coinjoinFilter ? "true" : "false";
    return this.request(
      `/api/cases/${encodeURIComponent(caseId)}/clusters?coinjoin_filter=${flag}`,
    );
  }

  getArguments(caseId: string): Promise<{ arguments: ArgumentPayload[] }> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}/arguments`);
  }

  getEvaluation(caseId: string): Promise<EvaluationPayload> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}/evaluation`);
  }

  getCqs(caseId: string, status: "all" | "open" | "answered" = "all"): Promise<{ cqs: CqRow[] }> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}/cqs?status=${status}`);
  }

  answerCq(
    caseId: string,
    argId: string,
    cqId: string,
    answer: CqState,
    justification: string,
  ): Promise<AnswerResponse> {
    const path =
      `/api/cases/${encodeURIComponent(caseId)}/arguments/` +
      `${encodeURIComponent(argId)}/cqs/${encodeURIComponent(cqId)}/answer`;
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ answer, justification }),
    });
  }

  autoInstantiate(caseId: string): Promise<{ added: ArgumentPayload[] }> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}/auto-instantiate`, {
      method: "POST",
    });
  }

  getReport(caseId: string): Promise<ReportPayload> {
    return this.request(`/api/cases/${encodeURIComponent(caseId)}/report`);
  }

  reportMarkdownUrl(caseId: string): string {
    return `${this.base}/api/cases/${encodeURIComponent(caseId)}/report?format=md`;
  }

  getSchemes(): Promise<SchemeCatalog> {
    return this.request("/api/schemes");
  }
}
