// Typed client for the sdckit session service. Every value the workbench
// displays comes out of these payloads; nothing is recomputed client-side.

export interface UploadResult {
  dataset_id: string;
  record_count: number;
  variables: string[];
}

export interface ThresholdCount {
  bound: number;
  count: number;
}

export interface SummaryPayload {
  qid: string;
  record_count: number;
  excluded: number;
  classes: number;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  threshold_counts: ThresholdCount[];
}

export interface HistogramPayload {
  edges: number[];
  counts: number[];
}

export interface RiskPayload {
  qid: string;
  k: number;
  threshold: number;
  global_risk: number;
  max_risk: number;
  unsafe_count: number;
  record_count: number;
  histogram: HistogramPayload;
}

export interface TruncateOp {
  op: "truncate";
  variable: string;
  digits: number;
}

export interface RecodeOp {
  op: "recode";
  variable: string;
  level: number;
  hierarchy: string[][];
}

export interface SuppressOp {
  op: "suppress";
  importance?: Record<string, number>;
}

export interface DeleteOp {
  op: "delete";
}

export type OpBody = (TruncateOp | RecodeOp | SuppressOp | DeleteOp) & {
  qid?: string;
  k?: number;
};

export interface OpResult {
  op: unknown;
  depth: number;
  risk: RiskPayload;
  suppressed_cells: Record<string, number>;
  deleted_records: number;
}

export interface ReportPayload {
  title: string;
  columns: string[];
  rows: Array<Array<string | number | null>>;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function fail(response: Response): Promise<never> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(readonly baseUrl: string, fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.url(path));
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method: "POST" };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.url(path), init);
    if (!response.ok) await fail(response);
    return (await response.json()) as T;
  }

  async uploadDataset(csvText: string, schemaText: string): Promise<UploadResult> {
    const form = new FormData();
    form.append("csv", new Blob([csvText], { type: "text/csv" }), "data.csv");
    form.append("schema", new Blob([schemaText], { type: "application/json" }),
                "schema.json");
    const response = await this.fetchImpl(this.url("/api/datasets"),
                                          { method: "POST", body: form });
    if (!response.ok) await fail(response);
    return (await response.json()) as UploadResult;
  }

  openSession(datasetId: string): Promise<{ session_id: string }> {
    return this.postJson("/api/sessions", { dataset_id: datasetId });
  }

  summary(sessionId: string, qid: string): Promise<SummaryPayload> {
    return this.getJson(`/api/sessions/${sessionId}/summary?qid=${encodeURIComponent(qid)}`);
  }

  risk(sessionId: string, qid: string, k: number): Promise<RiskPayload> {
    return this.getJson(`/api/sessions/${sessionId}/risk?qid=${encodeURIComponent(qid)}&k=${k}`);
  }

  applyOp(sessionId: string, body: OpBody): Promise<OpResult> {
    return this.postJson(`/api/sessions/${sessionId}/ops`, body);
  }

  undo(sessionId: string): Promise<{ depth: number }> {
    return this.postJson(`/api/sessions/${sessionId}/undo`);
  }

  exportUrl(sessionId: string): string {
    return this.url(`/api/sessions/${sessionId}/export`);
  }

  async exportCsv(sessionId: string): Promise<string> {
    const response = await this.fetchImpl(this.exportUrl(sessionId));
    if (!response.ok) await fail(response);
    return response.text();
  }

  report(sessionId: string, evalQid: string, lossQid: string): Promise<ReportPayload> {
    const qs = `eval_qid=${encodeURIComponent(evalQid)}&loss_qid=${encodeURIComponent(lossQid)}`;
    return this.getJson(`/api/sessions/${sessionId}/report?${qs}`);
  }
}
