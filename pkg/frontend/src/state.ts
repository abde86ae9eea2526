// Session state machine behind the workbench. Holds two service sessions
// over the same dataset: the working one takes every operation, the baseline
// one is never mutated and anchors the "before" side of the dashboard to the
// state at session creation.

import { ApiClient, OpBody, OpResult, RiskPayload, SummaryPayload } from "./api.js";

export interface HistoryEntry {
  label: string;
  unsafeBefore: number;
  unsafeAfter: number;
  depth: number;
  suppressedCells: number;
  deletedRecords: number;
}

export type BadgeState = "safe" | "unsafe" | "unknown";

export interface SideView {
  summary: SummaryPayload | null;
  risk: RiskPayload | null;
}

export class WorkbenchSession {
  qid: string | null = null;
  k = 2;
  readonly history: HistoryEntry[] = [];
  readonly baseline: SideView = { summary: null, risk: null };
  readonly current: SideView = { summary: null, risk: null };
  private inFlight = false;

  private constructor(
    private readonly api: ApiClient,
    readonly datasetId: string,
    readonly variables: string[],
    readonly workingId: string,
    readonly baselineId: string,
  ) {}

  static async open(api: ApiClient, datasetId: string,
                    variables: string[]): Promise<WorkbenchSession> {
    const working = await api.openSession(datasetId);
    const baseline = await api.openSession(datasetId);
    return new WorkbenchSession(api, datasetId, variables,
                                working.session_id, baseline.session_id);
  }

  get pending(): boolean {
    return this.inFlight;
  }

  get exportUrl(): string {
    return this.api.exportUrl(this.workingId);
  }

  badge(): BadgeState {
    if (!this.current.risk) return "unknown";
    return this.current.risk.unsafe_count === 0 ? "safe" : "unsafe";
  }

  private async guarded<T>(task: () => Promise<T>): Promise<T> {
    if (this.inFlight) throw new Error("another request is in flight");
    this.inFlight = true;
    try {
      return await task();
    } finally {
      this.inFlight = false;
    }
  }

  async composeQid(variables: string[]): Promise<void> {
    if (!variables.length) throw new Error("qid needs at least one variable");
    const qid = variables.join("+");
    await this.guarded(async () => {
      // reads only; the pristine baseline session stays pristine
      this.baseline.summary = await this.api.summary(this.baselineId, qid);
      this.baseline.risk = await this.api.risk(this.baselineId, qid, this.k);
      this.current.summary = await this.api.summary(this.workingId, qid);
      this.current.risk = await this.api.risk(this.workingId, qid, this.k);
      this.qid = qid;
    });
  }

  async setK(k: number): Promise<void> {
    const qid = this.requireQid();
    await this.guarded(async () => {
      this.baseline.risk = await this.api.risk(this.baselineId, qid, k);
      this.current.risk = await this.api.risk(this.workingId, qid, k);
      this.k = k;
    });
  }

  // Exactly one POST /ops per call; the dashboard's "after" side comes from
  // the op response itself.
  async applyOp(body: OpBody, label: string): Promise<OpResult> {
    const qid = this.requireQid();
    const before = this.current.risk;
    if (!before) throw new Error("dashboard not loaded yet");
    return this.guarded(async () => {
      const result = await this.api.applyOp(this.workingId,
                                            { ...body, qid, k: this.k });
      this.current.risk = result.risk;
      this.current.summary = await this.api.summary(this.workingId, qid);
      this.history.push({
        label,
        unsafeBefore: before.unsafe_count,
        unsafeAfter: result.risk.unsafe_count,
        depth: result.depth,
        suppressedCells: Object.values(result.suppressed_cells)
          .reduce((a, b) => a + b, 0),
        deletedRecords: result.deleted_records,
      });
      return result;
    });
  }

  // Exactly one POST /undo per call.
  async undoLast(): Promise<number> {
    const qid = this.requireQid();
    return this.guarded(async () => {
      const { depth } = await this.api.undo(this.workingId);
      this.history.splice(depth);
      this.current.summary = await this.api.summary(this.workingId, qid);
      this.current.risk = await this.api.risk(this.workingId, qid, this.k);
      return depth;
    });
  }

  exportCsv(): Promise<string> {
    return this.api.exportCsv(this.workingId);
  }

  private requireQid(): string {
    if (!this.qid) throw new Error("compose a quasi-identifier first");
    return this.qid;
  }
}
