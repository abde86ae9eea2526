// DOM layer of the workbench. Renders three panels (dataset + qid, risk
// dashboard, operations + history) and forwards clicks to the state machine.
// Displayed numbers come from service payloads only; the sole arithmetic
// here is scaling histogram bars for display.

import { ApiClient, SummaryPayload, RiskPayload } from "./api.js";
import { WorkbenchSession } from "./state.js";

type Attrs = Record<string, string | boolean>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Attrs = {}, ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  node.append(...children);
  return node;
}

function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(4);
}

// some DOM environments ship File without text(); FileReader is universal
function readFileText(file: File): Promise<string> {
  if (typeof file.text === "function") return file.text();
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onerror = () => reject(reader.error ?? new Error(`cannot read ${file.name}`));
    reader.onload = () => resolve(String(reader.result));
    reader.readAsText(file);
  });
}

export interface Hierarchy {
  rows: string[][];
  height: number;
}

export function parseHierarchyCsv(text: string): Hierarchy {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length < 2) throw new Error("hierarchy file needs a header and rows");
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { rows, height: header.length - 1 };
}

export function buildApp(root: HTMLElement, api: ApiClient): void {
  let session: WorkbenchSession | null = null;
  let hierarchy: Hierarchy | null = null;

  // ---- dataset + qid panel ----------------------------------------------
  const csvInput = el("input", { type: "file", id: "upload-csv" });
  const schemaInput = el("input", { type: "file", id: "upload-schema" });
  const uploadBtn = el("button", { id: "upload-btn" }, "upload");
  const uploadStatus = el("span", { id: "upload-status" });
  const uploadError = el("p", { class: "error", id: "upload-error" });
  const qidVars = el("div", { id: "qid-vars" });
  const composeBtn = el("button", { id: "compose-btn", disabled: true }, "compose");
  const qidError = el("p", { class: "error", id: "qid-error" });
  const summaryBox = el("div", { id: "summary-box" });

  const datasetPanel = el("section", { id: "dataset-panel" },
    el("h2", {}, "dataset and quasi-identifier"),
    el("div", { class: "row" },
      el("label", {}, "table (csv) ", csvInput),
      el("label", {}, "schema (json) ", schemaInput),
      uploadBtn, uploadStatus),
    uploadError,
    el("div", { class: "row" }, qidVars, composeBtn),
    qidError,
    summaryBox);

  // ---- risk dashboard -----------------------------------------------------
  const badge = el("span", { id: "unsafe-badge", class: "badge unknown" }, "no qid composed");
  const kSlider = el("input", { id: "k-slider", type: "range", min: "2", max: "5",
                                step: "1", value: "2", disabled: true });
  const kValue = el("span", { id: "k-value" }, "2");
  const thresholdOut = el("span", { id: "threshold" }, "—");
  const riskNumbers = el("div", { id: "risk-numbers" });
  const histBefore = el("div", { id: "hist-before", class: "hist" });
  const histAfter = el("div", { id: "hist-after", class: "hist" });

  const dashboard = el("section", { id: "dashboard" },
    el("h2", {}, "risk"),
    el("div", { class: "row" },
      badge,
      el("label", {}, "k ", kSlider, " ", kValue),
      el("span", {}, "threshold ", thresholdOut)),
    riskNumbers,
    el("div", { class: "hist-pair" },
      el("div", {}, el("h3", {}, "original"), histBefore),
      el("div", {}, el("h3", {}, "current"), histAfter)));

  // ---- operation panel + history -----------------------------------------
  const truncateVar = el("select", { id: "truncate-var" });
  const truncateDigits = el("input", { id: "truncate-digits", type: "number",
                                       min: "1", value: "1" });
  const truncateBtn = el("button", { id: "truncate-btn" }, "truncate");

  const hierFile = el("input", { id: "hier-file", type: "file" });
  const recodeVar = el("select", { id: "recode-var" });
  const recodeLevel = el("input", { id: "recode-level", type: "number",
                                    min: "1", value: "1" });
  const recodeBtn = el("button", { id: "recode-btn" }, "recode");

  const importanceBox = el("span", { id: "importance-inputs" });
  const suppressBtn = el("button", { id: "suppress-btn" }, "suppress cells");
  const deleteBtn = el("button", { id: "delete-btn" }, "delete records");

  const opError = el("p", { class: "error", id: "op-error" });
  const historyList = el("ol", { id: "history-list" });
  const undoBtn = el("button", { id: "undo-btn", disabled: true }, "undo");
  const exportLink = el("a", { id: "export-link", download: "published.csv" },
                        "export csv");

  const opPanel = el("section", { id: "op-panel" },
    el("h2", {}, "operations"),
    el("div", { class: "row" },
      el("label", {}, "variable ", truncateVar),
      el("label", {}, "drop last ", truncateDigits, " digit(s) "),
      truncateBtn),
    el("div", { class: "row" },
      el("label", {}, "hierarchy ", hierFile),
      el("label", {}, "variable ", recodeVar),
      el("label", {}, "level ", recodeLevel),
      recodeBtn),
    el("div", { class: "row" },
      el("span", {}, "importance "), importanceBox, suppressBtn, deleteBtn),
    opError,
    el("h3", {}, "history"),
    historyList,
    el("div", { class: "row" }, undoBtn, exportLink));

  root.replaceChildren(datasetPanel, dashboard, opPanel);

  // ---- rendering ----------------------------------------------------------

  function renderSummary(summary: SummaryPayload | null): void {
    summaryBox.replaceChildren();
    if (!summary) return;
    const head = el("tr", {});
    const body = el("tr", {});
    const cells: Array<[string, number]> = [
      ["records", summary.record_count],
      ["excluded", summary.excluded],
      ["sets", summary.classes],
      ["min", summary.min], ["q1", summary.q1], ["median", summary.median],
      ["q3", summary.q3], ["max", summary.max],
    ];
    for (const tc of summary.threshold_counts) {
      cells.push([`n≤${tc.bound}`, tc.count]);
    }
    for (const [label, value] of cells) {
      head.append(el("th", {}, label));
      body.append(el("td", {}, fmt(value)));
    }
    summaryBox.append(
      el("p", {}, `sets on ${summary.qid}`),
      el("table", { id: "summary-table" }, head, body));
  }

  function renderHistogram(target: HTMLElement, risk: RiskPayload | null,
                           scale: number): void {
    target.replaceChildren();
    if (!risk) return;
    const { edges, counts } = risk.histogram;
    counts.forEach((count, i) => {
      // scaling is presentation only; the count itself rides along as data
      const pct = scale > 0 ? Math.round((count / scale) * 100) : 0;
      const bar = el("div", {
        class: "bar",
        "data-count": String(count),
        title: `risk [${edges[i]}, ${edges[i + 1]}${i === counts.length - 1 ? "]" : ")"}: ${count} records`,
      });
      bar.style.height = `${Math.max(pct, count > 0 ? 2 : 0)}%`;
      target.append(bar);
    });
  }

  function renderDashboard(): void {
    const before = session?.baseline.risk ?? null;
    const after = session?.current.risk ?? null;
    if (!after) {
      badge.className = "badge unknown";
      badge.textContent = "no qid composed";
      riskNumbers.replaceChildren();
      histBefore.replaceChildren();
      histAfter.replaceChildren();
      return;
    }
    if (after.unsafe_count === 0) {
      badge.className = "badge safe";
      badge.textContent = "0 unsafe — safe";
    } else {
      badge.className = "badge unsafe";
      badge.textContent = `${after.unsafe_count} unsafe`;
    }
    thresholdOut.textContent = fmt(after.threshold);
    kValue.textContent = String(after.k);
    riskNumbers.replaceChildren(el("table", {},
      el("tr", {}, el("th", {}, ""), el("th", {}, "original"),
         el("th", {}, "current")),
      el("tr", {}, el("td", {}, "global risk"),
         el("td", { id: "global-risk-before" }, before ? fmt(before.global_risk) : "—"),
         el("td", { id: "global-risk" }, fmt(after.global_risk))),
      el("tr", {}, el("td", {}, "max risk"),
         el("td", { id: "max-risk-before" }, before ? fmt(before.max_risk) : "—"),
         el("td", { id: "max-risk" }, fmt(after.max_risk)))));
    const scale = Math.max(...(before?.histogram.counts ?? [0]),
                           ...after.histogram.counts);
    renderHistogram(histBefore, before, scale);
    renderHistogram(histAfter, after, scale);
  }

  function renderHistory(): void {
    historyList.replaceChildren();
    if (!session) return;
    for (const entry of session.history) {
      const delta = entry.unsafeAfter - entry.unsafeBefore;
      const extras: string[] = [];
      if (entry.suppressedCells) extras.push(`${entry.suppressedCells} cells blanked`);
      if (entry.deletedRecords) extras.push(`${entry.deletedRecords} records deleted`);
      historyList.append(el("li", {},
        `${entry.label}: unsafe ${entry.unsafeBefore} → ${entry.unsafeAfter}`
        + ` (${delta >= 0 ? "+" : ""}${delta})`
        + (extras.length ? `, ${extras.join(", ")}` : "")));
    }
  }

  function syncControls(): void {
    const pending = session?.pending ?? false;
    const ready = !!session && !!session.qid && !pending;
    const checked = qidVars.querySelectorAll("input:checked").length;
    uploadBtn.disabled = pending;
    composeBtn.disabled = !session || checked === 0 || pending;
    kSlider.disabled = !ready;
    truncateBtn.disabled = !ready;
    recodeBtn.disabled = !ready || !hierarchy;
    suppressBtn.disabled = !ready;
    deleteBtn.disabled = !ready;
    undoBtn.disabled = !ready || session!.history.length === 0;
    if (session) {
      exportLink.setAttribute("href", session.exportUrl);
    } else {
      exportLink.removeAttribute("href");
    }
  }

  function render(): void {
    renderSummary(session?.current.summary ?? null);
    renderDashboard();
    renderHistory();
    syncControls();
  }

  function renderImportanceInputs(): void {
    importanceBox.replaceChildren();
    const vars = session?.qid?.split("+") ?? [];
    for (const name of vars) {
      importanceBox.append(el("label", { class: "imp" }, `${name} `,
        el("input", { type: "number", step: "0.5", min: "0", value: "1",
                      "data-importance-for": name })));
    }
  }

  function collectImportance(): Record<string, number> | undefined {
    const inputs = importanceBox.querySelectorAll<HTMLInputElement>("input[data-importance-for]");
    const weights: Record<string, number> = {};
    let any = false;
    inputs.forEach((input) => {
      const value = Number(input.value);
      const name = input.getAttribute("data-importance-for")!;
      weights[name] = Number.isFinite(value) ? value : 1;
      if (weights[name] !== 1) any = true;
    });
    return any ? weights : undefined;
  }

  function showError(box: HTMLElement, error: unknown): void {
    box.textContent = error instanceof Error ? error.message : String(error);
  }

  // ---- wiring -------------------------------------------------------------

  uploadBtn.addEventListener("click", async () => {
    uploadError.textContent = "";
    const csvFile = csvInput.files?.[0];
    const schemaFile = schemaInput.files?.[0];
    if (!csvFile || !schemaFile) {
      uploadError.textContent = "choose both a table and a schema file";
      return;
    }
    try {
      const upload = await api.uploadDataset(await readFileText(csvFile),
                                             await readFileText(schemaFile));
      session = await WorkbenchSession.open(api, upload.dataset_id,
                                            upload.variables);
      uploadStatus.textContent =
        `${upload.record_count} records, ${upload.variables.length} variables`;
      qidVars.replaceChildren(...upload.variables.map((name) =>
        el("label", { class: "qid-var" },
           el("input", { type: "checkbox", name: "qid-var", value: name }),
           ` ${name}`)));
      truncateVar.replaceChildren(...upload.variables.map((name) =>
        el("option", { value: name }, name)));
      recodeVar.replaceChildren(...upload.variables.map((name) =>
        el("option", { value: name }, name)));
      hierarchy = null;
      render();
    } catch (error) {
      showError(uploadError, error);
      render();
    }
  });

  qidVars.addEventListener("change", () => syncControls());

  composeBtn.addEventListener("click", async () => {
    if (!session) return;
    qidError.textContent = "";
    const picked = Array.from(
      qidVars.querySelectorAll<HTMLInputElement>("input:checked"),
      (input) => input.value);
    try {
      const pending = session.composeQid(picked);
      syncControls(); // the in-flight guard is already up
      await pending;
      renderImportanceInputs();
      render();
    } catch (error) {
      showError(qidError, error);
      render();
    }
  });

  kSlider.addEventListener("change", async () => {
    if (!session) return;
    try {
      const pending = session.setK(Number(kSlider.value));
      syncControls();
      await pending;
      render();
    } catch (error) {
      showError(opError, error);
      render();
    }
  });

  hierFile.addEventListener("change", async () => {
    opError.textContent = "";
    const file = hierFile.files?.[0];
    if (!file) return;
    try {
      hierarchy = parseHierarchyCsv(await readFileText(file));
      recodeLevel.setAttribute("max", String(hierarchy.height));
    } catch (error) {
      hierarchy = null;
      showError(opError, error);
    }
    syncControls();
  });

  async function runOp(label: string,
                       body: Parameters<WorkbenchSession["applyOp"]>[0]): Promise<void> {
    if (!session) return;
    opError.textContent = "";
    try {
      const pending = session.applyOp(body, label);
      syncControls();
      await pending;
    } catch (error) {
      showError(opError, error);
    }
    render();
  }

  truncateBtn.addEventListener("click", () => {
    const variable = truncateVar.value;
    const digits = Number(truncateDigits.value);
    void runOp(`truncate ${variable} by ${digits}`,
               { op: "truncate", variable, digits });
  });

  recodeBtn.addEventListener("click", () => {
    if (!hierarchy) return;
    const variable = recodeVar.value;
    const level = Number(recodeLevel.value);
    void runOp(`recode ${variable} to level ${level}`,
               { op: "recode", variable, level, hierarchy: hierarchy.rows });
  });

  suppressBtn.addEventListener("click", () => {
    const importance = collectImportance();
    void runOp("suppress cells",
               importance ? { op: "suppress", importance } : { op: "suppress" });
  });

  deleteBtn.addEventListener("click", () => {
    void runOp("delete records", { op: "delete" });
  });

  undoBtn.addEventListener("click", async () => {
    if (!session) return;
    opError.textContent = "";
    try {
      const pending = session.undoLast();
      syncControls();
      await pending;
    } catch (error) {
      showError(opError, error);
    }
    render();
  });

  render();
}
