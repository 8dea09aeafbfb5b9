/** Post-processing panel for the selected candidate: axis titles, line/step
 * mark variant, raw-spec editing with a sticky error banner, a view of the
 * candidate's transform programs (runnable against the imported table via the
 * service), and canonical spec export. */

import { ApiClient, ApiError } from "./api.js";
import { renderSpec } from "./renderer.js";
import { applyPatches, exportSpec } from "./postprocess.js";
import { formatCell } from "./csv.js";
import type { Candidate, VlSpec } from "./types.js";
import type { SessionStore } from "./state.js";

export type ExportHandler = (text: string) => void;

export class PostprocessPanel {
  private container: HTMLElement;
  private store: SessionStore;
  private api: ApiClient;
  private onExport: ExportHandler;
  private renderedFor: string | null = "(nothing)";
  /** Raw-editor draft, preserved across rebuilds while it fails to parse. */
  private rawDraft: string | null = null;

  constructor(container: HTMLElement, store: SessionStore, api: ApiClient, onExport?: ExportHandler) {
    this.container = container;
    this.store = store;
    this.api = api;
    this.onExport = onExport ?? (() => undefined);
    store.subscribe(() => this.sync());
    this.sync();
  }

  /** Rebuild only when the subject changes; just refresh the preview when
   * patches change, so typing in the inputs keeps focus. */
  private sync(): void {
    const state = this.store.getState();
    const key =
      state.selectedId === null
        ? null
        : JSON.stringify([state.selectedId, state.rawSpec, state.rawSpecError]);
    if (key !== this.renderedFor) {
      this.renderedFor = key;
      this.build();
    } else {
      this.refreshPreview();
    }
  }

  private effectiveSpec(candidate: Candidate): VlSpec {
    const state = this.store.getState();
    return applyPatches(state.rawSpec ?? candidate.vegalite, state.patches);
  }

  private refreshPreview(): void {
    const candidate = this.store.selectedCandidate();
    const holder = this.container.querySelector(".patched-preview");
    if (candidate === null || holder === null) {
      return;
    }
    holder.textContent = "";
    holder.appendChild(renderSpec(this.effectiveSpec(candidate), { width: 420, height: 280 }));
  }

  private build(): void {
    const candidate = this.store.selectedCandidate();
    this.container.textContent = "";
    if (candidate === null) {
      const hint = document.createElement("p");
      hint.className = "hint";
      hint.textContent = "Select a candidate in the gallery to post-process it.";
      this.container.appendChild(hint);
      return;
    }
    const state = this.store.getState();

    const preview = document.createElement("div");
    preview.className = "patched-preview";
    this.container.appendChild(preview);

    const titleRow = document.createElement("div");
    titleRow.className = "patch-row";
    titleRow.appendChild(this.titleInput("x axis title", "x-title", state.patches.xTitle ?? ""));
    titleRow.appendChild(this.titleInput("y axis title", "y-title", state.patches.yTitle ?? ""));
    this.container.appendChild(titleRow);

    const stepLabel = document.createElement("label");
    stepLabel.className = "patch-row";
    const stepBox = document.createElement("input");
    stepBox.type = "checkbox";
    stepBox.className = "step-line";
    stepBox.checked = state.patches.stepLine;
    stepBox.addEventListener("change", () => {
      const patches = { ...this.store.getState().patches, stepLine: stepBox.checked };
      this.store.update({ patches });
    });
    stepLabel.appendChild(stepBox);
    stepLabel.appendChild(document.createTextNode(" draw line marks stepped"));
    this.container.appendChild(stepLabel);

    const programs = document.createElement("pre");
    programs.className = "programs";
    programs.textContent = candidate.programs.join("\n");
    this.container.appendChild(programs);

    const runButton = document.createElement("button");
    runButton.className = "run-program";
    runButton.textContent = "Run first program on input table";
    runButton.addEventListener("click", () => void this.runProgram(candidate));
    this.container.appendChild(runButton);

    const runResult = document.createElement("div");
    runResult.className = "run-result";
    this.container.appendChild(runResult);

    if (state.rawSpecError !== null) {
      const banner = document.createElement("p");
      banner.className = "banner-error";
      banner.textContent = `spec not applied: ${state.rawSpecError}`;
      this.container.appendChild(banner);
    }

    const rawEditor = document.createElement("textarea");
    rawEditor.className = "raw-spec";
    rawEditor.rows = 10;
    rawEditor.value =
      state.rawSpecError !== null && this.rawDraft !== null
        ? this.rawDraft
        : JSON.stringify(state.rawSpec ?? candidate.vegalite, null, 2);
    rawEditor.addEventListener("input", () => {
      this.rawDraft = rawEditor.value;
    });
    this.container.appendChild(rawEditor);

    const applyRaw = document.createElement("button");
    applyRaw.className = "apply-raw";
    applyRaw.textContent = "Apply edited spec";
    applyRaw.addEventListener("click", () => {
      this.rawDraft = rawEditor.value;
      try {
        const parsed = JSON.parse(rawEditor.value) as VlSpec;
        this.rawDraft = null;
        this.store.update({ rawSpec: parsed, rawSpecError: null });
      } catch (exc) {
        // keep the last good spec; only the banner changes
        this.store.update({ rawSpecError: (exc as Error).message });
      }
    });
    this.container.appendChild(applyRaw);

    const exportButton = document.createElement("button");
    exportButton.className = "export-spec";
    exportButton.textContent = "Export spec";
    exportButton.addEventListener("click", () => {
      const current = this.store.selectedCandidate();
      if (current === null) {
        return;
      }
      const s = this.store.getState();
      const text = exportSpec(current.vegalite, s.rawSpec, s.patches);
      const output = this.container.querySelector(".export-output") as HTMLElement;
      output.textContent = text;
      this.download(text);
      this.onExport(text);
    });
    this.container.appendChild(exportButton);

    const exportOutput = document.createElement("pre");
    exportOutput.className = "export-output";
    this.container.appendChild(exportOutput);

    this.refreshPreview();
  }

  private titleInput(label: string, cls: string, value: string): HTMLElement {
    const wrap = document.createElement("label");
    wrap.textContent = `${label} `;
    const input = document.createElement("input");
    input.type = "text";
    input.className = cls;
    input.value = value;
    input.addEventListener("input", () => {
      const patches = { ...this.store.getState().patches };
      const text = input.value;
      if (cls === "x-title") {
        patches.xTitle = text === "" ? null : text;
      } else {
        patches.yTitle = text === "" ? null : text;
      }
      this.store.update({ patches });
    });
    wrap.appendChild(input);
    return wrap;
  }

  private async runProgram(candidate: Candidate): Promise<void> {
    const holder = this.container.querySelector(".run-result") as HTMLElement;
    const csvText = this.store.getState().csvText;
    if (csvText === null) {
      holder.textContent = "no input table loaded";
      return;
    }
    try {
      const result = await this.api.transform(csvText, candidate.programs[0]);
      const rows = result.table.rows
        .map((row) => row.map(formatCell).join(", "))
        .join("\n");
      const header = result.table.columns.map((col) => col.name).join(", ");
      holder.textContent = "";
      const pre = document.createElement("pre");
      pre.className = "run-table";
      pre.textContent = `${header}\n${rows}`;
      holder.appendChild(pre);
    } catch (exc) {
      holder.textContent =
        exc instanceof ApiError ? `transform failed: ${exc.message}` : String(exc);
    }
  }

  /** Offer the export as a file download; inert under test. */
  private download(text: string): void {
    const anchor = document.createElement("a");
    anchor.href = `data:application/json;charset=utf-8,${encodeURIComponent(text)}`;
    anchor.download = "chart.vl.json";
    anchor.click();
  }
}
