/** Application entry point: builds the three panels (data & examples,
 * exploration gallery, post-processing) inside a root node and wires them to
 * the session store and the HTTP API client. */

import { ApiClient, ApiError } from "./api.js";
import { parseCsv } from "./csv.js";
import { ElementEditor } from "./elementEditor.js";
import { renderGallery } from "./gallery.js";
import { PostprocessPanel, type ExportHandler } from "./postprocessPanel.js";
import { renderPreview } from "./preview.js";
import { SessionStore } from "./state.js";
import { renderTable } from "./tableView.js";
import { toWireElement } from "./types.js";
import type { TableData, EditorElement } from "./types.js";

export interface AppOptions {
  baseUrl?: string;
  fetchImpl?: typeof fetch;
  onExport?: ExportHandler;
}

export interface App {
  store: SessionStore;
  api: ApiClient;
  editor: ElementEditor;
  root: HTMLElement;
  loadCsv: (text: string) => void;
  synthesize: () => Promise<void>;
}

function defaultBaseUrl(): string {
  if (typeof location !== "undefined" && location.search !== "") {
    const api = new URLSearchParams(location.search).get("api");
    if (api !== null) {
      return api;
    }
  }
  return "http://localhost:8099";
}

const SHELL_HTML = `
  <header class="app-header">
    <h1>vizsynth</h1>
    <span class="health-status"></span>
  </header>
  <main class="panels">
    <section class="panel panel-data">
      <h2>Data &amp; examples</h2>
      <input type="file" class="csv-file" accept=".csv,text/csv" />
      <details class="paste-details">
        <summary>or paste CSV text</summary>
        <textarea class="csv-paste" rows="6"></textarea>
        <button class="load-csv">Load pasted CSV</button>
      </details>
      <p class="data-error"></p>
      <div class="table-view"></div>
      <div class="element-editor"></div>
      <h3>Example preview</h3>
      <div class="preview"></div>
    </section>
    <section class="panel panel-explore">
      <h2>Explore</h2>
      <div class="options">
        <label><input type="checkbox" class="seedless" /> exhaustive (deterministic)</label>
        <label>max depth <input type="number" class="max-depth" min="1" max="4" /></label>
        <label>max candidates <input type="number" class="max-candidates" min="1" /></label>
      </div>
      <button class="synthesize" disabled>Synthesize</button>
      <p class="search-error"></p>
      <p class="search-stats"></p>
      <div class="gallery"></div>
    </section>
    <section class="panel panel-post">
      <h2>Post-process &amp; export</h2>
      <div class="postprocess"></div>
    </section>
  </main>
`;

export function initApp(root: HTMLElement, options: AppOptions = {}): App {
  const store = new SessionStore();
  const api = new ApiClient(options.baseUrl ?? defaultBaseUrl(), options.fetchImpl);
  root.innerHTML = SHELL_HTML;

  const q = <T extends Element>(selector: string): T => {
    const node = root.querySelector(selector);
    if (node === null) {
      throw new Error(`missing node: ${selector}`);
    }
    return node as T;
  };

  const tableView = q<HTMLElement>(".table-view");
  const previewEl = q<HTMLElement>(".preview");
  const galleryEl = q<HTMLElement>(".gallery");
  const dataError = q<HTMLElement>(".data-error");
  const searchError = q<HTMLElement>(".search-error");
  const searchStats = q<HTMLElement>(".search-stats");
  const synthesizeButton = q<HTMLButtonElement>(".synthesize");
  const seedlessBox = q<HTMLInputElement>(".seedless");
  const maxDepthInput = q<HTMLInputElement>(".max-depth");
  const maxCandidatesInput = q<HTMLInputElement>(".max-candidates");

  const editor = new ElementEditor(q<HTMLElement>(".element-editor"), store);
  new PostprocessPanel(q<HTMLElement>(".postprocess"), store, api, options.onExport);

  const loadCsv = (text: string): void => {
    let table: TableData;
    try {
      table = parseCsv(text);
    } catch (exc) {
      store.update({ error: `CSV not loaded: ${(exc as Error).message}` });
      return;
    }
    store.update({
      csvText: text,
      table,
      error: null,
      response: null,
      candidates: [],
      selectedId: null,
    });
  };

  const fileInput = q<HTMLInputElement>(".csv-file");
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file === undefined) {
      return;
    }
    const reader = new FileReader();
    reader.onload = () => loadCsv(String(reader.result));
    reader.readAsText(file);
  });
  q<HTMLButtonElement>(".load-csv").addEventListener("click", () => {
    loadCsv(q<HTMLTextAreaElement>(".csv-paste").value);
  });

  const buildConfig = (): Record<string, unknown> | undefined => {
    const config: Record<string, unknown> = {};
    if (seedlessBox.checked) {
      config.seedless = true;
    }
    if (maxDepthInput.value !== "") {
      config.max_depth = Number(maxDepthInput.value);
    }
    if (maxCandidatesInput.value !== "") {
      config.max_candidates = Number(maxCandidatesInput.value);
    }
    return Object.keys(config).length > 0 ? config : undefined;
  };

  const synthesize = async (): Promise<void> => {
    const state = store.getState();
    if (state.csvText === null || state.elements.length === 0 || state.searching) {
      return;
    }
    const token = store.nextRequest();
    store.update({
      searching: true,
      candidates: [],
      response: null,
      selectedId: null,
      rawSpec: null,
      rawSpecError: null,
      error: null,
    });
    try {
      const response = await api.synthesize(
        {
          table: state.csvText,
          elements: state.elements.map(toWireElement),
          config: buildConfig(),
        },
        {
          stream: true,
          onCandidate: (candidate) => {
            if (!store.isCurrent(token)) {
              return;
            }
            store.update({ candidates: [...store.getState().candidates, candidate] });
          },
        },
      );
      if (!store.isCurrent(token)) {
        return;
      }
      store.update({ searching: false, response, candidates: response.candidates });
    } catch (exc) {
      if (!store.isCurrent(token)) {
        return;
      }
      const message =
        exc instanceof ApiError
          ? exc.field !== undefined
            ? `${exc.message} (field: ${exc.field})`
            : exc.message
          : String(exc);
      store.update({ searching: false, error: message });
    }
  };
  synthesizeButton.addEventListener("click", () => void synthesize());

  const selectCandidate = (id: string): void => {
    store.update({ selectedId: id, rawSpec: null, rawSpecError: null });
  };

  let renderedTable: TableData | null = null;
  let renderedElements: EditorElement[] | null = null;
  let renderedGalleryKey = "";

  const render = (): void => {
    const state = store.getState();
    if (state.table !== renderedTable) {
      renderedTable = state.table;
      renderTable(tableView, state.table, (value) => editor.copyValue(value));
    }
    if (state.elements !== renderedElements) {
      renderedElements = state.elements;
      renderPreview(previewEl, state.elements);
    }
    dataError.textContent = state.error ?? "";
    searchError.textContent = state.error ?? "";
    synthesizeButton.disabled =
      state.csvText === null || state.elements.length === 0 || state.searching;
    if (state.response !== null) {
      const parts = [`${state.candidates.length} candidate(s)`];
      if (state.response.truncated) {
        parts.push("search truncated by budget");
      }
      if (state.response.reason !== null) {
        parts.push(state.response.reason);
      }
      searchStats.textContent = parts.join(" · ");
    } else {
      searchStats.textContent = state.searching ? "searching…" : "";
    }
    const galleryKey = JSON.stringify([
      state.candidates.map((c) => c.id),
      state.selectedId,
      state.searching,
      state.response !== null,
    ]);
    if (galleryKey !== renderedGalleryKey) {
      renderedGalleryKey = galleryKey;
      renderGallery(galleryEl, state, selectCandidate);
    }
  };
  store.subscribe(render);
  render();

  const health = q<HTMLElement>(".health-status");
  void api
    .health()
    .then((h) => {
      health.textContent = `service ${h.status} (v${h.version})`;
    })
    .catch(() => {
      health.textContent = "service unreachable";
    });

  return { store, api, editor, root, loadCsv, synthesize };
}
