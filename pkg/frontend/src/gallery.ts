/** Candidate gallery: thumbnails arrive in rank order (streamed results only
 * ever append), are laid out with equivalent candidates — same output shape
 * and field mapping — grouped adjacently, and can be clicked to enlarge. */

import { renderSpec } from "./renderer.js";
import type { Candidate } from "./types.js";
import type { SessionState } from "./state.js";

export type SelectHandler = (id: string) => void;

function groupLabel(candidate: Candidate): string {
  return JSON.stringify(candidate.group_key);
}

/** Rank-ordered candidates re-laid-out so members of a group sit together.
 * Groups keep the order in which their first member appeared. */
export function groupForDisplay(candidates: Candidate[]): Candidate[][] {
  const order: string[] = [];
  const buckets = new Map<string, Candidate[]>();
  for (const candidate of candidates) {
    const key = groupLabel(candidate);
    const bucket = buckets.get(key);
    if (bucket === undefined) {
      order.push(key);
      buckets.set(key, [candidate]);
    } else {
      bucket.push(candidate);
    }
  }
  return order.map((key) => buckets.get(key) as Candidate[]);
}

export function renderGallery(
  container: HTMLElement,
  state: SessionState,
  onSelect: SelectHandler,
): void {
  container.textContent = "";

  if (state.searching) {
    const searching = document.createElement("p");
    searching.className = "searching-indicator";
    searching.textContent = "still searching…";
    container.appendChild(searching);
  }

  if (state.candidates.length === 0) {
    if (!state.searching && state.response !== null) {
      const guidance = document.createElement("p");
      guidance.className = "no-candidates";
      guidance.textContent =
        "No charts matched the examples. Check that each example value appears in " +
        "(or can be computed from) the table, remove doubtful properties, or raise " +
        "the search depth and budget in the options.";
      container.appendChild(guidance);
    }
    return;
  }

  const grid = document.createElement("div");
  grid.className = "gallery-grid";
  for (const group of groupForDisplay(state.candidates)) {
    const groupEl = document.createElement("div");
    groupEl.className = "gallery-group";
    groupEl.dataset.group = groupLabel(group[0]);
    for (const candidate of group) {
      const thumb = document.createElement("div");
      thumb.className = "thumb" + (candidate.id === state.selectedId ? " selected" : "");
      thumb.dataset.id = candidate.id;
      thumb.title = candidate.programs.join(" || ");
      thumb.appendChild(renderSpec(candidate.vegalite, { width: 160, height: 120 }));
      const caption = document.createElement("div");
      caption.className = "thumb-caption";
      caption.textContent = `complexity ${candidate.complexity}`;
      thumb.appendChild(caption);
      thumb.addEventListener("click", () => onSelect(candidate.id));
      groupEl.appendChild(thumb);
    }
    grid.appendChild(groupEl);
  }
  container.appendChild(grid);

  const selected = state.candidates.find((c) => c.id === state.selectedId);
  if (selected !== undefined) {
    const enlarged = document.createElement("div");
    enlarged.className = "enlarged";
    enlarged.appendChild(renderSpec(selected.vegalite, { width: 480, height: 320 }));
    const programs = document.createElement("pre");
    programs.className = "enlarged-programs";
    programs.textContent = selected.programs.join("\n");
    enlarged.appendChild(programs);
    container.appendChild(enlarged);
  }
}
