/** Single observable store holding the whole UI session. Components render
 * from the current state and subscribe for changes; all mutation goes through
 * update(). Candidate data is never modified in place — post-processing works
 * on copies at export/render time. */

import type { Candidate, EditorElement, SynthesisResponse, TableData } from "./types.js";

export interface SpecPatches {
  xTitle: string | null;
  yTitle: string | null;
  stepLine: boolean;
}

export interface SessionState {
  /** Raw CSV text as imported; sent verbatim to the service. */
  csvText: string | null;
  /** Parsed for display only. */
  table: TableData | null;
  elements: EditorElement[];
  response: SynthesisResponse | null;
  /** Candidates shown in the gallery; grows while a stream is running. */
  candidates: Candidate[];
  searching: boolean;
  selectedId: string | null;
  patches: SpecPatches;
  /** Last successfully parsed raw-editor spec for the selected candidate. */
  rawSpec: Record<string, unknown> | null;
  rawSpecError: string | null;
  error: string | null;
}

export function initialState(): SessionState {
  return {
    csvText: null,
    table: null,
    elements: [],
    response: null,
    candidates: [],
    searching: false,
    selectedId: null,
    patches: { xTitle: null, yTitle: null, stepLine: false },
    rawSpec: null,
    rawSpecError: null,
    error: null,
  };
}

export type Listener = (state: SessionState) => void;

export class SessionStore {
  private state: SessionState = initialState();
  private listeners = new Set<Listener>();
  /** Monotonic token identifying the latest synthesis request; responses
   * carrying a stale token are discarded. */
  private requestToken = 0;

  getState(): SessionState {
    return this.state;
  }

  update(partial: Partial<SessionState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  nextRequest(): number {
    this.requestToken += 1;
    return this.requestToken;
  }

  isCurrent(token: number): boolean {
    return token === this.requestToken;
  }

  selectedCandidate(): Candidate | null {
    if (this.state.selectedId === null) {
      return null;
    }
    return this.state.candidates.find((c) => c.id === this.state.selectedId) ?? null;
  }
}
