/** Pure spec post-processing: the only edits the UI offers are axis titles,
 * switching line marks to stepped interpolation, and free-form raw-spec
 * editing. Everything works on deep copies; candidate specs stay untouched. */

import { canonicalJson } from "./canonicalJson.js";
import type { VlSpec } from "./types.js";
import type { SpecPatches } from "./state.js";

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

/** The unit docs carrying mark/encoding: the layers of a layered spec, or the
 * spec itself. Returned objects are live references into `spec`. */
function unitDocs(spec: VlSpec): Record<string, unknown>[] {
  if (Array.isArray(spec.layer)) {
    return spec.layer as Record<string, unknown>[];
  }
  return [spec];
}

function setAxisTitle(doc: Record<string, unknown>, channel: "x" | "y", title: string): void {
  const encoding = doc.encoding as Record<string, unknown> | undefined;
  if (encoding === undefined) {
    return;
  }
  const def = encoding[channel] as Record<string, unknown> | undefined;
  if (def !== undefined) {
    def.title = title;
  }
}

function stepMark(doc: Record<string, unknown>): void {
  if (doc.mark === "line") {
    doc.mark = { type: "line", interpolate: "step" };
    return;
  }
  const mark = doc.mark as Record<string, unknown> | string | undefined;
  if (typeof mark === "object" && mark !== null && mark.type === "line") {
    mark.interpolate = "step";
  }
}

/** Apply session patches to a copy of `spec` and return the copy. */
export function applyPatches(spec: VlSpec, patches: SpecPatches): VlSpec {
  const out = clone(spec);
  for (const doc of unitDocs(out)) {
    if (patches.xTitle !== null) {
      setAxisTitle(doc, "x", patches.xTitle);
    }
    if (patches.yTitle !== null) {
      setAxisTitle(doc, "y", patches.yTitle);
    }
    if (patches.stepLine) {
      stepMark(doc);
    }
  }
  return out;
}

/** Canonical text of the candidate spec after raw-editor override and patches. */
export function exportSpec(
  base: VlSpec,
  rawOverride: VlSpec | null,
  patches: SpecPatches,
): string {
  return canonicalJson(applyPatches(rawOverride ?? base, patches));
}
