/** Shared data shapes: client-side table model, example elements, and the
 * JSON bodies exchanged with the synthesis service. */

export type ColumnType = "nominal" | "quantitative" | "temporal";

export interface TableColumn {
  name: string;
  type: ColumnType;
}

export type Cell = string | number | null;

export interface TableData {
  columns: TableColumn[];
  rows: Cell[][];
}

export type ElementKind = "point" | "line" | "bar" | "rect" | "area";

export type PropValue = string | number;

/** One example mark as edited in the UI: a kind plus named properties. */
export interface EditorElement {
  kind: ElementKind;
  props: Record<string, PropValue>;
}

/** Property schema per element kind; mirrors what the service accepts. */
export const ELEMENT_PROPS: Record<ElementKind, { required: string[]; optional: string[] }> = {
  point: { required: ["x", "y"], optional: ["color", "size", "shape", "column", "row"] },
  line: { required: ["x1", "y1", "x2", "y2"], optional: ["color", "size", "column", "row"] },
  bar: { required: ["x", "y"], optional: ["y2", "color", "column", "row"] },
  rect: { required: ["x", "x2", "y", "y2"], optional: ["color", "column", "row"] },
  area: { required: ["x", "y"], optional: ["y2", "color", "column", "row"] },
};

export const ELEMENT_KINDS = Object.keys(ELEMENT_PROPS) as ElementKind[];

/** Flat element object as sent over the wire: {"kind": ..., "x": ..., ...}. */
export type WireElement = { kind: ElementKind } & Record<string, PropValue>;

export function toWireElement(el: EditorElement): WireElement {
  return { kind: el.kind, ...el.props };
}

/** Vega-Lite documents are handled as plain JSON. */
export type VlSpec = Record<string, unknown>;

export interface Candidate {
  id: string;
  programs: string[];
  complexity: number;
  group_key: [string[], string[]];
  vegalite: VlSpec;
}

export interface SynthesisStats {
  [key: string]: unknown;
}

export interface SynthesisResponse {
  candidates: Candidate[];
  stats: SynthesisStats;
  truncated: boolean;
  reason: string | null;
}

export interface TransformResponse {
  table: {
    columns: { name: string; type: ColumnType }[];
    rows: Cell[][];
  };
}

export interface SynthesisRequest {
  table: string | { columns: { name: string; type: ColumnType }[]; rows: Cell[][] };
  elements: WireElement[];
  config?: Record<string, unknown>;
}
