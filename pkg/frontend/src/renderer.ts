/** Self-contained SVG renderer for the chart-spec subset the service emits:
 * bar / line / point / area / rect marks with x, y, x2, y2, color, size and
 * shape channels, single or layered docs. It draws thumbnails and previews;
 * it is not a general Vega-Lite implementation. Facet channels (column/row)
 * are ignored and their data drawn in one plot. */

import type { VlSpec } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const PALETTE = ["#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2", "#ff9da6", "#9d755d"];
const MARGIN = { top: 8, right: 10, bottom: 30, left: 44 };

type Datum = Record<string, unknown>;

interface UnitDoc {
  mark: string;
  markSpec: Record<string, unknown> | null;
  encoding: Record<string, { field?: string; type?: string; title?: string }>;
  values: Datum[];
}

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

function unitDocs(spec: VlSpec): UnitDoc[] {
  const docs = Array.isArray(spec.layer)
    ? (spec.layer as Record<string, unknown>[])
    : [spec as Record<string, unknown>];
  return docs.map((doc) => {
    const mark = doc.mark;
    const markType = typeof mark === "string" ? mark : String((mark as Datum)?.type ?? "point");
    const data = (doc.data ?? spec.data) as { values?: Datum[] } | undefined;
    return {
      mark: markType,
      markSpec: typeof mark === "object" && mark !== null ? (mark as Datum) : null,
      encoding: (doc.encoding ?? {}) as UnitDoc["encoding"],
      values: data?.values ?? [],
    };
  });
}

function fieldValue(datum: Datum, def?: { field?: string }): unknown {
  if (def?.field === undefined) {
    return undefined;
  }
  return datum[def.field];
}

/** Map a raw channel value to a number on a shared comparable axis. */
function axisNumber(value: unknown, type: string, categories: string[]): number {
  if (type === "temporal") {
    const t = Date.parse(String(value));
    return Number.isNaN(t) ? 0 : t;
  }
  if (type === "quantitative") {
    return typeof value === "number" ? value : Number(value);
  }
  return categories.indexOf(String(value));
}

interface AxisInfo {
  type: string;
  categories: string[];
  min: number;
  max: number;
  title: string | null;
}

function analyzeAxis(docs: UnitDoc[], channels: string[], includeZero: boolean): AxisInfo {
  let type = "nominal";
  let title: string | null = null;
  const categories: string[] = [];
  for (const doc of docs) {
    const def = doc.encoding[channels[0]];
    if (def?.type !== undefined) {
      type = def.type;
    }
    if (typeof def?.title === "string" && title === null) {
      title = def.title;
    }
  }
  const numbers: number[] = [];
  for (const doc of docs) {
    for (const channel of channels) {
      const def = doc.encoding[channel];
      if (def?.field === undefined) {
        continue;
      }
      for (const datum of doc.values) {
        const value = fieldValue(datum, def);
        if (value === null || value === undefined) {
          continue;
        }
        if (type === "nominal" || type === "ordinal") {
          const key = String(value);
          if (!categories.includes(key)) {
            categories.push(key);
          }
        } else {
          numbers.push(axisNumber(value, type, categories));
        }
      }
    }
  }
  if (includeZero && type === "quantitative") {
    numbers.push(0);
  }
  let min = numbers.length > 0 ? Math.min(...numbers) : 0;
  let max = numbers.length > 0 ? Math.max(...numbers) : 1;
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { type, categories, min, max, title };
}

interface Scale {
  pos: (value: unknown) => number;
  bandwidth: number;
  axis: AxisInfo;
}

function makeScale(axis: AxisInfo, rangeLo: number, rangeHi: number): Scale {
  if (axis.type === "nominal" || axis.type === "ordinal") {
    const n = Math.max(axis.categories.length, 1);
    const step = (rangeHi - rangeLo) / n;
    return {
      pos: (value) => rangeLo + (axis.categories.indexOf(String(value)) + 0.5) * step,
      bandwidth: step * 0.7,
      axis,
    };
  }
  const span = axis.max - axis.min;
  const pad = span * 0.05;
  const lo = axis.min - pad;
  const hi = axis.max + pad;
  return {
    pos: (value) => {
      const t = (axisNumber(value, axis.type, axis.categories) - lo) / (hi - lo);
      return rangeLo + t * (rangeHi - rangeLo);
    },
    bandwidth: Math.min(Math.abs(rangeHi - rangeLo) / 8, 14),
    axis,
  };
}

function colorFor(value: unknown, domain: string[]): string {
  if (value === undefined || value === null) {
    return PALETTE[0];
  }
  const i = domain.indexOf(String(value));
  return PALETTE[(i >= 0 ? i : 0) % PALETTE.length];
}

function formatTick(axis: AxisInfo, value: number): string {
  if (axis.type === "temporal") {
    return new Date(value).toISOString().slice(0, 10);
  }
  return String(Math.round(value * 100) / 100);
}

function addTooltip(node: SVGElement, datum: Datum): void {
  const title = svgEl("title");
  title.textContent = Object.entries(datum)
    .map(([k, v]) => `${k}: ${v}`)
    .join("\n");
  node.appendChild(title);
}

function groupBy(values: Datum[], def?: { field?: string }): Map<string, Datum[]> {
  const groups = new Map<string, Datum[]>();
  for (const datum of values) {
    const key = def?.field === undefined ? "" : String(fieldValue(datum, def));
    const bucket = groups.get(key);
    if (bucket === undefined) {
      groups.set(key, [datum]);
    } else {
      bucket.push(datum);
    }
  }
  return groups;
}

export interface RenderOptions {
  width?: number;
  height?: number;
}

export function renderSpec(spec: VlSpec, options: RenderOptions = {}): SVGSVGElement {
  const width = options.width ?? 320;
  const height = options.height ?? 220;
  const docs = unitDocs(spec);
  const needsZero = docs.some((d) => (d.mark === "bar" || d.mark === "area") && d.encoding.y2 === undefined);
  const xAxis = analyzeAxis(docs, ["x", "x2"], false);
  const yAxis = analyzeAxis(docs, ["y", "y2"], needsZero);
  const plotLeft = MARGIN.left;
  const plotRight = width - MARGIN.right;
  const plotTop = MARGIN.top;
  const plotBottom = height - MARGIN.bottom;
  const xScale = makeScale(xAxis, plotLeft, plotRight);
  const yScale = makeScale(yAxis, plotBottom, plotTop);

  const colorDomain: string[] = [];
  for (const doc of docs) {
    const def = doc.encoding.color;
    if (def?.field === undefined) {
      continue;
    }
    for (const datum of doc.values) {
      const key = String(fieldValue(datum, def));
      if (!colorDomain.includes(key)) {
        colorDomain.push(key);
      }
    }
  }

  const svg = svgEl("svg");
  svg.setAttribute("class", "chart");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  drawAxes(svg, xScale, yScale, plotLeft, plotRight, plotTop, plotBottom);

  for (const doc of docs) {
    drawMarks(svg, doc, xScale, yScale, colorDomain, plotBottom);
  }
  return svg;
}

function drawAxes(
  svg: SVGSVGElement,
  xScale: Scale,
  yScale: Scale,
  left: number,
  right: number,
  top: number,
  bottom: number,
): void {
  const xLine = svgEl("line");
  xLine.setAttribute("class", "axis axis-x");
  xLine.setAttribute("x1", String(left));
  xLine.setAttribute("x2", String(right));
  xLine.setAttribute("y1", String(bottom));
  xLine.setAttribute("y2", String(bottom));
  xLine.setAttribute("stroke", "#666");
  svg.appendChild(xLine);

  const yLine = svgEl("line");
  yLine.setAttribute("class", "axis axis-y");
  yLine.setAttribute("x1", String(left));
  yLine.setAttribute("x2", String(left));
  yLine.setAttribute("y1", String(top));
  yLine.setAttribute("y2", String(bottom));
  yLine.setAttribute("stroke", "#666");
  svg.appendChild(yLine);

  const xTicks =
    xScale.axis.type === "nominal" || xScale.axis.type === "ordinal"
      ? xScale.axis.categories.map((c) => ({ value: c as unknown, label: c }))
      : [xScale.axis.min, (xScale.axis.min + xScale.axis.max) / 2, xScale.axis.max].map((v) => ({
          value: v as unknown,
          label: formatTick(xScale.axis, v),
        }));
  const shown = xTicks.length > 8 ? xTicks.filter((_, i) => i % 2 === 0) : xTicks;
  for (const tick of shown) {
    const label = svgEl("text");
    label.setAttribute("class", "tick tick-x");
    label.setAttribute("x", String(xScale.pos(tick.value)));
    label.setAttribute("y", String(bottom + 12));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("font-size", "9");
    label.textContent = tick.label;
    svg.appendChild(label);
  }

  const yTicks = [yScale.axis.min, (yScale.axis.min + yScale.axis.max) / 2, yScale.axis.max];
  if (yScale.axis.type === "quantitative" || yScale.axis.type === "temporal") {
    for (const v of yTicks) {
      const label = svgEl("text");
      label.setAttribute("class", "tick tick-y");
      label.setAttribute("x", String(left - 4));
      label.setAttribute("y", String(yScale.pos(v) + 3));
      label.setAttribute("text-anchor", "end");
      label.setAttribute("font-size", "9");
      label.textContent = formatTick(yScale.axis, v);
      svg.appendChild(label);
    }
  }

  if (xScale.axis.title !== null) {
    const title = svgEl("text");
    title.setAttribute("class", "axis-title axis-title-x");
    title.setAttribute("x", String((left + right) / 2));
    title.setAttribute("y", String(bottom + 26));
    title.setAttribute("text-anchor", "middle");
    title.setAttribute("font-size", "11");
    title.textContent = xScale.axis.title;
    svg.appendChild(title);
  }
  if (yScale.axis.title !== null) {
    const title = svgEl("text");
    title.setAttribute("class", "axis-title axis-title-y");
    title.setAttribute("x", "12");
    title.setAttribute("y", String((top + bottom) / 2));
    title.setAttribute("text-anchor", "middle");
    title.setAttribute("font-size", "11");
    title.setAttribute("transform", `rotate(-90 12 ${(top + bottom) / 2})`);
    title.textContent = yScale.axis.title;
    svg.appendChild(title);
  }
}

function drawMarks(
  svg: SVGSVGElement,
  doc: UnitDoc,
  xScale: Scale,
  yScale: Scale,
  colorDomain: string[],
  plotBottom: number,
): void {
  const enc = doc.encoding;
  const baseline = yScale.axis.type === "quantitative" ? yScale.pos(Math.max(yScale.axis.min, 0)) : plotBottom;

  if (doc.mark === "line" || doc.mark === "area") {
    const interpolate = doc.markSpec?.interpolate === "step";
    for (const [key, groupData] of groupBy(doc.values, enc.color)) {
      const pts = groupData
        .map((d) => ({
          x: xScale.pos(fieldValue(d, enc.x)),
          y: yScale.pos(fieldValue(d, enc.y)),
          y2: enc.y2 !== undefined ? yScale.pos(fieldValue(d, enc.y2)) : baseline,
          sort: axisNumber(fieldValue(d, enc.x), xScale.axis.type, xScale.axis.categories),
        }))
        .sort((a, b) => a.sort - b.sort);
      const stroke = colorFor(key === "" ? undefined : key, colorDomain);
      const coords = interpolate ? stepPoints(pts) : pts;
      if (doc.mark === "line") {
        const poly = svgEl("polyline");
        poly.setAttribute("class", "mark-line");
        poly.setAttribute("points", coords.map((p) => `${p.x},${p.y}`).join(" "));
        poly.setAttribute("fill", "none");
        poly.setAttribute("stroke", stroke);
        poly.setAttribute("stroke-width", "2");
        addTooltip(poly, groupData[0]);
        svg.appendChild(poly);
      } else {
        const upper = coords.map((p) => `${p.x},${p.y}`);
        const lower = [...coords].reverse().map((p) => `${p.x},${p.y2}`);
        const polygon = svgEl("polygon");
        polygon.setAttribute("class", "mark-area");
        polygon.setAttribute("points", [...upper, ...lower].join(" "));
        polygon.setAttribute("fill", stroke);
        polygon.setAttribute("fill-opacity", "0.6");
        addTooltip(polygon, groupData[0]);
        svg.appendChild(polygon);
      }
    }
    return;
  }

  for (const datum of doc.values) {
    const color = colorFor(fieldValue(datum, enc.color), colorDomain);
    if (doc.mark === "bar" || doc.mark === "rect") {
      const x = xScale.pos(fieldValue(datum, enc.x));
      const hasX2 = enc.x2 !== undefined;
      const x2 = hasX2 ? xScale.pos(fieldValue(datum, enc.x2)) : x;
      const y = yScale.pos(fieldValue(datum, enc.y));
      const y2 = enc.y2 !== undefined ? yScale.pos(fieldValue(datum, enc.y2)) : baseline;
      const rect = svgEl("rect");
      rect.setAttribute("class", `mark-${doc.mark}`);
      const barW = hasX2 ? Math.max(Math.abs(x2 - x), 1) : Math.max(xScale.bandwidth, 2);
      rect.setAttribute("x", String(hasX2 ? Math.min(x, x2) : x - barW / 2));
      rect.setAttribute("width", String(barW));
      rect.setAttribute("y", String(Math.min(y, y2)));
      rect.setAttribute("height", String(Math.max(Math.abs(y2 - y), 1)));
      rect.setAttribute("fill", color);
      addTooltip(rect, datum);
      svg.appendChild(rect);
    } else {
      const cx = xScale.pos(fieldValue(datum, enc.x));
      const cy = yScale.pos(fieldValue(datum, enc.y));
      const size = fieldValue(datum, enc.size);
      const r = typeof size === "number" ? Math.max(2, Math.min(8, Math.sqrt(Math.abs(size)))) : 3.5;
      const shape = enc.shape !== undefined ? String(fieldValue(datum, enc.shape)) : null;
      const node = drawSymbol(cx, cy, r, shape, colorDomain);
      node.setAttribute("class", "mark-point");
      node.setAttribute("fill", color);
      addTooltip(node, datum);
      svg.appendChild(node);
    }
  }
}

interface Pt {
  x: number;
  y: number;
  y2: number;
  sort: number;
}

/** Insert a horizontal corner point between consecutive points so the path
 * steps across then up, matching stepped interpolation. */
function stepPoints(pts: Pt[]): Pt[] {
  const seq: Pt[] = [];
  for (let i = 0; i < pts.length; i++) {
    seq.push(pts[i]);
    if (i + 1 < pts.length) {
      seq.push({ ...pts[i], x: pts[i + 1].x });
    }
  }
  return seq;
}

function drawSymbol(
  cx: number,
  cy: number,
  r: number,
  shape: string | null,
  shapeDomain: string[],
): SVGElement {
  const variant = shape === null ? 0 : Math.max(shapeDomain.indexOf(shape), 0) % 3;
  if (shape === null || variant === 0) {
    const circle = svgEl("circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(r));
    return circle;
  }
  if (variant === 1) {
    const rect = svgEl("rect");
    rect.setAttribute("x", String(cx - r));
    rect.setAttribute("y", String(cy - r));
    rect.setAttribute("width", String(2 * r));
    rect.setAttribute("height", String(2 * r));
    return rect;
  }
  const tri = svgEl("polygon");
  tri.setAttribute("points", `${cx},${cy - r} ${cx + r},${cy + r} ${cx - r},${cy + r}`);
  return tri;
}
