/** Live preview of the example elements by themselves, before any synthesis:
 * each element is turned into a tiny single-mark layer and drawn with the
 * same renderer the gallery uses. */

import { renderSpec } from "./renderer.js";
import type { EditorElement, PropValue, VlSpec } from "./types.js";

const DATE_RE = /^\d{4}-\d{2}-\d{2}/;

function channelType(value: PropValue): string {
  if (typeof value === "number") {
    return "quantitative";
  }
  if (DATE_RE.test(value)) {
    return "temporal";
  }
  return "nominal";
}

function layerFor(element: EditorElement): Record<string, unknown> {
  const props = element.props;
  if (element.kind === "line") {
    const encoding: Record<string, unknown> = {
      x: { field: "x", type: channelType(props.x1) },
      y: { field: "y", type: channelType(props.y1) },
    };
    if (props.color !== undefined) {
      encoding.color = { field: "color", type: channelType(props.color) };
    }
    const shared = props.color !== undefined ? { color: props.color } : {};
    return {
      mark: "line",
      data: {
        values: [
          { x: props.x1, y: props.y1, ...shared },
          { x: props.x2, y: props.y2, ...shared },
        ],
      },
      encoding,
    };
  }
  const encoding: Record<string, unknown> = {};
  const datum: Record<string, unknown> = {};
  for (const [prop, value] of Object.entries(props)) {
    if (prop === "column" || prop === "row") {
      continue;
    }
    datum[prop] = value;
    if (prop === "x2" || prop === "y2") {
      encoding[prop] = { field: prop };
    } else {
      encoding[prop] = { field: prop, type: channelType(value) };
    }
  }
  const mark = element.kind === "point" ? "point" : element.kind;
  return { mark, data: { values: [datum] }, encoding };
}

/** Build a throwaway layered doc for rendering the raw examples. */
export function previewSpec(elements: EditorElement[]): VlSpec {
  return { layer: elements.map(layerFor) };
}

export function renderPreview(container: HTMLElement, elements: EditorElement[]): void {
  container.textContent = "";
  if (elements.length === 0) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "No example elements yet.";
    container.appendChild(hint);
    return;
  }
  container.appendChild(renderSpec(previewSpec(elements), { width: 260, height: 180 }));
}
