/** Editor for the example marks that drive synthesis. Users pick an element
 * kind, fill its properties (required ones are marked), and add it to the
 * session. Values can be typed or copied in by clicking table cells. */

import { ELEMENT_KINDS, ELEMENT_PROPS } from "./types.js";
import type { EditorElement, ElementKind, PropValue } from "./types.js";
import type { SessionStore } from "./state.js";

const NUMERIC_RE = /^-?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;

/** Interpret an input's text the way the service will see it. */
export function coerceValue(text: string): PropValue {
  if (NUMERIC_RE.test(text)) {
    return Number(text);
  }
  return text;
}

/** Human-readable validation problems for a draft element; empty means ok. */
export function validateDraft(kind: ElementKind, values: Record<string, string>): string[] {
  const problems: string[] = [];
  for (const prop of ELEMENT_PROPS[kind].required) {
    if ((values[prop] ?? "").trim() === "") {
      problems.push(`${prop} is required for a ${kind} element`);
    }
  }
  return problems;
}

export class ElementEditor {
  private container: HTMLElement;
  private store: SessionStore;
  private kindSelect!: HTMLSelectElement;
  private propInputs = new Map<string, HTMLInputElement>();
  private message!: HTMLElement;
  private listEl!: HTMLElement;
  /** Target for click-to-copy: the prop input focused most recently. */
  private armedInput: HTMLInputElement | null = null;

  constructor(container: HTMLElement, store: SessionStore) {
    this.container = container;
    this.store = store;
    this.build();
    store.subscribe(() => this.renderList());
  }

  private build(): void {
    this.container.textContent = "";

    const kindRow = document.createElement("div");
    kindRow.className = "editor-row";
    const kindLabel = document.createElement("label");
    kindLabel.textContent = "element kind ";
    this.kindSelect = document.createElement("select");
    this.kindSelect.className = "kind-select";
    for (const kind of ELEMENT_KINDS) {
      const opt = document.createElement("option");
      opt.value = kind;
      opt.textContent = kind;
      this.kindSelect.appendChild(opt);
    }
    this.kindSelect.value = "bar";
    this.kindSelect.addEventListener("change", () => this.renderPropInputs());
    kindLabel.appendChild(this.kindSelect);
    kindRow.appendChild(kindLabel);
    this.container.appendChild(kindRow);

    const propsEl = document.createElement("div");
    propsEl.className = "editor-props";
    this.container.appendChild(propsEl);

    this.message = document.createElement("p");
    this.message.className = "editor-message";
    this.container.appendChild(this.message);

    const addButton = document.createElement("button");
    addButton.className = "add-element";
    addButton.textContent = "Add element";
    addButton.addEventListener("click", () => this.addElement());
    this.container.appendChild(addButton);

    this.listEl = document.createElement("ul");
    this.listEl.className = "element-list";
    this.container.appendChild(this.listEl);

    this.renderPropInputs();
    this.renderList();
  }

  private propsContainer(): HTMLElement {
    return this.container.querySelector(".editor-props") as HTMLElement;
  }

  private renderPropInputs(): void {
    const kind = this.kindSelect.value as ElementKind;
    const schema = ELEMENT_PROPS[kind];
    const propsEl = this.propsContainer();
    propsEl.textContent = "";
    this.propInputs.clear();
    this.armedInput = null;
    for (const prop of [...schema.required, ...schema.optional]) {
      const required = schema.required.includes(prop);
      const label = document.createElement("label");
      label.className = "prop-label";
      label.textContent = required ? `${prop}* ` : `${prop} `;
      const input = document.createElement("input");
      input.type = "text";
      input.name = prop;
      input.className = "prop-input";
      input.addEventListener("focus", () => {
        this.armedInput = input;
      });
      input.addEventListener("input", () => this.showValidation());
      label.appendChild(input);
      propsEl.appendChild(label);
      this.propInputs.set(prop, input);
    }
    this.showValidation();
  }

  private draftValues(): Record<string, string> {
    const values: Record<string, string> = {};
    for (const [prop, input] of this.propInputs) {
      values[prop] = input.value;
    }
    return values;
  }

  private showValidation(): void {
    const problems = validateDraft(this.kindSelect.value as ElementKind, this.draftValues());
    this.message.textContent = problems.join("; ");
  }

  /** Receive a value copied from the table view. */
  copyValue(value: string): void {
    if (this.armedInput === null) {
      return;
    }
    this.armedInput.value = value;
    this.armedInput.dispatchEvent(new Event("input"));
  }

  private addElement(): void {
    const kind = this.kindSelect.value as ElementKind;
    const values = this.draftValues();
    const problems = validateDraft(kind, values);
    if (problems.length > 0) {
      this.message.textContent = problems.join("; ");
      return;
    }
    const props: Record<string, PropValue> = {};
    for (const [prop, text] of Object.entries(values)) {
      if (text.trim() !== "") {
        props[prop] = coerceValue(text.trim());
      }
    }
    const element: EditorElement = { kind, props };
    this.store.update({ elements: [...this.store.getState().elements, element] });
    for (const input of this.propInputs.values()) {
      input.value = "";
    }
    this.showValidation();
  }

  private renderList(): void {
    const elements = this.store.getState().elements;
    this.listEl.textContent = "";
    elements.forEach((element, index) => {
      const item = document.createElement("li");
      item.className = "element-item";
      const text = document.createElement("span");
      const props = Object.entries(element.props)
        .map(([k, v]) => `${k}=${v}`)
        .join(", ");
      text.textContent = `${element.kind}(${props})`;
      item.appendChild(text);
      const remove = document.createElement("button");
      remove.className = "remove-element";
      remove.textContent = "remove";
      remove.addEventListener("click", () => {
        const next = this.store.getState().elements.filter((_, i) => i !== index);
        this.store.update({ elements: next });
      });
      item.appendChild(remove);
      this.listEl.appendChild(item);
    });
  }
}
