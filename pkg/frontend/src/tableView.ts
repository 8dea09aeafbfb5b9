/** Read-only view of the imported table. Clicking a cell copies its value
 * into whichever example-editor field was focused last. */

import { formatCell } from "./csv.js";
import type { TableData } from "./types.js";

export type CellCopyHandler = (value: string) => void;

export function renderTable(
  container: HTMLElement,
  table: TableData | null,
  onCellCopy: CellCopyHandler,
): void {
  container.textContent = "";
  if (table === null) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "Import a CSV file or paste CSV text to begin.";
    container.appendChild(hint);
    return;
  }
  const el = document.createElement("table");
  el.className = "data-table";
  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const col of table.columns) {
    const th = document.createElement("th");
    th.textContent = col.name;
    th.title = col.type;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  el.appendChild(thead);
  const tbody = document.createElement("tbody");
  for (const row of table.rows) {
    const tr = document.createElement("tr");
    for (const cell of row) {
      const td = document.createElement("td");
      td.className = "cell";
      td.textContent = formatCell(cell);
      td.title = "click to copy into the focused example field";
      td.addEventListener("click", () => onCellCopy(formatCell(cell)));
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  el.appendChild(tbody);
  container.appendChild(el);
}
