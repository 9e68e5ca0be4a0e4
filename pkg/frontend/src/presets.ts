/** Preset runner: replay a published scenario suite and compare rows.
 *
 * Each computed cell is printed next to the reference cell the service
 * attached to it, and the agreement badge reflects the service's own
 * within_reference verdict; the client never re-checks the tolerance.
 */

import { formatProbability, formatSmall } from "./format.js";
import { isMpeDocument } from "./types.js";
import type { MpeDocument, ScenarioCell, ScenarioDocument } from "./types.js";

export interface PresetView {
  presets: readonly string[];
  selected: string | null;
  overlay: boolean;
  error: string | null;
}

export interface PresetHandlers {
  onPreset: (preset: string | null) => void;
  onOverlay: (overlay: boolean) => void;
}

const ARROW_GLYPHS: Record<string, string> = { up: "↑", down: "↓" };

function arrowGlyph(arrow: string | null): string {
  if (arrow === null) return "";
  return ARROW_GLYPHS[arrow] ?? "";
}

function renderCell(cell: ScenarioCell, overlay: boolean): string {
  const parts = [
    `<span class="cell__value">${formatProbability(cell.value)}</span>`,
    `<span class="cell__arrow">${arrowGlyph(cell.arrow)}</span>`,
  ];
  if (overlay && cell.reference !== null) {
    parts.push(
      `<span class="cell__reference">${formatProbability(cell.reference.value)}` +
        `${arrowGlyph(cell.reference.arrow)}</span>`,
    );
    if (cell.within_reference !== null) {
      const flavor = cell.within_reference ? "ok" : "drift";
      const glyph = cell.within_reference ? "✓" : "≠";
      parts.push(`<span class="badge badge--${flavor}">${glyph}</span>`);
    }
  }
  return `<td class="cell" data-node="${cell.node}">${parts.join("")}</td>`;
}

function renderScenarioTable(doc: ScenarioDocument, overlay: boolean): string {
  const head = doc.watch.map((node) => `<th>${node}</th>`).join("");
  const rows = doc.rows.map((row) => {
    const cells = row.cells.map((cell) => renderCell(cell, overlay)).join("");
    return (
      `<tr class="scenario__row" data-row="${row.row}">` +
      `<th class="scenario__label">${row.label}</th>${cells}</tr>`
    );
  });
  return [
    `<div class="scenario__scroll"><table class="scenario">`,
    `<thead><tr><th>Scenario</th>${head}</tr></thead>`,
    `<tbody>${rows.join("")}</tbody>`,
    `</table></div>`,
  ].join("");
}

function renderMpeView(doc: MpeDocument): string {
  const entries = Object.entries(doc.assignment)
    .sort(([a], [b]) => a.localeCompare(b))
    .sort(([, a], [, b]) => Number(b === "active") - Number(a === "active"));
  const rows = entries.map(
    ([node, value]) =>
      `<tr class="mpe__row" data-node="${node}" data-value="${value}">` +
      `<td>${node}</td><td class="mpe__state mpe__state--${value}">${value}</td></tr>`,
  );
  const evidence = Object.entries(doc.evidence)
    .map(([node, value]) => `${node}=${value}`)
    .join(", ");
  return [
    `<p class="mpe__summary">Most probable explanation given ${evidence || "no evidence"}: `,
    `<span class="mpe__p" data-quantity="p_mpe_given_e">${formatSmall(doc.p_mpe_given_e)}</span>`,
    ` of the evidence mass (joint `,
    `<span class="mpe__p" data-quantity="p_mpe_and_e">${formatSmall(doc.p_mpe_and_e)}</span>`,
    `, evidence `,
    `<span class="mpe__p" data-quantity="p_e">${formatSmall(doc.p_e)}</span>`,
    `).</p>`,
    `<div class="scenario__scroll"><table class="mpe">`,
    `<thead><tr><th>Node</th><th>State</th></tr></thead>`,
    `<tbody>${rows.join("")}</tbody>`,
    `</table></div>`,
  ].join("");
}

export function renderPresetRunner(
  root: HTMLElement,
  doc: ScenarioDocument | MpeDocument | null,
  view: PresetView,
  handlers: PresetHandlers,
): void {
  const options = [`<option value="">(choose a preset)</option>`].concat(
    view.presets.map((id) => {
      const chosen = id === view.selected ? " selected" : "";
      return `<option value="${id}"${chosen}>${id}</option>`;
    }),
  );
  const checked = view.overlay ? " checked" : "";

  let body: string;
  if (view.error !== null) {
    body = `<p class="notice notice--error">${view.error}</p>`;
  } else if (doc === null) {
    body = `<p class="notice notice--hint">Choose a preset to replay.</p>`;
  } else if (isMpeDocument(doc)) {
    body = renderMpeView(doc);
  } else {
    body = renderScenarioTable(doc, view.overlay);
  }

  root.innerHTML = [
    `<div class="presets__controls">`,
    `<select class="presets__select" aria-label="scenario preset">${options.join("")}</select>`,
    `<label class="presets__overlay"><input type="checkbox" class="presets__overlay-box"${checked}>`,
    ` show reference</label>`,
    `</div>`,
    body,
  ].join("");

  root
    .querySelector<HTMLSelectElement>(".presets__select")!
    .addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      handlers.onPreset(value === "" ? null : value);
    });
  root
    .querySelector<HTMLInputElement>(".presets__overlay-box")!
    .addEventListener("change", (event) => {
      handlers.onOverlay((event.target as HTMLInputElement).checked);
    });
}
