/** Tornado chart: one horizontal bar per varied input, widest first.
 *
 * The bars arrive from the service already sorted by span; this module only
 * lays them out on a 0..1 axis and prints the served endpoints next to each
 * bar. Switching the target or the mode is reported to the caller, which
 * fetches a fresh document.
 */

import { formatProbability } from "./format.js";
import type { TornadoDocument, TornadoMode } from "./types.js";

export interface TornadoView {
  targets: readonly string[];
  presets: readonly string[];
  selectedTarget: string | null;
  selectedPreset: string | null;
  mode: TornadoMode;
  error: string | null;
}

export interface TornadoHandlers {
  onTarget: (target: string | null) => void;
  onMode: (mode: TornadoMode) => void;
  onPreset: (preset: string) => void;
}

function renderBar(bar: TornadoDocument["bars"][number]): string {
  const left = Math.round(1000 * bar.low) / 10;
  const width = Math.round(1000 * bar.span) / 10;
  return [
    `<div class="tornado__row" data-source="${bar.source}">`,
    `<span class="tornado__source">${bar.source}</span>`,
    `<span class="tornado__axis">` +
      `<span class="tornado__bar" style="left: ${left}%; width: ${width}%"></span>` +
      `</span>`,
    `<span class="tornado__range">` +
      `<span class="tornado__low">${formatProbability(bar.low)}</span>` +
      ` to ` +
      `<span class="tornado__high">${formatProbability(bar.high)}</span>` +
      `</span>`,
    `</div>`,
  ].join("");
}

export function renderTornado(
  root: HTMLElement,
  doc: TornadoDocument | null,
  view: TornadoView,
  handlers: TornadoHandlers,
): void {
  const targetOptions = [`<option value="">(choose a target)</option>`].concat(
    view.targets.map((id) => {
      const chosen = id === view.selectedTarget ? " selected" : "";
      return `<option value="${id}"${chosen}>${id}</option>`;
    }),
  );
  const modeButtons = (["evidence", "parameter"] as const).map((mode) => {
    const pressed = view.mode === mode ? "true" : "false";
    return (
      `<button type="button" class="tornado__mode" data-mode="${mode}" ` +
      `aria-pressed="${pressed}">${mode}</button>`
    );
  });
  const presetButtons = view.presets.map((id) => {
    const pressed = id === view.selectedPreset ? "true" : "false";
    return (
      `<button type="button" class="tornado__preset" data-preset="${id}" ` +
      `aria-pressed="${pressed}">${id}</button>`
    );
  });

  let body: string;
  if (view.error !== null) {
    body = `<p class="notice notice--error">${view.error}</p>`;
  } else if (doc === null) {
    body = `<p class="notice notice--hint">Choose a target or a preset.</p>`;
  } else if (doc.bars.length === 0) {
    body = `<p class="notice notice--empty">No candidates to vary for ${doc.target}.</p>`;
  } else {
    const bars = doc.bars.map(renderBar).join("");
    body =
      `<p class="tornado__caption">${doc.target} under ${doc.mode} sweeps</p>` +
      `<div class="tornado__bars">${bars}</div>`;
  }

  root.innerHTML = [
    `<div class="tornado__controls">`,
    `<select class="tornado__target" aria-label="tornado target">${targetOptions.join("")}</select>`,
    `<span class="tornado__modes">${modeButtons.join("")}</span>`,
    `<span class="tornado__presets">${presetButtons.join("")}</span>`,
    `</div>`,
    body,
  ].join("");

  root
    .querySelector<HTMLSelectElement>(".tornado__target")!
    .addEventListener("change", (event) => {
      const value = (event.target as HTMLSelectElement).value;
      handlers.onTarget(value === "" ? null : value);
    });
  for (const button of root.querySelectorAll<HTMLButtonElement>(".tornado__mode")) {
    button.addEventListener("click", () =>
      handlers.onMode(button.dataset.mode as TornadoMode),
    );
  }
  for (const button of root.querySelectorAll<HTMLButtonElement>(".tornado__preset")) {
    button.addEventListener("click", () => handlers.onPreset(button.dataset.preset!));
  }
}
