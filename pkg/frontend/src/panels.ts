/** Grouped node panels: one toggle row per node, with its posterior bar.
 *
 * Pure rendering: the caller supplies the model, the current selections and
 * the latest marginals document, and receives toggle clicks through a
 * callback. No probability is derived here; a node with no delivered value
 * shows a placeholder instead of a number.
 */

import { formatPercent } from "./format.js";
import type { UiState } from "./state.js";
import type { ModelDocument, ModelNode } from "./types.js";

export interface PanelSpec {
  id: string;
  title: string;
  groups: readonly string[];
}

export const PANELS: readonly PanelSpec[] = [
  { id: "barriers", title: "Adoption barriers", groups: ["barrier_root", "barrier"] },
  { id: "measures", title: "Measures and pillars", groups: ["measure", "pillar", "aggregate"] },
  { id: "attacks", title: "Attack vectors", groups: ["attack", "intermediate"] },
  { id: "ztcs", title: "Zero Trust controls", groups: ["ztc"] },
  { id: "assets", title: "Assets", groups: ["asset"] },
  { id: "outcomes", title: "Outcomes", groups: ["success", "breach", "risk", "dummy"] },
];

export const GROUP_COLOR: Record<string, string> = {
  barrier_root: "brown",
  barrier: "brown",
  measure: "teal",
  pillar: "teal",
  aggregate: "teal",
  attack: "red",
  intermediate: "red",
  ztc: "green",
  asset: "grey",
  success: "blue",
  breach: "aqua",
  risk: "orange",
  dummy: "purple",
};

const TOGGLE_GLYPHS: Record<string, string> = {
  none: "○",
  active: "●",
  inactive: "⊘",
};

function nodesForPanel(model: ModelDocument, spec: PanelSpec): ModelNode[] {
  const rank = new Map(spec.groups.map((group, index) => [group, index]));
  return model.nodes
    .filter((node) => rank.has(node.group))
    .sort((a, b) => {
      const byGroup = rank.get(a.group)! - rank.get(b.group)!;
      return byGroup !== 0 ? byGroup : a.label.localeCompare(b.label);
    });
}

function renderNodeRow(
  node: ModelNode,
  state: UiState,
  marginals: Record<string, number> | null,
): string {
  const selection = state.evidence[node.id] ?? "none";
  const color = GROUP_COLOR[node.group] ?? "plain";
  const value = marginals === null ? undefined : marginals[node.id];
  const width = value === undefined ? 0 : Math.round(1000 * value) / 10;
  const text = value === undefined ? "—" : formatPercent(value);
  return [
    `<div class="node node--${color}" data-node="${node.id}" data-group="${node.group}" data-state="${selection}">`,
    `<button type="button" class="node__toggle" data-node="${node.id}" ` +
      `aria-label="toggle ${node.label}">${TOGGLE_GLYPHS[selection]}</button>`,
    `<span class="node__name" title="${node.id}">${node.label}</span>`,
    `<span class="node__bar"><span class="node__fill" style="width: ${width}%"></span></span>`,
    `<span class="node__value">${text}</span>`,
    `</div>`,
  ].join("");
}

export function renderPanels(
  root: HTMLElement,
  model: ModelDocument,
  state: UiState,
  marginals: Record<string, number> | null,
  onToggle: (node: string) => void,
): void {
  const sections = PANELS.map((spec) => {
    const rows = nodesForPanel(model, spec).map((node) =>
      renderNodeRow(node, state, marginals),
    );
    return [
      `<section class="panel" data-panel="${spec.id}">`,
      `<h2 class="panel__title">${spec.title}</h2>`,
      rows.join(""),
      `</section>`,
    ].join("");
  });
  root.innerHTML = sections.join("");
  for (const button of root.querySelectorAll<HTMLButtonElement>(".node__toggle")) {
    button.addEventListener("click", () => onToggle(button.dataset.node!));
  }
}
