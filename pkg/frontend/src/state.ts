/** UI state and its query-string form.
 *
 * The state holds what the user selected, never what the service computed;
 * posterior values live only in the latest response documents. Serializing
 * to a query string and restoring it yields an identical state, which makes
 * any view shareable as a URL.
 */

import type { StateName, TornadoMode } from "./types.js";

export interface UiState {
  evidence: Record<string, StateName>;
  preset: string | null;
  tornadoTarget: string | null;
  tornadoMode: TornadoMode;
  overlay: boolean;
}

export function initialState(): UiState {
  return {
    evidence: {},
    preset: null,
    tornadoTarget: null,
    tornadoMode: "evidence",
    overlay: true,
  };
}

/** Advance one node through the cycle none -> active -> inactive -> none. */
export function cycleEvidence(state: UiState, node: string): UiState {
  const evidence = { ...state.evidence };
  const current = evidence[node];
  if (current === undefined) {
    evidence[node] = "active";
  } else if (current === "active") {
    evidence[node] = "inactive";
  } else {
    delete evidence[node];
  }
  return { ...state, evidence };
}

export function clearEvidence(state: UiState): UiState {
  return { ...state, evidence: {} };
}

const STATE_CODES: Record<StateName, string> = { active: "a", inactive: "i" };
const CODE_STATES: Record<string, StateName> = { a: "active", i: "inactive" };

export function serializeState(state: UiState): string {
  const params = new URLSearchParams();
  const nodes = Object.keys(state.evidence).sort();
  if (nodes.length > 0) {
    const pairs = nodes.map((node) => `${node}:${STATE_CODES[state.evidence[node]!]}`);
    params.set("e", pairs.join(","));
  }
  if (state.preset !== null) params.set("preset", state.preset);
  if (state.tornadoTarget !== null) params.set("target", state.tornadoTarget);
  if (state.tornadoMode !== "evidence") params.set("mode", state.tornadoMode);
  if (!state.overlay) params.set("overlay", "0");
  return params.toString();
}

/** Rebuild a state from a query string, dropping anything malformed.
 *
 * When `knownNodes` is given, evidence entries naming unknown nodes are
 * dropped as well, so a stale link cannot poison requests to the service.
 */
export function restoreState(query: string, knownNodes?: readonly string[]): UiState {
  const params = new URLSearchParams(query.startsWith("?") ? query.slice(1) : query);
  const state = initialState();
  const known = knownNodes === undefined ? null : new Set(knownNodes);
  const packed = params.get("e");
  if (packed !== null && packed !== "") {
    for (const pair of packed.split(",")) {
      const sep = pair.lastIndexOf(":");
      if (sep <= 0) continue;
      const node = pair.slice(0, sep);
      const value = CODE_STATES[pair.slice(sep + 1)];
      if (value === undefined) continue;
      if (known !== null && !known.has(node)) continue;
      state.evidence[node] = value;
    }
  }
  const preset = params.get("preset");
  if (preset !== null && preset !== "") state.preset = preset;
  const target = params.get("target");
  if (target !== null && target !== "" && (known === null || known.has(target))) {
    state.tornadoTarget = target;
  }
  if (params.get("mode") === "parameter") state.tornadoMode = "parameter";
  if (params.get("overlay") === "0") state.overlay = false;
  return state;
}
