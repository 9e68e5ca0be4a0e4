/** UI state transitions and the shareable URL round trip. */

import { describe, expect, it } from "vitest";

import {
  cycleEvidence,
  clearEvidence,
  initialState,
  restoreState,
  serializeState,
} from "../src/state.js";
import type { UiState } from "../src/state.js";

describe("cycleEvidence", () => {
  it("walks none, active, inactive, none", () => {
    let state = initialState();
    state = cycleEvidence(state, "Z1");
    expect(state.evidence).toEqual({ Z1: "active" });
    state = cycleEvidence(state, "Z1");
    expect(state.evidence).toEqual({ Z1: "inactive" });
    state = cycleEvidence(state, "Z1");
    expect(state.evidence).toEqual({});
  });

  it("leaves other selections untouched", () => {
    let state = initialState();
    state = cycleEvidence(state, "Z1");
    state = cycleEvidence(state, "DB");
    expect(state.evidence).toEqual({ Z1: "active", DB: "active" });
    state = cycleEvidence(state, "Z1");
    expect(state.evidence).toEqual({ Z1: "inactive", DB: "active" });
  });

  it("does not mutate the previous state", () => {
    const before = initialState();
    cycleEvidence(before, "Z1");
    expect(before.evidence).toEqual({});
  });

  it("clears evidence wholesale", () => {
    let state = initialState();
    state = cycleEvidence(state, "Z1");
    state = cycleEvidence(state, "DB");
    state = clearEvidence(state);
    expect(state.evidence).toEqual({});
  });
});

describe("URL round trip", () => {
  const cases: Array<[string, UiState]> = [
    ["empty state", initialState()],
    [
      "evidence only",
      {
        ...initialState(),
        evidence: { Z1: "active", MFA: "inactive", DB: "active" },
      },
    ],
    [
      "everything set",
      {
        evidence: { LB: "inactive" },
        preset: "table19",
        tornadoTarget: "DB",
        tornadoMode: "parameter",
        overlay: false,
      },
    ],
  ];

  for (const [label, state] of cases) {
    it(`restores ${label} identically`, () => {
      const query = serializeState(state);
      expect(restoreState(query)).toEqual(state);
    });
  }

  it("serializes the empty state to an empty query", () => {
    expect(serializeState(initialState())).toBe("");
  });

  it("is stable under repeated serialization", () => {
    const state: UiState = {
      ...initialState(),
      evidence: { B: "active", A: "inactive" },
      preset: "table21",
    };
    const once = serializeState(state);
    const twice = serializeState(restoreState(once));
    expect(twice).toBe(once);
  });

  it("accepts a leading question mark", () => {
    const state = { ...initialState(), evidence: { Z1: "active" as const } };
    const query = serializeState(state);
    expect(restoreState(`?${query}`)).toEqual(state);
  });

  it("drops evidence on nodes the model does not know", () => {
    const query = serializeState({
      ...initialState(),
      evidence: { Z1: "active", Ghost: "inactive" },
    });
    const restored = restoreState(query, ["Z1", "DB"]);
    expect(restored.evidence).toEqual({ Z1: "active" });
  });

  it("drops an unknown tornado target", () => {
    const restored = restoreState("target=Ghost", ["Z1"]);
    expect(restored.tornadoTarget).toBeNull();
  });

  it("ignores malformed evidence pairs", () => {
    const restored = restoreState("e=Z1:a,broken,DB:z,:a");
    expect(restored.evidence).toEqual({ Z1: "active" });
  });

  it("ignores an unknown mode", () => {
    const restored = restoreState("mode=sideways");
    expect(restored.tornadoMode).toBe("evidence");
  });
});
