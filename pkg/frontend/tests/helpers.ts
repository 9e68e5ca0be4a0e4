/** Shared fixtures for the UI tests: a miniature model document, canned
 * service responses, and transports that record or gate every exchange.
 */

import type { Transport } from "../src/api.js";
import type {
  MarginalsDocument,
  ModelDocument,
  ModelNode,
  ScenarioDocument,
  StateName,
  TornadoDocument,
} from "../src/types.js";

export const FAKE_NODES: ModelNode[] = [
  { id: "LB", group: "barrier_root", kind: "root", label: "Limited budget" },
  { id: "RC", group: "barrier_root", kind: "root", label: "Resistance to change" },
  { id: "FB", group: "barrier", kind: "noisy_or", label: "Financial barriers" },
  { id: "MFA", group: "measure", kind: "root", label: "Multi factor auth" },
  { id: "DP", group: "pillar", kind: "noisy_or", label: "Data pillar" },
  { id: "PIL", group: "aggregate", kind: "noisy_or", label: "Pillar aggregate" },
  { id: "SUC", group: "success", kind: "noisy_or", label: "Implementation success" },
  { id: "PH", group: "attack", kind: "root", label: "Phishing" },
  { id: "C1", group: "intermediate", kind: "noisy_or", label: "Cause one" },
  { id: "Z1", group: "ztc", kind: "noisy_or", label: "Control one" },
  { id: "AS", group: "asset", kind: "noisy_or", label: "Email asset" },
  { id: "DB", group: "breach", kind: "noisy_or", label: "Data breach" },
  { id: "RM", group: "risk", kind: "noisy_or", label: "Risk magnitude" },
  { id: "ND", group: "dummy", kind: "negation", label: "Not dummy" },
];

export function fakeModel(): ModelDocument {
  const groups: Record<string, string[]> = {};
  for (const node of FAKE_NODES) {
    (groups[node.group] ??= []).push(node.id);
  }
  return {
    schema: "ztrisk.model/1",
    model_version: "test",
    seed: 1,
    draws: 100,
    nodes: FAKE_NODES.map((node) => ({ ...node })),
    groups,
    presets: ["table19", "table21"],
    tornado_presets: ["fig8"],
  };
}

/** Deterministic but opaque marginals: a value depends on the node and on
 * the evidence sent, so two different requests never serve the same number
 * by accident and a displayed value pins down which response it came from.
 */
export function fakeMarginals(
  evidence: Record<string, StateName>,
): MarginalsDocument {
  const key = Object.entries(evidence)
    .sort(([a], [b]) => a.localeCompare(b))
    .map(([node, value]) => `${node}=${value}`)
    .join(",");
  let salt = 17;
  for (const ch of key) salt = (salt * 31 + ch.charCodeAt(0)) % 997;
  const marginals: Record<string, number> = {};
  FAKE_NODES.forEach((node, index) => {
    marginals[node.id] = ((salt + 53 * (index + 1)) % 1000) / 1000;
  });
  return {
    schema: "ztrisk.marginals/1",
    model_version: "test",
    evidence: { ...evidence },
    marginals,
  };
}

export function fakeScenario(preset: string): ScenarioDocument {
  return {
    schema: "ztrisk.scenario/1",
    model_version: "test",
    preset,
    kind: "marginals",
    watch: ["FB", "RM"],
    rows: [
      {
        row: 0,
        label: "Base",
        evidence: [],
        cells: [
          { node: "FB", value: 0.611, arrow: null, reference: { value: 0.61, arrow: null }, within_reference: true },
          { node: "RM", value: 0.633, arrow: null, reference: null, within_reference: null },
        ],
      },
      {
        row: 1,
        label: "Scenario 1",
        evidence: ["LB"],
        cells: [
          { node: "FB", value: 0.742, arrow: "up", reference: { value: 0.74, arrow: "up" }, within_reference: true },
          { node: "RM", value: 0.691, arrow: "up", reference: { value: 0.64, arrow: "up" }, within_reference: false },
        ],
      },
    ],
  };
}

export function fakeTornado(target: string): TornadoDocument {
  return {
    schema: "ztrisk.tornado/1",
    model_version: "test",
    target,
    mode: "evidence",
    bars: [
      { source: "LB", low: 0.356, high: 0.813, span: 0.457 },
      { source: "RC", low: 0.422, high: 0.633, span: 0.211 },
    ],
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export interface RecordedCall {
  path: string;
  body: unknown;
}

export type Route = (body: unknown) => Response | Promise<Response>;

/** A transport that dispatches on the request path and records every call. */
export function routedTransport(routes: Record<string, Route>): {
  transport: Transport;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const transport: Transport = async (url, init) => {
    const path = new URL(url, "http://fake").pathname;
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : null;
    calls.push({ path, body });
    const route = routes[path];
    if (route === undefined) {
      return jsonResponse({ code: "NotFound", message: path }, 404);
    }
    return route(body);
  };
  return { transport, calls };
}

export function deferred<T>(): {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (reason: unknown) => void;
} {
  let resolve!: (value: T) => void;
  let reject!: (reason: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

/** A transport backed by a standard fake service: /model, /infer, /scenario
 * and /tornado all answer with deterministic documents.
 */
export function fakeServiceTransport(): {
  transport: Transport;
  calls: RecordedCall[];
} {
  return routedTransport({
    "/model": () => jsonResponse(fakeModel()),
    "/infer": (body) => {
      const request = (body ?? {}) as { evidence?: Record<string, StateName> };
      return jsonResponse(fakeMarginals(request.evidence ?? {}));
    },
    "/scenario": (body) => {
      const request = (body ?? {}) as { preset?: string };
      const preset = request.preset ?? "";
      if (preset !== "table19" && preset !== "table21") {
        return jsonResponse({ code: "UnknownPreset", message: preset, field: "preset" }, 400);
      }
      return jsonResponse(fakeScenario(preset));
    },
    "/tornado": (body) => {
      const request = (body ?? {}) as { target?: string; preset?: string };
      return jsonResponse(fakeTornado(request.target ?? "DB"));
    },
  });
}

export function mount(): HTMLElement {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}
