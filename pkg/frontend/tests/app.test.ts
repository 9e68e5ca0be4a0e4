/** Controller behaviour: boot, toggling, stale-response discard, banners,
 * preset and tornado flows, and the shareable URL.
 */

import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import type { Transport } from "../src/api.js";
import { createApp } from "../src/app.js";
import { formatPercent, formatProbability } from "../src/format.js";
import { restoreState } from "../src/state.js";
import {
  deferred,
  fakeMarginals,
  fakeServiceTransport,
  fakeTornado,
  mount,
} from "./helpers.js";
import type { RecordedCall } from "./helpers.js";

function displayed(root: HTMLElement, node: string): string {
  return root.querySelector(`.node[data-node="${node}"] .node__value`)!
    .textContent!;
}

function gatedInferTransport(): {
  transport: Transport;
  gates: Array<{ release: () => void }>;
  calls: RecordedCall[];
} {
  const base = fakeServiceTransport();
  const gates: Array<{ release: () => void }> = [];
  const transport: Transport = async (url, init) => {
    const path = new URL(url, "http://fake").pathname;
    if (path === "/infer") {
      const gate = deferred<void>();
      gates.push({ release: () => gate.resolve(undefined) });
      await gate.promise;
    }
    return base.transport(url, init);
  };
  return { transport, gates, calls: base.calls };
}

describe("createApp", () => {
  it("boots from /model and renders the base marginals", async () => {
    const { transport, calls } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    expect(calls.map((call) => call.path)).toEqual(["/model", "/infer"]);
    expect(calls[1]!.body).toEqual({ evidence: {} });
    const base = fakeMarginals({});
    expect(displayed(root, "DB")).toBe(formatPercent(base.marginals.DB!));
    expect(root.querySelector(".banner")).toBeNull();
  });

  it("sends the cycled evidence on every toggle and renders its response", async () => {
    const { transport, calls } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();

    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    await app.whenIdle();
    expect(calls.at(-1)).toEqual({
      path: "/infer",
      body: { evidence: { Z1: "active" } },
    });
    const active = fakeMarginals({ Z1: "active" });
    expect(displayed(root, "DB")).toBe(formatPercent(active.marginals.DB!));
    expect(
      root.querySelector<HTMLElement>(`.node[data-node="Z1"]`)!.dataset.state,
    ).toBe("active");

    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    await app.whenIdle();
    expect(calls.at(-1)!.body).toEqual({ evidence: { Z1: "inactive" } });

    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    await app.whenIdle();
    expect(calls.at(-1)!.body).toEqual({ evidence: {} });
    expect(displayed(root, "DB")).toBe(
      formatPercent(fakeMarginals({}).marginals.DB!),
    );
  });

  it("renders only the newest response when an older one arrives late", async () => {
    const { transport, gates } = gatedInferTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await vi.waitFor(() => expect(gates.length).toBe(1));
    gates[0]!.release();
    await app.whenIdle();

    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    expect(gates.length).toBe(3);

    gates[2]!.release();
    gates[1]!.release();
    await app.whenIdle();

    const latest = fakeMarginals({ Z1: "inactive" });
    expect(displayed(root, "DB")).toBe(formatPercent(latest.marginals.DB!));
    expect(app.state().evidence).toEqual({ Z1: "inactive" });
  });

  it("shows a connection banner on boot failure and recovers on retry", async () => {
    const base = fakeServiceTransport();
    let failures = 1;
    const transport: Transport = (url, init) => {
      if (failures > 0) {
        failures -= 1;
        return Promise.reject(new TypeError("connection refused"));
      }
      return base.transport(url, init);
    };
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    expect(root.querySelector(".banner--error")).not.toBeNull();
    expect(root.querySelectorAll(".node").length).toBe(0);

    root.querySelector<HTMLButtonElement>(".banner__retry")!.click();
    await app.whenIdle();
    expect(root.querySelector(".banner--error")).toBeNull();
    expect(root.querySelectorAll(".node").length).toBeGreaterThan(0);
  });

  it("flags a contradictory evidence response without losing the toggles", async () => {
    const base = fakeServiceTransport();
    const transport: Transport = (url, init) => {
      const path = new URL(url, "http://fake").pathname;
      const body = typeof init?.body === "string" ? JSON.parse(init.body) : {};
      if (path === "/infer" && Object.keys(body.evidence ?? {}).length > 0) {
        return Promise.resolve(
          new Response(
            JSON.stringify({ code: "InconsistentEvidence", message: "impossible" }),
            { status: 409, headers: { "content-type": "application/json" } },
          ),
        );
      }
      return base.transport(url, init);
    };
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="FB"]`)!.click();
    await app.whenIdle();
    expect(root.querySelector(".banner--error")!.textContent).toContain(
      "InconsistentEvidence",
    );
    expect(app.state().evidence).toEqual({ FB: "active" });
  });

  it("restores evidence from the initial query and sends it on boot", async () => {
    const { transport, calls } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport), {
      initialQuery: "e=Z1:a,Ghost:a",
    });
    await app.whenIdle();
    const infer = calls.find((call) => call.path === "/infer")!;
    expect(infer.body).toEqual({ evidence: { Z1: "active" } });
    expect(app.state().evidence).toEqual({ Z1: "active" });
  });

  it("emits a query string that restores the current state exactly", async () => {
    const { transport } = fakeServiceTransport();
    const root = mount();
    const queries: string[] = [];
    const app = createApp(root, new ApiClient("", transport), {
      onUrlChange: (query) => queries.push(query),
    });
    await app.whenIdle();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="MFA"]`)!.click();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="MFA"]`)!.click();
    await app.whenIdle();
    expect(queries.length).toBeGreaterThan(0);
    expect(restoreState(queries.at(-1)!)).toEqual(app.state());
  });

  it("runs a preset selected from the dropdown", async () => {
    const { transport } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    const select = root.querySelector<HTMLSelectElement>(".presets__select")!;
    select.value = "table19";
    select.dispatchEvent(new Event("change"));
    await app.whenIdle();
    expect(root.querySelectorAll(".scenario__row").length).toBe(2);
    expect(app.state().preset).toBe("table19");
  });

  it("shows the unknown-preset notice when a stale link names a missing preset", async () => {
    const { transport } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport), {
      initialQuery: "preset=table99",
    });
    await app.whenIdle();
    const notice = root.querySelector(".app__presets .notice--error")!;
    expect(notice.textContent).toContain("table99");
  });

  it("fetches a tornado for a chosen target and re-fetches on mode switch", async () => {
    const { transport, calls } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();

    const select = root.querySelector<HTMLSelectElement>(".tornado__target")!;
    select.value = "DB";
    select.dispatchEvent(new Event("change"));
    await app.whenIdle();
    expect(calls.at(-1)).toEqual({
      path: "/tornado",
      body: { target: "DB", mode: "evidence" },
    });
    const doc = fakeTornado("DB");
    const firstRow = root.querySelector<HTMLElement>(".tornado__row")!;
    expect(firstRow.dataset.source).toBe(doc.bars[0]!.source);
    expect(firstRow.querySelector(".tornado__low")!.textContent).toBe(
      formatProbability(doc.bars[0]!.low),
    );

    root
      .querySelector<HTMLButtonElement>(`.tornado__mode[data-mode="parameter"]`)!
      .click();
    await app.whenIdle();
    expect(calls.at(-1)).toEqual({
      path: "/tornado",
      body: { target: "DB", mode: "parameter" },
    });
    expect(app.state().tornadoMode).toBe("parameter");
  });

  it("adopts target and mode from a tornado preset response", async () => {
    const { transport } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    root
      .querySelector<HTMLButtonElement>(`.tornado__preset[data-preset="fig8"]`)!
      .click();
    await app.whenIdle();
    expect(app.state().tornadoTarget).toBe("DB");
    expect(root.querySelectorAll(".tornado__row").length).toBe(2);
  });

  it("clears all evidence from the header button", async () => {
    const { transport, calls } = fakeServiceTransport();
    const root = mount();
    const app = createApp(root, new ApiClient("", transport));
    await app.whenIdle();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="Z1"]`)!.click();
    root.querySelector<HTMLButtonElement>(`.node__toggle[data-node="LB"]`)!.click();
    await app.whenIdle();
    root.querySelector<HTMLButtonElement>(".app__clear")!.click();
    await app.whenIdle();
    expect(app.state().evidence).toEqual({});
    expect(calls.at(-1)).toEqual({ path: "/infer", body: { evidence: {} } });
  });
});
