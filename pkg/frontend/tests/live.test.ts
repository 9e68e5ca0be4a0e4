/** End-to-end round trip against the real risk service.
 *
 * A real `ztrisk serve` process is spawned on a free port and the UI is
 * driven against it over plain HTTP. Displayed values must be identical to
 * what a direct call to the service returns for the same evidence: the UI
 * adds formatting and nothing else.
 */

import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { request } from "node:http";
import { createServer } from "node:net";
import type { AddressInfo } from "node:net";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { Transport } from "../src/api.js";
import { createApp } from "../src/app.js";
import { formatPercent, formatProbability } from "../src/format.js";
import type {
  MarginalsDocument,
  ModelDocument,
  ScenarioDocument,
  TornadoDocument,
} from "../src/types.js";
import { mount } from "./helpers.js";

/** A Response-shaped adapter over node:http, independent of any DOM fetch. */
function nodeTransport(): Transport {
  return (url, init) =>
    new Promise((resolve, reject) => {
      const target = new URL(url);
      const req = request(
        {
          hostname: target.hostname,
          port: target.port,
          path: target.pathname + target.search,
          method: init?.method ?? "GET",
          headers: (init?.headers as Record<string, string>) ?? {},
        },
        (res) => {
          const chunks: Buffer[] = [];
          res.on("data", (chunk: Buffer) => chunks.push(chunk));
          res.on("end", () => {
            const text = Buffer.concat(chunks).toString("utf8");
            const status = res.statusCode ?? 0;
            resolve({
              ok: status >= 200 && status < 300,
              status,
              json: async () => JSON.parse(text) as unknown,
            } as unknown as Response);
          });
        },
      );
      req.on("error", reject);
      if (typeof init?.body === "string") req.write(init.body);
      req.end();
    });
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as AddressInfo).port;
      probe.close(() => resolve(port));
    });
  });
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

let service: ChildProcess;
let base: string;
let client: ApiClient;

function displayed(root: HTMLElement, node: string): string {
  return root.querySelector(`.node[data-node="${node}"] .node__value`)!
    .textContent!;
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  service = spawn(
    "python3",
    ["-m", "ztrisk.cli", "serve", "--host", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const stderr: string[] = [];
  service.stderr?.on("data", (chunk: Buffer) => stderr.push(chunk.toString()));

  const probe = nodeTransport();
  client = new ApiClient(base, nodeTransport());
  for (let attempt = 0; ; attempt += 1) {
    if (service.exitCode !== null) {
      throw new Error(`service exited early:\n${stderr.join("")}`);
    }
    try {
      const response = await probe(`${base}/model`);
      if (response.ok) break;
    } catch {
      // not listening yet
    }
    if (attempt >= 80) {
      throw new Error(`service never came up:\n${stderr.join("")}`);
    }
    await sleep(500);
  }
});

afterAll(async () => {
  if (service !== undefined && service.exitCode === null) {
    service.kill("SIGTERM");
    await new Promise((resolve) => service.once("exit", resolve));
  }
});

describe("live service round trip", () => {
  it("renders every model node exactly once", async () => {
    const model = (await client.getModel()) as ModelDocument;
    const root = mount();
    const app = createApp(root, new ApiClient(base, nodeTransport()));
    await app.whenIdle();
    const shown = [...root.querySelectorAll<HTMLElement>(".node")].map(
      (el) => el.dataset.node,
    );
    expect(shown.length).toBe(model.nodes.length);
    expect(new Set(shown).size).toBe(model.nodes.length);
    expect(model.nodes.length).toBe(65);
  });

  it("displays exactly the /infer response for toggled controls, and restores base", async () => {
    const root = mount();
    const app = createApp(root, new ApiClient(base, nodeTransport()));
    await app.whenIdle();

    const baseDoc = (await client.infer({ evidence: {} })) as MarginalsDocument;
    const baseBreach = formatPercent(baseDoc.marginals.DataBreach!);
    const baseRisk = formatPercent(baseDoc.marginals.RiskMagnitude!);
    expect(displayed(root, "DataBreach")).toBe(baseBreach);
    expect(displayed(root, "RiskMagnitude")).toBe(baseRisk);

    const controls = ["ZTC1", "ZTC2", "ZTC3", "ZTC4"];
    for (const node of controls) {
      root
        .querySelector<HTMLButtonElement>(`.node__toggle[data-node="${node}"]`)!
        .click();
      await app.whenIdle();
    }
    expect(app.state().evidence).toEqual({
      ZTC1: "active",
      ZTC2: "active",
      ZTC3: "active",
      ZTC4: "active",
    });

    const evidence = Object.fromEntries(
      controls.map((node) => [node, "active" as const]),
    );
    const toggled = (await client.infer({ evidence })) as MarginalsDocument;
    expect(displayed(root, "DataBreach")).toBe(
      formatPercent(toggled.marginals.DataBreach!),
    );
    expect(displayed(root, "RiskMagnitude")).toBe(
      formatPercent(toggled.marginals.RiskMagnitude!),
    );
    expect(toggled.marginals.DataBreach!).toBeLessThan(
      baseDoc.marginals.DataBreach!,
    );

    for (const node of controls) {
      const toggle = () =>
        root
          .querySelector<HTMLButtonElement>(`.node__toggle[data-node="${node}"]`)!
          .click();
      toggle();
      await app.whenIdle();
      toggle();
      await app.whenIdle();
    }
    expect(app.state().evidence).toEqual({});
    expect(displayed(root, "DataBreach")).toBe(baseBreach);
    expect(displayed(root, "RiskMagnitude")).toBe(baseRisk);
  });

  it("shows the table19 run with row 5 inside the reference badge tolerance", async () => {
    const direct = (await client.scenario({ preset: "table19" })) as ScenarioDocument;
    const row5 = direct.rows.find((row) => row.row === 5)!;
    const ob = row5.cells.find((cell) => cell.node === "OrganizationalBarriers")!;
    expect(ob.reference!.value).toBe(0.95);
    expect(ob.within_reference).toBe(true);
    expect(Math.abs(ob.value - 0.95)).toBeLessThanOrEqual(0.02);

    const root = mount();
    const app = createApp(root, new ApiClient(base, nodeTransport()), {
      initialQuery: "preset=table19",
    });
    await app.whenIdle();
    const cell = root.querySelector<HTMLElement>(
      `.scenario__row[data-row="5"] .cell[data-node="OrganizationalBarriers"]`,
    )!;
    expect(cell.querySelector(".cell__value")!.textContent).toBe(
      formatProbability(ob.value),
    );
    expect(cell.querySelector(".cell__reference")!.textContent).toContain(
      formatProbability(0.95),
    );
    expect(cell.querySelector(".badge--ok")).not.toBeNull();
    expect(cell.querySelector(".badge--drift")).toBeNull();
  });

  it("renders the fig8 tornado exactly as served", async () => {
    const direct = (await client.tornado({ preset: "fig8" })) as TornadoDocument;
    expect(direct.bars.length).toBeGreaterThan(0);

    const root = mount();
    const app = createApp(root, new ApiClient(base, nodeTransport()));
    await app.whenIdle();
    root
      .querySelector<HTMLButtonElement>(`.tornado__preset[data-preset="fig8"]`)!
      .click();
    await app.whenIdle();

    const rows = [...root.querySelectorAll<HTMLElement>(".tornado__row")];
    expect(rows.map((row) => row.dataset.source)).toEqual(
      direct.bars.map((bar) => bar.source),
    );
    for (const [index, bar] of direct.bars.entries()) {
      const row = rows[index]!;
      expect(row.querySelector(".tornado__low")!.textContent).toBe(
        formatProbability(bar.low),
      );
      expect(row.querySelector(".tornado__high")!.textContent).toBe(
        formatProbability(bar.high),
      );
    }
    expect(app.state().tornadoTarget).toBe(direct.target);
  });
});
