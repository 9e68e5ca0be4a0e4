/** Application controller: owns the UI state, talks to the service, renders.
 *
 * Every user action that changes evidence or view parameters issues a fresh
 * request; responses superseded by a newer request on the same channel are
 * discarded (StaleResponse), so the screen always shows the latest delivered
 * document and nothing older. All numbers on screen are copied from those
 * documents.
 */

import { ApiClient, ApiError, ConnectionError, StaleResponse } from "./api.js";
import { renderPanels } from "./panels.js";
import { renderPresetRunner } from "./presets.js";
import { renderTornado } from "./tornado.js";
import {
  cycleEvidence,
  initialState,
  restoreState,
  serializeState,
} from "./state.js";
import type { UiState } from "./state.js";
import type {
  MarginalsDocument,
  ModelDocument,
  MpeDocument,
  ScenarioDocument,
  TornadoDocument,
  TornadoMode,
} from "./types.js";

export interface AppOptions {
  initialQuery?: string;
  onUrlChange?: (query: string) => void;
}

export interface AppController {
  state(): UiState;
  model(): ModelDocument | null;
  whenIdle(): Promise<void>;
  retry(): void;
}

export function createApp(
  root: HTMLElement,
  client: ApiClient,
  options: AppOptions = {},
): AppController {
  let state: UiState = initialState();
  let model: ModelDocument | null = null;
  let marginalsDoc: MarginalsDocument | null = null;
  let presetDoc: ScenarioDocument | MpeDocument | null = null;
  let presetError: string | null = null;
  let tornadoDoc: TornadoDocument | null = null;
  let tornadoError: string | null = null;
  let tornadoPreset: string | null = null;

  let pending = 0;
  let idleResolvers: Array<() => void> = [];

  function track<T>(work: Promise<T>): Promise<T> {
    pending += 1;
    return work.finally(() => {
      pending -= 1;
      if (pending === 0) {
        const resolvers = idleResolvers;
        idleResolvers = [];
        for (const resolve of resolvers) resolve();
      }
    });
  }

  function whenIdle(): Promise<void> {
    if (pending === 0) return Promise.resolve();
    return new Promise((resolve) => idleResolvers.push(resolve));
  }

  root.innerHTML = [
    `<header class="app__header">`,
    `<h1 class="app__title">Zero Trust risk explorer</h1>`,
    `<button type="button" class="app__clear">clear evidence</button>`,
    `</header>`,
    `<div class="app__banner"></div>`,
    `<main class="app__main">`,
    `<div class="app__panels"></div>`,
    `<aside class="app__side">`,
    `<section class="app__presets"></section>`,
    `<section class="app__tornado"></section>`,
    `</aside>`,
    `</main>`,
  ].join("");

  const bannerSlot = root.querySelector<HTMLElement>(".app__banner")!;
  const panelsSlot = root.querySelector<HTMLElement>(".app__panels")!;
  const presetsSlot = root.querySelector<HTMLElement>(".app__presets")!;
  const tornadoSlot = root.querySelector<HTMLElement>(".app__tornado")!;

  function pushUrl(): void {
    options.onUrlChange?.(serializeState(state));
  }

  function setBanner(message: string | null): void {
    if (message === null) {
      bannerSlot.innerHTML = "";
      return;
    }
    bannerSlot.innerHTML =
      `<div class="banner banner--error"><span class="banner__text">${message}</span>` +
      `<button type="button" class="banner__retry">Retry</button></div>`;
    bannerSlot
      .querySelector<HTMLButtonElement>(".banner__retry")!
      .addEventListener("click", () => controller.retry());
  }

  function drawPanels(): void {
    if (model === null) return;
    renderPanels(panelsSlot, model, state, marginalsDoc?.marginals ?? null, onToggle);
  }

  function drawPresets(): void {
    if (model === null) return;
    renderPresetRunner(
      presetsSlot,
      presetDoc,
      {
        presets: model.presets,
        selected: state.preset,
        overlay: state.overlay,
        error: presetError,
      },
      { onPreset, onOverlay },
    );
  }

  function drawTornado(): void {
    if (model === null) return;
    renderTornado(
      tornadoSlot,
      tornadoDoc,
      {
        targets: model.nodes.map((node) => node.id),
        presets: model.tornado_presets,
        selectedTarget: state.tornadoTarget,
        selectedPreset: tornadoPreset,
        mode: state.tornadoMode,
        error: tornadoError,
      },
      { onTarget, onMode, onPreset: onTornadoPreset },
    );
  }

  function refreshMarginals(): void {
    void track(
      client
        .infer({ evidence: state.evidence })
        .then((doc) => {
          marginalsDoc = doc;
          setBanner(null);
          drawPanels();
        })
        .catch((err) => {
          if (err instanceof StaleResponse) return;
          if (err instanceof ConnectionError) {
            setBanner("Cannot reach the risk service.");
            return;
          }
          if (err instanceof ApiError) {
            setBanner(`${err.code}: ${err.message}`);
            return;
          }
          throw err;
        }),
    );
  }

  function runPreset(): void {
    if (state.preset === null) {
      presetDoc = null;
      presetError = null;
      drawPresets();
      return;
    }
    const preset = state.preset;
    void track(
      client
        .scenario({ preset })
        .then((doc) => {
          presetDoc = doc;
          presetError = null;
          drawPresets();
        })
        .catch((err) => {
          if (err instanceof StaleResponse) return;
          presetDoc = null;
          if (err instanceof ApiError && err.code === "UnknownPreset") {
            presetError = `Unknown preset '${err.message}'.`;
          } else if (err instanceof ConnectionError) {
            presetError = "Cannot reach the risk service.";
          } else if (err instanceof ApiError) {
            presetError = `${err.code}: ${err.message}`;
          } else {
            throw err;
          }
          drawPresets();
        }),
    );
  }

  function runTornado(body: { preset: string } | { target: string; mode: TornadoMode }): void {
    void track(
      client
        .tornado(body)
        .then((doc) => {
          tornadoDoc = doc;
          tornadoError = null;
          if ("preset" in body) {
            state = { ...state, tornadoTarget: doc.target, tornadoMode: doc.mode };
            pushUrl();
          }
          drawTornado();
        })
        .catch((err) => {
          if (err instanceof StaleResponse) return;
          tornadoDoc = null;
          if (err instanceof ConnectionError) {
            tornadoError = "Cannot reach the risk service.";
          } else if (err instanceof ApiError) {
            tornadoError = `${err.code}: ${err.message}`;
          } else {
            throw err;
          }
          drawTornado();
        }),
    );
  }

  function onToggle(node: string): void {
    state = cycleEvidence(state, node);
    pushUrl();
    drawPanels();
    refreshMarginals();
  }

  function onPreset(preset: string | null): void {
    state = { ...state, preset };
    pushUrl();
    runPreset();
  }

  function onOverlay(overlay: boolean): void {
    state = { ...state, overlay };
    pushUrl();
    drawPresets();
  }

  function onTarget(target: string | null): void {
    state = { ...state, tornadoTarget: target };
    tornadoPreset = null;
    pushUrl();
    if (target === null) {
      tornadoDoc = null;
      tornadoError = null;
      drawTornado();
      return;
    }
    runTornado({ target, mode: state.tornadoMode });
  }

  function onMode(mode: TornadoMode): void {
    state = { ...state, tornadoMode: mode };
    tornadoPreset = null;
    pushUrl();
    drawTornado();
    if (state.tornadoTarget !== null) {
      runTornado({ target: state.tornadoTarget, mode });
    }
  }

  function onTornadoPreset(preset: string): void {
    tornadoPreset = preset;
    runTornado({ preset });
  }

  function boot(): void {
    void track(
      client
        .getModel()
        .then((doc) => {
          model = doc;
          const known = doc.nodes.map((node) => node.id);
          state = restoreState(options.initialQuery ?? "", known);
          setBanner(null);
          drawPanels();
          drawPresets();
          drawTornado();
          refreshMarginals();
          runPreset();
          if (state.tornadoTarget !== null) {
            runTornado({ target: state.tornadoTarget, mode: state.tornadoMode });
          }
        })
        .catch((err) => {
          if (err instanceof StaleResponse) return;
          if (err instanceof ConnectionError || err instanceof ApiError) {
            setBanner("Cannot reach the risk service.");
            return;
          }
          throw err;
        }),
    );
  }

  root.querySelector<HTMLButtonElement>(".app__clear")!.addEventListener("click", () => {
    state = { ...state, evidence: {} };
    pushUrl();
    drawPanels();
    refreshMarginals();
  });

  const controller: AppController = {
    state: () => state,
    model: () => model,
    whenIdle,
    retry: () => {
      setBanner(null);
      if (model === null) {
        boot();
      } else {
        refreshMarginals();
      }
    },
  };

  boot();
  return controller;
}
