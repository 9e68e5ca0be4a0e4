/** Response document shapes served by the ztrisk HTTP API, mirrored 1:1. */

export type StateName = "active" | "inactive";
export type Arrow = "up" | "down" | null;
export type TornadoMode = "evidence" | "parameter";

export interface ModelNode {
  id: string;
  group: string;
  kind: string;
  label: string;
}

export interface ModelDocument {
  schema: string;
  model_version: string;
  seed: number;
  draws: number;
  nodes: ModelNode[];
  groups: Record<string, string[]>;
  presets: string[];
  tornado_presets: string[];
}

export interface InferRequest {
  evidence?: Record<string, StateName>;
  virtual?: Record<string, [number, number]>;
  query?: string[];
}

export interface MarginalsDocument {
  schema: string;
  model_version: string;
  evidence: Record<string, StateName>;
  marginals: Record<string, number>;
  virtual?: Record<string, [number, number]>;
}

export interface ReferenceCell {
  value: number;
  arrow: Arrow;
}

export interface ScenarioCell {
  node: string;
  value: number;
  arrow: Arrow;
  reference: ReferenceCell | null;
  within_reference: boolean | null;
}

export interface ScenarioRow {
  row: number;
  label: string;
  evidence: string[];
  cells: ScenarioCell[];
}

export interface ScenarioDocument {
  schema: string;
  model_version: string;
  preset: string;
  kind: string;
  watch: string[];
  rows: ScenarioRow[];
}

export interface ScenarioRequest {
  preset?: string;
  row?: number;
  evidence?: Record<string, StateName>;
  watch?: string[];
}

export interface MpeDocument {
  schema: string;
  model_version: string;
  evidence: Record<string, StateName>;
  assignment: Record<string, StateName>;
  p_mpe_and_e: number;
  p_e: number;
  p_mpe_given_e: number;
}

export interface TornadoBar {
  source: string;
  low: number;
  high: number;
  span: number;
}

export interface TornadoDocument {
  schema: string;
  model_version: string;
  target: string;
  mode: TornadoMode;
  bars: TornadoBar[];
}

export interface TornadoRequest {
  preset?: string;
  target?: string;
  mode?: TornadoMode;
  candidates?: string[];
  params?: string[];
  r?: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string | null;
}

export function isMpeDocument(
  doc: ScenarioDocument | MpeDocument,
): doc is MpeDocument {
  return doc.schema === "ztrisk.mpe/1";
}
