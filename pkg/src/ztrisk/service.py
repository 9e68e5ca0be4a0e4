"""HTTP façade over the calibrated model.

The app loads and calibrates the model once at startup and never mutates it;
point ZTRISK_MANIFEST (or the create_app argument) at a different manifest
and restart to change models. Validation failures return 400 with a JSON body
{"code", "field", "message"}; contradictory evidence returns 409.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .inference import EMPTY_EVIDENCE, InconsistentEvidence, mpe, posterior_marginals
from .montecarlo import (
    mc_spec_from_document,
    mc_spec_to_document,
    propagate_noisy_or,
    summary_to_document,
)
from .network import UnknownNode
from .sensitivity import (
    ParameterRef,
    PerturbationOutOfRange,
    TargetInCandidates,
    bars_to_document,
    evidence_tornado,
    parameter_tornado,
)
from .ztmodel import (
    EvidenceSet,
    Preset,
    PresetRow,
    SchemaError,
    UnknownPreset,
    calibrate,
    default_manifest_path,
    evidence_from_document,
    load_manifest,
    manifest_version,
    marginals_to_document,
    mpe_to_document,
    run_mpe_preset,
    run_scenario_suite,
)


class ApiError(Exception):
    """Maps a failure onto an HTTP status and error document."""

    def __init__(self, status: int, code: str, message: str,
                 field: str | None = None) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.field = field
        self.message = message

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "field": self.field, "message": self.message})


class InferRequest(BaseModel):
    evidence: dict[str, Any] = Field(default_factory=dict)
    virtual: dict[str, tuple[float, float]] = Field(default_factory=dict)
    query: list[str] | None = None


class MpeRequest(BaseModel):
    evidence: dict[str, Any] = Field(default_factory=dict)


class TornadoRequest(BaseModel):
    preset: str | None = None
    target: str | None = None
    mode: str = "evidence"
    candidates: list[str] | None = None
    params: list[dict[str, str]] | None = None
    r: float = 0.1


class ScenarioRequest(BaseModel):
    preset: str | None = None
    row: int | None = None
    evidence: dict[str, Any] | None = None
    watch: list[str] | None = None


class McRequest(BaseModel):
    spec: dict[str, Any]
    seed: int | None = None


def _wrap(exc: Exception) -> ApiError:
    if isinstance(exc, InconsistentEvidence):
        return ApiError(409, "InconsistentEvidence", str(exc))
    if isinstance(exc, UnknownNode):
        return ApiError(400, "UnknownNode", str(exc))
    if isinstance(exc, UnknownPreset):
        return ApiError(400, "UnknownPreset", str(exc.args[0]), field="preset")
    if isinstance(exc, TargetInCandidates):
        return ApiError(400, "TargetInCandidates", str(exc), field="candidates")
    if isinstance(exc, PerturbationOutOfRange):
        return ApiError(400, "PerturbationOutOfRange", str(exc), field="r")
    if isinstance(exc, SchemaError):
        return ApiError(400, "SchemaError", str(exc))
    if isinstance(exc, (ValueError, KeyError)):
        return ApiError(400, "ValidationError", str(exc))
    raise exc


def create_app(manifest_path: str | None = None) -> FastAPI:
    path = manifest_path or default_manifest_path()
    with open(path, encoding="utf-8") as handle:
        raw_doc = json.load(handle)
    manifest = load_manifest(raw_doc)
    version = manifest_version(raw_doc)
    calibrated = calibrate(manifest)
    network = calibrated.network
    node_ids = [decl.id for decl in manifest.nodes]
    known = set(node_ids)

    app = FastAPI(title="ztrisk", version=version)

    @app.exception_handler(ApiError)
    def on_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return exc.response()

    @app.exception_handler(RequestValidationError)
    def on_request_validation(request: Request,
                              exc: RequestValidationError) -> JSONResponse:
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        return JSONResponse(status_code=400, content={
            "code": "RequestValidation", "field": field or None,
            "message": first.get("msg", "invalid request")})

    def guarded(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - translated to HTTP errors
            raise _wrap(exc) from exc

    def parse_evidence(doc: dict[str, Any],
                       virtual: dict[str, tuple[float, float]] | None = None) -> EvidenceSet:
        base = guarded(evidence_from_document, doc, known=node_ids)
        if not virtual:
            return base
        for nid in virtual:
            if nid not in known:
                raise ApiError(400, "UnknownNode",
                               f"virtual evidence references unknown node {nid!r}",
                               field="virtual")
        return guarded(EvidenceSet, hard=base.hard, virtual=virtual)

    @app.get("/model")
    def get_model() -> dict[str, Any]:
        groups: dict[str, list[str]] = {}
        for decl in manifest.nodes:
            groups.setdefault(decl.group, []).append(decl.id)
        return {
            "schema": "ztrisk.model/1",
            "model_version": version,
            "seed": manifest.seed,
            "draws": manifest.draws,
            "nodes": [
                {"id": decl.id, "group": decl.group, "kind": decl.kind,
                 "label": decl.label}
                for decl in manifest.nodes],
            "groups": groups,
            "presets": sorted(p.id for p in manifest.presets),
            "tornado_presets": sorted(p.id for p in manifest.tornado_presets),
        }

    @app.post("/infer")
    def post_infer(body: InferRequest) -> dict[str, Any]:
        evidence = parse_evidence(body.evidence, body.virtual)
        query = body.query or node_ids
        marginals = guarded(posterior_marginals, network, evidence, query)
        doc = marginals_to_document(evidence, marginals)
        doc["model_version"] = version
        return doc

    @app.post("/mpe")
    def post_mpe(body: MpeRequest) -> dict[str, Any]:
        evidence = parse_evidence(body.evidence)
        result = guarded(mpe, network, evidence)
        doc = mpe_to_document(evidence, result)
        doc["model_version"] = version
        return doc

    @app.post("/tornado")
    def post_tornado(body: TornadoRequest) -> dict[str, Any]:
        if body.mode not in ("evidence", "parameter"):
            raise ApiError(400, "ValidationError",
                           f"mode must be 'evidence' or 'parameter', got {body.mode!r}",
                           field="mode")
        if body.preset:
            tp = guarded(manifest.tornado_preset, body.preset)
            target = tp.target
            candidates = list(tp.candidates)
        elif body.target:
            if body.target not in known:
                raise ApiError(400, "UnknownNode",
                               f"unknown node {body.target!r}", field="target")
            target = body.target
            candidates = body.candidates or [
                decl.id for decl in manifest.nodes
                if decl.kind == "root" and decl.id != target]
        else:
            raise ApiError(400, "ValidationError",
                           "tornado needs 'preset' or 'target'", field="target")
        if body.mode == "evidence":
            for nid in candidates:
                if nid not in known:
                    raise ApiError(400, "UnknownNode",
                                   f"unknown node {nid!r}", field="candidates")
            bars = guarded(evidence_tornado, network, target, candidates)
        else:
            if body.params:
                params = [guarded(ParameterRef, **raw) for raw in body.params]
            else:
                params = [ParameterRef(kind="strength", child=target,
                                       parent=link.parent)
                          for link in manifest.links_for(target)]
                if not params:
                    raise ApiError(400, "ValidationError",
                                   f"node {target!r} has no inbound links to perturb",
                                   field="params")
            bars = guarded(parameter_tornado, calibrated.manifest, target,
                           params, body.r)
        doc = bars_to_document(target, body.mode, bars)
        doc["model_version"] = version
        return doc

    @app.post("/scenario")
    def post_scenario(body: ScenarioRequest) -> dict[str, Any]:
        if body.preset is not None:
            preset = guarded(manifest.preset, body.preset)
            if preset.kind == "mpe":
                result = guarded(run_mpe_preset, network, preset)
                evidence = evidence_from_document(
                    {nid: "active" for nid in preset.evidence})
                doc = mpe_to_document(evidence, result)
                doc["model_version"] = version
                return doc
            suite = guarded(run_scenario_suite, network, preset)
            doc = suite.to_document()
            if body.row is not None:
                kept = [r for r in doc["rows"] if r["row"] == body.row]
                if not kept:
                    raise ApiError(400, "ValidationError",
                                   f"preset {body.preset!r} has no row {body.row}",
                                   field="row")
                doc["rows"] = kept
            doc["model_version"] = version
            return doc
        if body.evidence is None:
            raise ApiError(400, "ValidationError",
                           "scenario needs 'preset' or 'evidence'", field="preset")
        evidence = parse_evidence(body.evidence)
        inactive = sorted(nid for nid, state in evidence.hard.items() if state != 0)
        if inactive:
            raise ApiError(400, "ValidationError",
                           "custom scenarios clamp nodes active; use /infer for "
                           f"inactive evidence on {', '.join(inactive)}",
                           field="evidence")
        active = tuple(evidence.hard)
        watch = tuple(body.watch) if body.watch else tuple(node_ids)
        for nid in watch:
            if nid not in known:
                raise ApiError(400, "UnknownNode",
                               f"unknown node {nid!r}", field="watch")
        custom = Preset(id="custom", kind="forward", watch=watch, rows=(
            PresetRow(row=0, label="Base", evidence=()),
            PresetRow(row=1, label="Scenario", evidence=active)))
        suite = guarded(run_scenario_suite, network, custom)
        doc = suite.to_document()
        doc["model_version"] = version
        return doc

    @app.post("/mc")
    def post_mc(body: McRequest) -> dict[str, Any]:
        spec = guarded(mc_spec_from_document, body.spec)
        if body.seed is not None:
            spec = dataclasses.replace(spec, seed=body.seed)
        summary = guarded(propagate_noisy_or, spec)
        return {
            "schema": "ztrisk.mc/1",
            "model_version": version,
            "seed": spec.seed,
            "spec": mc_spec_to_document(spec),
            "summary": summary_to_document(summary),
        }

    @app.get("/calibration")
    def get_calibration() -> dict[str, Any]:
        doc = calibrated.to_document()
        doc["model_version"] = version
        return doc

    @app.get("/reference-tables")
    def get_reference_tables() -> dict[str, Any]:
        return {
            "schema": "ztrisk.reference/1",
            "model_version": version,
            "reference_values": raw_doc.get("reference_values", []),
            "presets": raw_doc.get("presets", []),
            "tornado_presets": raw_doc.get("tornado_presets", []),
        }

    return app
