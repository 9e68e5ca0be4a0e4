"""Zero-trust adoption and breach-risk model.

This module turns the packaged parameter manifest into a runnable network:
loading and validating the manifest, wiring the noisy-or structure, fitting
the free leak parameters against published base-case figures, and evaluating
the canned scenario suites that mirror the published result tables.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .inference import EMPTY_EVIDENCE, EvidenceSet, MpeResult, mpe, posterior_marginals
from .montecarlo import McParent, McSpec
from .network import (
    ACTIVE,
    ENABLER,
    INACTIVE,
    INHIBITOR,
    ExplicitTable,
    Negation,
    Network,
    NodeSpec,
    NoisyOr,
    NoisyOrEntry,
    UnknownNode,
    build_network,
)
from .priors import BetaParams

MANIFEST_SCHEMA = "ztrisk.manifest/1"
MANIFEST_ENV_VAR = "ZTRISK_MANIFEST"

# A declared strength must sit this close to the median of its declared prior.
PROVENANCE_TOL = 0.01
# Leak fitting runs bisection to this width.
CALIBRATION_TOL = 1e-6
# A calibrated network must reproduce its targets this closely on re-inference.
REPRODUCE_TOL = 1e-4
# Display badge: computed scenario cells within this of the reference count as
# agreeing when tables are rendered side by side with published rows.
REFERENCE_BADGE_TOL = 0.02

_DIRECTION_TOL = 1e-9

NODE_KINDS = ("root", "noisy_or", "negation")
LEAK_KINDS = ("fixed", "beta", "calibrated")
LINK_ROLES = (ENABLER, INHIBITOR)

STATUS_REPRODUCED = "reproduced"
STATUS_CALIBRATED = "calibrated"
STATUS_UNRECONCILED = "unreconciled"

_ISM_NODES = (
    "LimitedBudget", "ZTCosts", "PoorZTBudgetEst", "ResistanceToChange",
    "CybersecurityAwareness", "NoHiring", "ZTTechKnowledge", "LegacySystems",
    "DE", "DLP", "SSO", "RBAC", "MFA", "DM", "DInv", "EDR", "WAF",
    "AnalysisParalysis", "FinancialBarriers", "OrganizationalBarriers",
    "DataPillar", "IdentityPillar", "DevicePillar", "ApplicationPillar",
    "ZTSMBsPillars", "NotFinancialBarriers", "NotOrganizationalBarriers",
    "ZTImplementationSuccess",
)

_RAM_NODES = (
    "Phishing", "CredentialBased", "InsiderThreat", "LostStolen",
    "ZTC1", "ZTC2", "ZTC3", "ZTC4",
    "Cause_Phishing_Email", "Cause_Phishing_Server",
    "Cause_InsiderThreat_Email", "Cause_InsiderThreat_Server",
    "Cause_InsiderThreat_Website", "Cause_InsiderThreat_PrintedRecords",
    "Cause_InsiderThreat_UserDevices", "Cause_InsiderThreat_Software",
    "Cause_InsiderThreat_PortableStorage",
    "Cause_CredentialBased_Email", "Cause_CredentialBased_Server",
    "Cause_CredentialBased_Website", "Cause_CredentialBased_PrintedRecords",
    "Cause_CredentialBased_UserDevices", "Cause_CredentialBased_PortableStorage",
    "Cause_LostStolen_Server", "Cause_LostStolen_PrintedRecords",
    "Cause_LostStolen_UserDevices", "Cause_LostStolen_PortableStorage",
    "Email", "Server", "Website", "PrintedRecords", "Software", "UserDevices",
    "PortableStorage", "DataBreach", "NotZTImplementationSuccess",
    "RiskMagnitude",
)

REQUIRED_NODES = frozenset(_ISM_NODES) | frozenset(_RAM_NODES)


class SchemaError(ValueError):
    """The manifest document is structurally invalid."""


class ProvenanceMismatch(ValueError):
    """A declared point value disagrees with its declared prior's median."""


class UnknownPreset(KeyError):
    """No preset with the requested id exists in the manifest."""


# --------------------------------------------------------------------------
# Manifest model


@dataclass(frozen=True)
class LeakSpec:
    kind: str
    value: float | None = None
    prior: BetaParams | None = None
    target: float | None = None
    source: str = ""

    @property
    def point_value(self) -> float:
        """Leak used when building the network before any calibration."""
        if self.kind == "calibrated":
            return 0.0
        assert self.value is not None
        return self.value


@dataclass(frozen=True)
class NodeDecl:
    id: str
    group: str
    kind: str
    label: str = ""
    source: str = ""
    marginal: float | None = None
    prior: BetaParams | None = None
    leak: LeakSpec | None = None
    parent: str | None = None


@dataclass(frozen=True)
class LinkDecl:
    child: str
    parent: str
    role: str
    median: float
    prior: BetaParams | None = None
    source: str = ""


@dataclass(frozen=True)
class ReferenceValue:
    id: str
    node: str
    published_value: float
    tolerance: float
    source: str = ""
    calibrates: str | None = None


@dataclass(frozen=True)
class ReferenceCell:
    value: float
    arrow: str | None = None


@dataclass(frozen=True)
class PresetRow:
    row: int
    label: str
    evidence: tuple[str, ...]
    reference: Mapping[str, ReferenceCell] = field(default_factory=dict)


@dataclass(frozen=True)
class Preset:
    id: str
    kind: str  # forward | backward | mpe
    source: str = ""
    watch: tuple[str, ...] = ()
    rows: tuple[PresetRow, ...] = ()
    virtual: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    evidence: tuple[str, ...] = ()
    reference: Mapping[str, ReferenceCell] = field(default_factory=dict)


@dataclass(frozen=True)
class TornadoRange:
    """Published endpoints for one bar, with the agreement tolerance."""

    source_id: str
    low: float
    high: float
    tolerance: float


@dataclass(frozen=True)
class TornadoPreset:
    id: str
    target: str
    candidates: tuple[str, ...]
    expected_order: tuple[str, ...] = ()
    expected_first: str | None = None
    reference_range: TornadoRange | None = None
    source: str = ""


@dataclass(frozen=True)
class ZtManifest:
    schema: str
    seed: int
    draws: int
    nodes: tuple[NodeDecl, ...]
    links: tuple[LinkDecl, ...]
    reference_values: tuple[ReferenceValue, ...]
    presets: tuple[Preset, ...]
    tornado_presets: tuple[TornadoPreset, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {n.id: n for n in self.nodes})
        by_child: dict[str, list[LinkDecl]] = {}
        for link in self.links:
            by_child.setdefault(link.child, []).append(link)
        object.__setattr__(self, "_by_child",
                           {c: tuple(ls) for c, ls in by_child.items()})

    def node(self, node_id: str) -> NodeDecl:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise SchemaError(f"manifest has no node {node_id!r}") from None

    def links_for(self, child: str) -> tuple[LinkDecl, ...]:
        return self._by_child.get(child, ())

    def preset(self, preset_id: str) -> Preset:
        for preset in self.presets:
            if preset.id == preset_id:
                return preset
        raise UnknownPreset(preset_id)

    def tornado_preset(self, preset_id: str) -> TornadoPreset:
        for preset in self.tornado_presets:
            if preset.id == preset_id:
                return preset
        raise UnknownPreset(preset_id)

    def calibrated_nodes(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes
                     if n.leak is not None and n.leak.kind == "calibrated")

    def with_leak(self, node_id: str, value: float) -> "ZtManifest":
        """Copy with one node's leak pinned to a fixed value."""
        decl = self.node(node_id)
        if decl.leak is None:
            raise SchemaError(f"node {node_id!r} has no leak to replace")
        new_leak = LeakSpec(kind="fixed", value=float(value),
                            source=decl.leak.source)
        return self._replace_node(NodeDecl(
            id=decl.id, group=decl.group, kind=decl.kind, label=decl.label,
            source=decl.source, marginal=decl.marginal, prior=decl.prior,
            leak=new_leak, parent=decl.parent))

    def with_marginal(self, node_id: str, value: float) -> "ZtManifest":
        """Copy with one root node's marginal replaced."""
        decl = self.node(node_id)
        if decl.kind != "root":
            raise SchemaError(f"node {node_id!r} is not a root")
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"marginal must lie in [0, 1], got {value!r}")
        return self._replace_node(NodeDecl(
            id=decl.id, group=decl.group, kind=decl.kind, label=decl.label,
            source=decl.source, marginal=float(value), prior=decl.prior,
            leak=decl.leak, parent=decl.parent))

    def with_link_median(self, child: str, parent: str,
                         value: float) -> "ZtManifest":
        """Copy with one link strength replaced."""
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"strength must lie in [0, 1], got {value!r}")
        found = False
        links = []
        for link in self.links:
            if link.child == child and link.parent == parent:
                found = True
                link = LinkDecl(child=link.child, parent=link.parent,
                                role=link.role, median=float(value),
                                prior=link.prior, source=link.source)
            links.append(link)
        if not found:
            raise SchemaError(f"manifest has no link {child!r} <- {parent!r}")
        return ZtManifest(
            schema=self.schema, seed=self.seed, draws=self.draws,
            nodes=self.nodes, links=tuple(links),
            reference_values=self.reference_values, presets=self.presets,
            tornado_presets=self.tornado_presets)

    def _replace_node(self, replacement: NodeDecl) -> "ZtManifest":
        nodes = tuple(replacement if n.id == replacement.id else n
                      for n in self.nodes)
        return ZtManifest(
            schema=self.schema, seed=self.seed, draws=self.draws,
            nodes=nodes, links=self.links,
            reference_values=self.reference_values, presets=self.presets,
            tornado_presets=self.tornado_presets)


# --------------------------------------------------------------------------
# Loading and validation


def default_manifest_path() -> Path:
    """Packaged manifest, unless ZTRISK_MANIFEST points somewhere else."""
    override = os.environ.get(MANIFEST_ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("ztrisk").joinpath("data/zt_manifest.json")))


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def _as_probability(value: Any, context: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{context} must be a number, got {value!r}")
    value = float(value)
    _require(0.0 <= value <= 1.0, f"{context} must lie in [0, 1], got {value}")
    return value


def _parse_prior(doc: Any, context: str) -> BetaParams | None:
    if doc is None:
        return None
    _require(isinstance(doc, Mapping) and set(doc) == {"alpha", "beta"},
             f"{context} prior must be an object with alpha and beta")
    try:
        return BetaParams(float(doc["alpha"]), float(doc["beta"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{context} prior invalid: {exc}") from None


def _parse_leak(doc: Any, context: str) -> LeakSpec:
    _require(isinstance(doc, Mapping), f"{context} leak must be an object")
    kind = doc.get("kind")
    _require(kind in LEAK_KINDS,
             f"{context} leak kind must be one of {LEAK_KINDS}, got {kind!r}")
    source = str(doc.get("source", ""))
    if kind == "fixed":
        return LeakSpec(kind=kind, value=_as_probability(doc.get("value"),
                        f"{context} leak value"), source=source)
    if kind == "beta":
        prior = _parse_prior({"alpha": doc.get("alpha"), "beta": doc.get("beta")},
                             f"{context} leak")
        median = _as_probability(doc.get("median"), f"{context} leak median")
        return LeakSpec(kind=kind, value=median, prior=prior, source=source)
    target = doc.get("target")
    if target is not None:
        target = _as_probability(target, f"{context} leak target")
    return LeakSpec(kind=kind, target=target, source=source)


def _parse_reference_cell(doc: Any, context: str) -> ReferenceCell:
    _require(isinstance(doc, Mapping), f"{context} must be an object")
    arrow = doc.get("arrow")
    _require(arrow in (None, "up", "down"),
             f"{context} arrow must be null, 'up', or 'down'")
    return ReferenceCell(value=_as_probability(doc.get("value"),
                                               f"{context} value"), arrow=arrow)


def _check_provenance(median: float, prior: BetaParams | None,
                      context: str) -> None:
    if prior is None:
        return
    expected = prior.median
    if abs(median - expected) > PROVENANCE_TOL:
        raise ProvenanceMismatch(
            f"{context}: declared median {median} is {abs(median - expected):.4f} "
            f"from Beta({prior.alpha:g}, {prior.beta:g}) median {expected:.4f}")


def load_manifest(source: Mapping[str, Any] | str | Path) -> ZtManifest:
    """Parse and validate a manifest document, dict or file path.

    Raises SchemaError for structural problems and ProvenanceMismatch when a
    declared point value strays from the median of its declared prior.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as handle:
            doc = json.load(handle)
    else:
        doc = source
    _require(isinstance(doc, Mapping), "manifest must be a JSON object")
    _require(doc.get("schema") == MANIFEST_SCHEMA,
             f"unsupported manifest schema {doc.get('schema')!r}")
    seed = doc.get("seed")
    draws = doc.get("draws")
    _require(isinstance(seed, int) and seed >= 0, "seed must be a non-negative int")
    _require(isinstance(draws, int) and draws >= 1, "draws must be a positive int")

    raw_nodes = doc.get("nodes")
    _require(isinstance(raw_nodes, Sequence) and raw_nodes,
             "manifest needs a non-empty node list")
    nodes: list[NodeDecl] = []
    seen: set[str] = set()
    for raw in raw_nodes:
        _require(isinstance(raw, Mapping), "each node must be an object")
        nid = raw.get("id")
        _require(isinstance(nid, str) and nid, "node id must be a non-empty string")
        _require(nid not in seen, f"duplicate node id {nid!r}")
        seen.add(nid)
        kind = raw.get("kind")
        _require(kind in NODE_KINDS,
                 f"node {nid!r} kind must be one of {NODE_KINDS}, got {kind!r}")
        decl = NodeDecl(
            id=nid,
            group=str(raw.get("group", "")),
            kind=kind,
            label=str(raw.get("label", nid)),
            source=str(raw.get("source", "")),
            marginal=(_as_probability(raw["marginal"], f"node {nid!r} marginal")
                      if kind == "root" else None),
            prior=_parse_prior(raw.get("prior"), f"node {nid!r}"),
            leak=(_parse_leak(raw.get("leak"), f"node {nid!r}")
                  if kind == "noisy_or" else None),
            parent=raw.get("parent") if kind == "negation" else None,
        )
        if kind == "root":
            _require("marginal" in raw, f"root node {nid!r} needs a marginal")
        if kind == "noisy_or":
            _require(raw.get("leak") is not None, f"node {nid!r} needs a leak")
        if kind == "negation":
            _require(isinstance(decl.parent, str) and bool(decl.parent),
                     f"negation node {nid!r} needs a parent")
        nodes.append(decl)

    missing = sorted(REQUIRED_NODES - seen)
    _require(not missing, f"manifest missing required nodes: {missing}")

    ids = seen
    raw_links = doc.get("links")
    _require(isinstance(raw_links, Sequence), "manifest needs a link list")
    links: list[LinkDecl] = []
    seen_links: set[tuple[str, str]] = set()
    node_kind = {n.id: n.kind for n in nodes}
    for raw in raw_links:
        _require(isinstance(raw, Mapping), "each link must be an object")
        child, parent = raw.get("child"), raw.get("parent")
        _require(child in ids, f"link child {child!r} is not a node")
        _require(parent in ids, f"link parent {parent!r} is not a node")
        _require(child != parent, f"link {child!r} cannot be its own parent")
        _require((child, parent) not in seen_links,
                 f"duplicate link {child!r} <- {parent!r}")
        seen_links.add((child, parent))
        _require(node_kind[child] == "noisy_or",
                 f"link child {child!r} must be a noisy_or node")
        role = raw.get("role")
        _require(role in LINK_ROLES,
                 f"link {child!r} <- {parent!r} role must be one of {LINK_ROLES}")
        context = f"{raw.get('source', 'link')} {child} <- {parent}"
        median = _as_probability(raw.get("median"), f"{context} median")
        prior = _parse_prior(raw.get("prior"), context)
        _check_provenance(median, prior, context)
        links.append(LinkDecl(child=child, parent=parent, role=role,
                              median=median, prior=prior,
                              source=str(raw.get("source", ""))))

    children_with_links = {link.child for link in links}
    for decl in nodes:
        if decl.kind == "noisy_or":
            _require(decl.id in children_with_links,
                     f"noisy_or node {decl.id!r} has no links")
            assert decl.leak is not None
            if decl.leak.kind == "beta":
                assert decl.leak.value is not None
                _check_provenance(decl.leak.value, decl.leak.prior,
                                  f"{decl.leak.source or 'leak'} {decl.id} leak")
        if decl.kind == "negation":
            _require(decl.parent in ids,
                     f"negation node {decl.id!r} parent {decl.parent!r} unknown")

    raw_refs = doc.get("reference_values", [])
    _require(isinstance(raw_refs, Sequence), "reference_values must be a list")
    refs: list[ReferenceValue] = []
    seen_refs: set[str] = set()
    for raw in raw_refs:
        _require(isinstance(raw, Mapping), "each reference value must be an object")
        rid = raw.get("id")
        _require(isinstance(rid, str) and rid and rid not in seen_refs,
                 f"reference id {rid!r} missing or duplicated")
        seen_refs.add(rid)
        ref_node = raw.get("node")
        _require(ref_node in ids, f"reference {rid!r} names unknown node {ref_node!r}")
        calibrates = raw.get("calibrates")
        if calibrates is not None:
            _require(calibrates in ids,
                     f"reference {rid!r} calibrates unknown node {calibrates!r}")
            leak = next(n.leak for n in nodes if n.id == calibrates)
            _require(leak is not None and leak.kind == "calibrated",
                     f"reference {rid!r} calibrates node without a calibrated leak")
        refs.append(ReferenceValue(
            id=rid, node=ref_node,
            published_value=_as_probability(raw.get("published_value"),
                                        f"reference {rid!r} published_value"),
            tolerance=_as_probability(raw.get("tolerance"),
                                      f"reference {rid!r} tolerance"),
            source=str(raw.get("source", "")), calibrates=calibrates))

    raw_presets = doc.get("presets", [])
    _require(isinstance(raw_presets, Sequence), "presets must be a list")
    presets: list[Preset] = []
    seen_presets: set[str] = set()
    for raw in raw_presets:
        _require(isinstance(raw, Mapping), "each preset must be an object")
        pid = raw.get("id")
        _require(isinstance(pid, str) and pid and pid not in seen_presets,
                 f"preset id {pid!r} missing or duplicated")
        seen_presets.add(pid)
        kind = raw.get("kind")
        _require(kind in ("forward", "backward", "mpe"),
                 f"preset {pid!r} kind {kind!r} unsupported")
        watch = tuple(raw.get("watch", ()))
        for nid in watch:
            _require(nid in ids, f"preset {pid!r} watches unknown node {nid!r}")
        rows: list[PresetRow] = []
        for raw_row in raw.get("rows", ()):
            _require(isinstance(raw_row, Mapping),
                     f"preset {pid!r} rows must be objects")
            evidence = tuple(raw_row.get("evidence", ()))
            for nid in evidence:
                _require(nid in ids,
                         f"preset {pid!r} row evidence names unknown node {nid!r}")
            reference = {
                nid: _parse_reference_cell(cell, f"preset {pid!r} reference {nid}")
                for nid, cell in dict(raw_row.get("reference", {})).items()}
            for nid in reference:
                _require(nid in ids,
                         f"preset {pid!r} reference names unknown node {nid!r}")
            rows.append(PresetRow(row=int(raw_row.get("row", len(rows))),
                                  label=str(raw_row.get("label", "")),
                                  evidence=evidence, reference=reference))
        virtual = {}
        for nid, pair in dict(raw.get("virtual", {})).items():
            _require(nid in ids, f"preset {pid!r} virtual names unknown node {nid!r}")
            _require(isinstance(pair, Sequence) and len(pair) == 2,
                     f"preset {pid!r} virtual weights must be a pair")
            virtual[nid] = (float(pair[0]), float(pair[1]))
        evidence = tuple(raw.get("evidence", ())) if kind == "mpe" else ()
        for nid in evidence:
            _require(nid in ids, f"preset {pid!r} evidence names unknown node {nid!r}")
        reference = {
            nid: _parse_reference_cell(cell, f"preset {pid!r} reference {nid}")
            for nid, cell in dict(raw.get("reference", {})).items()}
        presets.append(Preset(id=pid, kind=kind, source=str(raw.get("source", "")),
                              watch=watch, rows=tuple(rows), virtual=virtual,
                              evidence=evidence, reference=reference))

    raw_tornado = doc.get("tornado_presets", [])
    _require(isinstance(raw_tornado, Sequence), "tornado_presets must be a list")
    tornado: list[TornadoPreset] = []
    for raw in raw_tornado:
        _require(isinstance(raw, Mapping), "each tornado preset must be an object")
        pid = raw.get("id")
        _require(isinstance(pid, str) and pid, "tornado preset needs an id")
        target = raw.get("target")
        _require(target in ids, f"tornado preset {pid!r} target unknown")
        candidates = tuple(raw.get("candidates", ()))
        _require(bool(candidates), f"tornado preset {pid!r} needs candidates")
        for nid in candidates:
            _require(nid in ids, f"tornado preset {pid!r} candidate {nid!r} unknown")
        expected_order = tuple(raw.get("expected_order", ()))
        for nid in expected_order:
            _require(nid in candidates,
                     f"tornado preset {pid!r} expected_order has non-candidate {nid!r}")
        expected_first = raw.get("expected_first")
        if expected_first is not None:
            _require(expected_first in candidates,
                     f"tornado preset {pid!r} expected_first is not a candidate")
        reference_range = None
        raw_range = raw.get("reference_range")
        if raw_range is not None:
            _require(isinstance(raw_range, Mapping)
                     and raw_range.get("source_id") in candidates,
                     f"tornado preset {pid!r} reference_range invalid")
            reference_range = TornadoRange(
                source_id=raw_range["source_id"],
                low=_as_probability(raw_range.get("low"),
                                    f"tornado preset {pid!r} range low"),
                high=_as_probability(raw_range.get("high"),
                                     f"tornado preset {pid!r} range high"),
                tolerance=_as_probability(raw_range.get("tolerance"),
                                          f"tornado preset {pid!r} range tolerance"))
        tornado.append(TornadoPreset(id=pid, target=target, candidates=candidates,
                                     expected_order=expected_order,
                                     expected_first=expected_first,
                                     reference_range=reference_range,
                                     source=str(raw.get("source", ""))))

    return ZtManifest(schema=MANIFEST_SCHEMA, seed=seed, draws=draws,
                      nodes=tuple(nodes), links=tuple(links),
                      reference_values=tuple(refs), presets=tuple(presets),
                      tornado_presets=tuple(tornado))


def load_default_manifest(path: str | Path | None = None) -> ZtManifest:
    return load_manifest(Path(path) if path is not None else default_manifest_path())


# --------------------------------------------------------------------------
# Network construction


def build_ztnetwork(manifest: ZtManifest,
                    leak_overrides: Mapping[str, float] | None = None) -> Network:
    """Wire the manifest into a Network.

    `leak_overrides` replaces the declared leak of specific noisy-or nodes;
    calibration uses it to evaluate candidate leak values without mutating the
    manifest.
    """
    overrides = dict(leak_overrides or {})
    unknown = sorted(set(overrides) - {n.id for n in manifest.nodes})
    if unknown:
        raise SchemaError(f"leak overrides for unknown nodes: {unknown}")
    specs: list[NodeSpec] = []
    for decl in manifest.nodes:
        if decl.kind == "root":
            assert decl.marginal is not None
            cpd = ExplicitTable(parents=(), rows=(decl.marginal,))
        elif decl.kind == "negation":
            assert decl.parent is not None
            cpd = Negation(parent=decl.parent)
        else:
            assert decl.leak is not None
            leak = overrides.get(decl.id, decl.leak.point_value)
            entries = tuple(
                NoisyOrEntry(parent=link.parent, strength=link.median,
                             polarity=link.role)
                for link in manifest.links_for(decl.id))
            cpd = NoisyOr(entries=entries, leak=leak)
        specs.append(NodeSpec(id=decl.id, cpd=cpd, group=decl.group))
    return build_network(specs)


def noisy_or_expected(strengths: Sequence[float], marginals: Sequence[float],
                      leak: float = 0.0) -> float:
    """Closed-form noisy-or output when parents are independent.

    Computes 1 - (1-leak) * prod(1 - s_i * m_i); exact whenever the parents are
    mutually independent, and exact in the leak regardless of dependence.
    """
    if len(strengths) != len(marginals):
        raise ValueError("strengths and marginals must have equal length")
    survival = 1.0 - leak
    for s, m in zip(strengths, marginals):
        survival *= 1.0 - s * m
    return 1.0 - survival


def pillar_mc_specs(manifest: ZtManifest) -> dict[str, McSpec]:
    """Monte Carlo propagation specs for the four capability pillars.

    Parent marginals come from the measure nodes' Beta priors and strengths
    from the pillar links' Beta priors, so the propagated summaries can be
    compared against the published prior-predictive table.
    """
    specs: dict[str, McSpec] = {}
    for pillar in ("DataPillar", "IdentityPillar", "DevicePillar",
                   "ApplicationPillar"):
        decl = manifest.node(pillar)
        assert decl.leak is not None and decl.leak.prior is not None
        parents = []
        for link in manifest.links_for(pillar):
            measure = manifest.node(link.parent)
            if measure.prior is None or link.prior is None:
                raise SchemaError(
                    f"pillar link {pillar} <- {link.parent} lacks Beta priors")
            parents.append(McParent(marginal=measure.prior, strength=link.prior))
        specs[pillar] = McSpec(parents=tuple(parents), leak=decl.leak.prior,
                               draws=manifest.draws, seed=manifest.seed)
    return specs


# --------------------------------------------------------------------------
# Calibration


@dataclass(frozen=True)
class FittedLeak:
    node: str
    value: float
    target: float | None
    residual: float | None
    note: str = ""


@dataclass(frozen=True)
class ReferenceOutcome:
    id: str
    node: str
    published_value: float
    computed: float
    deviation: float
    status: str
    source: str = ""
    calibrates: str | None = None


@dataclass(frozen=True)
class CalibrationReport:
    entries: tuple[ReferenceOutcome, ...]
    fitted_leaks: tuple[FittedLeak, ...]
    ztc_bases: Mapping[str, float]

    def entry(self, ref_id: str) -> ReferenceOutcome:
        for entry in self.entries:
            if entry.id == ref_id:
                return entry
        raise KeyError(ref_id)

    def unreconciled(self) -> tuple[ReferenceOutcome, ...]:
        return tuple(e for e in self.entries if e.status == STATUS_UNRECONCILED)

    def to_document(self) -> dict[str, Any]:
        return {
            "schema": "ztrisk.calibration/1",
            "entries": [
                {"id": e.id, "node": e.node, "published_value": e.published_value,
                 "computed": e.computed, "deviation": e.deviation,
                 "status": e.status, "source": e.source,
                 "calibrates": e.calibrates}
                for e in self.entries],
            "fitted_leaks": [
                {"node": f.node, "value": f.value, "target": f.target,
                 "residual": f.residual, "note": f.note}
                for f in self.fitted_leaks],
            "ztc_bases": dict(self.ztc_bases),
        }


@dataclass(frozen=True)
class CalibrationResult:
    report: CalibrationReport
    manifest: ZtManifest  # leaks pinned to their fitted values
    network: Network

    def to_document(self) -> dict[str, Any]:
        return self.report.to_document()


def _bisect_leak(m0: float, target: float) -> float:
    """Solve 1 - (1-l)(1-m0) = target for l in [0, 1] by bisection.

    The marginal of a noisy-or node is linear and increasing in its own leak,
    so bisection on [0, 1] converges unconditionally; callers check
    feasibility (m0 <= target <= 1) first.
    """
    lo, hi = 0.0, 1.0
    while hi - lo > CALIBRATION_TOL:
        mid = (lo + hi) / 2.0
        if 1.0 - (1.0 - mid) * (1.0 - m0) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def calibrate(manifest: ZtManifest, net: Network | None = None) -> CalibrationResult:
    """Fit every calibrated leak against its target, then score all references.

    Nodes are fitted in topological order so each fit sees its upstream nodes
    already at their calibrated values. Targets that no leak value can reach
    are reported as unreconciled with the achievable extreme recorded.
    """
    if net is None:
        net = build_ztnetwork(manifest)
    calibrated = set(manifest.calibrated_nodes())
    fitted: dict[str, float] = {}
    fit_rows: list[FittedLeak] = []
    infeasible: set[str] = set()

    for nid in net.order:
        if nid not in calibrated:
            continue
        decl = manifest.node(nid)
        assert decl.leak is not None
        if decl.leak.target is None:
            fitted[nid] = 0.0
            fit_rows.append(FittedLeak(node=nid, value=0.0, target=None,
                                       residual=None,
                                       note="no published target; left at zero"))
            continue
        target = decl.leak.target
        zeroed = build_ztnetwork(manifest, {**fitted, nid: 0.0})
        m0 = posterior_marginals(zeroed, EMPTY_EVIDENCE, [nid])[nid]
        if target < m0 - CALIBRATION_TOL:
            # The leak only adds probability; the floor is already too high.
            fitted[nid] = 0.0
            infeasible.add(nid)
            fit_rows.append(FittedLeak(
                node=nid, value=0.0, target=target, residual=m0 - target,
                note=f"target below achievable floor {m0:.6f}"))
            continue
        leak = _bisect_leak(m0, target)
        fitted[nid] = leak
        achieved = 1.0 - (1.0 - leak) * (1.0 - m0)
        fit_rows.append(FittedLeak(node=nid, value=leak, target=target,
                                   residual=achieved - target))

    final_net = build_ztnetwork(manifest, fitted)
    query = sorted({ref.node for ref in manifest.reference_values}
                   | {"ZTC1", "ZTC2", "ZTC3", "ZTC4"} | set(fitted))
    computed = posterior_marginals(final_net, EMPTY_EVIDENCE, query)

    for row in fit_rows:
        if row.target is not None and row.node not in infeasible:
            achieved = computed[row.node]
            if abs(achieved - row.target) > REPRODUCE_TOL:
                raise RuntimeError(
                    f"calibrated node {row.node} re-infers to {achieved:.6f}, "
                    f"not its target {row.target:.6f}")

    entries: list[ReferenceOutcome] = []
    for ref in manifest.reference_values:
        value = computed[ref.node]
        deviation = value - ref.published_value
        if ref.calibrates is not None:
            ok = ref.calibrates not in infeasible
            status = STATUS_CALIBRATED if ok else STATUS_UNRECONCILED
        else:
            ok = abs(deviation) <= ref.tolerance
            status = STATUS_REPRODUCED if ok else STATUS_UNRECONCILED
        entries.append(ReferenceOutcome(
            id=ref.id, node=ref.node, published_value=ref.published_value,
            computed=value, deviation=deviation, status=status,
            source=ref.source, calibrates=ref.calibrates))

    report = CalibrationReport(
        entries=tuple(entries), fitted_leaks=tuple(fit_rows),
        ztc_bases={z: computed[z] for z in ("ZTC1", "ZTC2", "ZTC3", "ZTC4")})
    out_manifest = manifest
    for nid, value in fitted.items():
        out_manifest = out_manifest.with_leak(nid, value)
    return CalibrationResult(report=report, manifest=out_manifest,
                             network=final_net)


def calibrated_network(manifest: ZtManifest | None = None) -> CalibrationResult:
    """Convenience: load (or accept) a manifest and return the fitted model."""
    if manifest is None:
        manifest = load_default_manifest()
    return calibrate(manifest)


# --------------------------------------------------------------------------
# Scenario suites


@dataclass(frozen=True)
class SuiteCell:
    node: str
    value: float
    arrow: str | None
    reference: ReferenceCell | None

    @property
    def within_reference(self) -> bool | None:
        if self.reference is None:
            return None
        return abs(self.value - self.reference.value) <= REFERENCE_BADGE_TOL


@dataclass(frozen=True)
class SuiteRow:
    row: int
    label: str
    evidence: tuple[str, ...]
    cells: tuple[SuiteCell, ...]

    def cell(self, node: str) -> SuiteCell:
        for cell in self.cells:
            if cell.node == node:
                return cell
        raise KeyError(node)


@dataclass(frozen=True)
class ScenarioSuite:
    preset_id: str
    kind: str
    watch: tuple[str, ...]
    rows: tuple[SuiteRow, ...]

    def row(self, index: int) -> SuiteRow:
        for row in self.rows:
            if row.row == index:
                return row
        raise KeyError(index)

    def to_document(self) -> dict[str, Any]:
        return {
            "schema": "ztrisk.scenario/1",
            "preset": self.preset_id,
            "kind": self.kind,
            "watch": list(self.watch),
            "rows": [
                {"row": r.row, "label": r.label, "evidence": list(r.evidence),
                 "cells": [
                     {"node": c.node, "value": c.value, "arrow": c.arrow,
                      "reference": (None if c.reference is None else
                                    {"value": c.reference.value,
                                     "arrow": c.reference.arrow}),
                      "within_reference": c.within_reference}
                     for c in r.cells]}
                for r in self.rows],
        }


def _arrow(value: float, previous: float | None) -> str | None:
    if previous is None:
        return None
    if value - previous > _DIRECTION_TOL:
        return "up"
    if value - previous < -_DIRECTION_TOL:
        return "down"
    return None


_STATE_NAMES = {"active": ACTIVE, "inactive": INACTIVE}


def evidence_from_document(doc: Mapping[str, Any],
                           known: Sequence[str] | None = None) -> EvidenceSet:
    """Parse {node: "active" | "inactive" | bool} into hard evidence.

    State indices are deliberately not accepted: active is state 0 here, which
    is the opposite of what a casual 0/1 encoding would suggest.
    """
    if not isinstance(doc, Mapping):
        raise ValueError(f"evidence must be an object, got {type(doc).__name__}")
    known_ids = None if known is None else set(known)
    hard: dict[str, int] = {}
    for nid, state in doc.items():
        if known_ids is not None and nid not in known_ids:
            raise UnknownNode(f"evidence references unknown node {nid!r}")
        if isinstance(state, bool):
            hard[nid] = ACTIVE if state else INACTIVE
        elif isinstance(state, str) and state.lower() in _STATE_NAMES:
            hard[nid] = _STATE_NAMES[state.lower()]
        else:
            raise ValueError(
                f"state for {nid!r} must be 'active', 'inactive', or a bool, got {state!r}")
    return EvidenceSet(hard=hard)


def evidence_to_document(evidence: EvidenceSet) -> dict[str, str]:
    """Hard evidence as {node: "active" | "inactive"}, for echoing in output."""
    return {nid: ("active" if state == ACTIVE else "inactive")
            for nid, state in evidence.hard.items()}


def marginals_to_document(evidence: EvidenceSet,
                          marginals: Mapping[str, float]) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "schema": "ztrisk.marginals/1",
        "evidence": evidence_to_document(evidence),
        "marginals": dict(marginals),
    }
    if evidence.virtual:
        doc["virtual"] = {nid: list(pair) for nid, pair in evidence.virtual.items()}
    return doc


def mpe_to_document(evidence: EvidenceSet, result: MpeResult) -> dict[str, Any]:
    return {
        "schema": "ztrisk.mpe/1",
        "evidence": evidence_to_document(evidence),
        "assignment": {nid: ("active" if state == ACTIVE else "inactive")
                       for nid, state in result.assignment.items()},
        "p_mpe_and_e": result.p_mpe_and_e,
        "p_e": result.p_e,
        "p_mpe_given_e": result.p_mpe_given_e,
    }


def manifest_version(doc: Mapping[str, Any]) -> str:
    """Deterministic 12-hex-digit digest of a manifest document."""
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def run_scenario_suite(net: Network, preset: Preset,
                       max_workers: int | None = None) -> ScenarioSuite:
    """Evaluate a forward or backward preset into a rendered-ready suite.

    Forward rows are posterior marginals under each row's hard evidence, with
    arrows marking the change from the previous row. A row with no evidence is
    the base row. Backward presets evaluate one virtual-evidence row against
    the base posture. Rows are independent queries and run concurrently.
    """
    if preset.kind == "mpe":
        raise ValueError("mpe presets run through run_mpe_preset")
    watch = preset.watch
    if preset.kind == "backward":
        plan: list[tuple[int, str, tuple[str, ...], EvidenceSet,
                         Mapping[str, ReferenceCell]]] = [
            (0, "Base", (), EMPTY_EVIDENCE, {}),
            (1, "Backward", tuple(sorted(preset.virtual)),
             EvidenceSet(virtual=preset.virtual), preset.reference),
        ]
    else:
        plan = [(row.row, row.label, row.evidence,
                 EvidenceSet(hard={nid: ACTIVE for nid in row.evidence}),
                 row.reference)
                for row in preset.rows]

    def query(ev: EvidenceSet) -> dict[str, float]:
        return posterior_marginals(net, ev, watch)

    with ThreadPoolExecutor(max_workers=max_workers or len(plan)) as pool:
        results = list(pool.map(query, [item[3] for item in plan]))

    rows: list[SuiteRow] = []
    previous: dict[str, float] | None = None
    for (row_idx, label, evidence, _ev, reference), values in zip(plan, results):
        cells = tuple(
            SuiteCell(node=nid, value=values[nid],
                      arrow=_arrow(values[nid],
                                   None if previous is None else previous[nid]),
                      reference=reference.get(nid))
            for nid in watch)
        rows.append(SuiteRow(row=row_idx, label=label, evidence=evidence,
                             cells=cells))
        previous = values
    return ScenarioSuite(preset_id=preset.id, kind=preset.kind, watch=watch,
                         rows=tuple(rows))


def run_mpe_preset(net: Network, preset: Preset) -> MpeResult:
    if preset.kind != "mpe":
        raise ValueError(f"preset {preset.id!r} is not an mpe preset")
    return mpe(net, EvidenceSet(hard={nid: ACTIVE for nid in preset.evidence}))


_ARROW_MARK = {"up": "↑", "down": "↓", None: ""}


def render_suite_table(suite: ScenarioSuite, sep: str = "\t") -> str:
    """Delimited text table, columns in the preset's published order.

    Cells show the computed percentage with a direction mark versus the row
    above; when a published reference exists it follows after a slash.
    """
    lines = [sep.join(["scenario", *suite.watch])]
    for row in suite.rows:
        cells = [row.label]
        for cell in row.cells:
            text = f"{100.0 * cell.value:.0f}{_ARROW_MARK[cell.arrow]}"
            if cell.reference is not None:
                ref = cell.reference
                text += f"/{100.0 * ref.value:.0f}{_ARROW_MARK[ref.arrow]}"
            cells.append(text)
        lines.append(sep.join(cells))
    return "\n".join(lines)


def render_calibration_table(report: CalibrationReport, sep: str = "\t") -> str:
    lines = [sep.join(["reference", "node", "published", "computed", "deviation",
                       "status"])]
    for e in report.entries:
        lines.append(sep.join([
            e.id, e.node, f"{e.published_value:.4f}", f"{e.computed:.4f}",
            f"{e.deviation:+.4f}", e.status]))
    lines.append("")
    lines.append(sep.join(["leak", "value", "target", "residual", "note"]))
    for f in report.fitted_leaks:
        lines.append(sep.join([
            f.node, f"{f.value:.6f}",
            "-" if f.target is None else f"{f.target:.4f}",
            "-" if f.residual is None else f"{f.residual:+.2e}", f.note]))
    return "\n".join(lines)
