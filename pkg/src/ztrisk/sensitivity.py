"""Tornado analyses: rank how strongly sources move a target posterior.

Two modes. Evidence mode clamps each candidate node to inactive and active in
turn and reads off the target posterior; it needs nothing beyond the network.
Parameter mode perturbs declared parameters (link strengths, leaks, or root
marginals) by a relative factor and rebuilds the model for each endpoint, so
it works from the manifest.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from .inference import EMPTY_EVIDENCE, EvidenceSet, posterior_marginals
from .network import ACTIVE, INACTIVE, Network
from .ztmodel import ZtManifest, build_ztnetwork


class TargetInCandidates(ValueError):
    """The tornado target may not also be a candidate source."""


class PerturbationOutOfRange(ValueError):
    """Relative perturbation must satisfy 0 <= r < 1."""


@dataclass(frozen=True)
class TornadoBar:
    source: str
    low: float
    high: float

    def __post_init__(self) -> None:
        for name, value in (("low", self.low), ("high", self.high)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def span(self) -> float:
        return abs(self.high - self.low)


def _rank(bars: Sequence[TornadoBar]) -> tuple[TornadoBar, ...]:
    return tuple(sorted(bars, key=lambda b: (-b.span, b.source)))


def evidence_tornado(net: Network, target: str,
                     candidates: Sequence[str],
                     evidence: EvidenceSet = EMPTY_EVIDENCE,
                     target_state: int = ACTIVE,
                     max_workers: int | None = None) -> tuple[TornadoBar, ...]:
    """One bar per candidate: target posterior with it clamped off, then on.

    Any ambient evidence applies to both endpoints. Bars come back sorted by
    descending span, ties broken by source id.
    """
    candidates = list(candidates)
    if target in candidates:
        raise TargetInCandidates(f"target {target!r} is among the candidates")
    clamped = [nid for nid in candidates if nid in evidence.nodes()]
    if clamped:
        raise ValueError(f"candidates already under evidence: {sorted(clamped)}")
    if target_state not in (ACTIVE, INACTIVE):
        raise ValueError(f"target_state must be 0 or 1, got {target_state!r}")

    def endpoint(candidate: str, state: int) -> float:
        ev = EvidenceSet(hard={**evidence.hard, candidate: state},
                         virtual=evidence.virtual)
        p_active = posterior_marginals(net, ev, [target])[target]
        return p_active if target_state == ACTIVE else 1.0 - p_active

    jobs = [(nid, state) for nid in candidates for state in (INACTIVE, ACTIVE)]
    with ThreadPoolExecutor(max_workers=max_workers or max(len(jobs), 1)) as pool:
        values = list(pool.map(lambda job: endpoint(*job), jobs))
    bars = []
    for i, nid in enumerate(candidates):
        low, high = values[2 * i], values[2 * i + 1]
        bars.append(TornadoBar(source=nid, low=low, high=high))
    return _rank(bars)


@dataclass(frozen=True)
class ParameterRef:
    """Names one perturbable number in the manifest.

    kind 'strength' addresses the link child <- parent, 'leak' a noisy-or
    node's leak, and 'marginal' a root node's prior probability.
    """

    kind: str
    node: str = ""
    child: str = ""
    parent: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("strength", "leak", "marginal"):
            raise ValueError(f"unknown parameter kind {self.kind!r}")
        if self.kind == "strength":
            if not (self.child and self.parent):
                raise ValueError("strength parameters need child and parent")
        elif not self.node:
            raise ValueError(f"{self.kind} parameters need a node")

    @property
    def label(self) -> str:
        if self.kind == "strength":
            return f"strength:{self.child}<-{self.parent}"
        return f"{self.kind}:{self.node}"


def _parameter_value(manifest: ZtManifest, ref: ParameterRef) -> float:
    if ref.kind == "strength":
        for link in manifest.links_for(ref.child):
            if link.parent == ref.parent:
                return link.median
        raise ValueError(f"manifest has no link {ref.child!r} <- {ref.parent!r}")
    decl = manifest.node(ref.node)
    if ref.kind == "marginal":
        if decl.marginal is None:
            raise ValueError(f"node {ref.node!r} has no marginal")
        return decl.marginal
    if decl.leak is None:
        raise ValueError(f"node {ref.node!r} has no leak")
    return decl.leak.point_value


def _with_parameter(manifest: ZtManifest, ref: ParameterRef,
                    value: float) -> ZtManifest:
    if ref.kind == "strength":
        return manifest.with_link_median(ref.child, ref.parent, value)
    if ref.kind == "marginal":
        return manifest.with_marginal(ref.node, value)
    return manifest.with_leak(ref.node, value)


def parameter_tornado(manifest: ZtManifest, target: str,
                      parameters: Sequence[ParameterRef], r: float,
                      evidence: EvidenceSet = EMPTY_EVIDENCE,
                      max_workers: int | None = None) -> tuple[TornadoBar, ...]:
    """One bar per parameter: target posterior at theta*(1-r) and min(1, theta*(1+r)).

    The network is rebuilt (leaks stay at their manifest values, so run this
    on a calibrated manifest) for each endpoint with everything else fixed.
    r = 0 is allowed and yields all-zero spans; r >= 1 would push parameters
    negative, so it is rejected.
    """
    if not 0.0 <= r < 1.0:
        raise PerturbationOutOfRange(f"relative perturbation must be in [0, 1), got {r!r}")

    def endpoint(ref: ParameterRef, factor: float) -> float:
        theta = _parameter_value(manifest, ref)
        perturbed = _with_parameter(manifest, ref, min(1.0, theta * factor))
        net = build_ztnetwork(perturbed)
        return posterior_marginals(net, evidence, [target])[target]

    jobs = [(ref, factor) for ref in parameters for factor in (1.0 - r, 1.0 + r)]
    with ThreadPoolExecutor(max_workers=max_workers or max(len(jobs), 1)) as pool:
        values = list(pool.map(lambda job: endpoint(*job), jobs))
    bars = []
    for i, ref in enumerate(parameters):
        bars.append(TornadoBar(source=ref.label, low=values[2 * i],
                               high=values[2 * i + 1]))
    return _rank(bars)


def bars_to_document(target: str, mode: str,
                     bars: Sequence[TornadoBar]) -> dict[str, Any]:
    """Chart-ready JSON: one object per bar, already ranked."""
    return {
        "schema": "ztrisk.tornado/1",
        "target": target,
        "mode": mode,
        "bars": [
            {"source": b.source, "low": b.low, "high": b.high, "span": b.span}
            for b in bars],
    }


def render_tornado_table(bars: Sequence[TornadoBar], sep: str = "\t") -> str:
    lines = [sep.join(["source", "low", "high", "span"])]
    for b in bars:
        lines.append(sep.join([b.source, f"{b.low:.6f}", f"{b.high:.6f}",
                               f"{b.span:.6f}"]))
    return "\n".join(lines)
