"""Exact inference on boolean networks: marginals, evidence probability, MPE.

All algorithms are sum-product or max-product variable elimination over table
factors. The elimination order is chosen by the min-fill heuristic on the
moralized graph, with ties broken by node id, so results and MPE tie-breaking
are fully deterministic.

Uncertain observations enter as likelihood weight pairs per node (Pearl's
virtual-evidence construction: a dummy observed child whose CPT rows equal the
weights, which after reduction is exactly a weight factor over the node).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .network import ACTIVE, INACTIVE, Network, UnknownNode

UP = "↑"
DOWN = "↓"
FLAT = "="

_DIRECTION_TOL = 1e-9


class InconsistentEvidence(ValueError):
    """The supplied evidence has probability zero under the model."""


@dataclass(frozen=True)
class EvidenceSet:
    """Hard clamps (node -> state index) plus virtual likelihood weights.

    Virtual weights are (weight for active, weight for inactive); they need not
    sum to one, only be nonnegative and not both zero. Only their ratio matters
    for posteriors. Internally each pair is scaled so its larger weight is 1,
    which makes the pair a valid CPT row for the implied dummy observed child
    and keeps p(e) a true probability.
    """

    hard: Mapping[str, int] = field(default_factory=dict)
    virtual: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        hard = dict(self.hard)
        virtual = {nid: (float(w[0]), float(w[1])) for nid, w in self.virtual.items()}
        object.__setattr__(self, "hard", hard)
        object.__setattr__(self, "virtual", virtual)
        for nid, state in hard.items():
            if state not in (ACTIVE, INACTIVE):
                raise ValueError(f"evidence state for {nid!r} must be 0 or 1, got {state!r}")
        overlap = sorted(set(hard) & set(virtual))
        if overlap:
            raise ValueError(f"nodes in both hard and virtual evidence: {overlap}")
        for nid, (w_active, w_inactive) in virtual.items():
            if w_active < 0.0 or w_inactive < 0.0:
                raise ValueError(f"negative likelihood weight for {nid!r}")
            if w_active == 0.0 and w_inactive == 0.0:
                raise ValueError(f"both likelihood weights zero for {nid!r}")

    @property
    def is_empty(self) -> bool:
        return not self.hard and not self.virtual

    def nodes(self) -> set[str]:
        return set(self.hard) | set(self.virtual)


EMPTY_EVIDENCE = EvidenceSet()


@dataclass(frozen=True)
class MpeResult:
    assignment: Mapping[str, int]
    p_mpe_and_e: float
    p_e: float
    p_mpe_given_e: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", dict(self.assignment))
        for name in ("p_mpe_and_e", "p_e", "p_mpe_given_e"):
            value = getattr(self, name)
            if not (-1e-12 <= value <= 1.0 + 1e-12):
                raise ValueError(f"{name} out of [0,1]: {value!r}")
        if abs(self.p_mpe_given_e * self.p_e - self.p_mpe_and_e) > 1e-10:
            raise ValueError("p_mpe_given_e inconsistent with p_mpe_and_e / p_e")


@dataclass(frozen=True)
class ScenarioRow:
    node: str
    base: float
    posterior: float
    delta: float
    direction: str  # UP, DOWN, or FLAT


@dataclass(frozen=True)
class _Factor:
    vars: tuple[str, ...]
    values: np.ndarray

    def reduce(self, node: str, state: int) -> "_Factor":
        if node not in self.vars:
            return self
        axis = self.vars.index(node)
        vals = np.take(self.values, state, axis=axis)
        return _Factor(tuple(v for v in self.vars if v != node), vals)


def _aligned(f: _Factor, out_vars: tuple[str, ...]) -> np.ndarray:
    order = sorted(range(len(f.vars)), key=lambda i: out_vars.index(f.vars[i]))
    vals = np.transpose(f.values, order)
    shape = tuple(2 if v in f.vars else 1 for v in out_vars)
    return vals.reshape(shape)


def _product(factors: Sequence[_Factor]) -> _Factor:
    out_vars: tuple[str, ...] = ()
    for f in factors:
        out_vars += tuple(v for v in f.vars if v not in out_vars)
    vals = np.ones((2,) * len(out_vars))
    for f in factors:
        vals = vals * _aligned(f, out_vars)
    return _Factor(out_vars, vals)


def _sum_out(f: _Factor, node: str) -> _Factor:
    axis = f.vars.index(node)
    return _Factor(tuple(v for v in f.vars if v != node), f.values.sum(axis=axis))


def _max_out(f: _Factor, node: str) -> tuple["_Factor", np.ndarray]:
    axis = f.vars.index(node)
    reduced = _Factor(tuple(v for v in f.vars if v != node), f.values.max(axis=axis))
    # argmax returns the first maximizer, so state 0 (active) wins ties
    return reduced, f.values.argmax(axis=axis)


def _cpt_factor(net: Network, node_id: str) -> _Factor:
    parents = net.parents(node_id)
    cpd = net.node(node_id).cpd
    scope = parents + (node_id,)
    values = np.empty((2,) * len(scope))
    for combo in itertools.product((ACTIVE, INACTIVE), repeat=len(parents)):
        p = cpd.prob_active(combo)
        values[combo + (ACTIVE,)] = p
        values[combo + (INACTIVE,)] = 1.0 - p
    return _Factor(scope, values)


def _check_evidence(net: Network, ev: EvidenceSet) -> None:
    for nid in ev.nodes():
        if nid not in net:
            raise UnknownNode(f"evidence references unknown node {nid!r}")


def _evidence_factors(net: Network, ev: EvidenceSet) -> list[_Factor]:
    factors = [_cpt_factor(net, nid) for nid in net.order]
    for nid, weights in ev.virtual.items():
        scale = max(weights)
        scaled = np.asarray(weights, dtype=float) / scale
        factors.append(_Factor((nid,), scaled))
    for nid, state in ev.hard.items():
        factors = [f.reduce(nid, state) for f in factors]
    return factors


def _min_fill_order(factors: Sequence[_Factor], elim: set[str]) -> list[str]:
    neighbors: dict[str, set[str]] = {v: set() for v in elim}
    scopes = [set(f.vars) for f in factors]
    for scope in scopes:
        for v in scope:
            if v in neighbors:
                neighbors[v] |= scope - {v}

    order: list[str] = []
    remaining = set(elim)
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):
            nbrs = [n for n in neighbors[v] if n in remaining]
            fill = sum(
                1
                for a, b in itertools.combinations(nbrs, 2)
                if b not in neighbors[a]
            )
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        assert best is not None
        order.append(best)
        nbrs = [n for n in neighbors[best] if n in remaining]
        for a, b in itertools.combinations(nbrs, 2):
            neighbors[a].add(b)
            neighbors[b].add(a)
        remaining.discard(best)
    return order


def _eliminate_sum(factors: list[_Factor], elim: Iterable[str]) -> list[_Factor]:
    factors = list(factors)
    for v in _min_fill_order(factors, set(elim)):
        touching = [f for f in factors if v in f.vars]
        rest = [f for f in factors if v not in f.vars]
        if not touching:
            continue
        factors = rest + [_sum_out(_product(touching), v)]
    return factors


def _scalar_product(factors: Sequence[_Factor]) -> float:
    total = 1.0
    for f in factors:
        if f.vars:
            raise AssertionError(f"unexpected non-scalar factor over {f.vars}")
        total *= float(f.values)
    return total


def probability_of_evidence(net: Network, ev: EvidenceSet = EMPTY_EVIDENCE) -> float:
    """P(e) under the network; 1.0 for empty evidence."""
    _check_evidence(net, ev)
    factors = _evidence_factors(net, ev)
    elim = set(net.nodes) - set(ev.hard)
    remaining = _eliminate_sum(factors, elim)
    return _scalar_product(remaining)


def posterior_marginals(net: Network, ev: EvidenceSet = EMPTY_EVIDENCE,
                        query: Sequence[str] | None = None) -> dict[str, float]:
    """P(node active | evidence) for each query node (default: every node)."""
    _check_evidence(net, ev)
    if query is None:
        query_ids = list(net.order)
    else:
        query_ids = list(query)
        for nid in query_ids:
            if nid not in net:
                raise UnknownNode(f"query references unknown node {nid!r}")

    p_e = probability_of_evidence(net, ev)
    if p_e <= 0.0:
        raise InconsistentEvidence(f"evidence has probability {p_e}")

    base_factors = _evidence_factors(net, ev)
    out: dict[str, float] = {}
    for nid in query_ids:
        if nid in ev.hard:
            out[nid] = 1.0 if ev.hard[nid] == ACTIVE else 0.0
            continue
        elim = set(net.nodes) - set(ev.hard) - {nid}
        remaining = _eliminate_sum(base_factors, elim)
        joint = _product([f for f in remaining if f.vars])
        scalar = _scalar_product([f for f in remaining if not f.vars])
        values = joint.values * scalar
        total = float(values.sum())
        if total <= 0.0:
            raise InconsistentEvidence(f"evidence has probability {total}")
        out[nid] = float(values[ACTIVE]) / total
    return out


def mpe(net: Network, ev: EvidenceSet = EMPTY_EVIDENCE) -> MpeResult:
    """Most probable full assignment consistent with the evidence."""
    _check_evidence(net, ev)
    p_e = probability_of_evidence(net, ev)
    if p_e <= 0.0:
        raise InconsistentEvidence(f"evidence has probability {p_e}")

    factors = _evidence_factors(net, ev)
    elim = set(net.nodes) - set(ev.hard)
    traces: list[tuple[str, tuple[str, ...], np.ndarray]] = []
    for v in _min_fill_order(factors, elim):
        touching = [f for f in factors if v in f.vars]
        rest = [f for f in factors if v not in f.vars]
        product = _product(touching)
        reduced, argmax = _max_out(product, v)
        traces.append((v, reduced.vars, argmax))
        factors = rest + [reduced]

    p_mpe_and_e = _scalar_product(factors)

    assignment: dict[str, int] = dict(ev.hard)
    for v, scope, argmax in reversed(traces):
        idx = tuple(assignment[s] for s in scope)
        assignment[v] = int(argmax[idx])

    ordered = {nid: assignment[nid] for nid in net.order}
    return MpeResult(
        assignment=ordered,
        p_mpe_and_e=p_mpe_and_e,
        p_e=p_e,
        p_mpe_given_e=p_mpe_and_e / p_e,
    )


def forward_scenario(net: Network, ev: EvidenceSet,
                     watch: Sequence[str] | None = None) -> dict[str, ScenarioRow]:
    """Posteriors under `ev` for the watched nodes, with deltas vs no evidence."""
    base = posterior_marginals(net, EMPTY_EVIDENCE, watch)
    posterior = posterior_marginals(net, ev, watch)
    rows: dict[str, ScenarioRow] = {}
    for nid, value in posterior.items():
        delta = value - base[nid]
        if delta > _DIRECTION_TOL:
            direction = UP
        elif delta < -_DIRECTION_TOL:
            direction = DOWN
        else:
            direction = FLAT
        rows[nid] = ScenarioRow(
            node=nid, base=base[nid], posterior=value, delta=delta, direction=direction
        )
    return rows
