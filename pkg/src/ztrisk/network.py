"""Boolean Bayesian networks with explicit-table, noisy-or, and negation CPDs.

Every node has exactly two states; the first declared label is the active one and
maps to state index 0 throughout. The joint distribution factorizes as the product
of per-node conditionals P(node | parents).

A NoisyOr conditional with leak l, enabler strengths v_i and inhibitor strengths w_j
evaluates, for a given parent configuration, to

    P(active | parents) = (1 - (1 - l) * prod_{active enablers} (1 - v_i))
                          * prod_{active inhibitors} (1 - w_j)

so with no active parents the activation probability is exactly the leak, and each
active inhibitor scales the whole activation down by (1 - w_j).

ExplicitTable rows are ordered by binary counting over the parents in declared order
with the first parent as the most significant digit; digit 0 means the parent is in
its active state, so row 0 is the all-active configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

ACTIVE = 0
INACTIVE = 1

ENABLER = "enabler"
INHIBITOR = "inhibitor"


class CycleDetected(ValueError):
    """The declared edges contain a directed cycle; message names an edge on it."""


class UnknownNode(ValueError):
    """A node id was referenced that the network does not declare."""


class ArityMismatch(ValueError):
    """A CPD's parent list disagrees with the declared edges or table size."""


class MissingAssignment(ValueError):
    """A joint-probability query omitted one or more nodes."""


def _check_probability(p: float, context: str) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{context} must lie in [0, 1], got {p!r}")
    return p


@dataclass(frozen=True)
class ExplicitTable:
    """P(active | parent configuration), one row per configuration."""

    parents: tuple[str, ...]
    rows: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "rows", tuple(float(r) for r in self.rows))
        if len(set(self.parents)) != len(self.parents):
            raise ArityMismatch(f"duplicate parent in table over {self.parents}")
        expected = 1 << len(self.parents)
        if len(self.rows) != expected:
            raise ArityMismatch(
                f"table over {len(self.parents)} parents needs {expected} rows, "
                f"got {len(self.rows)}"
            )
        for r in self.rows:
            _check_probability(r, "table row")

    def row_index(self, parent_states: Sequence[int]) -> int:
        idx = 0
        for state in parent_states:
            idx = (idx << 1) | (state & 1)
        return idx

    def prob_active(self, parent_states: Sequence[int]) -> float:
        if len(parent_states) != len(self.parents):
            raise ArityMismatch(
                f"expected {len(self.parents)} parent states, got {len(parent_states)}"
            )
        return self.rows[self.row_index(parent_states)]


@dataclass(frozen=True)
class NoisyOrEntry:
    parent: str
    strength: float
    polarity: str = ENABLER

    def __post_init__(self) -> None:
        _check_probability(self.strength, "link strength")
        if self.polarity not in (ENABLER, INHIBITOR):
            raise ValueError(f"polarity must be enabler or inhibitor, got {self.polarity!r}")


@dataclass(frozen=True)
class NoisyOr:
    entries: tuple[NoisyOrEntry, ...]
    leak: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        _check_probability(self.leak, "leak")
        seen = set()
        for e in self.entries:
            if e.parent in seen:
                raise ArityMismatch(f"duplicate noisy-or parent {e.parent!r}")
            seen.add(e.parent)

    @property
    def parents(self) -> tuple[str, ...]:
        return tuple(e.parent for e in self.entries)

    def prob_active(self, parent_states: Sequence[int]) -> float:
        if len(parent_states) != len(self.entries):
            raise ArityMismatch(
                f"expected {len(self.entries)} parent states, got {len(parent_states)}"
            )
        survival = 1.0 - self.leak
        inhibition = 1.0
        for entry, state in zip(self.entries, parent_states):
            if state != ACTIVE:
                continue
            if entry.polarity == ENABLER:
                survival *= 1.0 - entry.strength
            else:
                inhibition *= 1.0 - entry.strength
        return (1.0 - survival) * inhibition


@dataclass(frozen=True)
class Negation:
    """Deterministic complement: active exactly when the parent is inactive."""

    parent: str

    @property
    def parents(self) -> tuple[str, ...]:
        return (self.parent,)

    def prob_active(self, parent_states: Sequence[int]) -> float:
        if len(parent_states) != 1:
            raise ArityMismatch(f"negation takes one parent state, got {len(parent_states)}")
        return 1.0 if parent_states[0] != ACTIVE else 0.0


Cpd = Union[ExplicitTable, NoisyOr, Negation]


def cpd_parents(cpd: Cpd) -> tuple[str, ...]:
    return tuple(cpd.parents)


def noisy_or_prob(cpd: NoisyOr, active_flags: Sequence[bool]) -> float:
    """Activation probability given per-entry active flags (True = parent active)."""
    return cpd.prob_active([ACTIVE if flag else INACTIVE for flag in active_flags])


@dataclass(frozen=True)
class NodeSpec:
    id: str
    cpd: Cpd
    states: tuple[str, str] = ("true", "false")
    group: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != 2 or self.states[0] == self.states[1]:
            raise ValueError(f"node {self.id!r} needs two distinct state labels")

    @property
    def active_state(self) -> str:
        return self.states[ACTIVE]

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise ValueError(
                f"node {self.id!r} has states {self.states}, not {label!r}"
            ) from None


@dataclass(frozen=True)
class Network:
    """Immutable DAG of NodeSpecs; construct via build_network."""

    nodes: Mapping[str, NodeSpec]
    edges: tuple[tuple[str, str], ...]
    order: tuple[str, ...] = field(repr=False)  # topological

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.nodes

    def node(self, node_id: str) -> NodeSpec:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def parents(self, node_id: str) -> tuple[str, ...]:
        return cpd_parents(self.node(node_id).cpd)

    def children(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return tuple(child for parent, child in self.edges if parent == node_id)


def build_network(specs: Sequence[NodeSpec],
                  edges: Sequence[tuple[str, str]] | None = None) -> Network:
    """Validate specs and edges into a Network.

    Edges default to those implied by the CPDs; when given they must agree exactly.
    Raises UnknownNode, ArityMismatch, or CycleDetected.
    """
    nodes: dict[str, NodeSpec] = {}
    for spec in specs:
        if spec.id in nodes:
            raise ArityMismatch(f"duplicate node id {spec.id!r}")
        nodes[spec.id] = spec

    implied = []
    for spec in specs:
        for parent in cpd_parents(spec.cpd):
            if parent not in nodes:
                raise UnknownNode(f"node {spec.id!r} references unknown parent {parent!r}")
            implied.append((parent, spec.id))

    if edges is None:
        edge_tuple = tuple(implied)
    else:
        edge_tuple = tuple((str(u), str(v)) for u, v in edges)
        for u, v in edge_tuple:
            if u not in nodes:
                raise UnknownNode(f"edge references unknown node {u!r}")
            if v not in nodes:
                raise UnknownNode(f"edge references unknown node {v!r}")
        if set(edge_tuple) != set(implied) or len(edge_tuple) != len(implied):
            missing = set(implied) - set(edge_tuple)
            extra = set(edge_tuple) - set(implied)
            raise ArityMismatch(
                f"edges disagree with CPD parent lists (missing {sorted(missing)}, "
                f"extra {sorted(extra)})"
            )

    # Kahn's algorithm; deterministic order via sorted ready set.
    incoming = {nid: set(cpd_parents(spec.cpd)) for nid, spec in nodes.items()}
    children_of: dict[str, list[str]] = {nid: [] for nid in nodes}
    for nid, spec in nodes.items():
        for parent in cpd_parents(spec.cpd):
            children_of[parent].append(nid)
    ready = sorted(nid for nid, deps in incoming.items() if not deps)
    order: list[str] = []
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        newly = []
        for child in children_of[nid]:
            incoming[child].discard(nid)
            if not incoming[child]:
                newly.append(child)
        if newly:
            ready = sorted(ready + newly)
    if len(order) != len(nodes):
        stuck = sorted(nid for nid, deps in incoming.items() if deps)
        culprit = stuck[0]
        back_parent = sorted(incoming[culprit])[0]
        raise CycleDetected(f"cycle through edge ({back_parent!r} -> {culprit!r})")

    return Network(nodes=nodes, edges=edge_tuple, order=tuple(order))


def cpd_prob(node: NodeSpec, parent_states: Sequence[int]) -> float:
    """Probability of the node's active state given parent state indices."""
    return node.cpd.prob_active(parent_states)


def joint_probability(net: Network, assignment: Mapping[str, int]) -> float:
    """Probability of a full assignment of state indices (0 active, 1 inactive)."""
    missing = [nid for nid in net.nodes if nid not in assignment]
    if missing:
        raise MissingAssignment(f"assignment missing nodes {missing}")
    for nid, state in assignment.items():
        if nid not in net.nodes:
            raise UnknownNode(f"unknown node {nid!r} in assignment")
        if isinstance(state, bool) or state not in (ACTIVE, INACTIVE):
            raise ValueError(
                f"state for {nid!r} must be the index {ACTIVE} or {INACTIVE}, "
                f"got {state!r}"
            )

    prob = 1.0
    for nid in net.order:
        parent_states = [assignment[p] for p in net.parents(nid)]
        p_active = cpd_prob(net.node(nid), parent_states)
        prob *= p_active if assignment[nid] == ACTIVE else 1.0 - p_active
    return prob
