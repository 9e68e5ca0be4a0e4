import numpy as np
import pytest

from ztrisk.inference import (
    DOWN,
    EMPTY_EVIDENCE,
    FLAT,
    UP,
    EvidenceSet,
    InconsistentEvidence,
    forward_scenario,
    mpe,
    posterior_marginals,
    probability_of_evidence,
)
from ztrisk.network import (
    ACTIVE,
    INACTIVE,
    ExplicitTable,
    Negation,
    NodeSpec,
    NoisyOr,
    NoisyOrEntry,
    UnknownNode,
    build_network,
)

from _oracles import (
    enumerate_marginals,
    enumerate_mpe_value,
    enumerate_p_e,
    random_evidence,
    random_network,
)


def _root(nid, p):
    return NodeSpec(id=nid, cpd=ExplicitTable(parents=(), rows=(p,)))


@pytest.fixture(scope="module")
def diamond():
    """A -> B, A -> C, {B, C} -> D with mixed CPD kinds."""
    return build_network(
        [
            _root("A", 0.3),
            NodeSpec(id="B", cpd=NoisyOr(entries=(NoisyOrEntry("A", 0.8),), leak=0.1)),
            NodeSpec(id="C", cpd=ExplicitTable(parents=("A",), rows=(0.9, 0.2))),
            NodeSpec(
                id="D",
                cpd=NoisyOr(
                    entries=(
                        NoisyOrEntry("B", 0.7),
                        NoisyOrEntry("C", 0.5, polarity="inhibitor"),
                    ),
                    leak=0.05,
                ),
            ),
        ]
    )


@pytest.fixture(scope="module")
def vee():
    """Independent roots B (enabler) and C (inhibitor) feeding D.

    No back-door paths, so clamping a parent moves D only through its own link
    and the per-parent monotonicity of the CPD carries over to the posterior.
    """
    return build_network(
        [
            _root("B", 0.4),
            _root("C", 0.5),
            NodeSpec(
                id="D",
                cpd=NoisyOr(
                    entries=(
                        NoisyOrEntry("B", 0.7),
                        NoisyOrEntry("C", 0.5, polarity="inhibitor"),
                    ),
                    leak=0.05,
                ),
            ),
        ]
    )


class TestEvidenceSet:
    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            EvidenceSet(hard={"A": ACTIVE}, virtual={"A": (0.2, 0.8)})

    def test_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            EvidenceSet(virtual={"A": (0.0, 0.0)})

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            EvidenceSet(virtual={"A": (-0.1, 0.8)})

    def test_bad_state_rejected(self):
        with pytest.raises(ValueError):
            EvidenceSet(hard={"A": 2})

    def test_weights_need_not_normalize(self):
        ev = EvidenceSet(virtual={"A": (3.0, 1.0)})
        assert ev.virtual["A"] == (3.0, 1.0)


class TestProbabilityOfEvidence:
    def test_empty_evidence_is_one(self, diamond):
        assert probability_of_evidence(diamond, EMPTY_EVIDENCE) == pytest.approx(1.0, abs=1e-12)

    def test_single_root_active_is_its_prior(self):
        net = build_network([_root("A", 0.3)])
        p = probability_of_evidence(net, EvidenceSet(hard={"A": ACTIVE}))
        assert p == pytest.approx(0.3, abs=1e-12)

    def test_matches_enumeration_on_random_nets(self):
        rng = np.random.default_rng(42)
        for _ in range(30):
            net = random_network(rng, 10)
            hard, virtual = random_evidence(rng, net)
            want = enumerate_p_e(net, hard, virtual)
            got = probability_of_evidence(net, EvidenceSet(hard=hard, virtual=virtual))
            assert got == pytest.approx(want, abs=1e-10)

    def test_unknown_evidence_node(self, diamond):
        with pytest.raises(UnknownNode):
            probability_of_evidence(diamond, EvidenceSet(hard={"ghost": ACTIVE}))


class TestPosteriorMarginals:
    def test_matches_enumeration_200_random_nets(self):
        rng = np.random.default_rng(2024)
        sizes = list(rng.integers(2, 13, size=190)) + [14, 14, 15, 15, 16, 16, 16, 16, 16, 16]
        for size in sizes:
            net = random_network(rng, int(size))
            hard, virtual = random_evidence(rng, net)
            if enumerate_p_e(net, hard, virtual) <= 0.0:
                continue
            want = enumerate_marginals(net, hard, virtual)
            got = posterior_marginals(net, EvidenceSet(hard=hard, virtual=virtual))
            for nid in net.order:
                assert got[nid] == pytest.approx(want[nid], abs=1e-10), nid

    def test_posterior_pair_sums_to_one(self, diamond):
        ev = EvidenceSet(hard={"D": ACTIVE})
        marginals = posterior_marginals(diamond, ev)
        for nid in ("A", "B", "C"):
            # complementary state is 1 - P(active) by construction; the invariant
            # worth checking is that the reported value is a probability
            assert 0.0 <= marginals[nid] <= 1.0
        p_active = marginals["B"]
        flipped = 1.0 - p_active
        assert p_active + flipped == pytest.approx(1.0, abs=1e-12)

    def test_hard_evidence_pins_marginal(self, diamond):
        ev = EvidenceSet(hard={"B": INACTIVE})
        marginals = posterior_marginals(diamond, ev)
        assert marginals["B"] == 0.0

    def test_query_subset(self, diamond):
        out = posterior_marginals(diamond, EMPTY_EVIDENCE, query=["D", "A"])
        assert list(out) == ["D", "A"]

    def test_inconsistent_evidence_raises(self):
        net = build_network(
            [
                _root("A", 0.5),
                NodeSpec(id="NotA", cpd=Negation(parent="A")),
            ]
        )
        ev = EvidenceSet(hard={"A": ACTIVE, "NotA": ACTIVE})
        with pytest.raises(InconsistentEvidence):
            posterior_marginals(net, ev)

    def test_identity_virtual_evidence_changes_nothing(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            net = random_network(rng, 8)
            nid = net.order[int(rng.integers(0, 8))]
            base = posterior_marginals(net, EMPTY_EVIDENCE)
            with_identity = posterior_marginals(net, EvidenceSet(virtual={nid: (1.0, 1.0)}))
            for k in net.order:
                assert with_identity[k] == pytest.approx(base[k], abs=1e-12)

    def test_virtual_evidence_matches_dummy_child_construction(self):
        """Likelihood weights (w0, w1) must equal observing a dummy child whose
        CPT rows are those weights."""
        rng = np.random.default_rng(17)
        for _ in range(10):
            net = random_network(rng, 6)
            target = net.order[int(rng.integers(0, 6))]
            w0, w1 = float(rng.uniform(0.05, 0.95)), float(rng.uniform(0.05, 0.95))

            specs = [net.node(nid) for nid in net.order]
            specs.append(
                NodeSpec(
                    id="dummy_obs",
                    cpd=ExplicitTable(parents=(target,), rows=(w0, w1)),
                )
            )
            augmented = build_network(specs)
            via_dummy = posterior_marginals(
                augmented, EvidenceSet(hard={"dummy_obs": ACTIVE}), query=list(net.order)
            )
            via_virtual = posterior_marginals(net, EvidenceSet(virtual={target: (w0, w1)}))
            for nid in net.order:
                assert via_virtual[nid] == pytest.approx(via_dummy[nid], abs=1e-10)

    def test_enabler_evidence_monotone_on_noisy_or_child(self, vee):
        on = posterior_marginals(vee, EvidenceSet(hard={"B": ACTIVE}), query=["D"])["D"]
        off = posterior_marginals(vee, EvidenceSet(hard={"B": INACTIVE}), query=["D"])["D"]
        assert on >= off

    def test_inhibitor_evidence_monotone_on_noisy_or_child(self, vee):
        on = posterior_marginals(vee, EvidenceSet(hard={"C": ACTIVE}), query=["D"])["D"]
        off = posterior_marginals(vee, EvidenceSet(hard={"C": INACTIVE}), query=["D"])["D"]
        assert on <= off

    def test_negated_source_evidence_monotone(self):
        """Activating the source of a negated barrier lowers the NoisyOR child
        that consumes the negation as an enabler."""
        net = build_network(
            [
                _root("B", 0.4),
                NodeSpec(id="NotB", cpd=Negation(parent="B")),
                NodeSpec(
                    id="Y", cpd=NoisyOr(entries=(NoisyOrEntry("NotB", 0.6),), leak=0.1)
                ),
            ]
        )
        on = posterior_marginals(net, EvidenceSet(hard={"B": ACTIVE}), query=["Y"])["Y"]
        off = posterior_marginals(net, EvidenceSet(hard={"B": INACTIVE}), query=["Y"])["Y"]
        assert on <= off


class TestMpe:
    def test_single_node_prior(self):
        net = build_network([_root("A", 0.7)])
        result = mpe(net)
        assert result.assignment == {"A": ACTIVE}
        assert result.p_mpe_and_e == pytest.approx(0.7, abs=1e-12)
        assert result.p_e == pytest.approx(1.0, abs=1e-12)
        assert result.p_mpe_given_e == pytest.approx(0.7, abs=1e-12)

    def test_matches_exhaustive_argmax_100_nets(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            net = random_network(rng, int(rng.integers(2, 17)))
            hard, virtual = random_evidence(rng, net)
            if enumerate_p_e(net, hard, virtual) <= 0.0:
                continue
            want = enumerate_mpe_value(net, hard, virtual)
            got = mpe(net, EvidenceSet(hard=hard, virtual=virtual))
            assert got.p_mpe_and_e == pytest.approx(want, rel=1e-9, abs=1e-12)

    def test_assignment_consistent_with_evidence(self, diamond):
        ev = EvidenceSet(hard={"D": ACTIVE, "A": INACTIVE})
        result = mpe(diamond, ev)
        assert result.assignment["D"] == ACTIVE
        assert result.assignment["A"] == INACTIVE
        assert set(result.assignment) == set(diamond.order)

    def test_result_quantities_consistent(self, diamond):
        ev = EvidenceSet(hard={"D": ACTIVE})
        result = mpe(diamond, ev)
        assert result.p_mpe_given_e == pytest.approx(
            result.p_mpe_and_e / result.p_e, abs=1e-10
        )
        assert 0.0 <= result.p_mpe_and_e <= result.p_e <= 1.0

    def test_clamping_mpe_state_preserves_value(self):
        """Clamping any single node to its MPE state and re-running never lowers
        the achievable joint value."""
        rng = np.random.default_rng(123)
        for _ in range(20):
            net = random_network(rng, 8)
            result = mpe(net)
            for nid in net.order:
                clamped = mpe(net, EvidenceSet(hard={nid: result.assignment[nid]}))
                assert clamped.p_mpe_and_e == pytest.approx(
                    result.p_mpe_and_e, rel=1e-9, abs=1e-12
                )

    def test_tie_prefers_active_state(self):
        net = build_network([_root("A", 0.5)])
        assert mpe(net).assignment["A"] == ACTIVE

    def test_inconsistent_evidence(self):
        net = build_network(
            [_root("A", 0.5), NodeSpec(id="NotA", cpd=Negation(parent="A"))]
        )
        with pytest.raises(InconsistentEvidence):
            mpe(net, EvidenceSet(hard={"A": ACTIVE, "NotA": ACTIVE}))

    def test_virtual_evidence_shifts_mpe(self):
        net = build_network([_root("A", 0.45)])
        assert mpe(net).assignment["A"] == INACTIVE
        tipped = mpe(net, EvidenceSet(virtual={"A": (0.9, 0.1)}))
        assert tipped.assignment["A"] == ACTIVE


class TestForwardScenario:
    def test_empty_evidence_all_flat(self, diamond):
        rows = forward_scenario(diamond, EMPTY_EVIDENCE)
        for row in rows.values():
            assert row.delta == pytest.approx(0.0, abs=1e-12)
            assert row.direction == FLAT

    def test_directions_and_deltas(self, diamond):
        rows = forward_scenario(diamond, EvidenceSet(hard={"A": ACTIVE}), watch=["B", "D"])
        assert set(rows) == {"B", "D"}
        assert rows["B"].direction == UP
        assert rows["B"].delta == pytest.approx(
            rows["B"].posterior - rows["B"].base, abs=1e-15
        )

    def test_down_direction(self, vee):
        rows = forward_scenario(vee, EvidenceSet(hard={"C": ACTIVE}), watch=["D"])
        assert rows["D"].direction == DOWN

    def test_wraps_posterior_marginals(self, diamond):
        ev = EvidenceSet(hard={"B": ACTIVE})
        rows = forward_scenario(diamond, ev)
        direct = posterior_marginals(diamond, ev)
        for nid, row in rows.items():
            assert row.posterior == pytest.approx(direct[nid], abs=1e-12)
