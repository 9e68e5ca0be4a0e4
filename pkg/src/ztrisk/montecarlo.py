"""Monte Carlo propagation of Beta uncertainty through NoisyOR links.

Per draw, each parent contributes an independently sampled marginal p_i and link
strength v_i; the child draw is

    y = (1 - (1 - l) * prod_enablers (1 - v_i * p_i)) * prod_inhibitors (1 - w_j * p_j)

with l sampled from the leak prior (or held at a fixed value). Draw streams are
generated in fixed-size chunks keyed by (seed, role, parent index, chunk index), so
the raw arrays — and therefore every summary — are identical whether the chunks are
filled by one worker or many.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .priors import BetaParams

DEFAULT_DRAWS = 20_000
DEFAULT_SEED = 20_240_501
CHUNK = 4096

_ROLE_MARGINAL = 0
_ROLE_STRENGTH = 1
_ROLE_LEAK = 2

ENABLER = "enabler"
INHIBITOR = "inhibitor"


class EmptySamples(ValueError):
    """Summary requested over zero draws."""


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    median: float
    sd: float
    q2_5: float
    q97_5: float

    def __post_init__(self) -> None:
        if not (self.q2_5 <= self.median <= self.q97_5):
            raise ValueError("quantiles out of order")


@dataclass(frozen=True)
class McParent:
    """One parent of a propagated node: its marginal prior and link-strength prior."""

    marginal: BetaParams
    strength: BetaParams
    polarity: str = ENABLER

    def __post_init__(self) -> None:
        if self.polarity not in (ENABLER, INHIBITOR):
            raise ValueError(f"polarity must be enabler or inhibitor, got {self.polarity!r}")


@dataclass(frozen=True)
class McSpec:
    parents: tuple[McParent, ...]
    leak: BetaParams | float = 0.0
    draws: int = DEFAULT_DRAWS
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise ValueError(f"draws must be >= 1, got {self.draws}")
        if isinstance(self.leak, float) and not (0.0 <= self.leak <= 1.0):
            raise ValueError(f"fixed leak must lie in [0, 1], got {self.leak}")


def summarize_samples(samples) -> PosteriorSummary:
    """Population-SD summary with type-7 (linear interpolation) quantiles."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySamples("cannot summarize an empty sample array")
    q2_5, median, q97_5 = np.quantile(arr, [0.025, 0.5, 0.975])
    return PosteriorSummary(
        mean=float(arr.mean()),
        median=float(median),
        sd=float(arr.std()),
        q2_5=float(q2_5),
        q97_5=float(q97_5),
    )


def _chunk_rng(seed: int, role: int, index: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), role, index, chunk]))


def _beta_draws(seed: int, role: int, index: int, n: int, params: BetaParams,
                workers: int = 1) -> np.ndarray:
    """n Beta draws assembled from fixed-size chunks; identical for any worker count."""
    out = np.empty(n, dtype=float)
    spans = [(k, lo, min(lo + CHUNK, n)) for k, lo in enumerate(range(0, n, CHUNK))]

    def fill(span):
        k, lo, hi = span
        rng = _chunk_rng(seed, role, index, k)
        out[lo:hi] = rng.beta(params.alpha, params.beta, size=hi - lo)

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, spans))
    else:
        for span in spans:
            fill(span)
    return out


def propagate_samples(spec: McSpec, workers: int = 1) -> np.ndarray:
    """Raw child draws for a propagated NoisyOR node."""
    n = spec.draws
    if isinstance(spec.leak, BetaParams):
        leak = _beta_draws(spec.seed, _ROLE_LEAK, 0, n, spec.leak, workers)
    else:
        leak = np.full(n, float(spec.leak))

    survival = 1.0 - leak  # running prod of (1 - v_i * p_i) over enablers, seeded by (1 - l)
    inhibition = np.ones(n)
    for i, parent in enumerate(spec.parents):
        p = _beta_draws(spec.seed, _ROLE_MARGINAL, i, n, parent.marginal, workers)
        v = _beta_draws(spec.seed, _ROLE_STRENGTH, i, n, parent.strength, workers)
        if parent.polarity == ENABLER:
            survival *= 1.0 - v * p
        else:
            inhibition *= 1.0 - v * p
    return (1.0 - survival) * inhibition


def propagate_noisy_or(spec: McSpec, workers: int = 1) -> PosteriorSummary:
    return summarize_samples(propagate_samples(spec, workers))


def strength_posterior(prior: BetaParams, draws: int = DEFAULT_DRAWS,
                       seed: int = DEFAULT_SEED) -> PosteriorSummary:
    """MC summary of a single Beta link-strength prior."""
    return summarize_samples(_beta_draws(seed, _ROLE_STRENGTH, 0, draws, prior))


def propagate_mean_closed_form(spec: McSpec) -> float:
    """Exact expectation of the propagated draw (independent factors, so E multiplies)."""
    leak_mean = spec.leak.mean if isinstance(spec.leak, BetaParams) else float(spec.leak)
    survival = 1.0 - leak_mean
    inhibition = 1.0
    for parent in spec.parents:
        term = 1.0 - parent.strength.mean * parent.marginal.mean
        if parent.polarity == ENABLER:
            survival *= term
        else:
            inhibition *= term
    return (1.0 - survival) * inhibition


@dataclass(frozen=True)
class PredictiveCheckRow:
    node: str
    summary: PosteriorSummary
    lo: float
    hi: float

    @property
    def ok(self) -> bool:
        return self.lo <= self.summary.q2_5 and self.summary.q97_5 <= self.hi


def prior_predictive_check(specs: dict[str, McSpec],
                           bounds: dict[str, tuple[float, float]],
                           workers: int = 1) -> list[PredictiveCheckRow]:
    """Flag any node whose 95% interval escapes its declared plausibility bounds."""
    rows = []
    for node, spec in specs.items():
        lo, hi = bounds[node]
        rows.append(PredictiveCheckRow(node, propagate_noisy_or(spec, workers), lo, hi))
    return rows


def render_summary_table(rows: dict[str, PosteriorSummary], sep: str = "\t") -> str:
    """Delimited text in the reference column layout."""
    header = sep.join(["Variable", "Mean", "Median", "SD", "q2.5%", "q97.5%"])
    lines = [header]
    for name, s in rows.items():
        lines.append(sep.join([
            name,
            f"{s.mean:.6f}", f"{s.median:.6f}", f"{s.sd:.6f}",
            f"{s.q2_5:.6f}", f"{s.q97_5:.6f}",
        ]))
    return "\n".join(lines)


def _beta_from_document(raw, where: str) -> BetaParams:
    if not isinstance(raw, dict) or not {"alpha", "beta"} <= raw.keys():
        raise ValueError(f"{where} must be an object with alpha and beta, got {raw!r}")
    return BetaParams(alpha=float(raw["alpha"]), beta=float(raw["beta"]))


def mc_spec_from_document(doc) -> McSpec:
    """Parse the JSON form of a propagation spec.

    Shape: {"parents": [{"marginal": {"alpha", "beta"}, "strength": {...},
    "polarity"?}], "leak"?: number | {"alpha", "beta"}, "draws"?, "seed"?}.
    """
    if not isinstance(doc, dict):
        raise ValueError(f"spec must be an object, got {type(doc).__name__}")
    raw_parents = doc.get("parents")
    if not isinstance(raw_parents, list) or not raw_parents:
        raise ValueError("spec needs a non-empty 'parents' array")
    parents = []
    for i, raw in enumerate(raw_parents):
        if not isinstance(raw, dict):
            raise ValueError(f"parents[{i}] must be an object")
        parents.append(McParent(
            marginal=_beta_from_document(raw.get("marginal"), f"parents[{i}].marginal"),
            strength=_beta_from_document(raw.get("strength"), f"parents[{i}].strength"),
            polarity=raw.get("polarity", ENABLER),
        ))
    raw_leak = doc.get("leak", 0.0)
    if isinstance(raw_leak, dict):
        leak: BetaParams | float = _beta_from_document(raw_leak, "leak")
    elif isinstance(raw_leak, (int, float)) and not isinstance(raw_leak, bool):
        leak = float(raw_leak)
    else:
        raise ValueError(f"leak must be a number or Beta object, got {raw_leak!r}")
    return McSpec(parents=tuple(parents),
                  leak=leak,
                  draws=int(doc.get("draws", DEFAULT_DRAWS)),
                  seed=int(doc.get("seed", DEFAULT_SEED)))


def mc_spec_to_document(spec: McSpec) -> dict:
    def beta(p: BetaParams) -> dict:
        return {"alpha": p.alpha, "beta": p.beta}

    return {
        "parents": [
            {"marginal": beta(p.marginal), "strength": beta(p.strength),
             "polarity": p.polarity}
            for p in spec.parents],
        "leak": beta(spec.leak) if isinstance(spec.leak, BetaParams) else spec.leak,
        "draws": spec.draws,
        "seed": spec.seed,
    }


def summary_to_document(summary: PosteriorSummary) -> dict:
    return {"mean": summary.mean, "median": summary.median, "sd": summary.sd,
            "q2_5": summary.q2_5, "q97_5": summary.q97_5}
