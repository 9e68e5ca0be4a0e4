"""Beta-distribution toolkit: elicitation, moments, conjugate updates, seeded sampling.

Elicited proportions enter as Beta(p*n + 1, (n - p*n) + 1) (add-one smoothing over the
two outcomes); expert mean/strength pairs enter unsmoothed as Beta(mean*ess, (1-mean)*ess).
Sampling is pinned to numpy's PCG64 Generator: the seed -> draw-sequence mapping is part
of this module's contract and must not change silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp_special


class CountOutOfRange(ValueError):
    """Success count outside [0, trials]."""


class InfeasibleMoments(ValueError):
    """No Beta distribution has the requested mean/sd pair."""


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta distribution; both must be positive and finite."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    @property
    def variance(self) -> float:
        s = self.alpha + self.beta
        return (self.alpha * self.beta) / (s * s * (s + 1.0))

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def ess(self) -> float:
        """Equivalent sample size alpha + beta."""
        return self.alpha + self.beta

    @property
    def median(self) -> float:
        """Exact median via the inverse regularized incomplete beta function."""
        return float(_sp_special.betaincinv(self.alpha, self.beta, 0.5))


@dataclass(frozen=True)
class ProportionEvidence:
    """An observed proportion p out of an effective sample of n respondents."""

    p: float
    n: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"proportion must lie in [0, 1], got {self.p!r}")
        if not (math.isfinite(self.n) and self.n > 0):
            raise ValueError(f"sample size must be positive, got {self.n!r}")


def beta_from_proportion(evidence: ProportionEvidence) -> BetaParams:
    """Smoothed elicitation: alpha = p*n + 1, beta = (n - p*n) + 1."""
    successes = evidence.p * evidence.n
    return BetaParams(successes + 1.0, (evidence.n - successes) + 1.0)


def beta_from_mean_ess(mean: float, ess: float) -> BetaParams:
    """Unsmoothed construction from a target mean and equivalent sample size."""
    if not (0.0 < mean < 1.0):
        raise ValueError(f"mean must lie strictly inside (0, 1), got {mean!r}")
    if not (math.isfinite(ess) and ess > 0):
        raise ValueError(f"ess must be positive, got {ess!r}")
    return BetaParams(mean * ess, (1.0 - mean) * ess)


def beta_moments(params: BetaParams) -> tuple[float, float, float]:
    """(mean, variance, equivalent sample size)."""
    return params.mean, params.variance, params.ess


def beta_posterior_update(prior: BetaParams, successes: float, trials: float) -> BetaParams:
    """Conjugate binomial update: Beta(alpha + y, beta + n - y)."""
    if trials < 0:
        raise CountOutOfRange(f"trials must be >= 0, got {trials!r}")
    if not (0 <= successes <= trials):
        raise CountOutOfRange(f"successes {successes!r} outside [0, {trials!r}]")
    return BetaParams(prior.alpha + successes, prior.beta + (trials - successes))


def fit_beta_moments(mean: float, sd: float) -> BetaParams:
    """Method-of-moments fit: alpha = mean*(mean*(1-mean)/sd^2 - 1), beta likewise.

    Feasibility requires 0 < mean < 1 and sd^2 < mean*(1-mean); anything else has no
    Beta solution and raises InfeasibleMoments.
    """
    if not (0.0 < mean < 1.0):
        raise InfeasibleMoments(f"mean must lie strictly inside (0, 1), got {mean!r}")
    if not (math.isfinite(sd) and sd > 0):
        raise InfeasibleMoments(f"sd must be positive, got {sd!r}")
    spread = mean * (1.0 - mean)
    if sd * sd >= spread:
        raise InfeasibleMoments(
            f"sd^2 = {sd * sd:.6g} must be below mean*(1-mean) = {spread:.6g}"
        )
    common = spread / (sd * sd) - 1.0
    return BetaParams(mean * common, (1.0 - mean) * common)


class RandomStream:
    """Seeded PCG64 stream; substreams derive deterministically from (seed, index...).

    Streams are cheap but stateful: never share one across workers. Each worker should
    take its own substream(index) so merged output is independent of scheduling.
    """

    def __init__(self, seed: int, *path: int):
        self._seed = int(seed)
        self._path = tuple(int(p) for p in path)
        self._rng = np.random.default_rng(np.random.SeedSequence([self._seed, *self._path]))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def path(self) -> tuple[int, ...]:
        return self._path

    def substream(self, index: int) -> "RandomStream":
        return RandomStream(self._seed, *self._path, index)

    @property
    def generator(self) -> np.random.Generator:
        return self._rng


def beta_sample(params: BetaParams, stream: RandomStream, size: int | None = None):
    """Draw from Beta(alpha, beta) on the given stream; scalar when size is None."""
    draws = stream.generator.beta(params.alpha, params.beta, size=size)
    return float(draws) if size is None else draws
