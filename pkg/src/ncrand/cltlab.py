"""Classical and free central limit experiments with ±1 letters.

The classical source sums independent fair ±1 coins; the free source sums
independent Haar-conjugated balanced ±1 matrices, which become free as
the dimension grows.  Both are normalized by ``1/sqrt(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import lawlib
from .errors import ValidationError
from .montecarlo import map_trials, rng_for
from .rmt import eigenvalues, haar_columns

MAX_ORDER = 8
# classical trials are drawn in fixed-size blocks, each with its own stream
CLASSICAL_BLOCK = 8192


@dataclass(frozen=True)
class SourceSpec:
    kind: str  # "classical_coin" or "free_bernoulli_matrix"
    dim: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("classical_coin", "free_bernoulli_matrix"):
            raise ValidationError(f"unknown source {self.kind!r}")
        if self.kind == "free_bernoulli_matrix":
            if self.dim is None or self.dim < 2 or self.dim % 2:
                raise ValidationError("free source needs an even dimension")

    @property
    def label(self) -> str:
        return "classical" if self.kind == "classical_coin" else "free"

    @property
    def reference(self) -> lawlib.SpectralLaw:
        return lawlib.STANDARD_GAUSSIAN if self.kind == "classical_coin" else lawlib.STANDARD_SEMICIRCLE


@dataclass
class MomentEstimate:
    order: int
    estimate: float
    se: float


@dataclass
class CltResult:
    source: str
    n: int
    trials: int
    dim: Optional[int]
    sample_moments: list[MomentEstimate]
    ks: float
    reference: lawlib.SpectralLaw = field(repr=False)

    def moment(self, order: int) -> MomentEstimate:
        return self.sample_moments[order]

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "n": self.n,
            "dim": self.dim,
            "trials": self.trials,
            "ks": self.ks,
            "moments": [
                {"order": m.order, "estimate": m.estimate, "se": m.se} for m in self.sample_moments
            ],
        }


def _moments(per_trial: np.ndarray, max_order: int) -> list[MomentEstimate]:
    """Moments from per-trial values ``per_trial[t, order]``; se from the trial spread."""
    t = per_trial.shape[0]
    out = [MomentEstimate(0, 1.0, 0.0)]
    for k in range(1, max_order + 1):
        col = per_trial[:, k]
        se = float(col.std(ddof=1) / math.sqrt(t)) if t > 1 else 0.0
        out.append(MomentEstimate(k, float(col.mean()), se))
    return out


def classical_clt(n: int, trials: int, seed: int = 0, max_order: int = MAX_ORDER) -> CltResult:
    """Simulate ``m_n = (1/sqrt(n)) Σ c_k`` over fair ±1 coins.

    The number of +1 letters in a trial is Binomial(n, 1/2), drawn directly.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if trials < 2:
        raise ValidationError("need at least 2 trials")

    def block(b):
        size = min(CLASSICAL_BLOCK, trials - b * CLASSICAL_BLOCK)
        heads = rng_for(seed, n, b).binomial(n, 0.5, size=size)
        return (2.0 * heads - n) / math.sqrt(n)

    values = np.concatenate(map_trials(block, range(math.ceil(trials / CLASSICAL_BLOCK))))
    powers = values[:, None] ** np.arange(max_order + 1)
    ks = lawlib.ks_distance(lawlib.empirical(values), lawlib.STANDARD_GAUSSIAN)
    return CltResult("classical", n, trials, None, _moments(powers, max_order), ks, lawlib.STANDARD_GAUSSIAN)


def free_sum(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``(1/sqrt(n)) Σ_k (2 V_k V_k† - I)`` for ``n`` independent Haar half-frames ``V_k``."""
    half = dim // 2
    frames = np.concatenate([haar_columns(dim, half, rng) for _ in range(n)], axis=1)
    m = 2.0 * (frames @ frames.conj().T)
    m[np.diag_indices(dim)] -= n
    return m / math.sqrt(n)


def free_clt(n: int, dim: int, trials: int, seed: int = 0, max_order: int = MAX_ORDER) -> CltResult:
    """Spectral moments and KS distance of the normalized free ±1 sum.

    Spectra are pooled over trials; standard errors come from the spread of
    per-trial spectral moments.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if dim < 2 or dim % 2:
        raise ValidationError("dim must be even")
    if trials < 1:
        raise ValidationError("trials must be at least 1")

    spectra = map_trials(lambda t: eigenvalues(free_sum(n, dim, rng_for(seed, n, t))), range(trials))
    per_trial = np.array([[np.mean(s**k) for k in range(max_order + 1)] for s in spectra])
    pooled = np.concatenate(spectra)
    ks = lawlib.ks_distance(lawlib.empirical(pooled), lawlib.STANDARD_SEMICIRCLE)
    return CltResult("free", n, trials, dim, _moments(per_trial, max_order), ks, lawlib.STANDARD_SEMICIRCLE)


def run_source(source: SourceSpec, n: int, trials: int, seed: int = 0) -> CltResult:
    if source.kind == "classical_coin":
        return classical_clt(n, trials, seed)
    return free_clt(n, source.dim, trials, seed)


def fourth_moment_oracle(source: SourceSpec, n: int) -> float:
    """Exact fourth moment of ``m_n`` for ±1 letters: ``3 - 2/n`` classically,
    ``2 - 1/n`` for free letters (infinite-dimensional limit)."""
    return 3 - 2 / n if source.kind == "classical_coin" else 2 - 1 / n


@dataclass
class Ladder:
    source: SourceSpec
    results: list[CltResult]

    def rows(self):
        """CSV rows: source, n, dim, order, estimate, se, exact_target."""
        kind = "standard_gaussian" if self.source.kind == "classical_coin" else "standard_semicircle"
        for r in self.results:
            for m in r.sample_moments:
                yield (
                    self.source.label, r.n, r.dim if r.dim is not None else "",
                    m.order, m.estimate, m.se, lawlib.exact_moment(kind, m.order),
                )


LADDER_HEADER = ["source", "n", "dim", "order", "estimate", "se", "exact_target"]


def moment_ladder(source: SourceSpec, n_list: Sequence[int], trials: int, seed: int = 0) -> Ladder:
    """One :class:`CltResult` per ``n`` under a shared seed."""
    n_list = list(n_list)
    if not n_list:
        raise ValidationError("n_list must be nonempty")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValidationError("n_list must be strictly ascending")
    return Ladder(source, [run_source(source, n, trials, seed) for n in n_list])
