"""Random-matrix ensembles, spectra and Monte Carlo tracial states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import lawlib
from .errors import DimensionMismatch, ValidationError
from .montecarlo import map_trials, rng_for
from .ncp import HERMITIAN_TOL, as_matrix, is_hermitian

KINDS = ("gue", "haar_unitary", "bernoulli_conjugated")


@dataclass(frozen=True)
class RandomMatrixEnsemble:
    """A seeded matrix sampler; trial ``t`` uses the stream ``(seed, t)``."""

    kind: str
    dim: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown ensemble {self.kind!r}")
        if self.dim < 1:
            raise ValidationError("dimension must be positive")
        if self.kind == "bernoulli_conjugated" and self.dim % 2:
            raise ValidationError("bernoulli_conjugated needs an even dimension")

    def sample(self, trial: int) -> np.ndarray:
        return sample(self, trial)


def gue_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian, diagonal ~ N(0, 1/n), off-diagonal real and imaginary parts ~ N(0, 1/(2n))."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / (2.0 * math.sqrt(n))


def haar_columns(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """First ``k`` columns of a Haar unitary: QR of a complex Ginibre block
    with the phases of R's diagonal moved into Q."""
    z = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return haar_columns(n, n, rng)


def bernoulli_conjugated(n: int, rng: np.random.Generator) -> np.ndarray:
    """``U diag(+1 x n/2, -1 x n/2) U†`` for Haar ``U``, computed as ``2 V V† - I``
    with ``V`` the first ``n/2`` columns of ``U``."""
    v = haar_columns(n, n // 2, rng)
    out = 2.0 * (v @ v.conj().T)
    out[np.diag_indices(n)] -= 1.0
    return out


def sample(ensemble: RandomMatrixEnsemble, trial: int) -> np.ndarray:
    if trial < 0:
        raise ValidationError("trial index must be nonnegative")
    rng = rng_for(ensemble.seed, trial)
    if ensemble.kind == "gue":
        return gue_matrix(ensemble.dim, rng)
    if ensemble.kind == "haar_unitary":
        return haar_unitary(ensemble.dim, rng)
    return bernoulli_conjugated(ensemble.dim, rng)


@dataclass
class EigenvalueDistribution:
    """Atoms with weights; ``kind`` is ``"empirical"`` (one matrix) or
    ``"mean"`` (pooled over trials, with a histogram)."""

    kind: str
    values: np.ndarray
    weights: np.ndarray
    histogram: Optional[lawlib.Histogram] = None
    trials: int = 1

    def moment(self, order: int) -> float:
        return float(np.dot(self.weights, self.values**order))

    def as_law(self) -> lawlib.SpectralLaw:
        return lawlib.empirical(self.values)


def eigenvalues(a) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK tridiagonal route)."""
    a = as_matrix(a)
    if not is_hermitian(a, HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a))))):
        raise ValidationError("spectrum needs a Hermitian matrix")
    return np.linalg.eigvalsh(a)


def spectrum(a, verify: bool = False) -> EigenvalueDistribution:
    """Empirical eigenvalue distribution, weights ``1/n``.

    With ``verify=True`` the eigenvectors are computed too and every pair is
    checked against ``||A v - λ v|| <= 1e-8 ||A||``.
    """
    a = as_matrix(a)
    if verify:
        if not is_hermitian(a, HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a))))):
            raise ValidationError("spectrum needs a Hermitian matrix")
        vals, vecs = np.linalg.eigh(a)
        res = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
        if res.max(initial=0.0) > 1e-8 * max(np.linalg.norm(a, 2), 1e-300):
            raise ArithmeticError("eigensolver residual above tolerance")
    else:
        vals = eigenvalues(a)
    n = vals.size
    return EigenvalueDistribution("empirical", vals, np.full(n, 1.0 / n))


def trial_spectra(ensemble: RandomMatrixEnsemble, trials: int) -> list[np.ndarray]:
    return map_trials(lambda t: eigenvalues(sample(ensemble, t)), range(trials))


def mean_spectrum(
    ensemble: RandomMatrixEnsemble,
    trials: int,
    bins: int,
    range: Optional[tuple[float, float]] = None,
) -> EigenvalueDistribution:
    """Pooled eigenvalues over ``trials`` samples plus a density histogram.

    ``mc_sigma`` is the standard error of each bin's density across trials.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    per_trial = trial_spectra(ensemble, trials)
    pooled = np.concatenate(per_trial)
    hist = lawlib.histogram(pooled, bins, range)
    lo, hi = float(hist.edges[0]), float(hist.edges[-1])
    if trials > 1:
        dens = np.array([lawlib.histogram(v, bins, (lo, hi)).density for v in per_trial])
        hist.mc_sigma = dens.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        hist.mc_sigma = np.zeros(bins)
    order = np.argsort(pooled, kind="stable")
    return EigenvalueDistribution(
        "mean", pooled[order], np.full(pooled.size, 1.0 / pooled.size), hist, trials
    )


@dataclass(frozen=True)
class RandomMatrixSpace:
    """Monte Carlo version of ``τ(X) = (1/n) Σ E(X_ii)``."""

    dim: int
    trials: int


@dataclass
class TauEstimate:
    value: complex
    se: float
    trials: int


def tau_estimate(
    space: RandomMatrixSpace,
    word: Sequence[str],
    ensembles: Mapping[str, RandomMatrixEnsemble],
) -> TauEstimate:
    """Estimate ``τ`` of a product of sampled matrices.

    ``word`` lists ensemble labels (``"I"`` is the identity); within a trial
    each label is sampled once, so repeated labels reuse the same matrix.
    """
    tokens = [w for w in word if w != "I"]
    for w in tokens:
        if w not in ensembles:
            raise ValidationError(f"no ensemble named {w!r}")
        if ensembles[w].dim != space.dim:
            raise DimensionMismatch(f"ensemble {w!r} has dim {ensembles[w].dim}, space has {space.dim}")
    if not tokens:
        return TauEstimate(1.0 + 0j, 0.0, space.trials)
    if space.trials < 1:
        raise ValidationError("trials must be at least 1")

    def one(t):
        mats = {label: sample(ensembles[label], t) for label in dict.fromkeys(tokens)}
        prod = mats[tokens[0]]
        for label in tokens[1:-1]:
            prod = prod @ mats[label]
        if len(tokens) == 1:
            return complex(np.trace(prod) / space.dim)
        return complex(np.einsum("ij,ji->", prod, mats[tokens[-1]]) / space.dim)

    vals = np.array(map_trials(one, range(space.trials)))
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return TauEstimate(complex(vals.mean()), se, space.trials)
