"""Shannon and von Neumann entropies and typical-subspace compression."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ValidationError
from .ncp import as_matrix, is_hermitian

TOL = 1e-10
MAX_LETTERS = 20


@dataclass(frozen=True)
class ClassicalSource:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        if not p or any(x < 0 or x > 1 for x in p) or abs(sum(p) - 1) > 1e-12:
            raise ValidationError("probabilities must lie in [0, 1] and sum to 1")
        object.__setattr__(self, "probabilities", p)


@dataclass(frozen=True, eq=False)
class QubitState:
    rho: np.ndarray

    def __post_init__(self):
        rho = as_matrix(self.rho)
        if rho.shape != (2, 2):
            raise ValidationError("a qubit state is a 2x2 matrix")
        if not is_hermitian(rho, TOL):
            raise ValidationError("density matrix must be Hermitian")
        if abs(np.trace(rho) - 1) > TOL:
            raise ValidationError("density matrix must have unit trace")
        ev = np.linalg.eigvalsh(rho)
        if ev.min() < -TOL or ev.max() > 1 + TOL:
            raise ValidationError("density matrix must be positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def diagonal(cls, p0: float, p1: float) -> "QubitState":
        return cls(np.diag([p0, p1]).astype(complex))

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order, clipped to [0, 1]."""
        return np.clip(np.linalg.eigvalsh(self.rho)[::-1], 0.0, 1.0)


MAXIMALLY_MIXED = QubitState.diagonal(0.5, 0.5)
PURE_ZERO = QubitState.diagonal(1.0, 0.0)


def _entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def shannon_entropy(src) -> float:
    """``-Σ p log2 p`` in bits per letter, with ``0 log 0 = 0``."""
    if not isinstance(src, ClassicalSource):
        src = ClassicalSource(tuple(src))
    return _entropy_bits(src.probabilities)


def von_neumann_entropy(state) -> float:
    """``-Σ λ log2 λ`` over the spectrum of ``ρ``, in qubits per letter."""
    if not isinstance(state, QubitState):
        state = QubitState(state)
    return _entropy_bits(state.eigenvalues)


@dataclass
class SchumacherResult:
    n: int
    epsilon: float
    typical_dim: int
    rate: float
    fidelity_bound: float
    entropy: float

    def row(self):
        return (self.n, self.epsilon, self.typical_dim, self.rate, self.fidelity_bound, self.entropy)


SCHUMACHER_HEADER = ["n", "epsilon", "typical_dim", "rate", "fidelity_bound", "entropy"]


def schumacher_compress(state, n: int, epsilon: float) -> SchumacherResult:
    """Smallest eigenspace of ``ρ^{⊗n}`` holding mass ``>= 1 - epsilon``.

    The ``2**n`` eigenvalues are the products of single-letter
    eigenvalues; they are sorted in descending order (ties by
    lexicographic index) and accumulated greedily.
    """
    if not isinstance(state, QubitState):
        state = QubitState(state)
    if not 1 <= n <= MAX_LETTERS:
        raise ValidationError(f"n must lie in 1..{MAX_LETTERS}")
    if not 0 < epsilon < 1:
        raise ValidationError("epsilon must lie in (0, 1)")
    weights = kernels.tensor_power_weights(state.eigenvalues, n)
    ordered = weights[np.argsort(-weights, kind="stable")]
    mass = np.cumsum(ordered)
    target = 1.0 - epsilon
    d = int(np.searchsorted(mass, target, side="left")) + 1
    d = min(d, ordered.size)
    return SchumacherResult(
        n, epsilon, d, math.log2(d) / n, float(min(mass[d - 1], 1.0)), von_neumann_entropy(state)
    )


def schumacher_sweep(state, n_values: Sequence[int], epsilon: float) -> list[SchumacherResult]:
    return [schumacher_compress(state, n, epsilon) for n in n_values]
