"""Finite-dimensional noncommutative probability spaces.

Matrices are plain complex ``numpy`` arrays; the state is the normalized
trace.  Qubit chains are Kronecker products of 2x2 factors, so the
normalized trace on ``2**m`` dimensions is the m-fold tensor power of the
one-qubit state ``(a11 + a22) / 2``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DimensionMismatch, ValidationError

MAX_CHAIN = 14
HERMITIAN_TOL = 1e-12
ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    """Validate and return a finite square complex matrix."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError("matrix has non-finite entries")
    return a


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def trace_state(a) -> complex:
    """Normalized trace ``(1/n) sum_i a_ii``."""
    a = as_matrix(a)
    return complex(np.trace(a) / a.shape[0])


@dataclass(frozen=True)
class TracialState:
    """The normalized trace on ``dim x dim`` matrices."""

    dim: int

    def __call__(self, a) -> complex:
        a = as_matrix(a)
        if a.shape[0] != self.dim:
            raise DimensionMismatch(f"state on dim {self.dim} applied to dim {a.shape[0]}")
        return trace_state(a)


def tensor_chain(factors: Sequence) -> np.ndarray:
    """Kronecker product of 2x2 factors, left to right."""
    if not factors:
        raise ValidationError("empty chain")
    if len(factors) > MAX_CHAIN:
        raise ValidationError(f"chain longer than {MAX_CHAIN} qubits")
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        f = as_matrix(f)
        if f.shape != (2, 2):
            raise ValidationError("chain factors must be 2x2")
        out = np.kron(out, f)
    return out


def embed(a, site: int, length: int) -> np.ndarray:
    """``I ⊗ ... ⊗ a ⊗ ... ⊗ I`` with ``a`` at position ``site`` of ``length``."""
    return tensor_chain([a if i == site else I2 for i in range(length)])


@dataclass
class NCRandomVariable:
    matrix: np.ndarray
    label: str = ""
    state: Optional[TracialState] = None

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix)
        if self.state is None:
            self.state = TracialState(self.matrix.shape[0])
        elif self.state.dim != self.matrix.shape[0]:
            raise DimensionMismatch("variable and ambient state differ in dimension")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self) -> complex:
        return self.state(self.matrix)

    def centered(self) -> "NCRandomVariable":
        m = self.matrix - self.expectation() * np.eye(self.dim)
        return NCRandomVariable(m, self.label, self.state)


def _as_variables(vs) -> list[NCRandomVariable]:
    return [v if isinstance(v, NCRandomVariable) else NCRandomVariable(v) for v in vs]


def _common_dim(*groups) -> int:
    dims = {v.dim for g in groups for v in g}
    if len(dims) > 1:
        raise DimensionMismatch(f"variables live on different dimensions {sorted(dims)}")
    return dims.pop()


def mixed_moment(variables: Sequence, word: Sequence[int]) -> complex:
    """``ω(v_{w1} v_{w2} ... v_{wl})``; indices in ``word`` are 1-based.

    The empty word gives ``ω(I) = 1``.
    """
    vs = _as_variables(variables)
    if not vs:
        raise ValidationError("no variables")
    dim = _common_dim(vs)
    if not word:
        return 1.0 + 0j
    for w in word:
        if not 1 <= w <= len(vs):
            raise ValidationError(f"word index {w} out of range 1..{len(vs)}")
    if len(word) == 1:
        return trace_state(vs[word[0] - 1].matrix)
    prod = np.eye(dim, dtype=complex)
    for w in word[:-1]:
        prod = prod @ vs[w - 1].matrix
    return kernels.trace_of_product(prod, vs[word[-1] - 1].matrix)


def factorization_residual(a, b, max_power: int = 4) -> float:
    """``max |ω(a^p b^q) - ω(a^p) ω(b^q)|`` over ``1 <= p, q <= max_power``.

    Zero (up to rounding) for tensor-independent variables.
    """
    a, b = as_matrix(a), as_matrix(b)
    pa = [np.linalg.matrix_power(a, p) for p in range(1, max_power + 1)]
    pb = [np.linalg.matrix_power(b, q) for q in range(1, max_power + 1)]
    return max(
        abs(kernels.trace_of_product(x, y) - trace_state(x) * trace_state(y))
        for x in pa
        for y in pb
    )


@dataclass
class DefectReport:
    max_defect: float
    # (group index, letter label) per position of the worst word
    word: list[tuple[int, str]]
    group_labels: tuple[str, str]
    max_word_len: int
    max_power: int
    words_checked: int = 0

    def to_dict(self) -> dict:
        return {
            "max_defect": self.max_defect,
            "word": self.word_labels(),
            "group_labels": list(self.group_labels),
            "max_word_len": self.max_word_len,
            "max_power": self.max_power,
            "words_checked": self.words_checked,
        }

    def word_labels(self) -> list[str]:
        return [lab for _, lab in self.word]

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _letters(group: list[NCRandomVariable], max_power: int, dim: int):
    eye = np.eye(dim, dtype=complex)
    out = []
    for v in group:
        power = eye
        for p in range(1, max_power + 1):
            power = power @ v.matrix
            centered = power - trace_state(power) * eye
            label = v.label if p == 1 else f"{v.label}^{p}"
            out.append((label, centered))
    return out


def freeness_defect(
    group1: Sequence,
    group2: Sequence,
    max_word_len: int,
    max_power: int = 1,
    labels: tuple[str, str] = ("A", "B"),
) -> DefectReport:
    """Largest ``|ω(a1 a2 ... an)|`` over centered alternating words.

    Letters are the generators of each group and their powers up to
    ``max_power``, each centered as ``a - ω(a) I``.  Words alternate
    between the groups, start in either one and have length
    ``1..max_word_len``.  Prefix products are shared across words and the
    last letter enters through a trace-of-product, so no word costs more
    than one matrix product beyond its prefix.  Ties keep the first word in
    enumeration order (shorter first, group1-initial first).
    """
    if max_word_len < 2:
        raise ValidationError("max_word_len must be at least 2")
    if max_power < 1:
        raise ValidationError("max_power must be at least 1")
    g1, g2 = _as_variables(group1), _as_variables(group2)
    if not g1 or not g2:
        raise ValidationError("both groups need at least one variable")
    dim = _common_dim(g1, g2)
    g1 = [replace(v, label=v.label or f"{labels[0]}{i + 1}") for i, v in enumerate(g1)]
    g2 = [replace(v, label=v.label or f"{labels[1]}{i + 1}") for i, v in enumerate(g2)]
    letters = (_letters(g1, max_power, dim), _letters(g2, max_power, dim))

    best, best_word, checked = -1.0, [], 0
    eye = np.eye(dim, dtype=complex)
    for length in range(1, max_word_len + 1):
        for start in (0, 1):
            # walk the tree of prefixes of this length depth-first
            stack = [(eye, [])]
            while stack:
                prod, word = stack.pop()
                depth = len(word)
                g = (start + depth) % 2
                if depth == length - 1:
                    for idx, (label, m) in enumerate(letters[g]):
                        val = abs(kernels.trace_of_product(prod, m))
                        checked += 1
                        cand = word + [(g, idx)]
                        if val > best:
                            best, best_word = val, cand
                    continue
                for idx in range(len(letters[g]) - 1, -1, -1):
                    stack.append((prod @ letters[g][idx][1], word + [(g, idx)]))
    named = [(g, letters[g][idx][0]) for g, idx in best_word]
    return DefectReport(float(best), named, tuple(labels), max_word_len, max_power, checked)


def recenter_is_idempotent(a) -> bool:
    a = as_matrix(a)
    eye = np.eye(a.shape[0])
    once = a - trace_state(a) * eye
    twice = once - trace_state(once) * eye
    return bool(np.max(np.abs(once - twice)) <= ATOL)


def commuting_coins() -> tuple[NCRandomVariable, NCRandomVariable]:
    """Two classical ±1 coins as ``σ_z ⊗ I`` and ``I ⊗ σ_z`` on a 2-qubit chain."""
    return (
        NCRandomVariable(embed(SIGMA_Z, 0, 2), "c1"),
        NCRandomVariable(embed(SIGMA_Z, 1, 2), "c2"),
    )


def matrix_to_json(a) -> list:
    """Serialize as nested lists of ``[re, im]`` pairs."""
    a = as_matrix(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValidationError("expected rows of [re, im] pairs")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])
