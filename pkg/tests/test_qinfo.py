import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncrand.errors import ValidationError
from ncrand.qinfo import (
    MAXIMALLY_MIXED,
    PURE_ZERO,
    ClassicalSource,
    QubitState,
    schumacher_compress,
    shannon_entropy,
    von_neumann_entropy,
)
from ncrand.rmt import haar_unitary


def test_shannon_examples():
    assert shannon_entropy((0.5, 0.5)) == 1
    assert shannon_entropy((1, 0)) == 0
    assert shannon_entropy((0.9, 0.1)) == pytest.approx(0.468996, abs=1e-6)


def test_source_validation():
    with pytest.raises(ValidationError):
        ClassicalSource((0.5, 0.6))
    with pytest.raises(ValidationError):
        ClassicalSource((-0.1, 1.1))


def test_von_neumann_examples():
    assert von_neumann_entropy(MAXIMALLY_MIXED) == pytest.approx(1, abs=1e-12)
    assert von_neumann_entropy(PURE_ZERO) == 0
    assert von_neumann_entropy(QubitState.diagonal(0.9, 0.1)) == pytest.approx(0.468996, abs=1e-6)


def test_invalid_density_matrices():
    with pytest.raises(ValidationError):
        QubitState(np.array([[1, 0], [0, 1]]))
    with pytest.raises(ValidationError):
        QubitState(np.array([[1.2, 0], [0, -0.2]]))
    with pytest.raises(ValidationError):
        QubitState(np.array([[0.5, 1], [0, 0.5]]))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda p: sum(p) > 1e-3))
def test_shannon_bounds(raw):
    p = np.array(raw) / sum(raw)
    p = p / p.sum()
    src = ClassicalSource(tuple(p))
    h = shannon_entropy(src)
    assert -1e-12 <= h <= math.log2(len(p)) + 1e-12


def test_uniform_maximizes():
    for k in range(1, 9):
        assert shannon_entropy([1 / k] * k) == pytest.approx(math.log2(k), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.integers(0, 10_000))
def test_unitary_invariance_and_diagonal_agreement(p, seed):
    rho = np.diag([p, 1 - p]).astype(complex)
    u = haar_unitary(2, np.random.default_rng(seed))
    s = von_neumann_entropy(QubitState(rho))
    assert von_neumann_entropy(QubitState(u @ rho @ u.conj().T)) == pytest.approx(s, abs=1e-9)
    assert s == pytest.approx(shannon_entropy((p, 1 - p)), abs=1e-9)


def exact_typical_dim(p0, n, eps):
    """Smallest number of product eigenvalues with mass >= 1 - eps, by weight classes in exact rationals."""
    p0 = Fraction(p0)
    p1 = 1 - p0
    classes = sorted(
        ((p0 ** (n - j) * p1**j, math.comb(n, j)) for j in range(n + 1)), key=lambda c: -c[0]
    )
    need, mass, d = 1 - Fraction(eps), Fraction(0), 0
    for w, mult in classes:
        if w == 0:
            break
        if mass + w * mult >= need:
            return d + math.ceil((need - mass) / w), None
        mass += w * mult
        d += mult
    return d, mass


def test_schumacher_maximally_mixed():
    r = schumacher_compress(MAXIMALLY_MIXED, 8, 0.1)
    assert exact_typical_dim(Fraction(1, 2), 8, Fraction(1, 10))[0] == 231
    assert r.typical_dim == 231
    assert r.rate == pytest.approx(math.log2(231) / 8)
    assert r.fidelity_bound >= 0.9


def test_schumacher_pure_state():
    for n in (1, 5, 12):
        r = schumacher_compress(PURE_ZERO, n, 0.01)
        assert (r.typical_dim, r.rate, r.fidelity_bound) == (1, 0.0, 1.0)


@pytest.mark.parametrize("n", [1, 4, 8, 12, 16, 20])
def test_schumacher_matches_exact_oracle(n):
    r = schumacher_compress(QubitState.diagonal(0.9, 0.1), n, 0.1)
    assert r.typical_dim == exact_typical_dim(Fraction(9, 10), n, Fraction(1, 10))[0]
    assert r.fidelity_bound >= 0.9


def test_schumacher_rate_between_entropy_and_one():
    s = 0.4690
    r8 = schumacher_compress(QubitState.diagonal(0.9, 0.1), 8, 0.1)
    r16 = schumacher_compress(QubitState.diagonal(0.9, 0.1), 16, 0.1)
    assert s < r16.rate < 1
    assert r16.rate < r8.rate


def test_schumacher_preconditions():
    with pytest.raises(ValidationError):
        schumacher_compress(MAXIMALLY_MIXED, 21, 0.1)
    with pytest.raises(ValidationError):
        schumacher_compress(MAXIMALLY_MIXED, 4, 0.0)
