import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncrand import kernels
from ncrand._accel import HAVE_NUMBA

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="needs both backends")

bit_arrays = st.lists(st.integers(0, 1), max_size=300).map(lambda b: np.array(b, dtype=np.uint8))


def both(kernel, *args):
    return kernel.numba_impl(*args), kernel.numpy_impl(*args)


@settings(max_examples=60, deadline=None)
@given(bit_arrays)
def test_lz78_backends_agree(bits):
    (i1, l1), (i2, l2) = both(kernels.lz78_parse, bits)
    np.testing.assert_array_equal(i1, i2)
    np.testing.assert_array_equal(l1, l2)


@settings(max_examples=60, deadline=None)
@given(bit_arrays)
def test_lz78_phrases_rebuild_input(bits):
    indices, literals = kernels.lz78_parse(bits)
    phrases, out = [""], []
    for idx, lit in zip(indices.tolist(), literals.tolist()):
        p = phrases[idx] + (str(lit) if lit >= 0 else "")
        if lit >= 0:
            phrases.append(p)
        out.append(p)
    assert "".join(out) == "".join(map(str, bits.tolist()))
    # every new phrase is distinct
    assert len(set(phrases)) == len(phrases)


def test_lz78_known_parse():
    bits = np.array([1, 1, 0, 1, 1, 1, 0, 1], dtype=np.uint8)
    idx, lit = kernels.lz78_parse(bits)
    assert idx.tolist() == [0, 1, 1, 2]
    assert lit.tolist() == [1, 0, 1, 1]


@pytest.mark.parametrize("n", [1, 3, 7, 10])
def test_tensor_power_weights_match_products(n):
    eigs = np.array([0.7, 0.3])
    brute = [math.prod(eigs[list(w)]) for w in itertools.product(range(2), repeat=n)]
    for out in both(kernels.tensor_power_weights, eigs, n):
        np.testing.assert_allclose(out, brute, rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=200))
def test_ks_backends_agree(vals):
    c = np.sort(np.array(vals))
    a, b = both(kernels.ks_statistic, c)
    assert a == pytest.approx(b, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=300), st.integers(1, 30))
def test_histogram_backends_agree(vals, bins):
    v = np.array(vals)
    a, b = both(kernels.histogram_counts, v, -2.0, 2.0, bins)
    np.testing.assert_array_equal(a, b)


def test_trace_of_product_backends_agree():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((17, 17)) + 1j * rng.standard_normal((17, 17))
    b = rng.standard_normal((17, 17)) + 1j * rng.standard_normal((17, 17))
    x, y = both(kernels.trace_of_product, a, b)
    assert x == pytest.approx(np.trace(a @ b) / 17, abs=1e-12)
    assert y == pytest.approx(x, abs=1e-12)


@pytest.mark.parametrize("n,max_ones", [(0, 0), (5, 2), (8, 1), (12, 3), (16, 16)])
def test_low_weight_codes_enumeration(n, max_ones):
    brute = sorted(c for c in range(2**n) if bin(c).count("1") <= max_ones)
    for out in both(kernels.low_weight_codes, n, max_ones):
        assert out.tolist() == brute
