import numpy as np
import pytest

from ncrand import lawlib
from ncrand.errors import DimensionMismatch, ValidationError
from ncrand.rmt import (
    RandomMatrixEnsemble,
    RandomMatrixSpace,
    eigenvalues,
    mean_spectrum,
    sample,
    spectrum,
    tau_estimate,
)


def test_gue_hermitian_and_deterministic():
    e = RandomMatrixEnsemble("gue", 32, 7)
    a, b = sample(e, 3), sample(e, 3)
    assert np.array_equal(a, b)
    assert np.max(np.abs(a - a.conj().T)) <= 1e-12
    assert not np.array_equal(a, sample(e, 4))


def test_gue1_variance():
    e = RandomMatrixEnsemble("gue", 1, 11)
    x = np.array([sample(e, t)[0, 0] for t in range(10_000)])
    assert np.all(x.imag == 0)
    assert np.var(x.real) == pytest.approx(1, abs=0.03)


def test_gue_entry_statistics():
    e = RandomMatrixEnsemble("gue", 64, 12)
    h12 = np.array([sample(e, t)[0, 1] for t in range(10_000)])
    assert abs(h12.real.mean()) < 0.005 and abs(h12.imag.mean()) < 0.005
    # Re and Im each have variance 1/(2n)
    assert np.var(h12.real) == pytest.approx(1 / 128, rel=0.05)
    assert np.var(h12.imag) == pytest.approx(1 / 128, rel=0.05)


def test_haar_unitary():
    u = sample(RandomMatrixEnsemble("haar_unitary", 40, 1), 0)
    assert np.max(np.abs(u.conj().T @ u - np.eye(40))) <= 1e-10


def test_haar_left_invariance_statistical():
    # distribution of |U_11|^2 is Beta(1, n-1) with mean 1/n; left-multiplying by a fixed unitary keeps it
    n, trials = 8, 4000
    e = RandomMatrixEnsemble("haar_unitary", n, 2)
    w = sample(RandomMatrixEnsemble("haar_unitary", n, 99), 0)
    a = np.array([abs(sample(e, t)[0, 0]) ** 2 for t in range(trials)])
    b = np.array([abs((w @ sample(e, t))[0, 0]) ** 2 for t in range(trials)])
    se = np.sqrt((n - 1) / (n * n * (n + 1)) / trials)
    assert abs(a.mean() - 1 / n) < 4 * se
    assert abs(b.mean() - 1 / n) < 4 * se


def test_bernoulli_conjugated_spectrum():
    m = sample(RandomMatrixEnsemble("bernoulli_conjugated", 8, 5), 0)
    assert abs(np.trace(m)) <= 1e-9
    assert abs(np.trace(m @ m) - 8) <= 1e-9
    ev = eigenvalues(m)
    np.testing.assert_allclose(ev, [-1] * 4 + [1] * 4, atol=1e-10)
    with pytest.raises(ValidationError):
        RandomMatrixEnsemble("bernoulli_conjugated", 7)


def test_spectrum_trivial_cases():
    d = spectrum(np.eye(3))
    np.testing.assert_allclose(d.values, 1)
    assert d.weights.sum() == pytest.approx(1, abs=1e-12)
    d = spectrum(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(d.values, [1, 2, 3])
    np.testing.assert_allclose(d.weights, 1 / 3)
    with pytest.raises(ValidationError):
        spectrum(np.array([[0, 1], [0, 0]]))


def test_spectrum_residual_and_trace():
    a = sample(RandomMatrixEnsemble("gue", 100, 3), 0)
    d = spectrum(a, verify=True)
    assert abs(d.values.sum() - np.trace(a).real) <= 1e-8 * 100
    assert d.weights.sum() == pytest.approx(1, abs=1e-12)


def test_gue512_semicircle_ks():
    a = sample(RandomMatrixEnsemble("gue", 512, 0), 0)
    assert lawlib.ks_distance(spectrum(a).as_law(), lawlib.STANDARD_SEMICIRCLE) < 0.06


def test_mean_spectrum_against_semicircle_bins():
    d = mean_spectrum(RandomMatrixEnsemble("gue", 256, 4), 50, 40, (-2, 2))
    h = d.histogram
    expected = lawlib.bin_probabilities(lawlib.STANDARD_SEMICIRCLE, h.edges) / np.diff(h.edges)
    good = np.abs(h.density - expected) <= 3 * h.mc_sigma
    assert good.sum() >= 38
    assert d.weights.sum() == pytest.approx(1, abs=1e-12)


def test_mean_spectrum_single_trial_is_sample_spectrum():
    e = RandomMatrixEnsemble("gue", 16, 8)
    d = mean_spectrum(e, 1, 5)
    np.testing.assert_array_equal(d.values, spectrum(sample(e, 0)).values)


def test_mean_spectrum_bernoulli_two_atoms():
    d = mean_spectrum(RandomMatrixEnsemble("bernoulli_conjugated", 64, 1), 20, 4)
    plus = d.weights[np.abs(d.values - 1) < 1e-9].sum()
    minus = d.weights[np.abs(d.values + 1) < 1e-9].sum()
    assert plus == pytest.approx(0.5, abs=1e-9) and minus == pytest.approx(0.5, abs=1e-9)


def test_gue_invariance_statistical():
    n, trials, bins = 64, 40, 10
    u0 = sample(RandomMatrixEnsemble("haar_unitary", n, 3), 0)
    e = RandomMatrixEnsemble("gue", n, 6)
    plain = [eigenvalues(sample(e, t)) for t in range(trials)]
    # a second independent stream, conjugated
    e2 = RandomMatrixEnsemble("gue", n, 7)
    conj = [eigenvalues(u0 @ sample(e2, t) @ u0.conj().T) for t in range(trials)]
    edges = (-2.2, 2.2)
    ha = np.array([lawlib.histogram(v, bins, edges).density for v in plain])
    hb = np.array([lawlib.histogram(v, bins, edges).density for v in conj])
    sigma = np.sqrt(ha.var(axis=0, ddof=1) / trials + hb.var(axis=0, ddof=1) / trials)
    assert np.all(np.abs(ha.mean(0) - hb.mean(0)) <= 3 * sigma + 1e-12)


def test_tau_identity():
    est = tau_estimate(RandomMatrixSpace(8, 5), ["I"], {})
    assert est.value == 1 and est.se == 0


def test_tau_second_moment():
    space = RandomMatrixSpace(64, 200)
    est = tau_estimate(space, ["H", "H"], {"H": RandomMatrixEnsemble("gue", 64, 2)})
    assert abs(est.value - 1) <= 3 * est.se


def test_tau_alternating_free():
    ens = {"H1": RandomMatrixEnsemble("gue", 512, 10), "H2": RandomMatrixEnsemble("gue", 512, 11)}
    est = tau_estimate(RandomMatrixSpace(512, 20), ["H1", "H2", "H1", "H2"], ens)
    assert abs(est.value) < 0.15


def test_tau_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tau_estimate(RandomMatrixSpace(8, 2), ["H"], {"H": RandomMatrixEnsemble("gue", 4)})
