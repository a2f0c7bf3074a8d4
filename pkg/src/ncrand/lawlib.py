"""Limit laws on the real line: Gaussian, semicircle and empirical.

Exact moments are integers; :func:`numeric_moment` recomputes them by
quadrature so the two routes can be checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from . import kernels
from .errors import NonConvergence, ValidationError

QUAD_TOL = 1e-10
QUAD_MAX_EVALS = 10**6
# truncation half-width of the Gaussian, in units of sigma
GAUSS_CUTOFF = 12.0


@dataclass(frozen=True)
class SpectralLaw:
    """A law on the real line.

    ``kind`` is ``"gaussian"`` (``loc`` = mean, ``scale`` = sigma),
    ``"semicircle"`` (``loc`` = mean, ``scale`` = radius r, variance r²/4)
    or ``"empirical"`` (``samples`` sorted, weight 1/N each).
    """

    kind: str
    loc: float = 0.0
    scale: float = 1.0
    samples: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind in ("gaussian", "semicircle"):
            if not self.scale > 0:
                raise ValidationError(f"{self.kind} scale must be positive")
        elif self.kind == "empirical":
            s = np.sort(np.asarray(self.samples, dtype=float).ravel())
            if s.size == 0:
                raise ValidationError("empirical law needs at least one sample")
            object.__setattr__(self, "samples", s)
        else:
            raise ValidationError(f"unknown law kind {self.kind!r}")

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "semicircle":
            return (self.loc - self.scale, self.loc + self.scale)
        if self.kind == "empirical":
            return (float(self.samples[0]), float(self.samples[-1]))
        return (-math.inf, math.inf)


def gaussian(m: float = 0.0, sigma: float = 1.0) -> SpectralLaw:
    return SpectralLaw("gaussian", m, sigma)


def semicircle(m: float = 0.0, r: float = 2.0) -> SpectralLaw:
    return SpectralLaw("semicircle", m, r)


def empirical(samples: Sequence[float]) -> SpectralLaw:
    return SpectralLaw("empirical", samples=np.asarray(samples, dtype=float))


STANDARD_GAUSSIAN = gaussian(0.0, 1.0)
STANDARD_SEMICIRCLE = semicircle(0.0, 2.0)


def density(law: SpectralLaw, x):
    """Density of a Gaussian or semicircle law; vectorized over ``x``."""
    x = np.asarray(x, dtype=float)
    if law.kind == "gaussian":
        s2 = law.scale**2
        out = np.exp(-((x - law.loc) ** 2) / (2 * s2)) / math.sqrt(2 * math.pi * s2)
    elif law.kind == "semicircle":
        r = law.scale
        inside = np.clip(r * r - (x - law.loc) ** 2, 0.0, None)
        out = 2.0 / (math.pi * r * r) * np.sqrt(inside)
    else:
        raise ValidationError("an empirical law has no density")
    return out if out.ndim else float(out)


def cdf(law: SpectralLaw, x):
    """Distribution function; right-continuous steps for empirical laws."""
    x = np.asarray(x, dtype=float)
    if law.kind == "gaussian":
        out = ndtr((x - law.loc) / law.scale)
    elif law.kind == "semicircle":
        # standard form on [-2, 2]: 1/2 + t sqrt(4 - t²)/(4 pi) + arcsin(t/2)/pi
        t = np.clip(2.0 * (x - law.loc) / law.scale, -2.0, 2.0)
        out = 0.5 + t * np.sqrt(4.0 - t * t) / (4 * math.pi) + np.arcsin(t / 2) / math.pi
    else:
        out = np.searchsorted(law.samples, x, side="right") / law.samples.size
    return out if np.ndim(out) else float(out)


def exact_moment(kind: str, n: int) -> int:
    """n-th moment of the standard Gaussian ((2k-1)!!) or standard semicircle (Catalan)."""
    if n < 0:
        raise ValidationError("moment order must be nonnegative")
    if kind not in ("standard_gaussian", "standard_semicircle", "gaussian", "semicircle"):
        raise ValidationError(f"unknown law {kind!r}")
    if n % 2:
        return 0
    k = n // 2
    if kind.endswith("gaussian"):
        return math.prod(range(1, 2 * k, 2))
    return math.comb(2 * k, k) // (k + 1)


def numeric_moment(law: SpectralLaw, n: int) -> float:
    """n-th moment by adaptive quadrature, or the sample moment for empirical laws.

    Semicircle moments use the algebraic endpoint weight
    ``sqrt(x - a) sqrt(b - x)`` so the square-root edges cost nothing.
    The Gaussian is integrated over ``m ± 12 sigma``; for n <= 12 the
    discarded tail is below 1e-20.
    """
    if n < 0:
        raise ValidationError("moment order must be nonnegative")
    if law.kind == "empirical":
        return float(np.mean(law.samples**n))
    limit = 1000
    if law.kind == "semicircle":
        a, b = law.support
        c = 2.0 / (math.pi * law.scale**2)
        val, err, info = integrate.quad(
            lambda x: c * x**n, a, b, weight="alg", wvar=(0.5, 0.5),
            epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=limit, full_output=1,
        )[:3]
    else:
        half = GAUSS_CUTOFF * law.scale
        val, err, info = integrate.quad(
            lambda x: x**n * density(law, x), law.loc - half, law.loc + half,
            points=[law.loc], epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=limit, full_output=1,
        )[:3]
    if info["neval"] > QUAD_MAX_EVALS or err > 1e-6 * max(1.0, abs(val)):
        raise NonConvergence(f"quadrature did not converge (error estimate {err:.3g})")
    return float(val)


def ks_distance(sample: SpectralLaw, reference: SpectralLaw) -> float:
    """Kolmogorov-Smirnov distance between an empirical law and a continuous one."""
    if sample.kind != "empirical":
        raise ValidationError("first argument must be an empirical law")
    if reference.kind == "empirical":
        raise ValidationError("reference must be a Gaussian or semicircle law")
    return kernels.ks_statistic(np.asarray(cdf(reference, sample.samples), dtype=float))


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    mc_sigma: Optional[np.ndarray] = None

    @property
    def left(self):
        return self.edges[:-1]

    @property
    def right(self):
        return self.edges[1:]

    def rows(self):
        cols = [self.left, self.right, self.counts, self.density]
        if self.mc_sigma is not None:
            cols.append(self.mc_sigma)
        return zip(*(c.tolist() for c in cols))

    def header(self):
        base = ["bin_left", "bin_right", "count", "density_estimate"]
        return base + (["mc_sigma"] if self.mc_sigma is not None else [])


def histogram(values, bins: int, range: Optional[tuple[float, float]] = None) -> Histogram:
    """Equal-width histogram normalized by the total number of values."""
    values = np.asarray(values, dtype=float).ravel()
    if bins < 1:
        raise ValidationError("bins must be positive")
    lo, hi = range if range is not None else (float(values.min()), float(values.max()))
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    counts = kernels.histogram_counts(values, float(lo), float(hi), int(bins))
    edges = np.linspace(lo, hi, bins + 1)
    dens = counts / (values.size * np.diff(edges))
    return Histogram(edges, counts, dens)


def bin_probabilities(law: SpectralLaw, edges: np.ndarray) -> np.ndarray:
    """Mass the law assigns to each bin."""
    return np.diff(np.asarray(cdf(law, edges), dtype=float))
