"""Finite-depth Martin-Löf machinery for binary sequences.

* null covers checked against an explicit recursive modulus,
* a four-test statistical battery (frequency, block frequency, runs,
  compressibility),
* an incremental dictionary coder whose code length serves as the
  descriptive-information proxy,
* von Mises-Church place selection.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaincc

from . import kernels
from .errors import ValidationError
from .seqspace import BitString, PrefixSet, as_bitstring, prefix_set_measure

MIN_BATTERY_LENGTH = 256
MIN_COMPRESS_LENGTH = 64
BLOCK_SIZE = 128


class ModulusOutOfRange(ValidationError):
    pass


class InputTooShort(ValidationError):
    pass


# ---------------------------------------------------------------------------
# null covers


@dataclass(frozen=True)
class NullCoverWitness:
    """A cover ``n -> G_n`` with modulus ``f``, evaluated up to ``max_level``.

    The claim being witnessed is ``measure(G_n) < 2**-k`` whenever
    ``n >= f(k)``.
    """

    cover: Callable[[int], PrefixSet]
    modulus: Callable[[int], int]
    max_level: int


@dataclass
class NullCoverReport:
    k_max: int
    max_level: int
    per_k: dict[int, bool]
    modulus: dict[int, int]
    # for each k, the level n in [f(k), max_level] with the largest measure
    worst_level: dict[int, int]
    worst_measure: dict[int, Fraction]

    @property
    def passed(self) -> bool:
        return all(self.per_k.values())

    def to_dict(self) -> dict:
        from .seqspace import format_dyadic

        return {
            "k_max": self.k_max,
            "max_level": self.max_level,
            "passed": self.passed,
            "levels": [
                {
                    "k": k,
                    "f_k": self.modulus[k],
                    "holds": self.per_k[k],
                    "worst_level": self.worst_level[k],
                    "worst_measure": format_dyadic(self.worst_measure[k]),
                }
                for k in sorted(self.per_k)
            ],
        }


def verify_null_cover(w: NullCoverWitness, k_max: int) -> NullCoverReport:
    """Check ``measure(G_n) < 2**-k`` for every ``k <= k_max`` and
    ``f(k) <= n <= max_level``, in exact rational arithmetic."""
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    f = {k: int(w.modulus(k)) for k in range(1, k_max + 1)}
    if any(f[k + 1] < f[k] for k in range(1, k_max)):
        raise ValidationError("modulus must be nondecreasing")
    if f[k_max] > w.max_level:
        raise ModulusOutOfRange(f"f({k_max}) = {f[k_max]} exceeds max_level = {w.max_level}")

    measures: dict[int, Fraction] = {}

    def measure(n):
        if n not in measures:
            measures[n] = prefix_set_measure(w.cover(n))
        return measures[n]

    per_k, worst_level, worst_measure = {}, {}, {}
    for k in range(1, k_max + 1):
        bound = Fraction(1, 1 << k)
        levels = range(max(f[k], 1), w.max_level + 1)
        n_worst = max(levels, key=measure)
        worst_level[k] = n_worst
        worst_measure[k] = measure(n_worst)
        per_k[k] = worst_measure[k] < bound
    return NullCoverReport(k_max, w.max_level, per_k, f, worst_level, worst_measure)


def zeros_cover(n: int) -> PrefixSet:
    """``G_n = {0^n}``, covering the all-zeros sequence."""
    return PrefixSet([BitString.zeros(n)])


def full_cover(n: int) -> PrefixSet:
    return PrefixSet(["0", "1"])


def low_weight_cover(n: int, fraction: Fraction = Fraction(1, 4)) -> PrefixSet:
    """All length-``n`` words with strictly fewer than ``fraction * n`` ones."""
    max_ones = math.ceil(fraction * n) - 1
    if max_ones < 0:
        return PrefixSet()
    return PrefixSet.from_codes(n, kernels.low_weight_codes(n, max_ones))


# ---------------------------------------------------------------------------
# dictionary coder


def _gamma_bits(n: int) -> str:
    b = format(n, "b")
    return "0" * (len(b) - 1) + b


def _index_width(dict_size: int) -> int:
    # ceil(log2(size)); zero bits while the dictionary holds only the empty phrase
    return (dict_size - 1).bit_length()


def header_bits(n: int) -> int:
    """Header cost of the coder for an ``n``-bit input: Elias gamma of ``n`` plus a mode bit."""
    return 2 * n.bit_length()


def _dictionary_payload_bits(indices: np.ndarray, literals: np.ndarray) -> int:
    sizes = np.arange(1, indices.size + 1)
    widths = np.array([_index_width(int(s)) for s in sizes], dtype=np.int64)
    return int(widths.sum() + np.count_nonzero(literals >= 0))


@dataclass(frozen=True)
class Encoding:
    data: bytes
    n_bits: int
    mode: str
    n_phrases: int


def encode(prefix: Union[BitString, str]) -> Encoding:
    """Encode with the incremental dictionary coder.

    Bit layout, packed big-endian and zero-padded to a whole byte:

    1. Elias gamma code of the input length ``n`` (``n >= 1``);
    2. one mode bit: ``0`` dictionary mode, ``1`` stored mode;
    3. dictionary mode: for the ``i``-th phrase (1-based) the index of its
       longest proper prefix already in the dictionary, written in
       ``ceil(log2(i))`` bits, followed by one literal bit.  The dictionary
       starts with the empty phrase (index 0), so its size before the
       ``i``-th emission is ``i``.  A final phrase that is already in the
       dictionary is written as its index alone.
       Stored mode: the ``n`` input bits verbatim.

    Stored mode is used only when it is strictly shorter, which caps the
    payload at ``n`` bits.
    """
    prefix = as_bitstring(prefix)
    n = len(prefix)
    if n < 1:
        raise InputTooShort("cannot encode the empty string")
    bits = prefix.to_array()
    indices, literals = kernels.lz78_parse(bits)
    out = [_gamma_bits(n)]
    if _dictionary_payload_bits(indices, literals) <= n:
        out.append("0")
        for i, (idx, lit) in enumerate(zip(indices.tolist(), literals.tolist()), start=1):
            width = _index_width(i)
            if width:
                out.append(format(idx, f"0{width}b"))
            if lit >= 0:
                out.append(str(lit))
        mode = "dictionary"
    else:
        out.append("1")
        out.append(prefix.bits)
        mode = "stored"
    s = "".join(out)
    padded = s + "0" * (-len(s) % 8)
    data = int(padded, 2).to_bytes(len(padded) // 8, "big") if padded else b""
    return Encoding(data, len(s), mode, int(indices.size))


def decode(data: bytes) -> BitString:
    """Invert :func:`encode`."""
    s = format(int.from_bytes(data, "big"), f"0{8 * len(data)}b")
    zeros = len(s) - len(s.lstrip("0"))
    n = int(s[zeros : 2 * zeros + 1], 2)
    pos = 2 * zeros + 1
    mode, pos = s[pos], pos + 1
    if mode == "1":
        return BitString(s[pos : pos + n])
    phrases = [""]
    out, produced = [], 0
    while produced < n:
        width = _index_width(len(phrases))
        idx = int(s[pos : pos + width], 2) if width else 0
        pos += width
        phrase = phrases[idx]
        if produced + len(phrase) < n:
            phrase += s[pos]
            pos += 1
            phrases.append(phrase)
        out.append(phrase)
        produced += len(phrase)
    return BitString("".join(out))


def code_length(prefix: Union[BitString, str]) -> int:
    """Length in bits of :func:`encode` output, without byte padding."""
    return encode(prefix).n_bits


def compress_estimate(prefix: Union[BitString, str]) -> float:
    """Code length per input symbol of the dictionary coder.

    Never exceeds ``1 + header_bits(n) / n``.
    """
    prefix = as_bitstring(prefix)
    if len(prefix) < MIN_COMPRESS_LENGTH:
        raise InputTooShort(f"need at least {MIN_COMPRESS_LENGTH} bits, got {len(prefix)}")
    return code_length(prefix) / len(prefix)


# ---------------------------------------------------------------------------
# statistical battery


@dataclass
class TestReport:
    test_name: str
    statistic: float
    p_value: float
    significance: float
    verdict: str = field(init=False)
    note: str = ""

    __test__ = False  # not a pytest class

    def __post_init__(self):
        self.verdict = "fail" if self.p_value < self.significance else "pass"
        if self.p_value == 0.0 and not self.note:
            self.note = "p-value underflow, reported as 0"

    def to_dict(self) -> dict:
        d = {
            "name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "verdict": self.verdict,
        }
        if self.note:
            d["note"] = self.note
        return d


def frequency_test(bits: np.ndarray, significance: float) -> TestReport:
    """Monobit test: normalized excess of ones, two-sided normal tail."""
    n = bits.size
    s = abs(2 * int(bits.sum()) - n) / math.sqrt(n)
    return TestReport("frequency", s, math.erfc(s / math.sqrt(2)), significance)


def block_frequency_test(bits: np.ndarray, significance: float, block: int = BLOCK_SIZE) -> TestReport:
    """Chi-square on the proportion of ones in non-overlapping blocks."""
    n_blocks = bits.size // block
    props = bits[: n_blocks * block].reshape(n_blocks, block).mean(axis=1)
    chi2 = 4.0 * block * float(np.sum((props - 0.5) ** 2))
    return TestReport("block_frequency", chi2, float(gammaincc(n_blocks / 2, chi2 / 2)), significance)


def runs_test(bits: np.ndarray, significance: float) -> TestReport:
    """Total number of runs against its normal approximation.

    If the ones-proportion already fails the frequency prerequisite
    ``|pi - 1/2| < 2/sqrt(n)`` the test is not applicable and reports p = 0.
    """
    n = bits.size
    pi = float(bits.mean())
    runs = int(np.count_nonzero(np.diff(bits))) + 1
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return TestReport("runs", float(runs), 0.0, significance, note="frequency prerequisite failed")
    z = abs(runs - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi))
    return TestReport("runs", float(runs), math.erfc(z), significance)


def compressibility_test(prefix: BitString, significance: float) -> TestReport:
    """Dictionary-coder deficiency test.

    With ``d = n - code_length`` bits saved, at most ``2**(n - d + 1)`` of the
    ``2**n`` inputs can be coded that short by any injective coder, so
    ``min(1, 2**(1 - d))`` bounds the null probability.  The statistic is
    the coded rate in bits per symbol.
    """
    n = len(prefix)
    length = code_length(prefix)
    p = min(1.0, math.ldexp(1.0, 1 - (n - length)))
    return TestReport("compressibility", length / n, p, significance)


def run_test_battery(prefix: Union[BitString, str], significance: float) -> list[TestReport]:
    prefix = as_bitstring(prefix)
    if len(prefix) < MIN_BATTERY_LENGTH:
        raise InputTooShort(f"battery needs at least {MIN_BATTERY_LENGTH} bits, got {len(prefix)}")
    if not 0 < significance < 1:
        raise ValidationError("significance must lie in (0, 1)")
    bits = prefix.to_array().astype(np.int64)
    return [
        frequency_test(bits, significance),
        block_frequency_test(bits, significance),
        runs_test(bits, significance),
        compressibility_test(prefix, significance),
    ]


def battery_json(prefix: Union[BitString, str], significance: float) -> str:
    reports = run_test_battery(prefix, significance)
    return json.dumps(
        {
            "input_length": len(as_bitstring(prefix)),
            "significance": significance,
            "tests": [r.to_dict() for r in reports],
        },
        indent=2,
    )


# ---------------------------------------------------------------------------
# place selection


@dataclass(frozen=True)
class PlaceSelectionRule:
    """``decide(history)`` sees only the bits before the candidate position.

    ``history`` is a read-only ``uint8`` array; the candidate index equals
    ``len(history)``.
    """

    rule_id: str
    decide: Callable[[np.ndarray], bool]


SELECT_ALL = PlaceSelectionRule("all", lambda h: True)
AFTER_ONE = PlaceSelectionRule("after-one", lambda h: h.size > 0 and h[-1] == 1)
EVEN_POSITIONS = PlaceSelectionRule("even", lambda h: h.size % 2 == 0)

RULES = {r.rule_id: r for r in (SELECT_ALL, AFTER_ONE, EVEN_POSITIONS)}


@dataclass
class SelectionResult:
    rule_id: str
    source_length: int
    subsequence: BitString
    positions: np.ndarray
    source_frequency: float
    selected_frequency: float

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "source_length": self.source_length,
            "selected_length": len(self.subsequence),
            "source_frequency": self.source_frequency,
            "selected_frequency": self.selected_frequency,
        }


def _frequency(bits: np.ndarray) -> float:
    return float(bits.mean()) if bits.size else float("nan")


def select_subsequence(prefix: Union[BitString, str], rule: PlaceSelectionRule) -> SelectionResult:
    """Apply a causal selection rule and compare relative frequencies of ones."""
    bits = as_bitstring(prefix).to_array().copy()
    bits.setflags(write=False)
    chosen = [i for i in range(bits.size) if rule.decide(bits[:i])]
    positions = np.array(chosen, dtype=np.int64)
    sub = bits[positions]
    return SelectionResult(
        rule.rule_id, int(bits.size), BitString.from_array(sub), positions, _frequency(bits), _frequency(sub)
    )


def alternating(n: int, start: str = "0") -> BitString:
    other = "1" if start == "0" else "0"
    return BitString(((start + other) * (n // 2 + 1))[:n])
