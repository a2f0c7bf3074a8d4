"""Finite words over {0, 1}, dyadic expansion, cylinder sets and their
unbiased measure.

Infinite sequences are never materialized: a sequence is either a
prefix followed by a constant tail, or whatever a seeded generator
yields.  Every measure here is an exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import ValidationError

#: longest member a PrefixSet can hold (members are packed into uint64)
MAX_PREFIX_LENGTH = 64


@dataclass(frozen=True)
class BitString:
    """An immutable finite word over ``{0, 1}``; the empty word is allowed."""

    bits: str = ""

    def __post_init__(self):
        if not isinstance(self.bits, str):
            object.__setattr__(self, "bits", "".join(str(int(b)) for b in self.bits))
        if self.bits.strip("01"):
            raise ValidationError(f"not a bit string: {self.bits!r}")

    @classmethod
    def from_array(cls, arr) -> "BitString":
        arr = np.asarray(arr)
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValidationError("array holds symbols other than 0 and 1")
        return cls(arr.astype(np.uint8).tobytes().translate(_TO_ASCII).decode("ascii"))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls("0" * n)

    @classmethod
    def random(cls, n: int, seed: int) -> "BitString":
        """Uniform random word of length ``n`` from a seeded generator."""
        return cls.from_array(np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.uint8))

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return self.bits

    def __add__(self, other: Union["BitString", str]) -> "BitString":
        return BitString(self.bits + str(other))

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitString(self.bits[idx])
        return int(self.bits[idx])

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.bits.encode("ascii"), dtype=np.uint8) - ord("0")

    def complement(self) -> "BitString":
        return BitString(self.bits.translate(_FLIP))

    def is_prefix_of(self, other: "BitString") -> bool:
        return other.bits.startswith(self.bits)

    def to_code(self) -> int:
        return int(self.bits, 2) if self.bits else 0


_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")
_FLIP = str.maketrans("01", "10")


def as_bitstring(x: Union[BitString, str]) -> BitString:
    return x if isinstance(x, BitString) else BitString(x)


@dataclass(frozen=True)
class DyadicValue:
    """The number ``numerator / 2**exponent`` in [0, 1], kept reduced."""

    numerator: int
    exponent: int

    def __post_init__(self):
        p, k = self.numerator, self.exponent
        if p < 0 or k < 0 or p > (1 << k):
            raise ValidationError(f"{p}/2^{k} is outside [0, 1]")
        if p == 0:
            k = 0
        while k > 0 and p % 2 == 0:
            p //= 2
            k -= 1
        object.__setattr__(self, "numerator", p)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "DyadicValue":
        value = Fraction(value)
        k = value.denominator.bit_length() - 1
        if value.denominator != 1 << k:
            raise ValidationError(f"{value} is not dyadic")
        return cls(value.numerator, k)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self):
        return self.numerator / (1 << self.exponent)

    def __str__(self):
        return format_dyadic(self.as_fraction())


def format_dyadic(value: Fraction) -> str:
    """Serialize a dyadic rational as ``"p/2^k"``."""
    value = Fraction(value)
    k = value.denominator.bit_length() - 1
    if value.denominator != 1 << k:
        raise ValidationError(f"{value} is not dyadic")
    return f"{value.numerator}/2^{k}"


def parse_dyadic(text: str) -> Fraction:
    p, _, k = text.partition("/2^")
    return Fraction(int(p), 1 << int(k))


def dyadic_expand(prefix: Union[BitString, str], tail: str = "zeros") -> DyadicValue:
    """Value of ``sum x_n / 2**n`` for the sequence ``prefix`` + constant tail.

    ``tail="ones"`` adds ``2**-len(prefix)`` to the all-zeros-tail value, so
    ``dyadic_expand(x + "1", "zeros") == dyadic_expand(x + "0", "ones")``.
    """
    prefix = as_bitstring(prefix)
    if tail not in ("zeros", "ones"):
        raise ValidationError(f"tail must be 'zeros' or 'ones', got {tail!r}")
    n = len(prefix)
    numerator = prefix.to_code()
    if tail == "ones":
        numerator += 1
    return DyadicValue(numerator, n)


def cylinder_measure(x: Union[BitString, str]) -> Fraction:
    """Unbiased measure of the cylinder of sequences extending ``x``."""
    return Fraction(1, 1 << len(as_bitstring(x)))


class PrefixSet:
    """A finite set of words, denoting the open set of all their extensions.

    Members are stored per length as sorted ``uint64`` codes, which keeps
    covers with millions of members cheap.  Lengths are capped at
    :data:`MAX_PREFIX_LENGTH`.
    """

    __slots__ = ("_by_length",)

    def __init__(self, members: Iterable[Union[BitString, str]] = ()):
        groups: dict[int, list[int]] = {}
        for m in members:
            m = as_bitstring(m)
            groups.setdefault(len(m), []).append(m.to_code())
        self._by_length = {
            n: np.unique(np.array(codes, dtype=np.uint64)) for n, codes in groups.items()
        }
        self._check_lengths()

    @classmethod
    def from_codes(cls, length: int, codes) -> "PrefixSet":
        """All members of one ``length``, given as integer codes (MSB first)."""
        out = cls.__new__(cls)
        codes = np.unique(np.asarray(codes, dtype=np.uint64))
        if length < 64 and codes.size and codes[-1] >> np.uint64(length):
            raise ValidationError(f"code does not fit in {length} bits")
        out._by_length = {length: codes} if codes.size else {}
        out._check_lengths()
        return out

    def _check_lengths(self):
        if self._by_length and max(self._by_length) > MAX_PREFIX_LENGTH:
            raise ValidationError(f"members longer than {MAX_PREFIX_LENGTH} bits are not supported")

    def __len__(self):
        return int(sum(c.size for c in self._by_length.values()))

    def __iter__(self) -> Iterator[BitString]:
        for n in sorted(self._by_length):
            for c in self._by_length[n].tolist():
                yield BitString(format(c, f"0{n}b") if n else "")

    def __contains__(self, x):
        x = as_bitstring(x)
        codes = self._by_length.get(len(x))
        if codes is None:
            return False
        i = np.searchsorted(codes, np.uint64(x.to_code()))
        return bool(i < codes.size and codes[i] == x.to_code())

    def __eq__(self, other):
        if not isinstance(other, PrefixSet):
            return NotImplemented
        return self._by_length.keys() == other._by_length.keys() and all(
            np.array_equal(v, other._by_length[k]) for k, v in self._by_length.items()
        )

    def __repr__(self):
        shown = [str(m) or "ε" for _, m in zip(range(6), self)]
        more = ", ..." if len(self) > 6 else ""
        return f"PrefixSet({{{', '.join(shown)}{more}}})"

    @property
    def members(self) -> list[BitString]:
        return list(self)

    def union(self, other: "PrefixSet") -> "PrefixSet":
        out = PrefixSet.__new__(PrefixSet)
        merged = dict(self._by_length)
        for n, codes in other._by_length.items():
            merged[n] = np.union1d(merged[n], codes) if n in merged else codes
        out._by_length = merged
        return out

    def canonical(self) -> "PrefixSet":
        """Prefix-free equivalent: drop every member that extends another."""
        kept: dict[int, np.ndarray] = {}
        for n in sorted(self._by_length):
            codes = self._by_length[n]
            for m, shorter in kept.items():
                if not codes.size:
                    break
                if m == 0:
                    codes = codes[:0]
                else:
                    codes = codes[~np.isin(codes >> np.uint64(n - m), shorter)]
            if codes.size:
                kept[n] = codes
        out = PrefixSet.__new__(PrefixSet)
        out._by_length = kept
        return out

    def is_prefix_free(self) -> bool:
        return len(self.canonical()) == len(self)

    def measure(self) -> Fraction:
        return prefix_set_measure(self)


def prefix_set_measure(s: Union[PrefixSet, Iterable]) -> Fraction:
    """Unbiased measure of the open set of sequences starting with a member of ``s``."""
    if not isinstance(s, PrefixSet):
        s = PrefixSet(s)
    groups = s.canonical()._by_length
    if not groups:
        return Fraction(0)
    top = max(groups)
    return Fraction(sum(int(c.size) << (top - n) for n, c in groups.items()), 1 << top)
