"""Computable reals: rational approximants with a ``2**-k`` guarantee.

A :class:`ComputableReal` wraps a procedure ``k -> r_k`` with
``|r_k - x| <= 2**-k``.  Every operation derives the working precision
of its inputs from the guarantee it must meet, so results compose
without any floating point.
"""

from __future__ import annotations

import ast
import math
import threading
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import NonConvergence, ValidationError

Rational = Union[int, Fraction]


class DivisionBoundMissing(ValidationError):
    pass


def _ceil_log2(q: Fraction) -> int:
    """Smallest t >= 0 with 2**t >= q."""
    m = math.ceil(q)
    return max(0, (m - 1).bit_length())


def _round(q: Fraction, k: int) -> Fraction:
    """Nearest multiple of 2**-k; error at most 2**-(k+1)."""
    return Fraction(round(q * (1 << k)), 1 << k)


class ComputableReal:
    """A real number given by rational approximants.

    ``approximant(k)`` must return a rational within ``2**-k`` of the
    represented value.  Results are memoized per instance behind a lock,
    so instances can be shared across threads.
    """

    def __init__(self, approximant: Callable[[int], Rational], name: Optional[str] = None):
        self._approximant = approximant
        self._cache: dict[int, Fraction] = {}
        self._lock = threading.Lock()
        self.name = name

    def approx(self, k: int) -> Fraction:
        if k < 0:
            raise ValidationError("precision index must be nonnegative")
        with self._lock:
            hit = self._cache.get(k)
        if hit is not None:
            return hit
        r = Fraction(self._approximant(k))
        with self._lock:
            self._cache.setdefault(k, r)
        return r

    def magnitude_bound(self) -> Fraction:
        """A rational B with |x| <= B."""
        return abs(self.approx(0)) + 1

    def __repr__(self):
        label = self.name or "ComputableReal"
        return f"<{label} ~ {float(self.approx(53)):.17g}>"

    def __neg__(self):
        return ComputableReal(lambda k: -self.approx(k))

    def __add__(self, other):
        return field_op("add", self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return field_op("sub", self, _coerce(other))

    def __rsub__(self, other):
        return field_op("sub", _coerce(other), self)

    def __mul__(self, other):
        return field_op("mul", self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.name and other.name.startswith("rational:"):
            q = other.approx(0)
            if q == 0:
                raise ZeroDivisionError("division by the rational 0")
            return field_op("div", self, other, bound=abs(q))
        raise DivisionBoundMissing("use field_op('div', x, y, bound=...) with a lower bound on |y|")


def _coerce(x) -> ComputableReal:
    if isinstance(x, ComputableReal):
        return x
    if isinstance(x, (int, Fraction)):
        return from_rational(x)
    raise TypeError(f"cannot combine ComputableReal with {type(x).__name__}")


def from_rational(q: Rational) -> ComputableReal:
    q = Fraction(q)
    return ComputableReal(lambda k: q, name=f"rational:{q}")


def approx(x: ComputableReal, k: int) -> Fraction:
    return x.approx(k)


# ---------------------------------------------------------------------------
# field operations


def reciprocal(y: ComputableReal, bound: Rational) -> ComputableReal:
    """``1/y`` given a rational ``bound`` with ``0 < bound <= |y|``."""
    b = Fraction(bound)
    if b <= 0:
        raise ValidationError("separation bound must be positive")
    # 2**-p <= b/2 keeps the approximant away from 0; 2**-p * 2/b**2 <= 2**-(k+1)
    base = _ceil_log2(2 / b)
    slack = _ceil_log2(2 / (b * b))

    def approximant(k):
        p = max(base, k + 1 + slack)
        return _round(1 / y.approx(p), k + 1)

    return ComputableReal(approximant)


def field_op(op: str, x: ComputableReal, y: ComputableReal, bound: Optional[Rational] = None) -> ComputableReal:
    """``x op y`` for ``op`` in add, sub, mul, div.

    Division needs ``bound``, a positive rational lower bound on ``|y|``;
    zero-testing a computable real is undecidable so it cannot be derived.
    """
    if op == "add":
        return ComputableReal(lambda k: _round(x.approx(k + 2) + y.approx(k + 2), k + 2))
    if op == "sub":
        return ComputableReal(lambda k: _round(x.approx(k + 2) - y.approx(k + 2), k + 2))
    if op == "mul":

        def approximant(k):
            # |xy - ab| <= |x||y-b| + |b||x-a| <= (Bx + By + 1) 2**-p
            w = x.magnitude_bound() + y.magnitude_bound() + 1
            p = k + 1 + _ceil_log2(w)
            return _round(x.approx(p) * y.approx(p), k + 1)

        return ComputableReal(approximant)
    if op == "div":
        if bound is None:
            raise DivisionBoundMissing("division requires a positive lower bound on |y|")
        return field_op("mul", x, reciprocal(y, bound))
    raise ValidationError(f"unknown field operation {op!r}")


def separation_bound(y: ComputableReal, max_k: int = 256) -> Fraction:
    """Search for a positive rational lower bound on ``|y|``.

    Succeeds as soon as some approximant clears ``2 * 2**-k``; raises
    :class:`NonConvergence` if ``y`` is still indistinguishable from 0 at
    ``max_k``.
    """
    for k in range(max_k + 1):
        r = abs(y.approx(k))
        eps = Fraction(1, 1 << k)
        if r > 2 * eps:
            return r - eps
    raise NonConvergence(f"could not separate the divisor from 0 within 2^-{max_k}")


# ---------------------------------------------------------------------------
# constants


def _arctan_inv(m: int, eps: Fraction) -> Fraction:
    """arctan(1/m) to within eps (alternating series, tail <= first omitted term)."""
    total, j = Fraction(0), 0
    m2 = m * m
    power = Fraction(1, m)
    while True:
        term = power / (2 * j + 1)
        if term < eps:
            return total
        total += term if j % 2 == 0 else -term
        power /= m2
        j += 1


def _pi_approx(k: int) -> Fraction:
    # pi = 16 atan(1/5) - 4 atan(1/239); each arctan to 2**-(k+6): 20 * 2**-(k+6) < 2**-(k+1)
    eps = Fraction(1, 1 << (k + 6))
    return _round(16 * _arctan_inv(5, eps) - 4 * _arctan_inv(239, eps), k + 1)


def _e_approx(k: int) -> Fraction:
    # sum_{j<=N} 1/j! with tail < 2/(N+1)!
    total, term, j = Fraction(0), Fraction(1), 0
    target = Fraction(1, 1 << (k + 2))
    while True:
        total += term
        j += 1
        term /= j
        if 2 * term <= target:
            return _round(total, k + 2)


def sqrt_rational(q: Rational) -> ComputableReal:
    """Square root of a nonnegative rational via integer square roots."""
    q = Fraction(q)
    if q < 0:
        raise ValidationError("square root of a negative rational")

    def approximant(k):
        m = (q.numerator << (2 * k)) // q.denominator
        return Fraction(math.isqrt(m), 1 << k)

    return ComputableReal(approximant, name=f"sqrt({q})")


ZERO = from_rational(0)
ONE = from_rational(1)
THREE = from_rational(3)
PI = ComputableReal(_pi_approx, name="pi")
E = ComputableReal(_e_approx, name="e")
SQRT2 = sqrt_rational(2)

CONSTANTS = {"pi": PI, "e": E, "sqrt2": SQRT2, "zero": ZERO, "one": ONE}


# ---------------------------------------------------------------------------
# sequences and limits


class ComputableSequence:
    """A sequence of computable reals produced by one procedure ``(n, k) -> r``.

    ``procedure(n, k)`` must lie within ``2**-k`` of the ``n``-th element;
    the single procedure is what makes the sequence uniformly computable.
    """

    def __init__(self, procedure: Callable[[int, int], Rational]):
        self._procedure = procedure
        self._elements: dict[int, ComputableReal] = {}
        self._lock = threading.Lock()

    @classmethod
    def of_rationals(cls, r: Callable[[int], Rational]) -> "ComputableSequence":
        return cls(lambda n, k: r(n))

    def approx(self, n: int, k: int) -> Fraction:
        return self.element(n).approx(k)

    def element(self, n: int) -> ComputableReal:
        with self._lock:
            x = self._elements.get(n)
            if x is None:
                x = self._elements[n] = ComputableReal(lambda k, n=n: self._procedure(n, k))
            return x

    __getitem__ = element


def alg_lim(s: ComputableSequence, modulus: Callable[[int], int]) -> ComputableReal:
    """Limit of ``s`` given a modulus with ``|s(n) - x| < 2**-N`` for ``n >= modulus(N)``."""
    return ComputableReal(lambda k: s.approx(modulus(k + 1), k + 1))


def linear_form(
    seqs: Sequence[ComputableSequence],
    coeffs: Sequence[Callable[[int, int], Rational]],
    degree: Callable[[int], int],
) -> ComputableSequence:
    """``s_n = sum_i sum_{j <= degree(n)} coeffs[i](n, j) * seqs[i](j)``.

    With two input sequences this is the linear-forms closure axiom; the
    result carries its own precision bookkeeping.
    """
    if len(seqs) != len(coeffs):
        raise ValidationError("one coefficient array per sequence")

    def procedure(n, k):
        terms = [
            (Fraction(c(n, j)), s, j)
            for s, c in zip(seqs, coeffs)
            for j in range(degree(n) + 1)
        ]
        weight = sum(abs(c) for c, _, _ in terms)
        p = k + 1 + _ceil_log2(weight + 1)
        return _round(sum((c * s.approx(j, p) for c, s, j in terms if c), Fraction(0)), k + 1)

    return ComputableSequence(procedure)


axiom_closure_check = linear_form


def norm_sequence(s: ComputableSequence) -> ComputableSequence:
    """``|s_n|``, computable with the same guarantee since ``||a|-|b|| <= |a-b|``."""
    return ComputableSequence(lambda n, k: abs(s.approx(n, k)))


def machin_sequence() -> tuple[ComputableSequence, Callable[[int], int]]:
    """Partial sums of Machin's series for pi, with their tail modulus.

    The ``N``-th element keeps ``N`` terms of each arctangent series; the
    tail is below ``20 / 5**(2N+1)``.
    """

    def partial(n):
        t5 = sum(Fraction((-1) ** j, (2 * j + 1) * 5 ** (2 * j + 1)) for j in range(n))
        t239 = sum(Fraction((-1) ** j, (2 * j + 1) * 239 ** (2 * j + 1)) for j in range(n))
        return 16 * t5 - 4 * t239

    def modulus(m):
        n = 0
        while Fraction(20, 5 ** (2 * n + 1)) >= Fraction(1, 1 << m):
            n += 1
        return n

    return ComputableSequence.of_rationals(partial), modulus


def consistency_violations(x: ComputableReal, ks: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs (k, j) with ``|r_k - r_j| > 2**-k + 2**-j``; empty for a sound approximant."""
    vals = {k: x.approx(k) for k in ks}
    return [
        (k, j)
        for k in ks
        for j in ks
        if abs(vals[k] - vals[j]) > Fraction(1, 1 << k) + Fraction(1, 1 << j)
    ]


# ---------------------------------------------------------------------------
# expression evaluation


def to_decimal(q: Fraction, digits: int) -> str:
    """Render ``q`` rounded to ``digits`` places after the point."""
    scaled = round(abs(q) * 10**digits)
    sign = "-" if q < 0 and scaled else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}" if digits else f"{sign}{whole}"


def decimal_digits(k: int) -> int:
    return math.ceil(k * math.log10(2))


def evaluate(expr: str) -> ComputableReal:
    """Build a computable real from an arithmetic expression.

    Accepts rational literals, the names ``pi``, ``e``, ``sqrt2``, ``zero``,
    ``one``, ``sqrt(<rational>)``, unary minus and ``+ - * /``.  Divisors are
    separated from 0 by :func:`separation_bound`.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ValidationError(f"cannot parse expression {expr!r}") from exc
    return _eval_node(tree.body)


def _rational_of(node) -> Fraction:
    x = _eval_node(node)
    if x.name and x.name.startswith("rational:"):
        return x.approx(0)
    raise ValidationError("sqrt() takes a rational argument")


def _eval_node(node) -> ComputableReal:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return from_rational(Fraction(str(node.value)))
    if isinstance(node, ast.Name):
        if node.id not in CONSTANTS:
            raise ValidationError(f"unknown constant {node.id!r}")
        return CONSTANTS[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        x = _eval_node(node.operand)
        return -x if isinstance(node.op, ast.USub) else x
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
        if len(node.args) != 1:
            raise ValidationError("sqrt() takes one argument")
        return sqrt_rational(_rational_of(node.args[0]))
    if isinstance(node, ast.BinOp):
        a, b = _eval_node(node.left), _eval_node(node.right)
        if isinstance(node.op, ast.Add):
            return field_op("add", a, b)
        if isinstance(node.op, ast.Sub):
            return field_op("sub", a, b)
        if isinstance(node.op, ast.Mult):
            return field_op("mul", a, b)
        if isinstance(node.op, ast.Div):
            return field_op("div", a, b, bound=separation_bound(b))
    raise ValidationError(f"unsupported expression element {ast.dump(node)}")
