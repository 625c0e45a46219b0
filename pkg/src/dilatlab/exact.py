"""Exact arithmetic in the ring Q[log 2, log(1/a)].

The certified bump profile has piece coefficients that are rational
combinations of 1, log 2 and log(1/a).  Junction matching and the sign
certificates are decided in this ring rather than in floating point:

* equality is coefficient-wise equality of rationals;
* the sign of an element free of log(1/a) is decidable because log 2 is
  irrational (a nonzero polynomial in it never vanishes) and a rational
  interval enclosure of log 2, tightened on demand, separates the value
  from zero.

The enclosure comes from the series log 2 = 2 atanh(1/3) with an explicit
geometric tail bound, so no floating point enters any decision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]

_ONE_THIRD = Fraction(1, 3)


def log2_interval(terms: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of log 2 from 2*atanh(1/3) with `terms` series terms."""
    if terms < 1:
        raise ValueError("need at least one series term")
    partial = Fraction(0)
    power = _ONE_THIRD
    for k in range(terms):
        partial += power / (2 * k + 1)
        power *= _ONE_THIRD * _ONE_THIRD
    lo = 2 * partial
    # tail: 2 * sum_{k>=terms} (1/3)^{2k+1}/(2k+1) <= 2*(1/3)^{2*terms+1}/(2*terms+1) * 9/8
    tail = 2 * power / (2 * terms + 1) * Fraction(9, 8)
    return lo, lo + tail


class Exact:
    """Element of Q[L, M] with L = log 2 and M = log(1/a).

    Coefficients are `fractions.Fraction`, keyed by exponent pair (i, j)
    for the monomial L**i * M**j.  Construction normalizes away zeros.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: dict[tuple[int, int], RationalLike] | None = None):
        c: dict[tuple[int, int], Fraction] = {}
        for key, val in (coeffs or {}).items():
            q = Fraction(val)
            if q != 0:
                c[key] = q
        self._c = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q: RationalLike) -> "Exact":
        return cls({(0, 0): Fraction(q)})

    @classmethod
    def log2(cls, coeff: RationalLike = 1) -> "Exact":
        return cls({(1, 0): Fraction(coeff)})

    @classmethod
    def log_inv_a(cls, coeff: RationalLike = 1) -> "Exact":
        return cls({(0, 1): Fraction(coeff)})

    @staticmethod
    def _coerce(other) -> "Exact":
        if isinstance(other, Exact):
            return other
        if isinstance(other, (int, Fraction)):
            return Exact.rational(other)
        return NotImplemented  # type: ignore[return-value]

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Exact":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for key, val in o._c.items():
            c[key] = c.get(key, Fraction(0)) + val
        return Exact(c)

    __radd__ = __add__

    def __neg__(self) -> "Exact":
        return Exact({k: -v for k, v in self._c.items()})

    def __sub__(self, other) -> "Exact":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Exact":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Exact":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        c: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), v1 in self._c.items():
            for (i2, j2), v2 in o._c.items():
                key = (i1 + i2, j1 + j2)
                c[key] = c.get(key, Fraction(0)) + v1 * v2
        return Exact(c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Exact":
        if not isinstance(other, (int, Fraction)):
            raise TypeError("Exact values divide by rationals only")
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return Exact({k: v / Fraction(other) for k, v in self._c.items()})

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._c == o._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._c

    @property
    def is_rational(self) -> bool:
        return all(key == (0, 0) for key in self._c)

    @property
    def has_log_inv_a(self) -> bool:
        return any(j > 0 for (_, j) in self._c)

    def coeff(self, i: int, j: int = 0) -> Fraction:
        return self._c.get((i, j), Fraction(0))

    def linear_parts(self) -> tuple[Fraction, Fraction, Fraction]:
        """(rational, log2, log(1/a)) parts; raises on higher-degree terms."""
        allowed = {(0, 0), (1, 0), (0, 1)}
        if any(key not in allowed for key in self._c):
            raise ValueError(f"not a linear element: {self!r}")
        return self.coeff(0, 0), self.coeff(1, 0), self.coeff(0, 1)

    # -- evaluation and sign -----------------------------------------------

    def evalf(self, a: float | None = None) -> float:
        """Floating-point value, with M = log(1/a) when `a` is given."""
        log2 = math.log(2.0)
        if self.has_log_inv_a:
            if a is None or a <= 0:
                raise ValueError("value contains log(1/a); a positive `a` is required")
            m = -math.log(a)
        else:
            m = 0.0
        total = 0.0
        for (i, j), v in self._c.items():
            total += float(v) * log2**i * m**j
        return total

    def sign(self, max_refinements: int = 8) -> int:
        """Exact sign (-1, 0, +1) of an element free of log(1/a)."""
        if self.has_log_inv_a:
            raise ValueError("sign is only decidable for log(1/a)-free elements")
        if self.is_zero:
            return 0
        terms = 12
        for _ in range(max_refinements):
            lo_l, hi_l = log2_interval(terms)
            lo = hi = Fraction(0)
            for (i, _), v in self._c.items():
                plo, phi = lo_l**i, hi_l**i  # log 2 interval is positive
                if v >= 0:
                    lo += v * plo
                    hi += v * phi
                else:
                    lo += v * phi
                    hi += v * plo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            terms *= 2
        raise ArithmeticError(f"sign of {self!r} unresolved; value too close to zero")

    def is_nonpositive(self) -> bool:
        return self.sign() <= 0

    def is_nonnegative(self) -> bool:
        return self.sign() >= 0

    # -- display -----------------------------------------------------------

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (i, j), v in sorted(self._c.items()):
            mono = "*".join(
                ["log2"] * 0
                + ([f"log2^{i}" if i > 1 else "log2"] if i else [])
                + ([f"log(1/a)^{j}" if j > 1 else "log(1/a)"] if j else [])
            )
            if mono:
                part = f"{v}*{mono}" if v != 1 else mono
                part = f"-{mono}" if v == -1 else part
            else:
                part = str(v)
            parts.append(part)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


ZERO = Exact()
ONE = Exact.rational(1)
LOG2 = Exact.log2()
LOG_INV_A = Exact.log_inv_a()


def exact_or_float(value):
    """Pass Exact through; coerce ints/Fractions to Exact; floats stay floats."""
    if isinstance(value, Exact):
        return value
    if isinstance(value, (int, Fraction)):
        return Exact.rational(value)
    return float(value)
