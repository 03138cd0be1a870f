"""Rational functions numer(s) / (s**p * (1 - s)**q).

Coefficients are stored lowest power first and may be any numeric type that
supports + - * (int, Fraction, float), so the same code does exact and
floating arithmetic.  Denominator powers are never cancelled implicitly;
``cancel`` does that on request.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ScaleError

__all__ = ["RationalFn", "poly_add", "poly_mul", "poly_deriv", "poly_eval"]


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return _trim(out)


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def poly_deriv(a):
    return _trim(i * a[i] for i in range(1, len(a)))


def poly_eval(a, s):
    acc = 0
    for x in reversed(a):
        acc = acc * s + x
    return acc


_ONE_MINUS_S = (1, -1)


def _times_powers(numer, dp, dq):
    """numer * s**dp * (1 - s)**dq."""
    out = tuple([0] * dp) + tuple(numer) if numer else ()
    for _ in range(dq):
        out = poly_mul(out, _ONE_MINUS_S)
    return _trim(out)


@dataclass(frozen=True)
class RationalFn:
    numer: tuple
    p: int = 0
    q: int = 0

    def __post_init__(self):
        object.__setattr__(self, "numer", _trim(self.numer))
        if self.p < 0 or self.q < 0:
            raise ValueError("denominator powers must be non-negative")

    @classmethod
    def poly(cls, coeffs: Sequence, p: int = 0, q: int = 0) -> "RationalFn":
        return cls(tuple(coeffs), p, q)

    @property
    def is_zero(self) -> bool:
        return not self.numer

    @property
    def degree(self) -> int:
        return len(self.numer) - 1

    def _lift(self, p, q):
        return _times_powers(self.numer, p - self.p, q - self.q)

    def __add__(self, other):
        if not isinstance(other, RationalFn):
            other = RationalFn((other,))
        p, q = max(self.p, other.p), max(self.q, other.q)
        return RationalFn(poly_add(self._lift(p, q), other._lift(p, q)), p, q)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(tuple(-x for x in self.numer), self.p, self.q)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RationalFn):
            return RationalFn(tuple(x * other for x in self.numer), self.p, self.q)
        return RationalFn(poly_mul(self.numer, other.numer), self.p + other.p, self.q + other.q)

    __rmul__ = __mul__

    def derivative(self) -> "RationalFn":
        # (N / s^p (1-s)^q)' = [N' s(1-s) - p (1-s) N + q s N] / s^(p+1) (1-s)^(q+1)
        n = self.numer
        term = poly_mul(poly_deriv(n), (0, 1, -1))
        term = poly_add(term, poly_mul(n, (-self.p, self.p)))
        term = poly_add(term, poly_mul(n, (0, self.q)))
        return RationalFn(term, self.p + 1, self.q + 1)

    def __call__(self, s):
        return poly_eval(self.numer, s) / (s**self.p * (1 - s) ** self.q)

    def max_coefficient(self):
        return max((abs(x) for x in self.numer), default=0)

    def check_scale(self, limit=1e300):
        try:
            too_big = bool(self.max_coefficient() > limit)
        except TypeError:  # symbolic coefficients have no magnitude to check
            return self
        if too_big:
            raise ScaleError(f"coefficient magnitude exceeds {limit:g}; rescale the iterates")
        return self

    def cancel(self) -> "RationalFn":
        """Divide out powers of s and (1 - s) shared by numerator and denominator.

        Only exact zeros are removed, so with float coefficients this is a
        no-op unless the cancellation is exact.
        """
        numer, p, q = list(self.numer), self.p, self.q
        while p and numer and numer[0] == 0:
            numer.pop(0)
            p -= 1
        while q and numer and sum(numer) == 0:
            # synthetic division by (1 - s) = -(s - 1)
            quot = [0] * (len(numer) - 1)
            acc = 0
            for i in range(len(numer) - 1, 0, -1):
                acc = acc + numer[i]
                quot[i - 1] = -acc
            numer = quot
            q -= 1
        return RationalFn(tuple(numer), p, q)
