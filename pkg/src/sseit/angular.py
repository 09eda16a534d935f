"""Exact angular-momentum algebra: Wigner 3j/6j symbols and dipole matrix elements.

Symbols are evaluated from the Racah sum formulas with exact integer
factorials (via ``fractions.Fraction``), converting to float only at the very
end, so there is no cancellation error at the small momenta used here.
Selection-rule zeros are returned as exact ``0.0``.

Phase convention: Condon-Shortley throughout.  Reduced matrix elements follow
the ``<J_lower || d || J_upper>`` orientation, with the hyperfine reduction

    <F||d||F'> = <J||d||J'> (-1)^(F'+J+1+I) sqrt((2F'+1)(2J+1)) {J J' 1; F' F I}

and the projection theorem

    <F m|d_q|F' m'> = <F||d||F'> (-1)^(F'-1+m) sqrt(2F+1) (F' 1 F; m' q -m).

This convention makes the stretched cycling element equal to
``reduced/sqrt(2)`` for a J=1/2 -> J'=3/2 line, and gives the channel sum rule
``sum |elem|^2 = (2J+1)/(2J'+1) |reduced|^2`` from every upper sublevel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError

__all__ = [
    "HalfInt",
    "wigner3j",
    "wigner6j",
    "hyperfine_reduced_element",
    "hyperfine_dipole_element",
]


@dataclass(frozen=True, order=True)
class HalfInt:
    """Exact integer or half-integer angular momentum, stored as 2j.

    ``HalfInt(twice=3)`` represents j = 3/2.  Use :meth:`of` to build from
    ints, floats or another HalfInt.
    """

    twice: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, int):
            return cls(2 * value)
        twice = 2.0 * float(value)
        rounded = round(twice)
        if abs(twice - rounded) > 1e-9:
            raise DomainError(f"{value!r} is not an integer or half-integer")
        return cls(int(rounded))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.value

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"


def _twice(value) -> int:
    return HalfInt.of(value).twice


def _check_jm_pair(tj: int, tm: int, name: str) -> None:
    if tj < 0:
        raise DomainError(f"{name}: j must be non-negative, got {tj / 2}")
    if (tj - tm) % 2 != 0:
        raise DomainError(
            f"{name}: m={tm / 2} is not half-integer-compatible with j={tj / 2}"
        )


def _triangle_ok(ta: int, tb: int, tc: int) -> bool:
    # |a-b| <= c <= a+b with integer perimeter
    if (ta + tb + tc) % 2 != 0:
        return False
    return abs(ta - tb) <= tc <= ta + tb


@lru_cache(maxsize=None)
def _fac(n: int) -> int:
    return math.factorial(n)


def _delta_squared(ta: int, tb: int, tc: int) -> Fraction:
    # triangle coefficient Delta^2(abc); arguments are twice-values
    return Fraction(
        _fac((ta + tb - tc) // 2)
        * _fac((ta - tb + tc) // 2)
        * _fac((-ta + tb + tc) // 2),
        _fac((ta + tb + tc) // 2 + 1),
    )


def _signed_sqrt(squared: Fraction, sign: int) -> float:
    if squared == 0:
        return 0.0
    return math.copysign(math.sqrt(float(squared)), sign)


@lru_cache(maxsize=None)
def _wigner3j_twice(tj1, tj2, tj3, tm1, tm2, tm3) -> float:
    if tm1 + tm2 + tm3 != 0:
        return 0.0
    if not _triangle_ok(tj1, tj2, tj3):
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm3) > tj3:
        return 0.0

    # Racah sum; all factorial arguments below are guaranteed integral
    tmin = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    tmax = min(
        (tj1 + tj2 - tj3) // 2,
        (tj1 - tm1) // 2,
        (tj2 + tm2) // 2,
    )
    if tmin > tmax:
        return 0.0

    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        den = (
            _fac(t)
            * _fac((tj3 - tj2 + tm1) // 2 + t)
            * _fac((tj3 - tj1 - tm2) // 2 + t)
            * _fac((tj1 + tj2 - tj3) // 2 - t)
            * _fac((tj1 - tm1) // 2 - t)
            * _fac((tj2 + tm2) // 2 - t)
        )
        term = Fraction(1, den)
        total += -term if t % 2 else term
    if total == 0:
        return 0.0

    prefactor = _delta_squared(tj1, tj2, tj3)
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        prefactor *= _fac((tj + tm) // 2) * _fac((tj - tm) // 2)

    phase = -1 if ((tj1 - tj2 - tm3) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return _signed_sqrt(prefactor * total * total, sign)


@lru_cache(maxsize=None)
def _wigner6j_twice(tj1, tj2, tj3, tj4, tj5, tj6) -> float:
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    for triad in triads:
        if not _triangle_ok(*triad):
            return 0.0

    quad_sums = [sum(t) // 2 for t in triads]
    pair_sums = (
        (tj1 + tj2 + tj4 + tj5) // 2,
        (tj2 + tj3 + tj5 + tj6) // 2,
        (tj3 + tj1 + tj6 + tj4) // 2,
    )
    tmin = max(quad_sums)
    tmax = min(pair_sums)
    if tmin > tmax:
        return 0.0

    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        den = 1
        for qs in quad_sums:
            den *= _fac(t - qs)
        for ps in pair_sums:
            den *= _fac(ps - t)
        term = Fraction(_fac(t + 1), den)
        total += -term if t % 2 else term
    if total == 0:
        return 0.0

    prefactor = Fraction(1)
    for triad in triads:
        prefactor *= _delta_squared(*triad)
    sign = 1 if total > 0 else -1
    return _signed_sqrt(prefactor * total * total, sign)


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3).

    Arguments may be ints, floats or :class:`HalfInt`.  Returns exactly 0.0
    when a selection rule (triangle, m-sum, |m| <= j) is violated.  Raises
    :class:`DomainError` for negative j or an m that is not compatible with
    its j modulo 1.
    """
    tj = [_twice(j) for j in (j1, j2, j3)]
    tm = [_twice(m) for m in (m1, m2, m3)]
    for i, (a, b) in enumerate(zip(tj, tm), start=1):
        _check_jm_pair(a, b, f"column {i}")
    return _wigner3j_twice(*tj, *tm)


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.

    Returns exactly 0.0 when any of the four triads violates the triangle
    rule.
    """
    tj = [_twice(j) for j in (j1, j2, j3, j4, j5, j6)]
    for i, a in enumerate(tj, start=1):
        if a < 0:
            raise DomainError(f"argument {i}: j must be non-negative, got {a / 2}")
    return _wigner6j_twice(*tj)


def hyperfine_reduced_element(
    j_lower, f_lower, j_upper, f_upper, nuclear_spin, reduced_element: float
) -> float:
    """Hyperfine-reduced dipole element <F||d||F'> from the fine-structure one.

    ``reduced_element`` is <J_lower || d || J_upper>; the primed arguments
    label the upper level.  Vanishes for |F - F'| > 1.
    """
    tjl, tfl = _twice(j_lower), _twice(f_lower)
    tju, tfu = _twice(j_upper), _twice(f_upper)
    ti = _twice(nuclear_spin)
    six = _wigner6j_twice(tjl, tju, 2, tfu, tfl, ti)
    if six == 0.0:
        return 0.0
    # exponent F' + J + 1 + I is integral for any dipole-connected pair
    phase_exp = (tfu + tjl + ti) // 2 + 1
    phase = -1 if phase_exp % 2 else 1
    return (
        reduced_element
        * phase
        * math.sqrt((tfu + 1) * (tjl + 1))
        * six
    )


def hyperfine_dipole_element(
    f_lower,
    m_lower,
    f_upper,
    m_upper,
    q: int,
    *,
    j_lower,
    j_upper,
    nuclear_spin,
    reduced_element: float,
) -> float:
    """Dipole matrix element <F' m'|d_q|F m> between hyperfine sublevels.

    ``q = m_upper - m_lower`` is the spherical component of the coupling
    light; the element vanishes unless the argument ``q`` matches that
    difference with |q| <= 1 and |F - F'| <= 1.  The magnitude carries the
    same units as ``reduced_element``.
    """
    if q not in (-1, 0, 1):
        raise DomainError(f"q must be -1, 0 or +1, got {q!r}")
    tfl, tml = _twice(f_lower), _twice(m_lower)
    tfu, tmu = _twice(f_upper), _twice(m_upper)
    _check_jm_pair(tfl, tml, "lower state")
    _check_jm_pair(tfu, tmu, "upper state")
    if tmu - tml != 2 * q:
        return 0.0
    red_f = hyperfine_reduced_element(
        j_lower, f_lower, j_upper, f_upper, nuclear_spin, reduced_element
    )
    if red_f == 0.0:
        return 0.0
    # <F' m'|d_q|F m> = <F'||d||F> (-1)^(F-1+m') sqrt(2F'+1) (F 1 F'; m q -m')
    # with <F'||d||F> obtained by transposing the lower||upper reduction:
    # <F'||d||F> = (-1)^(F-F') sqrt((2F+1)/(2F'+1)) <F||d||F'>
    red_up = (
        red_f
        * (-1 if ((tfl - tfu) // 2) % 2 else 1)
        * math.sqrt((tfl + 1) / (tfu + 1))
    )
    three = _wigner3j_twice(tfl, 2, tfu, tml, 2 * q, -tmu)
    if three == 0.0:
        return 0.0
    phase_exp = (tfl + tmu) // 2 - 1
    phase = -1 if phase_exp % 2 else 1
    return red_up * phase * math.sqrt(tfu + 1) * three
