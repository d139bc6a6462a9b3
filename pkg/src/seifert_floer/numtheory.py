"""Exact rationals, Hirzebruch-Jung continued fractions and best upper approximations.

Rationals are plain :class:`fractions.Fraction` objects: they are always
reduced and keep a positive denominator, which is all we need.  Floats are
never produced here.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Optional, Sequence, Union

from .errors import DomainError

Rational = Fraction
NegContFrac = tuple  # tuple[int, ...], every entry <= -2 when it encodes r in (0, 1)
RationalLike = Union[int, str, Fraction]


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ``x`` to a Fraction, refusing floats outright."""
    if isinstance(x, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(x, float):
        raise DomainError("floating point input is not accepted, pass 'p/q' instead")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not an exact rational: {x!r}") from exc
    raise DomainError(f"cannot interpret {x!r} as a rational")


def format_rational(x: Fraction) -> str:
    """Canonical text form: ``"p/q"``, or ``"p"`` for integers."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def neg_cont_frac(r: RationalLike) -> NegContFrac:
    """Expand ``-1/r`` as a negative continued fraction ``[m1, ..., mk]``.

    The convention is ``[m1] = m1`` and ``[m1, m2, ...] = m1 - 1/[m2, ...]``,
    so that ``neg_cont_frac(4/47) == (-12, -4)``.
    """
    r = as_rational(r)
    if not 0 < r < 1:
        raise DomainError(f"expected 0 < r < 1, got {r}")
    x = -1 / r
    terms = []
    while True:
        m = floor(x)
        terms.append(m)
        rest = x - m
        if rest == 0:
            return tuple(terms)
        x = -1 / rest


def eval_cont_frac(terms: Iterable[int]) -> Fraction:
    """Evaluate ``[m1, ..., mk]`` from the innermost term outwards.

    Works for arbitrary integer chains.  A vanishing partial value raises
    ZeroDivisionError, which signals a chain with zero determinant.
    """
    terms = list(terms)
    if not terms:
        raise DomainError("empty continued fraction")
    value = Fraction(terms[-1])
    for m in reversed(terms[:-1]):
        value = m - 1 / value
    return value


def chain_determinant(terms: Sequence[int]) -> int:
    """Determinant of the linear chain with the given framings (1 on edges)."""
    prev, cur = 1, 0
    for i, m in enumerate(terms):
        if i == 0:
            prev, cur = 1, m
        else:
            prev, cur = cur, m * cur - prev
    return cur if terms else 1


def simplest_fraction_in(lo: RationalLike, hi: RationalLike) -> Fraction:
    """Fraction of least denominator strictly between ``lo`` and ``hi``.

    Walks the Stern-Brocot tree through the continued fraction of the
    endpoints.  At equal denominator the smaller numerator wins.
    """
    lo, hi = as_rational(lo), as_rational(hi)
    if not lo < hi:
        raise DomainError(f"empty interval ({lo}, {hi})")
    base = floor(lo)
    if base + 1 < hi:
        return Fraction(base + 1)
    # (lo, hi) sits inside (base, base + 1]; flip through x -> base + 1/x.
    if lo == base:
        return base + Fraction(1, floor(1 / (hi - base)) + 1)
    return base + 1 / simplest_fraction_in(1 / (hi - base), 1 / (lo - base))


def best_upper_approx(r: RationalLike, q: int) -> Optional[int]:
    """Numerator ``p`` of the best upper approximation ``p/q`` of ``r``, or None.

    ``p/q`` must exceed ``r``, be reduced and below 1, and no fraction with
    denominator at most ``q`` may lie strictly between the two.
    """
    r = as_rational(r)
    if not 0 < r < 1:
        raise DomainError(f"expected 0 < r < 1, got {r}")
    if q < 2:
        raise DomainError("best upper approximations are only defined for q >= 2")
    p = floor(q * r) + 1
    if p >= q or gcd(p, q) != 1:
        return None
    if simplest_fraction_in(r, Fraction(p, q)).denominator > q:
        return p
    return None


def hj_compare(long: Sequence[int], short: Sequence[int]) -> int:
    """Index (0-based) of the first entry where two chains differ.

    Returns ``len(long)`` when ``long`` is a prefix of ``short``.
    """
    for h, m in enumerate(long):
        if h >= len(short) or short[h] != m:
            return h
    return len(long)

