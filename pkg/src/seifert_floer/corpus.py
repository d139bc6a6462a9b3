"""Seeded random Seifert manifolds for self-checks and property tests."""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, prod

from .plumbing import SeifertInvariants, standard_graph


def box_size(s: SeifertInvariants) -> int:
    return prod(-m for m in standard_graph(s).framings)


def random_seifert(
    rng: random.Random,
    legs: tuple = (3, 4),
    max_den: int = 30,
    max_box: int = 200_000,
    euler: str = "nonnegative",
) -> SeifertInvariants:
    """Draw Seifert invariants whose initial box stays below ``max_box``.

    ``euler="nonnegative"`` picks ``e0`` so that ``0 <= e(M) < 1``, which is
    where indefinite and singular graphs live; ``"negative"`` gives
    ``-1 <= e(M) < 0``; ``"any"`` shifts ``e0`` by a random amount.
    """
    while True:
        n = rng.randint(*legs)
        rs = []
        for _ in range(n):
            q = rng.randint(2, max_den)
            p = rng.randint(1, q - 1)
            while gcd(p, q) != 1:
                p = rng.randint(1, q - 1)
            rs.append(Fraction(p, q))
        total = sum(rs, Fraction(0))
        e0 = -int(total)
        if euler == "negative":
            e0 -= 1
        elif euler == "any":
            e0 -= rng.randint(0, 2)
        s = SeifertInvariants(e0, tuple(rs))
        if box_size(s) <= max_box:
            return s


def corpus(n: int, seed: int, **kwargs) -> list:
    rng = random.Random(seed)
    return [random_seifert(rng, **kwargs) for _ in range(n)]
