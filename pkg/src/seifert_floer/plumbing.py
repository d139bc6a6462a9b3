"""Seifert invariants, star-shaped plumbing graphs and their intersection forms."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor, gcd, prod
from typing import Optional, Sequence

from sympy import Matrix
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

from .errors import ConsistencyError, DomainError, ParseError, UnsupportedError
from .numtheory import as_rational, chain_determinant, eval_cont_frac, format_rational, neg_cont_frac


@dataclass(frozen=True)
class SeifertInvariants:
    """Normalised Seifert data ``M(e0; r1, ..., rn)`` with every ``r_i`` in (0, 1)."""

    e0: int
    r: tuple

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(Fraction(x) for x in self.r))
        if any(not 0 < x < 1 for x in self.r):
            raise DomainError("Seifert coefficients must lie in (0, 1); use normalize()")
        if len(self.r) < 3:
            raise UnsupportedError("fewer than three singular fibres (lens space or S^3)")

    @property
    def n(self) -> int:
        return len(self.r)

    @property
    def euler(self) -> Fraction:
        return euler_number(self)

    def __str__(self):
        coeffs = ", ".join(format_rational(x) for x in self.r)
        return f"M({self.e0}; {coeffs})"


def normalize(e0_raw: int, fractions: Sequence) -> SeifertInvariants:
    """Shift every coefficient into (0, 1), moving integer parts into ``e0``.

    Integer coefficients disappear entirely.  Entries may be Fractions, ints,
    ``"p/q"`` strings or ``(p, q)`` pairs; a zero denominator is a parse error.
    """
    e0 = int(e0_raw)
    kept = []
    for f in fractions:
        if isinstance(f, tuple):
            p, q = f
            if q == 0:
                raise ParseError(f"zero denominator in {p}/{q}")
            f = Fraction(p, q)
        else:
            try:
                f = as_rational(f)
            except DomainError as exc:
                raise ParseError(str(exc)) from exc
        k = floor(f)
        e0 += k
        if f != k:
            kept.append(f - k)
    return SeifertInvariants(e0, tuple(kept))


def euler_number(s: SeifertInvariants) -> Fraction:
    return s.e0 + sum(s.r, Fraction(0))


def dual(s: SeifertInvariants) -> SeifertInvariants:
    """Seifert invariants of the same manifold with reversed orientation."""
    return SeifertInvariants(-s.e0 - s.n, tuple(1 - x for x in s.r))


# --------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class StarGraph:
    """Star-shaped plumbing tree.

    Vertex 0 is the centre; the legs follow in order, each listed from the
    centre outwards.
    """

    center_framing: int
    legs: tuple

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(tuple(int(m) for m in leg) for leg in self.legs))

    @cached_property
    def framings(self) -> tuple:
        out = [self.center_framing]
        for leg in self.legs:
            out.extend(leg)
        return tuple(out)

    @property
    def size(self) -> int:
        return 1 + sum(len(leg) for leg in self.legs)

    @cached_property
    def leg_offsets(self) -> tuple:
        offsets, k = [], 1
        for leg in self.legs:
            offsets.append(k)
            k += len(leg)
        return tuple(offsets)

    def vertex(self, leg: int, depth: int) -> int:
        """Index of the ``depth``-th vertex (0 = next to the centre) of ``leg``."""
        if not 0 <= depth < len(self.legs[leg]):
            raise IndexError(f"leg {leg} has no vertex at depth {depth}")
        return self.leg_offsets[leg] + depth

    @cached_property
    def neighbors(self) -> tuple:
        nbrs = [[] for _ in range(self.size)]
        for leg, start in zip(self.legs, self.leg_offsets):
            prev = 0
            for d in range(len(leg)):
                v = start + d
                nbrs[prev].append(v)
                nbrs[v].append(prev)
                prev = v
        return tuple(tuple(x) for x in nbrs)

    @cached_property
    def legend(self) -> tuple:
        """``(leg, depth, framing)`` for every vertex; the centre is ``(None, 0, e0)``."""
        out = [(None, 0, self.center_framing)]
        for i, leg in enumerate(self.legs):
            out.extend((i, d, m) for d, m in enumerate(leg))
        return tuple(out)

    def matrix(self) -> list:
        n = self.size
        Q = [[0] * n for _ in range(n)]
        for i, m in enumerate(self.framings):
            Q[i][i] = m
            for j in self.neighbors[i]:
                Q[i][j] = 1
        return Q

    def __str__(self):
        legs = "; ".join("[" + ",".join(str(m) for m in leg) + "]" for leg in self.legs)
        return f"({self.center_framing}; {legs})"


def standard_graph(s: SeifertInvariants) -> StarGraph:
    return StarGraph(s.e0, tuple(neg_cont_frac(x) for x in s.r))


def seifert_of_graph(g: StarGraph) -> SeifertInvariants:
    """Inverse of :func:`standard_graph` for graphs whose legs have framings <= -2."""
    return SeifertInvariants(g.center_framing, tuple(-1 / eval_cont_frac(leg) for leg in g.legs))


class Definiteness(enum.Enum):
    NEGATIVE_DEFINITE = "negative-definite"
    INDEFINITE = "indefinite"
    SINGULAR = "singular"


@dataclass(frozen=True)
class IntersectionForm:
    """Exact linear algebra of the plumbing matrix.

    ``adj`` is the integer adjugate, so ``Q^{-1} = adj / det`` when ``det != 0``.
    For singular forms ``kernel`` spans the null space and ``snf_left`` together
    with ``snf_diag`` reduce vectors modulo the image of ``2Q``.
    """

    Q: tuple
    det: int
    adj: tuple
    definiteness: Definiteness
    invariant_factors: tuple
    snf_left: tuple = field(default=())
    snf_diag: tuple = field(default=())
    kernel: tuple = field(default=())
    minor_index: int = -1
    minor_det: int = 0
    minor_adj: tuple = field(default=())

    @property
    def size(self) -> int:
        return len(self.Q)

    @cached_property
    def Qinv(self) -> Optional[tuple]:
        if self.det == 0:
            return None
        return tuple(tuple(Fraction(a, self.det) for a in row) for row in self.adj)

    def row_inv(self, i: int) -> tuple:
        """Row ``i`` of ``Q^{-1}`` as Fractions (``e_i^T Q^{-1}``)."""
        if self.det == 0:
            raise UnsupportedError("Q is singular")
        return tuple(Fraction(a, self.det) for a in self.adj[i])

    def inv_apply(self, v: Sequence[int]) -> tuple:
        """``Q^{-1} v`` as Fractions."""
        if self.det == 0:
            raise UnsupportedError("Q is singular")
        return tuple(Fraction(sum(a * x for a, x in zip(row, v)), self.det) for row in self.adj)

    def inv_form(self, v: Sequence[int], w: Optional[Sequence[int]] = None) -> Fraction:
        """``v^T Q^{-1} w`` (``w`` defaults to ``v``)."""
        if self.det == 0:
            raise UnsupportedError("Q is singular")
        w = v if w is None else w
        total = 0
        for x, row in zip(v, self.adj):
            if x:
                total += x * sum(a * y for a, y in zip(row, w))
        return Fraction(total, self.det)

    def apply(self, v: Sequence[int]) -> tuple:
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.Q)

    def solve(self, v: Sequence[int]) -> Optional[tuple]:
        """A rational solution of ``Q b = v``, or None when there is none."""
        if self.det != 0:
            return self.inv_apply(v)
        if sum(k * x for k, x in zip(self.kernel, v)) != 0:
            return None
        p = self.minor_index
        rest = [x for i, x in enumerate(v) if i != p]
        sol = [Fraction(sum(a * x for a, x in zip(row, rest)), self.minor_det) for row in self.minor_adj]
        sol.insert(p, Fraction(0))
        if tuple(sum(a * b for a, b in zip(row, sol)) for row in self.Q) != tuple(v):
            raise ConsistencyError("particular solution of QB = V failed to verify")
        return tuple(sol)


def _adj_det(rows) -> tuple:
    """``(det, adjugate)`` of an integer matrix by fraction-free elimination over ZZ."""
    n = len(rows)
    dm = DomainMatrix([[ZZ(x) for x in r] for r in rows], (n, n), ZZ)
    adj, det = dm.adj_det()
    adj = adj.to_list()
    return int(det), tuple(tuple(int(x) for x in r) for r in adj)


def intersection_form(g: StarGraph) -> IntersectionForm:
    """Build the intersection form and cross-check it against the Euler number."""
    Q = g.matrix()
    M = Matrix(Q)
    det, adj = _adj_det(Q)

    # det Q = e(M) * prod over legs of det(leg chain); this ties the matrix to
    # the Seifert data independently of any elimination order.
    e = g.center_framing - sum((1 / eval_cont_frac(leg) for leg in g.legs), Fraction(0))
    expected = e * prod(chain_determinant(leg) for leg in g.legs)
    if expected != det:
        raise ConsistencyError("determinant disagrees with the Euler number", det=det, expected=expected)

    if e < 0:
        kind = Definiteness.NEGATIVE_DEFINITE
    elif e > 0:
        kind = Definiteness.INDEFINITE
    else:
        kind = Definiteness.SINGULAR
    # A negative-definite form of size N has sign (-1)^N; b2+ = 1 flips it once.
    N = g.size
    if kind is not Definiteness.SINGULAR:
        sign = 1 if det > 0 else -1
        want = (-1) ** N if kind is Definiteness.NEGATIVE_DEFINITE else (-1) ** (N - 1)
        if sign != want:
            raise ConsistencyError("determinant sign contradicts definiteness", det=det, kind=kind.value)

    factors = tuple(abs(int(x)) for x in invariant_factors(M))
    extra = {}
    if det == 0:
        D, U, _ = smith_normal_decomp(2 * M)
        extra["snf_left"] = tuple(tuple(int(U[i, j]) for j in range(N)) for i in range(N))
        extra["snf_diag"] = tuple(int(D[i, i]) for i in range(N))
        null = M.nullspace()
        if len(null) != 1:
            raise ConsistencyError("singular star graph should have a one-dimensional kernel", rank_defect=len(null))
        k = null[0]
        lcm_den = 1
        for x in k:
            lcm_den = lcm_den * int(x.q) // gcd(lcm_den, int(x.q))
        kv = [int(x * lcm_den) for x in k]
        g0 = 0
        for x in kv:
            g0 = gcd(g0, x)
        extra["kernel"] = tuple(x // g0 for x in kv)
        # Dropping a vertex where the kernel is nonzero leaves an invertible
        # minor, which gives particular solutions of QB = V.
        p = next(i for i, x in enumerate(extra["kernel"]) if x)
        keep = [i for i in range(N) if i != p]
        minor = M.extract(keep, keep)
        extra["minor_index"] = p
        extra["minor_det"], extra["minor_adj"] = _adj_det([[Q[i][j] for j in keep] for i in keep])
    return IntersectionForm(tuple(tuple(r) for r in Q), det, adj, kind, factors, **extra)


# --------------------------------------------------------------------------
# constructors


def brieskorn(a: Sequence[int], reversed: bool = False) -> SeifertInvariants:
    """Seifert invariants of the Brieskorn sphere, canonically oriented unless ``reversed``."""
    a = [int(x) for x in a]
    if len(a) < 3:
        raise UnsupportedError("a Brieskorn sphere needs at least three multiplicities")
    if any(x < 2 for x in a):
        raise DomainError("Brieskorn multiplicities must be at least 2")
    for i in range(len(a)):
        for j in range(i + 1, len(a)):
            if gcd(a[i], a[j]) != 1:
                raise DomainError(f"multiplicities {a[i]} and {a[j]} are not coprime")
    A = prod(a)
    b = [(-pow(A // x, -1, x)) % x for x in a]
    total = -1 - sum(bi * (A // x) for bi, x in zip(b, a))
    e0, rem = divmod(total, A)
    assert rem == 0
    s = SeifertInvariants(e0, tuple(Fraction(bi, x) for bi, x in zip(b, a)))
    return dual(s) if reversed else s


def torus_fibration(d2: int, d1: int) -> tuple:
    """Coefficients ``(y/d2, x/d1)`` with ``x*d2 + y*d1 = d1*d2 - 1``."""
    x = (-pow(d2, -1, d1)) % d1
    y = (d1 * d2 - 1 - x * d2) // d1
    assert x * d2 + y * d1 == d1 * d2 - 1 and 0 < x < d1 and 0 < y < d2
    return Fraction(y, d2), Fraction(x, d1)


def torus_knot_surgery(d2: int, d1: int, sign: int, r) -> SeifertInvariants:
    """Seifert invariants of ``r``-surgery on the torus knot ``T(d2, sign*d1)``."""
    r = as_rational(r)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if not (1 < d2 < d1 and gcd(d1, d2) == 1):
        raise DomainError("expected coprime 1 < d2 < d1")
    if r == sign * d1 * d2:
        raise UnsupportedError("exceptional slope: the result is a connected sum of lens spaces")
    r1, r2 = torus_fibration(d2, d1)
    if sign == 1:
        return normalize(-1, [r1, r2, 1 / (d1 * d2 - r)])
    return normalize(-2, [1 - r1, 1 - r2, 1 - 1 / (d1 * d2 + r)])


# --------------------------------------------------------------------------
# blow-downs and the maximal S^3 subgraph


def chain_blowdown(framings: Sequence[int]) -> bool:
    """Repeatedly blow down the leftmost -1 of a linear chain; True iff it vanishes."""
    chain = list(framings)
    while chain:
        try:
            i = chain.index(-1)
        except ValueError:
            return False
        if i > 0:
            chain[i - 1] += 1
        if i + 1 < len(chain):
            chain[i + 1] += 1
        del chain[i]
    return True


class S3Kind(enum.Enum):
    EMPTY = "empty"
    CENTER_ONLY = "T(1,1)"
    ONE_LEG = "T(1,d1)"
    TWO_LEGS = "T(d2,d1)"


@dataclass(frozen=True)
class S3Subgraph:
    members: frozenset
    d1: int
    d2: int
    unique: bool
    kind: S3Kind
    prefixes: tuple = ()  # ((leg, length), ...) with the d1 leg first

    @property
    def empty(self) -> bool:
        return not self.members


def _prefix_denominator(prefix: Sequence[int]) -> int:
    if not prefix:
        return 1
    return abs(eval_cont_frac(prefix).numerator)


def s3_subgraph(g: StarGraph) -> S3Subgraph:
    """Largest subgraph through the centre that blows down to nothing."""
    if g.center_framing != -1:
        return S3Subgraph(frozenset(), 1, 1, True, S3Kind.EMPTY)
    found = {}
    n = len(g.legs)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for a in range(len(g.legs[i]) + 1):
                for b in range(len(g.legs[j]) + 1):
                    chain = list(reversed(g.legs[i][:a])) + [-1] + list(g.legs[j][:b])
                    if not chain_blowdown(chain):
                        continue
                    if chain_determinant(chain) not in (1, -1):
                        raise ConsistencyError("blown-down chain without unit determinant", chain=chain)
                    members = frozenset([0] + [g.vertex(i, d) for d in range(a)] + [g.vertex(j, d) for d in range(b)])
                    parts = tuple(sorted(((i, a), (j, b)), key=lambda t: t[0]))
                    found.setdefault(members, parts)
    maximal = [m for m in found if not any(m < other for other in found)]
    maximal.sort(key=lambda m: (-len(m), sorted(m)))
    best = maximal[0]
    parts = [(leg, length) for leg, length in found[best] if length > 0]
    dens = [(_prefix_denominator(g.legs[leg][:length]), leg, length) for leg, length in parts]
    # d1 is the larger denominator; ties go to the lower leg index.
    dens.sort(key=lambda t: (-t[0], t[1]))
    if not dens:
        kind, d1, d2 = S3Kind.CENTER_ONLY, 1, 1
    elif len(dens) == 1:
        kind, d1, d2 = S3Kind.ONE_LEG, dens[0][0], 1
    else:
        kind, d1, d2 = S3Kind.TWO_LEGS, dens[0][0], dens[1][0]
    return S3Subgraph(best, d1, d2, len(maximal) == 1, kind, tuple((leg, length) for _, leg, length in dens))


@dataclass(frozen=True)
class DecompositionLabels:
    """Vertices around the S^3 subgraph and how blowing it down shifts them.

    ``shift[j]`` is the amount added to coordinate ``j`` of the canonical
    vector when the S^3 subgraph is blown down; realised coordinates on ``j``
    run from ``m+2`` to ``-m-2-2*shift[j]``.
    """

    Gp: S3Subgraph
    Gpp: frozenset
    Gpp1: Optional[int]
    Gpp2: Optional[int]
    T: int
    shift: tuple
    warnings: tuple = ()


def blowdown_shifts(g: StarGraph, members: frozenset) -> tuple:
    """Coordinate shifts of the outside vertices when ``members`` is blown down.

    ``members`` must form a chain through the centre that blows down
    completely.  Coordinates on the chain are those of the canonical vector,
    so each exceptional sphere carries the value 1 when it is removed.
    """
    N = g.size
    shifts = [0] * N
    if not members:
        return tuple(shifts)
    framing = {v: g.framings[v] for v in members}
    meet = {v: {w: 1 for w in g.neighbors[v] if w in members} for v in members}
    outside = {v: {w: 1 for w in g.neighbors[v] if w not in members} for v in members}
    alive = set(members)
    while alive:
        candidates = sorted(v for v in alive if framing[v] == -1)
        if not candidates:
            raise ConsistencyError("S^3 subgraph failed to blow down", members=sorted(members))
        e = candidates[0]
        alive.discard(e)
        nb = {w: a for w, a in meet[e].items() if w in alive}
        # Outside vertices linked to e pick up the value 1 per intersection.
        for w, a in outside[e].items():
            shifts[w] += a
        for x, ax in nb.items():
            framing[x] += ax * ax
            for y, ay in nb.items():
                if y != x:
                    meet[x][y] = meet[x].get(y, 0) + ax * ay
            for w, a in outside[e].items():
                outside[x][w] = outside[x].get(w, 0) + ax * a
            meet[x].pop(e, None)
    return tuple(shifts)


def decomposition_labels(g: StarGraph, sub: Optional[S3Subgraph] = None) -> DecompositionLabels:
    sub = s3_subgraph(g) if sub is None else sub
    warnings = []
    if not sub.unique:
        warnings.append("maximal S^3 subgraph is not unique")
    if sub.empty:
        return DecompositionLabels(sub, frozenset(), None, None, 0, (0,) * g.size, tuple(warnings))
    shift = blowdown_shifts(g, sub.members)
    gpp = frozenset(v for v in g.neighbors[0] if v not in sub.members)
    ends = []
    for leg, length in sub.prefixes:
        ends.append(g.vertex(leg, length) if length < len(g.legs[leg]) else None)
    gpp1 = ends[0] if ends else None
    gpp2 = ends[1] if len(ends) > 1 else None
    T = 0
    if sub.prefixes:
        leg, length = sub.prefixes[0]
        for m in reversed(g.legs[leg][:length]):
            if m != -2:
                break
            T += 1
    if gpp2 is not None or sub.kind in (S3Kind.ONE_LEG, S3Kind.CENTER_ONLY):
        warnings.append("degenerate S^3 subgraph labels: ranges follow the blow-down simulation")
    return DecompositionLabels(sub, gpp, gpp1, gpp2, T, shift, tuple(warnings))


# --------------------------------------------------------------------------
# torus bundle models


TORUS_MODELS = {
    "M(-1;1/2,1/3,1/6)": (-1, ("1/2", "1/3", "1/6")),
    "M(-2;1/2,2/3,5/6)": (-2, ("1/2", "2/3", "5/6")),
    "M(-1;1/2,1/4,1/4)": (-1, ("1/2", "1/4", "1/4")),
    "M(-2;1/2,3/4,3/4)": (-2, ("1/2", "3/4", "3/4")),
    "M(-1;1/3,1/3,1/3)": (-1, ("1/3", "1/3", "1/3")),
    "M(-2;2/3,2/3,2/3)": (-2, ("2/3", "2/3", "2/3")),
    "M(-2;1/2,1/2,1/2,1/2)": (-2, ("1/2", "1/2", "1/2", "1/2")),
}


def torus_model_graph(name: str) -> StarGraph:
    e0, coeffs = TORUS_MODELS[name]
    return standard_graph(SeifertInvariants(e0, tuple(Fraction(c) for c in coeffs)))


def _inject(model_legs, host_legs, used=()):
    if not model_legs:
        return True
    first, rest = model_legs[0], model_legs[1:]
    for k, leg in enumerate(host_legs):
        if k in used or tuple(leg[: len(first)]) != first:
            continue
        if _inject(rest, host_legs, used + (k,)):
            return True
    return False


def torus_bundle_match(g: StarGraph) -> Optional[str]:
    """Name of a torus-bundle model graph contained in ``g`` as a prefix subgraph."""
    for name in TORUS_MODELS:
        model = torus_model_graph(name)
        if model.center_framing != g.center_framing or len(model.legs) > len(g.legs):
            continue
        if _inject(model.legs, g.legs):
            return name
    return None


def exact_torus_bundle(g: StarGraph) -> Optional[str]:
    for name in TORUS_MODELS:
        model = torus_model_graph(name)
        if model.center_framing == g.center_framing and sorted(model.legs) == sorted(g.legs):
            return name
    return None


def type_AB(g: StarGraph) -> tuple:
    """``("A", None)`` or ``("B", model_name)``."""
    name = torus_bundle_match(g)
    return ("B", name) if name else ("A", None)


# --------------------------------------------------------------------------
# input grammar

_INT = r"[+-]?\d+"
_RAT = r"[+-]?\d+(?:/\d+)?"


def parse_manifold(text: str) -> tuple:
    """Parse a manifold description; returns ``(SeifertInvariants, descriptor)``.

    Accepted forms: ``M(e0; a/b, ...)``, ``Sigma(a, ...)``, ``-Sigma(a, ...)``,
    ``Surgery(T(d2, d1), p/q)`` and ``Surgery(T(d2, -d1), p/q)``.
    """
    src = text.strip()
    compact = re.sub(r"\s+", "", src)
    m = re.fullmatch(rf"M\(({_INT});({_RAT}(?:,{_RAT})*)\)", compact)
    if m:
        fracs = []
        for tok in m.group(2).split(","):
            p, _, q = tok.partition("/")
            fracs.append((int(p), int(q) if q else 1))
        return normalize(int(m.group(1)), fracs), compact
    m = re.fullmatch(r"(-?)Sigma\((\d+(?:,\d+)*)\)", compact)
    if m:
        a = [int(x) for x in m.group(2).split(",")]
        return brieskorn(a, reversed=bool(m.group(1))), compact
    m = re.fullmatch(rf"Surgery\(T\((\d+),(-?)(\d+)\),({_RAT})\)", compact)
    if m:
        d2, neg, d1 = int(m.group(1)), m.group(2), int(m.group(3))
        p, _, q = m.group(4).partition("/")
        if q and int(q) == 0:
            raise ParseError("zero denominator in surgery slope")
        r = Fraction(int(p), int(q) if q else 1)
        return torus_knot_surgery(d2, d1, -1 if neg else 1, r), compact
    raise ParseError(f"cannot parse manifold description {text!r}")
