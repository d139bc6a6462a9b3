"""Full paths of characteristic vectors and the gradings read off from them.

A characteristic vector is a tuple of ints in the canonical vertex order of
a :class:`~seifert_floer.plumbing.StarGraph`.  A push at vertex ``i`` is
allowed when ``v_i = -m(i)`` and replaces ``V`` by ``V + 2 Q e_i``.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import ConsistencyError, ContractError, UnsupportedError
from .plumbing import (
    Definiteness,
    IntersectionForm,
    SeifertInvariants,
    StarGraph,
    dual,
    euler_number,
    intersection_form,
    standard_graph,
)

CharVector = tuple


@lru_cache(maxsize=512)
def form_of(g: StarGraph) -> IntersectionForm:
    return intersection_form(g)


# --------------------------------------------------------------------------
# vectors and boxes


def canonical_vector(g: StarGraph) -> CharVector:
    return tuple(m + 2 for m in g.framings)


def is_characteristic(g: StarGraph, V: Sequence[int]) -> bool:
    return len(V) == g.size and all((v - m) % 2 == 0 for v, m in zip(V, g.framings))


def in_box(g: StarGraph, V: Sequence[int]) -> bool:
    return all(abs(v) <= -m for v, m in zip(V, g.framings))


def is_initial(g: StarGraph, V: Sequence[int]) -> bool:
    return is_characteristic(g, V) and all(m + 2 <= v <= -m for v, m in zip(V, g.framings))


def is_terminal(g: StarGraph, V: Sequence[int]) -> bool:
    return is_characteristic(g, V) and all(m <= v <= -m - 2 for v, m in zip(V, g.framings))


def initial_box(g: StarGraph) -> Iterable[CharVector]:
    """Every initial vector, in lexicographic order."""
    ranges = [range(m + 2, -m + 1, 2) for m in g.framings]
    return itertools.product(*ranges)


def push_step(g: StarGraph, V: Sequence[int], i: int) -> CharVector:
    m = g.framings[i]
    if V[i] != -m:
        raise ContractError(f"cannot push at vertex {i}: coordinate {V[i]} differs from {-m}")
    out = list(V)
    out[i] += 2 * m
    for j in g.neighbors[i]:
        out[j] += 2
    return tuple(out)


# --------------------------------------------------------------------------
# Spin^c labels


@dataclass(frozen=True, order=True)
class SpinCLabel:
    """Canonical residue of a characteristic vector modulo the image of ``2Q``.

    For invertible ``Q`` the residue is ``Q^{-1} V`` reduced mod 2 entrywise.
    For singular ``Q`` it is read off a Smith decomposition of ``2Q``; the
    ``torsion`` flag records whether ``QB = V`` has a rational solution.
    """

    residue: tuple
    torsion: bool = True

    def __str__(self):
        from .numtheory import format_rational

        body = ",".join(format_rational(x) for x in self.residue)
        return f"({body})" if self.torsion else f"({body})*"


def spin_c_label(g: StarGraph, V: Sequence[int]) -> SpinCLabel:
    f = form_of(g)
    if f.det != 0:
        return SpinCLabel(tuple(x % 2 for x in f.inv_apply(V)))
    uv = [sum(a * x for a, x in zip(row, V)) for row in f.snf_left]
    res = tuple(Fraction(x % d) if d else Fraction(x) for x, d in zip(uv, f.snf_diag))
    torsion = sum(k * x for k, x in zip(f.kernel, V)) == 0
    return SpinCLabel(res, torsion)


def same_spin_c(g: StarGraph, V: Sequence[int], W: Sequence[int]) -> bool:
    return spin_c_label(g, V) == spin_c_label(g, W)


def is_spin(g: StarGraph, V: Sequence[int]) -> bool:
    f = form_of(g)
    if f.det == 0:
        sol = f.solve(V)
        return sol is not None and all(x.denominator == 1 for x in sol)
    return all(x.denominator == 1 for x in f.inv_apply(V))


def conjugate_label(g: StarGraph, label: SpinCLabel) -> SpinCLabel:
    """Label of ``-V`` given the label of ``V`` (invertible case)."""
    f = form_of(g)
    if f.det == 0:
        raise UnsupportedError("label conjugation is only implemented for invertible forms")
    return SpinCLabel(tuple((-x) % 2 for x in label.residue), label.torsion)


# --------------------------------------------------------------------------
# gradings


def maslov(g: StarGraph, V: Sequence[int]) -> Fraction:
    """Absolute Maslov grading, with the formula chosen by the definiteness of ``Q``."""
    f = form_of(g)
    N = g.size
    if f.definiteness is Definiteness.NEGATIVE_DEFINITE:
        return (f.inv_form(V) + N) / 4
    if f.definiteness is Definiteness.INDEFINITE:
        return (f.inv_form(V) + N - 6) / 4
    B = f.solve(V)
    if B is None:
        raise UnsupportedError("grading undefined: the Spin^c structure is not torsion")
    return (sum(b * v for b, v in zip(B, V)) + N - 3) / 4


def alexander(g: StarGraph, V: Sequence[int]) -> Fraction:
    """``F(V) = (-e1^T Q^{-1} e1 + e1^T Q^{-1} V) / 2``."""
    f = form_of(g)
    if f.det == 0:
        raise UnsupportedError("the Alexander filtration needs an invertible form")
    row = f.adj[0]
    return Fraction(-row[0] + sum(a * v for a, v in zip(row, V)), 2 * f.det)


def center_row(g: StarGraph) -> tuple:
    """``e1^T Q^{-1}`` as Fractions."""
    return form_of(g).row_inv(0)


# --------------------------------------------------------------------------
# full paths


@dataclass(frozen=True)
class FullPath:
    initial: CharVector
    terminal: Optional[CharVector]
    ends_correctly: bool
    has_loop: bool
    visited_count: int
    center_steps: int
    min_alex_vector: CharVector
    max_alex_vector: CharVector
    representative: CharVector
    orbit: Optional[tuple] = None

    @property
    def height(self) -> int:
        """Number of central pushes, i.e. the F-range of the path."""
        return self.center_steps


def full_path(
    g: StarGraph,
    V: Sequence[int],
    rng: Optional[random.Random] = None,
    keep_orbit: bool = False,
    require_initial: bool = True,
    max_steps: int = 10_000_000,
) -> FullPath:
    """Walk forward from ``V`` until a terminal vector, a loop, or the box is left.

    By default the smallest admissible vertex is pushed; passing ``rng``
    picks uniformly among admissible vertices instead.
    """
    V = tuple(V)
    if require_initial and not is_initial(g, V):
        raise ContractError(f"{V} is not an initial vector")
    neg_m = tuple(-m for m in g.framings)
    N = len(V)
    cur = list(V)
    seen = {V: 0}
    orbit = [V] if keep_orbit else None
    center = 0
    lo_vec = hi_vec = V
    lo = hi = 0
    steps = 0
    while True:
        if any(abs(cur[j]) > neg_m[j] for j in range(N)):
            return FullPath(V, None, False, False, len(seen), center, lo_vec, hi_vec, V,
                            tuple(orbit) if keep_orbit else None)
        admissible = [j for j in range(N) if cur[j] == neg_m[j]]
        if not admissible:
            t = tuple(cur)
            return FullPath(V, t, True, False, len(seen), center, lo_vec, hi_vec, V,
                            tuple(orbit) if keep_orbit else None)
        i = admissible[0] if rng is None else rng.choice(admissible)
        cur[i] = -cur[i]
        for j in g.neighbors[i]:
            cur[j] += 2
        if i == 0:
            center += 1
        steps += 1
        if steps > max_steps:
            raise ConsistencyError("full path exceeded the step limit", start=V)
        t = tuple(cur)
        if keep_orbit:
            orbit.append(t)
        if center > hi:
            hi, hi_vec = center, t
        if t in seen:
            # Only singular forms can revisit a vector; the representative is
            # the least vector visited.
            return FullPath(V, None, True, True, len(seen), center, lo_vec, hi_vec, min(seen),
                            tuple(orbit) if keep_orbit else None)
        seen[t] = steps


def conjugate_initial(g: StarGraph, path: FullPath) -> CharVector:
    """Initial vector of the full path of ``-V``: minus the terminal vector of ``[V]``."""
    if not path.ends_correctly or path.has_loop:
        raise UnsupportedError("conjugation needs a full path ending at a terminal vector")
    return tuple(-x for x in path.terminal)


def path_class(g: StarGraph, V: Sequence[int], limit: int = 1_000_000) -> dict:
    """Connected class of ``V`` under pushes and un-pushes that stay in the box.

    Returns ``{"members", "ends_correctly", "has_loop", "terminal"}``.  The
    class ends correctly when no move leaves the box.  It has a loop when the
    forward walk from ``V`` revisits a vector.  Unlike :func:`full_path` this
    accepts vectors that are not initial.
    """
    V = tuple(V)
    if not in_box(g, V):
        return {"members": frozenset([V]), "ends_correctly": False, "has_loop": False, "terminal": None}
    members = {V}
    stack = [V]
    ok = True
    while stack:
        cur = stack.pop()
        for i, m in enumerate(g.framings):
            if cur[i] == -m:
                nxt = push_step(g, cur, i)
            elif cur[i] == m:
                nxt = list(cur)
                nxt[i] = -m
                for j in g.neighbors[i]:
                    nxt[j] -= 2
                nxt = tuple(nxt)
            else:
                continue
            if not in_box(g, nxt):
                ok = False
                continue
            if nxt not in members:
                members.add(nxt)
                stack.append(nxt)
                if len(members) > limit:
                    raise ConsistencyError("path class exceeded the size limit", start=V)
    fwd = full_path(g, V, require_initial=False)
    return {
        "members": frozenset(members),
        "ends_correctly": ok,
        "has_loop": fwd.has_loop,
        "terminal": fwd.terminal,
    }


# --------------------------------------------------------------------------
# heights and tau


def _same_class_checks(g: StarGraph, paths: Sequence[FullPath]):
    if not paths:
        raise ContractError("need at least one full path")
    for p in paths:
        if not p.ends_correctly or p.has_loop:
            raise ContractError("heights are defined for full paths ending at a terminal vector")
    label = spin_c_label(g, paths[0].initial)
    grade = maslov(g, paths[0].initial)
    for p in paths[1:]:
        if spin_c_label(g, p.initial) != label or maslov(g, p.initial) != grade:
            raise ContractError("full paths differ in Spin^c structure or grading")


def height(g: StarGraph, paths: Sequence[FullPath]) -> int:
    """Spread of the Alexander filtration over a family of full paths.

    Computed twice: as a difference of F values, and as ``-b1`` where
    ``2 Q B = Z1 + Zk'``.  The two must agree.
    """
    _same_class_checks(g, paths)
    lo_path = min(paths, key=lambda p: alexander(g, p.initial))
    hi_path = max(paths, key=lambda p: alexander(g, p.terminal))
    by_f = alexander(g, hi_path.terminal) - alexander(g, lo_path.initial)
    z1 = lo_path.initial
    zk = conjugate_initial(g, hi_path)
    B = form_of(g).solve([a + b for a, b in zip(z1, zk)])
    b1 = B[0] / 2
    if by_f != -b1 or by_f.denominator != 1 or by_f < 0:
        raise ConsistencyError("height formulas disagree", by_alexander=by_f, by_b1=b1)
    return int(by_f)


def tau(g: StarGraph, paths: Sequence[FullPath], side: str = "graph") -> Fraction:
    """Tau invariant of the regular fibre for the class spanned by ``paths``.

    ``side="graph"`` evaluates the class itself: the least F over the orbit of
    the F-maximal path, which sits at its initial vector.  ``side="dual"``
    evaluates the sum of the dual functionals: minus F of the F-minimal
    initial vector.
    """
    _same_class_checks(g, paths)
    if side == "graph":
        top = max(paths, key=lambda p: alexander(g, p.initial))
        return alexander(g, top.initial)
    if side == "dual":
        bottom = min(paths, key=lambda p: alexander(g, p.initial))
        return -alexander(g, bottom.initial)
    raise ContractError(f"unknown side {side!r}")


def seifert_genus(g: StarGraph) -> Fraction:
    """Rational genus of the regular fibre on a negative-definite graph."""
    f = form_of(g)
    if f.definiteness is not Definiteness.NEGATIVE_DEFINITE:
        raise ContractError("the genus formula needs a negative-definite graph")
    e = Fraction(1, 1) / center_row(g)[0]
    w = canonical_vector(g)
    return (1 / -e + sum(a * x for a, x in zip(center_row(g), w))) / 2


# --------------------------------------------------------------------------
# enumeration and the L-space criterion


@dataclass(frozen=True)
class BasisElement:
    path: FullPath
    spinc: SpinCLabel
    maslov: Optional[Fraction]
    alex_range: Optional[tuple]


def _walk(args):
    g, V = args
    return full_path(g, V)


def enumerate_basis(
    g: StarGraph,
    spinc: Optional[SpinCLabel] = None,
    parallel: Optional[int] = None,
) -> list:
    """Every full path from the initial box that ends correctly, one per class."""
    starts = list(initial_box(g))
    if parallel and parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            paths = list(pool.map(_walk, ((g, V) for V in starts), chunksize=64))
    else:
        paths = [full_path(g, V) for V in starts]
    classes = {}
    for p in paths:
        if not p.ends_correctly:
            continue
        key = p.representative if p.has_loop else p.initial
        classes.setdefault(key, p)
    f = form_of(g)
    out = []
    for p in classes.values():
        label = spin_c_label(g, p.initial)
        if spinc is not None and label != spinc:
            continue
        try:
            grade = maslov(g, p.initial)
        except UnsupportedError:
            grade = None
        rng = None
        if f.det != 0 and not p.has_loop:
            rng = (alexander(g, p.initial), alexander(g, p.terminal))
        out.append(BasisElement(p, label, grade, rng))
    out.sort(key=lambda b: (b.spinc, b.alex_range[0] if b.alex_range else Fraction(0), b.path.representative))
    return out


def indefinite_orientation(s: SeifertInvariants) -> Optional[SeifertInvariants]:
    """``s`` or its dual, whichever has positive Euler number (None when zero)."""
    e = euler_number(s)
    if e > 0:
        return s
    if e < 0:
        return dual(s)
    return None


def is_l_space(s: SeifertInvariants) -> bool:
    """L-space test through the canonical vector of the indefinite orientation."""
    t = indefinite_orientation(s)
    if t is None:
        return False
    if t.e0 >= 0:
        return True
    g = standard_graph(t)
    return not full_path(g, canonical_vector(g)).ends_correctly


@dataclass(frozen=True)
class BoxClass:
    representative: CharVector  # least member
    size: int
    ends_correctly: bool
    has_loop: bool
    maslov: Optional[Fraction]


def box_classes(g: StarGraph, only_ending_correctly: bool = True) -> list:
    """Partition every characteristic vector of the box into path classes.

    Unlike :func:`enumerate_basis` this also reaches classes without an
    initial vector, which occur on singular graphs.
    """
    seen = set()
    out = []
    for V in itertools.product(*[range(m, -m + 1, 2) for m in g.framings]):
        if V in seen:
            continue
        c = path_class(g, V)
        seen |= c["members"]
        if only_ending_correctly and not c["ends_correctly"]:
            continue
        rep = min(c["members"])
        loop = full_path(g, rep, require_initial=False).has_loop
        try:
            grade = maslov(g, rep)
        except UnsupportedError:
            grade = None
        out.append(BoxClass(rep, len(c["members"]), c["ends_correctly"], loop, grade))
    out.sort(key=lambda b: b.representative)
    return out
