"""Realised vectors, twisting numbers and the enumeration of negative-twisting structures."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, gcd, prod
from typing import Optional, Sequence

from .errors import ConsistencyError, ContractError, UnsupportedError
from .lattice import (
    FullPath,
    SpinCLabel,
    alexander,
    canonical_vector,
    center_row,
    conjugate_initial,
    form_of,
    full_path,
    height,
    is_l_space,
    is_spin,
    maslov,
    spin_c_label,
)
from .numtheory import as_rational, best_upper_approx, eval_cont_frac, neg_cont_frac
from .plumbing import (
    DecompositionLabels,
    Definiteness,
    S3Subgraph,
    SeifertInvariants,
    StarGraph,
    brieskorn,
    decomposition_labels,
    euler_number,
    exact_torus_bundle,
    s3_subgraph,
    standard_graph,
    type_AB,
)

DEFAULT_WINDOW = 8


def default_window() -> int:
    raw = os.environ.get("SEIFERT_FLOER_WINDOW")
    if raw is None:
        return DEFAULT_WINDOW
    try:
        value = int(raw)
    except ValueError as exc:
        raise ContractError(f"SEIFERT_FLOER_WINDOW must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ContractError("SEIFERT_FLOER_WINDOW must be positive")
    return value


# --------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class RealisedVector:
    vector: tuple
    path: FullPath
    spinc: SpinCLabel
    maslov: Optional[Fraction]
    alex: Optional[Fraction]
    conj_partner: Optional[int] = None


@dataclass(frozen=True)
class Flags:
    pyramidion: bool = False
    casing_stone: bool = False
    self_conjugate: bool = False
    stein_obstructed: bool = False
    stein_fillable: bool = False

    def names(self) -> tuple:
        return tuple(k for k, v in self.__dict__.items() if v)


@dataclass(frozen=True)
class ContactStructure:
    """One isotopy class.  ``kind`` is ``("BlowDown", v)``, ``("PairA", i, j)`` or ``("Pyramid", i, j, k)``.

    Indices in ``kind`` and ``cplus_coords`` point into the realised list of
    the enclosing report.
    """

    spinc: SpinCLabel
    d3: Optional[Fraction]
    tw: int
    kind: tuple
    cplus_coords: tuple
    flags: Flags


@dataclass(frozen=True)
class TwistingSet:
    values: tuple  # sorted descending: the largest (closest to zero) first
    certificates: dict = field(default_factory=dict)  # q -> (p_1, ..., p_n)
    infinite: bool = False
    window: Optional[int] = None

    def __contains__(self, tw):
        return tw in self.values


@dataclass(frozen=True)
class Group:
    spinc: SpinCLabel
    d3: Optional[Fraction]
    members: tuple  # realised indices sorted by F


@dataclass
class ClassificationReport:
    manifold: SeifertInvariants
    graph: StarGraph
    type: str
    model: Optional[str]
    realised: list
    groups: list
    twisting: TwistingSet
    structures: list
    tw_bar: Optional[int]
    spinc_count: Optional[int]
    descriptor: str = ""
    checks: list = field(default_factory=list)  # (name, passed, details)
    notes: list = field(default_factory=list)

    @property
    def twisting_set(self) -> tuple:
        return self.twisting.values

    @property
    def counts_by_tw(self) -> dict:
        out = {}
        for s in self.structures:
            out[s.tw] = out.get(s.tw, 0) + 1
        return dict(sorted(out.items(), reverse=True))


# --------------------------------------------------------------------------
# realised vectors


def realised_ranges(g: StarGraph, labels: DecompositionLabels) -> list:
    """Per-vertex coordinate ranges; vertices of the S^3 subgraph are pinned to ``m+2``."""
    out = []
    for j, m in enumerate(g.framings):
        if j in labels.Gp.members:
            out.append(range(m + 2, m + 3, 2))
        else:
            out.append(range(m + 2, -m - 2 - 2 * labels.shift[j] + 1, 2))
    return out


def realised_vectors(g: StarGraph, labels: Optional[DecompositionLabels] = None) -> list:
    """Realised vectors in lexicographic order, each checked to end correctly."""
    if labels is None:
        labels = decomposition_labels(g)
    f = form_of(g)
    vectors = list(itertools.product(*realised_ranges(g, labels)))
    index = {v: k for k, v in enumerate(vectors)}
    out = []
    for V in vectors:
        p = full_path(g, V)
        if not p.ends_correctly:
            raise ConsistencyError("realised vector does not end correctly", vector=V)
        try:
            grade = maslov(g, V)
        except UnsupportedError:
            grade = None
        alex = alexander(g, V) if f.det != 0 else None
        partner = None
        if not p.has_loop:
            partner = index.get(conjugate_initial(g, p))
            if partner is None:
                raise ConsistencyError("realised set is not closed under conjugation", vector=V)
        out.append(RealisedVector(V, p, spin_c_label(g, V), grade, alex, partner))
    return out


def group_realised(realised: Sequence[RealisedVector]) -> list:
    """Split by (Spin^c, d3); members sorted by F (then coordinates)."""
    buckets = {}
    for k, rv in enumerate(realised):
        buckets.setdefault((rv.spinc, rv.maslov), []).append(k)
    groups = []
    for (label, d3), members in buckets.items():
        members.sort(key=lambda k: (realised[k].alex if realised[k].alex is not None else 0, realised[k].vector))
        groups.append(Group(label, d3, tuple(members)))
    groups.sort(key=lambda gr: (gr.spinc, -(gr.d3 if gr.d3 is not None else 0), gr.members))
    return groups


# --------------------------------------------------------------------------
# twisting numbers


def tw_bar(g: StarGraph, sub: Optional[S3Subgraph] = None) -> int:
    """Largest negative twisting number, from the S^3 subgraph and from the height of V_can."""
    sub = s3_subgraph(g) if sub is None else sub
    by_graph = -1 if sub.empty else -sub.d1 - sub.d2
    p = full_path(g, canonical_vector(g))
    if not p.ends_correctly:
        raise ContractError("V_can does not end correctly: no negative-twisting structures")
    if p.has_loop or form_of(g).det == 0:
        h = p.center_steps
    else:
        h = height(g, [p])
    if by_graph != -1 - h:
        raise ConsistencyError("tw_bar computations disagree", by_subgraph=by_graph, by_height=-1 - h)
    return by_graph


def _certificate(s: SeifertInvariants, q: int) -> Optional[tuple]:
    ps = []
    for r in s.r:
        p = best_upper_approx(r, q)
        if p is None:
            return None
        ps.append(p)
    if sum(ps) != -s.e0 * q + s.n - 2:
        return None
    return tuple(ps)


def ghiggini_massot(s: SeifertInvariants, window: Optional[int] = None) -> TwistingSet:
    """Negative twisting numbers from best upper approximations.

    Negative-definite and singular (non torus bundle) manifolds have a single
    twisting number.  Exact torus bundles carry an infinite family, of which
    the ``window`` values closest to zero are returned.
    """
    e = euler_number(s)
    g = standard_graph(s)
    if e < 0:
        return TwistingSet((tw_bar(g),))
    if e > 0 and is_l_space(s):
        return TwistingSet(())
    certs = {}
    values = []
    if s.e0 <= -2:
        values.append(-1)
    if e > 0:
        bound = ceil((s.n - 2) / e)
        for q in range(2, bound):
            c = _certificate(s, q)
            if c is not None:
                certs[q] = c
                values.append(-q)
        return TwistingSet(tuple(sorted(set(values), reverse=True)), certs)
    if exact_torus_bundle(g) is None:
        return TwistingSet((tw_bar(g),))
    window = default_window() if window is None else window
    q = 1
    while len(values) < window:
        q += 1
        c = _certificate(s, q)
        if c is not None:
            certs[q] = c
            values.append(-q)
    values = sorted(values, reverse=True)[:window]
    return TwistingSet(tuple(values), {q: c for q, c in certs.items() if -q in values}, True, window)


def _pair_paths(realised, i, j):
    return [realised[i].path, realised[j].path]


def twisting_numbers_via_heights(g: StarGraph, realised: Sequence[RealisedVector], groups: Sequence[Group]) -> set:
    """``{-1 - height[V_can]}`` together with ``-1 - height([V_can] + [V])`` over V in the group of V_can."""
    vcan = canonical_vector(g)
    k_can = next(k for k, rv in enumerate(realised) if rv.vector == vcan)
    out = {-1 - height(g, [realised[k_can].path])}
    grp = next(gr for gr in groups if k_can in gr.members)
    for k in grp.members:
        if k != k_can:
            out.add(-1 - height(g, _pair_paths(realised, k_can, k)))
    if is_spin(g, vcan):
        lowest = -1 + sum(a * v for a, v in zip(center_row(g), vcan))
        if lowest != min(out):
            raise ConsistencyError("lowest twisting number disagrees with the spin formula",
                                   via_heights=min(out), via_spin=lowest)
    return out


def count_formula(s: SeifertInvariants, q: int, twisting: Optional[TwistingSet] = None) -> int:
    """Number of structures with twisting number ``-q`` predicted by continued fractions."""
    twisting = ghiggini_massot(s) if twisting is None else twisting
    if -q not in twisting:
        raise ContractError(f"{-q} is not a twisting number of {s}")
    chains = [neg_cont_frac(r) for r in s.r]
    if q == 1:
        return abs(s.e0 + 1) * prod(abs(m + 1) for ms in chains for m in ms)
    total = 1
    for r, ms in zip(s.r, chains):
        p = best_upper_approx(r, q)
        ns = neg_cont_frac(Fraction(p, q))
        if len(ns) == len(ms) + 1 and ns[: len(ms)] == ms:
            total *= 1
            continue
        h = len(ns) - 1
        if h >= len(ms) or ns[:h] != ms[:h] or ns[h] <= ms[h]:
            raise ConsistencyError("unexpected continued fraction comparison", r=r, q=q, short=ns, long=ms)
        total *= (ns[h] - ms[h]) * prod(abs(m + 1) for m in ms[h + 1:])
    return total


# --------------------------------------------------------------------------
# classification


def _flags(realised, members, i, j, k, tw, top) -> Flags:
    coords = {members[l] for l in range(i, j + 1) if comb(j - i, l - i) % 2}
    spin = all(x.denominator == 1 for x in realised[members[0]].spinc.residue) and realised[members[0]].spinc.torsion
    self_conj = spin and all(realised[c].conj_partner in coords for c in coords)
    return Flags(
        pyramidion=(i, j) == (0, k - 1),
        casing_stone=(i == 0 < j < k - 1) or (0 < i < j == k - 1),
        self_conjugate=self_conj,
        stein_obstructed=tw < top and self_conj,
        stein_fillable=False,
    )


def _blowdowns(realised, top) -> list:
    out = []
    for k, rv in enumerate(realised):
        spin = rv.spinc.torsion and all(x.denominator == 1 for x in rv.spinc.residue)
        flags = Flags(self_conjugate=spin and rv.conj_partner == k, stein_fillable=True)
        out.append(ContactStructure(rv.spinc, rv.maslov, top, ("BlowDown", k), (k,), flags))
    return out


def _check(report, name, ok, **details):
    report.checks.append((name, bool(ok), details))
    if not ok:
        raise ConsistencyError(f"check {name} failed", **details)


def classify(s: SeifertInvariants, window: Optional[int] = None, descriptor: str = "") -> ClassificationReport:
    """Enumerate the negative-twisting structures of ``s`` with their invariants."""
    g = standard_graph(s)
    f = form_of(g)
    e = euler_number(s)
    spinc_count = abs(f.det) if f.det else None
    empty = TwistingSet(())
    if e > 0 and is_l_space(s):
        r = ClassificationReport(s, g, "LSpace", None, [], [], empty, [], None, spinc_count, descriptor)
        r.notes.append("L-space: no negative-twisting structures")
        return r
    sub = s3_subgraph(g)
    labels = decomposition_labels(g, sub)
    top = tw_bar(g, sub)
    realised = realised_vectors(g, labels)
    groups = group_realised(realised)
    structures = _blowdowns(realised, top)

    if f.definiteness is Definiteness.NEGATIVE_DEFINITE:
        kind, model = "NegDefinite", None
        twisting = TwistingSet((top,))
    elif f.definiteness is Definiteness.SINGULAR:
        model = exact_torus_bundle(g)
        kind = "SingularTorusBundle" if model else "Singular"
        twisting = ghiggini_massot(s, window)
    else:
        ab, model = type_AB(g)
        kind = "TypeA" if ab == "A" else "TypeB"
        twisting = ghiggini_massot(s, window)

    report = ClassificationReport(s, g, kind, model, realised, groups, twisting, structures, top,
                                  spinc_count, descriptor, notes=list(labels.warnings))
    _check(report, "tw_bar_in_twisting_set", top in twisting.values, tw_bar=top, twisting=twisting.values)

    if kind == "SingularTorusBundle":
        report.notes.append("torus bundle: structures below tw_bar form an infinite family and are not enumerated")
        return report

    if kind in ("TypeA", "TypeB"):
        via_heights = twisting_numbers_via_heights(g, realised, groups)
        _check(report, "twisting_two_algorithms", via_heights == set(twisting.values),
               via_heights=sorted(via_heights, reverse=True), ghiggini_massot=list(twisting.values))
        for gr in groups:
            members = gr.members
            k = len(members)
            if k < 2:
                continue
            if kind == "TypeA":
                tw = -1 - height(g, _pair_paths(realised, members[0], members[-1]))
                if tw in twisting.values and tw < top:
                    flags = _flags(realised, members, 0, k - 1, k, tw, top)
                    flags = Flags(self_conjugate=flags.self_conjugate, stein_obstructed=flags.stein_obstructed)
                    structures.append(ContactStructure(gr.spinc, gr.d3, tw, ("PairA", members[0], members[-1]),
                                                       (members[0], members[-1]), flags))
                continue
            for i in range(k):
                for j in range(i + 1, k):
                    tw = -1 - height(g, _pair_paths(realised, members[i], members[j]))
                    coords = tuple(members[l] for l in range(i, j + 1) if comb(j - i, l - i) % 2)
                    flags = _flags(realised, members, i, j, k, tw, top)
                    structures.append(ContactStructure(gr.spinc, gr.d3, tw, ("Pyramid", i + 1, j + 1, k),
                                                       coords, flags))

    counts = report.counts_by_tw
    for tw in twisting.values:
        expected = count_formula(s, -tw, twisting)
        _check(report, f"count_q{-tw}", counts.get(tw, 0) == expected, q=-tw, structures=counts.get(tw, 0),
               formula=expected)
    _check(report, "no_stray_twisting_numbers", set(counts) <= set(twisting.values),
           structures=sorted(counts), twisting=list(twisting.values))
    return report


# --------------------------------------------------------------------------
# closed-form oracle for torus knot surgeries


def predict_torus_surgery(d2: int, d1: int, sign: int, r, window: int = DEFAULT_WINDOW) -> TwistingSet:
    """Twisting numbers of ``r``-surgery on ``T(d2, sign*d1)`` from closed formulas alone."""
    r = as_rational(r)
    a = d1 * d2 - d1 - d2
    base = -d1 - d2
    if sign == -1:
        if r <= -d1 * d2:
            return TwistingSet(())
        pos = predict_torus_surgery(d2, d1, 1, r, window) if r < a else TwistingSet(())
        lowered = [t - 2 * a for t in pos.values if t != base]
        # The s = 0 instance of the interval test: [n_1] = -(d1 + d2) with the
        # empty prefix read as n_1 - 1, i.e. a - 1 <= r < a.
        if a - 1 <= r < a:
            lowered.append(base - 2 * a)
        values = sorted({-1, *lowered}, reverse=True)
        if pos.infinite:
            values = values[:window]
        return TwistingSet(tuple(values), infinite=pos.infinite, window=pos.window)
    if r > d1 * d2:
        # Negative-definite orientation with e0 <= -2: -1 is the only twisting number.
        return TwistingSet((-1,))
    if r >= a:
        return TwistingSet(())
    if r < 0:
        return TwistingSet((base,))
    if (d2, d1) == (2, 3):
        if r == 0:
            return TwistingSet(tuple(-5 - 6 * s for s in range(window)), infinite=True, window=window)
        # r lies in [1/n, 1/(n-1)) exactly when n - 1 < 1/r <= n.
        n = ceil(1 / r)
        return TwistingSet(tuple([base] + [-5 - 6 * s for s in range(1, n - 1)]))
    values = [base]
    target = -d1 * d2 + r
    s = 1
    while r == 0 or s + 1 < Fraction(a) / r:
        q = d1 + d2 + s * d1 * d2
        if gcd(q, s + 1) == 1:
            ns = neg_cont_frac(Fraction(s + 1, q))
            left = eval_cont_frac(ns[:-1]) if len(ns) > 1 else None
            right = eval_cont_frac(ns)
            if left is not None and left <= target < right:
                values.append(-q)
        s += 1
        if r == 0 and s > 10 * window:
            break
    return TwistingSet(tuple(sorted(values, reverse=True)))


# --------------------------------------------------------------------------
# Brieskorn spheres


def _sigma_23_6k(a: Sequence[int]) -> bool:
    a = sorted(a)
    return len(a) == 3 and a[:2] == [2, 3] and a[2] % 6 in (1, 5)


def brieskorn_summary(a: Sequence[int], reversed: bool = False) -> dict:
    """Expected type and uniqueness for a Brieskorn sphere, checked against :func:`classify`."""
    s = brieskorn(a, reversed)
    report = classify(s)
    key = (tuple(sorted(a)), reversed)
    unique = key in {((2, 3, 5), False), ((2, 3, 7), True), ((2, 3, 11), True)}
    expected_type = None
    if reversed:
        if key == ((2, 3, 5), True):
            expected_type = "LSpace"
        else:
            expected_type = "TypeB" if _sigma_23_6k(a) else "TypeA"
    summary = {
        "manifold": str(s),
        "type": report.type,
        "expected_type": expected_type,
        "structures": len(report.structures),
        "unique_expected": unique,
    }
    if expected_type is not None and report.type != expected_type:
        raise ConsistencyError("Brieskorn type disagrees", expected=expected_type, got=report.type)
    if unique and len(report.structures) != 1:
        raise ConsistencyError("expected a unique structure", structures=len(report.structures))
    if report.type == "TypeA":
        below = [c for c in report.structures if c.tw < report.tw_bar]
        if len(below) > 1:
            raise ConsistencyError("more than one structure below tw_bar", count=len(below))
    return summary
