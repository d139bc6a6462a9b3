import itertools
import random
from fractions import Fraction

import pytest

from oracles import gauss_solve, orbit_alexander
from seifert_floer.corpus import corpus
from seifert_floer.errors import ContractError, UnsupportedError
from seifert_floer.lattice import (
    alexander,
    box_classes,
    canonical_vector,
    center_row,
    conjugate_initial,
    conjugate_label,
    enumerate_basis,
    form_of,
    full_path,
    height,
    in_box,
    initial_box,
    is_initial,
    is_l_space,
    is_spin,
    is_terminal,
    maslov,
    push_step,
    same_spin_c,
    seifert_genus,
    spin_c_label,
    tau,
)
from seifert_floer.plumbing import (
    Definiteness,
    SeifertInvariants,
    brieskorn,
    standard_graph,
    torus_knot_surgery,
    torus_model_graph,
)

F = Fraction
G_347 = standard_graph(brieskorn([3, 4, 47], True))
G_FOUR = standard_graph(SeifertInvariants(-2, (F(1, 2), F(1, 2), F(4, 7), F(6, 11))))
G_BUNDLE = torus_model_graph("M(-1;1/2,1/3,1/6)")


def test_canonical_vector():
    assert canonical_vector(G_347) == (1, 0, 0, -2, -10, -2)
    assert canonical_vector(G_BUNDLE) == (1, 0, -1, -4)
    assert canonical_vector(G_FOUR) == (0, 0, 0, 0, -2, 0, -4)
    assert is_initial(G_347, canonical_vector(G_347))


def test_push_step():
    V = (1, 0, -1, -4)
    W = push_step(G_BUNDLE, V, 0)
    assert W == (-1, 2, 1, -2)
    assert maslov(G_BUNDLE, V) == maslov(G_BUNDLE, W) == F(-1, 2)
    with pytest.raises(ContractError):
        push_step(G_BUNDLE, V, 1)


def test_full_path_examples():
    g = standard_graph(brieskorn([2, 3, 5], True))
    assert canonical_vector(g) == (1, 0, -1, -3)
    assert not full_path(g, canonical_vector(g)).ends_correctly
    p = full_path(G_BUNDLE, (1, 0, -1, -4))
    assert p.ends_correctly and not p.has_loop
    assert is_terminal(G_BUNDLE, p.terminal)
    q = full_path(torus_model_graph("M(-2;1/2,1/2,1/2,1/2)"), (-2, 2, 2, 0, 0), require_initial=False)
    assert q.ends_correctly
    with pytest.raises(ContractError):
        full_path(G_BUNDLE, (3, 0, -1, -4))


def test_maslov_examples():
    assert maslov(G_347, (1, 0, 0, -2, -10, -2)) == 19
    assert maslov(G_FOUR, (0, 0, 0, 0, -2, 0, -4)) == F(5, 36)
    assert maslov(G_BUNDLE, (1, 0, -1, -4)) == F(-1, 2)
    # A vector with a nonzero kernel pairing has no absolute grading.
    assert not spin_c_label(G_BUNDLE, (1, 0, -1, -2)).torsion
    with pytest.raises(UnsupportedError):
        maslov(G_BUNDLE, (1, 0, -1, -2))


def test_alexander_is_affine():
    Vc = canonical_vector(G_347)
    e1 = [1] + [0] * 5
    row = gauss_solve(form_of(G_347).Q, e1)  # Q symmetric, so this is e1^T Q^-1
    for V in itertools.islice(initial_box(G_347), 0, 2000, 97):
        diff = sum(a * (x - y) for a, x, y in zip(row, V, Vc))
        assert 2 * (alexander(G_347, V) - alexander(G_347, Vc)) == diff
    with pytest.raises(UnsupportedError):
        alexander(G_BUNDLE, canonical_vector(G_BUNDLE))


def test_spin_c_labels():
    a, b = (1, 0, 0, -2, -10, -2), (1, 0, 0, -2, -2, 2)
    assert same_spin_c(G_347, a, b)
    assert is_spin(G_347, a)
    labels = {spin_c_label(G_FOUR, V) for V in itertools.product(*[range(m, -m + 1, 2) for m in G_FOUR.framings])}
    assert len(labels) == 36


def test_label_definition_matches_lattice():
    """Equal labels exactly when Q^-1 (V - W) is an even integer vector."""
    g = G_FOUR
    rng = random.Random(5)
    box = list(initial_box(g))
    for _ in range(200):
        V, W = rng.choice(box), rng.choice(box)
        d = gauss_solve(g.matrix(), [x - y for x, y in zip(V, W)])
        even = all(x.denominator == 1 and x.numerator % 2 == 0 for x in d)
        assert same_spin_c(g, V, W) == even
        assert conjugate_label(g, spin_c_label(g, V)) == spin_c_label(g, tuple(-x for x in V))


def test_conjugate_initial():
    for b in enumerate_basis(G_347):
        p = b.path
        c = conjugate_initial(G_347, p)
        assert is_initial(G_347, c)
        assert conjugate_initial(G_347, full_path(G_347, c)) == p.initial
        assert maslov(G_347, c) == maslov(G_347, p.initial)


def test_height_examples():
    g = G_347
    p_can = full_path(g, canonical_vector(g))
    assert height(g, [p_can]) == 6
    pair = [p_can, full_path(g, (1, 0, 0, -2, -2, 2))]
    assert height(g, pair) == 222
    q = full_path(G_FOUR, canonical_vector(G_FOUR))
    assert q.initial == q.terminal and height(G_FOUR, [q]) == 0
    with pytest.raises(ContractError):
        height(g, [p_can, full_path(g, (1, 0, 0, -2, -10, 0))])


def test_enumerate_basis_examples():
    basis = enumerate_basis(G_347)
    assert len({b.spinc for b in basis}) == 1
    # The 15 realised vectors plus four classes with last coordinate 4,
    # which lie outside the realised ranges.
    assert len(basis) == 19
    starts = {b.path.initial for b in basis}
    realised = {(1, 0, 0, -2, x, y) for x in range(-10, -1, 2) for y in (-2, 0, 2)}
    assert realised <= starts
    extra = sorted(starts - realised)
    assert [V[-1] for V in extra] == [4, 4, 4, 4]
    assert sorted(maslov(G_347, V) for V in extra) == [-1, -1, 7, 7]
    assert enumerate_basis(standard_graph(brieskorn([2, 3, 5], True))) == []
    plain = [b for b in enumerate_basis(G_BUNDLE) if not b.path.has_loop]
    assert [b.path.initial for b in plain] == [(1, 0, -1, -4)]
    assert enumerate_basis(G_347, parallel=2) == basis


def test_box_classes_on_torus_bundle():
    classes = box_classes(G_BUNDLE)
    plain = [c for c in classes if not c.has_loop]
    assert len(plain) == 1 and plain[0].maslov == F(-1, 2)


def test_canonical_vector_is_extremal():
    # Indefinite: V_can has the least F among initial vectors that end correctly.
    Vc = canonical_vector(G_347)
    others = [b.path.initial for b in enumerate_basis(G_347) if b.path.initial != Vc]
    assert all(alexander(G_347, Vc) < alexander(G_347, V) for V in others)
    assert all(x > 0 for x in center_row(G_347))
    # Negative-definite: W_can has the largest F.
    g = standard_graph(brieskorn([2, 3, 7]))
    assert form_of(g).definiteness is Definiteness.NEGATIVE_DEFINITE
    assert all(x < 0 for x in center_row(g))
    W = canonical_vector(g)
    assert all(alexander(g, V) < alexander(g, W) for V in initial_box(g) if V != W)


def test_tau_against_orbit_scan():
    for b in enumerate_basis(G_347):
        fs = orbit_alexander(G_347, b.path.initial)
        assert tau(G_347, [b.path]) == min(fs)
        assert tau(G_347, [b.path], side="dual") == -min(fs)
        assert max(fs) - min(fs) == b.path.center_steps
    with pytest.raises(ContractError):
        tau(G_347, [b.path], side="sideways")


def test_seifert_genus():
    # Evaluated independently: (1/(-e) + e1^T Q^-1 W_can) / 2 with a Gauss solve.
    for a, e, expected in (((2, 3, 5), F(-1, 30), 15), ((2, 3, 7), F(-1, 42), 22)):
        g = standard_graph(brieskorn(a))
        row = gauss_solve(g.matrix(), [1] + [0] * (g.size - 1))
        W = canonical_vector(g)
        assert (1 / -e + sum(x * w for x, w in zip(row, W))) / 2 == expected
        assert seifert_genus(g) == expected
        assert tau(g, [full_path(g, W)]) == expected
    with pytest.raises(ContractError):
        seifert_genus(G_347)


def test_genus_nonnegative_on_corpus():
    for s in corpus(50, 11, max_den=12, max_box=5000, euler="negative"):
        assert seifert_genus(standard_graph(s)) >= 0


def test_l_space_examples():
    assert is_l_space(brieskorn([2, 3, 5])) and is_l_space(brieskorn([2, 3, 5], True))
    assert not is_l_space(brieskorn([3, 4, 47], True))
    assert is_l_space(torus_knot_surgery(3, 4, 1, 5))
    assert not is_l_space(torus_knot_surgery(3, 4, 1, F(49, 10)))
    assert not is_l_space(SeifertInvariants(-1, (F(1, 2), F(1, 3), F(1, 6))))


def test_box_bound_never_raises():
    for s in corpus(30, 12, max_den=9, max_box=3000, euler="any"):
        g = standard_graph(s)
        for V in initial_box(g):
            p = full_path(g, V, keep_orbit=True)
            inside = [W for W in p.orbit if in_box(g, W)]
            # Only the last visited vector may leave the box.
            assert len(inside) >= len(p.orbit) - 1
            assert p.ends_correctly == all(in_box(g, W) for W in p.orbit)
