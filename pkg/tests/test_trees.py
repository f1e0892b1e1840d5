from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lirkw.errors import FamilyMismatch, NotAMeagreTree
from lirkw.tableau import table1_type1, table2_type2
from lirkw.trees import (FAT, SQUARE, TAU, LWTree, all_passed, density,
                         elementary_differential, enumerate_trees, label_of, max_residual,
                         meagre, parse_bracket, phi_sum, reduced_conditions, tau, target,
                         theta, to_bracket, verify_order)

T1 = table1_type1()
T2 = table2_type2(0.25, -0.5, 0.3)


# -- brute-force enumeration oracle --------------------------------------------
# Trees are nested tuples (color, children) with children sorted by repr.

def _brute(n):
    """All colored trees with n vertices obeying the vertex rules."""
    out = set()
    if n < 1:
        return out
    for color in "mfs":
        for kids in _forests(n - 1):
            if color == "f" and len(kids) > 1:
                continue
            if color == "s" and (len(kids) != 1 or kids[0][0] == "m"):
                continue
            out.add((color, kids))
    return out


def _forests(n):
    if n == 0:
        return {()}
    res = set()
    for first in range(1, n + 1):
        for t in _brute(first):
            for rest in _forests(n - first):
                res.add(tuple(sorted((t,) + rest, key=repr)))
    return res


def _brute_count(family, max_order):
    total = 0
    for n in range(1, max_order + 1):
        for t in _brute(n):
            colors = _colors(t)
            if family == "T" and colors != {"m"}:
                continue
            if family in ("LW2", "LW3") and t[0] == "s":
                continue
            total += 1
    return total


def _colors(t):
    out = {t[0]}
    for k in t[1]:
        out |= _colors(k)
    return out


@pytest.mark.parametrize("family,order,count", [
    ("T", 1, 1), ("T", 3, 4), ("LW1", 1, 2), ("LW1", 2, 7), ("LW1", 3, 23),
    ("LW2", 3, 19), ("LW3", 3, 19),
])
def test_published_counts(family, order, count):
    assert len(enumerate_trees(family, order)) == count


@pytest.mark.parametrize("family", ["T", "LW1", "LW2", "LW3"])
@pytest.mark.parametrize("order", [1, 2, 3, 4, 5])
def test_counts_match_brute_force(family, order):
    assert len(enumerate_trees(family, order)) == _brute_count(family, order)


def test_lw1_counts_by_order():
    trees = enumerate_trees("LW1", 3)
    assert [sum(t.order == k for t in trees) for k in (1, 2, 3)] == [2, 5, 16]


def test_enumeration_is_unique_and_sorted():
    trees = enumerate_trees("LW1", 5)
    assert len(set(trees)) == len(trees)
    assert [t.order for t in trees] == sorted(t.order for t in trees)


@given(st.sampled_from(enumerate_trees("LW1", 5)))
def test_bracket_round_trip(t):
    assert parse_bracket(to_bracket(t)) == t
    assert parse_bracket(to_bracket(t).replace("θ", "theta")) == t


def test_catalogue_labels():
    assert sorted(TAU) == list(range(1, 24))
    assert {TAU[i] for i in TAU} == set(enumerate_trees("LW1", 3))
    for i in TAU:
        assert label_of(tau(i)) == f"τ{i}"


def test_vertex_rules():
    with pytest.raises(ValueError, match="singly"):
        LWTree(FAT, (meagre(), meagre()))
    with pytest.raises(ValueError, match="square"):
        LWTree(SQUARE, (meagre(),))
    assert theta(2).order == 3


@pytest.mark.parametrize("i,dens", [(1, 1), (3, 2), (8, 3), (11, 6)])
def test_density(i, dens):
    assert density(tau(i)) == dens
    assert target(tau(i)) == Fraction(1, dens)


def test_density_rejects_colored_trees():
    with pytest.raises(NotAMeagreTree):
        density(tau(2))
    assert target(tau(2)) == 0


def test_elementary_differential_distinct():
    diffs = [elementary_differential(tau(i)) for i in TAU]
    assert len(set(diffs)) == 23


# -- elementary weights against closed forms ------------------------------------

def _closed_forms(tb):
    A, G, b, g = tb.a, tb.gamma, tb.b, tb.g
    one = np.ones(tb.s)
    c = A @ one
    d = np.diag(G)
    return {
        1: b.sum(), 2: g.sum(), 3: b @ c, 4: b @ (G @ one), 5: g @ c, 6: g @ (G @ one),
        7: g @ d, 8: b @ c**2, 11: b @ (A @ c), 16: g @ (A @ c), 19: g @ d**2,
    }


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5, 6, 7, 8, 11, 16, 19])
def test_phi_closed_forms_type1(i):
    assert phi_sum(T1, tau(i), 1) == pytest.approx(_closed_forms(T1)[i], abs=1e-14)


def test_fat_and_square_coincide_under_diagonal_rule():
    # with gamma_ii = c_i the type-1 weights of [[ ]_.]_o and θ1[ ] coincide
    assert phi_sum(T1, tau(5), 1) == pytest.approx(phi_sum(T1, tau(7), 1), abs=1e-15)


def test_square_root_rejected_for_type2():
    with pytest.raises(FamilyMismatch):
        phi_sum(T2, tau(7), 2)


def test_table1_satisfies_all_type1_conditions():
    rows = verify_order(T1, 1, 3)
    assert len(rows) == 23
    assert all_passed(rows, 1e-12)
    assert max_residual(rows) < 1e-12


def test_table1_specific_weights():
    assert phi_sum(T1, tau(1), 1) == pytest.approx(1.0, abs=1e-15)
    assert phi_sum(T1, tau(5), 1) == pytest.approx(0.0, abs=1e-15)
    assert phi_sum(T1, tau(3), 1) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("params", [(0.25, -0.5, 0.3), (0.4, 0.1, 0.2), (1.0, -1.0, 0.5)])
def test_table2_family_satisfies_type2_conditions(params):
    rows = verify_order(table2_type2(*params), 2, 3)
    assert len(rows) == 19
    assert max_residual(rows) < 1e-12


def test_broken_b_shows_on_tau1():
    rows = verify_order(T1.replace(b=T1.b * 1.1), 1, 1)
    assert rows[0].label == "τ1"
    assert rows[0].residual == pytest.approx(0.1, abs=1e-15)


def test_reduced_sets():
    r1 = reduced_conditions(1)
    assert len(r1) == 9
    assert [row.target for row in r1] == [1, Fraction(1, 2), 0, Fraction(1, 3),
                                          Fraction(1, 6), 0, 0, 0, 0]
    r2 = reduced_conditions(2)
    assert len(r2) == 10
    assert all(row.passed() for row in reduced_conditions(1, T1))
    assert all(row.passed() for row in reduced_conditions(2, T2))
