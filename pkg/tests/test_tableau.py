import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lirkw.errors import DegenerateParameters, TableauFormatError
from lirkw.tableau import (ROW_SUM, STIFFLY_ACCURATE, TYPE1_FLAGS, TYPE2_FLAGS, MethodType,
                           Tableau, dumps, load, dump, loads, stiff_limit_stages,
                           table1_type1, table2_type2, validate)


def test_table1_published_entries():
    t = table1_type1()
    assert t.a[1, 0] == 0.5203
    assert t.gamma[4, 4] == 1.0 and t.g[4] == 1.0
    assert t.method_type == MethodType.TYPE1
    assert t.s == 5


def test_table1_row3_gamma_sum_is_zero():
    t = table1_type1()
    assert t.gamma[2, :3].tolist() == [0.9115, -1.876, 0.9645]
    assert abs(t.gamma[2].sum()) < 1e-15


def test_table1_structural_constraints():
    rep = validate(table1_type1(), TYPE1_FLAGS)
    assert rep.passed, rep.failures()
    for _, v in rep.entries:
        assert v < 1e-12


def test_row_sum_violation_is_reported():
    t = table1_type1()
    g = t.gamma.copy()
    g[4, 1] += 1e-3
    rep = validate(t.replace(gamma=g), ROW_SUM)
    assert not rep.passed
    assert rep.violation(ROW_SUM) == pytest.approx(1e-3, rel=1e-9)


@pytest.mark.parametrize("gam,gam54,a43", [(0.25, -0.5, 0.3), (0.4, 0.1, 0.2), (1.0, -1.0, 0.5)])
def test_table2_structure(gam, gam54, a43):
    t = table2_type2(gam, gam54, a43)
    assert t.a[1, 0] == pytest.approx(1 / 6)
    assert np.array_equal(t.b, t.a[-1])
    assert validate(t, TYPE2_FLAGS).passed
    assert validate(t, STIFFLY_ACCURATE, tol=0.0).passed


def test_table2_sample_b_row():
    t = table2_type2(0.25, -0.5, 0.3)
    np.testing.assert_array_equal(t.b, [1, -1.5, 0, 1.5, 0])


def test_table2_first_rows_zero():
    t = table2_type2(0.25, -0.5, 0.3)
    assert not t.a[0].any() and not t.gamma[0].any()


@pytest.mark.parametrize("gam,gam54", [(0.2, -0.5), (0.0, 0.3), (-0.4, 1.0)])
def test_table2_degenerate(gam, gam54):
    with pytest.raises(DegenerateParameters):
        table2_type2(gam, gam54, 0.3)


def test_stiff_limit_recursion_explicit_first_stage():
    ahat = np.array([[0.0, 0, 0], [1.0, 2.0, 0], [0.5, 0.5, 1.0]])
    y = stiff_limit_stages(ahat)
    np.testing.assert_allclose(y, [1.0, -0.5, -0.25])


def test_text_round_trip_exact(tmp_path):
    t = table2_type2(0.25, -0.5, 0.3)
    path = tmp_path / "t2.txt"
    dump(t, path)
    back = load(path)
    for name in ("a", "gamma", "b", "g"):
        assert np.array_equal(getattr(back, name), getattr(t, name))
    assert back.method_type == t.method_type


def test_text_comments_and_blank_lines():
    text = "# header comment\n\n" + dumps(table1_type1()).replace("\n", "\n# c\n", 2)
    assert np.array_equal(loads(text).a, table1_type1().a)


@pytest.mark.parametrize("text", [
    "", "wrong header\n", "lirkw-tableau v1 type=1 s=2\n0 0\n",
    "lirkw-tableau v1 type=1 s=1\n0\n0\nx\n1\n",
    "lirkw-tableau v1 type=9 s=1\n0\n0\n1\n0\n",
    "lirkw-tableau v1 type=1 s=2\n0 0\n1\n0 0\n0 0\n1 0\n0 0\n",
])
def test_parse_errors(text):
    with pytest.raises(TableauFormatError):
        loads(text)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 3]))
def test_round_trip_random(s, seed, mtype):
    r = np.random.default_rng(seed)
    t = Tableau(np.tril(r.standard_normal((s, s)), -1), np.tril(r.standard_normal((s, s))),
                r.standard_normal(s), r.standard_normal(s), mtype)
    back = loads(dumps(t))
    for name in ("a", "gamma", "b", "g"):
        assert np.array_equal(getattr(back, name), getattr(t, name))


def test_arrays_are_read_only():
    t = table1_type1()
    with pytest.raises(ValueError):
        t.a[0, 0] = 1.0
