import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stratakit.linalg import GF2, GF3, QQ, Field, Matrix, Subspace, solve


def mat(field, rows, cols=None):
    return Matrix.from_rows(field, rows, cols=cols)


def test_field_validation():
    with pytest.raises(ValueError):
        Field.gf(4)
    with pytest.raises(ValueError):
        Field("GF")
    assert Field.gf(2) == GF2
    assert QQ.of("3/4") == Fraction(3, 4)
    assert GF3.of("5") == 2
    assert GF3.of(Fraction(1, 2)) == 2  # 1/2 = 2 mod 3


def test_rref_identity_gf2():
    m = Matrix.identity(GF2, 2)
    r, rank, piv = m.rref()
    assert r == m and rank == 2 and piv == (0, 1)


def test_rref_zero():
    m = Matrix.zero(GF2, 3, 3)
    r, rank, piv = m.rref()
    assert r == m and rank == 0 and piv == ()


def test_rref_rational_rank_one():
    m = mat(QQ, [[1, 2], [2, 4]])
    r, rank, _ = m.rref()
    assert rank == 1
    assert r == mat(QQ, [[1, 2], [0, 0]])


def test_solve_identity():
    a = Matrix.identity(GF3, 3)
    b = mat(GF3, [[1, 2, 0]])
    part, ker = solve(a, b)
    assert part == b
    assert ker.dim == 0


def test_solve_inconsistent():
    a = Matrix.zero(GF2, 2, 2)
    b = mat(GF2, [[1, 0]])
    assert solve(a, b) is None


def test_solve_underdetermined_gf2():
    # x @ [[1],[1]] = [0]: solutions (0,0) and (1,1)
    a = mat(GF2, [[1], [1]])
    b = mat(GF2, [[0]])
    part, ker = solve(a, b)
    assert part.row(0) in {(0, 0), (1, 1)}
    assert ker.dim == 1
    assert ker.basis.row(0) == (1, 1)


def test_subspace_whole_and_zero():
    u = Subspace.full(GF2, 3)
    v = Subspace.zero(GF2, 3)
    assert u.sum(v) == u
    assert u.intersection(v) == v
    w = Subspace.span(GF2, [(1, 1, 0)], 3)
    assert w.sum(w) == w and w.intersection(w) == w


def test_subspace_three_dim_example():
    u = Subspace.span(GF2, [(1, 0, 0), (0, 1, 0)], 3)
    v = Subspace.span(GF2, [(0, 1, 0), (0, 0, 1)], 3)
    inter = u.intersection(v)
    assert inter == Subspace.span(GF2, [(0, 1, 0)], 3)
    assert u.sum(v) == Subspace.full(GF2, 3)


def test_quotient_with_section():
    u = Subspace.span(GF2, [(1, 1, 0)], 3)
    proj, sec = u.quotient_maps()
    assert proj.rows == 3 and proj.cols == 2
    assert (sec @ proj) == Matrix.identity(GF2, 2)
    # the subspace itself dies in the quotient
    assert (u.basis @ proj).is_zero


def test_ambient_mismatch():
    u = Subspace.zero(GF2, 2)
    v = Subspace.zero(GF2, 3)
    with pytest.raises(ValueError):
        u.sum(v)


# ---------------------------------------------------------------------------
# property tests


def matrices(field, max_dim=4):
    if field.kind == "GF":
        elt = st.integers(min_value=0, max_value=field.p - 1)
    else:
        elt = st.integers(min_value=-4, max_value=4).map(Fraction)
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(elt, min_size=c, max_size=c), min_size=r, max_size=r
            ).map(lambda rows: Matrix.from_rows(field, rows))
        )
    )


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([GF2, GF3, QQ]).flatmap(matrices))
def test_rref_idempotent(m):
    r1, _, _ = m.rref()
    r2, _, _ = r1.rref()
    assert r1 == r2


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([GF2, GF3, QQ]).flatmap(matrices))
def test_rank_nullity(m):
    # rows of m live in k^cols; rank-nullity for v |-> v @ m over k^rows
    assert m.rank() + m.left_kernel().dim == m.rows


def subspace_pairs(field, ambient):
    elt = st.integers(min_value=0, max_value=field.p - 1)
    vec = st.lists(elt, min_size=ambient, max_size=ambient)
    vecs = st.lists(vec, min_size=0, max_size=ambient + 1)
    spc = vecs.map(lambda vs: Subspace.span(field, [tuple(v) for v in vs], ambient))
    return st.tuples(spc, spc)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([GF2, GF3]).flatmap(
        lambda F: st.integers(1, 4).flatmap(lambda n: subspace_pairs(F, n))
    )
)
def test_dimension_formula(pair):
    u, v = pair
    assert u.dim + v.dim == u.sum(v).dim + u.intersection(v).dim


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([GF2, GF3]).flatmap(lambda F: matrices(F, 3)), st.data())
def test_solve_matches_enumeration(a, data):
    """Over small finite fields, solve agrees with brute-force enumeration."""
    F = a.field
    if a.rows > 4 or a.cols > 4:
        return
    target = data.draw(st.lists(st.integers(0, F.p - 1), min_size=a.cols, max_size=a.cols))
    b = Matrix.from_rows(F, [target])
    expected = [
        v
        for v in itertools.product(range(F.p), repeat=a.rows)
        if a.apply_row(v) == tuple(F.of(x) for x in target)
    ]
    got = solve(a, b)
    if got is None:
        assert expected == []
    else:
        part, ker = got
        assert part.row(0) in expected
        assert len(expected) == F.p ** ker.dim
        for v in expected:
            diff = tuple(F.sub(x, y) for x, y in zip(v, part.row(0)))
            assert ker.contains(diff)
