from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcpforge import f2core
from pcpforge.errors import DimensionError, NotPseudoQuadraticError, NotSymmetricError
from pcpforge.f2core import BitMatrix, BitVec


def M(rows):
    return BitMatrix.from_lists(rows)


def V(bits):
    return BitVec.from_list(bits)


def test_rank_examples():
    assert BitMatrix.zeros(3).rank() == 0
    assert BitMatrix.identity(4).rank() == 4
    assert M([[0, 1], [1, 0]]).rank() == 2


def test_rank_matches_numpy_mod2_elimination():
    # independent oracle: dense elimination over uint8 arrays
    def dense_rank(a):
        a = a.copy() % 2
        r = 0
        for c in range(a.shape[1]):
            piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
            if piv is None:
                continue
            a[[r, piv]] = a[[piv, r]]
            for i in range(a.shape[0]):
                if i != r and a[i, c]:
                    a[i] ^= a[r]
            r += 1
        return r

    rng = np.random.default_rng(0)
    for _ in range(200):
        a = rng.integers(0, 2, size=(rng.integers(1, 12), rng.integers(1, 12)), dtype=np.uint8)
        assert M(a.tolist()).rank() == dense_rank(a)


def test_d1_examples():
    assert f2core.d1(V([1, 0, 1])) == V([0, 1])
    assert f2core.d1(BitMatrix.identity(3)) == BitMatrix.identity(2)
    assert f2core.d1(M([[1, 1], [1, 0]])) == M([[0]])
    with pytest.raises(DimensionError):
        f2core.d1(M([[1, 0, 1], [0, 1, 1]]))


def test_column_space_examples():
    assert f2core.column_space_contains(BitMatrix.identity(2), V([1, 1]))
    assert not f2core.column_space_contains(BitMatrix.zeros(2), V([1, 0]))
    J = M([[1, 1], [1, 1]])
    assert f2core.column_space_contains(J, V([1, 1]))
    assert not f2core.column_space_contains(J, V([1, 0]))


def test_solve_and_nullspace():
    rng = np.random.default_rng(1)
    for _ in range(100):
        r, c = rng.integers(1, 10, size=2)
        A = M(rng.integers(0, 2, size=(r, c)).tolist())
        for z in f2core.nullspace(A):
            assert A.apply(z).is_zero()
        assert len(f2core.nullspace(A)) == c - A.rank()
        x = BitVec(int(c), int(rng.integers(0, 1 << int(c))))
        b = A.apply(x)
        sol = f2core.solve(A, b)
        assert sol is not None and A.apply(sol) == b


def test_decompose_symmetric_examples():
    one = V([1, 1])
    assert f2core.decompose_symmetric(BitMatrix.outer(one, one)) == [one]
    vs = f2core.decompose_symmetric(M([[0, 1], [1, 0]]))
    assert len(vs) == 3
    assert f2core.sum_of_squares(vs, 2) == M([[0, 1], [1, 0]])
    assert {tuple(v.to_list()) for v in vs} == {(1, 0), (0, 1), (1, 1)}
    assert f2core.decompose_symmetric(BitMatrix.zeros(3)) == []


def test_decompose_symmetric_rejects_asymmetric():
    with pytest.raises(NotSymmetricError, match="not symmetric"):
        f2core.decompose_symmetric(M([[1, 1], [0, 1]]))


def test_decompose_pseudoquadratic_examples():
    assert f2core.decompose_pseudoquadratic(M([[1]])) == [V([1])]
    assert f2core.decompose_pseudoquadratic(M([[1, 1], [1, 1]])) == [V([1, 1])]
    assert f2core.decompose_pseudoquadratic(M([[1, 0], [0, 0]])) == [V([1, 0])]
    with pytest.raises(NotPseudoQuadraticError):
        f2core.decompose_pseudoquadratic(M([[0, 1], [1, 0]]))


symmetric = st.integers(1, 24).flatmap(
    lambda n: st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n).map(
        lambda rows: _symmetrize(n, rows)))


def _symmetrize(n, rows):
    out = [0] * n
    for i in range(n):
        for j in range(i, n):
            b = (rows[i] >> j) & 1
            out[i] |= b << j
            out[j] |= b << i
    return BitMatrix(n, n, tuple(out))


@settings(max_examples=150, deadline=None)
@given(symmetric)
def test_symmetric_decomposition_properties(A):
    vs = f2core.decompose_symmetric(A)
    assert f2core.sum_of_squares(vs, A.nrows) == A
    assert len(vs) <= 3 * A.rank() // 2
    assert all(f2core.column_space_contains(A, v) for v in vs)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 20), st.lists(st.integers(0, (1 << 19) - 1), min_size=1, max_size=9))
def test_pseudoquadratic_decomposition_properties(n, raw):
    # odd number of squares of vectors with leading 1 is pseudo-quadratic
    if len(raw) % 2 == 0:
        raw = raw[:-1]
    vs = [BitVec(n, ((x << 1) | 1) & ((1 << n) - 1)) for x in raw]
    A = f2core.sum_of_squares(vs, n)
    assert f2core.is_pseudoquadratic(A)
    out = f2core.decompose_pseudoquadratic(A)
    k = A.rank()
    assert f2core.sum_of_squares(out, n) == A
    assert len(out) % 2 == 1 and 2 * len(out) < 3 * k + 2
    assert all(v[0] == 1 for v in out)
    if n > 1:
        DA = f2core.d1(A)
        assert all(f2core.column_space_contains(DA, f2core.d1(v)) for v in out)


def test_wht_examples():
    assert list(f2core.wht([1, 1])) == [1.0, 0.0]
    assert list(f2core.wht([1, -1])) == [0.0, 1.0]


def test_wht_parseval_and_inverse_against_character_sum():
    rng = np.random.default_rng(2)
    table = rng.normal(size=8)
    coeffs = f2core.wht(table)
    # direct double loop over characters
    direct = [sum(table[x] * (-1) ** bin(a & x).count("1") for x in range(8)) / 8 for a in range(8)]
    assert np.allclose(coeffs, direct)
    assert np.isclose((coeffs ** 2).sum(), (table ** 2).mean())
    assert np.allclose(f2core.iwht(coeffs), table)


def test_wht_exact():
    vals = [Fraction(1), Fraction(-1), Fraction(1, 3), Fraction(0)]
    c = f2core.wht(vals, exact=True)
    assert all(isinstance(x, Fraction) for x in c)
    assert list(f2core.iwht(c, exact=True)) == vals
    with pytest.raises(DimensionError):
        f2core.wht([1, 2, 3])
