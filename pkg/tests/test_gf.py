import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcpforge.errors import PreconditionError
from pcpforge.gf import (GF, MPoly, REDUCTION_POLYS, bpoly_eval, bpoly_mul, lagrange_basis, random_mpoly,
                         upoly_eval, upoly_mul)


def poly_mulmod(a, b, poly):
    # oracle: full carry-less product, then long division by the reduction polynomial
    prod = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            prod ^= a << i
    deg = poly.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= poly << (prod.bit_length() - 1 - deg)
    return prod


def test_gf4_example():
    gf = GF(2)
    assert gf.mul(2, 2) == 3


def test_frozen_values():
    # frozen from the long-division oracle above
    assert GF(4).inv(2) == 9
    assert GF(8).pow(2, 8) == 0x1D
    assert GF(3).mul(5, 6) == 3


@pytest.mark.parametrize("e", range(1, 9))
def test_field_axioms_exhaustive(e):
    gf = GF(e)
    a = np.arange(gf.q)
    assert not (a ^ a).any()
    for x in range(1, gf.q):
        assert gf.mul(x, gf.inv(x)) == 1
    table = gf.mul_arr(a[:, None], a[None, :])
    if e <= 5:
        for x in range(gf.q):
            for y in range(gf.q):
                assert table[x, y] == poly_mulmod(x, y, gf.poly)


def test_reduction_polys_irreducible():
    for e, poly in REDUCTION_POLYS.items():
        assert poly.bit_length() - 1 == e
        gf = GF(e)
        # the generator has full multiplicative order
        assert len(set(gf.exp[: gf.q - 1].tolist())) == gf.q - 1


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 16), st.integers(0, (1 << 16) - 1), st.integers(0, (1 << 16) - 1), st.integers(0, (1 << 16) - 1))
def test_mul_properties(e, a, b, c):
    gf = GF(e)
    a, b, c = a % gf.q, b % gf.q, c % gf.q
    assert gf.mul(a, b) == poly_mulmod(a, b, gf.poly)
    assert gf.mul(a, b ^ c) == gf.mul(a, b) ^ gf.mul(a, c)
    assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        GF(3).inv(0)
    with pytest.raises(PreconditionError):
        GF(17)


def test_mul_matrix():
    gf = GF(4)
    for c in range(gf.q):
        rows = gf.mul_matrix(c)
        for x in range(gf.q):
            img = sum((bin(rows[k] & x).count("1") & 1) << k for k in range(gf.e))
            assert img == gf.mul(c, x)


def test_lagrange_basis():
    gf = GF(3)
    nodes = [1, 4, 6, 7]
    basis = lagrange_basis(gf, nodes)
    for i, L in enumerate(basis):
        for j, t in enumerate(nodes):
            assert upoly_eval(gf, L, t) == int(i == j)
    with pytest.raises(PreconditionError):
        lagrange_basis(gf, [1, 1])


def test_upoly_mul_evaluates_pointwise():
    gf = GF(4)
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 16, 4).tolist(), rng.integers(0, 16, 3).tolist()
    ab = upoly_mul(gf, a, b)
    for t in range(16):
        assert upoly_eval(gf, ab, t) == gf.mul(upoly_eval(gf, a, t), upoly_eval(gf, b, t))


def test_bpoly_mul_evaluates_pointwise():
    gf = GF(3)
    rng = np.random.default_rng(1)
    A, B = rng.integers(0, 8, (3, 2)), rng.integers(0, 8, (2, 3))
    C = bpoly_mul(gf, A, B)
    t, s = np.meshgrid(np.arange(8), np.arange(8))
    assert np.array_equal(bpoly_eval(gf, C, t, s), gf.mul_arr(bpoly_eval(gf, A, t, s), bpoly_eval(gf, B, t, s)))


def test_mpoly_ring_and_evaluation():
    gf = GF(3)
    rng = np.random.default_rng(2)
    f, g = random_mpoly(gf, 3, 2, rng), random_mpoly(gf, 3, 2, rng)
    assert (f * g).total_degree() <= 4
    pts = rng.integers(0, 8, (50, 3))
    assert np.array_equal((f * g).eval_arr(pts), gf.mul_arr(f.eval_arr(pts), g.eval_arr(pts)))
    assert np.array_equal((f + g).eval_arr(pts), f.eval_arr(pts) ^ g.eval_arr(pts))
    x1 = MPoly.variable(gf, 3, 0)
    assert [x1.eval(p) for p in pts.tolist()] == pts[:, 0].tolist()
    assert MPoly.constant(gf, 3, 5).eval([1, 2, 3]) == 5
