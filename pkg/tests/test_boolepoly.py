from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcpforge import boolepoly as bp
from pcpforge.errors import FoldingError, PreconditionError

P = bp.BooleanPoly


def test_evaluation_order():
    # point index bit j-1 is x_j: order 00, 10, 01, 11
    assert P.var(2, 0).table() == [0, 1, 0, 1]
    assert P.one(2).table() == [1, 1, 1, 1]
    assert (P.var(2, 0) * P.var(2, 1)).table() == [0, 0, 0, 1]


def test_dot_examples():
    assert bp.dot(P.one(1), P.one(1)) == 0
    assert bp.dot(P.var(1, 0), P.var(1, 0)) == 1
    assert bp.dot(P.var(2, 0), P.var(2, 1)) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, (1 << (1 << m)) - 1))))
def test_zeta_mobius_round_trip(mc):
    m, c = mc
    f = P.from_coeffs(m, c)
    assert P.from_evals(m, f.evals).coeffs == c
    # evaluation by direct monomial sum
    for x in range(1 << m):
        v = 0
        for S in f.monomials():
            v ^= int(S & x == S)
        assert f(x) == v


def test_dual_space_examples():
    # P(1,0)^perp = P(1,0): <1, 1> = 0 over the two points
    assert bp.brute_force_dual(bp.poly_space(1, 0)) == {0, 0b11}
    sp, du = bp.poly_space(3, 1), bp.dual_space(3, 1)
    assert sp.dim + du.dim == 8
    assert all(bp.dot(a, b) == 0 for a in sp.basis_polys() for b in du.basis_polys())
    assert bp.dual_space(2, 2).dim == 0


def bp_span(space):
    out = {0}
    for b in space.basis_evals:
        out |= {x ^ b for x in out}
    return out


@pytest.mark.parametrize("m", range(1, 5))
def test_dual_space_exhaustive(m):
    for d in range(m):
        assert bp.brute_force_dual(bp.poly_space(m, d)) == bp_span(bp.dual_space(m, d))


def test_coset_min_weight_examples():
    w, rep = bp.coset_min_weight(P.zero(3), 1)
    assert w == 0 and rep.beta.is_zero()
    w, rep = bp.coset_min_weight(P.delta(2, 0), 1)
    assert w == 1 and rep.beta == P.delta(2, 0)
    f = P.var(3, 0) * P.var(3, 1) + P.one(3)
    assert bp.coset_min_weight(f, 2)[0] == 0


def test_coset_min_weight_against_enumeration():
    # m=2, dual_d=1: brute force all 8 coset members
    sub = bp_span(bp.poly_space(2, 1))
    rng = np.random.default_rng(3)
    for _ in range(20):
        beta = P.from_evals(2, int(rng.integers(0, 16)))
        best = min((beta.evals ^ s).bit_count() for s in sub)
        assert bp.coset_min_weight(beta, 1)[0] == best


def test_chi_examples():
    f = P.var(3, 0) + P.var(3, 2)
    assert bp.chi(P.zero(3), f) == 1
    for a in range(8):
        assert bp.chi(P.delta(3, a), f) == (-1) ** f(a)
    assert bp.chi(P.delta(1, 1), P.var(1, 0)) == -1


def test_pi2_project_examples():
    assert bp.pi2_project(P.zero(2), [0]).is_zero()
    assert bp.pi2_project(P.delta(2, 0), [0]) == P.delta(1, 0)
    assert bp.pi2_project(P.one(3), [0, 2]).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 255), st.integers(0, 15))
def test_projection_adjoint(beta_evals, f_evals):
    # <pi2(beta), f> = <beta, f o pi> for S = {1, 3} inside m = 3 -> n = 2
    beta = P.from_evals(3, beta_evals)
    f = P.from_evals(2, f_evals)
    S = [0, 2]
    assert bp.dot(bp.pi2_project(beta, S), f) == bp.dot(beta, bp.compose_projection(f, 3, S))


def test_fourier_expand_examples():
    sp = bp.poly_space(1, 1)
    ft = bp.fourier_expand(sp, [1, 1, 1, 1])
    assert list(ft.coefficients) == [1, 0, 0, 0]
    ft = bp.fourier_expand(sp, [1, -1, -1, 1])
    assert list(ft.coefficients) == [0, 0, 0, 1]
    # syndrome 3 is the coset of delta_1: <delta_1, 1> = <delta_1, x> = 1
    assert sp.syndrome(P.delta(1, 1)) == 3


def test_fourier_of_character_is_point_mass():
    sp = bp.poly_space(3, 1)
    beta = P.delta(3, 5)
    vals = [bp.chi(beta, sp.from_vector(c)) for c in range(sp.size)]
    ft = bp.fourier_expand(sp, vals, exact=True)
    assert ft.coefficients[sp.syndrome(beta)] == 1
    assert sum(abs(c) for c in ft.coefficients) == 1


def test_fold_constant_examples():
    sp = bp.poly_space(1, 1)
    ft = bp.fold_constant(sp, {0: 1, 2: -1})
    assert list(ft.values) == [1, -1, -1, 1]
    rng = np.random.default_rng(5)
    sp = bp.poly_space(2, 1)
    fold = bp.Folding(sp, ())
    for _ in range(10):
        ft = bp.fold_constant(sp, [Fraction(int(x)) for x in rng.choice([-1, 1], fold.n_cells)], exact=True)
        assert ft.coefficients[0] == 0
        for s in ft.support():
            # the representative has odd weight: the constant coordinate of its syndrome is set
            assert s & 1
            assert ft.rep(s).weight % 2 == 1


def test_fold_over_ideal():
    sp = bp.poly_space(3, 3)
    assert bp.ideal_generators(sp, []) == []
    q = P.var(3, 0)
    rng = np.random.default_rng(6)
    fold = bp.Folding(sp, bp.ideal_generators(sp, [q]), over_constant=False)
    vals = rng.normal(size=fold.n_cells)
    ft = bp.fold_over_ideal(sp, [q], vals)
    # every supported character annihilates J = q * P(3, 0)
    for s in ft.support(tol=1e-9):
        for g in bp.ideal_generators(sp, [q]):
            assert bin(s & g).count("1") % 2 == 0
    with pytest.raises(FoldingError):
        bp.Folding(sp, bp.ideal_generators(sp, [P.one(3)]), over_constant=True)
    with pytest.raises(PreconditionError):
        bp.fold_over_ideal(bp.poly_space(3, 2), [q], [1])


def test_b_codim_examples():
    assert bp.b_codim(P.zero(2), 1, 1) == 0
    assert bp.b_codim(P.delta(2, 0), 1, 1) == 1
    assert bp.b_codim(P.one(2), 1, 1) == 0


def test_bias_identities_small():
    beta = P.delta(5, 0)
    rng = np.random.default_rng(7)
    half = bp.poly_space(5, 2)
    for t in range(3):
        A = [rng.integers(0, 2, half.size) for _ in range(t)]
        rep = bp.verify_bias_identities(5, 4, beta, t, A, samples=20_000, rng=rng)
        assert rep.W_ok and rep.H_ok
        assert abs(rep.estimate - rep.exact) <= 4 * rep.sigma + 1e-12
        assert abs(rep.exact) <= rep.spectral_bound + 1e-12
    zero = bp.verify_bias_identities(5, 4, P.zero(5), 0, [], samples=1000, rng=rng)
    assert zero.w == 0 and zero.estimate == 1.0


def test_sign_matrix_H_t1():
    assert bp.sign_matrix_H(1).tolist() == [[1, 1], [1, -1]]
    H = bp.sign_matrix_H(3)
    assert (H @ H.T == 8 * np.eye(8)).all()


def test_ldlc_table_matches_evaluation():
    sp = bp.poly_space(3, 2)
    for point in range(8):
        tab = bp.ldlc_table(sp, point)
        for c in range(sp.size):
            assert tab[c] == sp.from_vector(c)(point)


def test_monomial_count_frozen():
    # frozen: binomial sums checked against itertools enumeration
    for m, d in product(range(1, 7), range(0, 4)):
        assert bp.monomial_count(m, d) == sum(1 for S in range(1 << m) if bin(S).count("1") <= d)
    assert bp.poly_space(3, 2).dim == 7
    assert bp.poly_space(3, 1).dim == 4
