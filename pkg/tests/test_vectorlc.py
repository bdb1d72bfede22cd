import numpy as np
import pytest

from pcpforge import f2core
from pcpforge.errors import PreconditionError
from pcpforge.f2core import BitMatrix, BitVec
from pcpforge.quadsys import QuadEquation, QuadraticSystem, decode_low_rank, satisfies_superposition
from pcpforge.surface import build_surface_label_cover, lift_f2_system_to_gfq
from pcpforge.vectorlc import (RepeatedVectorLC, corner_extend, equation_variable_labels, equation_variable_lc,
                               label_matrix, matrixize, surface_label_bits, vector_smoothness,
                               vectorize_and_repeat, vectorize_surface_lc)

Q = QuadEquation.from_terms
SOL = [1, 0, 1, 1]


def planted_system():
    eqs = [Q(4, 0, [0, 2], [(0, 1)]), Q(4, 0, [3], [(1, 2)]), Q(4, 0, [1], [(2, 3)])]
    a = BitVec.from_list(SOL)
    return QuadraticSystem(4, [Q(4, q.eval(a), q.linear_terms(), q.quad_terms()) for q in eqs])


@pytest.fixture(scope="module")
def surface_case():
    slc = build_surface_label_cover(lift_f2_system_to_gfq(planted_system(), 3), m=2, h=2, d=2, surfaces=1, seed=1)
    labels, pv, _ = slc.completeness_labeling(SOL)
    vlc = vectorize_surface_lc(slc)
    left = [int(x) for x in pv]
    right = [surface_label_bits(L, slc.gf.e) for L in labels]
    return slc, vlc, left, right


def test_vectorized_completeness(surface_case):
    slc, vlc, left, right = surface_case
    assert vlc.m_l == 3 and vlc.m_r == 3 * (slc.dstar + 1) * (slc.d + 1)
    n, ok, valid = vlc.check_labeling(left, right)
    assert n == ok == slc.n_edges and valid


def test_vectorized_edges_agree_with_field_evaluation(surface_case):
    slc, vlc, left, right = surface_case
    labels, _, _ = slc.completeness_labeling(SOL)
    rng = np.random.default_rng(0)
    for i in rng.integers(0, vlc.n_edges, 50):
        u, v, A = vlc.edge(int(i))
        val = int(labels[v].eval(slc.edge_t[i], slc.edge_s[i]))
        assert A.apply(BitVec(vlc.m_r, right[v])).bits == val


def test_repetition(surface_case):
    slc, vlc, left, right = surface_case
    assert vectorize_and_repeat(slc, 1).m_r == vlc.m_r
    rep = RepeatedVectorLC(vlc, 2)
    L, R = rep.repeat_labels(left, right)
    rng = np.random.default_rng(1)
    edges = rng.integers(0, rep.n_edges, 200).tolist()
    n, ok, _ = rep.check_labeling(L, R, edges=edges)
    assert n == ok == 200
    assert all(rep.right_ok(v, R[v]) for v in rng.integers(0, rep.n_right, 10))
    with pytest.raises(PreconditionError):
        RepeatedVectorLC(vlc, 0)


def test_repeated_smoothness_spot_check(surface_case):
    slc, vlc, left, right = surface_case
    rep = RepeatedVectorLC(vlc, 2)
    rng = np.random.default_rng(2)
    y = int.from_bytes(rng.bytes(16), "little") % (1 << vlc.m_r) or 1
    single = vector_smoothness(vlc, 0, y, 3000, rng)
    # nonzero in the first block only: a repeated edge kills it iff its first coordinate does
    double = vector_smoothness(rep, 0, y, 3000, rng)
    sigma = np.sqrt(max(single * (1 - single), 1e-4) / 3000)
    assert double <= single + 4 * sigma


def test_equation_variable_lc():
    cons = [([0, 2, 3], Q(3, 1, [0], [(1, 2)])), ([1, 2], Q(2, 0, [], [(0, 1)]))]
    vlc = equation_variable_lc(cons, 4)
    assert vlc.n_edges == 5 and vlc.m_l == 1 and vlc.m_r == 5
    assign = [1, 1, 0, 1]
    left, right = equation_variable_labels(vlc, cons, assign)
    n, ok, valid = vlc.check_labeling(left, right)
    assert n == ok and valid
    # padded slots are forced to zero
    assert not vlc.right_ok(1, right[1] | 0b10000)
    with pytest.raises(PreconditionError):
        equation_variable_lc([([0, 0], Q(2, 0, [0]))], 2)


def test_matrix_lc_completeness(surface_case):
    slc, vlc, left, right = surface_case
    mlc = matrixize(vlc)
    L, R = mlc.complete_labeling(left, right)
    for M in R:
        assert M.rank() == 1 and M.entry(0, 0) == 1
    assert all(mlc.satisfies_gamma(v, R[v]) for v in range(mlc.n_right))
    rng = np.random.default_rng(3)
    for i in rng.integers(0, mlc.n_edges, 100):
        u, v, A = mlc.edge(int(i))
        assert mlc.edge_ok(int(i), L[u], R[v])
        assert (A @ R[v] @ A.T).rank() <= 1


def test_corner_extend_and_label_matrix():
    A = BitMatrix.from_lists([[1, 0, 1], [0, 1, 1]])
    E = corner_extend(A)
    assert E.to_lists() == [[1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1]]
    for y in range(8):
        Y, X = label_matrix(y, 3), label_matrix(A.apply(BitVec(3, y)).bits, 2)
        assert E @ Y @ E.T == X


def test_gamma_primal_and_decode():
    cons = [([0, 1, 2], Q(3, 1, [0], [(1, 2)]))]
    vlc = equation_variable_lc(cons, 3)
    mlc = matrixize(vlc)
    basis = mlc.primal_basis(0)
    for b in basis:
        assert mlc.satisfies_gamma(0, BitMatrix.from_flat(6, b))
    good = [y for y in range(1 << 5) if vlc.right_ok(0, y)]
    rng = np.random.default_rng(4)
    for _ in range(30):
        picks = rng.choice(good, 3)
        M = f2core.sum_of_squares([BitVec(6, 1 | (int(y) << 1)) for y in picks], 6)
        assert mlc.satisfies_gamma(0, M)
        dec = decode_low_rank(M, vlc.equations(0))
        assert len(dec) % 2 == 1
        assert all(satisfies_superposition(q, dec) for q in vlc.equations(0))
