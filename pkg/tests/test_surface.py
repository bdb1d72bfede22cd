import numpy as np
import pytest

from pcpforge.errors import PreconditionError
from pcpforge.f2core import BitVec
from pcpforge.gf import GF, MPoly, random_mpoly
from pcpforge.quadsys import QuadEquation, QuadraticSystem, brute_force_solutions
from pcpforge.surface import (FqQuadEquation, RuledSurface, build_surface_label_cover, compose_eval, fq_equation_to_f2,
                              global_extension, interpolate_curve, lift_f2_system_to_gfq, restrict_to_surface,
                              smoothness_estimate, variable_point)

Q = QuadEquation.from_terms


def small_system():
    # constants chosen so that a = (1, 0, 1, 1) satisfies every equation
    eqs = [Q(4, 0, [0, 2], [(0, 1)]), Q(4, 1, [3], [(1, 2)]), Q(4, 0, [1], [(2, 3)])]
    eqs = [Q(4, q.eval(BitVec.from_list([1, 0, 1, 1])) ^ q.c, q.linear_terms(), q.quad_terms()) for q in eqs]
    sysm = QuadraticSystem(4, eqs)
    assert sysm.satisfied_by(BitVec.from_list([1, 0, 1, 1]))
    return sysm


def test_two_point_line():
    gf = GF(2)
    p0, p1 = np.array([1, 2]), np.array([3, 1])
    c = interpolate_curve(gf, [p0, p1], [0, 1])
    for t in range(4):
        want = gf.mul_arr(p0, 1 ^ t) ^ gf.mul_arr(p1, t)
        assert np.array_equal(c.eval(t), want)


def test_constant_curve():
    gf = GF(3)
    c = interpolate_curve(gf, [[5, 6]] * 4, [0, 1, 2, 3])
    assert not c.coeffs[:, 1:].any()
    assert c.eval(7).tolist() == [5, 6]


def test_curve_round_trip():
    gf = GF(4)
    rng = np.random.default_rng(0)
    pts = rng.integers(0, 16, (6, 3))
    ts = [0, 3, 5, 6, 9, 14]
    c = interpolate_curve(gf, pts, ts)
    assert np.array_equal(c.eval_arr(ts), pts)
    with pytest.raises(PreconditionError):
        interpolate_curve(GF(1), np.zeros((3, 1)), [0, 1, 0])


def test_surface_degenerate_cases():
    gf = GF(3)
    rng = np.random.default_rng(1)
    omega = interpolate_curve(gf, rng.integers(0, 8, (3, 2)), [0, 1, 2])
    R = RuledSurface(omega, rng.integers(1, 8, 2))
    ts = np.arange(8)
    assert np.array_equal(R.eval_arr(ts, np.zeros(8, dtype=np.int64)), omega.eval_arr(ts))
    flat = RuledSurface(omega, np.zeros(2, dtype=np.int64))
    assert np.array_equal(flat.eval_arr(ts, np.full(8, 5)), omega.eval_arr(ts))
    # componentwise evaluation
    t, s = 4, 6
    want = [int(omega.eval(t)[j]) ^ gf.mul(s, int(R.y[j])) for j in range(2)]
    assert R.eval(t, s).tolist() == want


def test_restriction_examples():
    gf = GF(3)
    rng = np.random.default_rng(2)
    omega = interpolate_curve(gf, rng.integers(0, 8, (3, 2)), [0, 1, 2])
    R = RuledSurface(omega, rng.integers(0, 8, 2))
    T, S = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
    lab = restrict_to_surface(MPoly.variable(gf, 2, 0), R, 2)
    want = omega.eval_arr(T.ravel())[:, 0] ^ gf.mul_arr(S.ravel(), int(R.y[0]))
    assert np.array_equal(lab.eval(T.ravel(), S.ravel()), want)
    const = restrict_to_surface(MPoly.constant(gf, 2, 3), R, 2)
    assert set(const.eval(T.ravel(), S.ravel()).tolist()) == {3}


def test_restriction_matches_composition():
    gf = GF(4)
    rng = np.random.default_rng(3)
    for _ in range(5):
        m, d, l = 3, 2, 4
        omega = interpolate_curve(gf, rng.integers(0, 16, (l + 1, m)), list(range(l + 1)))
        R = RuledSurface(omega, rng.integers(0, 16, m))
        g = random_mpoly(gf, m, d, rng)
        lab = restrict_to_surface(g, R, d)
        assert lab.grid.shape == (l * d + 1, d + 1)
        assert lab.total_degree() <= l * d
        t, s = rng.integers(0, 16, 200), rng.integers(0, 16, 200)
        assert np.array_equal(lab.eval(t, s), compose_eval(g, R, t, s))


def test_global_extension_interpolates():
    gf = GF(3)
    sigma = [1, 0, 1, 1]
    g = global_extension(gf, sigma, 2, 2)
    assert g.total_degree() <= 2
    for i, s in enumerate(sigma):
        assert g.eval(variable_point(i, 2, 2)) == s
    with pytest.raises(PreconditionError):
        variable_point(4, 2, 2)


def test_lift():
    sysm = small_system()
    lifted = lift_f2_system_to_gfq(sysm, 3)
    assert len(lifted) == len(sysm.equations) and lifted.n == sysm.m
    for q, f in zip(sysm.equations, lifted.equations):
        assert f.variables() == q.variables()
    for a in range(16):
        x = BitVec(4, a).to_list()
        for q, f in zip(sysm.equations, lifted.equations):
            assert f.eval(x) == q.eval(BitVec(4, a))
    for sol in brute_force_solutions(sysm):
        assert lifted.satisfied_by(sol.to_list())


@pytest.fixture(scope="module")
def slc():
    return build_surface_label_cover(lift_f2_system_to_gfq(small_system(), 3), m=2, h=2, d=2, surfaces=2, seed=0)


def test_surface_lc_shape(slc):
    q = slc.gf.q
    assert slc.n_right == 6 and slc.n_edges == 6 * q * q
    assert slc.regime_report()["asymptotic_regime"] is False
    # curves pass through the constraint points at t_i*
    for v, R in enumerate(slc.surfaces):
        for slot, var in enumerate(slc.slot_vars[v]):
            if var >= 0:
                assert tuple(R.omega.eval(slc.t_star[slot + 1]).tolist()) == variable_point(var, 2, 2)


def test_surface_lc_completeness(slc):
    sol = brute_force_solutions(small_system())[0]
    labels, pv, g = slc.completeness_labeling(sol.to_list())
    ok, valid = slc.check_labeling(labels, pv)
    assert ok.all() and valid.all()
    # a wrong point value breaks the incident edges
    bad = pv.copy()
    bad[0] ^= 1
    ok2, _ = slc.check_labeling(labels, bad)
    assert not ok2[slc.edge_u == 0].any()


def test_surface_lc_is_seeded(slc):
    again = build_surface_label_cover(lift_f2_system_to_gfq(small_system(), 3), m=2, h=2, d=2, surfaces=2, seed=0)
    assert np.array_equal(again.points, slc.points) and np.array_equal(again.edge_u, slc.edge_u)


def test_smoothness_estimate(slc):
    rep = smoothness_estimate(slc, 10_000, np.random.default_rng(4))
    assert rep["ok"] and rep["zero_rate"] <= rep["bound"] + 3 * rep["sigma"]


def test_fq_equation_to_f2():
    gf = GF(3)
    eq = FqQuadEquation(gf, 2, 5, ((0, 3),), (((0, 1), 6),))
    # variable i is carried by bits 3i..3i+2 of a 6-bit vector
    forms = {i: [BitVec(6, 1 << (3 * i + p)) for p in range(3)] for i in range(2)}
    f2 = fq_equation_to_f2(eq, forms, 6)
    assert len(f2) == 3
    for x0 in range(8):
        for x1 in range(8):
            val = eq.eval([x0, x1])
            a = BitVec(6, x0 | (x1 << 3))
            assert [q.eval(a) for q in f2] == gf.bits(val)
