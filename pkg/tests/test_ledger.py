from fractions import Fraction

import numpy as np
import pytest

from pcpforge.hypergraph import canonical_two_coloring
from pcpforge.ledger import ThetaLedger, distribution_triples, micro_instance, random_indicator_tables


@pytest.fixture(scope="module")
def setup():
    test, cons, left, right, sol = micro_instance(seed=0)
    return test, ThetaLedger(test), left, right


def const_tables(test, value):
    return [np.full(d.n_cosets, value, dtype=np.uint8) for d in test.domains]


def test_distribution_sums_to_one(setup):
    test, led, _, _ = setup
    assert sum(p for p, _, _ in distribution_triples(test)) == 1


def test_empty_set(setup):
    test, led, _, _ = setup
    res = led.run(const_tables(test, 0))
    assert res.theta0 == res.theta1 == res.theta2 == 0
    assert res.theta_total == 0 and res.theta_enum == 0


def test_full_set(setup):
    test, led, _, _ = setup
    res = led.run(const_tables(test, 1))
    assert res.theta_total == 1 and res.theta_enum == 1
    assert res.zero_term == 1 and res.theta0 == 1


def test_random_sets_two_paths(setup):
    test, led, _, _ = setup
    rng = np.random.default_rng(1)
    for i in range(3):
        tabs = random_indicator_tables(test, rng, density=0.7)
        res = led.run(tabs, samples=20_000, seed=i)
        assert isinstance(res.theta_total, Fraction)
        assert res.checks["formula_eq_enumeration"]
        assert res.checks["mc_within_4sigma"]
        assert res.theta0 >= res.mean_f0 ** 8
        assert all(res.checks.values())


def test_color_class_has_zero_mass(setup):
    test, led, left, right = setup
    colors = canonical_two_coloring(test, right, left)
    for c in (0, 1):
        tabs = [(colors[test.offsets[v]:test.offsets[v] + d.n_cosets] == c).astype(np.uint8)
                for v, d in enumerate(test.domains)]
        res = led.run(tabs)
        assert res.theta_total == 0 and res.theta_enum == 0
        assert res.theta0 == -res.theta1


def test_rank_threshold(setup):
    test, _, _, _ = setup
    tabs = random_indicator_tables(test, np.random.default_rng(2))
    a, b = ThetaLedger(test, k=1).run(tabs), ThetaLedger(test, k=3).run(tabs)
    # the split changes with k but the total does not
    assert a.theta_total == b.theta_total
    assert b.theta2 == 0
