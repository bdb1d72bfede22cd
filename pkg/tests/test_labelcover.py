from fractions import Fraction
from itertools import product

import pytest

from pcpforge.cnf import all_clauses_formula, parse_dimacs
from pcpforge.errors import InfeasibleError, ParseError
from pcpforge.labelcover import (build_label_cover, contradiction_formula, game_from_tables, lc_value, parallel_repeat,
                                 perfect_labeling, triangle_game, twisted_square_game)

PHI = "p cnf 4 3\n1 2 3 0\n-1 2 4 0\n-2 -3 -4 0\n"


def test_parse_dimacs_examples():
    phi = parse_dimacs("p cnf 3 1\n1 2 3 0\n")
    assert phi.n == 3 and phi.clauses == ((1, 2, 3),)
    assert parse_dimacs("p cnf 2 1\n1 -2 0\n").clauses == ((1, -2, -2),)
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 4 1\n1 2 3 4 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("1 2 3 0\n")
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n")
    assert parse_dimacs(parse_dimacs(PHI).to_dimacs()) == parse_dimacs(PHI)


def test_satisfying_assignments_brute_force():
    phi = parse_dimacs(PHI)
    expect = [a for a in range(16)
              if all(any(((a >> (abs(l) - 1)) & 1) == (l > 0) for l in cl) for cl in phi.clauses)]
    assert phi.satisfying_assignments() == expect
    assert not all_clauses_formula(3).is_satisfiable()


def test_single_clause_counts():
    lc = build_label_cover(parse_dimacs("p cnf 3 1\n1 2 3 0\n"), 1)
    assert (lc.n_right, lc.n_left, lc.n_edges) == (1, 3, 3)
    assert lc.left_labels == 2 and lc.right_labels == 8


def test_perfect_labeling_value_one():
    phi = parse_dimacs(PHI)
    for r in (1, 2):
        lc = build_label_cover(phi, r)
        for a in phi.satisfying_assignments()[:3]:
            left, right = perfect_labeling(phi, lc, a)
            assert lc.labeling_value(left, right) == 1


def test_r2_structure():
    phi = parse_dimacs(PHI)
    lc1, lc2 = build_label_cover(phi, 1), build_label_cover(phi, 2)
    assert lc2.n_right == lc1.n_right ** 2
    assert lc2.right_bits == 6
    # each edge projection restricts coordinates: left bit i comes from one right bit
    for e in range(lc2.n_edges):
        for b in range(lc2.right_labels):
            want = sum(((b >> int(lc2.coord[e, i])) & 1) << i for i in range(lc2.left_bits))
            assert lc2.proj[e, b] == want


def test_lc_value_examples():
    assert lc_value(build_label_cover(parse_dimacs(PHI), 1)) == 1
    unsat = build_label_cover(all_clauses_formula(3), 1)
    v = lc_value(unsat)
    assert v < 1
    # frozen: 8 clauses on 3 variables, best labeling found by enumeration
    assert v == brute_value(unsat)


def brute_value(lc):
    best = 0
    for left in product(range(lc.left_labels), repeat=lc.n_left):
        tot = 0
        for v in range(lc.n_right):
            es = lc.edges_of_right(v)
            good = 0
            for b in range(lc.right_labels):
                if lc.right_ok[v, b]:
                    good = max(good, sum(int(lc.proj[e, b] == left[lc.edge_u[e]]) for e in es))
            tot += good
        best = max(best, tot)
    return Fraction(best, lc.n_edges)


def test_single_vertex_game():
    g = game_from_tables(2, 1, 2, 2, [(0, 0, [0, 1]), (1, 0, [1, 0])])
    assert lc_value(g) == 1
    g = game_from_tables(1, 1, 2, 2, [(0, 0, [0, 1]), (0, 0, [1, 0])])
    assert lc_value(g) == Fraction(1, 2)


def test_parallel_repeat():
    g = twisted_square_game()
    assert parallel_repeat(g, 1) is g
    assert lc_value(g) == Fraction(3, 4)
    g2 = parallel_repeat(g, 2)
    assert (g2.n_left, g2.n_right, g2.n_edges) == (4, 4, 16)
    assert lc_value(g2) <= lc_value(g)
    assert lc_value(triangle_game()) == Fraction(5, 6)
    perfect = build_label_cover(parse_dimacs("p cnf 3 1\n1 2 3 0\n"), 1)
    assert lc_value(parallel_repeat(perfect, 2)) == 1
    c = build_label_cover(contradiction_formula(), 1)
    assert lc_value(c) == Fraction(1, 2)
    assert lc_value(parallel_repeat(c, 2)) == Fraction(1, 4)


def test_value_budget():
    with pytest.raises(InfeasibleError):
        lc_value(build_label_cover(parse_dimacs(PHI), 2), budget=10)
