import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcpforge import f2core
from pcpforge.errors import DimensionError, ParseError, PreconditionError
from pcpforge.f2core import BitMatrix, BitVec
from pcpforge.quadsys import (QuadEquation, QuadraticSystem, brute_force_solutions, decode_low_rank,
                              eval_many, linearize, odd_covers, parse_system, satisfies_superposition)

Q = QuadEquation.from_terms


def V(bits):
    return BitVec.from_list(bits)


def test_eval_examples():
    tsa_form = Q(5, 1, [0, 1, 2], [(3, 4)])
    assert tsa_form.eval(BitVec.zero(5)) == 1
    assert Q(2, 0, [], [(0, 1)]).eval(V([1, 1])) == 1
    assert Q(3, 1, [0], [(1, 2)]).eval(V([1, 1, 1])) == 1


def test_square_folds_to_linear():
    assert Q(2, 0, [], [(1, 1)]) == Q(2, 0, [1])
    with pytest.raises(DimensionError):
        QuadEquation(2, 0, BitVec.zero(2), BitMatrix.from_lists([[1, 0], [0, 0]]))


def test_superposition_examples():
    q = Q(2, 0, [], [(0, 1)])
    assert satisfies_superposition(q, [V([1, 1]), V([1, 1])])
    assert satisfies_superposition(Q(3, 0, [0], [(1, 2)]), [BitVec.zero(3)] * 4)
    # t = 0 reduces to c = 0
    assert satisfies_superposition(Q(2, 0, [0]), [])
    assert not satisfies_superposition(Q(2, 1, [0]), [])


def test_odd_covers_examples():
    q = Q(2, 0, [], [(0, 1)])
    assert odd_covers(q, [V([0, 1])])
    three = [V([1, 1]), V([0, 0]), V([1, 0])]
    assert not odd_covers(q, three)
    assert not satisfies_superposition(q, three)
    assert odd_covers(q, [V([0, 0]), V([1, 0]), V([0, 1])])


def test_even_t_counterexample():
    q = Q(1, 0, [0])
    pair = [V([1]), V([0])]
    assert odd_covers(q, pair)
    assert not satisfies_superposition(q, pair)


@st.composite
def equation_and_assignments(draw):
    m = draw(st.integers(1, 7))
    c = draw(st.integers(0, 1))
    lin = draw(st.lists(st.integers(0, m - 1), max_size=m))
    quad = draw(st.lists(st.tuples(st.integers(0, m - 1), st.integers(0, m - 1)), max_size=8))
    t = draw(st.sampled_from([1, 3, 5, 7, 9]))
    a = draw(st.lists(st.integers(0, (1 << m) - 1), min_size=t, max_size=t))
    return Q(m, c, lin, quad), [BitVec(m, x) for x in a]


@settings(max_examples=400, deadline=None)
@given(equation_and_assignments())
def test_odd_t_equivalence(case):
    q, assignments = case
    assert odd_covers(q, assignments) == satisfies_superposition(q, assignments)


def test_linearize_examples():
    C = linearize(Q(2, 0, [], [(0, 1)]))
    assert [(i, j) for i in range(3) for j in range(3) if C.entry(i, j)] == [(1, 2)]
    C = linearize(Q(2, 1))
    assert [(i, j) for i in range(3) for j in range(3) if C.entry(i, j)] == [(0, 0)]


def test_linearize_dual_evaluation():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        m = int(rng.integers(1, 9))
        q = Q(m, int(rng.integers(0, 2)), rng.integers(0, m, 3).tolist(),
              [tuple(p) for p in rng.integers(0, m, (4, 2)).tolist()])
        a = BitVec(m, int(rng.integers(0, 1 << m)))
        ah = f2core.prepend_one(a)
        assert linearize(q).dot(BitMatrix.outer(ah, ah)) == q.eval(a)


def test_eval_many_matches_eval():
    rng = np.random.default_rng(1)
    q = Q(6, 1, [0, 3], [(0, 1), (2, 5), (4, 5)])
    pts = rng.integers(0, 64, 200).astype(np.uint64)
    assert eval_many(q, pts).tolist() == [q.eval(BitVec(6, int(x))) for x in pts]


def test_decode_low_rank_examples():
    sysm = QuadraticSystem(3, [Q(3, 0, [0], [(1, 2)]), Q(3, 1, [2], [(0, 1)])])
    sols = brute_force_solutions(sysm)
    assert sols
    a = sols[0]
    ah = f2core.prepend_one(a)
    assert decode_low_rank(BitMatrix.outer(ah, ah), sysm) == [a]
    # empty system: any pseudo-quadratic matrix decodes
    out = decode_low_rank(BitMatrix.outer(ah, ah), [])
    assert out == [a]


def test_decode_low_rank_three_summands():
    rng = np.random.default_rng(2)
    done = 0
    while done < 50:
        m = 5
        pts = [BitVec(m, int(x)) for x in rng.integers(0, 32, 3)]
        hats = [f2core.prepend_one(p) for p in pts]
        A = f2core.sum_of_squares(hats, m + 1)
        # equations satisfied by all three assignments individually
        eqs = []
        for _ in range(200):
            q = Q(m, int(rng.integers(0, 2)), rng.integers(0, m, 2).tolist(),
                  [tuple(p) for p in rng.integers(0, m, (2, 2)).tolist()])
            if all(q.satisfied_by(p) for p in pts):
                eqs.append(q)
        if not eqs:
            continue
        dec = decode_low_rank(A, eqs)
        assert len(dec) % 2 == 1
        assert all(satisfies_superposition(q, dec) for q in eqs)
        done += 1
    bad = Q(5, 1)
    with pytest.raises(PreconditionError):
        decode_low_rank(A, [bad])


def test_text_round_trip():
    sysm = QuadraticSystem(4, [Q(4, 1, [0, 2], [(0, 1)]), Q(4, 0, [3], [(1, 2), (2, 3)])])
    back = parse_system(sysm.to_text())
    assert back.m == 4 and list(back.equations) == list(sysm.equations)
    with pytest.raises(ParseError):
        parse_system("p quad 2 1\n1 | 1:1 | 1,5:1\n")
