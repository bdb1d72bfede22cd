"""Label-Cover games with finite label sets.

Labels are integers.  For games built from a CNF formula, a right label
packs 3r bits (bit 3i+j is the value of the j-th literal slot of the i-th
clause) and a left label packs r bits (bit i is the value of the i-th
variable of the tuple).  Every edge carries its projection as a lookup table
from right labels to left labels, and every right vertex carries a boolean
table saying which right labels satisfy its own constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .boolepoly import BooleanPoly
from .cnf import CnfFormula
from .errors import DimensionError, InfeasibleError

MAX_VERTICES = 10**6
MAX_EDGES = 5 * 10**6
VALUE_BUDGET = 1 << 24


@dataclass
class LabelCover:
    n_left: int
    n_right: int
    left_labels: int
    right_labels: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    proj: np.ndarray  # (E, right_labels) -> left label
    right_ok: np.ndarray  # (n_right, right_labels) bool
    left_names: list = field(default_factory=list)
    right_names: list = field(default_factory=list)
    # coordinate maps, when labels are bit strings and projections restrict coordinates:
    # coord[e, i] = right bit feeding left bit i
    coord: np.ndarray | None = None
    left_bits: int | None = None
    right_bits: int | None = None
    # right-vertex constraint polynomials on right_bits variables (value 0 = satisfied)
    clause_polys: list | None = None

    def __post_init__(self):
        self.edge_u = np.asarray(self.edge_u, dtype=np.int64)
        self.edge_v = np.asarray(self.edge_v, dtype=np.int64)
        self.proj = np.asarray(self.proj, dtype=np.int64)
        self.right_ok = np.asarray(self.right_ok, dtype=bool)
        E = len(self.edge_u)
        if len(self.edge_v) != E or self.proj.shape != (E, self.right_labels):
            raise DimensionError("edge arrays disagree in length or label count")
        if self.right_ok.shape != (self.n_right, self.right_labels):
            raise DimensionError("right constraint table has the wrong shape")
        if E and (self.proj.min() < 0 or self.proj.max() >= self.left_labels):
            raise DimensionError("projection maps outside the left label set")
        if E and (self.edge_u.max() >= self.n_left or self.edge_v.max() >= self.n_right):
            raise DimensionError("edge endpoint out of range")

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def edges_of_right(self, v: int) -> np.ndarray:
        return np.nonzero(self.edge_v == v)[0]

    def edges_of_left(self, u: int) -> np.ndarray:
        return np.nonzero(self.edge_u == u)[0]

    def satisfied_edges(self, left: Sequence[int], right: Sequence[int]) -> np.ndarray:
        left = np.asarray(left, dtype=np.int64)
        right = np.asarray(right, dtype=np.int64)
        rl = right[self.edge_v]
        ok = self.right_ok[self.edge_v, rl]
        return ok & (self.proj[np.arange(self.n_edges), rl] == left[self.edge_u])

    def labeling_value(self, left: Sequence[int], right: Sequence[int]) -> Fraction:
        sat = self.satisfied_edges(left, right)
        return Fraction(int(sat.sum()), self.n_edges)


def build_label_cover(phi: CnfFormula, r: int = 1) -> LabelCover:
    """The r-repeated game of a width-3 formula.

    Right vertices are r-tuples of clauses, left vertices r-tuples of
    variables; u ~ v when each u_i occurs in clause v_i.  A right label
    satisfies v when, coordinate by coordinate, its slot values are
    consistent on repeated variables and satisfy the clause.
    """
    if r < 1:
        raise DimensionError("r must be positive")
    return parallel_repeat(_single_round(phi), r)


def _single_round(phi: CnfFormula) -> LabelCover:
    C = len(phi.clauses)
    eu, ev, proj, coord = [], [], [], []
    for k in range(C):
        cl = phi.clauses[k]
        for var in phi.clause_vars(k):
            slot = next(j for j, lit in enumerate(cl) if abs(lit) - 1 == var)
            eu.append(var)
            ev.append(k)
            proj.append([(b >> slot) & 1 for b in range(8)])
            coord.append([slot])
    ok = np.array([[phi.slot_satisfies(k, b) for b in range(8)] for k in range(C)], dtype=bool)
    polys = []
    for k in range(C):
        table = [0 if phi.slot_satisfies(k, b) else 1 for b in range(8)]
        polys.append([BooleanPoly.from_table(3, table)])
    return LabelCover(
        n_left=phi.n, n_right=C, left_labels=2, right_labels=8,
        edge_u=np.array(eu), edge_v=np.array(ev), proj=np.array(proj, dtype=np.int64).reshape(-1, 8),
        right_ok=ok.reshape(C, 8),
        left_names=[(i,) for i in range(phi.n)], right_names=[(k,) for k in range(C)],
        coord=np.array(coord, dtype=np.int64).reshape(-1, 1), left_bits=1, right_bits=3,
        clause_polys=polys,
    )


def parallel_repeat(lc: LabelCover, n: int) -> LabelCover:
    """n-fold product game with mixed-radix labels (coordinate i has weight |R|^i)."""
    if n < 1:
        raise DimensionError("repetition count must be positive")
    if n == 1:
        return lc
    NL, NR = lc.n_left ** n, lc.n_right ** n
    L, R = lc.left_labels ** n, lc.right_labels ** n
    E = lc.n_edges ** n
    if max(NL, NR) > MAX_VERTICES or E > MAX_EDGES or E * R > 1 << 28:
        raise InfeasibleError(f"{n}-fold repetition is too large ({E} edges, {R} right labels)")
    R1, L1 = lc.right_labels, lc.left_labels
    rdigits = [(np.arange(R) // R1 ** i) % R1 for i in range(n)]

    eidx = np.array(list(product(range(lc.n_edges), repeat=n)), dtype=np.int64)[:, ::-1]
    # eidx[:, i] is the base edge used in coordinate i
    edge_u = np.zeros(E, dtype=np.int64)
    edge_v = np.zeros(E, dtype=np.int64)
    proj = np.zeros((E, R), dtype=np.int64)
    for i in range(n):
        edge_u += lc.edge_u[eidx[:, i]] * lc.n_left ** i
        edge_v += lc.edge_v[eidx[:, i]] * lc.n_right ** i
        proj += lc.proj[eidx[:, i]][:, rdigits[i]] * L1 ** i
    vidx = np.array(list(product(range(lc.n_right), repeat=n)), dtype=np.int64)[:, ::-1]
    ok = np.ones((NR, R), dtype=bool)
    for i in range(n):
        ok &= lc.right_ok[vidx[:, i]][:, rdigits[i]]
    uidx = list(product(range(lc.n_left), repeat=n))
    left_names = [tuple(x for i in reversed(t) for x in lc.left_names[i]) for t in uidx] if lc.left_names else []
    right_names = [tuple(x for i in reversed(t) for x in lc.right_names[i]) for t in product(range(lc.n_right), repeat=n)] if lc.right_names else []

    coord = left_bits = right_bits = polys = None
    bit_labels = (lc.coord is not None and R1 == 1 << lc.right_bits and L1 == 1 << lc.left_bits)
    if bit_labels:
        left_bits, right_bits = lc.left_bits * n, lc.right_bits * n
        coord = np.concatenate([lc.coord[eidx[:, i]] + i * lc.right_bits for i in range(n)], axis=1)
        if lc.clause_polys is not None:
            polys = []
            for t in vidx:
                ps = []
                for i, base_v in enumerate(t):
                    for q in lc.clause_polys[base_v]:
                        ps.append(_shift_poly(q, i * lc.right_bits, right_bits))
                polys.append(ps)
    return LabelCover(
        n_left=NL, n_right=NR, left_labels=L, right_labels=R,
        edge_u=edge_u, edge_v=edge_v, proj=proj, right_ok=ok,
        left_names=left_names, right_names=right_names,
        coord=coord, left_bits=left_bits, right_bits=right_bits, clause_polys=polys,
    )


def _shift_poly(q: BooleanPoly, offset: int, m: int) -> BooleanPoly:
    c = 0
    for mono in q.monomials():
        c ^= 1 << (mono << offset)
    return BooleanPoly.from_coeffs(m, c)


def lc_value(lc: LabelCover, budget: int = VALUE_BUDGET) -> Fraction:
    """Exact optimum by enumerating labelings of the cheaper side.

    Enumerating left labelings, each right vertex then picks its best label;
    enumerating right labelings, each left vertex picks the plurality label.
    Raises InfeasibleError when both enumerations exceed ``budget``.
    """
    if lc.n_edges == 0:
        return Fraction(1)
    left_space = lc.left_labels ** lc.n_left
    right_space = lc.right_labels ** lc.n_right
    if min(left_space, right_space) > budget:
        raise InfeasibleError(
            f"exact value needs {min(left_space, right_space)} labelings (budget {budget})")
    if left_space <= right_space:
        best = _best_over_left(lc)
    else:
        best = _best_over_right(lc)
    return Fraction(int(best), lc.n_edges)


def _enumerate(count: int, n: int, base: int, chunk: int):
    for start in range(0, count, chunk):
        idx = np.arange(start, min(count, start + chunk), dtype=np.int64)
        labs = np.empty((len(idx), n), dtype=np.int64)
        for i in range(n):
            labs[:, i] = idx % base
            idx //= base
        yield labs


def _best_over_left(lc: LabelCover) -> int:
    total = lc.left_labels ** lc.n_left
    per_v = [lc.edges_of_right(v) for v in range(lc.n_right)]
    best = 0
    chunk = max(1, (1 << 22) // max(1, lc.right_labels * 4))
    for labs in _enumerate(total, lc.n_left, lc.left_labels, chunk):
        score = np.zeros(len(labs), dtype=np.int64)
        for v, edges in enumerate(per_v):
            if len(edges) == 0:
                continue
            s = np.zeros((len(labs), lc.right_labels), dtype=np.int64)
            for e in edges:
                s += lc.proj[e][None, :] == labs[:, lc.edge_u[e]][:, None]
            s[:, ~lc.right_ok[v]] = 0
            score += s.max(axis=1)
        best = max(best, int(score.max()))
        if best == lc.n_edges:
            break
    return best


def _best_over_right(lc: LabelCover) -> int:
    total = lc.right_labels ** lc.n_right
    per_u = [lc.edges_of_left(u) for u in range(lc.n_left)]
    best = 0
    chunk = max(1, (1 << 22) // max(1, lc.left_labels * 4))
    for labs in _enumerate(total, lc.n_right, lc.right_labels, chunk):
        score = np.zeros(len(labs), dtype=np.int64)
        for u, edges in enumerate(per_u):
            if len(edges) == 0:
                continue
            cnt = np.zeros((len(labs), lc.left_labels), dtype=np.int64)
            rows = np.arange(len(labs))
            for e in edges:
                v = lc.edge_v[e]
                rl = labs[:, v]
                good = lc.right_ok[v, rl]
                np.add.at(cnt, (rows[good], lc.proj[e, rl[good]]), 1)
            score += cnt.max(axis=1)
        best = max(best, int(score.max()))
        if best == lc.n_edges:
            break
    return best


def perfect_labeling(phi: CnfFormula, lc: LabelCover, assignment: int) -> tuple[list[int], list[int]]:
    """Labels induced by a satisfying assignment on an r-repeated game built from phi."""
    r = lc.right_bits // 3
    left, right = [], []
    for name in lc.left_names:
        lab = 0
        for i, var in enumerate(name):
            lab |= ((assignment >> var) & 1) << i
        left.append(lab)
    for name in lc.right_names:
        lab = 0
        for i, k in enumerate(name):
            for j, lit in enumerate(phi.clauses[k]):
                lab |= ((assignment >> (abs(lit) - 1)) & 1) << (3 * i + j)
        right.append(lab)
    assert len(right) == lc.n_right and r * 3 == lc.right_bits
    return left, right


# small hand-made games -----------------------------------------------------------


def game_from_tables(n_left: int, n_right: int, left_labels: int, right_labels: int,
                     edges: Sequence[tuple[int, int, Sequence[int]]], right_ok=None) -> LabelCover:
    ok = np.ones((n_right, right_labels), dtype=bool) if right_ok is None else np.asarray(right_ok, dtype=bool)
    return LabelCover(
        n_left=n_left, n_right=n_right, left_labels=left_labels, right_labels=right_labels,
        edge_u=np.array([e[0] for e in edges]), edge_v=np.array([e[1] for e in edges]),
        proj=np.array([list(e[2]) for e in edges], dtype=np.int64).reshape(len(edges), right_labels),
        right_ok=ok, left_names=[(i,) for i in range(n_left)], right_names=[(i,) for i in range(n_right)],
    )


def twisted_square_game() -> LabelCover:
    """Two left and two right vertices, one edge negates the label: value 3/4."""
    ident, neg = [0, 1], [1, 0]
    return game_from_tables(2, 2, 2, 2, [(0, 0, ident), (0, 1, ident), (1, 0, ident), (1, 1, neg)])


def triangle_game() -> LabelCover:
    """Properly 2-colour a triangle: right vertices are its edges, value 5/6."""
    edges = []
    tri = [(0, 1), (1, 2), (0, 2)]
    # right label b: bit 0 = colour of the first endpoint, bit 1 = colour of the second
    for v, (a, c) in enumerate(tri):
        edges.append((a, v, [b & 1 for b in range(4)]))
        edges.append((c, v, [(b >> 1) & 1 for b in range(4)]))
    ok = np.array([[(b & 1) != (b >> 1) for b in range(4)]] * 3)
    return game_from_tables(3, 3, 2, 4, edges, ok)


def contradiction_formula() -> CnfFormula:
    """(x1 or x1 or x1) and (not x1 or not x1 or not x1)."""
    return CnfFormula(1, ((1, 1, 1), (-1, -1, -1)))
