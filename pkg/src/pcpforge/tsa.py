"""The five-query TSA test on folded low-degree long-code tables.

For an edge (u, v) with coordinate projection pi, the test draws
x in P(r, d), y in P(3r, d), v, w in P(3r, d/2), sets z = x o pi + y + vw
and accepts iff F(x) + G(y) + G(z) + G(v) G(w) = 0, where F and G are the
0/1 tables of u and v (bit 1 stands for the value -1 of a +-1 table).  Seen
as a constraint on table cells, each query is one TSA equation
1 + X1 + X2 + X3 + X4 X5 = 1 with literal signs coming from folding.

Left tables are folded over the constant 1; right tables over the constant
and over the ideal J spanned by the vertex's clause polynomials.  Table
cells are the canonical coset representatives of those foldings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Sequence

import numpy as np

from .boolepoly import Folding, PolySpace, ideal_generators, poly_space
from .errors import DimensionError, FoldingError, InfeasibleError, PreconditionError
from .labelcover import LabelCover
from .quadsys import QuadEquation

FULL_LIMIT = 1 << 20


@dataclass(frozen=True)
class PipelineParams:
    r: int = 1
    d: int = 2
    b: int = 1  # nominal exponent, recorded only
    seed: int = 0

    def __post_init__(self):
        if self.d < 2 or self.d % 2:
            raise PreconditionError("d must be even and at least 2")
        if self.r < 1:
            raise PreconditionError("r must be positive")


def _mobius_u64(m: int, vals: np.ndarray) -> np.ndarray:
    v = vals.copy()
    for i in range(m):
        block = 1 << i
        mask = 0
        for start in range(0, 1 << m, 2 * block):
            mask |= ((1 << block) - 1) << start
        v ^= (v & np.uint64(mask)) << np.uint64(block)
    return v


def _coeffs_to_coords(space: PolySpace, coeffs: np.ndarray) -> np.ndarray:
    out = np.zeros(coeffs.shape, dtype=np.uint64)
    one = np.uint64(1)
    for i, S in enumerate(space.basis):
        out |= ((coeffs >> np.uint64(S)) & one) << np.uint64(i)
    return out


class TsaInstance:
    """Variables are folded-table cells; constraints are generated per edge on demand."""

    def __init__(self, lc: LabelCover, params: PipelineParams, fold_over_j: bool = True,
                 sample: int | None = None):
        if lc.coord is None or lc.clause_polys is None:
            raise PreconditionError("TSA needs a game with bit labels and coordinate projections")
        self.lc = lc
        self.params = params
        d = params.d
        rl, rr = lc.left_bits, lc.right_bits
        if rr > 6:
            raise InfeasibleError("right label length above 6 bits is not supported")
        self.PL = poly_space(rl, min(d, rl))
        self.PR = poly_space(rr, min(d, rr))
        self.PH = poly_space(rr, min(d // 2, rr))
        if self.PR.dim > 20:
            raise InfeasibleError(f"dim P(3r,d) = {self.PR.dim} exceeds 20")
        self.left_fold = Folding(self.PL, (), over_constant=True)
        self.fold_over_j = fold_over_j
        self._right_folds: dict[tuple, Folding] = {}
        self.right_fold = []
        for v in range(lc.n_right):
            gens = tuple(ideal_generators(self.PR, lc.clause_polys[v])) if fold_over_j else ()
            key = tuple(sorted(gens))
            if key not in self._right_folds:
                self._right_folds[key] = Folding(self.PR, gens, over_constant=True)
            self.right_fold.append(self._right_folds[key])

        # variable numbering: left cells first, then right cells
        self.left_offset = np.arange(lc.n_left, dtype=np.int64) * self.left_fold.n_cells
        base = lc.n_left * self.left_fold.n_cells
        sizes = np.array([f.n_cells for f in self.right_fold], dtype=np.int64)
        self.right_offset = base + np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
        self.n_vars = int(base + sizes.sum())

        self._lookup: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        allL = np.arange(self.PL.size, dtype=np.uint64)
        red, sign = self.left_fold.reduce_array(allL)
        self.left_cell = self.left_fold.cell_index(red).astype(np.int64)
        self.left_sign = sign

        # z = lift(x) + y + v w in coordinates of P(3r, d)
        tabH = self.PH.eval_table()
        prod = tabH[:, None] & tabH[None, :]
        self.vw = _coeffs_to_coords(self.PR, _mobius_u64(rr, prod))
        self.per_edge = self.PL.size * self.PR.size * self.PH.size ** 2
        self.full = sample is None and self.per_edge <= FULL_LIMIT
        if sample is None and not self.full:
            raise InfeasibleError(
                f"{self.per_edge} queries per edge exceeds {FULL_LIMIT}; pass a sample count")
        self.sample = sample
        self._samples = None
        if sample is not None:
            self._samples = self._draw(sample, np.random.default_rng(params.seed))

    # lookups ----------------------------------------------------------------------

    def right_lookup(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        fold = self.right_fold[v]
        key = id(fold)
        if key not in self._lookup:
            allR = np.arange(self.PR.size, dtype=np.uint64)
            red, sign = fold.reduce_array(allR)
            self._lookup[key] = (fold.cell_index(red).astype(np.int64), sign)
        cell, sign = self._lookup[key]
        return cell + self.right_offset[v], sign

    def lift(self, e: int) -> np.ndarray:
        """Coordinates of x o pi_e in P(3r, d) for every x in P(r, d)."""
        coords = self.lc.coord[e]
        gens = []
        for S in self.PL.basis:
            T = 0
            for i in range(self.PL.m):
                if (S >> i) & 1:
                    T |= 1 << int(coords[i])
            gens.append(1 << self.PR.index[T])
        out = np.zeros(1, dtype=np.uint64)
        for g in gens:
            out = np.concatenate([out, out ^ np.uint64(g)])
        return out

    # constraints ---------------------------------------------------------------------

    def _queries(self, e: int, x, y, v, w):
        lc = self.lc
        u, rv = int(lc.edge_u[e]), int(lc.edge_v[e])
        z = self.lift(e)[x] ^ y.astype(np.uint64) ^ self.vw[v, w]
        rcell, rsign = self.right_lookup(rv)
        zi = z.astype(np.int64)
        cells = np.stack([
            self.left_cell[x] + self.left_offset[u],
            rcell[y], rcell[zi], rcell[v], rcell[w]], axis=-1)
        signs = np.stack([self.left_sign[x], rsign[y], rsign[zi], rsign[v], rsign[w]], axis=-1)
        return cells, signs.astype(np.uint8)

    def edge_block(self, e: int) -> tuple[np.ndarray, np.ndarray]:
        """All queries of edge e, ordered by (x, y, v, w) coordinates."""
        nx, ny, nh = self.PL.size, self.PR.size, self.PH.size
        x, y, v, w = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nh), np.arange(nh), indexing="ij")
        return self._queries(e, x.ravel(), y.ravel(), v.ravel(), w.ravel())

    def _draw(self, k: int, rng: np.random.Generator):
        E = self.lc.n_edges
        es = rng.integers(0, E, size=k)
        x = rng.integers(0, self.PL.size, size=k)
        y = rng.integers(0, self.PR.size, size=k)
        v = rng.integers(0, self.PH.size, size=k)
        w = rng.integers(0, self.PH.size, size=k)
        cells = np.empty((k, 5), dtype=np.int64)
        signs = np.empty((k, 5), dtype=np.uint8)
        for e in np.unique(es):
            sel = es == e
            c, s = self._queries(int(e), x[sel], y[sel], v[sel], w[sel])
            cells[sel], signs[sel] = c, s
        return es, cells, signs

    def blocks(self):
        """Yield (cells, signs) chunks covering every constraint once."""
        if self.full:
            for e in range(self.lc.n_edges):
                yield self.edge_block(e)
        else:
            _, cells, signs = self._samples
            yield cells, signs

    @property
    def n_constraints(self) -> int:
        return self.lc.n_edges * self.per_edge if self.full else self.sample

    def constraint_equation(self, cells: Sequence[int], signs: Sequence[int]) -> tuple[list[int], QuadEquation]:
        """Local quadratic equation of one constraint over its distinct cells.

        The equation reads (X1+s1) + (X2+s2) + (X3+s3) + (X4+s4)(X5+s5) = 0; repeated
        cells merge, so fewer than five variables may remain.
        """
        cells = [int(c) for c in cells]
        s = [int(b) for b in signs]
        names = sorted(set(cells))
        loc = {c: i for i, c in enumerate(names)}
        a = [loc[c] for c in cells]
        lin = [a[0], a[1], a[2]]
        if s[4]:
            lin.append(a[3])
        if s[3]:
            lin.append(a[4])
        const = s[0] ^ s[1] ^ s[2] ^ (s[3] & s[4])
        q = QuadEquation.from_terms(len(names), const, lin, [(a[3], a[4])])
        return names, q

    def sampled_constraints(self, k: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._draw(k, np.random.default_rng(seed))

    # assignments ---------------------------------------------------------------------

    def encode_labeling(self, left: Sequence[int], right: Sequence[int]) -> np.ndarray:
        """Cell values of the low-degree long-code encoding of a labeling (1 = table value -1)."""
        out = np.zeros(self.n_vars, dtype=np.uint8)
        cellsL = self.left_fold.cells
        for u, a in enumerate(left):
            pv = np.uint64(self.PL.point_vector(int(a)))
            off = self.left_offset[u]
            out[off:off + len(cellsL)] = np.bitwise_count(cellsL & pv) & 1
        for v, b in enumerate(right):
            cells = self.right_fold[v].cells
            pv = np.uint64(self.PR.point_vector(int(b)))
            off = self.right_offset[v]
            out[off:off + len(cells)] = np.bitwise_count(cells & pv) & 1
        return out

    def assignment_from_tables(self, left_tables: Sequence, right_tables: Sequence) -> np.ndarray:
        """Cell values from full +-1 tables, rejecting tables that break the folding."""
        out = np.zeros(self.n_vars, dtype=np.uint8)
        for u, t in enumerate(left_tables):
            t = np.asarray(t, dtype=np.float64)
            if t.shape != (self.PL.size,) or not self.left_fold.is_folded(t):
                raise FoldingError(f"left table {u} is not folded")
            cells = self.left_fold.cells.astype(np.int64)
            out[self.left_offset[u]:self.left_offset[u] + len(cells)] = (t[cells] < 0)
        for v, t in enumerate(right_tables):
            t = np.asarray(t, dtype=np.float64)
            fold = self.right_fold[v]
            if t.shape != (self.PR.size,) or not fold.is_folded(t):
                raise FoldingError(f"right table {v} is not folded")
            cells = fold.cells.astype(np.int64)
            out[self.right_offset[v]:self.right_offset[v] + len(cells)] = (t[cells] < 0)
        return out

    def expand_left(self, values: np.ndarray, u: int) -> np.ndarray:
        cellvals = 1.0 - 2.0 * values[self.left_offset[u]:self.left_offset[u] + self.left_fold.n_cells]
        return self.left_fold.expand(cellvals)

    def expand_right(self, values: np.ndarray, v: int) -> np.ndarray:
        n = self.right_fold[v].n_cells
        cellvals = 1.0 - 2.0 * values[self.right_offset[v]:self.right_offset[v] + n]
        return self.right_fold[v].expand(cellvals)


def accepts(values: np.ndarray, cells: np.ndarray, signs: np.ndarray) -> np.ndarray:
    b = values[cells] ^ signs
    return (b[..., 0] ^ b[..., 1] ^ b[..., 2] ^ (b[..., 3] & b[..., 4])) == 0


@dataclass
class AcceptReport:
    rate: Fraction | float
    accepted: int
    total: int
    exact: bool
    sigma: float = 0.0

    def ci(self, z: float = 3.0) -> tuple[float, float]:
        r = float(self.rate)
        return r - z * self.sigma, r + z * self.sigma


def tsa_accept_rate(inst: TsaInstance, values: np.ndarray) -> AcceptReport:
    values = np.asarray(values, dtype=np.uint8)
    if values.shape != (inst.n_vars,):
        raise DimensionError("assignment must give one bit per variable")
    acc = tot = 0
    for cells, signs in inst.blocks():
        a = accepts(values, cells, signs)
        acc += int(a.sum())
        tot += len(a)
    if inst.full:
        return AcceptReport(Fraction(acc, tot), acc, tot, exact=True)
    p = acc / tot
    return AcceptReport(p, acc, tot, exact=False, sigma=sqrt(max(p * (1 - p), 0.0) / tot))


def tsa_superposition_rate(inst: TsaInstance, assignments: Sequence[np.ndarray]) -> Fraction:
    """Fraction of constraints odd-covered by the assignments (t must be odd)."""
    t = len(assignments)
    if t % 2 == 0:
        raise PreconditionError("the superposition guarantee is stated for odd t")
    vals = [np.asarray(a, dtype=np.uint8) for a in assignments]
    covered = tot = 0
    for cells, signs in inst.blocks():
        count = np.zeros(len(cells), dtype=np.int64)
        for a in vals:
            count += accepts(a, cells, signs)
        covered += int((count % 2 == 1).sum())
        tot += len(cells)
    return Fraction(covered, tot)
