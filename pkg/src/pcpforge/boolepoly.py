"""GF(2) polynomials of bounded degree, low-degree long codes and their Fourier analysis.

A polynomial in m variables is stored twice: as its monomial coefficient
set (bit ``S`` set when the monomial prod_{j in S} x_j is present) and as its
evaluation table (bit ``x`` is the value at the point whose bit j-1 is
x_j).  The two are related by the zeta/Moebius transform over the subset
lattice, which over GF(2) is its own inverse.

Elements of P(m, d) are also addressed by their coordinate vector in the
monomial basis of :class:`PolySpace` (monomials ordered by degree, then by
bitmask).  Characters of P(m, d) are indexed by *syndromes*: the character
chi_beta is determined by the bits <beta, b_i> for the basis monomials b_i,
so a syndrome s acts on a coordinate vector c as (-1)^{s.c}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import f2core
from .errors import DimensionError, FoldingError, InfeasibleError, PreconditionError
from .f2core import BitMatrix, BitVec, parity

MAX_VARS = 24
MAX_COSET_DIM = 24
MAX_FOURIER_DIM = 20


def _subset_masks(m: int) -> list[int]:
    # mask_i marks the table positions whose index has bit i clear
    masks = []
    full = (1 << (1 << m)) - 1
    for i in range(m):
        block = 1 << i
        pattern = (1 << block) - 1
        mask = 0
        for start in range(0, 1 << m, 2 * block):
            mask |= pattern << start
        masks.append(mask & full)
    return masks


_MASK_CACHE: dict[int, list[int]] = {}


def _masks(m: int) -> list[int]:
    if m not in _MASK_CACHE:
        _MASK_CACHE[m] = _subset_masks(m)
    return _MASK_CACHE[m]


def zeta_transform(m: int, coeffs: int) -> int:
    """Coefficient set -> evaluation table: evals[x] = sum_{S subset of x} coeffs[S]."""
    if m > MAX_VARS:
        raise InfeasibleError(f"m={m} exceeds the {MAX_VARS}-variable limit")
    v = coeffs
    for i, mask in enumerate(_masks(m)):
        v ^= (v & mask) << (1 << i)
    return v


def mobius_transform(m: int, evals: int) -> int:
    """Evaluation table -> coefficient set (the same butterfly over GF(2))."""
    return zeta_transform(m, evals)


@dataclass(frozen=True)
class BooleanPoly:
    m: int
    coeffs: int
    evals: int

    @classmethod
    def from_coeffs(cls, m: int, coeffs: int) -> BooleanPoly:
        if coeffs >> (1 << m):
            raise DimensionError("coefficient bits outside the monomial range")
        return cls(m, coeffs, zeta_transform(m, coeffs))

    @classmethod
    def from_evals(cls, m: int, evals: int) -> BooleanPoly:
        if evals >> (1 << m):
            raise DimensionError("evaluation bits outside the point range")
        return cls(m, mobius_transform(m, evals), evals)

    @classmethod
    def from_monomials(cls, m: int, monomials: Iterable[int]) -> BooleanPoly:
        c = 0
        for mono in monomials:
            c ^= 1 << mono
        return cls.from_coeffs(m, c)

    @classmethod
    def from_table(cls, m: int, table: Sequence[int]) -> BooleanPoly:
        if len(table) != 1 << m:
            raise DimensionError("table length must be 2^m")
        return cls.from_evals(m, BitVec.from_list(table).bits)

    @classmethod
    def zero(cls, m: int) -> BooleanPoly:
        return cls(m, 0, 0)

    @classmethod
    def one(cls, m: int) -> BooleanPoly:
        return cls.from_coeffs(m, 1)

    @classmethod
    def var(cls, m: int, j: int) -> BooleanPoly:
        """The coordinate function x_{j+1} (0-based ``j``)."""
        return cls.from_coeffs(m, 1 << (1 << j))

    @classmethod
    def delta(cls, m: int, point: int) -> BooleanPoly:
        """Indicator of a single point."""
        return cls.from_evals(m, 1 << point)

    def __post_init__(self):
        if self.m < 0:
            raise DimensionError("negative variable count")

    def _check(self, other: BooleanPoly):
        if self.m != other.m:
            raise DimensionError(f"variable count mismatch: {self.m} vs {other.m}")

    def __add__(self, other: BooleanPoly) -> BooleanPoly:
        self._check(other)
        return BooleanPoly(self.m, self.coeffs ^ other.coeffs, self.evals ^ other.evals)

    __xor__ = __add__

    def __mul__(self, other: BooleanPoly) -> BooleanPoly:
        self._check(other)
        return BooleanPoly.from_evals(self.m, self.evals & other.evals)

    def __call__(self, point: int) -> int:
        return (self.evals >> point) & 1

    def degree(self) -> int:
        """Largest monomial size; -1 for the zero polynomial."""
        c, best = self.coeffs, -1
        while c:
            low = c & -c
            best = max(best, (low.bit_length() - 1).bit_count())
            c ^= low
        return best

    def weight(self) -> int:
        return self.evals.bit_count()

    def support(self) -> list[int]:
        return [x for x in range(1 << self.m) if (self.evals >> x) & 1]

    def table(self) -> list[int]:
        return [(self.evals >> x) & 1 for x in range(1 << self.m)]

    def is_zero(self) -> bool:
        return self.evals == 0

    def monomials(self) -> list[int]:
        return [S for S in range(1 << self.m) if (self.coeffs >> S) & 1]

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for S in sorted(self.monomials(), key=lambda s: (s.bit_count(), s)):
            if S == 0:
                terms.append("1")
            else:
                terms.append("".join(f"x{j + 1}" for j in range(self.m) if (S >> j) & 1))
        return " + ".join(terms)


def dot(f: BooleanPoly, g: BooleanPoly) -> int:
    """<f, g> = sum over all points of f(x) g(x), in GF(2)."""
    f._check(g)
    return parity(f.evals & g.evals)


def chi(beta: BooleanPoly, f: BooleanPoly) -> int:
    return -1 if dot(beta, f) else 1


def distance(f: BooleanPoly, g: BooleanPoly) -> int:
    f._check(g)
    return (f.evals ^ g.evals).bit_count()


# spaces ----------------------------------------------------------------------


class PolySpace:
    """P(m, d) with an ordered monomial basis; d = -1 is the zero space."""

    def __init__(self, m: int, d: int):
        if m < 0 or m > MAX_VARS:
            raise DimensionError(f"variable count {m} out of range")
        if d < -1 or d > m:
            raise DimensionError(f"degree {d} out of range for m={m}")
        self.m = m
        self.d = d
        self.basis: list[int] = sorted(
            (S for S in range(1 << m) if S.bit_count() <= d), key=lambda s: (s.bit_count(), s)
        )
        self.dim = len(self.basis)
        self.index = {S: i for i, S in enumerate(self.basis)}

    def __repr__(self):
        return f"PolySpace(m={self.m}, d={self.d})"

    def __eq__(self, other):
        return isinstance(other, PolySpace) and (self.m, self.d) == (other.m, other.d)

    def __hash__(self):
        return hash((self.m, self.d))

    def __len__(self):
        return 1 << self.dim

    @property
    def size(self) -> int:
        return 1 << self.dim

    def contains(self, f: BooleanPoly) -> bool:
        return f.m == self.m and f.degree() <= self.d

    def to_vector(self, f: BooleanPoly) -> int:
        if f.m != self.m:
            raise DimensionError("variable count mismatch")
        v = 0
        for S in f.monomials():
            i = self.index.get(S)
            if i is None:
                raise DimensionError(f"polynomial has degree above {self.d}")
            v |= 1 << i
        return v

    def from_vector(self, v: int) -> BooleanPoly:
        c = 0
        i = 0
        while v:
            if v & 1:
                c |= 1 << self.basis[i]
            v >>= 1
            i += 1
        return BooleanPoly.from_coeffs(self.m, c)

    def basis_polys(self) -> list[BooleanPoly]:
        return [BooleanPoly.from_coeffs(self.m, 1 << S) for S in self.basis]

    def elements(self) -> Iterable[BooleanPoly]:
        for v in range(self.size):
            yield self.from_vector(v)

    def point_vector(self, point: int) -> int:
        """Coordinate functional of evaluation at ``point``: g(point) = parity(c & pv)."""
        v = 0
        for i, S in enumerate(self.basis):
            if S & point == S:
                v |= 1 << i
        return v

    @cached_property
    def point_vectors(self) -> np.ndarray:
        if self.dim > 63:
            raise InfeasibleError("space too large for 64-bit coordinate vectors")
        return np.array([self.point_vector(x) for x in range(1 << self.m)], dtype=np.uint64)

    def syndrome(self, beta: BooleanPoly) -> int:
        """Bits <beta, b_i>: identifies the character chi_beta on this space."""
        if beta.m != self.m:
            raise DimensionError("variable count mismatch")
        s = 0
        for i, S in enumerate(self.basis):
            if parity(beta.evals & zeta_transform(self.m, 1 << S)):
                s |= 1 << i
        return s

    @cached_property
    def basis_evals(self) -> list[int]:
        return [zeta_transform(self.m, 1 << S) for S in self.basis]

    def eval_table(self) -> np.ndarray:
        """Evaluation tables (as uint64) of every element, indexed by coordinate vector."""
        if self.m > 6:
            raise InfeasibleError("evaluation tables need m <= 6 to fit one machine word")
        if self.dim > MAX_COSET_DIM:
            raise InfeasibleError(f"dim {self.dim} too large to enumerate")
        return _span_table([e for e in self.basis_evals])


def _span_table(gens: Sequence[int]) -> np.ndarray:
    out = np.zeros(1, dtype=np.uint64)
    for g in gens:
        out = np.concatenate([out, out ^ np.uint64(g)])
    return out


def poly_space(m: int, d: int) -> PolySpace:
    return _space_cache(m, d)


_SPACES: dict[tuple[int, int], PolySpace] = {}


def _space_cache(m: int, d: int) -> PolySpace:
    key = (m, d)
    if key not in _SPACES:
        _SPACES[key] = PolySpace(m, d)
    return _SPACES[key]


def dual_space(m: int, d: int) -> PolySpace:
    """The dual of P(m, d) under the dot product, which is P(m, m-d-1)."""
    if d < -1 or d > m:
        raise DimensionError(f"degree {d} out of range for m={m}")
    return poly_space(m, m - d - 1)


def brute_force_dual(space: PolySpace) -> set[int]:
    """All evaluation tables orthogonal to every basis element (exhaustive, m <= 4)."""
    if space.m > 4:
        raise InfeasibleError("exhaustive dual only for m <= 4")
    gens = space.basis_evals
    return {g for g in range(1 << (1 << space.m)) if not any(parity(g & b) for b in gens)}


# minimum-weight coset representatives ------------------------------------------


def _lex_less(a: int, b: int) -> bool:
    """Tables compared from the last point down, i.e. as integers (delta_0 is the least point mass)."""
    return a < b


@dataclass(frozen=True)
class CharacterRep:
    beta: BooleanPoly
    coset_id: int
    weight: int


def coset_min_weight(beta: BooleanPoly, dual_d: int) -> tuple[int, CharacterRep]:
    """Distance from beta to P(m, dual_d) together with the minimum-weight coset element.

    Exhaustive over the coset; ties go to the lexicographically least
    evaluation table read from the last point down.  The coset id is the syndrome of beta with respect to
    the dual of P(m, dual_d).
    """
    m = beta.m
    sub = poly_space(m, dual_d)
    if sub.dim > MAX_COSET_DIM:
        raise InfeasibleError(f"coset of dimension {sub.dim} exceeds the exhaustive limit")
    best = _min_weight_in_coset(m, beta.evals, sub.basis_evals)
    rep = BooleanPoly.from_evals(m, best)
    primal = poly_space(m, m - dual_d - 1)
    cid = primal.syndrome(beta)
    w = best.bit_count()
    return w, CharacterRep(rep, cid, w)


def _min_weight_in_coset(m: int, start: int, gens: Sequence[int]) -> int:
    if m <= 6:
        gens = list(gens)
        low, high = gens[:16], gens[16:]
        base = _span_table(low)
        best_w, best = None, None
        for hv in range(1 << len(high)):
            shift = start
            for i, g in enumerate(high):
                if (hv >> i) & 1:
                    shift ^= g
            arr = base ^ np.uint64(shift)
            w = np.bitwise_count(arr)
            mw = int(w.min())
            if best_w is not None and mw > best_w:
                continue
            for cand in arr[w == mw]:
                c = int(cand)
                if best_w is None or mw < best_w or _lex_less(c, best):
                    best_w, best = mw, c
        return best
    # wide tables: Gray-code walk over the coset with Python ints
    best = cur = start
    best_w = cur.bit_count()
    for k in range(1, 1 << len(gens)):
        cur ^= gens[(k & -k).bit_length() - 1]
        w = cur.bit_count()
        if w < best_w or (w == best_w and _lex_less(cur, best)):
            best, best_w = cur, w
    return best


class CharacterSet:
    """Lambda_{m,d}: minimum-weight representatives of P(m) / P(m,d)^perp, indexed by syndrome."""

    def __init__(self, m: int, d: int):
        self.space = poly_space(m, d)
        self.m, self.d = m, d
        self._reps: dict[int, CharacterRep] = {}

    @cached_property
    def dual_basis(self) -> list[int]:
        """Evaluation tables beta_j with <beta_j, b_i> = [i == j], supported on low-weight points."""
        sp = self.space
        # points with at most d ones give a unitriangular evaluation matrix
        pts = sp.basis
        G = BitMatrix(sp.dim, sp.dim, tuple(
            sum(1 << k for k, T in enumerate(pts) if S & T == S) for S in sp.basis
        ))
        out = []
        for j in range(sp.dim):
            sol = f2core.solve(G, BitVec.unit(sp.dim, j))
            ev = 0
            for k, T in enumerate(pts):
                if sol[k]:
                    ev |= 1 << T
            out.append(ev)
        return out

    def some_beta(self, syndrome: int) -> BooleanPoly:
        ev = 0
        i = 0
        s = syndrome
        while s:
            if s & 1:
                ev ^= self.dual_basis[i]
            s >>= 1
            i += 1
        return BooleanPoly.from_evals(self.m, ev)

    def rep(self, syndrome: int) -> CharacterRep:
        if syndrome not in self._reps:
            beta = self.some_beta(syndrome)
            _, rep = coset_min_weight(beta, self.m - self.d - 1)
            self._reps[syndrome] = CharacterRep(rep.beta, syndrome, rep.weight)
        return self._reps[syndrome]

    def all_reps(self) -> list[CharacterRep]:
        return [self.rep(s) for s in range(self.space.size)]


def pi2_project(beta: BooleanPoly, S: Sequence[int]) -> BooleanPoly:
    """Fibre sums of beta under x -> x restricted to S (0-based indices, in order)."""
    S = list(S)
    if len(set(S)) != len(S) or any(not 0 <= i < beta.m for i in S):
        raise DimensionError("S must list distinct coordinates of the source space")
    n = len(S)
    out = 0
    for x in beta.support():
        y = 0
        for j, i in enumerate(S):
            if (x >> i) & 1:
                y |= 1 << j
        out ^= 1 << y
    return BooleanPoly.from_evals(n, out)


def compose_projection(f: BooleanPoly, m: int, S: Sequence[int]) -> BooleanPoly:
    """f o pi where pi(x) = x restricted to S; the result lives on m variables."""
    if len(S) != f.m:
        raise DimensionError("projection arity does not match f")
    c = 0
    for mono in f.monomials():
        T = 0
        for j, i in enumerate(S):
            if (mono >> j) & 1:
                T |= 1 << i
        c ^= 1 << T
    return BooleanPoly.from_coeffs(m, c)


# Fourier analysis ----------------------------------------------------------------


class FourierTable:
    """A real-valued table on P(m, d), indexed by coordinate vector.

    ``coefficients[s]`` is the Fourier coefficient of the character with
    syndrome ``s``; see :meth:`rep` for the matching element of Lambda_{m,d}.
    """

    def __init__(self, space: PolySpace, values, exact: bool = False):
        if len(values) != space.size:
            raise DimensionError("table length must equal |P(m,d)|")
        self.space = space
        self.exact = exact
        self.values = [Fraction(v) for v in values] if exact else np.asarray(values, dtype=np.float64)
        self._coeffs = None
        self._chars = None

    @property
    def coefficients(self):
        if self._coeffs is None:
            if self.space.dim > MAX_FOURIER_DIM:
                raise InfeasibleError(f"Fourier expansion needs dim <= {MAX_FOURIER_DIM}")
            self._coeffs = f2core.wht(self.values, exact=self.exact)
        return self._coeffs

    def rep(self, syndrome: int) -> CharacterRep:
        if self._chars is None:
            self._chars = CharacterSet(self.space.m, self.space.d)
        return self._chars.rep(syndrome)

    def support(self, tol: float = 0.0) -> list[int]:
        return [s for s, c in enumerate(self.coefficients) if abs(c) > tol]

    def reconstruct(self):
        return f2core.iwht(self.coefficients, exact=self.exact)

    def value(self, f: BooleanPoly):
        return self.values[self.space.to_vector(f)]


def fourier_expand(space: PolySpace, values, exact: bool = False) -> FourierTable:
    """Expand a table on P(m, d) in the character basis (coefficients on syndromes)."""
    t = FourierTable(space, values, exact=exact)
    t.coefficients  # noqa: B018 - forces the size check eagerly
    return t


# folding -----------------------------------------------------------------------


class Folding:
    """Partition of P(m, d) into cosets of K = J (+ span{1} when folding over constant).

    A folded table takes one free value per coset; elements f + k get the
    value of f times -1 for every constant-1 component of k.  Cells are the
    canonical coset representatives (the least coordinate vector in each
    coset), and :meth:`reduce` maps an element to (cell, sign bit).
    """

    def __init__(self, space: PolySpace, generators: Sequence[int] = (), over_constant: bool = True):
        self.space = space
        self.over_constant = over_constant
        D = space.dim
        tag = 1 << D
        gens = list(generators)
        if any(g >> D for g in gens):
            raise DimensionError("generator outside the space")
        items = [g for g in gens]
        if over_constant:
            if space.d < 0:
                raise FoldingError("cannot fold over constant in the zero space")
            # the constant polynomial is coordinate 0; its tag bit records the sign flip
            items.append(1 | tag)
        # echelon on the low D bits, tag bit carried along
        basis: list[int] = []
        pivots: list[int] = []
        for v in items:
            for b, p in zip(basis, pivots):
                if (v >> p) & 1:
                    v ^= b
            low = v & (tag - 1)
            if low == 0:
                if v & tag:
                    raise FoldingError("the constant 1 lies in J; the folding is inconsistent")
                continue
            p = low.bit_length() - 1
            for i in range(len(basis)):
                if (basis[i] >> p) & 1:
                    basis[i] ^= v
            basis.append(v)
            pivots.append(p)
        order = sorted(range(len(basis)), key=lambda i: -pivots[i])
        self.basis = [basis[i] for i in order]
        self.pivots = [pivots[i] for i in order]
        self.kernel_dim = len(self.basis)
        self.n_cells = 1 << (D - self.kernel_dim)

    def reduce(self, c: int) -> tuple[int, int]:
        for b, p in zip(self.basis, self.pivots):
            if (c >> p) & 1:
                c ^= b
        D = self.space.dim
        return c & ((1 << D) - 1), (c >> D) & 1

    def reduce_array(self, cs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        D = self.space.dim
        c = cs.astype(np.uint64)
        one = np.uint64(1)
        for b, p in zip(self.basis, self.pivots):
            hit = (c >> np.uint64(p)) & one
            c = c ^ (hit * np.uint64(b))
        return c & np.uint64((1 << D) - 1), ((c >> np.uint64(D)) & one).astype(np.uint8)

    @cached_property
    def cells(self) -> np.ndarray:
        """Sorted canonical representatives."""
        if self.space.dim > 26:
            raise InfeasibleError("too many elements to list cells")
        allc = np.arange(self.space.size, dtype=np.uint64)
        red, _ = self.reduce_array(allc)
        return np.unique(red)

    def cell_index(self, reps: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.cells, reps)

    def expand(self, cell_values: Sequence, exact: bool = False):
        """Full +-1 (or real) table from per-cell values, ordered like :attr:`cells`."""
        if len(cell_values) != self.n_cells:
            raise FoldingError(f"expected {self.n_cells} cell values, got {len(cell_values)}")
        allc = np.arange(self.space.size, dtype=np.uint64)
        red, sign = self.reduce_array(allc)
        idx = self.cell_index(red)
        if exact:
            vals = [Fraction(v) for v in cell_values]
            return [(-vals[i] if s else vals[i]) for i, s in zip(idx.tolist(), sign.tolist())]
        vals = np.asarray(cell_values, dtype=np.float64)
        return np.where(sign == 1, -vals[idx], vals[idx])

    def is_folded(self, table) -> bool:
        vals = np.asarray([float(v) for v in table])
        allc = np.arange(self.space.size, dtype=np.uint64)
        red, sign = self.reduce_array(allc)
        expect = np.where(sign == 1, -vals[red.astype(np.int64)], vals[red.astype(np.int64)])
        return bool(np.array_equal(expect, vals))


def _partial_to_cells(folding: Folding, partial) -> list:
    """Accept a sequence ordered like the cells, or a mapping from element vector to value."""
    if isinstance(partial, dict):
        cells = folding.cells.tolist()
        got = {}
        for c, val in partial.items():
            c = folding.space.to_vector(c) if isinstance(c, BooleanPoly) else int(c)
            rep, sign = folding.reduce(c)
            if rep in got:
                raise FoldingError(f"two representatives given for the coset of {rep}")
            got[rep] = -val if sign else val
        missing = [c for c in cells if c not in got]
        if missing:
            raise FoldingError(f"{len(missing)} cosets have no representative value")
        return [got[c] for c in cells]
    return list(partial)


def fold_constant(space: PolySpace, partial, exact: bool = False) -> FourierTable:
    """Extend values on {f, f+1} representatives to a table with A(f+1) = -A(f)."""
    fold = Folding(space, (), over_constant=True)
    vals = fold.expand(_partial_to_cells(fold, partial), exact=exact)
    return FourierTable(space, vals, exact=exact)


def ideal_generators(space: PolySpace, q_list: Sequence[BooleanPoly]) -> list[int]:
    """Coordinate vectors spanning J = { sum r_i q_i : r_i in P(m, d-3) }."""
    m, d = space.m, space.d
    gens = []
    for q in q_list:
        if q.m != m:
            raise DimensionError("q has the wrong variable count")
        if q.degree() > 3:
            raise DimensionError("ideal generators must have degree at most 3")
        if d < 3:
            continue
        for r in poly_space(m, d - 3).basis_polys():
            gens.append(space.to_vector(r * q))
    return gens


def fold_over_ideal(space: PolySpace, q_list: Sequence[BooleanPoly], partial,
                    exact: bool = False, over_constant: bool = False) -> FourierTable:
    """Extend per-coset values to a table constant on cosets of J(q_1, ..., q_k)."""
    if space.d < 3 and q_list:
        raise PreconditionError("folding over J needs d >= 3")
    fold = Folding(space, ideal_generators(space, q_list), over_constant=over_constant)
    vals = fold.expand(_partial_to_cells(fold, partial), exact=exact)
    return FourierTable(space, vals, exact=exact)


# B_{d,k} subspaces and the bias identities -----------------------------------------


def b_subspace(beta: BooleanPoly, d: int, k: int) -> list[BooleanPoly]:
    """Basis of B_{d,k}(beta) = { g in P(m,k) : beta g in P(m, m-d-1+k) }."""
    m = beta.m
    if m > 16:
        raise InfeasibleError("b_subspace supports m <= 16")
    if k > d or k < 0:
        raise PreconditionError("need 0 <= k <= d")
    space = poly_space(m, k)
    target = m - d - 1 + k
    high = 0
    for S in range(1 << m):
        if S.bit_count() > target:
            high |= 1 << S
    images = [(beta * g).coeffs & high for g in space.basis_polys()]
    # columns = images; find combinations summing to zero
    rows = _columns_to_rows(images)
    M = BitMatrix(len(rows), space.dim, tuple(rows)) if rows else BitMatrix.zeros(0, space.dim)
    null = f2core.nullspace(M)
    return [space.from_vector(v.bits) for v in null]


def _columns_to_rows(cols: Sequence[int]) -> list[int]:
    present = 0
    for c in cols:
        present |= c
    rows = []
    while present:
        low = present & -present
        bit = low.bit_length() - 1
        r = 0
        for j, c in enumerate(cols):
            if (c >> bit) & 1:
                r |= 1 << j
        rows.append(r)
        present ^= low
    return rows


def b_codim(beta: BooleanPoly, d: int, k: int) -> int:
    return poly_space(beta.m, k).dim - len(b_subspace(beta, d, k))


@dataclass
class BiasReport:
    m: int
    d: int
    t: int
    w: int
    distance: int
    W_ok: bool
    H_ok: bool
    estimate: float
    sigma: float
    samples: int
    exact: float | None
    spectral_bound: float
    target_bound: float
    extras: dict = field(default_factory=dict)


def sign_matrix_W(beta: BooleanPoly, reps: Sequence[BooleanPoly]) -> np.ndarray:
    n = len(reps)
    W = np.empty((n, n), dtype=np.int64)
    bf = [beta.evals & f.evals for f in reps]
    for i in range(n):
        for j in range(n):
            W[i, j] = -1 if parity(bf[i] & bf[j]) else 1
    return W


def sign_matrix_H(t: int) -> np.ndarray:
    idx = np.arange(1 << t, dtype=np.uint64)
    par = np.bitwise_count(idx[:, None] & idx[None, :]) & 1
    return (1 - 2 * par.astype(np.int64))


def verify_bias_identities(m: int, d: int, beta: BooleanPoly, t: int, A_list: Sequence,
                           samples: int = 100_000, rng: np.random.Generator | None = None) -> BiasReport:
    """Check the spectral facts behind the low-degree bias bound for one beta.

    ``A_list`` holds t functions P(m, d/2) -> GF(2), each either a 0/1 array
    indexed by coordinate vector or a callable on coordinate vectors.
    """
    if d % 4 or d <= 0:
        raise PreconditionError("d must be a positive multiple of 4")
    if m <= d:
        raise PreconditionError("need m > d")
    if beta.m != m:
        raise DimensionError("beta has the wrong variable count")
    if not 0 <= t <= 6 or len(A_list) != t:
        raise PreconditionError("need 0 <= t <= 6 functions")
    if m > 6:
        raise InfeasibleError("bias checks use single-word evaluation tables (m <= 6)")
    rng = rng if rng is not None else np.random.default_rng(0)
    half = poly_space(m, d // 2)
    B = b_subspace(beta, d, d // 2)
    w = half.dim - len(B)
    if w > 12:
        raise PreconditionError(f"codimension {w} exceeds the limit 12")
    # complement of B inside P(m, d/2): pivots of B's echelon form are skipped
    B_vecs = f2core.span_basis(half.to_vector(g) for g in B)
    pivots = {b.bit_length() - 1 for b in B_vecs}
    comp = [1 << i for i in range(half.dim) if i not in pivots]
    reps = []
    for mask in range(1 << w):
        v = 0
        for j, c in enumerate(comp):
            if (mask >> j) & 1:
                v ^= c
        reps.append(half.from_vector(v))
    W = sign_matrix_W(beta, reps)
    W_ok = bool(np.array_equal(W @ W.T, (1 << w) * np.eye(1 << w, dtype=np.int64)))
    H = sign_matrix_H(t)
    H_ok = bool(np.array_equal(H @ H.T, (1 << t) * np.eye(1 << t, dtype=np.int64)))

    table = half.eval_table()
    A_arrays = []
    for A in A_list:
        if callable(A):
            A_arrays.append(np.array([A(c) & 1 for c in range(half.size)], dtype=np.uint8))
        else:
            arr = np.asarray(A, dtype=np.uint8)
            if arr.shape != (half.size,):
                raise DimensionError("A_i table must be indexed by all of P(m, d/2)")
            A_arrays.append(arr & 1)
    A_bits = np.zeros(half.size, dtype=np.uint64)
    for i, arr in enumerate(A_arrays):
        A_bits |= arr.astype(np.uint64) << np.uint64(i)

    bmask = np.uint64(beta.evals)
    g = rng.integers(0, half.size, size=samples)
    h = rng.integers(0, half.size, size=samples)
    par = np.bitwise_count(table[g] & table[h] & bmask) + np.bitwise_count(A_bits[g] & A_bits[h])
    vals = 1.0 - 2.0 * (par & 1)
    est = float(vals.mean())
    sigma = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")

    exact = None
    if half.dim <= 20:
        # u over (coset of B, a-vector); the expectation equals u^T (W kron H) u
        red = _reduce_table(np.arange(half.size, dtype=np.uint64), B_vecs)
        rep_vecs = np.array([half.to_vector(f) for f in reps], dtype=np.uint64)
        order = np.argsort(rep_vecs)
        coset_idx = order[np.searchsorted(rep_vecs[order], red)]
        counts = np.zeros((1 << w, 1 << t), dtype=np.float64)
        np.add.at(counts, (coset_idx, A_bits.astype(np.int64)), 1.0)
        u = counts / half.size
        exact = float(np.einsum("ia,ij,ab,jb->", u, W, H, u))

    dist, _ = coset_min_weight(beta, m - d - 1)
    return BiasReport(
        m=m, d=d, t=t, w=w, distance=dist, W_ok=W_ok, H_ok=H_ok,
        estimate=est, sigma=sigma, samples=samples, exact=exact,
        spectral_bound=2.0 ** (-(w - t) / 2),
        target_bound=2.0 ** (-(2 ** (d / 2 - 4) - t) / 2),
    )


def _reduce_table(cs: np.ndarray, basis: Sequence[int]) -> np.ndarray:
    c = cs.copy()
    one = np.uint64(1)
    for b in basis:
        p = np.uint64(b.bit_length() - 1)
        c ^= ((c >> p) & one) * np.uint64(b)
    return c


# low-degree long code -------------------------------------------------------------


def ldlc_table(space: PolySpace, point: int) -> np.ndarray:
    """0/1 table g -> g(point) over all coordinate vectors of the space."""
    pv = np.uint64(space.point_vector(point))
    allc = np.arange(space.size, dtype=np.uint64)
    return (np.bitwise_count(allc & pv) & 1).astype(np.uint8)


def monomial_count(m: int, d: int) -> int:
    return sum(comb(m, i) for i in range(d + 1))


def random_poly(m: int, d: int, rng: np.random.Generator) -> BooleanPoly:
    sp = poly_space(m, d)
    v = int.from_bytes(rng.bytes((sp.dim + 7) // 8), "little")
    return sp.from_vector(v & ((1 << sp.dim) - 1))
