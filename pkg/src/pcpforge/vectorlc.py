"""Label-Cover with GF(2)-vector labels and its matrix-label counterpart.

Vector labels: left labels x in F_2^{m_l}, right labels y in F_2^{m_r}; an edge
accepts when x = A_e y and y satisfies the right vertex's quadratic equations.
Matrix labels replace y by an (m_r+1)x(m_r+1) matrix M_v, and an edge accepts
when M_u = A_e M_v A_e^T with A_e = diag(1, A'_e).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import f2core
from .errors import DimensionError, InfeasibleError, PreconditionError
from .f2core import BitMatrix, BitVec
from .quadsys import QuadEquation, linearize
from .surface import SurfaceLabel, SurfaceLabelCover, fq_equation_to_f2


class VectorLabelCover:
    """Interface shared by explicit and repeated instances."""

    n_left: int
    n_right: int
    m_l: int
    m_r: int

    @property
    def n_edges(self) -> int:
        raise NotImplementedError

    def edge(self, i: int) -> tuple[int, int, BitMatrix]:
        raise NotImplementedError

    def equations(self, v: int) -> list[QuadEquation]:
        raise NotImplementedError

    def random_incident_edge(self, v: int, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def edge_ok(self, i: int, x: int, y: int) -> bool:
        _, _, A = self.edge(i)
        return A.apply(BitVec(self.m_r, y)).bits == x

    def right_ok(self, v: int, y: int) -> bool:
        b = BitVec(self.m_r, y)
        return all(q.satisfied_by(b) for q in self.equations(v))

    def check_labeling(self, left: Sequence[int], right: Sequence[int],
                       edges: Sequence[int] | None = None) -> tuple[int, int, bool]:
        """(edges checked, edges accepted, every right label valid)."""
        ids = range(self.n_edges) if edges is None else edges
        n = ok = 0
        for i in ids:
            u, v, _ = self.edge(i)
            n += 1
            ok += self.edge_ok(i, left[u], right[v])
        valid = all(self.right_ok(v, right[v]) for v in range(self.n_right))
        return n, ok, valid


@dataclass
class ExplicitVectorLC(VectorLabelCover):
    n_left: int
    n_right: int
    m_l: int
    m_r: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_a: np.ndarray  # index into matrices
    matrices: list
    right_equations: list  # per right vertex: list[QuadEquation]
    _incident: list = field(default=None, repr=False)

    def __post_init__(self):
        for A in self.matrices:
            if A.shape != (self.m_l, self.m_r):
                raise DimensionError("edge matrix has the wrong shape")
        inc = [[] for _ in range(self.n_right)]
        for i, v in enumerate(self.edge_v):
            inc[int(v)].append(i)
        self._incident = inc

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def edge(self, i: int):
        return int(self.edge_u[i]), int(self.edge_v[i]), self.matrices[int(self.edge_a[i])]

    def equations(self, v: int):
        return self.right_equations[v]

    def incident(self, v: int) -> list[int]:
        return self._incident[v]

    def random_incident_edge(self, v, rng):
        inc = self._incident[v]
        if not inc:
            raise InfeasibleError(f"right vertex {v} has no edges")
        return inc[int(rng.integers(0, len(inc)))]


class RepeatedVectorLC(VectorLabelCover):
    """n-fold parallel repetition: tuples of vertices and edges, block-diagonal maps."""

    def __init__(self, base: ExplicitVectorLC, n: int, max_edges: int = 1 << 26):
        if n < 1:
            raise PreconditionError("repetition count must be positive")
        if base.n_edges ** n > max_edges:
            raise InfeasibleError(f"{base.n_edges}^{n} edges exceed the budget {max_edges}")
        self.base = base
        self.n = n
        self.n_left = base.n_left ** n
        self.n_right = base.n_right ** n
        self.m_l = base.m_l * n
        self.m_r = base.m_r * n

    @property
    def n_edges(self) -> int:
        return self.base.n_edges ** self.n

    def _digits(self, x: int, radix: int) -> list[int]:
        return [(x // radix ** k) % radix for k in range(self.n)]

    def _compose(self, parts: Sequence[int], radix: int) -> int:
        return sum(p * radix ** k for k, p in enumerate(parts))

    def edge(self, i: int):
        parts = [self.base.edge(j) for j in self._digits(i, self.base.n_edges)]
        u = self._compose([p[0] for p in parts], self.base.n_left)
        v = self._compose([p[1] for p in parts], self.base.n_right)
        rows = []
        for k, (_, _, A) in enumerate(parts):
            rows += [r << (k * self.base.m_r) for r in A.rows]
        return u, v, BitMatrix(self.m_l, self.m_r, tuple(rows))

    def equations(self, v: int):
        out = []
        for k, vb in enumerate(self._digits(v, self.base.n_right)):
            out += [embed_equation(q, self.m_r, k * self.base.m_r) for q in self.base.equations(vb)]
        return out

    def random_incident_edge(self, v, rng):
        parts = [self.base.random_incident_edge(vb, rng) for vb in self._digits(v, self.base.n_right)]
        return self._compose(parts, self.base.n_edges)

    def repeat_labels(self, left: Sequence[int], right: Sequence[int]) -> tuple[list[int], list[int]]:
        """Tuple labels from a single-round labeling (coordinate-wise concatenation)."""
        def cat(labels, count, width):
            out = []
            for x in range(count ** self.n):
                val = 0
                for k, xb in enumerate(self._digits(x, count)):
                    val |= labels[xb] << (k * width)
                out.append(val)
            return out
        return cat(left, self.base.n_left, self.base.m_l), cat(right, self.base.n_right, self.base.m_r)


def embed_equation(q: QuadEquation, m: int, offset: int) -> QuadEquation:
    return QuadEquation.from_terms(m, q.c, [i + offset for i in q.linear_terms()],
                                   [(i + offset, j + offset) for i, j in q.quad_terms()])


def vector_smoothness(vlc: VectorLabelCover, v: int, y: int, samples: int,
                      rng: np.random.Generator) -> float:
    """Fraction of sampled incident edges on which a nonzero label projects to zero."""
    if y == 0:
        raise PreconditionError("smoothness is defined for nonzero labels")
    hits = 0
    for _ in range(samples):
        _, _, A = vlc.edge(vlc.random_incident_edge(v, rng))
        hits += A.apply(BitVec(vlc.m_r, y)).is_zero()
    return hits / samples


# constructions ----------------------------------------------------------------------


def equation_variable_lc(constraints: Sequence[tuple[Sequence[int], QuadEquation]],
                         n_vars: int, width: int = 5) -> ExplicitVectorLC:
    """Right vertices = equations on ``width`` slots, left vertices = variables.

    A constraint is (variable ids, local equation on len(ids) slots).  Repeated
    ids inside one constraint are rejected; unused slots are forced to zero.
    """
    eu, ev, ea, mats, eqs = [], [], [], [], []
    selectors = [BitMatrix(1, width, (1 << j,)) for j in range(width)]
    mats = selectors
    for v, (ids, q) in enumerate(constraints):
        ids = list(ids)
        if len(set(ids)) != len(ids) or len(ids) > width or q.m != len(ids):
            raise PreconditionError(f"constraint {v} must list <= {width} distinct variables matching its equation")
        local = [embed_equation(q, width, 0)]
        local += [QuadEquation.from_terms(width, 0, [j]) for j in range(len(ids), width)]
        eqs.append(local)
        for j, u in enumerate(ids):
            if not 0 <= u < n_vars:
                raise DimensionError(f"variable {u} out of range")
            eu.append(u)
            ev.append(v)
            ea.append(j)
    return ExplicitVectorLC(n_vars, len(constraints), 1, width, np.array(eu, dtype=np.int64),
                            np.array(ev, dtype=np.int64), np.array(ea, dtype=np.int64), mats, eqs)


def equation_variable_labels(lc: ExplicitVectorLC, constraints, assignment: Sequence[int]):
    left = [int(a) & 1 for a in assignment]
    right = []
    for ids, _ in constraints:
        y = 0
        for j, u in enumerate(ids):
            y |= left[u] << j
        right.append(y)
    return left, right


def _grid_index(a: int, b: int, d: int) -> int:
    return a * (d + 1) + b


def surface_label_bits(label: SurfaceLabel, e: int) -> int:
    d = label.d
    out = 0
    for (a, b), c in np.ndenumerate(label.grid):
        out |= int(c) << (e * _grid_index(a, b, d))
    return out


def vectorize_surface_lc(slc: SurfaceLabelCover) -> ExplicitVectorLC:
    """Expand F_q labels bitwise: right label = e bits per grid coefficient, left = e bits."""
    gf = slc.gf
    e, q, d = gf.e, gf.q, slc.d
    ncoef = (slc.dstar + 1) * (d + 1)
    m_r = e * ncoef

    def evaluation_rows(t: int, s: int) -> tuple:
        rows = [0] * e
        for a in range(slc.dstar + 1):
            ta = gf.pow(t, a)
            for b in range(d + 1):
                mon = gf.mul(ta, gf.pow(s, b))
                base = e * _grid_index(a, b, d)
                for p in range(e):
                    img = gf.mul(mon, 1 << p)
                    for k in range(e):
                        if (img >> k) & 1:
                            rows[k] |= 1 << (base + p)
        return tuple(rows)

    mats = [BitMatrix(e, m_r, evaluation_rows(t, s)) for t in range(q) for s in range(q)]
    ea = slc.edge_t * q + slc.edge_s

    # slot value V_i = sum_a c_{a,0} t_i^a, as e GF(2) linear forms per slot
    eqs = []
    for v in range(slc.n_right):
        forms = {}
        for var, t in zip(slc.slot_vars[v], slc.t_star[1:]):
            rows = evaluation_rows(t, 0)
            forms[var] = [BitVec(m_r, r) for r in rows]
        eq = slc.system.equations[slc.surface_constraint[v]]
        eqs.append(fq_equation_to_f2(eq, forms, m_r))
    return ExplicitVectorLC(slc.n_left, slc.n_right, e, m_r, slc.edge_u, slc.edge_v, ea, mats, eqs)


def vectorize_and_repeat(slc: SurfaceLabelCover, n: int, max_edges: int = 1 << 26):
    base = vectorize_surface_lc(slc)
    return base if n == 1 else RepeatedVectorLC(base, n, max_edges)


# matrix labels ----------------------------------------------------------------------


def label_matrix(alpha: int, m: int) -> BitMatrix:
    """(1 alpha)(1 alpha)^T."""
    v = BitVec(m + 1, 1 | (alpha << 1))
    return BitMatrix.outer(v, v)


def corner_extend(A: BitMatrix) -> BitMatrix:
    """diag(1, A)."""
    rows = (1,) + tuple(r << 1 for r in A.rows)
    return BitMatrix(A.nrows + 1, A.ncols + 1, rows)


class MatrixLabelCover:
    def __init__(self, vlc: VectorLabelCover):
        self.vlc = vlc
        self.n_l = vlc.m_l + 1
        self.n_r = vlc.m_r + 1
        self._primal: dict[int, list[int]] = {}

    @property
    def n_left(self) -> int:
        return self.vlc.n_left

    @property
    def n_right(self) -> int:
        return self.vlc.n_right

    @property
    def n_edges(self) -> int:
        return self.vlc.n_edges

    def edge(self, i: int) -> tuple[int, int, BitMatrix]:
        u, v, A = self.vlc.edge(i)
        return u, v, corner_extend(A)

    def linearized(self, v: int) -> list[BitMatrix]:
        return [linearize(q) for q in self.vlc.equations(v)]

    def satisfies_gamma(self, v: int, M: BitMatrix) -> bool:
        """Symmetric, M_ii = M_1i for i >= 2, orthogonal to each linearized equation."""
        if M.shape != (self.n_r, self.n_r) or not M.is_symmetric():
            return False
        if (M.rows[0] & ~1) != _diagonal(M) & ~1:
            return False
        return all(C.dot(M) == 0 for C in self.linearized(v))

    def gamma_constraints(self, v: int) -> list[int]:
        """Homogeneous constraints as flat (row-major) ints over the matrix space."""
        n = self.n_r
        out = []
        for i in range(n):
            for j in range(i + 1, n):
                out.append((1 << (i * n + j)) | (1 << (j * n + i)))
        for i in range(1, n):
            out.append((1 << (i * n + i)) | (1 << i))
        out += [C.flat() for C in self.linearized(v)]
        return out

    def primal_basis(self, v: int, max_dim: int = 64) -> list[int]:
        """Basis of the primal subspace of matrices satisfying Gamma(v), flat ints."""
        if v not in self._primal:
            n2 = self.n_r ** 2
            cons = BitMatrix(len(self.gamma_constraints(v)), n2, tuple(self.gamma_constraints(v)))
            basis = [b.bits for b in f2core.nullspace(cons)]
            if len(basis) > max_dim:
                raise InfeasibleError(f"primal dimension {len(basis)} exceeds {max_dim}")
            self._primal[v] = basis
        return self._primal[v]

    def edge_ok(self, i: int, Mu: BitMatrix, Mv: BitMatrix) -> bool:
        _, _, A = self.edge(i)
        return (A @ Mv @ A.T) == Mu

    def complete_labeling(self, left: Sequence[int], right: Sequence[int]):
        """Matrix labels (1 a)(1 a)^T from a perfect vector labeling."""
        L = [label_matrix(a, self.vlc.m_l) for a in left]
        R = [label_matrix(b, self.vlc.m_r) for b in right]
        return L, R


def _diagonal(M: BitMatrix) -> int:
    out = 0
    for i, r in enumerate(M.rows):
        out |= ((r >> i) & 1) << i
    return out


def matrixize(vlc: VectorLabelCover) -> MatrixLabelCover:
    return MatrixLabelCover(vlc)
