"""8-query matrix test, hypergraph emission and the canonical 2-coloring.

Matrices are packed row-major into uint64 (bit i*n + j), so the right side n
is limited to 8.  A hypergraph vertex is (right vertex v, coset of H_v); the
coset of X is identified by its syndrome against the primal basis of v.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import f2core
from .errors import InfeasibleError, PreconditionError
from .f2core import BitMatrix, BitVec
from .vectorlc import ExplicitVectorLC, MatrixLabelCover, label_matrix

ONE = np.uint64(1)
CHUNK = 1 << 16


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PCPFORGE_THREADS", "1")))
    except ValueError:
        return 1


def popparity(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x) & 1).astype(np.uint64)


def outer_flat(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Packed x (x) y for packed length-n vectors."""
    out = np.zeros(np.broadcast(x, y).shape, dtype=np.uint64)
    for i in range(n):
        mask = np.uint64(0) - ((x >> np.uint64(i)) & ONE)
        out |= mask & (y << np.uint64(i * n))
    return out


def random_bits(rng: np.random.Generator, nbits: int, size: int) -> np.ndarray:
    raw = rng.integers(0, np.iinfo(np.uint64).max, size=size, dtype=np.uint64, endpoint=True)
    if nbits >= 64:
        return raw
    return raw & np.uint64((1 << nbits) - 1)


def adjoint_flat(A: BitMatrix, F: int) -> int:
    """A^T F A packed, for F packed on the small side."""
    Fm = BitMatrix.from_flat(A.nrows, F)
    return (A.T @ Fm @ A).flat()


class FoldedMatrixDomain:
    """Cosets of the matrix space modulo H_v, the annihilator of the primal subspace."""

    def __init__(self, mlc: MatrixLabelCover, v: int, max_dim: int = 20):
        self.v = v
        self.n = mlc.n_r
        if self.n > 8:
            raise InfeasibleError("packed matrices need a side of at most 8")
        self.primal = mlc.primal_basis(v, max_dim=max_dim)
        self.dim = len(self.primal)
        self._p = np.array(self.primal, dtype=np.uint64)
        # dual basis: D_i with <D_i, P_j> = delta_ij, from a solve over the matrix space
        n2 = self.n * self.n
        P = BitMatrix(self.dim, n2, tuple(self.primal))
        self.dual = []
        for i in range(self.dim):
            sol = f2core.solve(P, BitVec(self.dim, 1 << i))
            self.dual.append(sol.bits)

    @property
    def n_cosets(self) -> int:
        return 1 << self.dim

    def syndrome(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.uint64)
        s = np.zeros(X.shape, dtype=np.uint64)
        for j, p in enumerate(self._p):
            s |= popparity(X & p) << np.uint64(j)
        return s

    def representative(self, s: int) -> int:
        out = 0
        for i in range(self.dim):
            if (s >> i) & 1:
                out ^= self.dual[i]
        return out

    def annihilator_basis(self) -> list[int]:
        """Basis of H_v (flat ints)."""
        n2 = self.n * self.n
        P = BitMatrix(self.dim, n2, tuple(self.primal)) if self.dim else BitMatrix.zeros(1, n2)
        return [b.bits for b in f2core.nullspace(P)]


@dataclass
class Hypergraph:
    offsets: np.ndarray  # first vertex id of each right vertex's block
    dims: np.ndarray  # coset-space dimension per right vertex
    edges: np.ndarray  # (M, 8) vertex ids

    @property
    def n_vertices(self) -> int:
        return int(self.offsets[-1] + (1 << int(self.dims[-1]))) if len(self.dims) else 0

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex(self, vid: int) -> tuple[int, int]:
        v = int(np.searchsorted(self.offsets, vid, side="right") - 1)
        return v, int(vid - self.offsets[v])

    def to_text(self) -> str:
        lines = [f"p hyp {self.n_vertices} {self.n_edges} 8"]
        lines += [" ".join(str(int(x)) for x in row) for row in self.edges]
        return "\n".join(lines) + "\n"


class EightQueryTest:
    """Sampler for the 8-query test over a matrix-label instance with explicit edges."""

    def __init__(self, mlc: MatrixLabelCover, max_dim: int = 20):
        vlc = mlc.vlc
        if not isinstance(vlc, ExplicitVectorLC):
            raise PreconditionError("the 8-query test needs an explicit vector Label-Cover")
        if vlc.n_edges == 0:
            raise PreconditionError("instance has no edges")
        self.mlc = mlc
        self.n = mlc.n_r
        self.nl = mlc.n_l
        if self.nl * self.nl > 12:
            raise InfeasibleError("left matrix space too large for the adjoint table")
        self.domains = [FoldedMatrixDomain(mlc, v, max_dim) for v in range(mlc.n_right)]
        dims = np.array([d.dim for d in self.domains], dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(1 << dims)[:-1]]).astype(np.int64)
        self.dims = dims
        self.edge_v = vlc.edge_v.astype(np.int64)
        self.edge_a = vlc.edge_a.astype(np.int64)
        # adjoint table: [matrix index, packed F] -> packed A^T F A
        from .vectorlc import corner_extend
        nF = 1 << (self.nl * self.nl)
        self.adj = np.zeros((len(vlc.matrices), nF), dtype=np.uint64)
        for k, A in enumerate(vlc.matrices):
            Ae = corner_extend(A)
            for F in range(nF):
                self.adj[k, F] = adjoint_flat(Ae, F)
        # left incidence in CSR form
        order = np.argsort(vlc.edge_u, kind="stable")
        counts = np.bincount(vlc.edge_u, minlength=vlc.n_left)
        self.active = np.nonzero(counts)[0]
        self.inc_start = np.concatenate([[0], np.cumsum(counts)[:-1]])
        self.inc_count = counts
        self.inc_edges = order
        self._pbits = [d._p for d in self.domains]

    def _syndromes(self, v: np.ndarray, X: np.ndarray) -> np.ndarray:
        s = np.zeros(X.shape, dtype=np.uint64)
        for vv in np.unique(v):
            sel = v == vv
            s[sel] = self.domains[int(vv)].syndrome(X[sel])
        return s

    def sample_raw(self, rng: np.random.Generator, count: int) -> dict:
        """Draw ``count`` test instances; returns packed query matrices and right vertices."""
        n, nl = self.n, self.nl
        u = self.active[rng.integers(0, len(self.active), size=count)]
        k1 = rng.integers(0, 1 << 62, size=count) % self.inc_count[u]
        k2 = rng.integers(0, 1 << 62, size=count) % self.inc_count[u]
        e1 = self.inc_edges[self.inc_start[u] + k1]
        e2 = self.inc_edges[self.inc_start[u] + k2]
        nb = n * n
        X1, X2, Y1, Y2 = (random_bits(rng, nb, count) for _ in range(4))
        F = rng.integers(0, 1 << (nl * nl), size=count)
        x, y, z, x2, y2, z2 = (random_bits(rng, n, count) for _ in range(6))
        Fp = self.adj[self.edge_a[e1], F]
        Fs = self.adj[self.edge_a[e2], F]
        ee = ONE  # e (x) e is the corner entry
        e = ONE
        X3 = X1 ^ outer_flat(x, y, n) ^ Fp
        X4 = X2 ^ outer_flat(x ^ e, z, n) ^ Fp
        Y3 = Y1 ^ outer_flat(x2, y2, n) ^ Fs ^ ee
        Y4 = Y2 ^ outer_flat(x2 ^ e, z2, n) ^ Fs ^ ee
        return {"u": u, "v": self.edge_v[e1], "w": self.edge_v[e2], "edge_pi": e1, "edge_sigma": e2,
                "queries": np.stack([X1, X2, X3, X4, Y1, Y2, Y3, Y4], axis=1)}

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """(count, 8) global vertex ids."""
        raw = self.sample_raw(rng, count)
        Q = raw["queries"]
        out = np.empty(Q.shape, dtype=np.int64)
        for j in range(8):
            vv = raw["v"] if j < 4 else raw["w"]
            out[:, j] = self.offsets[vv] + self._syndromes(vv, Q[:, j]).astype(np.int64)
        return out

    def sample_chunked(self, seed: int, count: int) -> np.ndarray:
        """Deterministic chunk plan: chunk k uses SeedSequence(seed).spawn(...)[k]."""
        nchunks = max(1, -(-count // CHUNK))
        seqs = np.random.SeedSequence(seed).spawn(nchunks)
        sizes = [min(CHUNK, count - k * CHUNK) for k in range(nchunks)]

        def run(k):
            return self.sample(np.random.default_rng(seqs[k]), sizes[k])

        threads = thread_count()
        if threads > 1 and nchunks > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(run, range(nchunks)))
        else:
            parts = [run(k) for k in range(nchunks)]
        return np.concatenate(parts, axis=0) if parts else np.zeros((0, 8), dtype=np.int64)

    def hypergraph(self, edges: np.ndarray) -> Hypergraph:
        return Hypergraph(self.offsets, self.dims, edges)


def sample_8query(mlc: MatrixLabelCover, rng: np.random.Generator, count: int = 1) -> np.ndarray:
    return EightQueryTest(mlc).sample(rng, count)


def emit_hypergraph(mlc: MatrixLabelCover, edge_count: int, seed: int) -> Hypergraph:
    test = EightQueryTest(mlc)
    return test.hypergraph(test.sample_chunked(seed, edge_count))


# colorings --------------------------------------------------------------------------


def canonical_two_coloring(test: EightQueryTest, right_labels: Sequence[int],
                           left_labels: Sequence[int] | None = None) -> np.ndarray:
    """Color of (v, coset of X) = <X, y^ (x) y^> with y^ = (1, y_v); array over all vertices."""
    mlc = test.mlc
    vlc = mlc.vlc
    for v, b in enumerate(right_labels):
        if not vlc.right_ok(v, b):
            raise PreconditionError(f"right label of vertex {v} violates its equations")
    if left_labels is not None:
        n, ok, _ = vlc.check_labeling(left_labels, right_labels)
        if ok != n:
            raise PreconditionError("labeling is not perfect")
    colors = []
    for v, dom in enumerate(test.domains):
        Y = label_matrix(int(right_labels[v]), vlc.m_r)
        if not mlc.satisfies_gamma(v, Y) or Y.rank() != 1 or Y.entry(0, 0) != 1:
            raise PreconditionError(f"label matrix of vertex {v} is not a valid rank-1 label")
        # Y = sum lam_j P_j, so <X, Y> = lam . syndrome(X)
        P = BitMatrix(dom.dim, dom.n ** 2, tuple(dom.primal))
        lam = f2core.solve(P.T, BitVec(dom.n ** 2, Y.flat()))
        if lam is None:
            raise PreconditionError("label matrix lies outside the primal subspace")
        s = np.arange(dom.n_cosets, dtype=np.uint64)
        colors.append(popparity(s & np.uint64(lam.bits)).astype(np.uint8))
    return np.concatenate(colors)


def check_coloring(H: Hypergraph, colors: np.ndarray) -> np.ndarray:
    """Indices of monochromatic edges (all 8 colors equal)."""
    colors = np.asarray(colors)
    if len(colors) != H.n_vertices:
        raise PreconditionError("coloring must cover every vertex")
    c = colors[H.edges]
    return np.nonzero((c == c[:, :1]).all(axis=1))[0]


def independent_set_fraction(H: Hypergraph, subset) -> tuple[bool, Fraction]:
    """(no listed edge lies inside the subset, |S| / |V|); ``subset`` is a boolean mask or id list."""
    mask = np.zeros(H.n_vertices, dtype=bool)
    subset = np.asarray(subset)
    if subset.dtype == bool:
        if len(subset) != H.n_vertices:
            raise PreconditionError("mask length must equal the vertex count")
        mask = subset
    else:
        mask[subset.astype(np.int64)] = True
    inside = mask[H.edges].all(axis=1) if H.n_edges else np.zeros(0, dtype=bool)
    return (not inside.any()), Fraction(int(mask.sum()), H.n_vertices)
