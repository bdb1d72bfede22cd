"""Bit-packed GF(2) linear algebra.

Vectors and matrix rows are Python ints used as bitsets: bit ``j`` of a
vector is coordinate ``j`` (0-based).  Documentation that talks about
"entry (1,1)" or "coordinate 1" uses 1-based indices, which is index 0 here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotPseudoQuadraticError, NotSymmetricError


def parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitVec:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative length")
        if self.bits >> self.n:
            raise DimensionError("bits set beyond vector length")

    @classmethod
    def from_list(cls, values: Iterable[int]) -> BitVec:
        values = list(values)
        bits = 0
        for j, b in enumerate(values):
            if b & 1:
                bits |= 1 << j
        return cls(len(values), bits)

    @classmethod
    def zero(cls, n: int) -> BitVec:
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, j: int = 0) -> BitVec:
        return cls(n, 1 << j)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.n)]

    def __len__(self):
        return self.n

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.n:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __iter__(self):
        return iter(self.to_list())

    def _check(self, other: BitVec):
        if self.n != other.n:
            raise DimensionError(f"length mismatch: {self.n} vs {other.n}")

    def __xor__(self, other: BitVec) -> BitVec:
        self._check(other)
        return BitVec(self.n, self.bits ^ other.bits)

    __add__ = __xor__

    def __and__(self, other: BitVec) -> BitVec:
        self._check(other)
        return BitVec(self.n, self.bits & other.bits)

    def dot(self, other: BitVec) -> int:
        self._check(other)
        return parity(self.bits & other.bits)

    def weight(self) -> int:
        return self.bits.bit_count()

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self):
        return "".join(str(b) for b in self.to_list())


@dataclass(frozen=True)
class BitMatrix:
    """Row-major GF(2) matrix; ``rows[i]`` bit ``j`` is entry (i, j)."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise DimensionError("row count does not match nrows")
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise DimensionError("row has bits beyond ncols")

    # construction -------------------------------------------------------

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> BitMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(BitVec.from_list(r).bits for r in rows))

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> BitMatrix:
        ncols = nrows if ncols is None else ncols
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def outer(cls, u: BitVec, v: BitVec) -> BitMatrix:
        """u ⊗ v, i.e. the matrix with entries u_i v_j."""
        return cls(u.n, v.n, tuple(v.bits if (u.bits >> i) & 1 else 0 for i in range(u.n)))

    @classmethod
    def from_columns(cls, cols: Sequence[BitVec], nrows: int | None = None) -> BitMatrix:
        if nrows is None:
            if not cols:
                raise DimensionError("cannot infer row count from no columns")
            nrows = cols[0].n
        rows = [0] * nrows
        for j, c in enumerate(cols):
            if c.n != nrows:
                raise DimensionError("column length mismatch")
            b = c.bits
            while b:
                low = b & -b
                rows[low.bit_length() - 1] |= 1 << j
                b ^= low
        return cls(nrows, len(cols), tuple(rows))

    @classmethod
    def from_flat(cls, n: int, bits: int, ncols: int | None = None) -> BitMatrix:
        """Unpack the row-major flattening (bit ``i*ncols + j``)."""
        ncols = n if ncols is None else ncols
        mask = (1 << ncols) - 1
        return cls(n, ncols, tuple((bits >> (i * ncols)) & mask for i in range(n)))

    def flat(self) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            out |= r << (i * self.ncols)
        return out

    # access ---------------------------------------------------------------

    def to_lists(self) -> list[list[int]]:
        return [BitVec(self.ncols, r).to_list() for r in self.rows]

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def col(self, j: int) -> BitVec:
        bits = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                bits |= 1 << i
        return BitVec(self.nrows, bits)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not any(self.rows)

    # algebra --------------------------------------------------------------

    @property
    def T(self) -> BitMatrix:
        rows = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                rows[low.bit_length() - 1] |= 1 << i
                r ^= low
        return BitMatrix(self.ncols, self.nrows, tuple(rows))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    __xor__ = __add__

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.rows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BitMatrix(self.nrows, other.ncols, tuple(out))

    def apply(self, v: BitVec) -> BitVec:
        """Matrix-vector product M v."""
        if v.n != self.ncols:
            raise DimensionError("vector length does not match column count")
        bits = 0
        for i, r in enumerate(self.rows):
            if parity(r & v.bits):
                bits |= 1 << i
        return BitVec(self.nrows, bits)

    def dot(self, other: BitMatrix) -> int:
        """Entry-wise inner product <A, B> over GF(2)."""
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        acc = 0
        for a, b in zip(self.rows, other.rows):
            acc ^= a & b
        return parity(acc)

    def is_symmetric(self) -> bool:
        return self.is_square() and self.rows == self.T.rows

    def rank(self) -> int:
        return rank(self)

    def __str__(self):
        return "\n".join("".join(str(b) for b in row) for row in self.to_lists())


# elimination ----------------------------------------------------------------


def _echelon(rows: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis of the span, keyed by leading (highest) bit."""
    basis: dict[int, int] = {}
    for r in rows:
        for lead in sorted(basis, reverse=True):
            if (r >> lead) & 1:
                r ^= basis[lead]
        if r:
            lead = r.bit_length() - 1
            for k in basis:
                if (basis[k] >> lead) & 1:
                    basis[k] ^= r
            basis[lead] = r
    return [basis[k] for k in sorted(basis, reverse=True)]


def span_basis(vectors: Iterable[int]) -> list[int]:
    """Reduced basis (as ints) of the GF(2) span of ``vectors``."""
    return _echelon(vectors)


def reduce_by(x: int, basis: Sequence[int]) -> int:
    """Canonical coset representative of x modulo span(basis).

    ``basis`` must come from :func:`span_basis`; the result is the minimum
    integer in the coset.
    """
    for b in basis:
        if (x >> (b.bit_length() - 1)) & 1:
            x ^= b
    return x


def rank(M: BitMatrix) -> int:
    work = list(M.rows)
    r = 0
    for col in range(M.ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r]
        for i in range(r + 1, len(work)):
            if work[i] & bit:
                work[i] ^= p
        r += 1
        if r == len(work):
            break
    return r


def nullspace(M: BitMatrix) -> list[BitVec]:
    """Basis of {x : M x = 0}."""
    work = list(M.rows)
    pivots: list[int] = []
    r = 0
    for col in range(M.ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= p
        pivots.append(col)
        r += 1
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = 1 << f
        for row, pc in zip(work, pivots):
            if (row >> f) & 1:
                x |= 1 << pc
        basis.append(BitVec(M.ncols, x))
    return basis


def solve(M: BitMatrix, b: BitVec) -> BitVec | None:
    """One solution x of M x = b, or None when the system is inconsistent."""
    if b.n != M.nrows:
        raise DimensionError("right-hand side length does not match row count")
    n = M.ncols
    # augment: bit n of each row carries the right-hand side
    work = [r | (((b.bits >> i) & 1) << n) for i, r in enumerate(M.rows)]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= p
        pivots.append(col)
        r += 1
    if any(row == 1 << n for row in work[r:]):
        return None
    x = 0
    for row, pc in zip(work, pivots):
        if (row >> n) & 1:
            x |= 1 << pc
    return BitVec(n, x)


def column_space_contains(M: BitMatrix, v: BitVec) -> bool:
    if v.n != M.nrows:
        raise DimensionError("vector length must equal the row count")
    return solve(M, v) is not None


def d1(x):
    """Drop coordinate 1 of a vector, or row 1 and column 1 of a square matrix."""
    if isinstance(x, BitVec):
        if x.n < 1:
            raise DimensionError("d1 of an empty vector")
        return BitVec(x.n - 1, x.bits >> 1)
    if isinstance(x, BitMatrix):
        if not x.is_square() or x.nrows < 1:
            raise DimensionError("d1 needs a non-empty square matrix")
        return BitMatrix(x.nrows - 1, x.ncols - 1, tuple(r >> 1 for r in x.rows[1:]))
    raise TypeError(f"d1 expects BitVec or BitMatrix, got {type(x).__name__}")


def prepend_one(v: BitVec) -> BitVec:
    """(1, v): inverse of d1 on vectors with leading coordinate 1."""
    return BitVec(v.n + 1, (v.bits << 1) | 1)


# decompositions --------------------------------------------------------------


def decompose_symmetric(A: BitMatrix) -> list[BitVec]:
    """Write a symmetric A as a sum of at most floor(3 rank(A) / 2) squares v ⊗ v.

    Congruence elimination: a unit diagonal entry A_ii peels off c ⊗ c with
    c = A e_i (rank drops by one); otherwise an off-diagonal A_ij = 1 peels
    off the hyperbolic pair a ⊗ b + b ⊗ a with a = A e_i, b = A e_j (rank
    drops by two), emitted as a ⊗ a + b ⊗ b + (a + b) ⊗ (a + b).  Every
    emitted vector is a column of a matrix whose column space lies inside
    that of A.
    """
    if not A.is_symmetric():
        raise NotSymmetricError()
    n = A.nrows
    rows = list(A.rows)
    out: list[int] = []
    while True:
        diag = next((i for i in range(n) if (rows[i] >> i) & 1), None)
        if diag is not None:
            c = rows[diag]
            for r in range(n):
                if (c >> r) & 1:
                    rows[r] ^= c
            out.append(c)
            continue
        i = next((i for i in range(n) if rows[i]), None)
        if i is None:
            break
        j = (rows[i] & -rows[i]).bit_length() - 1
        a, b = rows[i], rows[j]
        for r in range(n):
            if (a >> r) & 1:
                rows[r] ^= b
            if (b >> r) & 1:
                rows[r] ^= a
        out.extend([b, a, a ^ b])
    return [BitVec(n, v) for v in out]


def is_pseudoquadratic(A: BitMatrix) -> bool:
    if not A.is_square() or A.nrows < 1 or not A.is_symmetric():
        return False
    if not A.entry(0, 0):
        return False
    return all(A.entry(0, i) == A.entry(i, i) for i in range(1, A.nrows))


def decompose_pseudoquadratic(A: BitMatrix) -> list[BitVec]:
    """Odd-length decomposition A = sum v_i ⊗ v_i with every v_i starting with 1.

    The tail D1(A) is decomposed symmetrically, each piece gets a leading 1,
    and e = (1, 0, ..., 0) is appended when the count comes out even.
    """
    if not is_pseudoquadratic(A):
        raise NotPseudoQuadraticError("matrix is not pseudo-quadratic")
    tail = decompose_symmetric(d1(A))
    vs = [prepend_one(u) for u in tail]
    if len(vs) % 2 == 0:
        vs.append(BitVec.unit(A.nrows, 0))
    return vs


def sum_of_squares(vs: Sequence[BitVec], n: int) -> BitMatrix:
    acc = BitMatrix.zeros(n)
    for v in vs:
        acc = acc + BitMatrix.outer(v, v)
    return acc


# Walsh-Hadamard -------------------------------------------------------------


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise DimensionError(f"length {n} is not a power of two")
    return n.bit_length() - 1


def _butterfly(vals: list) -> list:
    h = 1
    n = len(vals)
    while h < n:
        for start in range(0, n, 2 * h):
            for k in range(start, start + h):
                a, b = vals[k], vals[k + h]
                vals[k], vals[k + h] = a + b, a - b
        h *= 2
    return vals


def wht(table, exact: bool = False):
    """Normalised transform c_s = 2^-n sum_x table[x] (-1)^<s,x>.

    ``exact=True`` works on Fractions and returns a list; otherwise float64
    numpy arrays are used.
    """
    n = len(table)
    bits = _check_pow2(n)
    if exact:
        vals = _butterfly([Fraction(v) for v in table])
        scale = Fraction(1, 1 << bits)
        return [v * scale for v in vals]
    vals = np.array(table, dtype=np.float64)
    h = 1
    while h < n:
        vals = vals.reshape(-1, 2, h)
        a = vals[:, 0, :].copy()
        b = vals[:, 1, :]
        vals = np.stack([a + b, a - b], axis=1).reshape(n)
        h *= 2
    return vals / n


def iwht(coeffs, exact: bool = False):
    """Inverse of :func:`wht`: table[x] = sum_s c_s (-1)^<s,x>."""
    n = len(coeffs)
    _check_pow2(n)
    if exact:
        return _butterfly([Fraction(v) for v in coeffs])
    return wht(coeffs) * n
