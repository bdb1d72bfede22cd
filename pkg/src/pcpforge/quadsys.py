"""Quadratic equations over GF(2): evaluation, superposition, odd-covering and matrix forms.

An equation q(x) = 0 with q(x) = c + sum c_i x_i + sum_{i<j} c_ij x_i x_j is
"satisfied" by a when q(a) = 0.

Text format (one equation per line, 1-based variable indices)::

    # optional header: p quad <m> <count>
    c | i:ci i:ci ... | i,j:cij ...

Coefficients are 0/1; omitted coefficients are zero; ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import f2core
from .errors import DimensionError, ParseError, PreconditionError
from .f2core import BitMatrix, BitVec, parity


@dataclass(frozen=True)
class QuadEquation:
    m: int
    c: int
    linear: BitVec
    quad: BitMatrix  # strictly upper triangular

    def __post_init__(self):
        if self.linear.n != self.m or self.quad.shape != (self.m, self.m):
            raise DimensionError("coefficient shapes do not match m")
        for i, row in enumerate(self.quad.rows):
            if row & ((1 << (i + 1)) - 1):
                raise DimensionError("quadratic part must be strictly upper triangular")
        if self.c not in (0, 1):
            raise ValueError("constant must be 0 or 1")

    @classmethod
    def from_terms(cls, m: int, c: int = 0, linear: Iterable[int] = (),
                   quad: Iterable[tuple[int, int]] = ()) -> QuadEquation:
        """Build from 0-based term lists; repeated terms cancel, x_i x_i folds into x_i."""
        lin = 0
        rows = [0] * m
        for i in linear:
            _check_index(i, m)
            lin ^= 1 << i
        for i, j in quad:
            _check_index(i, m)
            _check_index(j, m)
            if i == j:
                lin ^= 1 << i
                continue
            i, j = min(i, j), max(i, j)
            rows[i] ^= 1 << j
        return cls(m, c & 1, BitVec(m, lin), BitMatrix(m, m, tuple(rows)))

    @classmethod
    def from_form(cls, c: int, linear: BitVec, M: BitMatrix) -> QuadEquation:
        """c + <linear, x> + x^T M x for an arbitrary square M."""
        m = linear.n
        if M.shape != (m, m):
            raise DimensionError("form matrix has the wrong shape")
        lin = linear.bits
        S = M + M.T
        rows = []
        for i in range(m):
            lin ^= ((M.rows[i] >> i) & 1) << i
            rows.append(S.rows[i] & ~((1 << (i + 1)) - 1))
        return cls(m, c & 1, BitVec(m, lin), BitMatrix(m, m, tuple(rows)))

    def eval(self, a: BitVec) -> int:
        if a.n != self.m:
            raise DimensionError("assignment length does not match m")
        val = self.c ^ parity(self.linear.bits & a.bits)
        for i, row in enumerate(self.quad.rows):
            if (a.bits >> i) & 1:
                val ^= parity(row & a.bits)
        return val

    def satisfied_by(self, a: BitVec) -> bool:
        return self.eval(a) == 0

    def variables(self) -> list[int]:
        """Variables with a nonzero coefficient, ascending."""
        used = self.linear.bits
        for i, row in enumerate(self.quad.rows):
            if row:
                used |= row | (1 << i)
        return [i for i in range(self.m) if (used >> i) & 1]

    def quad_terms(self) -> list[tuple[int, int]]:
        out = []
        for i, row in enumerate(self.quad.rows):
            for j in range(i + 1, self.m):
                if (row >> j) & 1:
                    out.append((i, j))
        return out

    def linear_terms(self) -> list[int]:
        return [i for i in range(self.m) if self.linear[i]]

    def to_text(self) -> str:
        lin = " ".join(f"{i + 1}:1" for i in self.linear_terms())
        quad = " ".join(f"{i + 1},{j + 1}:1" for i, j in self.quad_terms())
        return f"{self.c} | {lin} | {quad}".rstrip()


def _check_index(i: int, m: int):
    if not 0 <= i < m:
        raise DimensionError(f"variable index {i} out of range for m={m}")


@dataclass
class QuadraticSystem:
    m: int
    equations: list[QuadEquation] = field(default_factory=list)

    def __post_init__(self):
        for q in self.equations:
            if q.m != self.m:
                raise DimensionError("all equations must share m")

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def append(self, q: QuadEquation):
        if q.m != self.m:
            raise DimensionError("equation has a different variable count")
        self.equations.append(q)

    def satisfied_by(self, a: BitVec) -> bool:
        return all(q.eval(a) == 0 for q in self.equations)

    def linearized(self) -> list[BitMatrix]:
        return [linearize(q) for q in self.equations]

    def to_text(self) -> str:
        lines = [f"p quad {self.m} {len(self.equations)}"]
        lines += [q.to_text() for q in self.equations]
        return "\n".join(lines) + "\n"


def satisfies_superposition(q: QuadEquation, assignments: Sequence[BitVec]) -> bool:
    """c + sum_i c_i (sum_l a_i^l) + sum_{i<j} c_ij (sum_l a_i^l a_j^l) == 0, term by term."""
    for a in assignments:
        if a.n != q.m:
            raise DimensionError("assignment length does not match m")
    total = q.c
    for i in range(q.m):
        if q.linear[i]:
            s = 0
            for a in assignments:
                s ^= a[i]
            total ^= s
    for i, j in q.quad_terms():
        s = 0
        for a in assignments:
            s ^= a[i] & a[j]
        total ^= s
    return total == 0


def odd_covers(q: QuadEquation, assignments: Sequence[BitVec]) -> bool:
    """An odd number of the assignments individually satisfy q(x) = 0."""
    return sum(q.eval(a) == 0 for a in assignments) % 2 == 1


def linearize(q: QuadEquation) -> BitMatrix:
    """(m+1)x(m+1) matrix C with <C, a^ (x) a^> = q(a) where a^ = (1, a)."""
    n = q.m + 1
    rows = [0] * n
    rows[0] = q.c | (q.linear.bits << 1)
    for i, row in enumerate(q.quad.rows):
        rows[i + 1] = row << 1
    return BitMatrix(n, n, tuple(rows))


def decode_low_rank(A: BitMatrix, system: QuadraticSystem | Sequence[QuadEquation]) -> list[BitVec]:
    """Odd list of assignments satisfying every equation in superposition.

    A must be pseudo-quadratic and orthogonal to every linearized equation;
    the assignments are D1 of the pseudo-quadratic decomposition of A.
    """
    eqs = list(system)
    for k, q in enumerate(eqs):
        if q.m + 1 != A.nrows:
            raise DimensionError("matrix side must be m+1")
        if linearize(q).dot(A):
            raise PreconditionError(f"matrix is not in the solution space of equation {k}")
    vs = f2core.decompose_pseudoquadratic(A)
    return [f2core.d1(v) for v in vs]


# brute force (test utility) -------------------------------------------------------


def brute_force_solutions(system: QuadraticSystem, limit: int = 20) -> list[BitVec]:
    if system.m > limit:
        raise PreconditionError(f"brute force limited to {limit} variables")
    m = system.m
    pts = np.arange(1 << m, dtype=np.uint64)
    ok = np.ones(1 << m, dtype=bool)
    for q in system.equations:
        ok &= eval_many(q, pts) == 0
    return [BitVec(m, int(x)) for x in np.nonzero(ok)[0]]


def eval_many(q: QuadEquation, points: np.ndarray) -> np.ndarray:
    """Vectorised evaluation at many packed assignments."""
    pts = points.astype(np.uint64)
    one = np.uint64(1)
    val = np.full(pts.shape, q.c, dtype=np.uint64)
    val ^= np.bitwise_count(pts & np.uint64(q.linear.bits)).astype(np.uint64) & one
    for i, row in enumerate(q.quad.rows):
        if row:
            xi = (pts >> np.uint64(i)) & one
            val ^= xi & (np.bitwise_count(pts & np.uint64(row)).astype(np.uint64) & one)
    return val.astype(np.uint8)


# text format -------------------------------------------------------------------------


def parse_system(text: str, m: int | None = None) -> QuadraticSystem:
    declared = None
    raw: list[tuple[int, list[int], list[tuple[int, int]]]] = []
    max_var = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("p "):
            parts = line.split()
            if len(parts) < 3 or parts[1] != "quad":
                raise ParseError(f"line {lineno}: bad header")
            try:
                declared = int(parts[2])
            except ValueError:
                raise ParseError(f"line {lineno}: bad variable count") from None
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) > 3:
            raise ParseError(f"line {lineno}: too many '|' separated fields")
        fields += [""] * (3 - len(fields))
        try:
            c = int(fields[0])
            lin, quad = [], []
            for tok in fields[1].split():
                idx, coef = tok.split(":")
                if int(coef) & 1:
                    lin.append(int(idx) - 1)
                max_var = max(max_var, int(idx))
            for tok in fields[2].split():
                pair, coef = tok.split(":")
                i, j = (int(v) for v in pair.split(","))
                if int(coef) & 1:
                    quad.append((i - 1, j - 1))
                max_var = max(max_var, i, j)
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse {line!r}") from None
        if c not in (0, 1):
            raise ParseError(f"line {lineno}: constant must be 0 or 1")
        if any(i < 0 for i in lin) or any(min(p) < 0 for p in quad):
            raise ParseError(f"line {lineno}: variable indices are 1-based")
        raw.append((c, lin, quad))
    n = m if m is not None else declared if declared is not None else max_var
    if max_var > n:
        raise ParseError(f"variable {max_var} exceeds declared count {n}")
    return QuadraticSystem(n, [QuadEquation.from_terms(n, c, lin, quad) for c, lin, quad in raw])
