"""Arithmetic in GF(2^e) and univariate/bivariate/multivariate polynomials over it.

Field elements are ints below 2^e: bit k is the coefficient of alpha^k in
the polynomial basis, reduced modulo a fixed polynomial per e (see
``REDUCTION_POLYS``).  Canonical enumeration of the field is 0, 1, 2, ...,
i.e. 0, 1, alpha, alpha + 1, ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

REDUCTION_POLYS = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11D,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443,
    15: 0x8003, 16: 0x1100B,
}


def clmul_mod(a: int, b: int, poly: int, e: int) -> int:
    """Schoolbook carry-less product reduced modulo ``poly``."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if (a >> e) & 1:
            a ^= poly
    return out


class GF:
    def __init__(self, e: int):
        if e not in REDUCTION_POLYS:
            raise PreconditionError(f"extension degree {e} outside 1..16")
        self.e = e
        self.q = 1 << e
        self.poly = REDUCTION_POLYS[e]
        q = self.q
        # log/antilog tables from a generator of the multiplicative group
        gen = next(g for g in range(2 if q > 2 else 1, q) if self._order(g) == q - 1)
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = clmul_mod(x, gen, self.poly, e)
        exp[q - 1:2 * (q - 1)] = exp[:q - 1]
        self.generator = gen
        self.exp = exp
        self.log = log

    def _order(self, g: int) -> int:
        x, k = g, 1
        while x != 1:
            x = clmul_mod(x, g, self.poly, self.e)
            k += 1
            if k > self.q:
                return 0
        return k

    def __repr__(self):
        return f"GF(2^{self.e})"

    def __eq__(self, other):
        return isinstance(other, GF) and other.e == self.e

    def __hash__(self):
        return hash(self.e)

    def elements(self) -> range:
        return range(self.q)

    @staticmethod
    def add(a, b):
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^e)")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(self.log[a] * n) % (self.q - 1)])

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, r)

    def pow_arr(self, a, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        r = self.exp[(self.log[a] * n) % (self.q - 1)]
        return np.where(a == 0, 0, r)

    def bits(self, a: int) -> list[int]:
        return [(a >> k) & 1 for k in range(self.e)]

    def mul_matrix(self, c: int) -> list[int]:
        """Rows of the GF(2) matrix of x -> c x; row k has bit p set when bit k of c alpha^p is 1."""
        rows = [0] * self.e
        for p in range(self.e):
            img = self.mul(c, 1 << p)
            for k in range(self.e):
                if (img >> k) & 1:
                    rows[k] |= 1 << p
        return rows


# univariate polynomials: coefficient arrays, index = power --------------------------


def upoly_eval(gf: GF, coeffs: Sequence[int], t: int) -> int:
    acc = 0
    for c in reversed(list(coeffs)):
        acc = gf.mul(acc, t) ^ int(c)
    return acc


def upoly_eval_arr(gf: GF, coeffs: Sequence[int], ts) -> np.ndarray:
    ts = np.asarray(ts, dtype=np.int64)
    acc = np.zeros_like(ts)
    for c in reversed(list(coeffs)):
        acc = gf.mul_arr(acc, ts) ^ int(c)
    return acc


def upoly_mul(gf: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] ^= gf.mul(x, y)
    return out


def lagrange_basis(gf: GF, nodes: Sequence[int]) -> list[list[int]]:
    """Coefficient lists of the Lagrange basis polynomials for distinct nodes."""
    nodes = [int(n) for n in nodes]
    if len(set(nodes)) != len(nodes):
        raise PreconditionError("interpolation nodes must be distinct")
    out = []
    for i, ti in enumerate(nodes):
        num = [1]
        den = 1
        for k, tk in enumerate(nodes):
            if k == i:
                continue
            num = upoly_mul(gf, num, [tk, 1])  # (t - tk) = (t + tk)
            den = gf.mul(den, ti ^ tk)
        inv = gf.inv(den)
        out.append([gf.mul(c, inv) for c in num])
    return out


# bivariate polynomials: 2-D int arrays, [a, b] = coefficient of t^a s^b ---------------


def bpoly_mul(gf: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros((A.shape[0] + B.shape[0] - 1, A.shape[1] + B.shape[1] - 1), dtype=np.int64)
    for (i, j), c in np.ndenumerate(A):
        if c:
            out[i:i + B.shape[0], j:j + B.shape[1]] ^= gf.mul_arr(c, B)
    return out


def bpoly_add(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros((max(A.shape[0], B.shape[0]), max(A.shape[1], B.shape[1])), dtype=np.int64)
    out[:A.shape[0], :A.shape[1]] ^= A
    out[:B.shape[0], :B.shape[1]] ^= B
    return out


def bpoly_eval(gf: GF, A: np.ndarray, t, s) -> np.ndarray:
    """Evaluate at arrays of (t, s) pairs."""
    t = np.asarray(t, dtype=np.int64)
    s = np.asarray(s, dtype=np.int64)
    acc = np.zeros(np.broadcast(t, s).shape, dtype=np.int64)
    for a in range(A.shape[0] - 1, -1, -1):
        inner = np.zeros_like(acc)
        for b in range(A.shape[1] - 1, -1, -1):
            inner = gf.mul_arr(inner, s) ^ int(A[a, b])
        acc = gf.mul_arr(acc, t) ^ inner
    return acc


def bpoly_degrees(A: np.ndarray) -> tuple[int, int, int]:
    """(degree in t, degree in s, total degree); -1 entries for the zero polynomial."""
    nz = np.argwhere(A != 0)
    if len(nz) == 0:
        return -1, -1, -1
    return int(nz[:, 0].max()), int(nz[:, 1].max()), int((nz[:, 0] + nz[:, 1]).max())


# multivariate polynomials --------------------------------------------------------------


@dataclass
class MPoly:
    """Sparse polynomial over GF(2^e): exponent tuple -> nonzero coefficient."""

    gf: GF
    m: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {tuple(k): int(c) for k, c in self.terms.items() if c}
        for k in self.terms:
            if len(k) != self.m:
                raise DimensionError("exponent tuple length must equal m")

    @classmethod
    def constant(cls, gf: GF, m: int, c: int) -> MPoly:
        return cls(gf, m, {(0,) * m: c})

    @classmethod
    def variable(cls, gf: GF, m: int, j: int) -> MPoly:
        k = [0] * m
        k[j] = 1
        return cls(gf, m, {tuple(k): 1})

    def total_degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: MPoly) -> MPoly:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) ^ c
        return MPoly(self.gf, self.m, out)

    def __mul__(self, other: MPoly) -> MPoly:
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) ^ self.gf.mul(c1, c2)
        return MPoly(self.gf, self.m, out)

    def scale(self, c: int) -> MPoly:
        return MPoly(self.gf, self.m, {k: self.gf.mul(v, c) for k, v in self.terms.items()})

    def eval(self, point: Sequence[int]) -> int:
        acc = 0
        for k, c in self.terms.items():
            v = c
            for x, n in zip(point, k):
                if n:
                    v = self.gf.mul(v, self.gf.pow(int(x), n))
            acc ^= v
        return acc

    def eval_arr(self, points: np.ndarray) -> np.ndarray:
        """points: (N, m) int array."""
        points = np.asarray(points, dtype=np.int64)
        acc = np.zeros(len(points), dtype=np.int64)
        for k, c in self.terms.items():
            v = np.full(len(points), c, dtype=np.int64)
            for j, n in enumerate(k):
                if n:
                    v = self.gf.mul_arr(v, self.gf.pow_arr(points[:, j], n))
            acc ^= v
        return acc


def random_mpoly(gf: GF, m: int, d: int, rng: np.random.Generator) -> MPoly:
    """Uniformly random polynomial of total degree at most d."""
    terms = {}
    for k in _exponents(m, d):
        terms[k] = int(rng.integers(0, gf.q))
    return MPoly(gf, m, terms)


def _exponents(m: int, d: int):
    if m == 0:
        yield ()
        return
    for a in range(d + 1):
        for rest in _exponents(m - 1, d - a):
            yield (a,) + rest
