"""Exact Fourier ledger of the 8-query test on micro instances.

For indicator tables f_v folded over H_v, the test's acceptance-into-A
probability Theta = E prod_i f_v(X_i) f_w(Y_i) expands as

    sum over (alpha1, alpha2, beta1, beta2) of
      [A_pi(a1+a2)A_pi^T = A_sigma(b1+b2)A_sigma^T] (-1)^{nu(b1+b2)}
      f_v^(a1)^2 f_v^(a2)^2 f_w^(b1)^2 f_w^(b2)^2 p(a1, a2) p(b1, b2)

with p(a1, a2) = Pr_x[a1^T x = 0 and a2^T x = a2^T e] and nu(b) = b_11.
Terms split into Theta0 (all ranks <= k, nu = 0), Theta1 (all ranks <= k,
nu = 1) and Theta2 (some rank > k).  Two further paths cross-check the sum:
exact enumeration through autocorrelations, and Monte Carlo on the sampler.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import f2core
from .errors import FoldingError, InfeasibleError, PreconditionError
from .f2core import BitMatrix, BitVec
from .hypergraph import EightQueryTest
from .quadsys import QuadEquation
from .vectorlc import corner_extend, equation_variable_labels, equation_variable_lc, matrixize


def micro_instance(seed: int = 0, n_vars: int = 3):
    """Pair equations on a planted assignment; right matrices are 3x3, left 2x2.

    Returns (test, constraints, left labels, right labels, assignment).
    """
    rng = np.random.default_rng(seed)
    sol = [int(b) for b in rng.integers(0, 2, n_vars)]
    constraints = []
    for i in range(n_vars):
        for j in range(i + 1, n_vars):
            while True:
                a, b, q = (int(v) for v in rng.integers(0, 2, 3))
                if a or b or q:
                    break
            c = (a * sol[i] + b * sol[j] + q * sol[i] * sol[j]) % 2
            lin = [k for k, on in ((0, a), (1, b)) if on]
            eq = QuadEquation.from_terms(2, c, lin, [(0, 1)] if q else [])
            constraints.append(([i, j], eq))
    vlc = equation_variable_lc(constraints, n_vars, width=2)
    mlc = matrixize(vlc)
    left, right = equation_variable_labels(vlc, constraints, sol)
    return EightQueryTest(mlc), constraints, left, right, sol


def distribution_triples(test: EightQueryTest) -> list[tuple[Fraction, int, int]]:
    """(probability, edge pi, edge sigma) for the test distribution on (u, v, w)."""
    out = []
    na = len(test.active)
    for u in test.active:
        deg = int(test.inc_count[u])
        inc = test.inc_edges[test.inc_start[u]:test.inc_start[u] + deg]
        for e1 in inc:
            for e2 in inc:
                out.append((Fraction(1, na * deg * deg), int(e1), int(e2)))
    return out


def _int_wht(vals: np.ndarray) -> np.ndarray:
    h = vals.astype(np.int64).copy()
    n = len(h)
    step = 1
    while step < n:
        h = h.reshape(-1, 2, step)
        a, b = h[:, 0, :].copy(), h[:, 1, :].copy()
        h[:, 0, :], h[:, 1, :] = a + b, a - b
        h = h.reshape(n)
        step *= 2
    return h


@dataclass
class SoundnessLedger:
    k: int
    theta0: Fraction
    theta1: Fraction
    theta2: Fraction
    zero_term: Fraction
    mean_f0: Fraction
    term_counts: dict
    theta_enum: Fraction | None = None
    theta_mc: float | None = None
    sigma: float | None = None
    mc_samples: int = 0
    checks: dict = field(default_factory=dict)

    @property
    def theta_total(self) -> Fraction:
        return self.theta0 + self.theta1 + self.theta2

    def as_dict(self) -> dict:
        return {"k": self.k, "theta0": float(self.theta0), "theta1": float(self.theta1),
                "theta2": float(self.theta2), "theta_total": float(self.theta_total),
                "theta_total_exact": str(self.theta_total),
                "zero_term": float(self.zero_term), "mean_f0": float(self.mean_f0),
                "mean_f0_pow8": float(self.mean_f0 ** 8), "term_counts": self.term_counts,
                "theta_enum": None if self.theta_enum is None else str(self.theta_enum),
                "theta_mc": self.theta_mc, "sigma": self.sigma, "mc_samples": self.mc_samples,
                "checks": self.checks}


class ThetaLedger:
    def __init__(self, test: EightQueryTest, k: int = 1):
        self.test = test
        self.n = test.n
        self.N = self.n * self.n
        if self.N > 10:
            raise InfeasibleError(f"matrix space of dimension {self.N} exceeds the ledger limit 10")
        self.k = k
        vlc = test.mlc.vlc
        self.edge_A = [corner_extend(vlc.matrices[int(a)]) for a in vlc.edge_a]
        self.triples = distribution_triples(test)
        self._X = np.arange(1 << self.N, dtype=np.uint64)
        self._syn = [d.syndrome(self._X).astype(np.int64) for d in test.domains]

    # tables ----------------------------------------------------------------------

    def full_tables(self, coset_tables: Sequence) -> list[np.ndarray]:
        """Expand coset indicators to tables over the whole matrix space."""
        out = []
        for v, t in enumerate(coset_tables):
            t = np.asarray(t, dtype=np.int64)
            if len(t) == 1 << self.N:
                full = t
            elif len(t) == self.test.domains[v].n_cosets:
                full = t[self._syn[v]]
            else:
                raise PreconditionError(f"table of vertex {v} has the wrong length")
            if not np.isin(full, (0, 1)).all():
                raise PreconditionError("tables must be 0/1 indicators")
            out.append(full)
        return out

    def _fourier(self, v: int, full: np.ndarray) -> dict[int, int]:
        """Nonzero Fourier coefficients times 2^N, checked to live on the primal subspace."""
        h = _int_wht(full)
        basis = f2core.span_basis(self.test.domains[v].primal)
        supp = {}
        for a in np.nonzero(h)[0]:
            if f2core.reduce_by(int(a), basis):
                raise FoldingError(f"table of vertex {v} is not folded over H_v")
            supp[int(a)] = int(h[a])
        return supp

    # formula path -------------------------------------------------------------------

    def _prob(self, a1: int, a2: int) -> Fraction:
        n = self.n
        A1 = BitMatrix.from_flat(n, a1).T
        A2 = BitMatrix.from_flat(n, a2).T
        e = BitVec(n, 1)
        t2 = A2.apply(e).bits
        hits = sum(1 for x in range(1 << n)
                   if A1.apply(BitVec(n, x)).bits == 0 and A2.apply(BitVec(n, x)).bits == t2)
        return Fraction(hits, 1 << n)

    def formula(self, coset_tables: Sequence) -> SoundnessLedger:
        fulls = self.full_tables(coset_tables)
        F = [self._fourier(v, t) for v, t in enumerate(fulls)]
        scale = Fraction(1, 1 << self.N)
        rank = {}
        prob = {}

        def rk(a):
            if a not in rank:
                rank[a] = BitMatrix.from_flat(self.n, a).rank()
            return rank[a]

        def pr(a1, a2):
            if (a1, a2) not in prob:
                prob[(a1, a2)] = self._prob(a1, a2)
            return prob[(a1, a2)]

        tail = Fraction(1, 1 << (self.k + 1))
        side_cache: dict = {}

        def side(v: int, e: int, shifted: bool):
            key = (v, e, shifted)
            if key in side_cache:
                return side_cache[key]
            A = self.edge_A[e]
            agg: dict = defaultdict(Fraction)
            for a1, c1 in F[v].items():
                for a2, c2 in F[v].items():
                    p = pr(a1, a2)
                    if p == 0:
                        continue
                    low = rk(a1) <= self.k and rk(a2) <= self.k
                    if not low and p > tail:
                        raise AssertionError("rank tail bound violated")
                    s = a1 ^ a2
                    proj = (A @ BitMatrix.from_flat(self.n, s) @ A.T).flat()
                    nu = (s & 1) if shifted else 0
                    w = (c1 * scale) ** 2 * (c2 * scale) ** 2 * p
                    agg[(proj, low, nu)] += w
            side_cache[key] = agg
            return agg

        theta = [Fraction(0)] * 3
        counts = [0, 0, 0]
        zero = Fraction(0)
        mean_f0 = Fraction(0)
        for wgt, e1, e2 in self.triples:
            v = int(self.test.edge_v[e1])
            w = int(self.test.edge_v[e2])
            L = side(v, e1, False)
            R = side(w, e2, True)
            for (pa, lowa, _), xa in L.items():
                for (pb, lowb, nu), xb in R.items():
                    if pa != pb:
                        continue
                    val = wgt * xa * xb
                    cls = 2 if not (lowa and lowb) else nu
                    theta[cls] += -val if nu else val
                    counts[cls] += 1
            f0v = Fraction(F[v].get(0, 0), 1 << self.N)
            f0w = Fraction(F[w].get(0, 0), 1 << self.N)
            zero += wgt * f0v ** 4 * f0w ** 4
            mean_f0 += wgt * f0v
        led = SoundnessLedger(self.k, theta[0], theta[1], theta[2], zero, mean_f0,
                              {"theta0": counts[0], "theta1": counts[1], "theta2": counts[2]})
        led.checks["theta0_ge_zero_term"] = led.theta0 >= zero
        led.checks["zero_term_ge_mean_pow8"] = zero >= mean_f0 ** 8
        led.checks["theta0_ge_mean_pow8"] = led.theta0 >= mean_f0 ** 8
        if not all(led.checks.values()):
            raise AssertionError(f"ledger inequality failed: {led.checks}")
        return led

    # enumeration path ---------------------------------------------------------------

    def enumerate(self, coset_tables: Sequence) -> Fraction:
        """Exact Theta through autocorrelations over every (F, x, y, z, x', y', z')."""
        from .hypergraph import outer_flat

        fulls = self.full_tables(coset_tables)
        n, N = self.n, self.N
        X = self._X
        ac = []
        for t in fulls:
            ac.append(np.array([int((t * t[(X ^ np.uint64(d)).astype(np.int64)]).sum())
                                for d in range(1 << N)], dtype=np.int64))
        vec = np.arange(1 << n, dtype=np.uint64)
        xs, ys = np.meshgrid(vec, vec, indexing="ij")
        outer = outer_flat(xs, ys, n)  # [x, y]
        outer_e = outer_flat(xs ^ np.uint64(1), ys, n)
        nl = self.test.nl
        total = Fraction(0)
        cache: dict = {}
        for wgt, e1, e2 in self.triples:
            v = int(self.test.edge_v[e1])
            w = int(self.test.edge_v[e2])
            a1 = int(self.test.edge_a[e1])
            a2 = int(self.test.edge_a[e2])
            key = (v, w, a1, a2)
            if key not in cache:
                acc = 0
                for Fm in range(1 << (nl * nl)):
                    Fp = self.test.adj[a1, Fm]
                    Fs = self.test.adj[a2, Fm]
                    lhs = self._side_sum(ac[v], outer, outer_e, Fp)
                    rhs = self._side_sum(ac[w], outer, outer_e, Fs ^ np.uint64(1))
                    acc += lhs * rhs
                cache[key] = acc
            total += wgt * cache[key]
        denom = (1 << (nl * nl)) * ((1 << (3 * n)) * (1 << (2 * N))) ** 2
        return total / denom

    @staticmethod
    def _side_sum(ac: np.ndarray, outer, outer_e, shift) -> int:
        D1 = (outer ^ shift).astype(np.int64)
        D2 = (outer_e ^ shift).astype(np.int64)
        s1 = ac[D1].sum(axis=1)  # over y for each x
        s2 = ac[D2].sum(axis=1)  # over z for each x
        return int((s1.astype(object) * s2.astype(object)).sum())

    # Monte Carlo path ---------------------------------------------------------------

    def monte_carlo(self, coset_tables: Sequence, samples: int, seed: int) -> float:
        ind = np.concatenate([np.asarray(t, dtype=bool) for t in coset_tables])
        if len(ind) != int(self.test.offsets[-1] + self.test.domains[-1].n_cosets):
            raise PreconditionError("Monte Carlo needs coset-indexed tables")
        edges = self.test.sample_chunked(seed, samples)
        return float(ind[edges].all(axis=1).mean())

    def run(self, coset_tables: Sequence, samples: int = 0, seed: int = 0,
            enumerate_exact: bool = True) -> SoundnessLedger:
        led = self.formula(coset_tables)
        if enumerate_exact:
            led.theta_enum = self.enumerate(coset_tables)
            led.checks["formula_eq_enumeration"] = led.theta_enum == led.theta_total
        if samples:
            th = float(led.theta_total)
            led.theta_mc = self.monte_carlo(coset_tables, samples, seed)
            led.sigma = (th * (1 - th) / samples) ** 0.5
            led.mc_samples = samples
            led.checks["mc_within_4sigma"] = abs(th - led.theta_mc) <= 4 * led.sigma
        return led


def random_indicator_tables(test: EightQueryTest, rng: np.random.Generator,
                            density: float = 0.6) -> list[np.ndarray]:
    return [(rng.random(d.n_cosets) < density).astype(np.uint8) for d in test.domains]


def theta_ledger(test: EightQueryTest, tables: Sequence, k: int = 1, samples: int = 0,
                 seed: int = 0) -> SoundnessLedger:
    return ThetaLedger(test, k).run(tables, samples, seed)
