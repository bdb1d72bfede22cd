"""Curves, ruled surfaces and the point-vs-surface Label-Cover over GF(2^e).

A ruled surface is R(t, s) = omega(t) + s*y for a curve omega of degree <= l.
Labels on surfaces are bivariate coefficient grids of shape (l*d + 1, d + 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InfeasibleError, PreconditionError
from .f2core import BitMatrix, BitVec
from .gf import (GF, MPoly, bpoly_add, bpoly_degrees, bpoly_eval, bpoly_mul,
                 lagrange_basis, upoly_eval_arr)
from .quadsys import QuadEquation, QuadraticSystem


# curves and surfaces ---------------------------------------------------------------


@dataclass(frozen=True)
class Curve:
    gf: GF
    coeffs: np.ndarray  # (m, l+1); row j holds omega_j, index = power of t

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree_bound(self) -> int:
        return self.coeffs.shape[1] - 1

    def eval(self, t: int) -> np.ndarray:
        return self.eval_arr(np.array([t]))[0]

    def eval_arr(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.int64)
        return np.stack([upoly_eval_arr(self.gf, row, ts) for row in self.coeffs], axis=-1)


def interpolate_curve(gf: GF, points, t_values: Sequence[int]) -> Curve:
    """Curve of degree <= l with omega(t_values[i]) = points[i] (Lagrange per coordinate)."""
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[0] != len(t_values):
        raise DimensionError("need one point per t-value")
    if len(t_values) > gf.q:
        raise PreconditionError("more interpolation nodes than field elements")
    basis = lagrange_basis(gf, t_values)
    k = len(t_values)
    coeffs = np.zeros((pts.shape[1], k), dtype=np.int64)
    for i, L in enumerate(basis):
        L = np.asarray(L + [0] * (k - len(L)), dtype=np.int64)
        for j in range(pts.shape[1]):
            coeffs[j] ^= gf.mul_arr(int(pts[i, j]), L)
    return Curve(gf, coeffs)


@dataclass(frozen=True)
class RuledSurface:
    omega: Curve
    y: np.ndarray

    @property
    def gf(self) -> GF:
        return self.omega.gf

    def eval(self, t: int, s: int) -> np.ndarray:
        return self.eval_arr(np.array([t]), np.array([s]))[0]

    def eval_arr(self, t, s) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        s = np.asarray(s, dtype=np.int64)
        base = self.omega.eval_arr(t)
        return base ^ self.gf.mul_arr(s[..., None], self.y[None, :])

    def coordinate_forms(self) -> list[np.ndarray]:
        """Bivariate grids of omega_j(t) + s*y_j."""
        out = []
        for j in range(self.omega.m):
            A = np.zeros((self.omega.coeffs.shape[1], 2), dtype=np.int64)
            A[:, 0] = self.omega.coeffs[j]
            A[0, 1] = self.y[j]
            out.append(A)
        return out


@dataclass(frozen=True)
class SurfaceLabel:
    gf: GF
    grid: np.ndarray  # (l*d + 1, d + 1)

    @property
    def d(self) -> int:
        return self.grid.shape[1] - 1

    def eval(self, t, s) -> np.ndarray:
        return bpoly_eval(self.gf, self.grid, t, s)

    def is_zero(self) -> bool:
        return not self.grid.any()

    def total_degree(self) -> int:
        return bpoly_degrees(self.grid)[2]


def restrict_to_surface(g: MPoly, R: RuledSurface, d: int, l: int | None = None) -> SurfaceLabel:
    """Bivariate polynomial g(omega(t) + s*y) on the (l*d+1) x (d+1) grid."""
    if g.total_degree() > d:
        raise PreconditionError(f"polynomial degree {g.total_degree()} exceeds d={d}")
    if g.m != R.omega.m:
        raise DimensionError("polynomial and surface dimensions differ")
    gf = g.gf
    l = R.omega.degree_bound if l is None else l
    forms = R.coordinate_forms()
    powers: dict[tuple[int, int], np.ndarray] = {}

    def power(j: int, n: int) -> np.ndarray:
        if n == 0:
            return np.ones((1, 1), dtype=np.int64)
        if (j, n) not in powers:
            powers[(j, n)] = bpoly_mul(gf, power(j, n - 1), forms[j])
        return powers[(j, n)]

    acc = np.zeros((l * d + 1, d + 1), dtype=np.int64)
    for expo, c in g.terms.items():
        term = np.array([[c]], dtype=np.int64)
        for j, n in enumerate(expo):
            if n:
                term = bpoly_mul(gf, term, power(j, n))
        acc = bpoly_add(acc, term)
    if acc.shape != (l * d + 1, d + 1):
        extra = acc[l * d + 1:, :].any() or acc[:, d + 1:].any()
        if extra:
            raise PreconditionError("restriction exceeds the label degree bounds")
        acc = acc[:l * d + 1, :d + 1]
    return SurfaceLabel(gf, acc)


def compose_eval(g: MPoly, R: RuledSurface, t, s) -> np.ndarray:
    """g(R(t, s)) evaluated pointwise, without expanding the restriction."""
    pts = R.eval_arr(t, s)
    return g.eval_arr(pts.reshape(-1, g.m)).reshape(np.shape(t))


# global low-degree extension ---------------------------------------------------------


def variable_point(index: int, m: int, h: int) -> tuple[int, ...]:
    """Variable index -> point of S^m with S = first h field elements (base-h digits)."""
    if not 0 <= index < h ** m:
        raise PreconditionError(f"variable {index} does not fit in S^m with h={h}, m={m}")
    return tuple((index // h ** j) % h for j in range(m))


def global_extension(gf: GF, values: dict[tuple[int, ...], int] | Sequence[int], m: int, h: int) -> MPoly:
    """Tensor-product Lagrange extension of sigma: S^m -> F_q, degree <= h-1 per coordinate.

    ``values`` is either a dict point -> value or a sequence indexed by variable.
    Unlisted points of S^m take the value 0.
    """
    if h > gf.q:
        raise PreconditionError("h exceeds the field size")
    if not isinstance(values, dict):
        values = {variable_point(i, m, h): int(v) for i, v in enumerate(values)}
    basis = lagrange_basis(gf, list(range(h)))
    out = MPoly(gf, m, {})
    for pt, val in values.items():
        if not val:
            continue
        terms = {(0,) * m: val}
        for j, a in enumerate(pt):
            L = basis[a]
            nxt: dict = {}
            for expo, c in terms.items():
                for p, lc in enumerate(L):
                    if lc:
                        k = list(expo)
                        k[j] = p
                        k = tuple(k)
                        nxt[k] = nxt.get(k, 0) ^ gf.mul(c, lc)
            terms = nxt
        out = out + MPoly(gf, m, terms)
    return out


# quadratic systems over GF(2^e) ------------------------------------------------------


@dataclass(frozen=True)
class FqQuadEquation:
    """c + sum a_i x_i + sum_{i<j} b_ij x_i x_j = 0 over GF(2^e)."""

    gf: GF
    n: int
    c: int
    linear: tuple = ()  # ((i, a_i), ...)
    quad: tuple = ()  # (((i, j), b_ij), ...) with i < j

    def variables(self) -> list[int]:
        vs = {i for i, _ in self.linear}
        for (i, j), _ in self.quad:
            vs.update((i, j))
        return sorted(vs)

    def eval(self, x: Sequence[int]) -> int:
        gf = self.gf
        acc = self.c
        for i, a in self.linear:
            acc ^= gf.mul(a, int(x[i]))
        for (i, j), b in self.quad:
            acc ^= gf.mul(b, gf.mul(int(x[i]), int(x[j])))
        return acc

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return self.eval(x) == 0


@dataclass
class FqQuadraticSystem:
    gf: GF
    n: int
    equations: list[FqQuadEquation] = field(default_factory=list)

    def __len__(self):
        return len(self.equations)

    def satisfied_by(self, x: Sequence[int]) -> bool:
        return all(q.satisfied_by(x) for q in self.equations)


def lift_f2_system_to_gfq(system: QuadraticSystem, e: int) -> FqQuadraticSystem:
    """Embed coefficients through GF(2) inside GF(2^e); solutions over GF(2) persist."""
    gf = GF(e)
    eqs = []
    for q in system.equations:
        eqs.append(FqQuadEquation(gf, system.m, q.c,
                                  tuple((i, 1) for i in q.linear_terms()),
                                  tuple(((i, j), 1) for i, j in q.quad_terms())))
    return FqQuadraticSystem(gf, system.m, eqs)


# point-vs-surface Label-Cover ---------------------------------------------------------


@dataclass
class SurfaceLabelCover:
    system: FqQuadraticSystem
    m: int
    h: int
    d: int
    l: int
    t_star: tuple
    surfaces: list  # RuledSurface per right vertex
    surface_constraint: list  # constraint index per right vertex
    slot_vars: list  # per right vertex: l variable ids, negative ids mark filler slots
    points: np.ndarray  # (n_left, m) left vertices
    edge_v: np.ndarray
    edge_u: np.ndarray
    edge_t: np.ndarray
    edge_s: np.ndarray

    @property
    def gf(self) -> GF:
        return self.system.gf

    @property
    def dstar(self) -> int:
        return self.l * self.d

    @property
    def n_left(self) -> int:
        return len(self.points)

    @property
    def n_right(self) -> int:
        return len(self.surfaces)

    @property
    def n_edges(self) -> int:
        return len(self.edge_v)

    def regime_report(self) -> dict:
        q = self.gf.q
        return {"q": q, "required_q": 100 * self.d ** 3 * self.m,
                "asymptotic_regime": q > 100 * self.d ** 3 * self.m,
                "smoothness_bound": self.dstar / q}

    def slot_values(self, v: int, label: SurfaceLabel) -> list[int]:
        return [int(x) for x in label.eval(np.array(self.t_star[1:]), np.zeros(self.l, dtype=np.int64))]

    def valid(self, v: int, label: SurfaceLabel) -> bool:
        """Label values at (t_i*, 0) satisfy the surface's constraint."""
        eq = self.system.equations[self.surface_constraint[v]]
        vals = self.slot_values(v, label)
        x = {}
        for var, val in zip(self.slot_vars[v], vals):
            x[var] = val
        full = [x.get(i, 0) for i in range(self.system.n)]
        return eq.satisfied_by(full)

    def check_labeling(self, labels: Sequence[SurfaceLabel], point_values) -> tuple[np.ndarray, np.ndarray]:
        """(edge_ok per edge, valid per right vertex)."""
        point_values = np.asarray(point_values, dtype=np.int64)
        ok = np.zeros(self.n_edges, dtype=bool)
        for v in range(self.n_right):
            idx = np.nonzero(self.edge_v == v)[0]
            vals = labels[v].eval(self.edge_t[idx], self.edge_s[idx])
            ok[idx] = vals == point_values[self.edge_u[idx]]
        valid = np.array([self.valid(v, labels[v]) for v in range(self.n_right)], dtype=bool)
        return ok, valid

    def completeness_labeling(self, sigma: Sequence[int]) -> tuple[list[SurfaceLabel], np.ndarray, MPoly]:
        """Labels from the global extension of a satisfying assignment."""
        if self.m * (self.h - 1) > self.d:
            raise PreconditionError(f"extension degree m(h-1)={self.m * (self.h - 1)} exceeds d={self.d}")
        g = global_extension(self.gf, list(sigma), self.m, self.h)
        labels = [restrict_to_surface(g, R, self.d, self.l) for R in self.surfaces]
        return labels, g.eval_arr(self.points), g


def build_surface_label_cover(system: FqQuadraticSystem, m: int, h: int, d: int,
                              surfaces: int = 1, seed: int = 0, l: int = 5) -> SurfaceLabelCover:
    gf = system.gf
    q = gf.q
    if h ** m < system.n:
        raise PreconditionError(f"h^m = {h ** m} is smaller than the variable count {system.n}")
    if h > q:
        raise PreconditionError("h must not exceed q")
    if q <= l:
        raise PreconditionError(f"need q > l (q={q}, l={l}); raise e")
    t_star = tuple(range(l + 1))
    surf, cons, slots = [], [], []
    for ci, eq in enumerate(system.equations):
        vs = eq.variables()
        if len(vs) > l:
            raise PreconditionError(f"constraint {ci} has arity {len(vs)} > l={l}")
        real = [variable_point(i, m, h) for i in vs]
        # short constraints are padded with the first points of F_q^m not already used
        filler = (p for p in _field_points(q, m) if p not in real)
        pad = [next(filler) for _ in range(l - len(vs))]
        padded = vs + [-1 - k for k in range(len(pad))]
        pts = np.array(real + pad, dtype=np.int64).reshape(l, m)
        rng = np.random.default_rng([seed, ci])
        for _ in range(surfaces):
            x = rng.integers(0, q, m)
            y = rng.integers(0, q, m)
            omega = interpolate_curve(gf, np.vstack([x[None, :], pts]), t_star)
            surf.append(RuledSurface(omega, y))
            cons.append(ci)
            slots.append(tuple(padded))
    if not surf:
        raise InfeasibleError("system has no constraints")
    T, S = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    T, S = T.ravel(), S.ravel()
    codes, ev, et, es = [], [], [], []
    weights = q ** np.arange(m, dtype=np.int64)
    for v, R in enumerate(surf):
        P = R.eval_arr(T, S)
        codes.append(P @ weights)
        ev.append(np.full(q * q, v))
        et.append(T)
        es.append(S)
    codes = np.concatenate(codes)
    uniq, inv = np.unique(codes, return_inverse=True)
    points = (uniq[:, None] // weights[None, :]) % q
    return SurfaceLabelCover(system, m, h, d, l, t_star, surf, cons, slots, points,
                             np.concatenate(ev), inv.astype(np.int64),
                             np.concatenate(et), np.concatenate(es))


def _field_points(q: int, m: int):
    for code in range(q ** m):
        yield tuple((code // q ** j) % q for j in range(m))


def smoothness_estimate(slc: SurfaceLabelCover, samples: int, rng: np.random.Generator,
                        labels: Sequence[SurfaceLabel] | None = None, n_labels: int = 100) -> dict:
    """Monte Carlo zero-rate of nonzero labels at uniform points of their surface.

    Without ``labels``, ``n_labels`` random nonzero polynomials of degree <= d are
    restricted to random surfaces of the instance; ``samples`` points are spread
    evenly over them.
    """
    from .gf import random_mpoly

    gf = slc.gf
    if labels is None:
        labels = []
        while len(labels) < n_labels:
            v = int(rng.integers(0, slc.n_right))
            lab = restrict_to_surface(random_mpoly(gf, slc.m, slc.d, rng), slc.surfaces[v], slc.d, slc.l)
            if not lab.is_zero():
                labels.append(lab)
    labels = [lab for lab in labels if not lab.is_zero()]
    if not labels:
        raise PreconditionError("smoothness needs at least one nonzero label")
    per = -(-samples // len(labels))
    zeros = total = 0
    for lab in labels:
        k = min(per, samples - total)
        if k <= 0:
            break
        t = rng.integers(0, gf.q, k)
        s = rng.integers(0, gf.q, k)
        zeros += int((lab.eval(t, s) == 0).sum())
        total += k
    rate = zeros / total
    sigma = (rate * (1 - rate) / total) ** 0.5
    bound = slc.dstar / gf.q
    return {"samples": total, "labels": len(labels), "zero_rate": rate, "sigma": sigma,
            "bound": bound, "ok": rate <= bound + 3 * sigma}


# F_q -> GF(2) translation ------------------------------------------------------------


def _form_of_products(gf: GF, coef: int, Li: list[BitVec], Lj: list[BitVec], nbits: int) -> list[BitMatrix]:
    """GF(2) form matrices for bits of coef * V_i * V_j, where bit p of V_i is Li[p]."""
    e = gf.e
    out = []
    T = [[gf.mul(coef, gf.mul(1 << p, 1 << r)) for r in range(e)] for p in range(e)]
    for k in range(e):
        rows = [0] * nbits
        for p in range(e):
            for r in range(e):
                if (T[p][r] >> k) & 1:
                    a, b = Li[p].bits, Lj[r].bits
                    i = 0
                    while a:
                        if a & 1:
                            rows[i] ^= b
                        a >>= 1
                        i += 1
        out.append(BitMatrix(nbits, nbits, tuple(rows)))
    return out


def fq_equation_to_f2(eq: FqQuadEquation, forms: dict[int, list[BitVec]], nbits: int) -> list[QuadEquation]:
    """Expand an F_q quadratic equation into e GF(2) equations.

    ``forms[i][p]`` is the GF(2) linear form giving bit p of variable i.
    """
    gf = eq.gf
    e = gf.e
    const = [(eq.c >> k) & 1 for k in range(e)]
    lin = [0] * e
    mats = [BitMatrix.zeros(nbits, nbits) for _ in range(e)]
    for i, a in eq.linear:
        for p in range(e):
            img = gf.mul(a, 1 << p)
            for k in range(e):
                if (img >> k) & 1:
                    lin[k] ^= forms[i][p].bits
    for (i, j), b in eq.quad:
        for k, M in enumerate(_form_of_products(gf, b, forms[i], forms[j], nbits)):
            mats[k] = mats[k] + M
    return [QuadEquation.from_form(const[k], BitVec(nbits, lin[k]), mats[k]) for k in range(e)]
