"""Acceptance criteria as callables shared by the test suite and ``forge selftest``.

Each ``criterion_N`` returns an :class:`Outcome`; ``run_all`` runs them in order.
"""

from __future__ import annotations

import contextlib
import io
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import boolepoly as bp
from . import f2core
from .cnf import parse_dimacs
from .f2core import BitMatrix, BitVec
from .quadsys import QuadEquation, odd_covers, satisfies_superposition


@dataclass
class Outcome:
    number: int
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"criterion {self.number:2d}: {'PASS' if self.ok else 'FAIL'} ({self.seconds:.2f}s) {self.detail}"


def _timed(number: int, limit: float | None = None):
    def wrap(fn):
        def run(**kw) -> Outcome:
            t0 = time.perf_counter()
            ok, detail = fn(**kw)
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                ok = False
                detail += f"; exceeded the {limit:g}s budget"
            return Outcome(number, bool(ok), detail, dt)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# micro formulas shared by several criteria
MICRO_CNFS = [
    "p cnf 3 2\n1 2 3 0\n-1 -2 3 0\n",
    "p cnf 4 3\n1 2 3 0\n-1 2 4 0\n-2 -3 -4 0\n",
    "p cnf 3 3\n1 -2 3 0\n-1 2 3 0\n1 2 -3 0\n",
    "p cnf 4 2\n1 2 4 0\n-3 -4 1 0\n",
    "p cnf 2 2\n1 2 0\n-1 2 0\n",
    "p cnf 4 4\n1 2 3 0\n-1 -2 -3 0\n2 3 4 0\n-2 -3 -4 0\n",
]


def _random_equation(rng, m: int) -> QuadEquation:
    lin = [i for i in range(m) if rng.random() < 0.5]
    quad = [(i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < 0.3]
    return QuadEquation.from_terms(m, int(rng.integers(0, 2)), lin, quad)


@_timed(1, limit=5.0)
def criterion_1(trials: int = 10_000, seed: int = 1):
    """Odd-covering agrees with superposition for odd t."""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        m = int(rng.integers(1, 17))
        t = int(rng.choice([1, 3, 5, 7, 9]))
        q = _random_equation(rng, m)
        assigns = [BitVec(m, int(rng.integers(0, 1 << m))) for _ in range(t)]
        bad += satisfies_superposition(q, assigns) != odd_covers(q, assigns)
    return bad == 0, f"{trials} trials, {bad} disagreements"


def random_symmetric(rng, n: int) -> BitMatrix:
    rows = [0] * n
    for i in range(n):
        for j in range(i, n):
            if rng.random() < 0.5:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return BitMatrix(n, n, tuple(rows))


def random_pseudoquadratic(rng, n: int) -> BitMatrix:
    S = random_symmetric(rng, n)
    rows = list(S.rows)
    rows[0] = 1
    for i in range(1, n):
        rows[i] &= ~1
    for i in range(1, n):
        if (rows[i] >> i) & 1:
            rows[0] |= 1 << i
            rows[i] |= 1
    return BitMatrix(n, n, tuple(rows))


@_timed(2, limit=30.0)
def criterion_2(trials: int = 1000, seed: int = 2):
    """Symmetric and pseudo-quadratic decompositions."""
    rng = np.random.default_rng(seed)
    fails = []
    for _ in range(trials):
        n = int(rng.integers(1, 65))
        A = random_symmetric(rng, n)
        vs = f2core.decompose_symmetric(A)
        k = A.rank()
        if f2core.sum_of_squares(vs, n) != A or len(vs) > (3 * k) // 2:
            fails.append(("sym", n))
        elif not all(f2core.column_space_contains(A, v) for v in vs):
            fails.append(("sym-col", n))
    for _ in range(trials):
        n = int(rng.integers(1, 65))
        A = random_pseudoquadratic(rng, n)
        if not f2core.is_pseudoquadratic(A):
            fails.append(("gen", n))
            continue
        vs = f2core.decompose_pseudoquadratic(A)
        k = A.rank()
        k0 = len(vs)
        if f2core.sum_of_squares(vs, n) != A or k0 % 2 == 0 or not 2 * k0 < 3 * k + 2:
            fails.append(("pq", n))
        elif not all(v[0] == 1 for v in vs):
            fails.append(("pq-lead", n))
        elif n > 1 and not all(f2core.column_space_contains(f2core.d1(A), f2core.d1(v)) for v in vs):
            fails.append(("pq-col", n))
    return not fails, f"{2 * trials} matrices, failures {fails[:5]}"


def span_evals(space: bp.PolySpace) -> set[int]:
    out = {0}
    for b in space.basis_evals:
        out |= {x ^ b for x in out}
    return out


@_timed(3, limit=10.0)
def criterion_3():
    """P(m,d)^perp = P(m, m-d-1), exhaustively."""
    bad = []
    count = 0
    for m in range(1, 5):
        for d in range(m):
            brute = bp.brute_force_dual(bp.poly_space(m, d))
            claim = span_evals(bp.dual_space(m, d))
            count += 1
            if brute != claim:
                bad.append((m, d))
    return not bad, f"{count} (m,d) pairs, mismatches {bad}"


def _char_value(beta: bp.BooleanPoly, f_eval: int) -> int:
    return -1 if f2core.parity(beta.evals & f_eval) else 1


@_timed(4, limit=60.0)
def criterion_4(seed: int = 4):
    """Character orthonormality, Parseval and round trip with exact rationals."""
    rng = np.random.default_rng(seed)
    problems = []
    for m, d in [(2, 1), (3, 1), (3, 2)]:
        sp = bp.poly_space(m, d)
        cs = bp.CharacterSet(m, d)
        reps = cs.all_reps()
        evals = [sp.from_vector(c).evals for c in range(sp.size)]
        chars = [[_char_value(r.beta, ev) for ev in evals] for r in reps]
        for s, r in enumerate(reps):
            if sp.syndrome(r.beta) != s:
                problems.append(("syndrome", m, d, s))
        for i in range(len(reps)):
            for j in range(len(reps)):
                ip = Fraction(sum(a * b for a, b in zip(chars[i], chars[j])), sp.size)
                if ip != (1 if i == j else 0):
                    problems.append(("ortho", m, d, i, j))
        for _ in range(3):
            vals = [Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))) for _ in range(sp.size)]
            ft = bp.fourier_expand(sp, vals, exact=True)
            co = ft.coefficients
            if sum(c * c for c in co) != sum(v * v for v in vals) / sp.size:
                problems.append(("parseval", m, d))
            # round trip through explicit character values, independent of the transform
            back = [sum(co[s] * chars[s][f] for s in range(len(reps))) for f in range(sp.size)]
            if back != vals or ft.reconstruct() != vals:
                problems.append(("roundtrip", m, d))
            # each coefficient equals E_f A(f) chi_beta(f)
            direct = [Fraction(sum(v * c for v, c in zip(vals, chars[s])), sp.size) for s in range(len(reps))]
            if direct != list(co):
                problems.append(("coeff", m, d))
    return not problems, f"(m,d) in (2,1),(3,1),(3,2); problems {problems[:5]}"


@_timed(5)
def criterion_5(seed: int = 5):
    """Folding: odd-weight support when folded over constant; support vanishing over J."""
    problems = []
    # folded over constant at (2,1): every +-1 assignment of the cells
    sp = bp.poly_space(2, 1)
    fold = bp.Folding(sp, (), over_constant=True)
    cs = bp.CharacterSet(2, 1)
    n_tables = 0
    for bits in range(1 << fold.n_cells):
        vals = [Fraction(-1 if (bits >> i) & 1 else 1) for i in range(fold.n_cells)]
        ft = bp.FourierTable(sp, fold.expand(vals, exact=True), exact=True)
        n_tables += 1
        for s in ft.support():
            if cs.rep(s).beta.weight() % 2 != 1:
                problems.append(("odd", bits, s))
    # folded over J = (q) at (3,3) with a cubic q, plus an extra check at (4,4)
    rng = np.random.default_rng(seed)
    checked = 0
    for m, d in [(3, 3), (4, 4)]:
        sp = bp.poly_space(m, d)
        q = bp.BooleanPoly.from_monomials(m, [0b111])
        fold = bp.Folding(sp, bp.ideal_generators(sp, [q]), over_constant=False)
        cs = bp.CharacterSet(m, d)
        for _ in range(4):
            vals = rng.choice([-1.0, 1.0], size=fold.n_cells)
            ft = bp.FourierTable(sp, fold.expand(vals))
            for s in ft.support(tol=1e-9):
                beta = cs.rep(s).beta
                if beta.weight() < 2 ** (d - 3) and any(q.evals >> x & 1 for x in beta.support()):
                    problems.append(("vanish", m, d, s))
            checked += 1
    return not problems, f"{n_tables} constant-folded tables, {checked} J-folded tables; problems {problems[:5]}"


@_timed(6)
def criterion_6(seed: int = 6):
    """B_{d,k} codimension at (3,2,1) and the sign-matrix identities."""
    problems = []
    n = 0
    for ev in range(1 << 8):
        beta = bp.BooleanPoly.from_evals(3, ev)
        dist, _ = bp.coset_min_weight(beta, 3 - 2 - 1)
        if dist > 0:
            n += 1
            if bp.b_codim(beta, 2, 1) < 1:
                problems.append(("codim", ev))
    # identities at (m,d) = (5,4) with codimension w <= 10 and t <= 4
    rng = np.random.default_rng(seed)
    ws = set()
    half = bp.poly_space(5, 2)
    for weight in range(0, 11):
        pts = rng.choice(32, size=weight, replace=False)
        beta = bp.BooleanPoly.from_evals(5, int(sum(1 << int(p) for p in pts)))
        for t in range(0, 5):
            A = [rng.integers(0, 2, half.size) for _ in range(t)]
            rep = bp.verify_bias_identities(5, 4, beta, t, A, samples=2000, rng=rng)
            if rep.w > 10:
                continue
            ws.add(rep.w)
            if not (rep.W_ok and rep.H_ok):
                problems.append(("identity", weight, t))
    return not problems, f"{n} betas at positive distance; identities for w in {sorted(ws)}; problems {problems[:5]}"


@_timed(7, limit=60.0)
def criterion_7():
    """TSA completeness by full enumeration."""
    from .labelcover import build_label_cover, perfect_labeling
    from .tsa import PipelineParams, TsaInstance, tsa_accept_rate

    rates = []
    for text in MICRO_CNFS[:5]:
        phi = parse_dimacs(text)
        lc = build_label_cover(phi, 1)
        left, right = perfect_labeling(phi, lc, phi.satisfying_assignments()[0])
        inst = TsaInstance(lc, PipelineParams(r=1, d=2))
        if not inst.full or inst.per_edge != 131072:
            return False, f"expected full enumeration with 131072 tuples per edge, got {inst.per_edge}"
        rep = tsa_accept_rate(inst, inst.encode_labeling(left, right))
        rates.append(rep.rate)
    ok = all(isinstance(r, Fraction) and r == 1 for r in rates)
    return ok, f"{len(rates)} formulas, rates {[str(r) for r in rates]}"


@_timed(8)
def criterion_8():
    """Label-Cover value 1 when satisfiable; repetition never increases the value."""
    from .labelcover import (build_label_cover, contradiction_formula, lc_value, parallel_repeat,
                             triangle_game, twisted_square_game)

    sat_vals = [lc_value(build_label_cover(parse_dimacs(t), 1)) for t in MICRO_CNFS[:4]]
    sat_vals.append(lc_value(build_label_cover(parse_dimacs(MICRO_CNFS[4]), 2)))
    games = {"contradiction": build_label_cover(contradiction_formula(), 1),
             "twisted-square": twisted_square_game(), "triangle": triangle_game()}
    pairs = {}
    for name, g in games.items():
        pairs[name] = (lc_value(g), lc_value(parallel_repeat(g, 2)))
    ok = all(v == 1 for v in sat_vals) and all(b <= a < 1 for a, b in pairs.values())
    shown = {k: f"{a} -> {b}" for k, (a, b) in pairs.items()}
    return ok, f"satisfiable values {[str(v) for v in sat_vals]}; games {shown}"


def planted_f2_system(rng, n: int, count: int, arity: int = 5):
    from .quadsys import QuadraticSystem

    sol = [int(b) for b in rng.integers(0, 2, n)]
    a = BitVec.from_list(sol)
    eqs = []
    while len(eqs) < count:
        vs = sorted(int(x) for x in rng.choice(n, size=min(arity, n), replace=False))
        lin = [v for v in vs if rng.random() < 0.5]
        quad = [(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs)) if rng.random() < 0.3]
        q = QuadEquation.from_terms(n, 0, lin, quad)
        if not q.variables():
            continue
        eqs.append(QuadEquation.from_terms(n, q.eval(a), lin, quad))
    return QuadraticSystem(n, eqs), sol


@_timed(9)
def criterion_9(seed: int = 9):
    """Lagrange round trips, restriction vs composition, smoothness."""
    from .gf import GF, random_mpoly
    from .surface import (RuledSurface, build_surface_label_cover, compose_eval, interpolate_curve,
                          lift_f2_system_to_gfq, restrict_to_surface, smoothness_estimate)

    rng = np.random.default_rng(seed)
    problems = []
    for e in (2, 3, 4):
        gf = GF(e)
        l = min(5, gf.q - 1)
        for _ in range(1000):
            m = int(rng.integers(1, 4))
            nodes = [int(x) for x in rng.choice(gf.q, size=l + 1, replace=False)]
            pts = rng.integers(0, gf.q, (l + 1, m))
            C = interpolate_curve(gf, pts, nodes)
            if not np.array_equal(C.eval_arr(np.array(nodes)), pts):
                problems.append(("lagrange", e))
                break
    gf = GF(4)
    for _ in range(5):
        pts = rng.integers(0, 16, (6, 3))
        R = RuledSurface(interpolate_curve(gf, pts, range(6)), rng.integers(0, 16, 3))
        g = random_mpoly(gf, 3, 2, rng)
        lab = restrict_to_surface(g, R, 2, 5)
        t = rng.integers(0, 16, 1000)
        s = rng.integers(0, 16, 1000)
        if not np.array_equal(lab.eval(t, s), compose_eval(g, R, t, s)) or lab.total_degree() > 10:
            problems.append(("restrict",))
    system, _ = planted_f2_system(rng, 8, 3)
    slc = build_surface_label_cover(lift_f2_system_to_gfq(system, 4), m=3, h=2, d=2, surfaces=4, seed=seed)
    sm = smoothness_estimate(slc, 10_000, rng)
    if not sm["ok"]:
        problems.append(("smooth", sm["zero_rate"]))
    return not problems, (f"zero-rate {sm['zero_rate']:.4f} vs bound {sm['bound']:.4f} + 3 sigma "
                          f"({sm['samples']} samples); problems {problems[:5]}")


@_timed(10)
def criterion_10(seed: int = 10):
    """Matrix-label completeness on planted instances; low-rank decode round trip."""
    from .pipeline import build_micro_pipeline
    from .quadsys import decode_low_rank, brute_force_solutions, QuadraticSystem
    from .surface import build_surface_label_cover, lift_f2_system_to_gfq
    from .vectorlc import matrixize, surface_label_bits, vectorize_surface_lc

    rng = np.random.default_rng(seed)
    problems = []
    # surface route: GF(8), 4 variables on S^2 with h = 2, degree-2 extension
    system, sol = planted_f2_system(rng, 4, 3, arity=3)
    slc = build_surface_label_cover(lift_f2_system_to_gfq(system, 3), m=2, h=2, d=2, surfaces=2, seed=seed)
    labels, pv, _ = slc.completeness_labeling(sol)
    vlc = vectorize_surface_lc(slc)
    mlc = matrixize(vlc)
    left = [int(x) for x in pv]
    right = [surface_label_bits(L, slc.gf.e) for L in labels]
    ML, MR = mlc.complete_labeling(left, right)
    sampled = rng.choice(mlc.n_edges, size=min(300, mlc.n_edges), replace=False)
    for i in sampled:
        u, v, _ = mlc.edge(int(i))
        if not mlc.edge_ok(int(i), ML[u], MR[v]):
            problems.append(("surface-edge", int(i)))
    for v in range(mlc.n_right):
        if not mlc.satisfies_gamma(v, MR[v]):
            problems.append(("surface-gamma", v))
    # equation route from a CNF, every edge
    pipe = build_micro_pipeline(parse_dimacs(MICRO_CNFS[1]), seed=seed, equations=40)
    m2 = pipe.mlc
    ML2, MR2 = m2.complete_labeling(pipe.left_labels, pipe.right_labels)
    for i in range(m2.n_edges):
        u, v, _ = m2.edge(i)
        if not m2.edge_ok(i, ML2[u], MR2[v]):
            problems.append(("tsa-edge", i))
    for v in range(m2.n_right):
        if not m2.satisfies_gamma(v, MR2[v]):
            problems.append(("tsa-gamma", v))
    # decode planted odd sums of satisfying rank-1 labels
    decoded = 0
    for _ in range(100):
        v = int(rng.integers(0, m2.n_right))
        eqs = pipe.vlc.equations(v)
        sols = brute_force_solutions(QuadraticSystem(pipe.vlc.m_r, list(eqs)))
        t = int(rng.choice([1, 3, 5]))
        picks = [sols[int(j)] for j in rng.integers(0, len(sols), t)]
        M = f2core.sum_of_squares([f2core.prepend_one(a) for a in picks], pipe.vlc.m_r + 1)
        out = decode_low_rank(M, eqs)
        recon = f2core.sum_of_squares([f2core.prepend_one(a) for a in out], pipe.vlc.m_r + 1)
        if len(out) % 2 == 0 or recon != M or not all(satisfies_superposition(q, out) for q in eqs):
            problems.append(("decode", v))
        elif not m2.satisfies_gamma(v, M):
            problems.append(("decode-gamma", v))
        else:
            decoded += 1
    return not problems, (f"{len(sampled)} surface edges, {m2.n_edges} equation edges, "
                          f"{decoded}/100 decodes; problems {problems[:5]}")


@_timed(11, limit=300.0)
def criterion_11(samples: int = 1_000_000, seed: int = 11):
    """End-to-end canonical 2-coloring has no monochromatic edge."""
    from .hypergraph import EightQueryTest, canonical_two_coloring, check_coloring
    from .ledger import ThetaLedger, micro_instance
    from .pipeline import build_micro_pipeline

    pipe = build_micro_pipeline(parse_dimacs(MICRO_CNFS[1]), seed=seed, equations=50)
    test = EightQueryTest(pipe.mlc)
    colors = canonical_two_coloring(test, pipe.right_labels, pipe.left_labels)
    H = test.hypergraph(test.sample_chunked(seed, samples))
    mono = len(check_coloring(H, colors))
    # full enumeration of the test distribution on a micro instance, per color class
    mt, _, left, right, _ = micro_instance(seed)
    mcol = canonical_two_coloring(mt, right, left)
    led = ThetaLedger(mt)
    exact = []
    for c in (0, 1):
        tabs = [(mcol[mt.offsets[v]:mt.offsets[v] + d.n_cosets] == c).astype(np.uint8)
                for v, d in enumerate(mt.domains)]
        exact.append(led.enumerate(tabs))
    ok = mono == 0 and all(x == 0 for x in exact)
    return ok, (f"{H.n_edges} sampled 8-edges over {H.n_vertices} vertices, {mono} monochromatic; "
                f"exact monochromatic mass per color {[str(x) for x in exact]}")


@_timed(12)
def criterion_12(sets: int = 20, samples: int = 100_000, seed: int = 12):
    """Theta: formula vs enumeration vs Monte Carlo; zero on independent sets; Theta0 >= s^8."""
    from .hypergraph import canonical_two_coloring
    from .ledger import ThetaLedger, micro_instance, random_indicator_tables

    test, _, left, right, _ = micro_instance(seed)
    if test.n ** 2 > 10:
        return False, "micro instance too large"
    led = ThetaLedger(test)
    rng = np.random.default_rng(seed)
    problems = []
    worst = 0.0
    for i in range(sets):
        tabs = random_indicator_tables(test, rng, density=float(rng.uniform(0.5, 0.9)))
        res = led.run(tabs, samples=samples, seed=seed * 1000 + i)
        if res.sigma:
            worst = max(worst, abs(float(res.theta_total) - res.theta_mc) / res.sigma)
        if not all(res.checks.values()):
            problems.append((i, {k: v for k, v in res.checks.items() if not v}))
    colors = canonical_two_coloring(test, right, left)
    for c in (0, 1):
        tabs = [(colors[test.offsets[v]:test.offsets[v] + d.n_cosets] == c).astype(np.uint8)
                for v, d in enumerate(test.domains)]
        res = led.run(tabs)
        if res.theta_enum != 0 or res.theta_total != 0:
            problems.append(("independent", c, str(res.theta_total)))
    return not problems, f"{sets} random sets, max |formula - MC| = {worst:.2f} sigma; problems {problems[:5]}"


@_timed(13)
def criterion_13():
    """Seeded subcommands reproduce byte-identical artifacts."""
    from .cli import main

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        cnf = tmp / "phi.cnf"
        cnf.write_text(MICRO_CNFS[1])
        sysf = tmp / "sys.txt"
        rng = np.random.default_rng(13)
        system, _ = planted_f2_system(rng, 4, 3, arity=3)
        sysf.write_text(system.to_text())
        mat = tmp / "m.txt"
        mat.write_text("1 1 0\n1 1 1\n0 1 0\n")
        runs = {
            "lc": ["lc", "--cnf", str(cnf), "--r", "1"],
            "tsa": ["tsa", "--cnf", str(cnf), "--seed", "3", "--samples", "5000"],
            "surface-lc": ["surface-lc", "--sys", str(sysf), "--m", "2", "--h", "2", "--d", "2",
                           "--e", "3", "--surfaces", "2", "--seed", "4"],
            "matrix-lc": ["matrix-lc", "--cnf", str(cnf), "--seed", "5", "--samples", "20"],
            "hypergraph": ["hypergraph", "--cnf", str(cnf), "--seed", "6", "--samples", "5000"],
            "ledger": ["ledger", "--seed", "7", "--samples", "20000", "--sets", "3"],
            "decompose": ["decompose", "--matrix", str(mat)],
        }
        diffs = []
        for name, args in runs.items():
            digests = []
            for k in range(2):
                out = tmp / f"{name}-{k}"
                out.mkdir()
                with contextlib.redirect_stdout(io.StringIO()):
                    code = main(args + ["--out", str(out)])
                if code != 0:
                    diffs.append((name, f"exit {code}"))
                    break
                digests.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
            if len(digests) == 2 and (digests[0] != digests[1] or not digests[0]):
                diffs.append((name, "bytes differ"))
    return not diffs, f"{len(runs)} subcommands run twice; differences {diffs}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13]


def run_all(echo=print) -> list[Outcome]:
    out = []
    for crit in CRITERIA:
        try:
            res = crit()
        except Exception as exc:  # a crash counts as a failure of that criterion
            res = Outcome(CRITERIA.index(crit) + 1, False, f"{type(exc).__name__}: {exc}", 0.0)
        if echo:
            echo(res.line())
        out.append(res)
    return out
