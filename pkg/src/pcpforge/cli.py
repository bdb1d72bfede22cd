"""Command line driver: ``forge <subcommand> ...``.

Every subcommand prints a JSON document to stdout; with ``--out DIR`` the same
document and any tables or figures are written into DIR.  Failures print an
error JSON on stderr and exit with status 2 (library errors) or 1 (I/O).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import f2core
from .errors import ForgeError, ParseError
from .report import dumps, provenance, write_csv


def _read(path: str) -> str:
    return Path(path).read_text()


def _emit(args, name: str, doc: dict) -> None:
    text = dumps(doc)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text)
    sys.stdout.write(text)


def _frac(x) -> str | float:
    return str(x) if isinstance(x, Fraction) else float(x)


# subcommands ------------------------------------------------------------------------


def cmd_lc(args) -> int:
    from .cnf import parse_dimacs
    from .labelcover import build_label_cover, lc_value
    from .errors import InfeasibleError

    phi = parse_dimacs(_read(args.cnf))
    lc = build_label_cover(phi, args.r)
    try:
        value = str(lc_value(lc))
    except InfeasibleError as exc:
        value = None
        note = str(exc)
    else:
        note = "exact"
    doc = {"provenance": provenance("lc", {"cnf": Path(args.cnf).name, "r": args.r}, None),
           "n_left": lc.n_left, "n_right": lc.n_right, "n_edges": int(lc.n_edges),
           "left_labels": lc.left_labels, "right_labels": lc.right_labels,
           "satisfiable": phi.is_satisfiable() if phi.n <= 22 else None,
           "value": value, "value_note": note}
    _emit(args, "lc", doc)
    return 0


def cmd_tsa(args) -> int:
    from .cnf import parse_dimacs
    from .labelcover import build_label_cover, perfect_labeling
    from .tsa import PipelineParams, TsaInstance, tsa_accept_rate

    phi = parse_dimacs(_read(args.cnf))
    lc = build_label_cover(phi, args.r)
    params = PipelineParams(r=args.r, d=args.d, seed=args.seed)
    sample = None if args.exact else args.samples
    inst = TsaInstance(lc, params, sample=sample)
    rng = np.random.default_rng(args.seed)
    rows = {}
    sols = phi.satisfying_assignments() if phi.n <= 22 else []
    if sols:
        left, right = perfect_labeling(phi, lc, sols[0])
        rows["ldlc"] = tsa_accept_rate(inst, inst.encode_labeling(left, right))
    rows["random"] = tsa_accept_rate(inst, rng.integers(0, 2, inst.n_vars).astype(np.uint8))
    doc = {"provenance": provenance("tsa", {"cnf": Path(args.cnf).name, "r": args.r, "d": args.d,
                                            "samples": sample}, args.seed),
           "variables": int(inst.n_vars), "constraints": int(inst.n_constraints),
           "queries_per_edge": int(inst.per_edge), "full_enumeration": bool(inst.full),
           "rates": {k: {"rate": _frac(r.rate), "accepted": r.accepted, "total": r.total,
                         "exact": r.exact, "sigma": r.sigma} for k, r in rows.items()}}
    _emit(args, "tsa", doc)
    return 0


def _equation_rows(eqs) -> list[str]:
    return [q.to_text() for q in eqs]


def cmd_surface_lc(args) -> int:
    from .quadsys import brute_force_solutions, parse_system
    from .surface import build_surface_label_cover, lift_f2_system_to_gfq
    from .vectorlc import surface_label_bits, vectorize_surface_lc

    system = parse_system(_read(args.sys))
    lifted = lift_f2_system_to_gfq(system, args.e)
    slc = build_surface_label_cover(lifted, m=args.m, h=args.h, d=args.d, surfaces=args.surfaces,
                                    seed=args.seed)
    vlc = vectorize_surface_lc(slc)
    complete = None
    if system.m <= 20 and slc.m * (slc.h - 1) <= slc.d:
        sols = brute_force_solutions(system)
        if sols:
            labels, pv, _ = slc.completeness_labeling(sols[0].to_list())
            ok, valid = slc.check_labeling(labels, pv)
            left = [int(x) for x in pv]
            right = [surface_label_bits(L, slc.gf.e) for L in labels]
            n, acc, vvalid = vlc.check_labeling(left, right)
            complete = {"edges_ok": bool(ok.all()), "validity_ok": bool(valid.all()),
                        "vector_edges_ok": acc == n, "vector_validity_ok": vvalid}
    doc = {
        "provenance": provenance("surface-lc", {"sys": Path(args.sys).name, "m": args.m, "h": args.h,
                                                "d": args.d, "e": args.e, "surfaces": args.surfaces},
                                 args.seed),
        "regime": slc.regime_report(),
        "t_star": list(slc.t_star),
        "left_vertices": slc.points.tolist(),
        "right_vertices": [{"constraint": int(c), "slots": list(s), "omega": R.omega.coeffs.tolist(),
                            "y": R.y.tolist()}
                           for c, s, R in zip(slc.surface_constraint, slc.slot_vars, slc.surfaces)],
        "edges": np.stack([slc.edge_v, slc.edge_u, slc.edge_t, slc.edge_s], axis=1).tolist(),
        "vector_labels": {"m_l": vlc.m_l, "m_r": vlc.m_r},
        "edge_matrices": [[format(r, "x") for r in A.rows] for A in vlc.matrices],
        "edge_matrix_index": vlc.edge_a.tolist(),
        "gamma": [_equation_rows(vlc.equations(v)) for v in range(vlc.n_right)],
        "completeness": complete,
    }
    _emit(args, "surface_lc", doc)
    return 0


def _matrix_instance(args):
    from .cnf import parse_dimacs
    from .pipeline import build_micro_pipeline
    from .quadsys import brute_force_solutions, parse_system
    from .vectorlc import equation_variable_labels, equation_variable_lc, matrixize

    if args.cnf:
        pipe = build_micro_pipeline(parse_dimacs(_read(args.cnf)), seed=args.seed, equations=args.samples)
        return pipe.vlc, pipe.mlc, pipe.left_labels, pipe.right_labels
    if not args.sys:
        raise ParseError("pass --cnf or --sys")
    system = parse_system(_read(args.sys))
    cons = []
    for q in system.equations:
        vs = q.variables()
        loc = {v: i for i, v in enumerate(vs)}
        cons.append((vs, type(q).from_terms(len(vs), q.c, [loc[i] for i in q.linear_terms()],
                                            [(loc[i], loc[j]) for i, j in q.quad_terms()])))
    vlc = equation_variable_lc(cons, system.m)
    left = right = None
    sols = brute_force_solutions(system) if system.m <= 20 else []
    if sols:
        left, right = equation_variable_labels(vlc, cons, sols[0].to_list())
    return vlc, matrixize(vlc), left, right


def cmd_matrix_lc(args) -> int:
    vlc, mlc, left, right = _matrix_instance(args)
    complete = None
    if left is not None:
        ML, MR = mlc.complete_labeling(left, right)
        edges_ok = all(mlc.edge_ok(i, ML[mlc.edge(i)[0]], MR[mlc.edge(i)[1]]) for i in range(mlc.n_edges))
        gamma_ok = all(mlc.satisfies_gamma(v, MR[v]) for v in range(mlc.n_right))
        complete = {"edges_ok": edges_ok, "gamma_ok": gamma_ok}
    edges = []
    for i in range(mlc.n_edges):
        u, v, A = mlc.edge(i)
        edges.append({"u": u, "v": v, "A": [format(r, "x") for r in A.rows]})
    doc = {"provenance": provenance("matrix-lc", {"cnf": Path(args.cnf).name if args.cnf else None,
                                                  "sys": Path(args.sys).name if args.sys else None,
                                                  "equations": args.samples}, args.seed),
           "n_left": mlc.n_left, "n_right": mlc.n_right, "left_side": mlc.n_l, "right_side": mlc.n_r,
           "edges": edges,
           "gamma": [{"v": v, "primal_dim": len(mlc.primal_basis(v)) if mlc.n_r <= 8 else None,
                      "linearized": [format(C.flat(), "x") for C in mlc.linearized(v)]}
                     for v in range(mlc.n_right)],
           "completeness": complete}
    _emit(args, "matrix_lc", doc)
    return 0


def cmd_hypergraph(args) -> int:
    from .cnf import parse_dimacs
    from .hypergraph import EightQueryTest, canonical_two_coloring, check_coloring
    from .pipeline import build_micro_pipeline
    from .report import hypergraph_figure

    pipe = build_micro_pipeline(parse_dimacs(_read(args.cnf)), seed=args.seed, equations=args.equations)
    test = EightQueryTest(pipe.mlc)
    H = test.hypergraph(test.sample_chunked(args.seed, args.samples))
    colors = canonical_two_coloring(test, pipe.right_labels, pipe.left_labels)
    mono = check_coloring(H, colors)
    vids = np.searchsorted(test.offsets, H.edges.ravel(), side="right") - 1
    hits = np.bincount(vids, minlength=len(test.domains))
    rows = []
    for v, d in enumerate(test.domains):
        block = colors[test.offsets[v]:test.offsets[v] + d.n_cosets]
        rows.append((v, d.dim, d.n_cosets, int(hits[v]), float(block.mean())))
    doc = {"provenance": provenance("hypergraph", {"cnf": Path(args.cnf).name, "samples": args.samples,
                                                   "equations": args.equations}, args.seed),
           "pipeline": pipe.summary(),
           "n_vertices": H.n_vertices, "n_edges": H.n_edges, "arity": 8,
           "vertex_map": {"rule": "vertex id = offset[v] + coset syndrome",
                          "offsets": test.offsets.tolist(), "dims": test.dims.tolist()},
           "coloring": {"kind": "canonical", "monochromatic": int(len(mono))}}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "hypergraph.hyp").write_text(H.to_text())
        write_csv(out / "hypergraph.csv", ["v", "coset_dim", "cosets", "incidences", "color1_fraction"], rows)
        hypergraph_figure(test.dims.tolist(), hits.tolist(), out / "hypergraph.png")
    _emit(args, "hypergraph", doc)
    return 0 if len(mono) == 0 else 3


def cmd_ledger(args) -> int:
    from .hypergraph import canonical_two_coloring
    from .ledger import ThetaLedger, micro_instance, random_indicator_tables
    from .report import ledger_figure

    test, cons, left, right, sol = micro_instance(args.seed)
    led = ThetaLedger(test, k=args.k)
    rng = np.random.default_rng(args.seed)
    rows = []
    sets = [("random", random_indicator_tables(test, rng, density=float(rng.uniform(0.5, 0.9))))
            for _ in range(args.sets)]
    colors = canonical_two_coloring(test, right, left)
    for c in (0, 1):
        sets.append((f"color{c}", [(colors[test.offsets[v]:test.offsets[v] + d.n_cosets] == c).astype(np.uint8)
                                   for v, d in enumerate(test.domains)]))
    for i, (kind, tabs) in enumerate(sets):
        res = led.run(tabs, samples=args.samples, seed=args.seed * 1000 + i)
        r = res.as_dict()
        r.update(set=i, kind=kind)
        rows.append(r)
    header = ["set", "kind", "theta0", "theta1", "theta2", "theta_total", "theta_total_exact", "theta_enum",
              "theta_mc", "sigma", "zero_term", "mean_f0_pow8"]
    doc = {"provenance": provenance("ledger", {"samples": args.samples, "sets": args.sets, "k": args.k},
                                    args.seed),
           "instance": {"right_side": test.n, "left_side": test.nl, "assignment": sol,
                        "equations": [q.to_text() for _, q in cons]},
           "sets": rows,
           "all_checks_pass": all(all(r["checks"].values()) for r in rows)}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "ledger.csv", header, [[r[h] for h in header] for r in rows])
        ledger_figure(rows, out / "ledger.png")
    _emit(args, "ledger", doc)
    return 0 if doc["all_checks_pass"] else 3


def _read_matrix(text: str) -> f2core.BitMatrix:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        bits = line.split() if " " in line else list(line)
        if any(b not in ("0", "1") for b in bits):
            raise ParseError(f"matrix entries must be 0 or 1: {line!r}")
        rows.append([int(b) for b in bits])
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("matrix rows must be non-empty and of equal length")
    return f2core.BitMatrix.from_lists(rows)


def cmd_decompose(args) -> int:
    A = _read_matrix(_read(args.matrix))
    pseudo = args.pseudo
    vs = f2core.decompose_pseudoquadratic(A) if pseudo else f2core.decompose_symmetric(A)
    doc = {"provenance": provenance("decompose", {"matrix": Path(args.matrix).name, "pseudo": pseudo}, None),
           "n": A.nrows, "rank": A.rank(), "kind": "pseudo-quadratic" if pseudo else "symmetric",
           "vectors": ["".join(str(b) for b in v.to_list()) for v in vs], "count": len(vs)}
    _emit(args, "decompose", doc)
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(echo=lambda line: print(line, flush=True))
    failed = [r.number for r in results if not r.ok]
    print(json.dumps({"passed": len(results) - len(failed), "failed": failed}))
    return 0 if not failed else 3


# parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description="Micro-scale PCP and hypergraph coloring toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="directory for artifacts")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("lc", help="build the r-repeated Label-Cover of a CNF")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--r", type=int, default=1)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_lc)

    sp = sub.add_parser("tsa", help="TSA reduction and acceptance rates")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--r", type=int, default=1)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--samples", type=int, default=None, help="sampled constraints instead of all")
    sp.add_argument("--exact", action="store_true", help="force full enumeration")
    common(sp)
    sp.set_defaults(func=cmd_tsa)

    sp = sub.add_parser("surface-lc", help="point-vs-surface Label-Cover of a quadratic system")
    sp.add_argument("--sys", required=True)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--e", type=int, default=3)
    sp.add_argument("--surfaces", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_surface_lc)

    sp = sub.add_parser("matrix-lc", help="matrix-label Label-Cover from a CNF or a quadratic system")
    sp.add_argument("--cnf")
    sp.add_argument("--sys")
    sp.add_argument("--samples", type=int, default=50, help="TSA equations sampled from the CNF")
    common(sp)
    sp.set_defaults(func=cmd_matrix_lc)

    sp = sub.add_parser("hypergraph", help="emit the 8-uniform hypergraph and check the canonical coloring")
    sp.add_argument("--cnf", required=True)
    sp.add_argument("--samples", type=int, default=100_000, help="sampled 8-edges")
    sp.add_argument("--equations", type=int, default=50)
    common(sp)
    sp.set_defaults(func=cmd_hypergraph)

    sp = sub.add_parser("ledger", help="exact Fourier ledger on a micro instance")
    sp.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples per set")
    sp.add_argument("--sets", type=int, default=20)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--exact", action="store_true", help="exact rationals (always on for the formula path)")
    common(sp)
    sp.set_defaults(func=cmd_ledger)

    sp = sub.add_parser("decompose", help="sum-of-squares decomposition of a symmetric matrix")
    sp.add_argument("--matrix", required=True, help="rows of 0/1 entries")
    sp.add_argument("--pseudo", action="store_true", help="require the pseudo-quadratic form")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("selftest", help="run every acceptance criterion")
    sp.set_defaults(func=cmd_selftest, out=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ForgeError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
