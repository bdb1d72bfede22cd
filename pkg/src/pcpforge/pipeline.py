"""Micro end-to-end chain: CNF -> Label-Cover -> TSA equations -> matrix labels -> 8-query test.

The GF(q) surface stage is not on this path: its right labels are far wider
than the 8x8 packed matrices the hypergraph sampler supports.  The TSA
equations feed the equation-vs-variable vector Label-Cover directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import CnfFormula
from .errors import PreconditionError
from .labelcover import build_label_cover, perfect_labeling
from .tsa import PipelineParams, TsaInstance
from .vectorlc import (ExplicitVectorLC, MatrixLabelCover, equation_variable_labels,
                       equation_variable_lc, matrixize)


@dataclass
class MicroPipeline:
    tsa: TsaInstance
    constraints: list  # (compact variable ids, local equation)
    cell_ids: np.ndarray  # compact id -> TSA cell
    vlc: ExplicitVectorLC
    mlc: MatrixLabelCover
    left_labels: list
    right_labels: list

    def summary(self) -> dict:
        return {"tsa_variables": int(self.tsa.n_vars), "equations": len(self.constraints),
                "variables": len(self.cell_ids), "right_matrix_side": self.mlc.n_r,
                "left_matrix_side": self.mlc.n_l, "edges": int(self.vlc.n_edges)}


def build_micro_pipeline(phi: CnfFormula, seed: int = 0, equations: int = 50,
                         r: int = 1, d: int = 2, assignment: int | None = None) -> MicroPipeline:
    sols = phi.satisfying_assignments()
    if assignment is None:
        if not sols:
            raise PreconditionError("the completeness pipeline needs a satisfiable formula")
        assignment = sols[0]
    elif not phi.satisfied_by(assignment):
        raise PreconditionError("assignment does not satisfy the formula")
    lc = build_label_cover(phi, r)
    left, right = perfect_labeling(phi, lc, assignment)
    inst = TsaInstance(lc, PipelineParams(r=r, d=d, seed=seed))
    values = inst.encode_labeling(left, right)
    _, cells, signs = inst.sampled_constraints(equations, seed)
    raw = [inst.constraint_equation(c, s) for c, s in zip(cells, signs)]
    used = np.unique(np.concatenate([np.asarray(names, dtype=np.int64) for names, _ in raw]))
    compact = {int(c): i for i, c in enumerate(used)}
    constraints = [([compact[c] for c in names], q) for names, q in raw]
    vlc = equation_variable_lc(constraints, len(used))
    mlc = matrixize(vlc)
    vl, vr = equation_variable_labels(vlc, constraints, values[used])
    return MicroPipeline(inst, constraints, used, vlc, mlc, vl, vr)

