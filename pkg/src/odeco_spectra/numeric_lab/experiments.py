"""Perturbation sweeps and residual tables."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from ..errors import ValidationError
from ..tensor_core import (DenseTensor, OdecoTensor, SingularTuple, _data,
                           materialize, singular_classify)
from .solver import SearchStrategy, find_all_singular_tuples

CSV_FIELDS = ("epsilon", "cluster", "tag", "distance", "residual", "condition", "members")


@dataclass(frozen=True)
class TrajectoryRow:
    epsilon: float
    cluster: int
    tag: Optional[str]
    distance: Optional[float]
    residual: float
    condition: float
    members: int


def perturbation_experiment(S: OdecoTensor, T, epsilons: Sequence[float],
                            strategy: Optional[SearchStrategy] = None,
                            seed: int = 0) -> List[TrajectoryRow]:
    """Solve S + eps * T for each eps and record where each cluster sits.

    ``strategy.reference`` defaults to S, so clusters are tagged by the
    nearest fixed point, base facet or facet vertex of S.
    """
    base = materialize(S)
    direction = np.asarray(_data(T), dtype=float)
    if direction.shape != base.shape.dims:
        raise ValidationError(f"shape mismatch: S is {base.shape}, T is {'x'.join(map(str, direction.shape))}")
    strategy = strategy or SearchStrategy()
    if strategy.reference is None:
        strategy = replace(strategy, reference=S)
    rows = []
    for eps in epsilons:
        perturbed = DenseTensor.from_array(base.data + float(eps) * direction)
        result = find_all_singular_tuples(perturbed, strategy, seed=seed)
        for k, c in enumerate(result.clusters):
            rows.append(TrajectoryRow(float(eps), k, c.nearest_degenerate, c.locus_distance,
                                      c.residual, c.jacobian_condition, c.members))
    return rows


def rows_to_csv(rows: Sequence[TrajectoryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([f"{r.epsilon:.6g}", r.cluster, r.tag or "",
                    "" if r.distance is None else f"{r.distance:.6e}",
                    f"{r.residual:.3e}", f"{r.condition:.6e}", r.members])
    return buf.getvalue()


def rows_to_json(rows: Sequence[TrajectoryRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


@dataclass(frozen=True)
class ResidualRow:
    index: int
    residual: float
    contraction: float
    kind: str


def residual_report(T, tuples: Sequence[SingularTuple], tol: float = 1e-8) -> List[ResidualRow]:
    """Max-over-modes parallelism residual and |T(x_1, ..., x_d)| per tuple."""
    out = []
    for i, tup in enumerate(tuples):
        c = singular_classify(T, tup, tol)
        out.append(ResidualRow(i, c.residual, c.contraction, c.kind))
    return out
