"""Multistart search for all singular tuples of a dense tensor.

Starting points come from the fixed points and base components of an optional
reference odeco tensor plus random complex starts. Refined tuples are
deduplicated by chordal distance; when a reference is given, the distinct
tuples are then grouped by the degenerate locus they sit closest to, so a
pair of tuples emerging from one double point forms one cluster with two
members.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..complex_geometry import build_incidence_complex
from ..spectra_enum import (enumerate_type1, enumerate_type2, realize_type1,
                            sample_base_point, type2_counts)
from ..tensor_core import (OdecoTensor, SingularTuple, _data,
                           canonicalize_odeco, tuple_distance)
from .newton import CONVERGED, condition_numbers, newton_batch

THREADS_ENV = "ODECO_SPECTRA_THREADS"

TYPE1 = "type1"
FACET = "facet"
VERTEX = "vertex"
_KIND_ORDER = {TYPE1: 0, FACET: 1, VERTEX: 2}


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class SearchStrategy:
    reference: Optional[OdecoTensor] = None
    type1_seeds: bool = True
    base_samples: int = 5
    random_starts: int = 500
    real_only: bool = False
    tol: float = 1e-12
    max_iters: int = 50
    dedup_tol: float = 1e-6
    # a tuple near facets is attributed to a vertex when
    # dist(vertex) <= vertex_ratio * dist(nearest facet)
    vertex_ratio: float = 10.0
    threads: Optional[int] = None
    batch_size: int = 256


class DegenerateLoci:
    """Fixed points, base facets and facet vertices of a reference odeco tensor."""

    def __init__(self, reference: OdecoTensor):
        ref = canonicalize_odeco(reference)
        self.reference = ref
        shape = ref.shape
        self.type1 = [realize_type1(s, ref) for s in enumerate_type1(shape)]
        self.facets = list(enumerate_type2(shape))
        self.facet_bases = [[f.basis(ref, j) for j in range(shape.d)] for f in self.facets]
        self.vertices = []
        if self.facets and type2_counts(shape).dimension >= 1:
            cx = build_incidence_complex(shape)
            for v in cx.vertices:
                idx = v.point(shape)
                self.vertices.append(SingularTuple([V[:, i] for V, i in zip(ref.factors, idx)]))

    def _facet_distance(self, unit, bases) -> float:
        return max(float(np.linalg.norm(x - B @ (B.T @ x))) for x, B in zip(unit, bases))

    def distances(self, tup: SingularTuple) -> dict:
        """Nearest locus of each kind as ``{kind: (index, distance)}``."""
        out = {}
        if self.type1:
            ds = [tuple_distance(tup, p) for p in self.type1]
            out[TYPE1] = (int(np.argmin(ds)), float(min(ds)))
        if self.facets:
            unit = tup.unit()
            ds = [self._facet_distance(unit, b) for b in self.facet_bases]
            out[FACET] = (int(np.argmin(ds)), float(min(ds)))
        if self.vertices:
            ds = [tuple_distance(tup, p) for p in self.vertices]
            out[VERTEX] = (int(np.argmin(ds)), float(min(ds)))
        return out

    def nearest(self, tup: SingularTuple, vertex_ratio: float = 10.0):
        """Return (kind, index, distance) of the degenerate locus attracting ``tup``."""
        dist = self.distances(tup)
        t1 = dist.get(TYPE1, (None, np.inf))
        fc = dist.get(FACET, (None, np.inf))
        vx = dist.get(VERTEX, (None, np.inf))
        if t1[1] <= min(fc[1], vx[1]):
            return TYPE1, t1[0], t1[1]
        if vx[0] is not None and vx[1] <= vertex_ratio * fc[1]:
            return VERTEX, vx[0], vx[1]
        return FACET, fc[0], fc[1]

    def tag(self, kind: str, index: int) -> str:
        return f"{kind}:{index}"


@dataclass
class SolutionCluster:
    representative: SingularTuple
    members: int
    member_tuples: List[SingularTuple] = field(repr=False)
    center: SingularTuple = field(repr=False)
    min_distance: float
    jacobian_condition: float
    residual: float
    nearest_degenerate: Optional[str] = None
    locus_distance: Optional[float] = None

    @property
    def kind(self) -> Optional[str]:
        return self.nearest_degenerate.split(":")[0] if self.nearest_degenerate else None


@dataclass
class SearchResult:
    clusters: List[SolutionCluster]
    attempted: int
    converged: int
    dropped: int
    distinct: int

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    @property
    def multiplicity(self) -> int:
        return sum(c.members for c in self.clusters)


def _random_start(dims, seed, index, real_only):
    rng = np.random.default_rng([seed, index])
    if real_only:
        return [rng.standard_normal(m).astype(complex) for m in dims]
    return [rng.standard_normal(m) + 1j * rng.standard_normal(m) for m in dims]


def _seed_tuples(dims, strategy: SearchStrategy, loci: Optional[DegenerateLoci], seed: int):
    starts = []
    if loci is not None:
        if strategy.type1_seeds:
            starts.extend(list(t.points) for t in loci.type1)
        for fi, comp in enumerate(loci.facets):
            for s in range(strategy.base_samples):
                sub = int(np.random.SeedSequence([seed, fi, s]).generate_state(1)[0])
                pt = sample_base_point(comp, loci.reference, seed=sub)
                starts.append(list(pt.points))
    for r in range(strategy.random_starts):
        starts.append(_random_start(dims, seed, r, strategy.real_only))
    return starts


def _projective_center(tuples: List[SingularTuple]) -> SingularTuple:
    """Average of phase-aligned unit representatives, mode by mode."""
    pts = []
    for j in range(len(tuples[0].points)):
        ref = tuples[0].points[j] / np.linalg.norm(tuples[0].points[j])
        acc = np.zeros_like(ref)
        for t in tuples:
            x = t.points[j] / np.linalg.norm(t.points[j])
            ph = np.vdot(x, ref)
            acc += x * (ph / abs(ph) if abs(ph) > 0 else 1.0)
        pts.append(acc)
    return SingularTuple(pts)


def _dedupe(points: List[np.ndarray], order: np.ndarray, tol: float) -> List[int]:
    """Indices of the first tuple, in ``order``, of each chordal-distance class."""
    unit = [p / np.linalg.norm(p, axis=1, keepdims=True) for p in points]
    kept: List[int] = []
    for b in order:
        if kept:
            dist = np.zeros(len(kept))
            for u in unit:
                coef = u[kept].conj() @ u[b]
                dist = np.maximum(dist, np.linalg.norm(u[b][None, :] - coef[:, None] * u[kept], axis=1))
            if np.min(dist) < tol:
                continue
        kept.append(int(b))
    return kept


def find_all_singular_tuples(T, strategy: Optional[SearchStrategy] = None,
                             seed: int = 0) -> SearchResult:
    strategy = strategy or SearchStrategy()
    data = np.asarray(_data(T), dtype=float)
    dims = data.shape
    loci = DegenerateLoci(strategy.reference) if strategy.reference is not None else None
    starts = _seed_tuples(dims, strategy, loci, seed)
    chunks = [starts[i:i + strategy.batch_size] for i in range(0, len(starts), strategy.batch_size)]

    def run(chunk):
        stacked = [np.array([s[j] for s in chunk], dtype=complex) for j in range(len(dims))]
        return newton_batch(data, stacked, tol=strategy.tol, max_iters=strategy.max_iters)

    threads = strategy.threads or default_threads()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]

    points = [np.concatenate([r.points[j] for r in results]) for j in range(len(dims))]
    status = np.concatenate([r.status for r in results])
    resid = np.concatenate([r.residual for r in results])
    ok = np.flatnonzero(status == CONVERGED)
    kept = _dedupe(points, ok, strategy.dedup_tol)
    sols = [SingularTuple([p[b] for p in points]) for b in kept]

    groups: dict = {}
    tags = []
    for k, tup in enumerate(sols):
        if loci is None:
            key = (None, k)
            tags.append((None, None, None))
        else:
            kind, idx, dist = loci.nearest(tup, strategy.vertex_ratio)
            key = (kind, idx)
            tags.append((kind, idx, dist))
        groups.setdefault(key, []).append(k)

    def sort_key(item):
        (kind, idx), members = item
        return (_KIND_ORDER.get(kind, -1), idx if kind else members[0])

    clusters = []
    for (kind, idx), members in sorted(groups.items(), key=sort_key):
        tuples = [sols[k] for k in members]
        center = tuples[0] if len(tuples) == 1 else _projective_center(tuples)
        clusters.append(SolutionCluster(
            representative=tuples[0],
            members=len(tuples),
            member_tuples=tuples,
            center=center,
            min_distance=np.inf,
            jacobian_condition=float(condition_numbers(data, [p[None, :] for p in center.points])[0]),
            residual=float(max(resid[kept[k]] for k in members)),
            nearest_degenerate=loci.tag(kind, idx) if kind else None,
            locus_distance=max(tags[k][2] for k in members) if kind else None,
        ))
    for a in clusters:
        a.min_distance = min(
            (tuple_distance(x, y) for b in clusters if b is not a
             for x in a.member_tuples for y in b.member_tuples), default=np.inf)
    return SearchResult(clusters, len(starts), int(ok.size), int(len(starts) - ok.size), len(sols))
