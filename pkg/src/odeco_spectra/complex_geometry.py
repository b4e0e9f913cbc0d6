"""Combinatorics of the base locus: incidence complex, formats, generic counts."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from . import polynomials as poly
from .errors import EnumerationTooLarge, ValidationError
from .spectra_enum import (TypeIIComponent, ZeroPattern, enumerate_type2,
                           type1_counts, type2_counts)
from .tensor_core import TensorShape, as_shape

FACET_LIMIT = 10 ** 5


def intersect_components(a: TypeIIComponent, b: TypeIIComponent, shape) -> Optional[ZeroPattern]:
    """Rowwise union of the zero patterns, or None when a factor would vanish."""
    shape = as_shape(shape)
    union = a.pattern.union(b.pattern)
    return union if union.is_valid(shape) else None


@dataclass(frozen=True)
class Vertex:
    pattern: ZeroPattern
    facets: tuple

    def point(self, shape: TensorShape) -> tuple:
        """Index of the single nonzero coordinate in each mode."""
        return tuple(self.pattern.free_coordinates(shape, j)[0] for j in range(shape.d))


@dataclass(frozen=True)
class IncidenceComplex:
    shape: TensorShape
    facets: tuple
    intersections: Dict[Tuple[int, int], ZeroPattern] = field(repr=False)
    vertices: tuple

    @property
    def facet_count(self) -> int:
        return len(self.facets)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def max_facets_per_vertex(self) -> int:
        return max((len(v.facets) for v in self.vertices), default=0)

    def summary(self) -> dict:
        return {
            "shape": list(self.shape.dims),
            "facets": self.facet_count,
            "vertices": self.vertex_count,
            "max_facets_per_vertex": self.max_facets_per_vertex,
        }


def build_incidence_complex(shape, limit: int = FACET_LIMIT) -> IncidenceComplex:
    shape = as_shape(shape)
    count = type2_counts(shape).closed_form
    if count > limit:
        raise EnumerationTooLarge(f"{count} facets for {shape} exceeds the limit {limit}")
    facets = tuple(enumerate_type2(shape))
    intersections = {}
    vertex_facets: Dict[ZeroPattern, set] = {}
    for a, b in itertools.combinations(range(len(facets)), 2):
        meet = intersect_components(facets[a], facets[b], shape)
        if meet is None:
            continue
        intersections[(a, b)] = meet
        if meet.dimension(shape) == 0:
            vertex_facets.setdefault(meet, set()).update((a, b))
    vertices = sorted((Vertex(p, tuple(sorted(fs))) for p, fs in vertex_facets.items()),
                      key=lambda v: v.point(shape))
    vertices = tuple(vertices)
    return IncidenceComplex(shape, facets, intersections, vertices)


def base_locus_dimension(dims: Sequence[int]) -> int:
    return sum(m - 1 for m in dims) - 2 * min(dims)


def formats_with_dimension(k: int) -> list:
    """Formats n_1 <= ... <= n_d (d >= 3, n_j >= 2) whose base components have dimension k."""
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    # Every solution has d <= k + 4 and n_j <= k + 3.
    found = []
    for d in range(3, k + 5):
        for dims in itertools.combinations_with_replacement(range(2, k + 4), d):
            if base_locus_dimension(dims) == k:
                found.append(dims)
    return sorted(found, key=lambda dims: (len(dims), dims))


def generic_count(dims) -> int:
    """Number of singular tuples of a generic tensor of the given format.

    Coefficient of prod t_j^(n_j - 1) in
    prod_j sum_{a < n_j} t_j^a * (sum_{k != j} t_k)^(n_j - 1 - a).
    Accepts matrices (d = 2) as well.
    """
    dims = tuple(int(m) for m in (dims.dims if isinstance(dims, TensorShape) else dims))
    if len(dims) < 2 or any(m < 1 for m in dims):
        raise ValidationError(f"invalid format {dims}")
    d = len(dims)
    caps = [m - 1 for m in dims]
    product = poly.one(d)
    for j, m in enumerate(dims):
        others = {}
        for k in range(d):
            if k != j:
                others = poly.add(others, poly.monomial(d, {k: 1}))
        factor = {}
        for a in range(m):
            term = poly.mul(poly.monomial(d, {j: a}), poly.power(others, m - 1 - a, caps), caps)
            factor = poly.add(factor, term)
        product = poly.mul(product, factor, caps)
    return poly.coefficient(product, caps)


@dataclass(frozen=True)
class DegenerationReport:
    shape: TensorShape
    dimension: int
    type1: int
    facets: int
    vertices: int
    generic: int
    holds: bool

    def as_dict(self) -> dict:
        return {
            "shape": list(self.shape.dims), "dimension": self.dimension,
            "type1": self.type1, "facets": self.facets, "vertices": self.vertices,
            "generic": self.generic, "holds": self.holds,
        }


def degeneration_check(shape) -> DegenerationReport:
    """Check type1 + facets (+ 2 * vertices in dimension 1) against the generic count."""
    shape = as_shape(shape)
    dim = base_locus_dimension(shape.dims)
    if dim >= 2:
        raise ValidationError(
            f"degeneration identity only covers base loci of dimension <= 1, {shape} has {dim}")
    t1 = type1_counts(shape.n, shape.d).total
    generic = generic_count(shape.dims)
    if dim <= 0:
        facets = type2_counts(shape).closed_form
        vertices = 0
        expected = t1 + facets
    else:
        cx = build_incidence_complex(shape)
        facets, vertices = cx.facet_count, cx.vertex_count
        expected = t1 + facets + 2 * vertices
    return DegenerationReport(shape, dim, t1, facets, vertices, generic, expected == generic)


def _pattern_json(p: ZeroPattern) -> list:
    return [[j + 1 for j in r] for r in p.sorted_rows()]


def complex_to_dict(cx: IncidenceComplex) -> dict:
    shape = cx.shape
    return {
        "shape": list(shape.dims),
        "facets": [
            {"id": i, "rows": _pattern_json(f.pattern), "dimension": f.dimension,
             "factor_dims": list(f.factor_dims)}
            for i, f in enumerate(cx.facets)],
        "intersections": [
            {"facets": [a, b], "rows": _pattern_json(p), "dimension": p.dimension(shape)}
            for (a, b), p in sorted(cx.intersections.items())],
        "vertices": [
            {"id": i, "rows": _pattern_json(v.pattern), "point": [c + 1 for c in v.point(shape)],
             "facets": list(v.facets)}
            for i, v in enumerate(cx.vertices)],
    }


def _facet_label(f: TypeIIComponent) -> str:
    return " ".join("".join(str(j + 1) for j in r) for r in f.pattern.sorted_rows())


def export_complex(cx: IncidenceComplex, fmt: str = "json") -> str:
    """Serialize the complex as JSON or as a Graphviz graph.

    In the graph, facets are nodes and every pair of facets through a vertex
    is joined by an edge labelled with that vertex, so a triple point is a
    3-clique sharing one label.
    """
    if fmt == "json":
        return json.dumps(complex_to_dict(cx), indent=2)
    if fmt != "dot":
        raise ValidationError(f"unknown complex format {fmt!r}")
    lines = [f'graph "base_locus_{cx.shape}" {{']
    for i, f in enumerate(cx.facets):
        lines.append(f'  f{i} [label="{_facet_label(f)}"];')
    for vi, v in enumerate(cx.vertices):
        for a, b in itertools.combinations(v.facets, 2):
            lines.append(f'  f{a} -- f{b} [label="v{vi}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
