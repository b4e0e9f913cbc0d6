"""Fixed points and base components of odeco tensors.

A fixed point of the diagonal tensor S = sum_i sigma_i e_i x ... x e_i is
supported on a subset of rows. On the lead row (the smallest support index)
every mode carries sigma^(-1/(d-2)); on another support row i mode j carries
eta_i * chi_i^(j) * sigma_i^(-1/(d-2)), where eta_i is a (2d-4)-th root of
unity, chi_i^(1) = 1, chi_i^(j) = +-1, and prod_{j>=2} chi_i^(j) = eta_i^(d-2).

Base points are the tuples whose n x d coordinate matrix has at least two
zeros in each of the first n rows; the maximal families choose exactly one
pair of modes per row.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from . import polynomials as poly
from .errors import EnumerationTooLarge, ValidationError
from .tensor_core import (BASE, FIXED, OdecoTensor, SingularTuple, TensorShape,
                          as_shape)

ENUMERATION_LIMIT = 10 ** 6


class Type1Counts(NamedTuple):
    total: int
    real_total: int


class Type2Counts(NamedTuple):
    closed_form: int
    chow_count: int
    dimension: int


def _root_order(d: int) -> int:
    return 2 * d - 4


def _valid_sign_vectors(d: int, eta_exponent: int):
    # eta^(d-2) = (-1)^k for eta = exp(2 pi i k / (2d-4))
    target = -1 if eta_exponent % 2 else 1
    for signs in itertools.product((1, -1), repeat=d - 1):
        if int(np.prod(signs)) == target:
            yield signs


@dataclass(frozen=True)
class TypeISpec:
    """Discrete data of one fixed point.

    ``eta`` and ``signs`` are aligned with ``support[1:]``; ``signs[k]`` holds
    (chi^(2), ..., chi^(d)) for that row.
    """

    d: int
    support: tuple
    eta: tuple = ()
    signs: tuple = ()

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "eta", tuple(int(k) for k in self.eta))
        object.__setattr__(self, "signs", tuple(tuple(int(s) for s in sg) for sg in self.signs))
        if not support or list(support) != sorted(set(support)) or support[0] < 0:
            raise ValidationError(f"support must be a nonempty increasing index tuple: {support}")
        m = len(support)
        if len(self.eta) != m - 1 or len(self.signs) != m - 1:
            raise ValidationError("eta and signs must cover each non-lead support index")
        q = _root_order(self.d)
        for k, sg in zip(self.eta, self.signs):
            if not 0 <= k < q:
                raise ValidationError(f"eta exponent {k} outside 0..{q - 1}")
            if len(sg) != self.d - 1 or any(s not in (1, -1) for s in sg):
                raise ValidationError(f"invalid sign vector {sg}")
            if int(np.prod(sg)) != (-1) ** k:
                raise ValidationError(
                    f"sign product {int(np.prod(sg))} must equal eta^(d-2) = {(-1) ** k}")

    @property
    def lead(self) -> int:
        return self.support[0]

    def is_real(self) -> bool:
        return all(k % (self.d - 2) == 0 for k in self.eta)

    def diagonal_vectors(self, shape: TensorShape, sigmas) -> list:
        """Coordinates of the fixed point for the diagonal tensor with weights ``sigmas``."""
        d = self.d
        sigmas = np.asarray(sigmas, dtype=float)
        if np.any(sigmas[list(self.support)] <= 0):
            raise ValidationError("weights must be positive; canonicalize the odeco tensor first")
        q = _root_order(d)
        xs = [np.zeros(m, dtype=complex) for m in shape.dims]
        scale = sigmas ** (-1.0 / (d - 2))
        for j in range(d):
            xs[j][self.lead] = scale[self.lead]
        for i, k, sg in zip(self.support[1:], self.eta, self.signs):
            eta = np.exp(2j * np.pi * k / q)
            chis = (1,) + sg
            for j in range(d):
                xs[j][i] = eta * chis[j] * scale[i]
        return xs


def type1_counts(n: int, d: int) -> Type1Counts:
    """Number of fixed points and of real fixed points."""
    if d < 3:
        raise ValidationError(f"d must be >= 3, got {d}")
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    a = 2 ** (d - 1) * (d - 2)
    total, rem = divmod((a + 1) ** n - 1, a)
    b = 2 ** (d - 1)
    real_total, rem2 = divmod((b + 1) ** n - 1, b)
    by_support = sum(comb(n, m) * (2 * d - 4) ** (m - 1) * 2 ** ((m - 1) * (d - 2))
                     for m in range(1, n + 1))
    if rem or rem2 or by_support != total:
        raise RuntimeError(f"fixed-point count mismatch for n={n}, d={d}")
    return Type1Counts(total, real_total)


def _check_limit(count: int, limit: int, what: str) -> None:
    if count > limit:
        raise EnumerationTooLarge(f"{what}: {count} items exceeds the limit {limit}")


def enumerate_type1(shape, limit: int = ENUMERATION_LIMIT) -> Iterator[TypeISpec]:
    """All fixed-point specs, ordered by support bitmask, then eta, then signs."""
    shape = as_shape(shape)
    n, d = shape.n, shape.d
    _check_limit(type1_counts(n, d).total, limit, f"fixed points of {shape}")
    q = _root_order(d)
    for mask in range(1, 2 ** n):
        support = tuple(i for i in range(n) if mask >> i & 1)
        m = len(support)
        for etas in itertools.product(range(q), repeat=m - 1):
            choices = [list(_valid_sign_vectors(d, k)) for k in etas]
            for signs in itertools.product(*choices):
                yield TypeISpec(d, support, etas, signs)


def realize_type1(spec: TypeISpec, odeco: OdecoTensor) -> SingularTuple:
    if not odeco.is_canonical:
        raise ValidationError("odeco tensor must be canonical (all weights positive)")
    if spec.d != odeco.d or spec.support[-1] >= odeco.n:
        raise ValidationError("spec does not fit the odeco tensor")
    xs = spec.diagonal_vectors(odeco.shape, odeco.sigmas)
    return SingularTuple([V @ x for V, x in zip(odeco.factors, xs)], kind=FIXED)


def _pairs(d: int):
    return list(itertools.combinations(range(d), 2))


@dataclass(frozen=True)
class ZeroPattern:
    """For each of the first n rows, the set of modes whose coordinate vanishes."""

    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(frozenset(int(j) for j in r) for r in self.rows))

    def is_valid(self, shape: TensorShape) -> bool:
        if len(self.rows) != shape.n:
            return False
        if any(len(r) < 2 or not r <= set(range(shape.d)) for r in self.rows):
            return False
        return all(self.zero_rows(j) < nj for j, nj in enumerate(shape.dims) if nj == shape.n)

    def zero_rows(self, j: int) -> int:
        return sum(1 for r in self.rows if j in r)

    def free_coordinates(self, shape: TensorShape, j: int) -> list:
        """Coordinates of mode j that are not forced to zero."""
        return [i for i in range(shape.dims[j]) if i >= shape.n or j not in self.rows[i]]

    def factor_dims(self, shape: TensorShape) -> tuple:
        return tuple(len(self.free_coordinates(shape, j)) - 1 for j in range(shape.d))

    def dimension(self, shape: TensorShape) -> int:
        return sum(m - 1 for m in shape.dims) - sum(len(r) for r in self.rows)

    def union(self, other: "ZeroPattern") -> "ZeroPattern":
        return ZeroPattern(tuple(a | b for a, b in zip(self.rows, other.rows)))

    def contains(self, other: "ZeroPattern") -> bool:
        """True when the locus of ``other`` lies inside the locus of ``self``."""
        return all(a <= b for a, b in zip(self.rows, other.rows))

    def sorted_rows(self) -> list:
        return [sorted(r) for r in self.rows]


@dataclass(frozen=True)
class TypeIIComponent:
    pattern: ZeroPattern
    dimension: int
    factor_dims: tuple

    @classmethod
    def from_pattern(cls, pattern: ZeroPattern, shape) -> "TypeIIComponent":
        shape = as_shape(shape)
        if not pattern.is_valid(shape):
            raise ValidationError(f"invalid zero pattern {pattern.sorted_rows()} for {shape}")
        return cls(pattern, pattern.dimension(shape), pattern.factor_dims(shape))

    def basis(self, odeco: OdecoTensor, j: int) -> np.ndarray:
        """Orthonormal basis (columns) of the linear space spanned in mode j."""
        free = self.pattern.free_coordinates(odeco.shape, j)
        return odeco.factors[j][:, free]


def _chow_count(shape: TensorShape) -> int:
    d, n = shape.d, shape.n
    caps = [m - 1 for m in shape.dims]
    base = {}
    for j, k in _pairs(d):
        base = poly.add(base, poly.monomial(d, {j: 1, k: 1}))
    # powers of t_j beyond n_j - 1 vanish in the Chow ring
    return sum(poly.power(base, n, caps).values())


def type2_counts(shape) -> Type2Counts:
    shape = as_shape(shape)
    d, n, c = shape.d, shape.n, shape.c
    closed = comb(d, 2) ** n - c * (d - 1) ** n + comb(c, 2)
    chow = _chow_count(shape)
    if chow != closed:
        raise RuntimeError(f"base component count mismatch for {shape}: {closed} vs {chow}")
    dim = sum(m - 1 for m in shape.dims) - 2 * n
    return Type2Counts(closed, chow, dim)


def enumerate_type2(shape, limit: int = ENUMERATION_LIMIT) -> Iterator[TypeIIComponent]:
    """Maximal base components (one pair of zero modes per row) in lexicographic order."""
    shape = as_shape(shape)
    pairs = _pairs(shape.d)
    _check_limit(len(pairs) ** shape.n, limit, f"zero patterns of {shape}")
    dim = sum(m - 1 for m in shape.dims) - 2 * shape.n
    for rows in itertools.product(pairs, repeat=shape.n):
        pattern = ZeroPattern(rows)
        if pattern.is_valid(shape):
            yield TypeIIComponent(pattern, dim, pattern.factor_dims(shape))


def sample_base_point(component: TypeIIComponent, odeco: OdecoTensor, seed: int) -> SingularTuple:
    """Random point of a base component, with complex Gaussian free coordinates."""
    if not odeco.is_canonical:
        raise ValidationError("odeco tensor must be canonical (all weights positive)")
    shape = odeco.shape
    rng = np.random.default_rng(seed)
    ys = []
    for j, V in enumerate(odeco.factors):
        free = component.pattern.free_coordinates(shape, j)
        if not free:
            raise RuntimeError(f"pattern forces mode {j} to vanish")
        x = np.zeros(shape.dims[j], dtype=complex)
        x[free] = rng.standard_normal(len(free)) + 1j * rng.standard_normal(len(free))
        ys.append(V @ x)
    return SingularTuple(ys, kind=BASE)
