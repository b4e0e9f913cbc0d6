"""Dense and odeco tensor representations, contraction, and the singular tuple test.

Indices are 0-based throughout the library. Dense entries are stored in
row-major order (last index fastest), which is numpy's C order.
"""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError

ORTHO_TOL = 1e-12
CLASSIFY_TOL = 1e-8

FIXED = "fixed"
BASE = "base"
NOT_SINGULAR = "not_singular"
UNCLASSIFIED = "unclassified"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TensorShape:
    """Format n_1 x ... x n_d of a tensor with d >= 3 and every n_j >= 2."""

    dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 3:
            raise ValidationError(f"need at least 3 modes, got shape {dims}")
        if any(n < 2 for n in dims):
            raise ValidationError(f"every dimension must be >= 2, got shape {dims}")

    @classmethod
    def parse(cls, text: str) -> "TensorShape":
        """Parse ``"2,3,3"`` or ``"2x3x3"``."""
        parts = text.replace("x", ",").replace("×", ",").split(",")
        try:
            return cls(tuple(int(p) for p in parts if p.strip()))
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"cannot parse shape {text!r}") from None

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return min(self.dims)

    @property
    def c(self) -> int:
        """Number of modes attaining the minimum dimension."""
        return sum(1 for m in self.dims if m == self.n)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def __str__(self):
        return "x".join(str(m) for m in self.dims)


def as_shape(shape) -> TensorShape:
    if isinstance(shape, TensorShape):
        return shape
    if isinstance(shape, str):
        return TensorShape.parse(shape)
    return TensorShape(tuple(shape))


@dataclass(frozen=True)
class DenseTensor:
    shape: TensorShape
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape != self.shape.dims:
            raise ValidationError(
                f"array of shape {data.shape} does not match {self.shape.dims}")
        object.__setattr__(self, "data", _frozen(data))

    @classmethod
    def from_array(cls, array) -> "DenseTensor":
        array = np.asarray(array, dtype=float)
        return cls(TensorShape(array.shape), array)

    @classmethod
    def from_entries(cls, shape, entries: Sequence[float]) -> "DenseTensor":
        shape = as_shape(shape)
        entries = np.asarray(entries, dtype=float).ravel()
        if entries.size != shape.size:
            raise ValidationError(
                f"expected {shape.size} entries for shape {list(shape.dims)}, "
                f"got {entries.size}")
        return cls(shape, entries.reshape(shape.dims))

    @property
    def entries(self) -> np.ndarray:
        return self.data.ravel()

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if self.shape != other.shape:
            raise ValidationError(f"shape mismatch: {self.shape} vs {other.shape}")
        return DenseTensor(self.shape, self.data + other.data)

    def scaled(self, alpha: float) -> "DenseTensor":
        return DenseTensor(self.shape, alpha * self.data)


@dataclass(frozen=True)
class OdecoTensor:
    """sum_i sigma_i v_i^(1) x ... x v_i^(d) with full orthogonal factors.

    ``factors[j]`` is an n_j x n_j orthogonal matrix whose first n columns are
    the decomposition vectors of mode j.
    """

    shape: TensorShape
    sigmas: np.ndarray = field(repr=True)
    factors: tuple = field(repr=False)

    def __post_init__(self):
        shape = self.shape
        sigmas = np.asarray(self.sigmas, dtype=float).ravel()
        if sigmas.size != shape.n:
            raise ValidationError(
                f"expected {shape.n} weights for shape {shape}, got {sigmas.size}")
        if np.any(sigmas == 0):
            raise ValidationError("zero weight: drop the term and reduce n")
        if len(self.factors) != shape.d:
            raise ValidationError(f"expected {shape.d} factor matrices, got {len(self.factors)}")
        factors = []
        for j, (V, nj) in enumerate(zip(self.factors, shape.dims)):
            V = np.asarray(V, dtype=float)
            if V.shape != (nj, nj):
                raise ValidationError(f"factor {j} has shape {V.shape}, expected {(nj, nj)}")
            dev = float(np.max(np.abs(V.T @ V - np.eye(nj))))
            if dev > ORTHO_TOL:
                raise ValidationError(
                    f"factor {j} is not orthogonal: max deviation {dev:.3e}")
            factors.append(_frozen(V))
        object.__setattr__(self, "sigmas", _frozen(sigmas))
        object.__setattr__(self, "factors", tuple(factors))

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def is_canonical(self) -> bool:
        return bool(np.all(self.sigmas > 0))

    def vectors(self, j: int) -> np.ndarray:
        """Decomposition vectors of mode j as columns (n_j x n)."""
        return self.factors[j][:, : self.n]

    def decomposition_tuple(self, i: int) -> "SingularTuple":
        return SingularTuple([V[:, i] for V in self.factors], kind=FIXED)

    @classmethod
    def diagonal(cls, shape, sigmas=None) -> "OdecoTensor":
        shape = as_shape(shape)
        sigmas = np.ones(shape.n) if sigmas is None else sigmas
        return cls(shape, sigmas, tuple(np.eye(m) for m in shape.dims))


def canonical_point(v) -> np.ndarray:
    """Projective representative: divide by the first coordinate of largest modulus."""
    v = np.asarray(v, dtype=complex).ravel()
    mod = np.abs(v)
    k = int(np.argmax(mod))
    if mod[k] == 0:
        raise ValidationError("zero vector is not a projective point")
    out = v / v[k]
    out[k] = 1.0
    return out


@dataclass(frozen=True)
class SingularTuple:
    points: tuple
    kind: str = UNCLASSIFIED

    def __post_init__(self):
        object.__setattr__(
            self, "points", tuple(_frozen(canonical_point(p)) for p in self.points))

    @property
    def dims(self) -> tuple:
        return tuple(p.size for p in self.points)

    def unit(self) -> list:
        return [p / np.linalg.norm(p) for p in self.points]

    def is_real(self, tol: float = 0.0) -> bool:
        return all(np.all(np.abs(p.imag) <= tol) for p in self.points)

    def check_shape(self, shape: TensorShape) -> None:
        if self.dims != shape.dims:
            raise ValidationError(f"tuple lengths {self.dims} do not match shape {shape.dims}")


def chordal_distance(x, y) -> float:
    """Fubini-Study chordal distance between two projective points."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    # sine of the angle via the projection residual; sqrt(1 - cos^2) loses half the digits
    return float(min(1.0, np.linalg.norm(y - np.vdot(x, y) * x)))


def tuple_distance(a: SingularTuple, b: SingularTuple) -> float:
    return max(chordal_distance(x, y) for x, y in zip(a.points, b.points))


def _data(T) -> np.ndarray:
    if isinstance(T, OdecoTensor):
        return materialize(T).data
    return T.data if isinstance(T, DenseTensor) else np.asarray(T)


def contract(T, vectors: Sequence[Optional[np.ndarray]]):
    """Contract T with one vector per mode, leaving at most one slot open.

    Returns a complex vector of length n_j when slot j is ``None`` and the
    complex scalar T(x^(1), ..., x^(d)) when every slot is filled.
    """
    data = _data(T)
    d = data.ndim
    if len(vectors) != d:
        raise ValidationError(f"expected {d} vector slots, got {len(vectors)}")
    open_slots = [j for j, v in enumerate(vectors) if v is None]
    if len(open_slots) > 1:
        raise ValidationError(f"at most one open slot allowed, got {open_slots}")
    letters = string.ascii_letters[:d]
    operands = [data]
    subs = [letters]
    for j, v in enumerate(vectors):
        if v is None:
            continue
        v = np.asarray(v)
        if v.shape != (data.shape[j],):
            raise ValidationError(
                f"vector {j} has length {v.shape}, expected {data.shape[j]}")
        operands.append(v)
        subs.append(letters[j])
    out = letters[open_slots[0]] if open_slots else ""
    return np.einsum(",".join(subs) + "->" + out, *operands, optimize=True).astype(complex)


@dataclass(frozen=True)
class Classification:
    kind: str
    residual: float
    contraction: float
    mode_residuals: tuple
    partial_norm: float = 0.0


def singular_classify(T, tup: SingularTuple, tol: float = CLASSIFY_TOL) -> Classification:
    """Decide whether ``tup`` is a fixed point, a base point, or not singular.

    Vectors are scaled to unit length first, so the verdict does not depend on
    the projective representative. Base points are those where every partial
    contraction vanishes. The full contraction is reported too, but it is not
    used to decide: a complex fixed point with isotropic vectors (x . x = 0)
    has full contraction zero while its partial contractions do not vanish.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    data = _data(T)
    tup.check_shape(TensorShape(data.shape))
    xs = tup.unit()
    res, norms = [], []
    for j in range(len(xs)):
        u = contract(data, xs[:j] + [None] + xs[j + 1:])
        perp = u - np.vdot(xs[j], u) * xs[j]
        norms.append(float(np.linalg.norm(u)))
        res.append(float(np.linalg.norm(perp) / (1.0 + norms[-1])))
    residual = max(res)
    value = float(abs(contract(data, xs)))
    partial = max(norms)
    if residual > tol:
        kind = NOT_SINGULAR
    elif partial <= tol * (1.0 + float(np.max(np.abs(data)))):
        kind = BASE
    else:
        kind = FIXED
    return Classification(kind, residual, value, tuple(res), partial)


def materialize(odeco: OdecoTensor) -> DenseTensor:
    """Dense entries sum_k sigma_k prod_j V^(j)[i_j, k]."""
    d = odeco.d
    letters = string.ascii_letters[:d]
    subs = ",".join(f"{c}z" for c in letters)
    data = np.einsum(f"z,{subs}->{letters}", odeco.sigmas,
                     *[odeco.vectors(j) for j in range(d)], optimize=True)
    return DenseTensor(odeco.shape, data)


def complete_orthogonal(vectors, tol: float = 1e-10) -> np.ndarray:
    """Extend n orthonormal columns in R^m to an m x m orthogonal matrix.

    Standard basis vectors are projected onto the orthogonal complement in
    index order and kept when the residual norm exceeds 1e-8.
    """
    Q = np.asarray(vectors, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    m, n = Q.shape
    if n > m:
        raise ValidationError(f"{n} vectors cannot be orthonormal in R^{m}")
    gram_dev = float(np.max(np.abs(Q.T @ Q - np.eye(n)))) if n else 0.0
    if gram_dev > tol:
        raise ValidationError(f"input vectors are not orthonormal (deviation {gram_dev:.3e})")
    cols = [Q[:, i] for i in range(n)]
    for k in range(m):
        if len(cols) == m:
            break
        r = np.zeros(m)
        r[k] = 1.0
        for _ in range(2):
            for c in cols:
                r = r - np.dot(c, r) * c
        nr = np.linalg.norm(r)
        if nr > 1e-8:
            cols.append(r / nr)
    return np.column_stack(cols)


def random_orthogonal(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar orthogonal matrix from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def random_odeco(shape, seed: int, sigma_range=(0.5, 2.0)) -> OdecoTensor:
    shape = as_shape(shape)
    lo, hi = sigma_range
    if not 0 < lo <= hi:
        raise ValidationError(f"invalid sigma range {sigma_range}")
    rng = np.random.default_rng(seed)
    factors = tuple(random_orthogonal(m, rng) for m in shape.dims)
    sigmas = rng.uniform(lo, hi, size=shape.n)
    return OdecoTensor(shape, sigmas, factors)


def canonicalize_odeco(odeco: OdecoTensor) -> OdecoTensor:
    """Make all weights positive and sort them descending.

    Negative weights are absorbed into the last factor; the same column
    permutation is applied to every factor so the tensor is unchanged.
    """
    sigmas = np.array(odeco.sigmas)
    if np.any(sigmas == 0):
        raise ValidationError("zero weight: drop the term and reduce n")
    n = odeco.n
    factors = [np.array(V) for V in odeco.factors]
    factors[-1][:, np.flatnonzero(sigmas < 0)] *= -1
    sigmas = np.abs(sigmas)
    order = np.argsort(-sigmas, kind="stable")
    for V in factors:
        V[:, :n] = V[:, order]
    return OdecoTensor(odeco.shape, sigmas[order], tuple(factors))
