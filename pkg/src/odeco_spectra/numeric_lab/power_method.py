"""Odeco decomposition by alternating power iteration with deflation."""
from __future__ import annotations

import string

import numpy as np

from ..errors import NumericFailure
from ..tensor_core import (DenseTensor, OdecoTensor, _data, canonicalize_odeco,
                           complete_orthogonal, contract, materialize)


def _rank_one(sigma, xs):
    L = string.ascii_lowercase[: len(xs)]
    return sigma * np.einsum(",".join(L) + "->" + L, *xs)


def _power_iterate(R, xs, max_iters, step_tol):
    """Alternate x_j <- normalize(R(.., ., ..)) until the update stalls."""
    d = R.ndim
    for it in range(max_iters):
        change = 0.0
        for j in range(d):
            u = contract(R, xs[:j] + [None] + xs[j + 1:]).real
            nu = np.linalg.norm(u)
            if nu == 0:
                return xs, False
            u /= nu
            change = max(change, min(np.linalg.norm(u - xs[j]), np.linalg.norm(u + xs[j])))
            xs[j] = u
        if change < step_tol:
            return xs, True
    return xs, False


def _polar(M):
    u, _, vt = np.linalg.svd(M, full_matrices=False)
    return u @ vt


def power_method_decompose(T, tol: float = 1e-10, max_iters: int = 500,
                           restarts: int = 10, seed: int = 0) -> OdecoTensor:
    """Recover an odeco decomposition of T.

    Each round runs ``restarts`` random alternating power iterations on the
    current residual, keeps the rank-one term with the largest weight and
    deflates it. Stops once ||residual|| < tol * ||T||.

    Raises
    ------
    NumericFailure
        When no restart converges, or when n deflations leave a residual
        above tolerance (the input is not odeco).
    """
    data = np.asarray(_data(T), dtype=float)
    dense = DenseTensor.from_array(data)
    shape = dense.shape
    rng = np.random.default_rng(seed)
    norm0 = np.linalg.norm(data)
    R = data.copy()
    sigmas, vecs = [], [[] for _ in range(shape.d)]
    step_tol = 1e-14
    for _ in range(shape.n):
        if np.linalg.norm(R) <= tol * norm0:
            break
        best = None
        for _r in range(restarts):
            xs = [rng.standard_normal(m) for m in shape.dims]
            xs = [x / np.linalg.norm(x) for x in xs]
            xs, ok = _power_iterate(R, xs, max_iters, step_tol)
            if not ok:
                continue
            sigma = float(contract(R, xs).real)
            if best is None or abs(sigma) > abs(best[0]):
                best = (sigma, xs)
        if best is None:
            raise NumericFailure(f"power iteration did not converge in {max_iters} steps")
        sigma, xs = best
        R -= _rank_one(sigma, xs)
        sigmas.append(sigma)
        for j in range(shape.d):
            vecs[j].append(xs[j])
    floor = np.linalg.norm(R) / norm0 if norm0 else 0.0
    if floor > tol:
        raise NumericFailure(f"residual floor {floor:.3e} above tolerance {tol:.1e}: input is not odeco")
    if len(sigmas) < shape.n:
        raise NumericFailure(
            f"only {len(sigmas)} of {shape.n} terms are nonzero (weights "
            f"{[round(x, 12) for x in sigmas]}); odeco tensors need n nonzero weights")

    factors = [complete_orthogonal(_polar(np.column_stack(vs))) for vs in vecs]
    # refit weights on the polished vectors
    weights = [float(contract(data, [V[:, i] for V in factors]).real) for i in range(shape.n)]
    odeco = canonicalize_odeco(OdecoTensor(shape, weights, tuple(factors)))
    err = np.linalg.norm(materialize(odeco).data - data) / (norm0 or 1.0)
    if err > tol:
        raise NumericFailure(f"reconstruction error {err:.3e} above tolerance {tol:.1e}")
    return odeco
