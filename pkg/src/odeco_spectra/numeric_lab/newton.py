"""Newton refinement of singular tuples in affine charts.

Unknowns per tuple: every coordinate of every x^(j) except one pinned to 1,
plus one multiplier lambda_j per mode. Residual block j is
T(x^(1), .., ., .., x^(d)) - lambda_j x^(j), giving a square system of size
sum n_j. All routines work on a batch of B tuples at once.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import NumericFailure, ValidationError
from ..tensor_core import DenseTensor, SingularTuple, _data

CONVERGED = "converged"
DIVERGED = "diverged"
MAX_ITERS = "max_iters"
SINGULAR = "singular"

REPIN_RATIO = 0.1
STALL_STEPS = 5
BLOWUP = 1e12


class DivergenceError(NumericFailure):
    def __init__(self, status: str, iterations: int, residual: float):
        super().__init__(f"Newton {status} after {iterations} iterations (residual {residual:.3e})")
        self.status = status
        self.iterations = iterations
        self.residual = residual


def _letters(d):
    return string.ascii_lowercase[:d]


def batch_contract(data: np.ndarray, xs: List[np.ndarray], skip: Optional[int]) -> np.ndarray:
    """Contract with batched vectors xs[j] of shape (B, n_j), leaving ``skip`` open."""
    L = _letters(data.ndim)
    subs = [L] + [f"Z{L[j]}" for j in range(data.ndim) if j != skip]
    ops = [data] + [xs[j] for j in range(data.ndim) if j != skip]
    out = "Z" + (L[skip] if skip is not None else "")
    return np.einsum(",".join(subs) + "->" + out, *ops, optimize=True)


def batch_partial2(data: np.ndarray, xs: List[np.ndarray], j: int, k: int) -> np.ndarray:
    """Contract every mode except j and k; result has shape (B, n_j, n_k)."""
    L = _letters(data.ndim)
    rest = [m for m in range(data.ndim) if m not in (j, k)]
    subs = [L] + [f"Z{L[m]}" for m in rest]
    ops = [data] + [xs[m] for m in rest]
    return np.einsum(",".join(subs) + f"->Z{L[j]}{L[k]}", *ops, optimize=True)


def _offsets(dims):
    return np.concatenate([[0], np.cumsum(dims)]).astype(int)


def batch_residual(data, xs, lam) -> np.ndarray:
    return np.concatenate(
        [batch_contract(data, xs, j) - lam[:, j:j + 1] * xs[j] for j in range(data.ndim)], axis=1)


def batch_full_jacobian(data, xs, lam) -> np.ndarray:
    """Jacobian with respect to every coordinate and every multiplier: (B, N, N + d)."""
    dims = data.shape
    d = len(dims)
    off = _offsets(dims)
    N = off[-1]
    B = xs[0].shape[0]
    J = np.zeros((B, N, N + d), dtype=complex)
    for j in range(d):
        rj = slice(off[j], off[j + 1])
        for k in range(d):
            if k != j:
                J[:, rj, off[k]:off[k + 1]] = batch_partial2(data, xs, j, k)
        J[:, rj, rj] -= lam[:, j, None, None] * np.eye(dims[j])
        J[:, rj, N + j] = -xs[j]
    return J


def _kept_columns(dims, piv) -> np.ndarray:
    off = _offsets(dims)
    N, d = off[-1], len(dims)
    mask = np.ones((piv.shape[0], N + d), dtype=bool)
    rows = np.arange(piv.shape[0])
    for j in range(d):
        mask[rows, off[j] + piv[:, j]] = False
    return np.nonzero(mask)[1].reshape(piv.shape[0], N)


def batch_chart_jacobian(data, xs, lam, piv) -> np.ndarray:
    """Square Jacobian in the charts given by pivot indices ``piv`` (B, d)."""
    J = batch_full_jacobian(data, xs, lam)
    cols = _kept_columns(data.shape, piv)
    return np.take_along_axis(J, cols[:, None, :], axis=2)


def projected_multipliers(data, xs) -> np.ndarray:
    lam = []
    for j in range(data.ndim):
        u = batch_contract(data, xs, j)
        lam.append(np.sum(xs[j].conj() * u, axis=1) / np.sum(np.abs(xs[j]) ** 2, axis=1))
    return np.stack(lam, axis=1)


def _rechart(xs, lam, piv, which, pick):
    """Re-pin modes flagged in ``which`` (B, d) at indices ``pick`` (B, d), rescaling lambda."""
    B, d = piv.shape
    c = np.ones((B, d), dtype=complex)
    rows = np.arange(B)
    for j in range(d):
        sel = which[:, j]
        if not np.any(sel):
            continue
        r = rows[sel]
        c[r, j] = xs[j][r, pick[r, j]]
        xs[j][r] /= c[r, j, None]
        piv[r, j] = pick[r, j]
        xs[j][r, piv[r, j]] = 1.0
    lam *= c ** 2 / np.prod(c, axis=1, keepdims=True)


def canonical_chart(xs):
    """Divide each vector by its largest coordinate; return (xs, pivots)."""
    piv = np.stack([np.argmax(np.abs(x), axis=1) for x in xs], axis=1)
    rows = np.arange(xs[0].shape[0])
    out = []
    for j, x in enumerate(xs):
        y = x / x[rows, piv[:, j], None]
        y[rows, piv[:, j]] = 1.0
        out.append(y)
    return out, piv


@dataclass
class BatchResult:
    points: List[np.ndarray]
    lam: np.ndarray
    status: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray

    def tuple(self, b: int) -> SingularTuple:
        return SingularTuple([p[b] for p in self.points])


def _solve(J, F):
    """Batched linear solve; the mask flags systems that were exactly singular."""
    try:
        return np.linalg.solve(J, -F[..., None])[..., 0], np.ones(len(F), dtype=bool)
    except np.linalg.LinAlgError:
        pass
    dz = np.zeros_like(F)
    ok = np.ones(len(F), dtype=bool)
    for b in range(len(F)):
        try:
            dz[b] = np.linalg.solve(J[b], -F[b])
        except np.linalg.LinAlgError:
            ok[b] = False
    return dz, ok


def newton_batch(T, starts: List[np.ndarray], tol: float = 1e-12,
                 max_iters: int = 50) -> BatchResult:
    """Run Newton from B starting tuples given as per-mode arrays of shape (B, n_j).

    Residuals are measured as ||F|| / max|T| in the canonical chart.
    """
    data = np.asarray(_data(T), dtype=float)
    dims = data.shape
    d = len(dims)
    scale = float(np.max(np.abs(data))) or 1.0
    xs = [np.array(x, dtype=complex, copy=True) for x in starts]
    if any(np.any(np.all(x == 0, axis=1)) for x in xs):
        raise ValidationError("starting vectors must be nonzero")
    B = xs[0].shape[0]
    xs, piv = canonical_chart(xs)
    lam = projected_multipliers(data, xs)
    status = np.full(B, "", dtype=object)
    iters = np.zeros(B, dtype=int)
    best = np.full(B, np.inf)
    stall = np.zeros(B, dtype=int)
    retried = np.zeros(B, dtype=bool)
    resid = np.full(B, np.inf)
    off = _offsets(dims)
    N = off[-1]

    for it in range(max_iters + 1):
        act = np.flatnonzero(status == "")
        if act.size == 0:
            break
        xa = [x[act] for x in xs]
        la, pa = lam[act], piv[act]
        # keep the pinned coordinate away from zero
        mags = np.stack([np.abs(x[np.arange(act.size), pa[:, j]]) / np.max(np.abs(x), axis=1)
                         for j, x in enumerate(xa)], axis=1)
        repin = mags < REPIN_RATIO
        if np.any(repin):
            pick = np.stack([np.argmax(np.abs(x), axis=1) for x in xa], axis=1)
            _rechart(xa, la, pa, repin, pick)
        F = batch_residual(data, xa, la)
        r = np.linalg.norm(F, axis=1) / scale
        resid[act] = r
        iters[act] = it
        done = r < tol
        bad = ~np.isfinite(r) | (np.max(np.stack([np.max(np.abs(x), axis=1) for x in xa], 1), 1) > BLOWUP)
        stall_a = np.where(r < best[act], 0, stall[act] + 1)
        stall[act] = stall_a
        best[act] = np.minimum(best[act], r)
        status[act[done]] = CONVERGED
        status[act[~done & (bad | (stall_a >= STALL_STEPS))]] = DIVERGED
        if it == max_iters:
            status[act[status[act] == ""]] = MAX_ITERS
        for j in range(d):
            xs[j][act] = xa[j]
        lam[act], piv[act] = la, pa
        step = np.flatnonzero(status[act] == "")
        if step.size == 0:
            continue
        sub = act[step]
        xb = [x[sub] for x in xs]
        lb, pb = lam[sub], piv[sub]
        J = batch_chart_jacobian(data, xb, lb, pb)
        dz, ok = _solve(J, F[step])
        # singular Jacobian: move to a different chart once, then give up
        for b in np.flatnonzero(~ok):
            g = sub[b]
            if retried[g]:
                status[g] = SINGULAR
                continue
            retried[g] = True
            which = np.zeros((1, d), dtype=bool)
            pick = np.zeros((1, d), dtype=int)
            for j in range(d):
                order = np.argsort(-np.abs(xs[j][g]), kind="stable")
                alt = [i for i in order if i != piv[g, j] and abs(xs[j][g, i]) > 0]
                if alt:
                    which[0, j], pick[0, j] = True, alt[0]
            one = [xs[j][g:g + 1].copy() for j in range(d)]
            lg, pg = lam[g:g + 1].copy(), piv[g:g + 1].copy()
            _rechart(one, lg, pg, which, pick)
            for j in range(d):
                xs[j][g] = one[j][0]
            lam[g], piv[g] = lg[0], pg[0]
        good = np.flatnonzero(ok)
        if good.size == 0:
            continue
        full = np.zeros((good.size, N + d), dtype=complex)
        np.put_along_axis(full, _kept_columns(dims, pb[good]), dz[good], axis=1)
        g = sub[good]
        for j in range(d):
            xs[j][g] += full[:, off[j]:off[j + 1]]
        lam[g] += full[:, N:]

    points, _ = canonical_chart(xs)
    return BatchResult(points, lam, status.astype(str), iters, resid)


def condition_numbers(T, points: List[np.ndarray]) -> np.ndarray:
    """2-norm condition of the chart Jacobian at canonical representatives."""
    data = np.asarray(_data(T), dtype=float)
    xs, piv = canonical_chart([np.asarray(p, dtype=complex) for p in points])
    lam = projected_multipliers(data, xs)
    return np.linalg.cond(batch_chart_jacobian(data, xs, lam, piv))


def jacobian_condition(T, tup: SingularTuple) -> float:
    return float(condition_numbers(T, [p[None, :] for p in tup.points])[0])


@dataclass(frozen=True)
class NewtonResult:
    tuple: SingularTuple
    condition: float
    iterations: int
    residual: float


def newton_refine(T, seed: SingularTuple, tol: float = 1e-12, max_iters: int = 50) -> NewtonResult:
    """Refine one tuple; raises :class:`DivergenceError` unless it converges."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    res = newton_batch(T, [p[None, :] for p in seed.points], tol=tol, max_iters=max_iters)
    if res.status[0] != CONVERGED:
        raise DivergenceError(res.status[0], int(res.iterations[0]), float(res.residual[0]))
    tup = res.tuple(0)
    return NewtonResult(tup, jacobian_condition(T, tup), int(res.iterations[0]), float(res.residual[0]))


class NewtonProblem:
    """The square chart system for a single tuple, as a map on packed unknowns.

    The packed vector lists the unpinned coordinates of x^(1), ..., x^(d)
    followed by lambda_1, ..., lambda_d.
    """

    def __init__(self, T, pivots):
        self.data = np.asarray(_data(T), dtype=float)
        self.dims = self.data.shape
        self.pivots = np.asarray(pivots, dtype=int).reshape(1, -1)
        self.size = sum(self.dims)

    def unpack(self, z):
        z = np.asarray(z, dtype=complex)
        xs, pos = [], 0
        for j, m in enumerate(self.dims):
            x = np.empty(m, dtype=complex)
            free = [i for i in range(m) if i != self.pivots[0, j]]
            x[free] = z[pos:pos + m - 1]
            x[self.pivots[0, j]] = 1.0
            pos += m - 1
            xs.append(x[None, :])
        return xs, z[pos:][None, :]

    def pack(self, xs, lam):
        parts = []
        for j, x in enumerate(xs):
            x = np.asarray(x, dtype=complex) / x[self.pivots[0, j]]
            parts.append(np.delete(x, self.pivots[0, j]))
        return np.concatenate(parts + [np.asarray(lam, dtype=complex)])

    def residual(self, z) -> np.ndarray:
        xs, lam = self.unpack(z)
        return batch_residual(self.data, xs, lam)[0]

    def jacobian(self, z) -> np.ndarray:
        xs, lam = self.unpack(z)
        return batch_chart_jacobian(self.data, xs, lam, self.pivots)[0]
