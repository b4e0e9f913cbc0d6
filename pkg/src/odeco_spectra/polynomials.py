"""Exact multivariate polynomials truncated by per-variable degree caps.

A polynomial is a dict mapping exponent tuples to Python ints. Any monomial
whose exponent in variable j exceeds ``caps[j]`` is dropped, which models the
quotient ring Z[t_1..t_d] / <t_j^(caps[j]+1)>.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Dict, Sequence, Tuple

Poly = Dict[Tuple[int, ...], int]


def one(nvars: int) -> Poly:
    return {(0,) * nvars: 1}


def monomial(nvars: int, exps: dict, coeff: int = 1) -> Poly:
    e = [0] * nvars
    for j, k in exps.items():
        e[j] += k
    return {tuple(e): coeff}


def add(p: Poly, q: Poly) -> Poly:
    out = defaultdict(int, p)
    for e, c in q.items():
        out[e] += c
    return {e: c for e, c in out.items() if c}


def mul(p: Poly, q: Poly, caps: Sequence[int]) -> Poly:
    out: Dict[Tuple[int, ...], int] = defaultdict(int)
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if any(x > cap for x, cap in zip(e, caps)):
                continue
            out[e] += c1 * c2
    return {e: c for e, c in out.items() if c}


def power(p: Poly, k: int, caps: Sequence[int]) -> Poly:
    result = one(len(caps))
    base = p
    while k:
        if k & 1:
            result = mul(result, base, caps)
        k >>= 1
        if k:
            base = mul(base, base, caps)
    return result


def coefficient(p: Poly, exps: Sequence[int]) -> int:
    return p.get(tuple(exps), 0)
