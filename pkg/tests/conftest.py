import itertools

import numpy as np
import pytest

from odeco_spectra.fixtures import load_fixture

# Table rows: shape -> (type I, facets, triple points or None, generic count)
TABLE_ROWS = {
    (2, 2, 2): (6, 0, None, 6),
    (3, 3, 3): (31, 6, None, 37),
    (2, 2, 2, 2): (18, 6, None, 24),
    (2, 3, 3): (6, 5, 2, 15),
    (2, 2, 4): (6, 2, 0, 8),
    (3, 3, 4): (31, 12, 6, 55),
    (4, 4, 4): (156, 36, 24, 240),
    (2, 2, 2, 3): (18, 12, 6, 42),
    (2, 2, 2, 2, 2): (50, 30, 20, 120),
}


def loop_materialize(sigmas, factors):
    """Entry-by-entry sum over rank-one terms."""
    dims = tuple(V.shape[0] for V in factors)
    out = np.zeros(dims)
    for idx in itertools.product(*(range(m) for m in dims)):
        out[idx] = sum(s * np.prod([V[i, k] for V, i in zip(factors, idx)])
                       for k, s in enumerate(sigmas))
    return out


def loop_contract(data, vectors):
    """Triple-loop contraction; one slot may be None."""
    open_slots = [j for j, v in enumerate(vectors) if v is None]
    if open_slots:
        j0 = open_slots[0]
        out = np.zeros(data.shape[j0], dtype=complex)
    else:
        out = 0j
    for idx in itertools.product(*(range(m) for m in data.shape)):
        w = data[idx]
        for j, v in enumerate(vectors):
            if v is not None:
                w = w * v[idx[j]]
        if open_slots:
            out[idx[j0]] += w
        else:
            out += w
    return out


def columns_match(A, B):
    """Largest column error between A and B allowing a sign flip per column."""
    return max(min(np.linalg.norm(a - b), np.linalg.norm(a + b)) for a, b in zip(A.T, B.T))


@pytest.fixture(scope="session")
def example22():
    return load_fixture("example22")
