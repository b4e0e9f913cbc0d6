"""Acceptance criteria, one test each, each emitting a PASS/FAIL line."""
import itertools
import json
import time
from collections import Counter

import numpy as np
import pytest

from conftest import TABLE_ROWS, columns_match
from test_example_233 import HAND_FAMILIES, HAND_TYPE1
from test_spectra_enum import chow_bruteforce
from odeco_spectra.cli import main
from odeco_spectra.complex_geometry import (build_incidence_complex,
                                            formats_with_dimension,
                                            generic_count)
from odeco_spectra.numeric_lab import (NewtonProblem, SearchStrategy,
                                       find_all_singular_tuples,
                                       power_method_decompose)
from odeco_spectra.spectra_enum import (enumerate_type1, enumerate_type2,
                                        realize_type1, sample_base_point,
                                        type1_counts, type2_counts)
from odeco_spectra.tensor_core import (BASE, FIXED, SingularTuple,
                                       canonicalize_odeco, materialize,
                                       random_odeco, singular_classify,
                                       tuple_distance)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_counting_tables(report, capsys):
    start = time.perf_counter()
    bad = []
    for dims, (t1, t2, triples, generic) in TABLE_ROWS.items():
        main(["count", "--shape", ",".join(map(str, dims))])
        out = json.loads(capsys.readouterr().out)
        got = (out["type1"], out["type2"], out.get("vertices"), out["generic"])
        if got != (t1, t2, triples, generic):
            bad.append((dims, got))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    report(1, ok, f"{len(TABLE_ROWS)} table rows, mismatches={bad}, {elapsed:.2f}s (limit 5s)")


def test_criterion_02_chow_oracle(report):
    start = time.perf_counter()
    bad = []
    for dims in list(TABLE_ROWS) + [(2, 2, 3, 3)]:
        c = type2_counts(dims)
        if not c.closed_form == c.chow_count == chow_bruteforce(dims):
            bad.append(dims)
    elapsed = time.perf_counter() - start
    report(2, not bad and elapsed < 5, f"closed form vs truncated expansion, mismatches={bad}, {elapsed:.2f}s")


def test_criterion_03_2233_structure(report):
    cx = build_incidence_complex((2, 2, 3, 3))
    kinds = Counter("P2" if max(f.factor_dims) == 2 else "P1xP1" for f in cx.facets)
    dims = {f.dimension for f in cx.facets}
    t1 = type1_counts(2, 4).total
    generic = generic_count((2, 2, 3, 3))
    ok = (cx.facet_count == 19 and dims == {2} and kinds == {"P2": 4, "P1xP1": 15}
          and t1 == 18 and generic == 98 and generic - t1 == 80)
    report(3, ok, f"{cx.facet_count} facets of dim {dims}, {dict(kinds)}, type I {t1}, generic {generic}")


def test_criterion_04_formats(report):
    expected = {
        0: {(2, 2, 2), (3, 3, 3), (2, 2, 2, 2)},
        1: {(2, 3, 3), (2, 2, 4), (3, 3, 4), (4, 4, 4), (2, 2, 2, 3), (2, 2, 2, 2, 2)},
        2: {(2, 2, 2, 2, 2, 2), (2, 2, 2, 2, 3), (2, 2, 2, 4), (2, 2, 3, 3), (3, 3, 3, 3),
            (2, 2, 5), (3, 3, 5), (4, 4, 5), (5, 5, 5), (2, 3, 4), (3, 4, 4)},
    }
    lines = []
    ok = True
    for k, want in expected.items():
        got = set(formats_with_dimension(k))
        match = got == want
        ok &= match
        lines.append(f"k={k} {'match' if match else f'extra={sorted(got - want)} missing={sorted(want - got)}'}")
    report(4, ok, "; ".join(lines))


def test_criterion_05_soundness(report):
    start = time.perf_counter()
    failures, checked, worst = 0, 0, 0.0
    for dims in TABLE_ROWS:
        for seed in range(10):
            od = canonicalize_odeco(random_odeco(dims, seed))
            data = materialize(od)
            for spec in enumerate_type1(dims):
                c = singular_classify(data, realize_type1(spec, od))
                worst = max(worst, c.residual)
                failures += c.kind != FIXED or c.residual >= 1e-9
                checked += 1
            for comp in enumerate_type2(dims):
                for s in range(3):
                    c = singular_classify(data, sample_base_point(comp, od, seed=s))
                    worst = max(worst, c.residual)
                    failures += c.kind != BASE or c.residual >= 1e-9
                    checked += 1
    elapsed = time.perf_counter() - start
    report(5, failures == 0 and elapsed < 60,
           f"{checked} tuples, {failures} misclassified, worst residual {worst:.1e}, {elapsed:.1f}s (limit 60s)")


def test_criterion_06_example_enumeration(report, example22):
    S, _ = example22
    got = [realize_type1(s, S) for s in enumerate_type1(S.shape)]
    type1_ok = len(got) == 6 and all(
        min(tuple_distance(SingularTuple(p), g) for g in got) < 1e-12 for p in HAND_TYPE1)
    families = set()
    for comp in enumerate_type2(S.shape):
        families.add(tuple(tuple(i for i in range(m) if i >= 2 or j not in comp.pattern.rows[i])
                           for j, m in enumerate(S.shape.dims)))
    type2_ok = families == {tuple(map(tuple, f)) for f in HAND_FAMILIES}
    cx = build_incidence_complex(S.shape)
    triples = {v.point(S.shape): len(v.facets) for v in cx.vertices}
    triples_ok = triples == {(0, 2, 2): 3, (1, 2, 2): 3}
    report(6, type1_ok and type2_ok and triples_ok,
           f"type I {type1_ok}, type II (fourth family lead e_2) {type2_ok}, triple points {triples_ok}")


def test_criterion_07_perturbation(report, example22):
    S, T = example22
    Se = materialize(S).data + 1e-6 * T.data
    start = time.perf_counter()
    summaries = []
    ok = True
    for seed in range(3):
        res = find_all_singular_tuples(Se, SearchStrategy(reference=S), seed=seed)
        kinds = Counter(c.kind for c in res)
        vertex_cond = [c.jacobian_condition for c in res if c.kind == "vertex"]
        run_ok = (len(res) == 13 and kinds == {"type1": 6, "facet": 5, "vertex": 2}
                  and all(k > 1e4 for k in vertex_cond) and res.multiplicity == 15)
        ok &= run_ok
        summaries.append(f"seed {seed}: {len(res)} clusters {dict(kinds)} mult {res.multiplicity} "
                         f"vertex cond >= {min(vertex_cond, default=0):.1e}")
    elapsed = time.perf_counter() - start
    report(7, ok and elapsed < 120, "; ".join(summaries) + f"; {elapsed:.1f}s (limit 120s)")


def test_criterion_08_generic(report):
    hits = 0
    for seed in range(20):
        data = np.random.default_rng(1000 + seed).standard_normal((2, 2, 2))
        hits += len(find_all_singular_tuples(data, seed=seed)) == 6
    report(8, hits >= 19, f"{hits}/20 random 2x2x2 tensors gave exactly 6 clusters (need 19)")


def test_criterion_09_power_method(report):
    start = time.perf_counter()
    worst_sigma = worst_col = 0.0
    for dims in [(2, 2, 2), (3, 3, 3), (2, 3, 4)]:
        for seed in range(20):
            od = random_odeco(dims, seed)
            got = power_method_decompose(materialize(od), seed=seed)
            order = np.argsort(-od.sigmas)
            worst_sigma = max(worst_sigma, float(np.max(np.abs(got.sigmas - od.sigmas[order]))))
            for j in range(len(dims)):
                worst_col = max(worst_col, columns_match(got.vectors(j), od.vectors(j)[:, order]))
    elapsed = time.perf_counter() - start
    report(9, worst_sigma < 1e-8 and worst_col < 1e-6 and elapsed < 60,
           f"60 round trips, sigma err {worst_sigma:.1e}, column err {worst_col:.1e}, {elapsed:.1f}s")


def test_criterion_10_jacobian(report):
    worst = 0.0
    for dims in [(2, 3, 3), (3, 3, 3)]:
        rng = np.random.default_rng(sum(dims))
        data = rng.standard_normal(dims)
        for _ in range(100):
            prob = NewtonProblem(data, [int(rng.integers(m)) for m in dims])
            z = rng.standard_normal(prob.size) + 1j * rng.standard_normal(prob.size)
            J = prob.jacobian(z)
            h = 1e-6
            fd = np.column_stack([
                (prob.residual(z + h * e) - prob.residual(z - h * e)) / (2 * h)
                for e in np.eye(prob.size)])
            worst = max(worst, float(np.linalg.norm(J - fd) / np.linalg.norm(J)))
    report(10, worst < 1e-5, f"200 points, worst relative error {worst:.1e} (limit 1e-5)")
