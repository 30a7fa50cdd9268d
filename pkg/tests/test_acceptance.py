"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as they come;
they are also repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from tailforge import (
    CoordinateSpace,
    FunctionTable,
    ProductSpace,
    delta_squared,
    duality_value,
    entropy,
    herbst_mgf_check,
    log_sobolev_gap,
    tensorization_gap,
    variation_value,
)
from tailforge.entropy import random_space, random_table
from tailforge.montecarlo import SYMMETRIC_DEFAULT, SimulationConfig, tail_estimate
from tailforge.rng import SeedTag
from tailforge.spectra import (
    covariance_spectrum,
    mp_distance,
    rademacher_columns,
    sample_rectangular,
    theorem2_delta_check,
)

VERDICTS = []


def verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    VERDICTS.append(line)
    print("\n" + line)
    return ok


@pytest.fixture(scope="module")
def desk_report():
    start = time.perf_counter()
    report = tail_estimate(SimulationConfig(), workers=1)
    return report, time.perf_counter() - start


def test_criterion_1_exact_entropy_suite():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst_gap, worst_rel = np.inf, 0.0
    for _ in range(1000):
        G = random_table(rng, random_space(rng, max_coords=4, max_points=4))
        h = entropy(G)
        worst_gap = min(worst_gap, tensorization_gap(G))
        for value in (duality_value(G, G), variation_value(G, G.mean())):
            err = abs(value - h)
            worst_rel = max(worst_rel, err / abs(h) if h else (np.inf if err else 0.0))
    elapsed = time.perf_counter() - start
    ok = worst_gap >= -1e-12 and worst_rel <= 1e-12 and elapsed < 30
    assert verdict(1, ok, f"min tensorization gap {worst_gap:.3g}, max attainment rel err {worst_rel:.3g}, "
                          f"{elapsed:.1f}s")


def test_criterion_2_log_sobolev_and_herbst():
    rng = np.random.default_rng(1002)
    grids = {"left": (-2.0, -1.0, -0.5, -0.1), "maurer": (0.1, 0.5, 1.0, 2.0)}
    start = time.perf_counter()
    worst_ls, worst_herbst = np.inf, -np.inf
    for _ in range(200):
        Z = random_table(rng, random_space(rng, max_coords=4, max_points=4), -2.0, 2.0, positive=False)
        for choice, lams in grids.items():
            report = delta_squared(Z, choice)
            for lam in lams:
                worst_ls = min(worst_ls, log_sobolev_gap(Z, lam, report.perturbed))
                lhs, rhs = herbst_mgf_check(Z, lam, report.sup_norm, choice)
                worst_herbst = max(worst_herbst, lhs - rhs)
    elapsed = time.perf_counter() - start
    ok = worst_ls >= -1e-10 and worst_herbst <= 1e-10 and elapsed < 60
    assert verdict(2, ok, f"min log-Sobolev gap {worst_ls:.3g}, max Herbst lhs-rhs {worst_herbst:.3g}, "
                          f"{elapsed:.1f}s")


def test_criterion_3_asymmetry_witness():
    c = CoordinateSpace([0, 1], [0.5, 0.5])
    Z = FunctionTable.from_function(ProductSpace([c, c]), max)
    m = delta_squared(Z, "maurer").sup_norm
    left = delta_squared(Z, "left").sup_norm
    assert verdict(3, m == 1.0 and left == 2.0, f"sup Delta_M^2 = {m!r}, sup Delta_L^2 = {left!r}")


def test_criterion_4_column_replacement_chain():
    start = time.perf_counter()
    checked, violations = 0, []
    for n, N in ((3, 6), (4, 8), (5, 10)):
        cand = rademacher_columns(n)
        for i in range(100):
            X = sample_rectangular(n, N, "rademacher", SeedTag(4004, i))
            for k in range(1, n + 1):
                report = theorem2_delta_check(X, k, cand)
                checked += 1
                violations.extend(report.violations)
    elapsed = time.perf_counter() - start
    ok = not violations and elapsed < 600
    assert verdict(4, ok, f"{checked} (sample, k) checks, {len(violations)} violations, {elapsed:.1f}s")


def test_criterion_5_desk_monte_carlo(desk_report):
    report, elapsed = desk_report
    margin = min(min(r.margin("right"), r.margin("left")) for r in report.rows)
    ok = report.passed and elapsed < 300
    assert verdict(5, ok, f"{len(report.rows)} thresholds x 2 sides, tightest margin {margin:.4f}, "
                          f"center {report.center:.5f} +- {report.center_stderr:.2g}, {elapsed:.1f}s")


@pytest.mark.parametrize("k", [1, 2])
def test_criterion_6_symmetric_against_maurer(k):
    config = SYMMETRIC_DEFAULT.replace(k=k, samples=20000)
    report = tail_estimate(config)
    margin = min(min(r.margin("right"), r.margin("left")) for r in report.rows)
    ordered = all(r.bound_left > r.bound_right for r in report.rows if r.t > 0)
    ok = report.passed and ordered
    assert verdict(6, ok, f"k={k}: tails within slack {report.passed}, left bound > right bound {ordered}, "
                          f"tightest margin {margin:.4f}")


def test_criterion_7_worker_determinism(desk_report):
    one, _ = desk_report
    eight = tail_estimate(SimulationConfig(), workers=8)
    same_csv = one.to_csv() == eight.to_csv()
    same_json = one.to_json_text() == eight.to_json_text()
    assert verdict(7, same_csv and same_json, f"CSV identical {same_csv}, JSON identical {same_json}")


def test_criterion_8_marcenko_pastur_sanity():
    n, N = 400, 800
    spectra = [covariance_spectrum(sample_rectangular(n, N, "rademacher", SeedTag(11, i))) for i in range(20)]
    ks = mp_distance(spectra, n / N)
    assert verdict(8, ks < 0.05, f"KS distance {ks:.4f} (soft asymptotic check, threshold 0.05)")
