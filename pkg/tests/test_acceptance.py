"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from stoplight.asymptotics import limit_constants
from stoplight.cli import run
from stoplight.ell2 import appendix_cascade, closed_form_g, dp_partial_sum
from stoplight.montecarlo import (SimConfig, estimate_moments, max_histogram, merge_histograms,
                                  result_from_counts, universality_experiment)
from stoplight.series import (Series, em2n_gf, lambda_from_theta, max_gf_coeffs, theta_series)
from stoplight.stationary import (ell1_pmf, ell2_mean, ell2_pmf_printed, stationary_model,
                                  stationary_moments, stationary_pmf, total_variation)
from stoplight.walk import FLOAT, iter_joint, joint_dist, make_params, max_dist, moment, s_marginal

from conftest import enumerate_paths, record_criterion

LARGE_N, SMALL_N, REPS, SEED = 20_000, 200, 100_000, 20240601


def test_criterion_1_enumeration_oracle():
    t0 = time.perf_counter()
    bad = [(ell, p, n) for ell in (1, 2, 3) for p in ("1/3", "1/2") for n in range(1, 13)
           if joint_dist(make_params(p, ell), n).entries() != enumerate_paths(p, ell, n)]
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    assert record_criterion(1, ok, f"72 cases, mismatches={bad}, {elapsed:.1f}s")


def test_criterion_2_one_step_generating_function():
    t0 = time.perf_counter()
    bad = []
    for p in ("1/3", "2/5", "1/2"):
        tables = list(iter_joint(make_params(p, 1), 50))
        for a in range(1, 6):
            # max_gf_coeffs raises if the two closed-form routes disagree
            c = max_gf_coeffs(p, a, 25)
            if [c[n] for n in range(1, 26)] != [max_dist(tables[2 * n])[a] for n in range(1, 26)]:
                bad.append((p, a))
        if max_gf_coeffs(p, 1, 2)[1] != Fraction(p):
            bad.append((p, "c1"))
    spot = max_gf_coeffs("1/3", 1, 2)[2] == Fraction(14, 27)
    elapsed = time.perf_counter() - t0
    ok = not bad and spot and elapsed < 120
    assert record_criterion(2, ok, f"mismatches={bad}, c_2(1/3)=14/27: {spot}, {elapsed:.1f}s")


def test_criterion_3_mean_max_series():
    g = em2n_gf(25)
    tables = list(iter_joint(make_params("1/2", 1), 50))
    dp = [moment(max_dist(tables[2 * n]), 1) for n in range(1, 26)]
    ok = [g[n] for n in range(1, 26)] == dp and dp[:2] == [Fraction(1, 2), Fraction(7, 8)]
    assert record_criterion(3, ok, "25 exact coefficients; first two 1/2, 7/8")


def test_criterion_4_theta_inverse():
    ok = all(lambda_from_theta(theta_series(p, 30), p) == Series.variable(30) for p in ("1/3", "1/2"))
    assert record_criterion(4, ok, "2t/(t+2pq)^2 at theta is lam through degree 30")


def test_criterion_5_two_step_closed_forms():
    t0 = time.perf_counter()
    worst = []
    for p, lam in ((0.3, 0.25), (0.5, 0.5), (0.4, 0.1)):
        cascade = appendix_cascade(p, lam, 2)
        for which in ((0, 1), (1, 1), (0, 2)):
            g = closed_form_g(p, lam, which)
            dp, tail = dp_partial_sum(p, lam, *which, 60)
            rel = abs(g - cascade[which]) / abs(g)
            worst.append((abs(g - dp) <= tail + 1e-8 and rel <= 1e-8, (p, lam, which), rel))
    elapsed = time.perf_counter() - t0
    ok = all(w[0] for w in worst) and elapsed < 60
    assert record_criterion(5, ok, f"max cascade rel diff {max(w[2] for w in worst):.2e}, {elapsed:.1f}s")


def test_criterion_6_stationary():
    checks = {}
    for p in (Fraction(1, 3), Fraction(2, 5)):
        pmf = stationary_pmf(stationary_model(p, 1), 30).values
        checks[f"geometric p={p}"] = max(abs(pmf[x] - ell1_pmf(p, x)) for x in range(31)) < 1e-10
    p = Fraction(1, 3)
    m1, m2 = stationary_model(p, 1), stationary_model(p, 2)
    pmf2 = stationary_pmf(m2, 1).values
    p0, p1 = ell2_pmf_printed(p)
    checks["ell2 x=0,1"] = abs(pmf2[0] - p0) < 1e-10 and abs(pmf2[1] - p1) < 1e-10
    checks["ell2 x=0 ~ 0.80913"] = abs(pmf2[0] - 0.809128) < 5e-6
    h1, h2 = stationary_moments(m1)
    checks["ell1 moments"] = abs(h1 - 1 / 3) < 1e-9 and abs(h2 - 2 / 9) < 1e-9
    mean2 = stationary_moments(m2)[0]
    checks["ell2 mean"] = abs(mean2 - ell2_mean(p)) < 1e-9 and abs(mean2 - 0.260259) < 1e-6
    for ell, model in ((1, m1), (2, m2)):
        marg = s_marginal(joint_dist(make_params(p, ell, FLOAT), 4000)).values
        tv = total_variation(marg, stationary_pmf(model, 400).values)
        checks[f"TV ell={ell} n=4000"] = tv < 1e-4
    failed = [k for k, v in checks.items() if not v]
    assert record_criterion(6, not failed, f"{len(checks)} checks, failed={failed}")


@pytest.fixture(scope="module")
def fair_runs():
    out = {}
    for ell, n in ((1, SMALL_N), (1, LARGE_N), (2, LARGE_N)):
        out[ell, n] = estimate_moments(SimConfig(make_params("1/2", ell, FLOAT), n, REPS, SEED))
    return out


def test_criterion_7_limit_constants(fair_runs):
    first, second = limit_constants()
    dev = {n: (abs(r.scaled_first - first) / first, abs(r.scaled_second - second) / second)
           for (ell, n), r in fair_runs.items() if ell == 1}
    big, small = dev[LARGE_N], dev[SMALL_N]
    elapsed = sum(r.elapsed for r in fair_runs.values())
    ok = big[0] < 0.05 and big[1] < 0.07 and big[0] < small[0] and big[1] < small[1] and elapsed < 600
    assert record_criterion(
        7, ok, f"rel dev n={LARGE_N}: {big[0]:.4f}, {big[1]:.4f}; n={SMALL_N}: "
               f"{small[0]:.4f}, {small[1]:.4f} (consistency check of Abel limits)")


def test_criterion_8_universality_probe(fair_runs):
    one, two = fair_runs[1, LARGE_N], fair_runs[2, LARGE_N]
    rel = abs(two.scaled_first / one.scaled_first - 1)
    se = math.hypot(one.stderr_mean, two.stderr_mean)
    z = (two.mean_max - one.mean_max) / se
    report = universality_experiment("1/2", [1], 10, 1024, SEED)
    ok = rel < 0.02 and abs(z) < 3 and "conjecture" in report.label
    assert record_criterion(8, ok, f"ell=2 vs ell=1 E(M_n)/sqrt(n): rel diff {rel:.4f}, z={z:.2f} "
                                   "(conjecture check)")


def test_criterion_9_reproducibility(tmp_path):
    runs = [
        ["simulate", "--p", "1/2", "--ell", "2", "--n", "2000", "--reps", "5000", "--seed", "99"],
        ["universality", "--p", "1/2", "--ells", "1,2,3", "--n", "1000", "--reps", "3000",
         "--seed", "99"],
    ]
    identical = True
    for k, argv in enumerate(runs):
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{k}-{rep}.json"
            identical &= run(argv + ["--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        identical &= blobs[0] == blobs[1]
    config = SimConfig(make_params("1/3", 1, FLOAT), 500, 5000, 7)
    sequential = estimate_moments(config)
    cuts = [0, 1, 999, 1024, 3100, 5000]
    merged = result_from_counts(config, merge_histograms(
        max_histogram(config, a, b) for a, b in zip(cuts, cuts[1:])))
    threaded = estimate_moments(config, workers=4)
    ok = identical and merged == sequential == threaded
    assert record_criterion(9, ok, f"byte-identical reruns: {identical}; split merge exact: "
                                   f"{merged == sequential == threaded}")
