"""Acceptance criteria 1-11.

Each test records one line in RESULTS; conftest prints them after the run.
Run on its own with ``python3 -m pytest tests/test_acceptance.py -v``.
"""
import random
import sys
import time
from collections import Counter
from fractions import Fraction as F

import numpy as np
import pytest

from grothendieck.core import (enumerate_partitions, exact_det, partition_to_particles, particles_to_partition,
                              profile_of)
from grothendieck.limitshape import (AsymptoticParams, cubic_coefficients, cubic_discriminant,
                                     cusp_discriminant_closed_form, cusp_polynomial, gradient_grid,
                                     limit_shape, shape_W, shape_function, vkls_deviation)
from grothendieck.measures import (GrothendieckModel, cauchy_normalization, grothendieck_weight,
                                   normalization, tilted_weight, truncated_total)
from grothendieck.pmap import (cluster_from_minors, determinantality_witness, nanson4, nanson_n,
                               principal_minors, witness_scale)
from grothendieck.sampler import RngSpec, sample_grothendieck, sample_schur_process
from grothendieck.schur2d import (KernelQuery, contour_kernel, correlation_function, diagonal_marginal,
                                  em_kernel, enumerate_configs_2d, one_point_closed_form,
                                  two_point_closed_form, weight_2d)

RESULTS: dict[int, str] = {}

HALF = GrothendieckModel.homogeneous(2, F(1, 2), F(1, 2), F(-1))
QUARTER = GrothendieckModel.homogeneous(2, F(1, 2), F(1, 2), F(-1, 4))


def record(n, title, checks, detail=""):
    ok = all(checks.values())
    bad = [k for k, v in checks.items() if not v]
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    if bad:
        line += "  failed: " + ", ".join(bad)
    RESULTS[n] = line
    print(line)
    assert ok, line


def _random_matrix(rng, n):
    return [[F(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)] for _ in range(n)]


def _distinct(rng, n, lo=1, hi=9, den=10):
    vals = rng.sample(range(lo, hi), n)
    return [F(v, den) for v in vals]


# ---------------------------------------------------------------- 1-2

def test_c01_nanson_witness():
    t = time.perf_counter()
    raw = determinantality_witness(HALF, [0, 1, 2, 3])
    scaled = witness_scale(F(-1)) * raw
    dt = time.perf_counter() - t
    record(1, "Nanson witness at N=2, (1/2,1/2,-1)", {
        "exact rational": isinstance(scaled, F),
        "4 s.f. = 0.00005021": f"{float(scaled):.4g}" == "5.021e-05",
        "runtime < 1 s": dt < 1,
    }, f"scaled={float(scaled):.6e}, {dt:.2f}s")


def test_c02_nanson_vanishing():
    rng = random.Random(2024)
    t = time.perf_counter()
    n4 = [nanson4(cluster_from_minors(principal_minors(_random_matrix(rng, 4)))) for _ in range(1000)]
    n5 = [nanson_n(cluster_from_minors(principal_minors(_random_matrix(rng, 5)))).relative for _ in range(100)]
    dt = time.perf_counter() - t
    record(2, "Nanson vanishing on genuine matrices", {
        "N4 = 0 on 1000 4x4": all(v == 0 for v in n4),
        "N5 relative < 1e-8 on 100 5x5": max(n5) < 1e-8,
        "runtime < 60 s": dt < 60,
    }, f"max N5 rel={max(n5):.1e}, {dt:.1f}s")


# ---------------------------------------------------------------- 3-4

def test_c03_measure_consistency():
    rng = random.Random(3)
    t = time.perf_counter()
    weight_ok = norm_ok = True
    count = 0
    for N in (1, 2, 3):
        M = GrothendieckModel.from_vectors(_distinct(rng, N), _distinct(rng, N),
                                           [-F(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(N - 1)])
        E = M.ensemble()
        Z = normalization(E)
        norm_ok &= Z == cauchy_normalization(M)
        for lam in enumerate_partitions(N, 6):
            weight_ok &= grothendieck_weight(lam, M) == tilted_weight(E, partition_to_particles(lam, N)) / Z
            count += 1
    dt = time.perf_counter() - t
    record(3, "weight = tilted/normalization, det = Cauchy product", {
        "weights exact": weight_ok, "normalization exact": norm_ok, "runtime < 60 s": dt < 60,
    }, f"{count} partitions, {dt:.1f}s")


def test_c04_cauchy_identity():
    t = time.perf_counter()
    deficits = []
    for x, y, b in [(F(1, 2), F(1, 2), F(-1)), (F(1, 3), F(1, 5), F(-6))]:
        total, _ = truncated_total(GrothendieckModel.homogeneous(2, x, y, b), tol=1e-10)
        deficits.append(abs(float(1 - total)))
    dt = time.perf_counter() - t
    record(4, "truncated weight sums reach 1", {
        "within 1e-8": max(deficits) < 1e-8, "runtime < 10 s": dt < 10,
    }, f"deficits={deficits[0]:.1e},{deficits[1]:.1e}, {dt:.1f}s")


# ---------------------------------------------------------------- 5-7

@pytest.fixture(scope="module")
def half_2d():
    E = HALF.ensemble()
    return E, diagonal_marginal(E, 30)


def test_c05_embedding(half_2d):
    t = time.perf_counter()
    E, law = half_2d
    support = set(law) | {partition_to_particles(l, 2).points for l in enumerate_partitions(2, 29)}
    disc = F(0)
    for d in support:
        disc += abs(law.get(d, F(0)) - grothendieck_weight(particles_to_partition(d), HALF))
    dt = time.perf_counter() - t
    record(5, "diagonal marginal of the 2D ensemble is the Grothendieck law", {
        "total discrepancy < 1e-8": float(disc) < 1e-8, "runtime < 60 s": dt < 60,
    }, f"discrepancy={float(disc):.1e}, {dt:.1f}s")


def _brute_rho(E, cap, pts):
    Z = normalization(E)
    total = F(0)
    for X in enumerate_configs_2d(E.N, cap):
        if all(a in X.x[t - 1] for a, t in pts):
            total += weight_2d(E, X)
    return total / Z


def test_c06_kernel_equivalence():
    t = time.perf_counter()
    E = QUARTER.ensemble()
    worst_em = 0.0
    for pts in ([(0, 1)], [(3, 2)], [(2, 2), (1, 1)], [(4, 1), (3, 2)], [(3, 1), (1, 2)]):
        K = [[em_kernel(E, KernelQuery(a, ta, b, tb)) for (b, tb) in pts] for (a, ta) in pts]
        worst_em = max(worst_em, abs(float(exact_det(K) - _brute_rho(E, 24, pts))))
    worst_c = 0.0
    for q in [(0, 1, 0, 1), (1, 1, 2, 2), (1, 2, 2, 1), (3, 2, 1, 2), (5, 1, 4, 1)]:
        Q = KernelQuery(*q)
        worst_c = max(worst_c, abs(contour_kernel(QUARTER, Q, nodes=2048) - float(em_kernel(E, Q))))
    dt = time.perf_counter() - t
    record(6, "kernel determinants and contour vs EM", {
        "EM vs brute < 1e-8": worst_em < 1e-8, "contour vs EM < 1e-10": worst_c < 1e-10,
        "runtime < 120 s": dt < 120,
    }, f"em={worst_em:.1e}, contour={worst_c:.1e}, {dt:.1f}s")


def test_c07_closed_form_correlations():
    rng = random.Random(7)
    ok1 = ok2 = True
    triples = []
    for _ in range(5):
        x, y = F(rng.randint(1, 6), 7), F(rng.randint(1, 6), 7)
        b = -F(rng.randint(1, 12), rng.randint(1, 4))
        triples.append(f"({x},{y},{b})")
        M = GrothendieckModel.homogeneous(2, x, y, b)
        E = M.ensemble()
        ok1 &= all(correlation_function(E, [i]) == one_point_closed_form(M, i) for i in range(4))
        ok2 &= all(correlation_function(E, [i, j]) == two_point_closed_form(M, i, j)
                   for i, j in [(1, 0), (2, 0), (3, 1), (4, 1), (5, 2)])
    record(7, "displayed one- and two-point formulas", {
        "one-point exact": ok1, "two-point exact": ok2,
    }, " ".join(triples))


# ---------------------------------------------------------------- 8

def _box_means(N, x, y, b, n, seed):
    M = GrothendieckModel.homogeneous(N, x, y, b)
    top = bottom = 0
    for k in range(n):
        mus = sample_schur_process(M, RngSpec(seed, k))
        top += mus[0].size
        bottom += mus[-1].size
    return top / n, bottom / n


def mu_bottom_formula(N, x, y, b):
    return N * N * x * y / (1 - x * y)


def mu_top_uncorrected(N, x, y, b):
    return N * N * x * y / (1 - x * y) - N * (N - 1) * b * y


def mu_top_corrected(N, x, y, b):
    # N(N-1) pairs between x and the dual -beta specialization
    return N * N * x * y / (1 - x * y) + N * (N - 1) * (-b * x) / (1 - b * x)


@pytest.mark.slow
def test_c08_sampler_law(half_2d):
    t = time.perf_counter()
    n = 100_000
    counts = Counter(sample_grothendieck(HALF, RngSpec(8, k)).parts for k in range(n))
    support = set(counts) | {l.parts for l in enumerate_partitions(2, 14)}
    tv = 0.5 * sum(abs(counts.get(l, 0) / n - float(grothendieck_weight(l, HALF))) for l in support)

    # exact N = 2 box counts from the 2D enumeration pin down which mu^1 formula is right
    E, _ = half_2d
    Z = normalization(E)
    e_top = e_bot = F(0)
    for X in enumerate_configs_2d(2, 30):
        w = weight_2d(E, X)
        e_top += w * (sum(X.x[0]) - 1)
        e_bot += w * (sum(X.x[1]) - 1)
    e_top, e_bot = float(e_top / Z), float(e_bot / Z)
    args2 = (2, 0.5, 0.5, -1.0)

    N, x, y, b = 10, 0.25, 0.25, -1.0
    top, bottom = _box_means(N, F(1, 4), F(1, 4), F(-1), 10_000, 88)
    dt = time.perf_counter() - t
    record(8, "sampler law and box counts", {
        "TV < 0.02 (1e5 samples)": tv < 0.02,
        "E|mu^N| within 5%": abs(bottom / mu_bottom_formula(N, x, y, b) - 1) < 0.05,
        "E|mu^1| within 5% (corrected formula)": abs(top / mu_top_corrected(N, x, y, b) - 1) < 0.05,
        "exact N=2 matches corrected formula": abs(e_top - mu_top_corrected(*args2)) < 1e-9
        and abs(e_bot - mu_bottom_formula(*args2)) < 1e-9,
        "runtime < 120 s": dt < 120,
    }, f"TV={tv:.4f}, E|mu^N|={bottom:.3f}/{mu_bottom_formula(N, x, y, b):.3f}, "
       f"E|mu^1|={top:.3f}/{mu_top_corrected(N, x, y, b):.3f} (uncorrected "
       f"{mu_top_uncorrected(N, x, y, b):.3f}), {dt:.1f}s")


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the -N(N-1)*beta*y form of E|mu^1| disagrees with exact enumeration")
def test_c08_uncorrected_mu1_formula():
    top, _ = _box_means(10, F(1, 4), F(1, 4), F(-1), 10_000, 88)
    assert abs(top / mu_top_uncorrected(10, 0.25, 0.25, -1.0) - 1) < 0.05


# ---------------------------------------------------------------- 9-11

P6 = AsymptoticParams(1 / 3, 1 / 5, -6)
P25 = AsymptoticParams(1 / 3, 1 / 5, -25)


@pytest.fixture(scope="module")
def shapes():
    t = time.perf_counter()
    out = {-6: limit_shape(P6, tau_steps=200, xi_points=400), -25: limit_shape(P25, tau_steps=200, xi_points=400)}
    return out, time.perf_counter() - t


def _boundary_residual(sg):
    worst = 0.0
    for q in sg.boundary:
        c = np.array([float(np.asarray(v)) for v in cubic_coefficients(sg.p, q.xi, q.tau)])
        scale = np.abs(c).sum() * max(1.0, abs(q.z)) ** 3
        worst = max(worst, abs(np.polyval(c, q.z)) / scale, abs(np.polyval(np.polyder(c), q.z)) / scale)
    return worst


@pytest.mark.slow
def test_c09_limit_shape_structure(shapes):
    sgs, dt_build = shapes
    t = time.perf_counter()
    L_end = all(sg.L[-1] == 0 for sg in sgs.values())
    tri = True
    for sg in sgs.values():
        gx, gt = gradient_grid(sg)
        tri &= bool(np.all(gx >= -1 - 1e-9) and np.all(gt >= gx - 1e-9) and np.all(gt <= 1e-9))
    resid = max(_boundary_residual(sg) for sg in sgs.values())
    rng = random.Random(9)
    cusp_rel = 0.0
    for _ in range(20):
        p = AsymptoticParams(rng.uniform(0.05, 0.9), rng.uniform(0.05, 0.9), -rng.uniform(0.01, 30))
        want = cusp_discriminant_closed_form(p)
        cusp_rel = max(cusp_rel, abs(cubic_discriminant(cusp_polynomial(p)) - want) / abs(want))
    W = np.array(shape_W(sgs[-25]))
    du, dw = np.diff(W[:, 0]), np.diff(W[:, 1])
    flat = int(np.sum((np.abs(du) > 1e-6) & (np.abs(dw) < 1e-9 * np.abs(du))))  # u runs backwards in tau
    dt = dt_build + time.perf_counter() - t
    record(9, "limit-shape structure at (1/3,1/5,-6) and (1/3,1/5,-25), 200x400", {
        "L(1) = 0": L_end, "gradient triangle": tri, "boundary P, P' < 1e-8": resid < 1e-8,
        "cusp discriminant rel < 1e-10": cusp_rel < 1e-10, "flat W stretch at beta=-25": flat > 0,
        "runtime < 120 s": dt < 120,
    }, f"residual={resid:.1e}, cusp rel={cusp_rel:.1e}, flat segments={flat}, {dt:.1f}s")


@pytest.mark.slow
def test_c10_sample_vs_shape(shapes):
    sgs, _ = shapes
    W = shape_function(sgs[-25])
    N = 50
    M = GrothendieckModel.homogeneous(N, F(1, 3), F(1, 5), F(-25))
    us = np.linspace(-3, 5, 4001)
    devs = []
    for seed in range(10):
        prof = profile_of(sample_grothendieck(M, RngSpec(seed)), N)
        emp = np.array([float(prof(u * N)) / N for u in us])
        devs.append(float(np.max(np.abs(emp - W(us)))))
    good = sum(d < 0.15 for d in devs)
    record(10, "N=50 samples vs limit shape at (1/3,1/5,-25)", {
        "sup deviation < 0.15 for >= 9 of 10 seeds": good >= 9,
    }, "devs=" + ",".join(f"{d:.3f}" for d in devs))


@pytest.mark.slow
def test_c11_vkls():
    t = time.perf_counter()
    dev, _ = vkls_deviation(AsymptoticParams(1 / 100, 1 / 100, -1 / 1000))
    dt = time.perf_counter() - t
    record(11, "scaled deviation from the VKLS curve at (1/100,1/100,-1/1000)", {
        "0.06 +- 0.02": abs(dev - 0.06) <= 0.02, "runtime < 120 s": dt < 120,
    }, f"deviation={dev:.4f}, {dt:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
