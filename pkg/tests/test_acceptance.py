"""The eleven acceptance criteria, each at its stated tolerance and runtime bound.

Run with ``pytest tests/test_acceptance.py`` (a summary section lists one
PASS/FAIL line per criterion) or directly with ``python tests/test_acceptance.py``.
"""
import cmath
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_compatible_pair
from iqho.coherent import (bicoherent, eigenvalue_check, gaussian_probe, identity_resolution_IQHO,
                           identity_resolution_L2, normalization_check, series_truncation)
from iqho.distrib import SchwartzProbe, weak_limit_study
from iqho.numquad import (ContourPath, contour_rotation_check, hermite_products, integrate_line,
                          rectangle_corners, rotated_hermite_table)
from iqho.pbops import (Kind, SpanVector, ThetaParams, algebra_check, biortho_matrix,
                        build_operators, eigenfamily, growth_ratio_check, growth_sequence,
                        ladder_check, norm_sq, spectrum_check)
from iqho.polygauss import moment_integrand, pairing
from iqho.specfun import hermite_norm_sq

OMEGAS = (0.5, 1.0, 2.0)
THETAS = (0.3, -0.3, 0.9, -0.9, 1.4, -1.4)


def record(number, title, bound, fn):
    """Run ``fn`` -> (ok, detail) under a timer; pass needs ok and elapsed < bound."""
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < bound
    line = (f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  "
            f"[{elapsed:.2f} s / {bound:g} s]  {detail}")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed, line


def biorthonormality():
    worst = 0.0
    ok = True
    for om in OMEGAS:
        for th in THETAS:
            _, rep = biortho_matrix(ThetaParams(th, om), 20, tol=1e-9)
            worst = max(worst, rep.data["max_deviation"])
            ok &= rep.passed
    return ok and worst <= 1e-9, f"max |<phi_n,psi_m> - delta| = {worst:.2e}"


def norm_closed_form():
    worst = 0.0
    for om in OMEGAS:
        for th in THETAS:
            for n in range(31):
                _, rep = norm_sq(ThetaParams(th, om), n, tol=1e-8)
                worst = max(worst, rep.rows[0].rel_err)
    return worst <= 1e-8, f"max relative error = {worst:.2e}"


def ladder_exactness():
    grid = [ThetaParams(t, om) for om in OMEGAS for t in (0.0,) + THETAS]
    grid += [ThetaParams.critical(s, om) for s in (1, -1) for om in OMEGAS]
    failures, worst, rows = 0, 0.0, 0
    for p in grid:
        ops = build_operators(p)
        for rep in (algebra_check(p, n_random=5, seed=3, tol=1e-12),
                    ladder_check(eigenfamily(p, Kind.PHI, 20), ops, 20, tol=1e-12),
                    spectrum_check(p, 20, tol=1e-12)):
            failures += len(rep.failures())
            rows += len(rep.rows)
            worst = max(worst, max((r.abs_err for r in rep.rows
                                    if isinstance(r.abs_err, float)), default=0.0))
    crit = ThetaParams.critical(1, 2.0)
    crit_spectrum = spectrum_check(crit, 3, 1e-12)
    # rows come in threes per n; E_0 = i, E_1 = 3i at Omega = 2
    eig_ok = (crit_spectrum.rows[0].closed_form == 1j
              and crit_spectrum.rows[3].closed_form == 3j)
    return failures == 0 and eig_ok, f"{rows} rows, {failures} failures, max residual {worst:.1e}"


def contour_rotation():
    worst_diag = worst_off = 0.0
    for th in (0.5, 1.0, 1.4):
        mat, _ = rotated_hermite_table(10, th)
        for n in range(11):
            for m in range(11):
                scale = hermite_norm_sq(min(n, m))
                if n == m:
                    worst_diag = max(worst_diag, abs(mat[n, n] / scale - 1))
                else:
                    worst_off = max(worst_off, abs(mat[n, m]) / scale)
    # closure over the whole n, m <= 10 grid, one vector integral per edge
    pairs = [(n, m) for n in range(11) for m in range(n, 11)]
    f = hermite_products(pairs)
    worst_closure = 0.0
    for th in (0.5, 1.0, 1.4):
        for R in (4.0, 5.0, 6.0):
            c = rectangle_corners(R, th)
            tol = np.array([1e-13 * hermite_norm_sq(max(p)) for p in pairs])
            edges = [integrate_line(f, ContourPath.segment(c[a], c[b]), tol=tol, dps=30).value
                     for a, b in (("A", "B"), ("B", "C"), ("C", "D"), ("D", "A"))]
            total = np.abs(sum(edges))
            biggest = np.max(np.abs(np.array(edges)), axis=0)
            worst_closure = max(worst_closure, float(np.max(total / biggest)))
    mono = contour_rotation_check(3, 3, 1.0, [4, 5, 6])
    ok = worst_diag <= 1e-8 and worst_off <= 1e-8 and worst_closure <= 1e-9 and mono.passed
    return ok, (f"diag {worst_diag:.1e}, off-diag {worst_off:.1e}, closure {worst_closure:.1e}, "
                f"vertical edges (n=m=3, theta=1) {['%.2e' % v for v in mono.data['vertical']]}")


def bicoherent_eigen():
    rng = np.random.default_rng(11)
    worst_res = worst_norm = 0.0
    ok = True
    for k in range(50):
        if k % 5 == 4:
            params = ThetaParams.critical(1 if k % 10 == 4 else -1, rng.uniform(0.5, 2))
        else:
            params = ThetaParams(rng.uniform(-1.5, 1.5), rng.uniform(0.5, 2))
        z = 5 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
        pair = bicoherent(params, z)
        rep = eigenvalue_check(pair, tol=1e-12)
        ok &= rep.passed
        worst_res = max(worst_res, max(r.abs_err for r in rep.rows))
        if not params.critical_sign:
            nrep = normalization_check(pair, tol=1e-10)
            ok &= nrep.passed
            worst_norm = max(worst_norm, nrep.rows[0].abs_err)
    return ok, f"max residual {worst_res:.1e}, max |<phi,psi> - 1| {worst_norm:.1e}"


def series_convergence():
    bad = []
    finals = []
    for th in (0.0, 0.6, 1.0):
        for z in (1 + 0j, 1 + 2j):
            rep = series_truncation(ThetaParams(th), z, [10, 20, 30, 40, 50, 60], tol=1e-6)
            finals.append(rep.data["distance"][-1])
            if not rep.passed:
                bad.append(f"theta={th} z={z}: d_K={['%.2e' % d for d in rep.data['distance']]}")
    detail = f"max d_60 = {max(finals):.2e}" + (f"; failing {bad}" if bad else "")
    return not bad, detail


def resolution_l2():
    p = ThetaParams(0.6)
    worst = 0.0
    for i in range(3):
        for j in range(3):
            rep = identity_resolution_L2(p, SpanVector.basis(Kind.PSI, i),
                                         SpanVector.basis(Kind.PHI, j), tol=1e-4)
            worst = max(worst, rep.rows[0].abs_err)
    return worst <= 1e-4, f"max |integral - delta| = {worst:.1e}"


def resolution_iqho():
    worst = 0.0
    ok = True
    for om in (1.0, 2.0):
        f = gaussian_probe(2 * om)
        for sign in (1, -1):
            rep = identity_resolution_IQHO(sign, f, f, omega=om, tol=1e-3)
            ok &= rep.passed
            worst = max(worst, max(r.abs_err for r in rep.rows))
    return ok, f"max error over orderings and signs = {worst:.1e}"


def weak_limits():
    sched = [math.pi / 2 - 2.0**-j for j in range(1, 13)]
    probes = {"e_0": SchwartzProbe(gaussian_probe(1.0)),
              "x e^{-x^2}": SchwartzProbe.of([0.0, 1.0], 2.0),
              "x^2 e^{-x^2/2}": SchwartzProbe.of([0.0, 0.0, 1.0], 1.0)}
    bad = []
    worst = 0.0
    for name, probe in probes.items():
        for n in range(6):
            rep = weak_limit_study(1, n, probe, 1.0, sched, tol=1e-3, monotone_from=5)
            worst = max(worst, rep.data["distance"][-1])
            if not rep.passed:
                bad.append(f"n={n} {name}: d(theta_12)={rep.data['distance'][-1]:.2e} "
                           f"({', '.join(r.quantity for r in rep.failures())})")
    return not bad, f"max final d = {worst:.2e}" + (f"; failing {bad}" if bad else "")


def growth_witness():
    p = ThetaParams(1.0)
    norms = growth_sequence(p, 41)
    unbounded = all(b > a for a, b in zip(norms, norms[1:])) and norms[-1] > 1e20
    rep = growth_ratio_check(p, 40, 0.05, 0.02)
    d = rep.data
    return unbounded and rep.passed, (
        f"ratio {d['ratio']:.4f} vs 2/cos {d['two_over_cos']:.4f} "
        f"(rel {rep.rows[0].rel_err:.3f}), vs Legendre asymptotic rel {rep.rows[1].rel_err:.4f}")


def oracle_agreement():
    rng = np.random.default_rng(2024)
    worst = 0.0
    ok = True
    for _ in range(100):
        f, g = random_compatible_pair(rng)
        res = integrate_line(moment_integrand(f, g), ContourPath.real_line(), tol=1e-12)
        diff = abs(pairing(f, g) - res.value)
        ok &= diff <= 10 * res.err_estimate
        worst = max(worst, diff / res.err_estimate)
    return ok, f"max |closed - quadrature| / err_estimate = {worst:.2f}"


CRITERIA = [
    (1, "biorthonormality", 10, biorthonormality),
    (2, "norm closed form", 5, norm_closed_form),
    (3, "ladder, commutator and spectrum exactness", 5, ladder_exactness),
    (4, "contour rotation", 30, contour_rotation),
    (5, "bi-coherent eigenvalue and normalization", 5, bicoherent_eigen),
    (6, "series convergence", 10, series_convergence),
    (7, "L2 resolution of the identity", 60, resolution_l2),
    (8, "IQHO resolution of the identity", 60, resolution_iqho),
    (9, "weak limits", 20, weak_limits),
    (10, "norm growth witness", 2, growth_witness),
    (11, "closed form vs quadrature oracle", 30, oracle_agreement),
]


@pytest.mark.parametrize("number,title,bound,fn", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, title, bound, fn):
    passed, line = record(number, title, bound, fn)
    assert passed, line


if __name__ == "__main__":
    results = [record(*c)[0] for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
