"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPT <n> PASS|FAIL`` line (collected into the
pytest terminal summary) before asserting. Tolerances are pinned below.
"""
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from tgeo.chain import EnsembleConfig, calibration, extend_chain, run_ensemble, start_chain
from tgeo.euclid import euclideaness_check
from tgeo.geometry import PairVector, distorted, euclidean, minkowski, sigma, squared_length
from tgeo.hydro import bohm_potential, evolve, free_gaussian, gaussian_state, stable_dt, step_hydrodynamics
from tgeo.objects import sample_tube_surface
from tgeo.solver import (
    equivalent_vector_family,
    solve_equivalent_null,
    solve_equivalent_timelike,
    solve_skeleton_equivalence,
)
from tgeo.vectors import is_equivalent

CASE_RESIDUAL_TOL = 1e-12
ALPHA0_TOL = 1e-15
BETA_TOL = 1e-12
AGREEMENT_TOL = 1e-6
ENVELOPE_TOL = 1e-9
RADIUS_TOL = 1e-12
N_SE = 3.0
RATIO_BAND = (0.99, 1.01)
COLLINEAR_TOL = 0.0
BOHM_RATIO = (3.5, 4.5)
WIDTH_REL_TOL = 1e-2
MASS_TOL = 1e-6
IDENTITY_TOL = 1e-12
ALPHA_BAND = (0.1, 10.0)


def _verdict(n, ok, detail):
    line = f"ACCEPT {n} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_accept_01_case_one_closed_form():
    t0 = time.perf_counter()
    s, lam = 1.0, 0.1
    fam = solve_equivalent_timelike(distorted(lam ** 2), s, a=0.5, b=0.2, q=(1, 0, 0), case="I")
    res = max(abs(r) for r in fam.meta["residuals"])
    a0 = fam.meta["alpha0"]
    dt = time.perf_counter() - t0
    ok = res < CASE_RESIDUAL_TOL and abs(a0 - 2 * lam ** 2 / s) <= ALPHA0_TOL and dt < 1.0
    _verdict(1, ok, f"Q1={fam.point.tolist()} residual={res:.1e} alpha0={a0!r} runtime={dt:.3f}s")


def test_accept_02_case_two_closed_form():
    t0 = time.perf_counter()
    s, lam = 1.0, 0.1
    d = lam * lam
    fam = solve_equivalent_timelike(distorted(d), s, q=(0, 1, 0), case="II")
    coeff_err = max(abs(fam.meta["alpha0"] - 3 * d / s),
                    abs(fam.meta["gamma"] - np.sqrt(6 * d + 9 * d * d / s ** 2)),
                    abs(fam.meta["kappa"] - np.sqrt(6 * (1 + 3 * d / (2 * s * s)))))
    worst = 0.0
    for beta in (0.05, 0.1, 0.5):
        lam0 = 1.0
        f = solve_equivalent_timelike(distorted(lam0 ** 2), beta * lam0, case="II")
        got = squared_length(distorted(lam0 ** 2), PairVector(np.array(f.meta["Q0"]), f.point))
        worst = max(worst, abs(got - (2 + beta ** 2) * lam0 ** 2))
    dt = time.perf_counter() - t0
    ok = coeff_err <= BETA_TOL and worst <= BETA_TOL and dt < 1.0
    _verdict(2, ok, f"coefficient_error={coeff_err:.1e} beta_length_error={worst:.1e} runtime={dt:.3f}s")


def test_accept_03_null_family():
    t0 = time.perf_counter()
    spec = distorted(0.01)
    fam = solve_equivalent_null(spec, 1.0)
    P0, P1 = np.zeros(4), np.array([1.0, 1.0, 0, 0])
    bad = 0
    for a0 in np.linspace(-0.9, 5.0, 20):
        Q2 = fam.representative(alpha0=a0)
        if sigma(spec, P0, Q2) != 0.0 or not is_equivalent(spec, PairVector(P0, P1), PairVector(P1, Q2)):
            bad += 1
    dt = time.perf_counter() - t0
    _verdict(3, bad == 0 and dt < 1.0, f"failures={bad}/20 runtime={dt:.3f}s")


def test_accept_04_numeric_matches_case_two():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, dims = 0.0, set()
    for _ in range(100):
        s, lam = rng.uniform(0.3, 3.0), rng.uniform(0.005, 0.2)
        spec = distorted(lam ** 2)
        P1 = np.array([s, 0, 0, 0])
        fam, rep = solve_skeleton_equivalence(spec, [np.zeros(4), P1], P1)
        cf = solve_equivalent_timelike(spec, s, case="II")
        local = fam.points[:, 1] - P1
        worst = max(worst,
                    np.max(np.abs(local[:, 0] - (s + cf.meta["alpha0"]))),
                    np.max(np.abs(np.linalg.norm(local[:, 1:], axis=1) - cf.meta["gamma"])))
        dims.add(rep.numeric_findings["manifold_dimension"])
    dt = time.perf_counter() - t0
    ok = worst <= AGREEMENT_TOL and dims == {2} and dt < 30.0
    _verdict(4, ok, f"max_deviation={worst:.1e} manifold_dims={sorted(dims)} runtime={dt:.2f}s")


def test_accept_05_tube_surface():
    t0 = time.perf_counter()
    mu, lam = 1.0, 0.1
    tube = sample_tube_surface(distorted(lam ** 2), mu, lam, 64, 64)
    worst = float(np.max(np.abs(tube.residual)))
    r_err = max(abs(tube.r_min - np.sqrt(1.5) * 0.1), abs(tube.r_max - np.sqrt(0.0199)))
    dt = time.perf_counter() - t0
    ok = tube.points.shape == (4096, 4) and worst <= ENVELOPE_TOL and r_err <= RADIUS_TOL and dt < 5.0
    _verdict(5, ok, f"samples={len(tube.points)} max_envelope={worst:.1e} radius_error={r_err:.1e} "
                    f"window={tube.window} runtime={dt:.3f}s")


def test_accept_06_link_angle_statistics():
    t0 = time.perf_counter()
    mu, lam = 1.0, 0.01
    st = run_ensemble(EnsembleConfig(mu=mu, lambda0=lam, n_steps=100, n_chains=10_000, seed=0))
    expected = (mu ** 2 - lam ** 2) / (mu ** 2 - 2 * lam ** 2)
    # All links share one angle, so the spread is round-off; floor it at one ulp-scale.
    se = max(st.se_cosh_theta_M, np.finfo(float).eps * expected)
    z = abs(st.mean_cosh_theta_M - expected) / se
    ratio = st.mean_theta_M / (np.sqrt(2) * lam / mu)
    dt = time.perf_counter() - t0
    ok = z <= N_SE and RATIO_BAND[0] <= ratio <= RATIO_BAND[1] and dt < 60.0
    _verdict(6, ok, f"mean_cosh={st.mean_cosh_theta_M!r} expected={expected!r} z={z:.3g} "
                    f"theta_ratio={ratio:.6f} runtime={dt:.2f}s")


def test_accept_07_degeneration():
    rng = np.random.default_rng(7)
    state = start_chain(1.0, 0.0)
    for _ in range(200):
        state = extend_chain(state, rng)
    transverse = float(np.max(np.abs(state.points[:, 1:])))
    E3 = euclidean(3)
    failures = 0
    for _ in range(1000):
        a, d, c2, c3 = rng.normal(size=(4, 3))
        v1 = PairVector(a, a + d)
        v2 = PairVector(c2, equivalent_vector_family(E3, v1, c2).point)
        v3 = PairVector(c3, equivalent_vector_family(E3, v2, c3).point)
        premise = is_equivalent(E3, v1, v2) and is_equivalent(E3, v2, v3)
        if not premise or not is_equivalent(E3, v1, v3):
            failures += 1
    ok = transverse <= COLLINEAR_TOL and failures == 0
    _verdict(7, ok, f"max_transverse={transverse!r} transitivity_failures={failures}/1000")


def test_accept_08_euclideaness():
    t0 = time.perf_counter()
    d = 0.01
    e = euclideaness_check(euclidean(4))
    m = euclideaness_check(minkowski(4))
    x = euclideaness_check(distorted(d))
    r_tl = x.condition_2["max_residual_timelike"]
    dt = time.perf_counter() - t0
    ok = (e.passed and not m.condition_3["passed"] and not x.condition_2["passed"]
          and x.condition_2["timelike_pairs"] > 0 and r_tl >= d and dt < 10.0)
    _verdict(8, ok, f"euclidean={e.verdict} minkowski_III={m.condition_3['passed']} "
                    f"distorted_II={x.condition_2['passed']} timelike_residual={r_tl:.4g} runtime={dt:.2f}s")


def test_accept_09_hydrodynamics():
    t0 = time.perf_counter()
    errs = []
    for n in (100, 200, 400):
        st = gaussian_state(8.0, n)
        inner = np.abs(st.x) <= 4.0
        errs.append(np.max(np.abs(bohm_potential(st) - (-st.x ** 2 / 8 + 0.25))[inner]))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    t_end = 2.0 * np.sqrt(0.21)
    out, _ = evolve(gaussian_state(8.0, 400), t_end)
    width = free_gaussian(0.0, t_end)[2]
    w_err = abs(out.width() - width) / width
    st = gaussian_state(8.0, 400)
    for _ in range(1000):
        st = step_hydrodynamics(st, stable_dt(st))
    m_err = abs(st.mass - 1.0)
    dt = time.perf_counter() - t0
    ok = (all(BOHM_RATIO[0] <= r <= BOHM_RATIO[1] for r in ratios)
          and w_err <= WIDTH_REL_TOL and m_err <= MASS_TOL and dt < 60.0)
    _verdict(9, ok, f"bohm_ratios={[round(float(r), 3) for r in ratios]} width_rel_error={w_err:.1e} "
                    f"mass_error={m_err:.1e} runtime={dt:.2f}s")


def test_accept_10_calibration():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        b, c, mu = rng.uniform(0.1, 10.0, 3)
        cal = calibration(b, c, mu, lambda0=rng.uniform(1e-4, 0.1) * mu)
        worst = max(worst, cal["identity_rel_error"])
    alpha = calibration(1.0, 1.0, 1.0, 0.01)["alpha"]
    ok = worst <= IDENTITY_TOL and ALPHA_BAND[0] < alpha < ALPHA_BAND[1]
    _verdict(10, ok, f"identity_rel_error={worst:.1e} alpha={alpha!r}")
