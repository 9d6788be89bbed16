import numpy as np
import pytest

from tgeo.chain import EnsembleConfig, run_ensemble
from tgeo.errors import CFLViolation, NonFiniteState, ZeroDensity
from tgeo.hydro import (
    EnsembleState,
    bohm_potential,
    cell_grid,
    evolve,
    free_gaussian,
    gaussian_state,
    residuals,
    stable_dt,
    step_hydrodynamics,
    stochastic_velocity,
    trajectory_csv,
)


def _interior_error(n, field, exact):
    st = gaussian_state(8.0, n)
    inner = np.abs(st.x) <= 4.0
    return np.max(np.abs(field(st) - exact(st.x))[inner])


def test_stochastic_velocity_of_gaussian():
    st = gaussian_state(8.0, 400, hbar=1.0, m=1.0)
    assert np.allclose(stochastic_velocity(st), 0.5 * st.x, atol=1e-12)


def test_stochastic_velocity_trivial_cases():
    x = cell_grid(1.0, 20)
    flat = EnsembleState(x, np.full(20, 0.5), np.zeros(21))
    assert np.all(stochastic_velocity(flat) == 0.0)
    st = gaussian_state(8.0, 100, hbar=0.0)
    assert np.all(stochastic_velocity(st) == 0.0)


def test_bohm_potential_of_gaussian():
    err = _interior_error(400, bohm_potential, lambda x: -x * x / 8 + 0.25)
    assert err < 1e-2
    x = cell_grid(1.0, 20)
    assert np.all(bohm_potential(EnsembleState(x, np.full(20, 0.5), np.zeros(21))) == 0.0)


def test_bohm_potential_second_order():
    errs = [_interior_error(n, bohm_potential, lambda x: -x * x / 8 + 0.25) for n in (100, 200, 400)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(abs(r - 4.0) <= 0.5 for r in ratios)


def test_zero_density_warns_and_masks():
    x = cell_grid(1.0, 10)
    rho = np.ones(10)
    rho[4] = 0.0
    st = EnsembleState(x, rho, np.zeros(11))
    with pytest.warns(ZeroDensity):
        u = stochastic_velocity(st)
    assert u[3] == u[4] == u[5] == 0.0
    with pytest.warns(ZeroDensity):
        assert bohm_potential(st)[4] == 0.0


def test_state_validation():
    x = cell_grid(1.0, 10)
    with pytest.raises(ValueError):
        EnsembleState(x, np.ones(10), np.zeros(10))
    with pytest.raises(ValueError):
        EnsembleState(x, -np.ones(10), np.zeros(11))
    with pytest.raises(ValueError):
        EnsembleState(np.r_[0.0, 1.0, 3.0], np.ones(3), np.zeros(4))


def test_static_state_is_unchanged():
    st = gaussian_state(8.0, 100)
    st = EnsembleState(st.x, st.rho, np.zeros(101), st.hbar, st.m)
    out = step_hydrodynamics(st, 0.5 * stable_dt(st), quantum=False)
    assert np.array_equal(out.rho, st.rho) and np.array_equal(out.v, st.v)


def test_cfl_violation():
    st = gaussian_state(8.0, 100)
    with pytest.raises(CFLViolation):
        step_hydrodynamics(st, 2 * stable_dt(st))


def test_pressureless_translation():
    x = cell_grid(8.0, 400)
    rho = np.exp(-x * x / 2) / np.sqrt(2 * np.pi)
    st = EnsembleState(x, rho, np.full(401, 0.5), hbar=0.0)
    out, hist = evolve(st, 2.0, keep_every=20)
    shifted = np.exp(-(x - 1) ** 2 / 2) / np.sqrt(2 * np.pi)
    assert np.max(np.abs(out.rho - shifted)) < 1e-3
    cont, mom = residuals(hist)
    assert mom == 0.0 and cont < 1e-3


def test_free_gaussian_spreading():
    st = gaussian_state(8.0, 400)
    t_end = 2.0 * np.sqrt(0.21)
    out, _ = evolve(st, t_end)
    _, _, width = free_gaussian(0.0, t_end)
    assert width == pytest.approx(1.1, rel=1e-12)
    assert out.width() == pytest.approx(width, rel=1e-2)
    assert abs(out.mass - 1.0) < 1e-6


def test_mass_conserved_over_many_steps():
    st = gaussian_state(8.0, 400)
    m0 = st.mass
    for _ in range(1000):
        st = step_hydrodynamics(st, stable_dt(st))
    assert abs(st.mass - m0) <= 1e-6
    assert abs(m0 - 1.0) <= 1e-6


def test_residuals_of_analytic_trajectory_and_negative_control():
    snaps = [gaussian_state(8.0, 400, t=t) for t in np.linspace(0.0, 0.5, 51)]
    cont, mom = residuals(snaps)
    assert cont < 1e-4 and mom < 0.05
    bad = [EnsembleState(s.x, s.rho * (1 + 0.1 * np.sin(7 * s.x) * (i % 2)), s.v, t=s.t)
           for i, s in enumerate(snaps)]
    bc, bm = residuals(bad)
    assert bc > 100 * cont and bm > 10 * mom
    with pytest.raises(ValueError):
        residuals(snaps[:1])


def test_state_roundtrip_and_csv():
    st = gaussian_state(4.0, 8, t=0.25)
    back = EnsembleState.from_dict(st.to_dict())
    assert np.array_equal(back.rho, st.rho) and back.t == 0.25
    with pytest.raises(ValueError):
        EnsembleState.from_dict(dict(st.to_dict(), extra=1))
    rows = trajectory_csv([st]).splitlines()
    assert rows[0] == "t,x,rho,v,u,U_B" and len(rows) == 9


def test_chain_diffusion_matches_hbar_over_2m():
    b, c, mu, lam = 1.0, 1.0, 1.0, 0.01
    stats = run_ensemble(EnsembleConfig(mu=mu, lambda0=lam, n_steps=10, n_chains=50, b=b, c=c))
    target = stats.calibration["hbar_over_2m"]
    assert stats.diffusion_coefficient == pytest.approx(target, rel=0.25)


def test_under_resolved_grid_raises():
    with pytest.raises(NonFiniteState):
        evolve(gaussian_state(8.0, 40), 0.5)
