"""One-dimensional ensemble hydrodynamics with the Bohm quantum potential.

Density lives at cell centres and the regular velocity at cell faces
(a staggered grid). The collocated layout lets odd-even modes grow in the
far tails of a Gaussian; staggering removes them.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import CFLViolation, NonFiniteState, ZeroDensity

RHO_FLOOR = 1e-300


@dataclass
class EnsembleState:
    x: np.ndarray
    rho: np.ndarray
    v: np.ndarray
    hbar: float = 1.0
    m: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.x.ndim != 1 or self.x.size < 3:
            raise ValueError("grid needs at least three cells")
        h = np.diff(self.x)
        if not np.allclose(h, h[0], rtol=1e-9, atol=0):
            raise ValueError("grid spacing must be uniform")
        if self.rho.shape != self.x.shape:
            raise ValueError("rho must match the cell-centre grid")
        if self.v.shape != (self.x.size + 1,):
            raise ValueError("v must be given on the N+1 cell faces")
        if np.any(self.rho < 0):
            raise ValueError("density must be nonnegative")
        if self.m <= 0 or self.hbar < 0:
            raise ValueError("need m > 0 and hbar >= 0")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def x_faces(self) -> np.ndarray:
        return np.concatenate(([self.x[0] - 0.5 * self.dx], self.x + 0.5 * self.dx))

    @property
    def v_centres(self) -> np.ndarray:
        return 0.5 * (self.v[1:] + self.v[:-1])

    @property
    def mass(self) -> float:
        return float(self.rho.sum() * self.dx)

    def width(self) -> float:
        w = self.rho / self.rho.sum()
        mean = float(np.dot(w, self.x))
        return float(np.sqrt(np.dot(w, (self.x - mean) ** 2)))

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "rho": self.rho.tolist(), "v": self.v.tolist(),
                "hbar": self.hbar, "m": self.m, "t": self.t}

    @classmethod
    def from_dict(cls, data: dict) -> "EnsembleState":
        unknown = set(data) - {"x", "rho", "v", "hbar", "m", "t"}
        if unknown:
            raise ValueError(f"unknown state fields: {sorted(unknown)}")
        return cls(**data)


def cell_grid(L: float, n: int) -> np.ndarray:
    """n cell centres covering [-L, L]."""
    h = 2.0 * L / n
    return -L + (np.arange(n) + 0.5) * h


def free_gaussian(x, t: float, s0: float = 1.0, hbar: float = 1.0, m: float = 1.0):
    """(rho, v, width) of the self-similar free Gaussian at time t."""
    k = hbar / (2.0 * m * s0)
    s2 = s0 * s0 + (k * t) ** 2
    x = np.asarray(x, dtype=float)
    rho = np.exp(-x * x / (2.0 * s2)) / np.sqrt(2.0 * np.pi * s2)
    v = x * k * k * t / s2
    return rho, v, float(np.sqrt(s2))


def gaussian_state(L: float = 8.0, n: int = 400, s0: float = 1.0, hbar: float = 1.0,
                   m: float = 1.0, t: float = 0.0) -> EnsembleState:
    x = cell_grid(L, n)
    rho, _, _ = free_gaussian(x, t, s0, hbar, m)
    xf = np.concatenate(([x[0] - 0.5 * (x[1] - x[0])], x + 0.5 * (x[1] - x[0])))
    _, v, _ = free_gaussian(xf, t, s0, hbar, m)
    return EnsembleState(x, rho, v, hbar, m, t)


def _mask(rho, floor):
    bad = rho <= floor
    if bad.any():
        warnings.warn(f"density at or below {floor:g} in {int(bad.sum())} cells; fields set to 0 there",
                      ZeroDensity, stacklevel=3)
    return bad


def _ghost(a):
    # Outflow closure: copy the edge value into one ghost cell each side.
    return np.concatenate(([a[0]], a, [a[-1]]))


def stochastic_velocity(state: EnsembleState, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """u = -(hbar/2m) d/dx ln(rho) at cell centres."""
    bad = _mask(state.rho, rho_floor)
    if state.hbar == 0:
        return np.zeros_like(state.rho)
    lr = np.log(np.maximum(state.rho, rho_floor))
    u = -(state.hbar / (2 * state.m)) * np.gradient(lr, state.dx, edge_order=2)
    if bad.any():
        near = bad | np.concatenate(([False], bad[:-1])) | np.concatenate((bad[1:], [False]))
        u[near] = 0.0
    return u


def _bohm(rho, dx, hbar, m, floor=RHO_FLOOR):
    r = _ghost(rho)
    d1 = (r[2:] - r[:-2]) / (2 * dx)
    d2 = (r[2:] - 2 * r[1:-1] + r[:-2]) / (dx * dx)
    safe = np.maximum(rho, floor)
    with np.errstate(over="ignore", invalid="ignore"):
        U = hbar ** 2 / (8 * m) * (d1 / safe) ** 2 - hbar ** 2 / (4 * m) * d2 / safe
    return np.where(rho <= floor, 0.0, U)


def bohm_potential(state: EnsembleState, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """U_B = (hbar^2/8m)(rho'/rho)^2 - (hbar^2/4m) rho''/rho with central differences."""
    _mask(state.rho, rho_floor)
    return _bohm(state.rho, state.dx, state.hbar, state.m, rho_floor)


def stable_dt(state: EnsembleState, cfl: float = 0.25) -> float:
    """Largest dt with dt <= cfl * dx / (max|v| + pi*hbar/(m*dx))."""
    wave = np.pi * state.hbar / (state.m * state.dx)
    speed = float(np.max(np.abs(state.v))) + wave
    return float("inf") if speed == 0 else cfl * state.dx / speed


def _rhs(rho, v, dx, hbar, m, quantum):
    rf = 0.5 * (_ghost(rho)[1:] + _ghost(rho)[:-1])
    flux = rf * v
    drho = -(flux[1:] - flux[:-1]) / dx
    vg = _ghost(v)
    dv = -v * (vg[2:] - vg[:-2]) / (2 * dx)
    if quantum and hbar != 0:
        Ug = _ghost(_bohm(rho, dx, hbar, m))
        dv -= (Ug[1:] - Ug[:-1]) / dx / m
    return drho, dv


def step_hydrodynamics(state: EnsembleState, dt: float, cfl: float = 0.25,
                       quantum: bool = True) -> EnsembleState:
    """Advance by dt with a two-stage predictor-corrector (Heun) step.

    Continuity is in flux form, so mass changes only through the outflow
    boundaries. ``quantum=False`` drops the Bohm force.
    """
    limit = stable_dt(state, cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLViolation(f"dt = {dt!r} exceeds the stability bound {limit!r}")
    h, hb, m = state.dx, state.hbar, state.m
    # Overflow is caught by the finiteness check below.
    with np.errstate(over="ignore", invalid="ignore"):
        a_r, a_v = _rhs(state.rho, state.v, h, hb, m, quantum)
        r1, v1 = np.maximum(state.rho + dt * a_r, 0.0), state.v + dt * a_v
        b_r, b_v = _rhs(r1, v1, h, hb, m, quantum)
        rho = state.rho + 0.5 * dt * (a_r + b_r)
        v = state.v + 0.5 * dt * (a_v + b_v)
    if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(v))):
        raise NonFiniteState(f"non-finite fields at t = {state.t + dt!r}; refine the grid")
    return replace(state, rho=np.maximum(rho, 0.0), v=v, t=state.t + dt)


def evolve(state: EnsembleState, t_end: float, cfl: float = 0.25, quantum: bool = True,
           keep_every: int = 0) -> tuple[EnsembleState, list]:
    """Step to t_end with the largest stable uniform dt; optionally keep snapshots."""
    history = [state] if keep_every else []
    span = t_end - state.t
    if span <= 0:
        return state, history
    n = int(np.ceil(span / stable_dt(state, cfl)))
    k = 0
    while state.t < t_end - 1e-15 * max(1.0, abs(t_end)):
        dt = min(stable_dt(state, cfl), (t_end - state.t) / max(1, n - k))
        state = step_hydrodynamics(state, dt, cfl, quantum)
        k += 1
        if keep_every and k % keep_every == 0:
            history.append(state)
    return state, history


def residuals(states) -> tuple[float, float]:
    """RMS residuals of the continuity and momentum equations over a trajectory.

    Time derivatives are forward differences between snapshots; spatial terms
    use the snapshot average. Edge cells are excluded.
    """
    states = list(states)
    if len(states) < 2:
        raise ValueError("need at least two snapshots")
    cont, mom = [], []
    for a, b in zip(states[:-1], states[1:]):
        dt = b.t - a.t
        h = a.dx
        rho = 0.5 * (a.rho + b.rho)
        v = 0.5 * (a.v + b.v)
        rf = 0.5 * (_ghost(rho)[1:] + _ghost(rho)[:-1])
        flux = rf * v
        rc = (b.rho - a.rho) / dt + (flux[1:] - flux[:-1]) / h
        U = 0.5 * (_bohm(a.rho, h, a.hbar, a.m) + _bohm(b.rho, h, b.hbar, b.m))
        dU = np.diff(U) / h
        vi = v[1:-1]
        adv = vi * (v[2:] - v[:-2]) / (2 * h)
        rm = (b.v[1:-1] - a.v[1:-1]) / dt + adv + dU / a.m
        cont.append(rc[1:-1])
        mom.append(rm[1:-1])
    return float(np.sqrt(np.mean(np.concatenate(cont) ** 2))), float(np.sqrt(np.mean(np.concatenate(mom) ** 2)))


def trajectory_csv(states) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "rho", "v", "u", "U_B"])
    for st in states:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroDensity)
            u = stochastic_velocity(st)
            U = bohm_potential(st)
        for row in zip(np.full(st.x.size, st.t), st.x, st.rho, st.v_centres, u, U):
            w.writerow([repr(float(z)) for z in row])
    return buf.getvalue()
