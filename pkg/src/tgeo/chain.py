"""Monte Carlo broken-tube world lines of a free particle.

Each link has distorted squared length mu^2. A new link is built in the rest
frame of the previous one (time component s + 3*l0^2/s, transverse part of
length l0*kappa in a uniformly random direction) and carried to the lab by
the pure boost that takes the time axis to the previous link's direction.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateLink, NotEquivalent
from .geometry import (
    PairVector,
    WorldFunctionSpec,
    boost_matrix,
    distorted,
    minkowski_dot,
    scalar_product,
    squared_length,
)
from .vectors import DEFAULT_TOL, is_equivalent


def link_parameters(mu: float, lambda0: float) -> tuple[float, float, float]:
    """(s, time component, transverse length) of a rest-frame link."""
    if not mu > np.sqrt(2.0) * lambda0:
        raise DegenerateLink(f"mu = {mu!r} must exceed sqrt(2)*lambda0 = {np.sqrt(2.0) * lambda0!r}")
    d = lambda0 * lambda0
    s = float(np.sqrt(mu * mu - 2.0 * d))
    kappa = np.sqrt(6.0 * (1.0 + 3.0 * d / (2.0 * s * s)))
    return s, s + 3.0 * d / s, float(lambda0 * kappa)


def local_links(mu: float, lambda0: float, q: np.ndarray) -> np.ndarray:
    """Rest-frame link vectors for directions q of shape (..., 3)."""
    s, t, g = link_parameters(mu, lambda0)
    q = np.asarray(q, dtype=float)
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    out = np.empty(q.shape[:-1] + (4,))
    out[..., 0] = t
    out[..., 1:] = g * q / norm
    return out


@dataclass
class ChainState:
    points: np.ndarray
    mu: float
    lambda0: float
    seed: int | None = None
    frame: np.ndarray = field(default_factory=lambda: np.eye(4))
    c: float = 1.0

    @property
    def spec(self) -> WorldFunctionSpec:
        return distorted(self.lambda0 ** 2, 4, self.c)

    @property
    def links(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def cosh_theta_M(self) -> np.ndarray:
        L = self.links
        num = minkowski_dot(L[:-1], L[1:])
        den = np.sqrt(minkowski_dot(L[:-1], L[:-1]) * minkowski_dot(L[1:], L[1:]))
        return num / den

    def to_csv(self) -> str:
        ch = self.cosh_theta_M()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "ct", "x1", "x2", "x3", "cosh_theta_M"])
        for k, p in enumerate(self.points):
            val = repr(float(ch[k - 2])) if k >= 2 else "nan"
            w.writerow([k] + [repr(float(x)) for x in p] + [val])
        return buf.getvalue()


def start_chain(mu: float, lambda0: float, seed: int | None = None, origin=None, c: float = 1.0) -> ChainState:
    """Chain with one link along the time axis, starting at ``origin``."""
    s, _, _ = link_parameters(mu, lambda0)
    P0 = np.zeros(4) if origin is None else np.asarray(origin, dtype=float)
    P1 = P0 + np.array([s, 0.0, 0.0, 0.0])
    return ChainState(np.stack([P0, P1]), float(mu), float(lambda0), seed, np.eye(4), c)


def _advance(frames, heads, q, mu, lambda0):
    """One batched step. frames: (N,4,4), heads: (N,4), q: (N,3)."""
    s, _, _ = link_parameters(mu, lambda0)
    local = local_links(mu, lambda0, q)
    lab = np.einsum("nij,nj->ni", frames, local)
    new_frames = np.einsum("nij,njk->nik", frames, boost_matrix(local / s))
    return heads + lab, new_frames, lab, local


def extend_chain(state: ChainState, rng: np.random.Generator, q=None) -> ChainState:
    """Append one link; q defaults to a uniform direction drawn from rng."""
    if q is None:
        q = rng.normal(size=3)
    head, frame, _, _ = _advance(state.frame[None], state.points[-1][None], np.asarray(q, float)[None],
                                 state.mu, state.lambda0)
    return ChainState(np.vstack([state.points, head]), state.mu, state.lambda0, state.seed, frame[0], state.c)


def link_angle(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, tol: float = DEFAULT_TOL):
    """(theta, theta_M) between two equivalent timelike links.

    theta uses the distorted scalar product and is 0 for equivalent links;
    theta_M is the hyperbolic angle of the coordinate vectors in the
    Minkowski bilinear form.
    """
    if not is_equivalent(spec, v1, v2, tol):
        raise NotEquivalent("link_angle needs equivalent links")
    l1, l2 = squared_length(spec, v1), squared_length(spec, v2)
    ch = scalar_product(spec, v1, v2) / np.sqrt(l1 * l2)
    theta = float(np.arccosh(max(1.0, ch)))
    a, b = v1.delta, v2.delta
    chm = minkowski_dot(a, b) / np.sqrt(minkowski_dot(a, a) * minkowski_dot(b, b))
    return theta, float(np.arccosh(max(1.0, chm)))


def mass_and_momentum(state: ChainState, b_coefficient: float) -> tuple[float, np.ndarray]:
    """m = b*mu and p_k = b*c*(last link components in lab coordinates)."""
    if not b_coefficient > 0:
        raise ValueError("b_coefficient must be positive")
    link = state.points[-1] - state.points[-2]
    return b_coefficient * state.mu, b_coefficient * state.c * link


def speed_from_angle(theta_M, c: float = 1.0):
    """Speed with rapidity theta_M."""
    return c * np.tanh(theta_M)


def calibration(b: float, c: float, mu: float, lambda0: float) -> dict:
    """Link the distortion to the quantum constant: d = hbar/(2bc), m = b*mu.

    ``alpha`` solves alpha * r_min * c * theta_M = hbar/(2m) with the
    small-angle theta_M = sqrt(2)*lambda0/mu; ``alpha_simulated`` uses the
    angle the chain construction actually produces.
    """
    hbar = 2.0 * b * c * lambda0 ** 2
    m = b * mu
    lhs = hbar / (2.0 * m)
    rhs = c * lambda0 ** 2 / mu
    r_min = np.sqrt(1.5) * lambda0
    theta_small = np.sqrt(2.0) * lambda0 / mu
    s2 = mu * mu - 2 * lambda0 ** 2
    theta_chain = float(np.arccosh((mu * mu + lambda0 ** 2) / s2))
    return {
        "hbar": hbar,
        "m": m,
        "hbar_over_2m": lhs,
        "c_lambda0_sq_over_mu": rhs,
        "identity_rel_error": abs(lhs - rhs) / abs(rhs) if rhs else abs(lhs),
        "r_min": float(r_min),
        "theta_M_small_angle": float(theta_small),
        "alpha": float(lhs / (r_min * c * theta_small)) if lambda0 else 1.0 / np.sqrt(3.0),
        "theta_M_chain": theta_chain,
        "alpha_simulated": float(lhs / (r_min * c * theta_chain)) if lambda0 else float("nan"),
    }


@dataclass
class EnsembleConfig:
    mu: float = 1.0
    lambda0: float = 0.01
    n_steps: int = 100
    n_chains: int = 1000
    seed: int = 0
    c: float = 1.0
    b: float = 1.0
    threads: int = 1

    def __post_init__(self):
        if self.n_chains < 1 or self.n_steps < 1:
            raise ValueError("n_chains and n_steps must be at least 1")
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be nonnegative")
        link_parameters(self.mu, self.lambda0)


@dataclass
class ChainStatistics:
    mean_cosh_theta_M: float
    se_cosh_theta_M: float
    expected_cosh_theta_M: float
    construction_cosh_theta_M: float
    mean_theta_M: float
    theta_ratio_small_angle: float
    msd_transverse: list
    mean_transverse_increment_sq: float
    mean_speed: float
    diffusion_coefficient: float
    mean_final_displacement: list
    se_final_displacement: list
    sample_count: int
    calibration: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def chain_directions(seed: int, n_chains: int, n_steps: int) -> np.ndarray:
    """Per-chain direction draws, shape (n_chains, n_steps, 3).

    Chain i uses its own generator spawned from ``seed``, so results do not
    depend on how chains are batched.
    """
    children = np.random.SeedSequence(seed).spawn(n_chains)
    return np.stack([np.random.default_rng(ch).normal(size=(n_steps, 3)) for ch in children])


def simulate_chains(mu: float, lambda0: float, q: np.ndarray, c: float = 1.0):
    """Run chains for pre-drawn directions q of shape (N, steps, 3).

    Returns (points (N, steps+2, 4), local links (N, steps, 4)).
    """
    N, n_steps, _ = q.shape
    s, _, _ = link_parameters(mu, lambda0)
    pts = np.zeros((N, n_steps + 2, 4))
    pts[:, 1, 0] = s
    frames = np.broadcast_to(np.eye(4), (N, 4, 4)).copy()
    locals_ = np.empty((N, n_steps, 4))
    for k in range(n_steps):
        pts[:, k + 2], frames, _, locals_[:, k] = _advance(frames, pts[:, k + 1], q[:, k], mu, lambda0)
    return pts, locals_


def run_ensemble(config: EnsembleConfig) -> ChainStatistics:
    cfg = config
    q = chain_directions(cfg.seed, cfg.n_chains, cfg.n_steps)
    blocks = np.array_split(np.arange(cfg.n_chains), max(1, min(cfg.threads, cfg.n_chains)))

    def work(idx):
        return simulate_chains(cfg.mu, cfg.lambda0, q[idx], cfg.c)

    if len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=len(blocks)) as ex:
            parts = list(ex.map(work, blocks))
    else:
        parts = [work(blocks[0])]
    pts = np.concatenate([p for p, _ in parts])
    loc = np.concatenate([l for _, l in parts])

    L = np.diff(pts, axis=1)
    ch = minkowski_dot(L[:, :-1], L[:, 1:]) / np.sqrt(
        minkowski_dot(L[:, :-1], L[:, :-1]) * minkowski_dot(L[:, 1:], L[:, 1:]))
    theta = np.arccosh(np.maximum(ch, 1.0))
    per_chain = ch.mean(axis=1)
    se = float(per_chain.std(ddof=1) / np.sqrt(cfg.n_chains)) if cfg.n_chains > 1 else float("nan")
    mu, l0 = cfg.mu, cfg.lambda0
    disp = pts[:, 1:, 1:] - pts[:, 1:2, 1:]
    msd = np.mean(np.sum(disp ** 2, axis=-1), axis=0)
    tsq = np.sum(loc[..., 1:] ** 2, axis=-1)
    dt = loc[..., 0] / cfg.c
    final = disp[:, -1]
    return ChainStatistics(
        mean_cosh_theta_M=float(ch.mean()),
        se_cosh_theta_M=se,
        expected_cosh_theta_M=float((mu ** 2 - l0 ** 2) / (mu ** 2 - 2 * l0 ** 2)),
        construction_cosh_theta_M=float((mu ** 2 + l0 ** 2) / (mu ** 2 - 2 * l0 ** 2)),
        mean_theta_M=float(theta.mean()),
        theta_ratio_small_angle=float(theta.mean() / (np.sqrt(2) * l0 / mu)) if l0 else float("nan"),
        msd_transverse=msd.tolist(),
        mean_transverse_increment_sq=float(tsq.mean()),
        mean_speed=float(speed_from_angle(theta, cfg.c).mean()),
        diffusion_coefficient=float(tsq.mean() / 3.0 / (2.0 * dt.mean())),
        mean_final_displacement=final.mean(axis=0).tolist(),
        se_final_displacement=(final.std(axis=0, ddof=1) / np.sqrt(cfg.n_chains)).tolist()
        if cfg.n_chains > 1 else [float("nan")] * 3,
        sample_count=int(ch.size),
        calibration=calibration(cfg.b, cfg.c, mu, l0),
    )


def ensemble_paths(config: EnsembleConfig) -> np.ndarray:
    """All chain points for a config, shape (n_chains, n_steps+2, 4)."""
    q = chain_directions(config.seed, config.n_chains, config.n_steps)
    return simulate_chains(config.mu, config.lambda0, q, config.c)[0]
