"""Sampled diagnostic for the four Euclideaness conditions of a world function.

The conditions are global statements; here each one is checked on a
deterministic quasi-random sample, so a pass is evidence and not a proof.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import qmc

from .geometry import WorldFunctionSpec, sigma, sigma_flat
from .vectors import gram_matrix


@dataclass
class EuclidSampleConfig:
    n_samples: int = 64
    n_starts: int = 8
    tol: float = 1e-9
    box: float = 1.0
    seed: int = 0
    max_newton: int = 50


@dataclass
class EuclideanessReport:
    condition_1: dict = field(default_factory=dict)
    condition_2: dict = field(default_factory=dict)
    condition_3: dict = field(default_factory=dict)
    condition_4: dict = field(default_factory=dict)
    verdict: str = "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _sobol(dim: int, n: int, seed: int, box: float) -> np.ndarray:
    pts = qmc.Sobol(dim, scramble=True, seed=seed).random(n)
    return box * (2.0 * pts - 1.0)


def _gram_scale(g: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(g))))


def _find_witness(spec, n, cfg):
    """Skeleton of n+1 points whose Gram determinant is clearly nonzero."""
    candidates = []
    if n <= spec.n:
        axis = np.zeros((n + 1, spec.n))
        axis[1:, :n] = np.eye(n)
        candidates.append(axis)
    flat = _sobol(spec.n * (n + 1), cfg.n_samples, cfg.seed, cfg.box)
    candidates.extend(flat.reshape(-1, n + 1, spec.n))
    for sk in candidates:
        g = gram_matrix(spec, sk)
        if abs(np.linalg.det(g)) > 1e3 * cfg.tol * _gram_scale(g) ** n:
            return sk
    return None


def covariant_coordinates(spec: WorldFunctionSpec, skeleton, P) -> np.ndarray:
    """x_i(P) = (P0Pi . P0P) for each skeleton point Pi, i >= 1."""
    sk = np.asarray(skeleton, dtype=float)
    P = np.asarray(P, dtype=float)
    s0i = sigma(spec, sk[0], sk[1:])
    s0p = sigma(spec, sk[0], P)
    sip = sigma(spec, sk[1:], P[..., None, :])
    return s0i + np.asarray(s0p)[..., None] - sip


def _condition_1(spec, n, cfg):
    witness = _find_witness(spec, n, cfg)
    if witness is None:
        return {"passed": False, "witness": None, "f_n": 0.0, "max_f_next": None}, None
    f_n = float(np.linalg.det(gram_matrix(spec, witness)))
    worst = 0.0
    sets = _sobol(spec.n * (n + 2), cfg.n_samples, cfg.seed + 1, cfg.box).reshape(-1, n + 2, spec.n)
    for sk in sets:
        g = gram_matrix(spec, sk)
        worst = max(worst, float(abs(np.linalg.det(g)) / _gram_scale(g) ** (n + 1)))
    return {
        "passed": bool(worst <= cfg.tol),
        "witness": witness.tolist(),
        "f_n": f_n,
        "max_f_next": worst,
    }, witness


def _condition_2(spec, witness, cfg):
    g = gram_matrix(spec, witness)
    ginv = np.linalg.inv(g)
    pairs = _sobol(2 * spec.n, cfg.n_samples, cfg.seed + 2, cfg.box).reshape(-1, 2, spec.n)
    P, Q = pairs[:, 0], pairs[:, 1]
    dx = covariant_coordinates(spec, witness, P) - covariant_coordinates(spec, witness, Q)
    model = 0.5 * np.einsum("si,ik,sk->s", dx, ginv, dx)
    resid = np.abs(sigma(spec, P, Q) - model)
    timelike = sigma_flat(spec, P, Q) > 0 if spec.is_spacetime else np.zeros(len(P), bool)
    scale = _gram_scale(g)
    worst = float(resid.max())
    return {
        "passed": bool(worst <= cfg.tol * scale),
        "max_residual": worst,
        "max_residual_timelike": float(resid[timelike].max()) if timelike.any() else 0.0,
        "timelike_pairs": int(timelike.sum()),
    }


def _condition_3(spec, witness, cfg):
    g = gram_matrix(spec, witness)
    eig = np.linalg.eigvalsh(g)
    return {"passed": bool(np.all(eig > cfg.tol * _gram_scale(g))), "eigenvalues": eig.tolist()}


def _condition_4(spec, witness, cfg):
    n = witness.shape[0] - 1
    targets = _sobol(n, cfg.n_samples, cfg.seed + 3, cfg.box)
    starts = _sobol(spec.n, cfg.n_starts, cfg.seed + 4, 2.0 * cfg.box)
    # x_i(P) has the constant gradient G(Pi - P0) on every branch.
    J = (witness[1:] - witness[0]) @ spec.metric()
    Jp = np.linalg.pinv(J)
    failures = 0
    for y in targets:
        roots = []
        for x in starts:
            for _ in range(cfg.max_newton):
                r = covariant_coordinates(spec, witness, x) - y
                if np.max(np.abs(r)) <= cfg.tol * (1.0 + np.max(np.abs(y))):
                    roots.append(x)
                    break
                x = x - Jp @ r
        distinct = []
        for r in roots:
            if not any(np.linalg.norm(r - q) <= 1e-6 * (1.0 + np.linalg.norm(q)) for q in distinct):
                distinct.append(r)
        if len(distinct) != 1:
            failures += 1
    return {"passed": failures == 0, "failures": failures, "samples": int(len(targets))}


def euclideaness_check(spec: WorldFunctionSpec, n_claim: int | None = None,
                       sample_config: EuclidSampleConfig | None = None) -> EuclideanessReport:
    """Check conditions I-IV for a claimed dimension ``n_claim`` (default spec.n)."""
    cfg = sample_config or EuclidSampleConfig()
    n = spec.n if n_claim is None else int(n_claim)
    c1, witness = _condition_1(spec, n, cfg)
    if witness is None:
        missing = {"passed": False, "reason": "no nondegenerate skeleton found"}
        return EuclideanessReport(c1, dict(missing), dict(missing), dict(missing), "fail")
    c2 = _condition_2(spec, witness, cfg)
    c3 = _condition_3(spec, witness, cfg)
    c4 = _condition_4(spec, witness, cfg)
    ok = all(c["passed"] for c in (c1, c2, c3, c4))
    return EuclideanessReport(c1, c2, c3, c4, "pass" if ok else "fail")
