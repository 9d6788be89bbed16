"""Elementary geometric objects given by a skeleton and an envelope function.

An object is the zero set of its envelope function f(R). Segments and spheres
need square roots of world functions, so they are only defined where those
are nonnegative.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateTube, KindMismatch, NegativeSigma, NoSolutionFound, SpacelikeUnsupported
from .geometry import PairVector, WorldFunctionSpec, as_point, scalar_product, sigma
from .solver import SolverConfig, solve_skeleton_equivalence
from .vectors import DEFAULT_TOL, close, gram_determinant, is_parallel

ARITY = {"segment": 2, "sphere": 2, "cylinder": 3, "straight_line": 2}


@dataclass
class ElementaryObject:
    kind: str
    skeleton: np.ndarray
    spec: WorldFunctionSpec

    def __post_init__(self):
        if self.kind not in ARITY:
            raise ValueError(f"unknown object kind {self.kind!r}")
        self.skeleton = as_point(self.spec, self.skeleton)
        if self.skeleton.shape[0] != ARITY[self.kind]:
            raise ValueError(f"{self.kind} needs {ARITY[self.kind]} skeleton points")

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.skeleton - self.skeleton[0])))


def _root(spec, P, Q):
    s = sigma(spec, P, Q)
    if np.any(s < 0):
        raise NegativeSigma(f"sigma = {np.min(s)!r} < 0; the envelope is undefined there")
    return np.sqrt(2.0 * s)


def envelope_value(obj: ElementaryObject, R):
    """Envelope function of the object at R (vectorised over leading axes of R)."""
    spec, sk = obj.spec, obj.skeleton
    R = as_point(spec, R)
    if obj.kind == "segment":
        P0, P1 = sk
        return _root(spec, P0, R) + _root(spec, R, P1) - _root(spec, P0, P1)
    if obj.kind == "sphere":
        O, Q = sk
        return _root(spec, O, R) - _root(spec, O, Q)
    if obj.kind == "cylinder":
        P0, P1, Q = sk

        def f2(X):
            return gram_determinant(spec, np.stack([P0, P1, X]))

        if R.ndim == 1:
            return f2(Q) - f2(R)
        return np.array([f2(Q) - f2(x) for x in R.reshape(-1, spec.n)]).reshape(R.shape[:-1])
    P0, P1 = sk
    v = PairVector(P0, P1)
    w = PairVector(np.broadcast_to(P0, R.shape), R)
    p = scalar_product(spec, v, w)
    return p * p - 2 * sigma(spec, P0, P1) * 2 * sigma(spec, P0, R)


def contains(obj: ElementaryObject, R, tol: float = DEFAULT_TOL,
             phi: Optional[Callable[[float], float]] = None) -> bool:
    """R lies on the object within tol*(1 + scale).

    ``phi`` is an optional odd, increasing reshaping of the envelope; the
    threshold is pushed through it as well so the zero set does not change.
    """
    try:
        f = float(envelope_value(obj, R))
    except NegativeSigma:
        return False
    thr = tol * (1.0 + obj.scale)
    if phi is not None:
        return abs(phi(f)) <= abs(phi(thr))
    return abs(f) <= thr


@dataclass
class TubeSamples:
    ct: np.ndarray
    phi: np.ndarray
    r: np.ndarray
    points: np.ndarray
    residual: np.ndarray
    r_min: float
    r_max: float
    window: tuple
    axis_end: np.ndarray = field(default=None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ct", "x1", "x2", "x3", "r", "envelope_residual"])
        for p, r, e in zip(self.points, np.repeat(self.r, len(self.phi)), self.residual.ravel()):
            w.writerow([repr(float(p[0])), repr(float(p[1])), repr(float(p[2])), repr(float(p[3])),
                        repr(float(r)), repr(float(e))])
        return buf.getvalue()


def tube_radius(ct, mu: float, lambda0: float):
    """Radius of the tube surface at time ct along an axis of Minkowski length s."""
    s = np.sqrt(mu * mu - 2 * lambda0 * lambda0)
    u = np.asarray(ct, dtype=float) - 0.5 * s
    return np.sqrt(2 * lambda0 ** 2 * u * u / mu ** 2 + 1.5 * lambda0 ** 2)


def tube_valid_window(mu: float, lambda0: float) -> tuple[float, float]:
    """ct interval on which tube points are timelike from both axis ends."""
    s = np.sqrt(mu * mu - 2 * lambda0 * lambda0)
    half = mu * (mu - 2 * np.sqrt(2) * lambda0) / (2 * s)
    return 0.5 * s - half, 0.5 * s + half


def sample_tube_surface(spec: WorldFunctionSpec, mu: float, lambda0: float, n_t: int = 64,
                        n_phi: int = 64, window: str = "valid") -> TubeSamples:
    """Cell-centred grid over the tube surface around the axis (0,0,0,0)-(s,0,0,0).

    ``window='valid'`` keeps ct where every sample is timelike from both axis
    ends, so the segment envelope is defined; ``'full'`` spans (0, s).
    """
    if spec.kind != "distorted" or spec.n != 4:
        raise ValueError("tube sampling needs a 4-dimensional distorted spec")
    if not close(spec.d, lambda0 * lambda0, 1e-12):
        raise ValueError(f"spec.d = {spec.d!r} does not match lambda0^2 = {lambda0 * lambda0!r}")
    if mu <= np.sqrt(2) * lambda0:
        raise DegenerateTube(f"mu = {mu!r} must exceed sqrt(2)*lambda0 = {np.sqrt(2) * lambda0!r}")
    s = np.sqrt(mu * mu - 2 * lambda0 * lambda0)
    if window == "full":
        lo, hi = 0.0, s
    elif window == "valid":
        if mu <= 2 * np.sqrt(2) * lambda0:
            raise DegenerateTube("no part of the tube is timelike from both ends; use window='full'")
        lo, hi = tube_valid_window(mu, lambda0)
    else:
        raise ValueError("window must be 'valid' or 'full'")
    ct = lo + (np.arange(n_t) + 0.5) * (hi - lo) / n_t
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    r = tube_radius(ct, mu, lambda0)
    pts = np.zeros((n_t, n_phi, 4))
    pts[..., 0] = ct[:, None]
    pts[..., 1] = r[:, None] * np.cos(ph)[None, :]
    pts[..., 2] = r[:, None] * np.sin(ph)[None, :]
    P1 = np.array([s, 0.0, 0.0, 0.0])
    seg = ElementaryObject("segment", np.stack([np.zeros(4), P1]), spec)
    with np.errstate(invalid="ignore"):
        s0 = sigma(spec, np.zeros(4), pts)
        s1 = sigma(spec, pts, P1)
        resid = np.sqrt(2 * s0) + np.sqrt(2 * s1) - np.sqrt(2 * sigma(spec, np.zeros(4), P1))
    resid = np.where((s0 < 0) | (s1 < 0), np.nan, resid)
    return TubeSamples(
        ct=ct, phi=ph, r=r, points=pts.reshape(-1, 4), residual=resid,
        r_min=float(np.sqrt(1.5) * lambda0),
        r_max=float(np.sqrt(2 * lambda0 ** 2 - lambda0 ** 4 / mu ** 2)),
        window=(float(lo), float(hi)), axis_end=P1,
    )


def objects_equivalent(objA: ElementaryObject, objB: ElementaryObject, tol: float = DEFAULT_TOL) -> str:
    """One of 'equivalent', 'shape_only', 'orientation_only', 'neither'."""
    if objA.kind != objB.kind or objA.skeleton.shape != objB.skeleton.shape:
        raise KindMismatch(f"cannot compare {objA.kind} with {objB.kind}")
    spec = objA.spec
    P, Q = objA.skeleton, objB.skeleton
    shape = orient = True
    for i in range(len(P)):
        for k in range(i + 1, len(P)):
            lp = 2 * sigma(spec, P[i], P[k])
            lq = 2 * sigma(spec, Q[i], Q[k])
            shape &= close(lp, lq, tol)
            try:
                orient &= is_parallel(spec, PairVector(P[i], P[k]), PairVector(Q[i], Q[k]), tol)
            except SpacelikeUnsupported:
                orient = False
    if shape and orient:
        return "equivalent"
    if shape:
        return "shape_only"
    if orient:
        return "orientation_only"
    return "neither"


@dataclass
class EvolutionReport:
    exists: bool
    steps: list
    skeletons: list
    terminated_at: Optional[int] = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "steps": self.steps,
            "skeletons": [np.asarray(s).tolist() for s in self.skeletons],
            "terminated_at": self.terminated_at,
            "reason": self.reason,
        }


def evolution_chain_exists(spec: WorldFunctionSpec, skeleton, n_steps: int,
                           solver_config: SolverConfig | None = None) -> EvolutionReport:
    """Glue equivalent skeletons end to start (P1 of one is P0 of the next)."""
    sk = as_point(spec, skeleton)
    if 2 * sigma(spec, sk[0], sk[1]) <= 0:
        raise ValueError("the leading vector P0P1 must be timelike")
    steps, skeletons = [], [sk]
    for k in range(n_steps):
        try:
            fam, report = solve_skeleton_equivalence(spec, sk, sk[1], solver_config)
        except NoSolutionFound as exc:
            steps.append({"step": k, "dof": None, "clusters": 0,
                          "existence": exc.report.to_dict() if exc.report else None})
            return EvolutionReport(False, steps, skeletons, terminated_at=k, reason=str(exc))
        sk = fam.points[0]
        skeletons.append(sk)
        steps.append({
            "step": k, "dof": fam.dof, "clusters": int(len(fam.points)),
            "variant": "multivariant" if fam.dof > 0 or len(fam.points) > 1 else "single",
            "existence": report.to_dict(),
        })
    return EvolutionReport(True, steps, skeletons)
