"""Solving equivalence systems.

Two routes are provided. Closed forms cover a single timelike or null vector
in the distorted Minkowski space, worked in the rest frame of the given
vector. A multi-start damped Newton solver with a Moore-Penrose step handles
arbitrary skeletons and is used as the fallback whenever a closed form does
not validate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .errors import NoSolutionFound, NonTimelike, SpacelikeUnsupported
from .geometry import (
    PairVector,
    WorldFunctionSpec,
    as_point,
    boost_matrix,
    minkowski_dot,
    scalar_product,
    sigma,
    sigma_flat,
    squared_length,
)
from .vectors import close, equivalence_residuals

RESIDUAL_TOL = 1e-9


@dataclass
class SolutionFamily:
    """A (possibly multivariant) solution set.

    ``representative(**params)`` maps free parameters to solution points.
    Enumerated families also carry the discrete ``points`` they were built from.
    """

    kind: str
    dof: int
    free_parameters: list = field(default_factory=list)
    representative: Optional[Callable] = None
    points: Optional[np.ndarray] = None
    params: dict = field(default_factory=dict)
    order_dependent: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    @property
    def point(self) -> np.ndarray:
        """Representative at the default parameters (or the first enumerated point)."""
        if self.kind == "empty":
            raise ValueError("empty family has no representative")
        if self.representative is not None:
            return self.representative(**self.params)
        return self.points[0]

    def draw_params(self, rng: np.random.Generator) -> dict:
        out = {}
        for p in self.free_parameters:
            if p["domain"] == "sphere":
                q = rng.normal(size=p["dim"] + 1)
                out[p["name"]] = q / np.linalg.norm(q)
            elif p["domain"] == "real":
                out[p["name"]] = float(rng.uniform(-p.get("scale", 1.0), p.get("scale", 1.0)))
            elif p["domain"] == "index":
                out[p["name"]] = int(rng.integers(p["size"]))
        return out

    def sample(self, k: int, seed: int = 0) -> np.ndarray:
        """k representatives at random parameter values; shape (k, ...)."""
        if self.kind == "empty":
            return np.empty((0,))
        if self.representative is None:
            return np.asarray(self.points)[np.arange(k) % len(self.points)]
        rng = np.random.default_rng(seed)
        return np.stack([self.representative(**self.draw_params(rng)) for _ in range(k)])

    def to_dict(self, n_samples: int = 4, seed: int = 0) -> dict:
        reps = [] if self.kind == "empty" else self.sample(n_samples, seed).tolist()
        if self.kind == "enumerated" and self.points is not None:
            reps = np.asarray(self.points).tolist()
        return {
            "kind": self.kind,
            "dof": self.dof,
            "params": [{k: v for k, v in p.items()} for p in self.free_parameters],
            "order_dependent": self.order_dependent,
            "representatives": reps,
            "meta": {k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool, list))},
        }


def empty_family(reason: str) -> SolutionFamily:
    return SolutionFamily(kind="empty", dof=0, meta={"reason": reason})


def single_point(point, **meta) -> SolutionFamily:
    return SolutionFamily(kind="enumerated", dof=0, points=np.asarray(point, float)[None], meta=meta)


@dataclass
class ExistenceReport:
    n: int
    equations: int
    unknowns: int
    verdict: str
    numeric_findings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "equations": self.equations,
            "unknowns": self.unknowns,
            "verdict": self.verdict,
            "numeric_findings": self.numeric_findings,
        }


def existence_counting(n: int, dim: int = 4) -> ExistenceReport:
    """Equation/unknown count for an n-th order skeleton with Q0 given."""
    eq, unk = n * (n + 1), dim * n
    verdict = "under" if eq < unk else ("balanced" if eq == unk else "over")
    return ExistenceReport(n=n, equations=eq, unknowns=unk, verdict=verdict)


@dataclass
class SolverConfig:
    n_starts: int = 32
    radius: Optional[float] = None
    max_iter: int = 200
    res_tol: float = 1e-14
    cluster_tol: float = 1e-6
    rank_tol: float = 1e-8
    probe_step: Optional[float] = None
    seed: int = 0


# -- closed forms -------------------------------------------------------------

def rest_frame_coefficients(spec: WorldFunctionSpec, A, B, C, alpha: float = 1.0):
    """(w0, gamma, s, c_flag) of the endpoint family of C X eqv alpha * AB.

    Valid when AB is timelike and all pairs among A, B, C, X are timelike and
    distinct except where they coincide exactly. ``c_flag`` counts the
    distortion terms surviving in the scalar product.
    """
    dv = np.asarray(B, float) - np.asarray(A, float)
    s2 = minkowski_dot(dv, dv)
    if s2 <= 0:
        raise NonTimelike("the given vector is not timelike")
    s = float(np.sqrt(s2))
    mu2 = s2 + 2.0 * spec.d
    c_flag = int(not np.array_equal(B, C)) - int(not np.array_equal(A, C))
    w2 = alpha * alpha * mu2 - 2.0 * spec.d
    w0 = (alpha * mu2 - c_flag * spec.d) / s
    g2 = w0 * w0 - w2
    return w0, g2, s, c_flag, w2


def _validate(spec, v, C, alpha, points, tol=RESIDUAL_TOL) -> np.ndarray:
    l = squared_length(spec, v)
    ok = []
    for X in points:
        w = PairVector(C, X)
        r_len = squared_length(spec, w) - alpha * alpha * l
        r_dot = scalar_product(spec, v, w) - alpha * l
        ok.append(
            abs(r_len) <= tol * max(1.0, abs(alpha * alpha * l))
            and abs(r_dot) <= tol * max(1.0, abs(alpha * l))
        )
    return np.asarray(ok)


def _probe_directions(n: int) -> list:
    dirs = []
    for k in range(n - 1):
        e = np.zeros(n - 1)
        e[k] = 1.0
        dirs += [e, -e]
    rng = np.random.default_rng(12345)
    for _ in range(4):
        q = rng.normal(size=n - 1)
        dirs.append(q / np.linalg.norm(q))
    return dirs


def _timelike_family(spec, v, C, alpha):
    A, B = v.origin, v.end
    w0, g2, s, c_flag, w2 = rest_frame_coefficients(spec, A, B, C, alpha)
    if w2 <= 0:
        return empty_family("target squared length leaves no timelike solution")
    if g2 < 0:
        if g2 > -1e-12 * max(1.0, w0 * w0):
            g2 = 0.0
        else:
            return None
    dv = B - A
    sign = 1.0 if dv[0] > 0 else -1.0
    u = sign * dv / s
    gamma = float(np.sqrt(g2))
    # Working on sign*v keeps the boost future-directed; w0 flips with it.
    w0_local = sign * w0
    Bm = boost_matrix(u)

    def rep(q=None):
        local = np.zeros(spec.n)
        local[0] = w0_local
        if gamma != 0.0:
            if q is None:
                raise ValueError("direction q is required for this family")
            q = np.asarray(q, dtype=float)
            if q.shape != (spec.n - 1,):
                raise ValueError(f"q must have {spec.n - 1} components")
            local[1:] = gamma * q / np.linalg.norm(q)
        return C + Bm @ local

    if spec.n < 2:
        return None
    probes = [rep(q) for q in _probe_directions(spec.n)] if gamma else [rep()]
    ok = _validate(spec, v, C, alpha, probes)
    if not ok.any():
        return None
    params = [] if gamma == 0.0 else [{"name": "q", "domain": "sphere", "dim": spec.n - 2}]
    return SolutionFamily(
        kind="closed_form",
        dof=0 if gamma == 0.0 else spec.n - 2,
        free_parameters=params,
        representative=rep,
        params={} if gamma == 0.0 else {"q": np.eye(spec.n - 1)[0]},
        meta={
            "w0": float(w0_local), "gamma": gamma, "s": s, "c_flag": c_flag,
            "validated_fraction": float(ok.mean()),
        },
    )


def _null_family(spec, v, C):
    dv = v.delta

    def rep(t=1.0):
        return C + float(t) * dv

    probes = [rep(t) for t in (-2.0, -0.5, 0.5, 1.0, 3.0)]
    ok = _validate(spec, v, C, 1.0, probes)
    if not ok.all():
        return None
    return SolutionFamily(
        kind="closed_form", dof=1,
        free_parameters=[{"name": "t", "domain": "real", "dim": 1, "scale": 2.0}],
        representative=rep, params={"t": 1.0},
    )


def _light_cone_family(spec, C):
    def rep(q=None, t=1.0):
        q = np.eye(spec.n - 1)[0] if q is None else np.asarray(q, float)
        return C + float(t) * np.concatenate(([1.0], q / np.linalg.norm(q)))

    return SolutionFamily(
        kind="closed_form", dof=spec.n - 1,
        free_parameters=[{"name": "q", "domain": "sphere", "dim": spec.n - 2},
                         {"name": "t", "domain": "real", "dim": 1}],
        representative=rep, params={"t": 1.0},
        meta={"note": "point vector: every null vector at C has zero length and zero product"},
    )


def equivalent_vector_family(spec: WorldFunctionSpec, v: PairVector, C, alpha: float = 1.0,
                             solver_config: SolverConfig | None = None) -> SolutionFamily:
    """Endpoints X such that CX eqv alpha*v (antiparallel for alpha < 0)."""
    C = as_point(spec, C)
    l = squared_length(spec, v)
    if l < 0 and not close(l, 0.0):
        raise SpacelikeUnsupported(f"vector has negative squared length {l!r}")
    dv = v.delta
    if not np.any(dv):
        return _light_cone_family(spec, C) if spec.is_spacetime else single_point(C)
    if spec.kind == "euclidean" or (spec.kind == "minkowski" and sigma_flat(spec, v.origin, v.end) > 0):
        return single_point(C + alpha * dv)
    flat = sigma_flat(spec, v.origin, v.end)
    fam = None
    if flat > 0 and alpha != 0.0:
        fam = _timelike_family(spec, v, C, alpha)
    elif flat == 0 and alpha != 0.0:
        fam = _null_family(spec, v, C)
    if fam is not None:
        return fam
    skel = np.stack([v.origin, v.end])
    try:
        num, _ = _solve_numeric(spec, skel, C, alpha, solver_config or SolverConfig())
    except NoSolutionFound:
        return empty_family("numeric solver found no solution")
    num.points = num.points[:, 1]
    return num


def solve_equivalent_timelike(spec: WorldFunctionSpec, s: float, a: float | None = None,
                              b: float | None = None, q=(1.0, 0.0, 0.0), case: str = "I") -> SolutionFamily:
    """Closed-form family of Q0Q1 eqv P0P1 with P0 = 0 and P1 = (s, 0, ...).

    Case I puts Q0 = (a, b, 0, ...). Case II takes Q0 = P1, the shared-point
    configuration of consecutive links. ``family.point`` is Q1 for the given q.
    """
    if spec.kind != "distorted":
        raise ValueError("closed forms are defined for the distorted Minkowski space")
    if not s > 0:
        raise NonTimelike(f"s must be positive, got {s!r}")
    P0 = np.zeros(spec.n)
    P1 = np.zeros(spec.n)
    P1[0] = s
    case = str(case).upper()
    if case == "I":
        if a is None or b is None:
            raise ValueError("case I needs the origin offsets a and b")
        Q0 = np.zeros(spec.n)
        Q0[0], Q0[1] = a, b
    elif case == "II":
        if (a is not None and a != s) or (b is not None and b != 0):
            raise ValueError("case II forces a = s and b = 0")
        Q0 = P1.copy()
    else:
        raise ValueError(f"case must be 'I' or 'II', got {case!r}")
    q = np.asarray(q, dtype=float)
    v = PairVector(P0, P1)
    w0, g2, s_, c_flag, w2 = rest_frame_coefficients(spec, P0, P1, Q0)
    gamma = float(np.sqrt(max(g2, 0.0)))

    def rep(q=q):
        local = np.zeros(spec.n)
        local[0] = w0
        if gamma:
            qq = np.asarray(q, dtype=float)
            local[1:] = gamma * qq / np.linalg.norm(qq)
        return Q0 + local

    Q1 = rep(q)
    pts = {"P0": P0, "P1": P1, "Q0": Q0, "Q1": Q1}
    names = list(pts)
    for i in range(4):
        for k in range(i + 1, 4):
            A, B = pts[names[i]], pts[names[k]]
            if np.array_equal(A, B):
                continue
            if sigma_flat(spec, A, B) <= 0:
                raise NonTimelike(f"{names[i]}{names[k]} is not timelike; the closed form premise fails")
    fam = SolutionFamily(
        kind="closed_form",
        dof=spec.n - 2 if gamma else 0,
        free_parameters=[{"name": "q", "domain": "sphere", "dim": spec.n - 2}] if gamma else [],
        representative=rep,
        params={"q": q} if gamma else {},
        meta={
            "case": case, "alpha0": float(w0 - s), "gamma": gamma, "s": float(s),
            "kappa": gamma / spec.lambda0 if spec.d > 0 else 0.0, "Q0": Q0.tolist(),
        },
    )
    r1, r2 = equivalence_residuals(spec, v, PairVector(Q0, Q1))
    fam.meta["residuals"] = [r1, r2]
    return fam


def solve_equivalent_null(spec: WorldFunctionSpec, s: float) -> SolutionFamily:
    """Null continuation family P1Q2 = (s+a0)(1, 1, 0, ...) for P0P1 = (s, s, 0, ...)."""
    if spec.is_spacetime is False:
        raise ValueError("null vectors need a space-time geometry")
    if s == 0:
        raise ValueError("s must be nonzero")
    P1 = np.zeros(spec.n)
    P1[0] = P1[1] = s
    ray = np.zeros(spec.n)
    ray[0] = ray[1] = 1.0

    def rep(alpha0=0.0):
        return P1 + (s + float(alpha0)) * ray

    return SolutionFamily(
        kind="closed_form", dof=1,
        free_parameters=[{"name": "alpha0", "domain": "real", "dim": 1, "scale": abs(s)}],
        representative=rep, params={"alpha0": 0.0},
        meta={"s": float(s), "P0": [0.0] * spec.n, "P1": P1.tolist()},
    )


def null_family_residuals(spec: WorldFunctionSpec, s: float, Q2) -> np.ndarray:
    """Residuals of the null-continuation system for a candidate Q2."""
    P0 = np.zeros(spec.n)
    P1 = np.zeros(spec.n)
    P1[0] = P1[1] = s
    v = PairVector(P0, P1)
    w = PairVector(P1, np.asarray(Q2, float))
    return np.array([
        sigma(spec, P0, Q2),
        2 * sigma(spec, P1, Q2),
        scalar_product(spec, v, w),
        2 * sigma(spec, P0, P1),
    ])


# -- numeric solver -----------------------------------------------------------

def _pairs(n):
    return [(i, k) for i in range(n + 1) for k in range(i + 1, n + 1)]


def _system(spec, P, Q0, alpha):
    """Residual and Jacobian callables for the unknown stack X = (Q1..Qn)."""
    n, dim = P.shape[0] - 1, P.shape[1]
    G = spec.metric()
    pairs = _pairs(n)
    lpp = np.array([2 * sigma(spec, P[i], P[k]) for i, k in pairs])
    scale = np.maximum(1.0, np.abs(np.concatenate([alpha * alpha * lpp, alpha * lpp])))

    def unpack(X):
        Q = X.reshape(X.shape[0], n, dim)
        return np.concatenate([np.broadcast_to(Q0, (X.shape[0], 1, dim)), Q], axis=1)

    def residual(X):
        Q = unpack(X)
        r1, r2 = [], []
        for j, (i, k) in enumerate(pairs):
            r1.append(2 * sigma(spec, Q[:, i], Q[:, k]) - alpha * alpha * lpp[j])
            prod = (sigma(spec, P[i], Q[:, k]) + sigma(spec, P[k], Q[:, i])
                    - sigma(spec, P[i], Q[:, i]) - sigma(spec, P[k], Q[:, k]))
            r2.append(prod - alpha * lpp[j])
        return np.stack(r1 + r2, axis=1) / scale

    def jacobian(X):
        Q = unpack(X)
        S = X.shape[0]
        m = len(pairs)
        J = np.zeros((S, 2 * m, n + 1, dim))
        for j, (i, k) in enumerate(pairs):
            d = (Q[:, k] - Q[:, i]) @ G
            J[:, j, k] += 2 * d
            J[:, j, i] -= 2 * d
            J[:, m + j, k] += (P[k] - P[i]) @ G
            J[:, m + j, i] += (P[i] - P[k]) @ G
        J = J[:, :, 1:, :].reshape(S, 2 * m, n * dim)
        return J / scale[None, :, None]

    return residual, jacobian, unpack


def _newton(residual, jacobian, X, cfg):
    X = X.copy()
    r = residual(X)
    norm = np.linalg.norm(r, axis=1)
    for _ in range(cfg.max_iter):
        active = np.max(np.abs(r), axis=1) > cfg.res_tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        J = jacobian(X[idx])
        step = -np.einsum("snm,sm->sn", np.linalg.pinv(J, rcond=1e-13), r[idx])
        t = np.ones(len(idx))
        pending = np.ones(len(idx), bool)
        for _ in range(30):
            trial = X[idx] + t[:, None] * step
            rt = residual(trial)
            nt = np.linalg.norm(rt, axis=1)
            accept = pending & (nt < norm[idx])
            sel = idx[accept]
            X[sel] = trial[accept]
            r[sel] = rt[accept]
            norm[sel] = nt[accept]
            pending &= ~accept
            if not pending.any():
                break
            t = np.where(pending, 0.5 * t, t)
        if pending.all():
            # No start made progress this sweep.
            break
    converged = np.max(np.abs(r), axis=1) <= cfg.res_tol
    return X, converged


def _cluster(X, tol):
    reps = []
    for x in X:
        if not any(np.linalg.norm(x - y) <= tol for y in reps):
            reps.append(x)
    reps.sort(key=lambda z: tuple(np.round(z, 12)))
    return np.array(reps)


def _manifold_dimension(residual, jacobian, x, cfg, h):
    J = jacobian(x[None])[0]
    sv = np.linalg.svd(J, compute_uv=False)
    smax = sv.max() if sv.size else 0.0
    rank = int(np.sum(sv > cfg.rank_tol * smax)) if smax > 0 else 0
    nullity = x.size - rank
    if nullity == 0:
        return 0, nullity
    _, _, Vt = np.linalg.svd(J)
    null = Vt[rank:]
    starts = np.concatenate([x + h * null, x - h * null])
    moved, ok = _newton(residual, jacobian, starts, cfg)
    proj = np.abs(np.einsum("sn,sn->s", moved - x, np.concatenate([null, null])))
    live = ok & (proj >= 0.5 * h)
    per_dir = live[: len(null)] | live[len(null):]
    return int(per_dir.sum()), nullity


def _solve_numeric(spec, P, Q0, alpha, cfg):
    P = np.asarray(P, float)
    Q0 = np.asarray(Q0, float)
    n, dim = P.shape[0] - 1, P.shape[1]
    report = existence_counting(n, dim)
    residual, jacobian, unpack = _system(spec, P, Q0, alpha)
    base = (Q0 + alpha * (P[1:] - P[0])).ravel()
    scale = float(np.max(np.abs(P - P[0]))) if n else 1.0
    radius = cfg.radius
    if radius is None:
        radius = 4.0 * spec.lambda0 if spec.d > 0 else 0.25 * max(scale, 1e-12)
    cloud = qmc.Sobol(n * dim, scramble=True, seed=cfg.seed).random(cfg.n_starts)
    starts = base + radius * (2.0 * cloud - 1.0)
    starts[0] = base
    X, ok = _newton(residual, jacobian, starts, cfg)
    report.numeric_findings = {"starts": int(cfg.n_starts), "converged": int(ok.sum())}
    if not ok.any():
        best = float(np.min(np.max(np.abs(residual(X)), axis=1)))
        report.numeric_findings.update({"clusters": 0, "best_residual": best})
        raise NoSolutionFound(
            f"no start converged (best scaled residual {best:.3e}); the object may not exist",
            report,
        )
    reps = _cluster(X[ok], cfg.cluster_tol * (1.0 + scale))
    h = cfg.probe_step if cfg.probe_step is not None else 1e-3 * radius
    dims = [_manifold_dimension(residual, jacobian, x, cfg, h) for x in reps]
    manifold = max(d for d, _ in dims)
    report.numeric_findings.update({
        "clusters": int(len(reps)),
        "manifold_dimension": manifold,
        "jacobian_nullity": max(nl for _, nl in dims),
    })
    points = unpack(reps)
    fam = SolutionFamily(
        kind="enumerated", dof=manifold,
        free_parameters=[{"name": "index", "domain": "index", "dim": 0, "size": int(len(reps))}],
        representative=None, points=points,
        meta={"clusters": int(len(reps)), "alpha": float(alpha)},
    )
    return fam, report


def solve_skeleton_equivalence(spec: WorldFunctionSpec, skeleton, Q0,
                               solver_config: SolverConfig | None = None):
    """Numerically find skeletons Q0..Qn equivalent to P0..Pn with Q0 given.

    Returns ``(family, report)``; ``family.points`` has shape (k, n+1, dim).
    Raises NoSolutionFound, with the report attached, if no start converges.
    """
    P = as_point(spec, skeleton)
    if P.ndim != 2 or P.shape[0] < 2:
        raise ValueError("skeleton must have at least two points")
    for i in range(P.shape[0]):
        for k in range(i + 1, P.shape[0]):
            l = 2 * sigma(spec, P[i], P[k])
            if l < 0 and not close(l, 0.0):
                raise SpacelikeUnsupported(f"skeleton pair ({i},{k}) is spacelike")
    return _solve_numeric(spec, P, as_point(spec, Q0), 1.0, solver_config or SolverConfig())


def _family_moments(fam: SolutionFamily, k: int = 256) -> tuple[np.ndarray, np.ndarray]:
    pts = fam.sample(k, seed=7).reshape(k, -1)
    return pts.mean(axis=0), np.cov(pts.T)


def _compose(spec, first, second, R0, cfg):
    fam1 = equivalent_vector_family(spec, first, R0, solver_config=cfg)
    if fam1.is_empty:
        return fam1

    def rep(**params):
        p1 = {k[:-2]: v for k, v in params.items() if k.endswith("_1")}
        p2 = {k[:-2]: v for k, v in params.items() if k.endswith("_2")}
        R1 = fam1.representative(**p1) if fam1.representative else fam1.points[p1.get("index", 0)]
        fam2 = equivalent_vector_family(spec, second, R1, solver_config=cfg)
        if fam2.is_empty:
            raise NoSolutionFound("second operand has no equivalent vector at this R1")
        return fam2.representative(**p2) if fam2.representative else fam2.points[p2.get("index", 0)]

    probe = equivalent_vector_family(spec, second, fam1.point, solver_config=cfg)
    if probe.is_empty:
        return probe
    params = [dict(p, name=p["name"] + "_1") for p in fam1.free_parameters]
    params += [dict(p, name=p["name"] + "_2") for p in probe.free_parameters]
    defaults = {k + "_1": v for k, v in fam1.params.items()}
    defaults.update({k + "_2": v for k, v in probe.params.items()})
    dof = fam1.dof + probe.dof
    return SolutionFamily(
        kind="closed_form" if params else "enumerated",
        dof=dof, free_parameters=params, representative=rep, params=defaults,
        points=None if params else rep()[None],
    )


def vector_sum(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, R0, order: str = "12",
               solver_config: SolverConfig | None = None) -> SolutionFamily:
    """Family of endpoints R2 of R0R1 + R1R2 with R0R1, R1R2 equivalent to the operands.

    ``order='21'`` swaps which operand is laid down first. ``order_dependent``
    is set when the two orders give visibly different endpoint sets, judged by
    the first two moments of a fixed parameter sample.
    """
    R0 = as_point(spec, R0)
    for v in (v1, v2):
        l = squared_length(spec, v)
        if l < 0 and not close(l, 0.0):
            raise SpacelikeUnsupported("vector sum needs nonnegative squared lengths")
    order = str(order)
    if order not in ("12", "21"):
        raise ValueError("order must be '12' or '21'")
    a, b = (v1, v2) if order == "12" else (v2, v1)
    fam = _compose(spec, a, b, R0, solver_config)
    other = _compose(spec, b, a, R0, solver_config)
    if fam.is_empty or other.is_empty:
        fam.order_dependent = fam.is_empty != other.is_empty
        return fam
    if fam.dof == 0 and other.dof == 0:
        fam.order_dependent = not np.allclose(fam.point, other.point, rtol=1e-9, atol=1e-9)
    else:
        m1, c1 = _family_moments(fam)
        m2, c2 = _family_moments(other)
        tol = 1e-9 * (1.0 + float(np.max(np.abs(m1))))
        fam.order_dependent = bool(
            fam.dof != other.dof or np.max(np.abs(m1 - m2)) > tol or np.max(np.abs(c1 - c2)) > tol
        )
    return fam


def scalar_multiply(spec: WorldFunctionSpec, v: PairVector, alpha: float, P0, version: str = "A",
                    solver_config: SolverConfig | None = None) -> SolutionFamily:
    """Endpoints P1 with P0P1 eqv alpha*v; version 'B' returns P0P0 at alpha = 0."""
    P0 = as_point(spec, P0)
    l = squared_length(spec, v)
    if l < 0 and not close(l, 0.0):
        raise SpacelikeUnsupported(f"vector has negative squared length {l!r}")
    version = str(version).upper()
    if version not in ("A", "B"):
        raise ValueError("version must be 'A' or 'B'")
    if alpha == 0 and version == "B":
        return single_point(P0, version="B")
    return equivalent_vector_family(spec, v, P0, alpha=float(alpha), solver_config=solver_config)
