"""Predicates and matrices built only from the world function.

Everything is evaluated in squared form, (v1.v2)^2 against |v1|^2 |v2|^2 with
a separate sign test, so no square root of a negative squared length is taken.
Comparisons are scale-free: |lhs - rhs| <= tol * max(1, |lhs|, |rhs|).
"""
from __future__ import annotations

import numpy as np

from .errors import SpacelikeUnsupported
from .geometry import PairVector, WorldFunctionSpec, as_point, scalar_product, sigma, squared_length

DEFAULT_TOL = 1e-9


def close(lhs, rhs, tol: float = DEFAULT_TOL) -> bool:
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


def as_skeleton(spec: WorldFunctionSpec, points) -> np.ndarray:
    pts = as_point(spec, points)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("a skeleton needs at least two points, shape (n+1, dim)")
    return pts


def gram_matrix(spec: WorldFunctionSpec, skeleton) -> np.ndarray:
    """g_ik = (P0Pi . P0Pk) = s(P0,Pi) + s(P0,Pk) - s(Pi,Pk)."""
    pts = as_skeleton(spec, skeleton)
    s0 = sigma(spec, pts[0], pts[1:])
    sik = sigma(spec, pts[1:, None, :], pts[None, 1:, :])
    return s0[:, None] + s0[None, :] - sik


def gram_determinant(spec: WorldFunctionSpec, skeleton) -> float:
    return float(np.linalg.det(gram_matrix(spec, skeleton)))


def is_linearly_dependent(spec: WorldFunctionSpec, skeleton, tol: float = DEFAULT_TOL) -> bool:
    g = gram_matrix(spec, skeleton)
    scale = float(np.max(np.abs(g)))
    if scale == 0.0:
        return True
    return abs(np.linalg.det(g)) <= tol * scale ** g.shape[0]


def _products(spec, v1: PairVector, v2: PairVector):
    return squared_length(spec, v1), squared_length(spec, v2), scalar_product(spec, v1, v2)


def _is_negative(x: float, tol: float) -> bool:
    return x < 0 and not close(x, 0.0, tol)


def _check_timelike(l1, l2, tol):
    if _is_negative(l1, tol) or _is_negative(l2, tol):
        raise SpacelikeUnsupported(
            f"parallelism needs nonnegative squared lengths, got {l1!r} and {l2!r}"
        )


def _aligned(l1, l2, p, tol) -> bool:
    if close(l1, 0.0, tol) and close(l2, 0.0, tol):
        return close(p, 0.0, tol)
    return close(p * p, l1 * l2, tol)


def is_collinear(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, tol: float = DEFAULT_TOL) -> bool:
    l1, l2, p = _products(spec, v1, v2)
    return close(p * p, l1 * l2, tol)


def is_parallel(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, tol: float = DEFAULT_TOL) -> bool:
    l1, l2, p = _products(spec, v1, v2)
    _check_timelike(l1, l2, tol)
    return p >= -tol * max(1.0, abs(p)) and _aligned(l1, l2, p, tol)


def is_antiparallel(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, tol: float = DEFAULT_TOL) -> bool:
    l1, l2, p = _products(spec, v1, v2)
    _check_timelike(l1, l2, tol)
    return p <= tol * max(1.0, abs(p)) and _aligned(l1, l2, p, tol)


def is_equivalent(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector, tol: float = DEFAULT_TOL) -> bool:
    l1, l2, p = _products(spec, v1, v2)
    _check_timelike(l1, l2, tol)
    return (
        p >= -tol * max(1.0, abs(p))
        and _aligned(l1, l2, p, tol)
        and close(l1, l2, tol)
    )


def equivalence_residuals(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector) -> tuple[float, float]:
    """(|v2|^2 - |v1|^2, (v1.v2) - |v1|^2); both vanish when v2 eqv v1."""
    l1, l2, p = _products(spec, v1, v2)
    return float(l2 - l1), float(p - l1)
