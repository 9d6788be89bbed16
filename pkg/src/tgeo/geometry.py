"""World functions and the quantities built directly from them.

A geometry is fixed by a :class:`WorldFunctionSpec`. Points are plain float
arrays of length ``spec.n``; for space-time kinds ``coords[0]`` is ``c*t``.
All functions broadcast over leading axes, so a stack of points of shape
``(..., n)`` can be passed wherever a single point is accepted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch

KINDS = ("euclidean", "minkowski", "distorted")


@dataclass(frozen=True)
class WorldFunctionSpec:
    kind: str
    n: int
    d: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown geometry kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        if not np.isfinite(self.d) or self.d < 0:
            raise ValueError(f"distortion d must be finite and >= 0, got {self.d!r}")
        if self.d != 0 and self.kind != "distorted":
            raise ValueError("a nonzero distortion needs kind='distorted'")
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValueError(f"speed of light must be positive, got {self.c!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "c", float(self.c))

    @property
    def lambda0(self) -> float:
        return float(np.sqrt(self.d))

    @property
    def is_spacetime(self) -> bool:
        return self.kind != "euclidean"

    def metric(self) -> np.ndarray:
        """Diagonal metric G with 2*sigma_flat(P, Q) = dx^T G dx."""
        if self.kind == "euclidean":
            return np.eye(self.n)
        g = -np.eye(self.n)
        g[0, 0] = 1.0
        return g

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "d": self.d, "c": self.c}

    @classmethod
    def from_dict(cls, data: Mapping) -> "WorldFunctionSpec":
        unknown = set(data) - {"kind", "n", "d", "c"}
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        return cls(kind=data["kind"], n=data["n"], d=data.get("d", 0.0), c=data.get("c", 1.0))


def euclidean(n: int) -> WorldFunctionSpec:
    return WorldFunctionSpec("euclidean", n)


def minkowski(n: int = 4, c: float = 1.0) -> WorldFunctionSpec:
    return WorldFunctionSpec("minkowski", n, c=c)


def distorted(d: float, n: int = 4, c: float = 1.0) -> WorldFunctionSpec:
    return WorldFunctionSpec("distorted", n, d=d, c=c)


def parse_spec(text: str) -> WorldFunctionSpec:
    """Parse the ``kind:n[:d]`` shorthand, e.g. ``distorted:4:0.01``."""
    parts = text.strip().split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"spec shorthand must be kind:n[:d], got {text!r}")
    kind, n = parts[0], int(parts[1])
    d = float(parts[2]) if len(parts) == 3 else 0.0
    return WorldFunctionSpec(kind, n, d)


def as_point(spec: WorldFunctionSpec, p) -> np.ndarray:
    x = np.asarray(p, dtype=float)
    if x.shape[-1:] != (spec.n,):
        raise DimensionMismatch(f"expected points of dimension {spec.n}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    return x


@dataclass(frozen=True)
class PairVector:
    """The ordered pair (origin, end), i.e. the vector from origin to end."""

    origin: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float)
        e = np.asarray(self.end, dtype=float)
        if o.shape != e.shape:
            raise DimensionMismatch(f"origin {o.shape} and end {e.shape} differ in shape")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "end", e)

    @property
    def delta(self) -> np.ndarray:
        return self.end - self.origin

    def reversed(self) -> "PairVector":
        return PairVector(self.end, self.origin)


def _flat_sigma(spec: WorldFunctionSpec, dx: np.ndarray) -> np.ndarray:
    if spec.kind == "euclidean":
        return 0.5 * np.sum(dx * dx, axis=-1)
    return 0.5 * (dx[..., 0] ** 2 - np.sum(dx[..., 1:] ** 2, axis=-1))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def sigma(spec: WorldFunctionSpec, P, Q):
    """World function sigma(P, Q); half the squared interval, plus d on the timelike branch."""
    P = as_point(spec, P)
    Q = as_point(spec, Q)
    # Written symmetrically so sigma(P, Q) == sigma(Q, P) bit for bit.
    s = _flat_sigma(spec, P - Q)
    if spec.kind == "distorted":
        s = np.where(s > 0, s + spec.d, s)
    return _scalar(s)


def sigma_flat(spec: WorldFunctionSpec, P, Q):
    """The undistorted (Euclidean or Minkowski) part of sigma."""
    return _scalar(_flat_sigma(spec, as_point(spec, Q) - as_point(spec, P)))


def sigma_grad(spec: WorldFunctionSpec, P, Q) -> np.ndarray:
    """Gradient of sigma(P, Q) with respect to Q (away from the light cone)."""
    return (as_point(spec, Q) - as_point(spec, P)) @ spec.metric()


def squared_length(spec: WorldFunctionSpec, v: PairVector):
    return 2.0 * sigma(spec, v.origin, v.end)


def scalar_product(spec: WorldFunctionSpec, v1: PairVector, v2: PairVector):
    """(P0P1 . Q0Q1) = s(P0,Q1) + s(P1,Q0) - s(P0,Q0) - s(P1,Q1)."""
    P0, P1, Q0, Q1 = v1.origin, v1.end, v2.origin, v2.end
    return _scalar(
        sigma(spec, P0, Q1) + sigma(spec, P1, Q0) - sigma(spec, P0, Q0) - sigma(spec, P1, Q1)
    )


def minkowski_dot(a, b):
    """Coordinate bilinear form a0*b0 - a.b over the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def boost_matrix(u) -> np.ndarray:
    """Pure Lorentz boost taking e0 to the unit future timelike vector u.

    Works for a single u of shape (n,) or a stack of shape (..., n).
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    u0 = u[..., 0]
    us = u[..., 1:]
    B = np.zeros(u.shape[:-1] + (n, n))
    B[..., 0, 0] = u0
    B[..., 0, 1:] = us
    B[..., 1:, 0] = us
    B[..., 1:, 1:] = np.eye(n - 1) + us[..., :, None] * us[..., None, :] / (1.0 + u0)[..., None, None]
    return B


def unit_timelike(v) -> tuple[np.ndarray, np.ndarray]:
    """Return (future unit direction, Minkowski length) of a timelike coordinate vector."""
    v = np.asarray(v, dtype=float)
    s2 = minkowski_dot(v, v)
    if np.any(s2 <= 0):
        raise ValueError("vector is not timelike in the Minkowski form")
    s = np.sqrt(s2)
    u = v / s[..., None] if np.ndim(s) else v / s
    u = np.where(u[..., :1] < 0, -u, u)
    return u, s


def load_scene(data) -> tuple[WorldFunctionSpec, dict[str, np.ndarray]]:
    """Read ``{"spec": {...}, "points": {"P0": [...], ...}}`` from a path, JSON text or dict."""
    if isinstance(data, str):
        text = data
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        data = json.loads(text)
    spec = WorldFunctionSpec.from_dict(data["spec"])
    points = {name: as_point(spec, xs) for name, xs in data.get("points", {}).items()}
    return spec, points
