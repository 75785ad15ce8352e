"""Closed convex sets with exact point projection and tangent-cone field projection.

Four variants cover everything the controllers need: the whole space, boxes,
Euclidean balls, and the nonnegative orthant (the multiplier domain).  Point
projection ``P(z)`` returns the unique nearest member; field projection
``Pi(x, v)`` returns the limit quotient ``lim (P(x + d*v) - x) / d`` as
``d -> 0+``, i.e. the projection of ``v`` onto the tangent cone at ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# A state is treated as a member of the set if its Euclidean distance to the
# set is at most this; the integrators re-project every step so drift never
# accumulates beyond it.
MEMBERSHIP_TOL = 1e-9

# A ball point counts as boundary when ||x - c|| >= r * (1 - BALL_BOUNDARY_RTOL).
BALL_BOUNDARY_RTOL = 1e-9

# Box/orthant boundary classification tolerance (absolute, post-projection
# states sit exactly on the bound).
_BOX_EDGE_TOL = 1e-12


class MembershipError(ValueError):
    """Raised when a field projection is requested at a point outside the set."""


class DimensionError(ValueError):
    """Raised on ambient-dimension mismatch."""


def _check_dim(set_dim: int, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.shape[0] != set_dim:
        raise DimensionError(f"expected vector of dim {set_dim}, got shape {z.shape}")
    return z


@dataclass(frozen=True)
class ConvexSet:
    """Base type; subclasses implement the projection primitives."""

    dim: int

    def project_point(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def distance(self, x: np.ndarray) -> float:
        """Euclidean distance from x to the set."""
        x = _check_dim(self.dim, x)
        return float(np.linalg.norm(self.project_point(x) - x))

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.distance(x) <= tol

    def project_field(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def norm_bound(self) -> float:
        """R with ||x|| <= R for every member; inf for unbounded variants."""
        return np.inf

    def to_config(self) -> dict:
        raise NotImplementedError

    def _inside(self, x: np.ndarray, tol: float) -> bool:
        # Membership test without the generic project-then-norm round trip;
        # subclasses override with cheaper direct checks (hot integrator path).
        return self.distance(x) <= tol

    def _require_member(self, x: np.ndarray) -> np.ndarray:
        x = _check_dim(self.dim, x)
        if not self._inside(x, MEMBERSHIP_TOL):
            raise MembershipError(
                f"point at distance {self.distance(x):.3e} from set (tolerance "
                f"{MEMBERSHIP_TOL:.0e}); integrator state has drifted outside the domain"
            )
        return x


@dataclass(frozen=True)
class FullSpace(ConvexSet):
    def project_point(self, z: np.ndarray) -> np.ndarray:
        return _check_dim(self.dim, z).copy()

    def distance(self, x: np.ndarray) -> float:
        _check_dim(self.dim, x)
        return 0.0

    def _inside(self, x: np.ndarray, tol: float) -> bool:
        return True

    def project_field(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        _check_dim(self.dim, x)
        return _check_dim(self.dim, v).copy()

    def to_config(self) -> dict:
        return {"kind": "full", "dim": self.dim}


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionError("box bounds must be 1-D arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper componentwise")
        object.__setattr__(self, "dim", lower.shape[0])
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def project_point(self, z: np.ndarray) -> np.ndarray:
        z = _check_dim(self.dim, z)
        return np.clip(z, self.lower, self.upper)

    def _inside(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= self.lower - tol)) and bool(np.all(x <= self.upper + tol))

    def project_field(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        x = self._require_member(x)
        v = _check_dim(self.dim, v)
        out = v.copy()
        # Per-component half-line rule; the box tangent cone is a product of
        # lines/half-lines so components decouple.
        at_lower = x <= self.lower + _BOX_EDGE_TOL
        at_upper = x >= self.upper - _BOX_EDGE_TOL
        out[at_lower & (out < 0.0)] = 0.0
        out[at_upper & (out > 0.0)] = 0.0
        return out

    def norm_bound(self) -> float:
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            return np.inf
        return float(np.sqrt(np.sum(np.maximum(self.lower**2, self.upper**2))))

    def to_config(self) -> dict:
        return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __init__(self, center, radius):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        radius = float(radius)
        if radius <= 0.0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "dim", center.shape[0])
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    def project_point(self, z: np.ndarray) -> np.ndarray:
        z = _check_dim(self.dim, z)
        d = z - self.center
        nrm = np.linalg.norm(d)
        if nrm <= self.radius:
            return z.copy()
        return self.center + d * (self.radius / nrm)

    def distance(self, x: np.ndarray) -> float:
        x = _check_dim(self.dim, x)
        return max(0.0, float(np.linalg.norm(x - self.center)) - self.radius)

    def _inside(self, x: np.ndarray, tol: float) -> bool:
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def project_field(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        x = self._require_member(x)
        v = _check_dim(self.dim, v)
        d = x - self.center
        nrm = np.linalg.norm(d)
        if nrm < self.radius * (1.0 - BALL_BOUNDARY_RTOL):
            return v.copy()
        # On the boundary the tangent cone is the halfspace {w : w.u <= 0}
        # for the outward unit normal u; remove the outward radial component
        # iff it points out.
        u = d / nrm
        radial = float(u @ v)
        if radial <= 0.0:
            return v.copy()
        return v - radial * u

    def norm_bound(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def to_config(self) -> dict:
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True)
class NonnegativeOrthant(ConvexSet):
    def project_point(self, z: np.ndarray) -> np.ndarray:
        return np.maximum(_check_dim(self.dim, z), 0.0)

    def _inside(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.all(x >= -tol))

    def project_field(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        x = self._require_member(x)
        v = _check_dim(self.dim, v)
        out = v.copy()
        out[(x <= _BOX_EDGE_TOL) & (out < 0.0)] = 0.0
        return out

    def to_config(self) -> dict:
        return {"kind": "orthant", "dim": self.dim}


def project_point(cset: ConvexSet, z: np.ndarray) -> np.ndarray:
    """Nearest member of the set (unique minimizer of ||y - z||)."""
    return cset.project_point(z)


def project_field(cset: ConvexSet, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Tangent-cone projection of v at a member point x.

    Equals v whenever x is interior; raises :class:`MembershipError` when x
    lies outside the set beyond the membership tolerance.
    """
    return cset.project_field(x, v)


def projection_gap(cset: ConvexSet, x0: np.ndarray, x: np.ndarray, v: np.ndarray) -> float:
    """(x0 - x).v minus (x0 - x).Pi(x0, v), for members x0 and x.

    The field projection only ever removes outward components, so the gap is
    nonnegative (up to roundoff); every Lyapunov argument in the controllers
    rests on this inequality.
    """
    x0 = cset._require_member(x0)
    x = cset._require_member(x)
    v = _check_dim(cset.dim, v)
    w = x0 - x
    return float(w @ v - w @ cset.project_field(x0, v))


def from_config(cfg: dict) -> ConvexSet:
    """Inverse of ``to_config``; raises on unknown kinds or malformed fields."""
    kind = cfg.get("kind")
    if kind == "full":
        return FullSpace(int(cfg["dim"]))
    if kind == "box":
        return Box(cfg["lower"], cfg["upper"])
    if kind == "ball":
        return Ball(cfg["center"], cfg["radius"])
    if kind == "orthant":
        return NonnegativeOrthant(int(cfg["dim"]))
    raise ValueError(f"unknown convex set kind: {kind!r}")
