"""Magnetic field of circular coil pairs (Helmholtz bias coils).

The field of a circular current loop is evaluated in closed form with complete
elliptic integrals K and E; those are computed by the arithmetic-geometric
mean, which converges quadratically and needs no special-function library.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularFieldError
from .units import CONSTANTS

_AGM_TOL = 1e-15  # c_n below this ends the iteration; K,E good to ~1e-12 or better


def elliptic_ke(m: float) -> tuple[float, float]:
    """Complete elliptic integrals (K(m), E(m)) for parameter m = k^2 in [0, 1).

    AGM iteration: a <- (a+b)/2, b <- sqrt(ab), c_(n+1) = (a_n-b_n)/2;
    K = pi/(2*a_inf), E = K * (1 - sum 2^(n-1) c_n^2) with c_0 = sqrt(m).
    """
    if not (0.0 <= m < 1.0):
        raise DomainError(f"elliptic parameter m must be in [0, 1), got {m}")
    a, b = 1.0, math.sqrt(1.0 - m)
    c = math.sqrt(m)
    csum = 0.5 * c * c
    power = 0.5
    for _ in range(64):
        if abs(c) < _AGM_TOL:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        csum += power * c * c
    k_val = math.pi / (2.0 * a)
    return k_val, k_val * (1.0 - csum)


def loop_field(radius: float, z0: float, amp_turns: float, point) -> np.ndarray:
    """B (T) of a circular loop of given radius centered on the z axis at z=z0.

    ``amp_turns`` is N*I.  Uses the standard elliptic-integral solution in
    cylindrical coordinates; raises SingularFieldError on the filament itself.
    """
    if radius <= 0:
        raise DomainError("loop radius must be positive")
    x, y, z = (float(v) for v in point)
    rho = math.hypot(x, y)
    dz = z - z0
    apr = radius + rho
    amr = radius - rho
    denom = apr * apr + dz * dz
    m = 4.0 * radius * rho / denom
    if m > 1.0 - 1e-12 or (amr * amr + dz * dz) < (1e-12 * radius) ** 2:
        raise SingularFieldError("field point is on (or numerically at) the coil filament")
    pref = CONSTANTS.mu0 * amp_turns / (2.0 * math.pi * math.sqrt(denom))
    if rho < 1e-12 * radius:
        bz = CONSTANTS.mu0 * amp_turns * radius**2 / (2.0 * (radius**2 + dz**2) ** 1.5)
        return np.array([0.0, 0.0, bz])
    K, E = elliptic_ke(m)
    near = amr * amr + dz * dz
    bz = pref * (K + E * (radius**2 - rho**2 - dz**2) / near)
    brho = pref * (dz / rho) * (-K + E * (radius**2 + rho**2 + dz**2) / near)
    return np.array([brho * x / rho, brho * y / rho, bz])


@dataclass(frozen=True)
class CoilPair:
    """Two coaxial loops of equal radius on the z axis at z = +/- separation/2.

    Both carry ``turns * current`` in the same sense (fields add at the center).
    """

    radius: float
    separation: float
    turns: int
    current: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("radius must be positive")
        if not (self.separation > 0 and math.isfinite(self.separation)):
            raise DomainError("separation must be positive")
        if not (isinstance(self.turns, int) and self.turns >= 1):
            raise DomainError("turns must be a positive integer")
        if not math.isfinite(self.current):
            raise DomainError("current must be finite")

    @classmethod
    def helmholtz(cls, radius: float, turns: int = 1, current: float = 1.0) -> "CoilPair":
        """Separation equal to the radius: vanishing 2nd-order axial curvature."""
        return cls(radius=radius, separation=radius, turns=turns, current=current)


def coil_field(pair: CoilPair, point) -> np.ndarray:
    """Total B (T) of the pair at a 3-d point (coil axis along z, center at origin)."""
    ni = pair.turns * pair.current
    return (loop_field(pair.radius, -0.5 * pair.separation, ni, point)
            + loop_field(pair.radius, +0.5 * pair.separation, ni, point))


def helmholtz_center_field(pair: CoilPair) -> float:
    """|B| at the center of an ideal Helmholtz pair: (4/5)^(3/2) * mu0*N*I/R."""
    return (4.0 / 5.0) ** 1.5 * CONSTANTS.mu0 * pair.turns * abs(pair.current) / pair.radius


def coil_homogeneity(pair: CoilPair, extent: float, n_samples: int = 201) -> float:
    """Worst relative deviation of |B| from the center value on the axis.

    Samples ``n_samples`` (>= 101) points on a centered axial segment of
    length ``extent``; requires extent < radius/10 where the quartic term
    dominates.
    """
    if not (0 < extent < pair.radius / 10.0):
        raise DomainError("extent must be positive and below radius/10")
    if n_samples < 101:
        raise DomainError("need at least 101 axial samples")
    b0 = float(np.linalg.norm(coil_field(pair, (0.0, 0.0, 0.0))))
    if b0 == 0.0:
        raise DomainError("zero field at center (zero current?)")
    zs = np.linspace(-0.5 * extent, 0.5 * extent, int(n_samples))
    worst = 0.0
    for z in zs:
        b = float(np.linalg.norm(coil_field(pair, (0.0, 0.0, z))))
        worst = max(worst, abs(b - b0) / b0)
    return worst
