"""Lab-frame kinematics for a chain of elastic two-body scatterings.

A light projectile of mass ``m`` is fired along +z at a target of mass ``M``
that starts at rest.  Each further projectile has the same beam momentum and
hits the recoiling target.  Outgoing projectile directions are inputs; the
magnitudes are solved from energy-momentum conservation.

Units are MeV throughout, metric signature (+, -, -, -).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import KinematicallyForbidden, ZeroMomentum

M_ELECTRON = 0.510999
M_PROTON = 938.272

_DEGENERATE_B = 1e-12
_ZERO_MOMENTUM = 1e-14


@dataclass(frozen=True)
class FourMomentum:
    E: float
    px: float
    py: float
    pz: float

    @classmethod
    def from_array(cls, a) -> "FourMomentum":
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def on_shell(cls, p3, m: float) -> "FourMomentum":
        p3 = np.asarray(p3, dtype=float)
        return cls(on_shell_energy(p3, m), *map(float, p3))

    @classmethod
    def at_rest(cls, m: float) -> "FourMomentum":
        return cls(float(m), 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.E, self.px, self.py, self.pz])

    @property
    def p3(self) -> np.ndarray:
        return np.array([self.px, self.py, self.pz])

    @property
    def p(self) -> float:
        """Magnitude of the 3-momentum."""
        return math.sqrt(self.px**2 + self.py**2 + self.pz**2)

    def minkowski_square(self) -> float:
        return self.E**2 - self.px**2 - self.py**2 - self.pz**2

    def dot(self, other: "FourMomentum") -> float:
        return (self.E * other.E - self.px * other.px
                - self.py * other.py - self.pz * other.pz)

    def shell_residual(self, m: float) -> float:
        """Relative deviation of E^2 - |p|^2 from m^2."""
        scale = max(self.E**2, m**2, 1e-300)
        return abs(self.minkowski_square() - m**2) / scale

    def rotated_z(self, alpha: float) -> "FourMomentum":
        c, s = math.cos(alpha), math.sin(alpha)
        return FourMomentum(self.E, c * self.px - s * self.py,
                            s * self.px + c * self.py, self.pz)

    def __add__(self, other: "FourMomentum") -> "FourMomentum":
        return FourMomentum(self.E + other.E, self.px + other.px,
                            self.py + other.py, self.pz + other.pz)

    def __sub__(self, other: "FourMomentum") -> "FourMomentum":
        return FourMomentum(self.E - other.E, self.px - other.px,
                            self.py - other.py, self.pz - other.pz)


@dataclass(frozen=True)
class ScatterGeometry:
    """Outgoing projectile direction ``(theta, phi)`` for each scattering.

    The first azimuth is pinned to zero: the whole setup is symmetric about
    the beam axis, so only relative azimuths are physical.
    """

    angles: tuple[tuple[float, float], ...]

    def __post_init__(self):
        angles = tuple((float(t), float(f)) for t, f in self.angles)
        object.__setattr__(self, "angles", angles)
        if not angles:
            raise ValueError("geometry needs at least one scattering")
        if angles[0][1] != 0.0:
            raise ValueError("first azimuth must be 0")
        for i, (theta, phi) in enumerate(angles, start=1):
            if not 0.0 <= theta <= math.pi:
                raise ValueError(f"theta_{i}={theta} outside [0, pi]")
            if not 0.0 <= phi < 2 * math.pi:
                raise ValueError(f"phi_{i}={phi} outside [0, 2pi)")

    @classmethod
    def single(cls, theta: float) -> "ScatterGeometry":
        return cls(((theta, 0.0),))

    @classmethod
    def double(cls, theta1: float, theta2: float, dphi: float) -> "ScatterGeometry":
        return cls(((theta1, 0.0), (theta2, dphi % (2 * math.pi))))

    @classmethod
    def reflected(cls, n: int, dphi: float = math.pi) -> "ScatterGeometry":
        """All projectiles sent straight back, consecutive azimuths ``dphi`` apart."""
        return cls(tuple((math.pi, (i * dphi) % (2 * math.pi)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.angles)

    def rotated(self, alpha: float) -> list[tuple[float, float]]:
        """Angles after a rigid rotation about z (first azimuth no longer 0)."""
        return [(t, (f + alpha) % (2 * math.pi)) for t, f in self.angles]


@dataclass(frozen=True)
class Scattering:
    k_in: FourMomentum
    p_in: FourMomentum
    k_out: FourMomentum
    p_out: FourMomentum


@dataclass(frozen=True)
class CascadeKinematics:
    scatterings: tuple[Scattering, ...]
    m: float
    M: float

    def __len__(self) -> int:
        return len(self.scatterings)

    def __iter__(self) -> Iterator[Scattering]:
        return iter(self.scatterings)

    def __getitem__(self, i: int) -> Scattering:
        return self.scatterings[i]

    @property
    def final_target(self) -> FourMomentum:
        return self.scatterings[-1].p_out

    def conservation_residual(self) -> float:
        """Largest relative componentwise mismatch of total in vs total out."""
        total_in = self.scatterings[0].p_in.as_array()
        total_out = self.final_target.as_array()
        for s in self.scatterings:
            total_in = total_in + s.k_in.as_array()
            total_out = total_out + s.k_out.as_array()
        scale = max(abs(total_in[0]), 1e-300)
        return float(np.max(np.abs(total_in - total_out)) / scale)


def on_shell_energy(p3, m: float) -> float:
    p3 = np.asarray(p3, dtype=float)
    return math.sqrt(float(p3 @ p3) + m * m)


def unit_vector(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def polar_of(p: FourMomentum) -> tuple[float, float]:
    """Spherical angles of the 3-momentum, ``theta in [0, pi]``, ``phi in [0, 2pi)``."""
    rho = math.hypot(p.px, p.py)
    if math.hypot(rho, p.pz) < _ZERO_MOMENTUM:
        raise ZeroMomentum("direction undefined for |p| < 1e-14 MeV")
    theta = math.atan2(rho, p.pz)
    phi = math.atan2(p.py, p.px) % (2 * math.pi)
    if phi >= 2 * math.pi:
        phi = 0.0
    return theta, phi


def _a_b(k_in: FourMomentum, p_in: FourMomentum, m: float, e: np.ndarray):
    e_tot = k_in.E + p_in.E
    a = (m * m + k_in.E * p_in.E - float(k_in.p3 @ p_in.p3)) / e_tot
    b = float(e @ (k_in.p3 + p_in.p3)) / e_tot
    return a, b


def _satisfies(k: float, a: float, b: float, m: float) -> bool:
    rhs = a + b * k
    if rhs < 0:
        return False
    lhs = math.sqrt(k * k + m * m)
    return abs(lhs - rhs) <= 1e-9 * max(lhs, abs(a), 1.0)


def outgoing_projectile_magnitude(k_in: FourMomentum, p_in: FourMomentum,
                                  m: float, M: float,
                                  theta: float, phi: float) -> float:
    """|k_out| for an outgoing projectile along ``(theta, phi)``.

    Solves ``sqrt(k^2 + m^2) = a + b k`` where ``a`` and ``b`` follow from
    energy conservation and the on-shell condition for the recoiling target.
    Roots of the squared quadratic are kept only if they are non-negative and
    satisfy the unsquared equation; when two survive (e.g. equal masses,
    where ``k = 0`` always solves it) the larger one is returned.
    """
    e = unit_vector(theta, phi)
    a, b = _a_b(k_in, p_in, m, e)
    total = k_in + p_in
    # b^2 - 1 = -(s + |P x e|^2) / E_S^2, free of the cancellation near |b| = 1
    perp = np.cross(total.p3, e)
    quad = -(m * m + M * M + 2.0 * k_in.dot(p_in) + float(perp @ perp)) / total.E ** 2
    # a - m = [(E_k - m)(E_p - m) - k.p] / E_S, stable in the slow limit
    ek_m = k_in.p ** 2 / (k_in.E + m)
    ep_m = p_in.p ** 2 / (p_in.E + M) + (M - m)
    const = (ek_m * ep_m - float(k_in.p3 @ p_in.p3)) / total.E * (a + m)  # a^2 - m^2
    if abs(quad) < _DEGENERATE_B:
        if a * b == 0.0:
            raise KinematicallyForbidden("degenerate linear equation has no root")
        candidates = [-const / (2 * a * b)]
    else:
        disc = const + m * m * b * b
        if 0 > disc >= -1e-12 * a * a:
            disc = 0.0  # tangent direction, double root
        if disc < 0:
            raise KinematicallyForbidden(
                f"direction theta={theta:.6g} outside the allowed cone")
        q = -(a * b + math.copysign(math.sqrt(disc), a * b))
        candidates = [q / quad, const / q if q != 0.0 else 0.0]
    valid = []
    for k in candidates:
        if -1e-12 * max(abs(a), 1.0) <= k < 0:
            k = 0.0
        if k >= 0 and _satisfies(k, a, b, m):
            valid.append(k)
    if not valid:
        raise KinematicallyForbidden(
            f"no positive |k_out| for theta={theta:.6g}, phi={phi:.6g}")
    return max(valid)


def first_scattering_magnitude(p: float, m: float, M: float, theta: float) -> float:
    """Closed-form |k_out| for a projectile of momentum ``p`` on a target at rest."""
    E = math.sqrt(p * p + m * m)
    c = math.cos(theta)
    num = ((m * m + M * E) * c
           + (M + E) * math.sqrt(max(M * M - m * m * math.sin(theta) ** 2, 0.0)))
    s2 = math.sin(theta) ** 2
    # (M + E)^2 - p^2 cos^2 written without cancellation
    return p * num / (M * M + 2 * M * E + m * m + p * p * s2)


def solve_scattering(k_in: FourMomentum, p_in: FourMomentum, m: float, M: float,
                     theta: float, phi: float) -> tuple[FourMomentum, FourMomentum]:
    k = outgoing_projectile_magnitude(k_in, p_in, m, M, theta, phi)
    k_out = FourMomentum.on_shell(k * unit_vector(theta, phi), m)
    p_out = k_in + p_in - k_out
    return k_out, p_out


def beam(p: float, m: float) -> FourMomentum:
    return FourMomentum(math.sqrt(m * m + p * p), 0.0, 0.0, float(p))


def build_cascade(p: float, m: float, M: float,
                  geometry: ScatterGeometry | Sequence[tuple[float, float]]
                  ) -> CascadeKinematics:
    """Solve every scattering in turn, feeding each recoil into the next.

    ``geometry`` may also be a bare list of angle pairs; that path skips the
    first-azimuth gauge check so rotated copies can be built for testing.
    """
    if p <= 0:
        raise ValueError(f"beam momentum must be positive, got {p}")
    angles = geometry.angles if isinstance(geometry, ScatterGeometry) else geometry
    k_in = beam(p, m)
    p_in = FourMomentum.at_rest(M)
    out = []
    for i, (theta, phi) in enumerate(angles, start=1):
        try:
            k_out, p_out = solve_scattering(k_in, p_in, m, M, theta, phi)
        except KinematicallyForbidden as exc:
            raise KinematicallyForbidden(str(exc), index=i) from exc
        out.append(Scattering(k_in, p_in, k_out, p_out))
        p_in = p_out
    return CascadeKinematics(tuple(out), float(m), float(M))
