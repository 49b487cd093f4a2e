"""Field-response channel model for a fluid-antenna MISO link.

Positions are 2-vectors in wavelengths; a set of N transmit positions is an
``(N, 2)`` array. Channel vectors are 1-D arrays interpreted as row vectors,
so harvested power is ``h @ Q @ h.conj()``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PSD_RTOL = 1e-8


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``.

    A zero-width side is allowed; it pins that coordinate.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise ValueError(f"empty region {self}")

    @classmethod
    def square(cls, side: float, center=(0.0, 0.0)) -> "Region":
        cx, cy = center
        h = side / 2.0
        return cls(cx - h, cx + h, cy - h, cy + h)

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2])

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.x_min, self.y_min])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.x_max, self.y_max])

    def contains(self, p, tol: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def clip(self, p) -> np.ndarray:
        return np.clip(np.asarray(p, dtype=float), self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class PathAngles:
    """Elevation ``theta`` and azimuth ``phi`` (radians, in [0, pi]) per path."""

    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        if theta.shape != phi.shape or theta.ndim != 1:
            raise ValueError("theta and phi must be 1-D arrays of equal length")
        eps = 1e-12
        if np.any(theta < -eps) or np.any(theta > np.pi + eps) or np.any(phi < -eps) or np.any(phi > np.pi + eps):
            raise ValueError("path angles must lie in [0, pi]")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        dirs = np.column_stack([np.sin(theta) * np.cos(phi), np.cos(theta)])
        dirs.flags.writeable = False
        object.__setattr__(self, "_directions", dirs)

    def __len__(self) -> int:
        return self.theta.size

    @property
    def directions(self) -> np.ndarray:
        """``(L, 2)`` array of ``[sin(theta) cos(phi), cos(theta)]`` per path."""
        return self._directions


@dataclass(frozen=True, eq=False)
class ChannelGeometry:
    tx_angles: PathAngles
    er_rx_angles: PathAngles
    ir_rx_angles: PathAngles
    sigma_E: np.ndarray
    sigma_I: np.ndarray
    r0: np.ndarray = field(default_factory=lambda: np.zeros(2))
    wavelength: float = 1.0

    def __post_init__(self):
        sigma_E = np.atleast_2d(np.asarray(self.sigma_E, dtype=complex))
        sigma_I = np.atleast_2d(np.asarray(self.sigma_I, dtype=complex))
        L_t, L_r = len(self.tx_angles), len(self.er_rx_angles)
        if L_t < 1 or L_r < 1:
            raise ValueError("need at least one path on each side")
        if len(self.ir_rx_angles) != L_r:
            raise ValueError("ER and IR receive angle sets must both have L_r paths")
        for name, s in (("sigma_E", sigma_E), ("sigma_I", sigma_I)):
            if s.shape != (L_r, L_t):
                raise ValueError(f"{name} has shape {s.shape}, expected {(L_r, L_t)}")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        object.__setattr__(self, "sigma_E", sigma_E)
        object.__setattr__(self, "sigma_I", sigma_I)
        object.__setattr__(self, "r0", np.asarray(self.r0, dtype=float).reshape(2))

    @property
    def L_t(self) -> int:
        return len(self.tx_angles)

    @property
    def L_r(self) -> int:
        return len(self.er_rx_angles)

    @property
    def kappa(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(eq=False)
class AntennaLayout:
    """Transmit positions ``t`` with shape ``(N, 2)`` and ER position ``r``."""

    t: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        self.t = np.array(self.t, dtype=float).reshape(-1, 2)
        self.r = np.array(self.r, dtype=float).reshape(2)

    @property
    def N(self) -> int:
        return self.t.shape[0]

    def copy(self) -> "AntennaLayout":
        return AntennaLayout(self.t.copy(), self.r.copy())

    def min_distance(self) -> float:
        if self.N < 2:
            return np.inf
        diff = self.t[:, None, :] - self.t[None, :, :]
        d = np.linalg.norm(diff, axis=-1)
        return float(d[np.triu_indices(self.N, 1)].min())

    def violations(self, C_t: Region, C_r: Region, D: float, tol: float = 1e-9) -> list[str]:
        out = []
        for n, tn in enumerate(self.t):
            if not C_t.contains(tn, tol):
                out.append(f"t[{n}]={tn} outside C_t")
        if not C_r.contains(self.r, tol):
            out.append(f"r={self.r} outside C_r")
        if self.min_distance() < D - tol:
            out.append(f"min distance {self.min_distance():.6g} < D={D}")
        return out

    def is_feasible(self, C_t: Region, C_r: Region, D: float, tol: float = 1e-9) -> bool:
        return not self.violations(C_t, C_r, D, tol)


def path_phase(p, angles: PathAngles) -> np.ndarray:
    """Path length offsets ``x sin(theta) cos(phi) + y cos(theta)`` for every path.

    ``p`` may be a single position ``(2,)`` or a stack ``(..., 2)``; the path
    axis is appended last.
    """
    p = np.asarray(p, dtype=float)
    d = angles.directions
    # elementwise rather than matmul so single and stacked calls agree bit for bit
    return p[..., 0:1] * d[:, 0] + p[..., 1:2] * d[:, 1]


def field_response(p, angles: PathAngles, wavelength: float = 1.0) -> np.ndarray:
    return np.exp(1j * (2.0 * np.pi / wavelength) * path_phase(p, angles))


def field_response_tx(t, geom: ChannelGeometry) -> np.ndarray:
    """g(t): length ``L_t`` vector of unit-modulus path phases."""
    return field_response(t, geom.tx_angles, geom.wavelength)


def field_response_matrix(t, geom: ChannelGeometry) -> np.ndarray:
    """G(t): ``(L_t, N)`` matrix whose column n is g(t_n)."""
    t = np.asarray(t, dtype=float).reshape(-1, 2)
    return field_response(t, geom.tx_angles, geom.wavelength).T


def field_response_rx(r, angles: PathAngles, wavelength: float = 1.0) -> np.ndarray:
    """f(r): length ``L_r`` vector of unit-modulus path phases."""
    return field_response(r, angles, wavelength)


def channel_vector(t, r, sigma, rx_angles: PathAngles, geom: ChannelGeometry) -> np.ndarray:
    """Row channel ``h = f(r)^H Sigma G(t)`` of length N."""
    sigma = np.atleast_2d(np.asarray(sigma))
    if sigma.shape != (len(rx_angles), geom.L_t):
        raise ValueError(f"path-response matrix has shape {sigma.shape}, expected {(len(rx_angles), geom.L_t)}")
    f = field_response_rx(r, rx_angles, geom.wavelength)
    return (f.conj() @ sigma) @ field_response_matrix(t, geom)


def er_channel(layout: AntennaLayout, geom: ChannelGeometry) -> np.ndarray:
    return channel_vector(layout.t, layout.r, geom.sigma_E, geom.er_rx_angles, geom)


def ir_channel(t, geom: ChannelGeometry) -> np.ndarray:
    return channel_vector(t, geom.r0, geom.sigma_I, geom.ir_rx_angles, geom)


def is_psd(Q, rtol: float = PSD_RTOL) -> bool:
    """PSD up to ``min eig >= -rtol * tr(Q) / N``."""
    Q = np.asarray(Q)
    herm = (Q + Q.conj().T) / 2
    n = Q.shape[0]
    scale = max(np.real(np.trace(herm)), 0.0) / n
    return bool(np.linalg.eigvalsh(herm).min() >= -rtol * scale)


def _quad(h, Q) -> float:
    h = np.asarray(h).reshape(-1)
    Q = np.asarray(Q)
    if Q.shape != (h.size, h.size):
        raise ValueError(f"covariance shape {Q.shape} does not match channel length {h.size}")
    return float(np.real(h @ Q @ h.conj()))


def harvested_power(h_E, Q) -> float:
    """Energy-receiver power ``tr(h_E Q h_E^H)`` (unit harvesting efficiency)."""
    if not is_psd(Q):
        raise ValueError("covariance is not positive semidefinite")
    return max(_quad(h_E, Q), 0.0)


def sinr(h_I, Q, sigma_I2: float) -> float:
    if sigma_I2 <= 0:
        raise ValueError("noise power must be positive")
    return max(_quad(h_I, Q), 0.0) / sigma_I2
