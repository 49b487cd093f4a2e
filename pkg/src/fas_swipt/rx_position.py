"""Energy-receiver position step by successive convex approximation.

With Q and the transmit positions fixed, harvested power is the quadratic
form ``x(r) = f(r)^H A f(r)``. Each iteration maximizes an isotropic
quadratic lower bound of x, tangent at the current point, over the box C_r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _sca
from .channel import ChannelGeometry, Region, field_response_matrix, field_response_rx


@dataclass(eq=False)
class RxSurrogate:
    w: np.ndarray  # w_q = [f(r_i)^H A]_q
    r_i: np.ndarray
    delta: float
    grad: np.ndarray  # gradient of the cosine-sum surrogate at r_i
    x_i: float  # x(r_i)


def build_A(t, Q, geom: ChannelGeometry) -> np.ndarray:
    """``A = Sigma_E G(t) Q G(t)^H Sigma_E^H``; does not depend on r."""
    G = field_response_matrix(t, geom)
    Q = np.asarray(Q)
    if Q.shape != (G.shape[1], G.shape[1]):
        raise ValueError(f"covariance shape {Q.shape} does not match {G.shape[1]} antennas")
    M = geom.sigma_E @ G
    A = M @ Q @ M.conj().T
    return (A + A.conj().T) / 2


def rx_objective(r, A, geom: ChannelGeometry) -> float:
    f = field_response_rx(r, geom.er_rx_angles, geom.wavelength)
    return float(np.real(f.conj() @ A @ f))


def rx_surrogate(r_i, A, geom: ChannelGeometry) -> RxSurrogate:
    r_i = np.asarray(r_i, dtype=float)
    f = field_response_rx(r_i, geom.er_rx_angles, geom.wavelength)
    w = f.conj() @ A
    dirs = geom.er_rx_angles.directions
    return RxSurrogate(
        w=w,
        r_i=r_i,
        delta=delta_bound(w, geom),
        grad=_sca.cos_sum_gradient(r_i, w, dirs, geom.kappa),
        x_i=float(np.real(w @ f)),
    )


def surrogate_value(r, s: RxSurrogate, geom: ChannelGeometry) -> float:
    """``Re{f(r_i)^H A f(r)}``."""
    return _sca.cos_sum(r, s.w, geom.er_rx_angles.directions, geom.kappa)


def surrogate_gradient(r, s: RxSurrogate, geom: ChannelGeometry) -> np.ndarray:
    return _sca.cos_sum_gradient(r, s.w, geom.er_rx_angles.directions, geom.kappa)


def delta_bound(w, geom: ChannelGeometry) -> float:
    return _sca.curvature_bound(w, geom.kappa)


def lower_bound(r, s: RxSurrogate) -> float:
    """Quadratic minorant of x(r) tangent at r_i, constants included."""
    d = np.asarray(r, dtype=float) - s.r_i
    return s.x_i + 2.0 * s.grad @ d - s.delta * d @ d


def sca_step_rx(s: RxSurrogate, region: Region) -> np.ndarray:
    """Maximizer of the quadratic surrogate over the box (clipped unconstrained step)."""
    if s.delta <= 0:
        raise ValueError("surrogate curvature bound must be positive")
    return region.clip(s.r_i + s.grad / s.delta)


def optimize_rx(r_init, A, geom: ChannelGeometry, C_r: Region, inner_tol: float = 1e-5,
                max_inner: int = 100, history: list | None = None):
    """Run SCA from ``r_init``; returns ``(r, iterations)``.

    If ``history`` is given, x(r) at every iterate (starting point included)
    is appended to it.
    """
    r = np.asarray(r_init, dtype=float).copy()
    if not C_r.contains(r, 1e-12):
        raise ValueError(f"initial position {r} lies outside the receive region")
    x = rx_objective(r, A, geom)
    if history is not None:
        history.append(x)
    it = 0
    while it < max_inner:
        it += 1
        s = rx_surrogate(r, A, geom)
        if s.delta <= 0:
            break
        r_new = sca_step_rx(s, C_r)
        x_new = rx_objective(r_new, A, geom)
        if history is not None:
            history.append(x_new)
        gain = x_new - x
        if gain < 0:
            # tangency makes this a rounding-level event; keep the old point
            break
        r, x = r_new, x_new
        if gain <= inner_tol * max(abs(x), 1e-300):
            break
    return r, it
