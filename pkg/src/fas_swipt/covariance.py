"""Transmit-covariance step: maximize harvested power under an SINR floor.

The problem has a linear objective and two linear constraints over the PSD
cone, so a rank-one maximizer exists and it lies in span{h_E^H, h_I^H}.
On that 2-D span the optimum has a closed form, which is what
``solve_covariance`` evaluates.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import harvested_power, sinr

_PARALLEL_RTOL = 1e-10


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"


@dataclass(eq=False)
class QSolution:
    Q: np.ndarray
    harvested_W: float
    achieved_sinr: float
    status: Status

    @property
    def feasible(self) -> bool:
        return self.status is Status.OPTIMAL


def max_achievable_sinr(h_I, P: float, sigma_I2: float) -> float:
    """SINR of full-power MRT toward ``h_I``; the Q step is feasible iff this >= the floor."""
    if sigma_I2 <= 0:
        raise ValueError("noise power must be positive")
    h_I = np.asarray(h_I).reshape(-1)
    return float(P * np.vdot(h_I, h_I).real / sigma_I2)


def reduce_basis(h_E, h_I) -> np.ndarray:
    """Orthonormal ``(N, k)`` basis of span{h_E^H, h_I^H} with first column h_E^H/|h_E|."""
    h_E = np.asarray(h_E, dtype=complex).reshape(-1)
    h_I = np.asarray(h_I, dtype=complex).reshape(-1)
    nE = np.linalg.norm(h_E)
    if nE == 0:
        raise ValueError("h_E is zero; the objective is degenerate")
    u1 = h_E.conj() / nE
    v = h_I.conj()
    nI = np.linalg.norm(v)
    v = v - u1 * np.vdot(u1, v)
    v = v - u1 * np.vdot(u1, v)  # second pass keeps orthogonality at 1e-16
    nv = np.linalg.norm(v)
    if nI == 0 or nv <= _PARALLEL_RTOL * nI:
        return u1[:, None]
    return np.column_stack([u1, v / nv])


def _rank_one(w, P):
    return P * np.outer(w, w.conj())


def _finish(Q, h_E, h_I, sigma_I2, status) -> QSolution:
    return QSolution(Q, harvested_power(h_E, Q), sinr(h_I, Q, sigma_I2), status)


def solve_covariance(h_E, h_I, P: float, gamma_bar: float, sigma_I2: float) -> QSolution:
    """Maximize ``tr(h_E Q h_E^H)`` s.t. ``tr(h_I Q h_I^H)/sigma_I2 >= gamma_bar``,
    ``tr(Q) <= P``, ``Q >= 0``.

    Infeasibility is reported through ``status``; the returned Q is then the
    max-SINR covariance.
    """
    if sigma_I2 <= 0:
        raise ValueError("noise power must be positive")
    h_E = np.asarray(h_E, dtype=complex).reshape(-1)
    h_I = np.asarray(h_I, dtype=complex).reshape(-1)
    N = h_E.size
    nI = np.linalg.norm(h_I)
    feasible = max_achievable_sinr(h_I, P, sigma_I2) >= gamma_bar
    status = Status.OPTIMAL if feasible else Status.INFEASIBLE

    if not feasible or np.linalg.norm(h_E) == 0:
        if nI > 0:
            Q = _rank_one(h_I.conj() / nI, P)
        else:
            Q = (P / N) * np.eye(N, dtype=complex)
        return _finish(Q, h_E, h_I, sigma_I2, status)

    U = reduce_basis(h_E, h_I)
    # coordinates of h_I^H in the basis; the SINR of w = U v is P |b^H v|^2 / sigma_I2
    b = U.conj().T @ h_I.conj()
    need = np.sqrt(max(gamma_bar, 0.0) * sigma_I2 / P)
    b1 = abs(b[0])
    if U.shape[1] == 1 or b1 >= need:
        w = U[:, 0]
    else:
        b2 = abs(b[1])
        R = np.hypot(b1, b2)
        # |b1| cos(a) + |b2| sin(a) = R cos(a - a0); take the smallest feasible a
        a0 = np.arctan2(b2, b1)
        alpha = max(a0 - np.arccos(min(1.0, need / R)), 0.0)
        psi = np.angle(b[1]) - np.angle(b[0])
        w = np.cos(alpha) * U[:, 0] + np.sin(alpha) * np.exp(1j * psi) * U[:, 1]
    return _finish(_rank_one(w, P), h_E, h_I, sigma_I2, status)


def oracle_rank1_grid(h_E, h_I, P: float, gamma_bar: float, sigma_I2: float, grid_density: int = 720) -> float:
    """Brute-force best ``P |h_E w|^2`` over a grid of unit vectors in the 2-D span.

    The basis comes from a QR factorization, independent of ``reduce_basis``.
    """
    h_E = np.asarray(h_E, dtype=complex).reshape(-1)
    h_I = np.asarray(h_I, dtype=complex).reshape(-1)
    M = np.column_stack([h_E.conj(), h_I.conj()])
    U, R = np.linalg.qr(M)
    if abs(R[1, 1]) <= 1e-10 * max(abs(R[0, 0]), np.linalg.norm(h_I), 1e-300):
        W = U[:, :1]
    else:
        W = U
    target = gamma_bar * sigma_I2
    if W.shape[1] == 1:
        cand = W[:, :1]
    else:
        alpha = np.linspace(0.0, np.pi / 2, grid_density)
        psi = np.arange(grid_density) * (2 * np.pi / grid_density)
        A, S = np.meshgrid(alpha, psi, indexing="ij")
        c1 = np.cos(A).ravel()
        c2 = (np.sin(A) * np.exp(1j * S)).ravel()
        cand = np.outer(W[:, 0], c1) + np.outer(W[:, 1], c2)
    obj = P * np.abs(h_E @ cand) ** 2
    con = P * np.abs(h_I @ cand) ** 2
    ok = con >= target
    if not np.any(ok):
        raise ValueError("no feasible grid point; grid too coarse or problem infeasible")
    return float(obj[ok].max())
