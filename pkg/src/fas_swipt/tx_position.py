"""Per-antenna transmit position step.

Antenna n is moved to increase its own channel gain ``|h_E,n(t_n)|^2`` while
keeping the IR channel gain above ``gamma_bar sigma_I2 / P`` and every other
antenna at least D away. Each SCA iteration replaces the objective and the
SINR constraint by quadratic minorants and the distance constraints by
supporting halfplanes; the resulting 2-D convex QCQP is a Euclidean
projection onto box, halfplanes and a disk.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _sca
from .channel import (
    AntennaLayout,
    ChannelGeometry,
    Region,
    field_response_rx,
    field_response_tx,
    ir_channel,
)

COINCIDENT_TOL = 1e-12
FEAS_TOL = 1e-10


@dataclass(eq=False)
class TxSurrogate:
    w_B: np.ndarray
    beta: float
    w_C: np.ndarray
    gamma_n: float
    t_i: np.ndarray
    grad_B: np.ndarray
    grad_C: np.ndarray
    y_i: float  # g(t_i)^H B g(t_i)
    z_i: float  # g(t_i)^H C g(t_i)


@dataclass(eq=False)
class Disk:
    center: np.ndarray
    radius2: float

    def contains(self, p, tol: float = FEAS_TOL) -> bool:
        if not np.isfinite(self.radius2):
            return True
        d = np.asarray(p, dtype=float) - self.center
        return bool(d @ d <= self.radius2 + tol * (1.0 + self.radius2))


@dataclass(eq=False)
class TxConstraintSet:
    """``box`` and halfplanes ``a . t >= d`` plus an optional disk."""

    box: Region
    halfplanes: list = field(default_factory=list)
    disk: Disk | None = None

    def contains(self, p, tol: float = FEAS_TOL) -> bool:
        p = np.asarray(p, dtype=float)
        if not self.box.contains(p, tol):
            return False
        if any(a @ p < d - tol * (1.0 + abs(d)) for a, d in self.halfplanes):
            return False
        return self.disk is None or self.disk.contains(p, tol)


def build_B(r, geom: ChannelGeometry) -> np.ndarray:
    """``Sigma_E^H f(r) f(r)^H Sigma_E`` (rank one)."""
    v = geom.sigma_E.conj().T @ field_response_rx(r, geom.er_rx_angles, geom.wavelength)
    return np.outer(v, v.conj())


def build_C(geom: ChannelGeometry) -> np.ndarray:
    """``Sigma_I^H f(r0) f(r0)^H Sigma_I`` at the fixed IR position."""
    v = geom.sigma_I.conj().T @ field_response_rx(geom.r0, geom.ir_rx_angles, geom.wavelength)
    return np.outer(v, v.conj())


def tx_objective(t_n, B, geom: ChannelGeometry) -> float:
    g = field_response_tx(t_n, geom)
    return float(np.real(g.conj() @ B @ g))


def tx_surrogates(t_i, B, C, geom: ChannelGeometry) -> TxSurrogate:
    t_i = np.asarray(t_i, dtype=float)
    g = field_response_tx(t_i, geom)
    dirs, k = geom.tx_angles.directions, geom.kappa
    w_B = g.conj() @ B
    w_C = g.conj() @ C
    return TxSurrogate(
        w_B=w_B,
        beta=_sca.curvature_bound(w_B, k),
        w_C=w_C,
        gamma_n=_sca.curvature_bound(w_C, k),
        t_i=t_i,
        grad_B=_sca.cos_sum_gradient(t_i, w_B, dirs, k),
        grad_C=_sca.cos_sum_gradient(t_i, w_C, dirs, k),
        y_i=float(np.real(w_B @ g)),
        z_i=float(np.real(w_C @ g)),
    )


def surrogate_gradients(t, s: TxSurrogate, geom: ChannelGeometry):
    """Gradients of ``Re{g(t_i)^H B g(t)}`` and ``Re{g(t_i)^H C g(t)}`` at t."""
    dirs, k = geom.tx_angles.directions, geom.kappa
    return _sca.cos_sum_gradient(t, s.w_B, dirs, k), _sca.cos_sum_gradient(t, s.w_C, dirs, k)


def surrogate_values(t, s: TxSurrogate, geom: ChannelGeometry):
    dirs, k = geom.tx_angles.directions, geom.kappa
    return _sca.cos_sum(t, s.w_B, dirs, k), _sca.cos_sum(t, s.w_C, dirs, k)


def objective_lower_bound(t, s: TxSurrogate) -> float:
    d = np.asarray(t, dtype=float) - s.t_i
    return s.y_i + 2.0 * s.grad_B @ d - s.beta * d @ d


def sinr_lower_bound(t, s: TxSurrogate) -> float:
    d = np.asarray(t, dtype=float) - s.t_i
    return s.z_i + 2.0 * s.grad_C @ d - s.gamma_n * d @ d


def linearize_distance(t_n_i, t_l, D: float):
    """Halfplane ``a . t >= d`` that implies ``|t - t_l| >= D`` and touches at t_n_i's direction."""
    t_n_i = np.asarray(t_n_i, dtype=float)
    t_l = np.asarray(t_l, dtype=float)
    diff = t_n_i - t_l
    dist = np.linalg.norm(diff)
    if dist < COINCIDENT_TOL:
        diff = (t_n_i + np.array([1e-9, 0.0])) - t_l
        dist = np.linalg.norm(diff)
    a = diff / dist
    return a, float(D + a @ t_l)


def sinr_surrogate_constraint(s: TxSurrogate, h_I_others, gamma_bar: float, sigma_I2: float, P: float):
    """Disk form of the linearized IR-gain constraint.

    Returns a ``Disk`` (infinite radius when the constraint does not depend
    on t and holds) or ``None`` when no point satisfies it.
    """
    h_I_others = np.asarray(h_I_others).reshape(-1)
    rest = float(np.vdot(h_I_others, h_I_others).real)
    t_i, g = s.t_i, s.gamma_n
    const = -2.0 * s.grad_C @ t_i - g * t_i @ t_i + s.z_i + rest - sigma_I2 * gamma_bar / P
    if g <= 0:
        return Disk(t_i.copy(), np.inf) if const >= 0 else None
    c = (s.grad_C + g * t_i) / g
    radius2 = const / g + c @ c
    if radius2 < 0:
        return None
    return Disk(c, float(radius2))


def _box_halfplanes(box: Region):
    ex, ey = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    return [(ex, box.x_min), (-ex, -box.x_max), (ey, box.y_min), (-ey, -box.y_max)]


def _line_circle(a, d, disk: Disk):
    # points with a . t = d on the circle |t - c|^2 = radius2
    foot = disk.center + (d - a @ disk.center) * a
    h2 = disk.radius2 - (d - a @ disk.center) ** 2
    if h2 < 0:
        return []
    h = np.sqrt(h2)
    perp = np.array([-a[1], a[0]])
    return [foot + h * perp, foot - h * perp]


def project(p, cons: TxConstraintSet) -> np.ndarray:
    """Euclidean projection of ``p`` onto the constraint set, by active-set enumeration.

    In 2-D the projection is either p itself, the projection onto a single
    constraint boundary, or an intersection point of two boundaries; the
    closest feasible candidate is the answer.
    """
    p = np.asarray(p, dtype=float)
    if cons.contains(p):
        return p.copy()
    lines = _box_halfplanes(cons.box) + [(np.asarray(a, float), float(d)) for a, d in cons.halfplanes]
    disk = cons.disk if cons.disk is not None and np.isfinite(cons.disk.radius2) else None

    cands = [p + (d - a @ p) * a for a, d in lines]
    if disk is not None:
        v = p - disk.center
        nv = np.linalg.norm(v)
        u = v / nv if nv > 0 else np.array([1.0, 0.0])
        cands.append(disk.center + np.sqrt(disk.radius2) * u)
        for a, d in lines:
            cands.extend(_line_circle(a, d, disk))
    for (a1, d1), (a2, d2) in itertools.combinations(lines, 2):
        M = np.array([a1, a2])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        cands.append(np.linalg.solve(M, [d1, d2]))

    best, best_d = None, np.inf
    for q in cands:
        if cons.contains(q):
            dq = np.linalg.norm(q - p)
            if dq < best_d:
                best, best_d = q, dq
    if best is None:
        best = project_dykstra(p, cons)
        if not cons.contains(best, 1e-8):
            raise RuntimeError("QCQP feasible set is empty")
    return cons.box.clip(best)


def project_dykstra(p, cons: TxConstraintSet, tol: float = 1e-10, max_cycles: int = 100000) -> np.ndarray:
    """Dykstra's alternating projections onto box, halfplanes and disk."""
    projs = [cons.box.clip]
    for a, d in cons.halfplanes:
        a = np.asarray(a, float)
        projs.append(lambda q, a=a, d=d: q + max(0.0, d - a @ q) * a)
    disk = cons.disk
    if disk is not None and np.isfinite(disk.radius2):
        rad = np.sqrt(disk.radius2)

        def _disk(q):
            v = q - disk.center
            nv = np.linalg.norm(v)
            return q if nv <= rad else disk.center + v * (rad / nv)

        projs.append(_disk)
    x = np.asarray(p, dtype=float).copy()
    incr = [np.zeros(2) for _ in projs]
    for _ in range(max_cycles):
        x_start = x.copy()
        for k, proj in enumerate(projs):
            y = proj(x + incr[k])
            incr[k] = x + incr[k] - y
            x = y
        if np.linalg.norm(x - x_start) < tol:
            break
    return x


def solve_qcqp_2d(s: TxSurrogate, cons: TxConstraintSet) -> np.ndarray:
    """Maximize ``-(beta/2)|t|^2 + (grad + beta t_i) . t`` over the constraint set."""
    if s.beta <= 0:
        raise ValueError("objective curvature bound must be positive")
    return project(s.t_i + s.grad_B / s.beta, cons)


def qcqp_objective(t, s: TxSurrogate) -> float:
    t = np.asarray(t, dtype=float)
    return float(-0.5 * s.beta * t @ t + (s.grad_B + s.beta * s.t_i) @ t)


def constraint_set(n: int, t, s: TxSurrogate, C_t: Region, D: float, disk: Disk | None) -> TxConstraintSet:
    t = np.asarray(t, dtype=float).reshape(-1, 2)
    halfplanes = [linearize_distance(s.t_i, t[l], D) for l in range(t.shape[0]) if l != n]
    if disk is not None and not np.isfinite(disk.radius2):
        disk = None
    return TxConstraintSet(C_t, halfplanes, disk)


def optimize_tx_n(n: int, layout: AntennaLayout, geom: ChannelGeometry, C_t: Region, D: float,
                  gamma_bar: float, sigma_I2: float, P: float, inner_tol: float = 1e-5,
                  max_inner: int = 100, history: list | None = None, B=None, C=None):
    """SCA on antenna n with the others fixed; returns ``(t_n, iterations, surrogate_infeasible)``.

    The proxy objective ``g(t_n)^H B g(t_n)`` is non-decreasing over iterates;
    ``history`` collects it when given. The flag is set when the linearized
    SINR constraint is empty at the expansion point and the update is skipped.
    """
    t = layout.t.copy()
    B = build_B(layout.r, geom) if B is None else B
    C = build_C(geom) if C is None else C
    h_I = ir_channel(t, geom)
    h_I_others = np.delete(h_I, n)
    t_n = t[n].copy()
    y = tx_objective(t_n, B, geom)
    if history is not None:
        history.append(y)
    it = 0
    infeasible = False
    while it < max_inner:
        it += 1
        s = tx_surrogates(t_n, B, C, geom)
        if s.beta <= 0:
            break
        if gamma_bar <= 0:
            disk = None  # IR gain is never negative
        else:
            disk = sinr_surrogate_constraint(s, h_I_others, gamma_bar, sigma_I2, P)
        if disk is None and gamma_bar > 0:
            infeasible = True
            break
        cons = constraint_set(n, t, s, C_t, D, disk)
        t_new = solve_qcqp_2d(s, cons)
        y_new = tx_objective(t_new, B, geom)
        if history is not None:
            history.append(y_new)
        gain = y_new - y
        if gain < 0:
            break
        t_n, y = t_new, y_new
        t[n] = t_n
        if gain <= inner_tol * max(abs(y), 1e-300):
            break
    return t_n, it, infeasible
