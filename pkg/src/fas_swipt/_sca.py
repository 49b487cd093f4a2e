"""Cosine-sum surrogates shared by the receive and transmit position steps.

For coefficients ``w`` and path directions ``a_q`` the surrogate is
``Re{sum_q w_q exp(j kappa a_q . p)} = sum_q |w_q| cos(kappa a_q . p + arg w_q)``.
"""
from __future__ import annotations

import numpy as np


def cos_sum(p, w, directions, kappa):
    p = np.asarray(p, dtype=float)
    phase = kappa * (p[0] * directions[:, 0] + p[1] * directions[:, 1])
    return float(np.real(np.exp(1j * phase) @ w))


def cos_sum_gradient(p, w, directions, kappa):
    p = np.asarray(p, dtype=float)
    phase = kappa * (p[0] * directions[:, 0] + p[1] * directions[:, 1]) + np.angle(w)
    coef = -kappa * np.abs(w) * np.sin(phase)
    return coef @ directions


def curvature_bound(w, kappa):
    # each path's Hessian is -kappa^2 |w_q| cos(.) a_q a_q^T with entries bounded by kappa^2 |w_q|
    return float(2.0 * kappa**2 * np.sum(np.abs(w)))
