"""Closed-form transition densities used as quadrature oracles."""

import math

import numpy as np
from scipy import integrate

from .model import sigma_inverse

__all__ = [
    "skew_bm_density",
    "natural_density",
    "feynman_kac_quadrature",
    "heat_kernel_expectation",
]


def _phi(z, t):
    return np.exp(-0.5 * z * z / t) / math.sqrt(2.0 * math.pi * t)


def skew_bm_density(t, x, y, alpha):
    """Transition density of skew BM from ``x`` to ``y`` over time ``t``.

    From ``x >= 0``: ``phi(y-x) + (2 alpha - 1) phi(y+x)`` for ``y > 0`` and
    ``2 (1 - alpha) phi(y-x)`` for ``y < 0``; mirrored for ``x < 0``.
    """
    y = np.asarray(y, dtype=float)
    if x < 0:
        return skew_bm_density(t, -x, -y, 1.0 - alpha)
    out = np.where(
        y > 0,
        _phi(y - x, t) + (2.0 * alpha - 1.0) * _phi(y + x, t),
        2.0 * (1.0 - alpha) * _phi(y - x, t),
    )
    return out[()] if out.ndim == 0 else out


def natural_density(model, t, x, y, alpha=None):
    """Density of ``Y_t = sigma(B_t)`` given ``Y_0 = x``."""
    a = model.alpha if alpha is None else alpha
    m = model.medium
    y = np.asarray(y, dtype=float)
    b = sigma_inverse(m, y)
    jac = np.where(y > 0, 1.0 / m.sqrt_plus, 1.0 / m.sqrt_minus)
    out = skew_bm_density(t, float(sigma_inverse(m, x)), b, a) * jac
    return out[()] if out.ndim == 0 else out


def feynman_kac_quadrature(c0, model, x, t, alpha=None):
    """``E_x c0(Y_t)`` by adaptive quadrature against the natural density."""
    if t == 0:
        return float(c0(x))
    m = model.medium
    spread = 12.0 * math.sqrt(max(m.d_minus, m.d_plus) * t)

    def f(y):
        return float(c0(y)) * float(natural_density(model, t, x, y, alpha))

    lo = min(x, 0.0) - spread
    hi = max(x, 0.0) + spread
    pts_minus = [p for p in (x,) if lo < p < 0.0]
    pts_plus = [p for p in (x,) if 0.0 < p < hi]
    left, _ = integrate.quad(f, lo, 0.0, points=pts_minus or None, limit=200,
                             epsabs=1e-12, epsrel=1e-10)
    right, _ = integrate.quad(f, 0.0, hi, points=pts_plus or None, limit=200,
                              epsabs=1e-12, epsrel=1e-10)
    return left + right


def heat_kernel_expectation(c0, d, x, t, order=80):
    """``E c0(x + sqrt(d t) Z)`` by Gauss-Hermite quadrature (homogeneous medium)."""
    if t == 0:
        return float(c0(x))
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    vals = c0(x + math.sqrt(d * t) * nodes)
    return float(np.dot(weights, vals) / math.sqrt(2.0 * math.pi))
