"""Closed-form model quantities: flux, smooth flux extension, equilibrium
family, and the analytic envelopes/curves used to audit simulations.

The conservation law is

    d_t n + d_x F(x, n) = 0,    F(x, n) = (2x - x^2) n - n^2,

on the half-line x >= 0.  Everything in this module is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FluxModel",
    "flux",
    "wave_speed",
    "equilibrium_value",
    "equilibrium_number",
    "equilibrium_cell_averages",
    "alpha_from_number",
    "supersolution",
    "slope_bound",
    "support_curve",
    "characteristic_rhs",
    "g_interior",
]

MAX_EQUILIBRIUM_NUMBER = 4.0 / 3.0


def _check_finite(name, value):
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


def g_interior(x):
    """Flux coefficient 2x - x^2 on the physical domain."""
    x = np.asarray(x, dtype=float)
    return 2.0 * x - x * x


def flux(x, n):
    """Interior flux F(x, n) = (2x - x^2) n - n^2."""
    _check_finite("x", x)
    _check_finite("n", n)
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    out = (2.0 * x - x * x) * n - n * n
    return float(out) if out.ndim == 0 else out


def wave_speed(x, n):
    """Characteristic speed dF/dn = g(x) - 2n."""
    _check_finite("x", x)
    _check_finite("n", n)
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    out = 2.0 * x - x * x - 2.0 * n
    return float(out) if out.ndim == 0 else out


def _hermite(x, x0, x1, y0, y1, d0, d1):
    # cubic Hermite matching values and derivatives at both ends
    w = x1 - x0
    s = (x - x0) / w
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * y0 + h10 * w * d0 + h01 * y1 + h11 * w * d1


@dataclass(frozen=True)
class FluxModel:
    """Flux coefficient g on [0, R] together with its C^1 extension to R.

    The extension is pinned to 2x - x^2 on [0, R], to the constant
    2R - R^2 - 1 on [2R, inf), and to -1 on (-inf, -1]; the gaps between
    pinned regions are filled with cubic Hermite interpolants so the
    result is continuously differentiable everywhere.

    ``blend_width`` is kept as a tunable of the extension interface; the
    Hermite fill spans the full pinned gaps, so the default value is
    inert.
    """

    support_radius: float = 2.0
    blend_width: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.support_radius) and self.support_radius >= 2.0):
            raise ValueError(
                f"support_radius must be >= 2, got {self.support_radius}"
            )

    def g(self, x):
        """Interior coefficient 2x - x^2 (no extension)."""
        return g_interior(x)

    def g_extended(self, x):
        """C^1 extension of g to the whole real line."""
        _check_finite("x", x)
        x = np.asarray(x, dtype=float)
        R = self.support_radius
        far_value = 2.0 * R - R * R - 1.0
        out = np.empty_like(x)

        left = x < -1.0
        lgap = (x >= -1.0) & (x < 0.0)
        mid = (x >= 0.0) & (x <= R)
        rgap = (x > R) & (x < 2.0 * R)
        right = x >= 2.0 * R

        out[left] = -1.0
        out[lgap] = _hermite(x[lgap], -1.0, 0.0, -1.0, 0.0, 0.0, 2.0)
        out[mid] = 2.0 * x[mid] - x[mid] * x[mid]
        out[rgap] = _hermite(
            x[rgap], R, 2.0 * R, 2.0 * R - R * R, far_value, 2.0 - 2.0 * R, 0.0
        )
        out[right] = far_value
        return float(out) if out.ndim == 0 else out

    def flux(self, x, n):
        """Interior flux F(x, n)."""
        return flux(x, n)

    def flux_extended(self, x, n):
        """Extended flux g_ext(x) n - n^2 on the whole line."""
        _check_finite("n", n)
        n = np.asarray(n, dtype=float)
        out = self.g_extended(x) * n - n * n
        return float(out) if np.ndim(out) == 0 else out

    def wave_speed(self, x, n):
        return wave_speed(x, n)

    def wave_speed_extended(self, x, n):
        _check_finite("n", n)
        n = np.asarray(n, dtype=float)
        out = self.g_extended(x) - 2.0 * n
        return float(out) if np.ndim(out) == 0 else out

    def cprime(self, samples: int = 200001) -> float:
        """Speed scale 2 sup|g_ext'| over [-1, 2R], estimated on a fine grid."""
        R = self.support_radius
        xs = np.linspace(-1.0, 2.0 * R, samples)
        gs = self.g_extended(xs)
        deriv = np.gradient(gs, xs)
        return 2.0 * float(np.max(np.abs(deriv)))


def _check_alpha(alpha):
    if not np.isfinite(alpha) or alpha < 0.0 or alpha > 2.0:
        raise ValueError(f"alpha must lie in [0, 2], got {alpha}")


def equilibrium_value(alpha, x):
    """Stationary profile: 2x - x^2 on (alpha, 2), zero elsewhere."""
    _check_alpha(alpha)
    x = np.asarray(x, dtype=float)
    out = np.where((x > alpha) & (x < 2.0), 2.0 * x - x * x, 0.0)
    return float(out) if out.ndim == 0 else out


def equilibrium_number(alpha):
    """Photon number of the stationary profile: 4/3 - alpha^2 + alpha^3/3."""
    _check_alpha(alpha)
    # the cubic evaluates to -4e-16 at alpha = 2; keep the number physical
    return max(4.0 / 3.0 - alpha * alpha + alpha**3 / 3.0, 0.0)


def equilibrium_cell_averages(alpha, edges, scale: float = 1.0):
    """Exact cell averages of ``scale`` times the stationary profile.

    ``edges`` are the cell interface positions (length cells + 1).
    """
    _check_alpha(alpha)
    edges = np.asarray(edges, dtype=float)
    lo = np.clip(edges[:-1], alpha, 2.0)
    hi = np.clip(edges[1:], alpha, 2.0)

    def antideriv(x):
        return x * x - x**3 / 3.0

    dx = np.diff(edges)
    # rounding in the clips can leave a -1e-13 residue in the cell holding
    # alpha; clamp so sampled data are genuinely non-negative
    return np.maximum(scale * (antideriv(hi) - antideriv(lo)) / dx, 0.0)


def alpha_from_number(number):
    """Invert the strictly decreasing map alpha -> photon number by bisection."""
    if not np.isfinite(number) or number < 0.0 or number > MAX_EQUILIBRIUM_NUMBER:
        raise ValueError(f"photon number must lie in [0, 4/3], got {number}")
    lo, hi = 0.0, 2.0  # N(lo) = 4/3 >= number >= 0 = N(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if equilibrium_number(mid) >= number:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def supersolution(t, x, R=2.0, M=math.inf):
    """Upper barrier (g + sqrt(g^2 + 4 K G)) / 2 decaying to the maximal
    equilibrium, with K(t) = 1/(3t + 1/M)^2 and G(x) = (3R - x)^2."""
    if M <= 0.0:
        raise ValueError(f"cap M must be positive, got {M}")
    if math.isinf(M) and t <= 0.0:
        raise ValueError("t must be positive when the cap is infinite")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or np.any(x > R):
        raise ValueError("x must lie in [0, R]")
    inv_m = 0.0 if math.isinf(M) else 1.0 / M
    K = 1.0 / (3.0 * t + inv_m) ** 2
    G = (3.0 * R - x) ** 2
    g = 2.0 * x - x * x
    out = 0.5 * (g + np.sqrt(g * g + 4.0 * K * G))
    return float(out) if out.ndim == 0 else out


def slope_bound(t, cprime=4.0):
    """Lower bound on forward difference quotients at time t > 0.

    Returns -C'/4 - sqrt(1 + C'^2) / (2 (1 - exp(-t sqrt(1 + C'^2)))),
    strictly increasing in t and always negative.
    """
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    if cprime < 0.0:
        raise ValueError(f"cprime must be non-negative, got {cprime}")
    s = math.sqrt(1.0 + cprime * cprime)
    denom = 2.0 * (1.0 - math.exp(-t * s))
    if denom == 0.0:
        return -math.inf
    return -cprime / 4.0 - s / denom


def support_curve(t, R):
    """Rightmost support position: the logistic curve s' = 2s - s^2, s(0) = R."""
    if R < 2.0:
        raise ValueError(f"R must be >= 2, got {R}")
    t = np.asarray(t, dtype=float)
    out = 2.0 / (1.0 + ((2.0 - R) / R) * np.exp(-2.0 * t))
    return float(out) if out.ndim == 0 else out


def characteristic_rhs(x, n):
    """Characteristic system: (x' , n') = (2x - x^2 - 2n, 2xn - 2n)."""
    _check_finite("x", x)
    _check_finite("n", n)
    return (2.0 * x - x * x - 2.0 * n, 2.0 * x * n - 2.0 * n)
