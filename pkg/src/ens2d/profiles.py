"""Radial steady vorticity profiles and the self-similar reference pair.

The steady rescaled vorticity with divergence mass beta satisfies a separable
log-form relation

    ln w(r) = -r^2/4 + (beta/2pi) * Phi(r) + const,
    Phi(r)  = integral_0^r (1 - exp(-s^2/4))/s ds,

normalized to unit mass 2pi * integral w(r) r dr = 1.  Phi's integrand extends
continuously by 0 at s = 0 (it behaves like s/4), so composite Gauss-Legendre
panels converge at machine precision long before the default resolution.
Working in log space keeps w positive by construction and defers the
normalization constant until it can be applied without overflow.

The sign of d(ln w)/dr near the origin is (beta - 4pi) * r / (8pi): profiles
with beta <= 4pi decay monotonically from the origin, while beta > 4pi pushes
the maximum onto a ring at positive radius.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .fields import gaussian_G, oseen_vortex, weighted_w_norm
from .grid import GridSpec, ScalarField, make_grid

TWO_PI = 2.0 * np.pi

_GL_X, _GL_W = leggauss(8)


def _phi_integrand(s: np.ndarray) -> np.ndarray:
    safe = np.where(s > 0.0, s, 1.0)
    return np.where(s > 0.0, -np.expm1(-s * s / 4.0) / safe, 0.0)


def _gl_nodes(a: np.ndarray, b: np.ndarray):
    """8-point Gauss-Legendre nodes/weights for intervals [a, b] (broadcast)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = half[..., None] * _GL_X + mid[..., None]
    weights = half[..., None] * _GL_W
    return nodes, weights


@dataclass(frozen=True)
class RadialProfile:
    """Steady profile w(r) on uniform radii with its running mass."""

    beta: float
    r: np.ndarray
    w: np.ndarray
    cumulative_mass: np.ndarray

    def __post_init__(self):
        for arr in (self.r, self.w, self.cumulative_mass):
            arr.setflags(write=False)

    @cached_property
    def spline(self) -> CubicSpline:
        # even extension through r = 0 keeps the interpolant C^2 and
        # symmetric at the origin
        r_ext = np.concatenate([-self.r[:0:-1], self.r])
        w_ext = np.concatenate([self.w[:0:-1], self.w])
        return CubicSpline(r_ext, w_ext)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])


@functools.lru_cache(maxsize=64)
def solve_ws(beta: float, r_max: float = 30.0, n_points: int = 6001) -> RadialProfile:
    """Solve the radial steady profile for divergence mass beta.

    Args:
        beta: divergence mass (dimensionless).
        r_max: truncation radius, at least 20.
        n_points: uniform samples on [0, r_max], at least 1000.

    Returns:
        RadialProfile with positive unit-mass samples.
    """
    beta = float(beta)
    if n_points < 1000:
        raise ValueError(f"n_points must be >= 1000, got {n_points}")
    if r_max < 20.0:
        raise ValueError(f"r_max must be >= 20, got {r_max}")

    r = np.linspace(0.0, float(r_max), int(n_points))
    a, b = r[:-1], r[1:]
    nodes, weights = _gl_nodes(a, b)  # (n_int, 8)

    # Phi at the uniform radii: cumulative panel integrals
    panel = (weights * _phi_integrand(nodes)).sum(axis=1)
    phi_r = np.concatenate([[0.0], np.cumsum(panel)])

    # Phi at every panel node: panel start value plus a nested GL integral
    inner_nodes, inner_weights = _gl_nodes(
        np.broadcast_to(a[:, None], nodes.shape), nodes
    )  # (n_int, 8, 8)
    phi_nodes = phi_r[:-1, None] + (
        inner_weights * _phi_integrand(inner_nodes)
    ).sum(axis=2)

    coef = beta / TWO_PI
    ln_w_r = -r * r / 4.0 + coef * phi_r
    ln_w_nodes = -nodes * nodes / 4.0 + coef * phi_nodes

    # log-shifted normalization: mass = 2pi * integral w(s) s ds
    shift = max(float(ln_w_r.max()), float(ln_w_nodes.max()))
    panel_mass = (weights * np.exp(ln_w_nodes - shift) * nodes).sum(axis=1)
    total = float(panel_mass.sum()) * TWO_PI
    if not np.isfinite(total) or total <= 0.0:
        raise ValueError(
            f"profile mass not representable for beta={beta} at r_max={r_max}"
        )
    ln_c = -(shift + math.log(total))

    w = np.exp(ln_w_r + ln_c)
    if not np.all(np.isfinite(w)) or not np.all(w > 0.0):
        raise ValueError(
            f"normalized profile under/overflows for beta={beta} at r_max={r_max}"
        )
    if w[-1] > 1e-12 * w.max():
        raise ValueError(
            f"w(r_max)/max(w) = {w[-1] / w.max():.2e} > 1e-12: "
            f"r_max={r_max} too small for beta={beta}"
        )
    cum = np.concatenate([[0.0], np.cumsum(panel_mass)]) * (
        TWO_PI * math.exp(shift + ln_c)
    )
    return RadialProfile(beta=beta, r=r, w=w, cumulative_mass=cum)


def ws_max_location(profile: RadialProfile) -> float:
    """Radius of the profile maximum, refined by a local quadratic fit."""
    i = int(np.argmax(profile.w))
    if i == 0:
        return 0.0
    if i == len(profile.r) - 1:
        return profile.r_max
    h = profile.r[1] - profile.r[0]
    w0, w1, w2 = profile.w[i - 1], profile.w[i], profile.w[i + 1]
    denom = w0 - 2.0 * w1 + w2
    offset = 0.0 if denom == 0.0 else 0.5 * h * (w0 - w2) / denom
    return float(profile.r[i] + offset)


def ws_field(profile: RadialProfile, grid: GridSpec) -> ScalarField:
    """Sample the radial profile onto a 2D grid by cubic interpolation."""
    rr = grid.radius()
    if float(rr.max()) > profile.r_max:
        raise ValueError(
            f"grid radius {rr.max():.2f} exceeds profile r_max {profile.r_max}"
        )
    return ScalarField(grid, profile.spline(rr))


def tilde_pair(
    alpha: float, beta: float, t: float, grid: GridSpec
) -> tuple[ScalarField, ScalarField]:
    """Self-similar reference pair: scaled steady vorticity and Gaussian divergence.

    Returns (alpha*(1/t)*w(|x|/sqrt(t)), (beta/t)*G(x/sqrt(t))) whose integrals
    are alpha and beta.
    """
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    profile = solve_ws(beta)
    root = math.sqrt(t)
    rr = grid.radius() / root
    if float(rr.max()) > profile.r_max:
        raise ValueError(
            f"rescaled grid radius {rr.max():.2f} exceeds profile r_max "
            f"{profile.r_max}; increase t or shrink the box"
        )
    w_part = ScalarField(grid, (alpha / t) * profile.spline(rr))
    d_part = oseen_vortex(beta, t, grid)
    return w_part, d_part


_NORM_GRID: GridSpec = make_grid(256, 40.0)


def ws_minus_g_norm(beta: float) -> float:
    """Weighted norm of the solved profile minus the Gaussian, for small beta."""
    if abs(beta) > 4.0 * np.pi:
        raise ValueError(f"|beta| must be <= 4pi, got {beta}")
    if beta == 0.0:
        return 0.0
    diff = ws_field(solve_ws(beta), _NORM_GRID) - gaussian_G(_NORM_GRID)
    return weighted_w_norm(diff)
