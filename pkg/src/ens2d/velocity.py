"""Velocity reconstruction from vorticity and divergence.

On a periodic box the spectral inverses only exist for mean-zero sources: a
net mass would demand the non-periodic 1/r velocity tail.  The split here
carries all nonzero mass in analytic radial backgrounds, whose velocities are
closed-form (cumulative-mass swirl for vorticity, Gaussian efflux for
divergence), and routes only the mean-zero residuals through FFTs.

Sign convention: biot_savart returns the field with curl u = +omega, so a
positive point mass of vorticity swirls counterclockwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import MeanNotZeroError
from .fields import lp_norm, mean_integral
from .grid import GridSpec, ScalarField, derivative
from .profiles import RadialProfile, solve_ws

TWO_PI = 2.0 * np.pi

# relative mean tolerance for the spectral inverses
_MEAN_TOL = 1e-8


@dataclass(frozen=True)
class VelocityField:
    """Velocity component pair on a shared grid."""

    u1: ScalarField
    u2: ScalarField

    def __post_init__(self):
        if not self.u1.grid.compatible(self.u2.grid):
            raise ValueError("velocity components live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.u1.grid

    def __add__(self, other: "VelocityField") -> "VelocityField":
        return VelocityField(self.u1 + other.u1, self.u2 + other.u2)


def curl(v: VelocityField) -> ScalarField:
    return derivative(v.u2, 1) - derivative(v.u1, 2)


def div(v: VelocityField) -> ScalarField:
    return derivative(v.u1, 1) + derivative(v.u2, 2)


def _check_mean_zero(f: ScalarField, op: str) -> None:
    m = abs(mean_integral(f))
    if m > _MEAN_TOL * max(1.0, lp_norm(f, 1)):
        raise MeanNotZeroError(
            f"{op} needs a mean-zero source (got integral {m:.3e}); "
            "carry the net mass in a radial background and pass the residual"
        )


def biot_savart(omega: ScalarField) -> VelocityField:
    """Divergence-free velocity with curl u = omega (mean-zero omega)."""
    _check_mean_zero(omega, "biot_savart")
    g = omega.grid
    wh = np.fft.fft2(omega.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = wh / g.ksq
    inv[0, 0] = 0.0
    u1 = np.fft.ifft2(1j * g.k1_diff[None, :] * inv).real
    u2 = np.fft.ifft2(-1j * g.k1_diff[:, None] * inv).real
    return VelocityField(ScalarField(g, u1), ScalarField(g, u2))


def grad_inverse(d: ScalarField) -> VelocityField:
    """Curl-free velocity with div u = d (mean-zero d)."""
    _check_mean_zero(d, "grad_inverse")
    g = d.grid
    dh = np.fft.fft2(d.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = dh / g.ksq
    inv[0, 0] = 0.0
    u1 = np.fft.ifft2(-1j * g.k1_diff[:, None] * inv).real
    u2 = np.fft.ifft2(-1j * g.k1_diff[None, :] * inv).real
    return VelocityField(ScalarField(g, u1), ScalarField(g, u2))


def radial_velocity(mass: float, t: float, r):
    """Speed (mass/2 pi r)(1 - exp(-r^2/4t)) of a mass-`mass` Gaussian at scale t.

    Azimuthal for a vorticity source, radially outward for a divergence
    source.  Near the origin the regular limit mass*r/(8 pi t) is used.
    """
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any(r_arr < 0.0):
        raise ValueError("r must be >= 0")
    small = r_arr < 1e-6 * math.sqrt(t)
    safe = np.where(small, 1.0, r_arr)
    out = np.where(
        small,
        mass * r_arr / (8.0 * np.pi * t),
        mass * (-np.expm1(-safe * safe / (4.0 * t))) / (TWO_PI * safe),
    )
    return float(out) if np.isscalar(r) else out


def gaussian_swirl(rho: np.ndarray) -> np.ndarray:
    """S(rho) = (1 - exp(-rho^2/4)) / (2 pi rho^2), regular value 1/(8 pi) at 0."""
    rho = np.asarray(rho, dtype=np.float64)
    small = rho < 1e-6
    safe = np.where(small, 1.0, rho)
    return np.where(
        small, 1.0 / (8.0 * np.pi), -np.expm1(-safe * safe / 4.0) / (TWO_PI * safe**2)
    )


@dataclass(frozen=True)
class Background:
    """Radial carrier of the net masses: alpha rides the steady profile, beta
    a spreading Gaussian."""

    alpha: float
    beta: float
    profile: RadialProfile

    @cached_property
    def swirl(self) -> CubicSpline:
        """S(rho) = m(rho)/(2 pi rho^2) for the profile's cumulative mass m."""
        r = self.profile.r
        s = np.empty_like(r)
        s[0] = self.profile.w[0] / 2.0
        s[1:] = self.profile.cumulative_mass[1:] / (TWO_PI * r[1:] ** 2)
        r_ext = np.concatenate([-r[:0:-1], r])
        s_ext = np.concatenate([s[:0:-1], s])
        return CubicSpline(r_ext, s_ext)

    def swirl_at(self, rho: np.ndarray) -> np.ndarray:
        # beyond the profile the enclosed mass is 1 to ~1e-90; switch to the
        # closed 1/(2 pi rho^2) tail instead of extrapolating the spline
        rho = np.asarray(rho, dtype=np.float64)
        inside = rho <= self.profile.r_max
        safe = np.where(inside, 1.0, rho)
        end = float(self.profile.cumulative_mass[-1])
        return np.where(inside, self.swirl(np.where(inside, rho, 0.0)),
                        end / (TWO_PI * safe**2))

    def profile_at(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.float64)
        inside = rho <= self.profile.r_max
        return np.where(inside, self.profile.spline(np.where(inside, rho, 0.0)), 0.0)


def make_background(alpha: float, beta: float, r_max: float = 30.0,
                    n_points: int = 6001) -> Background:
    return Background(alpha=float(alpha), beta=float(beta),
                      profile=solve_ws(float(beta), r_max, n_points))


def background_fields(bg: Background, t: float, grid: GridSpec
                      ) -> tuple[ScalarField, ScalarField]:
    """Gridded background pair, renormalized to carry the masses exactly."""
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    n = grid.n
    if bg.alpha == 0.0:
        w_vals = np.zeros((n, n))
    else:
        raw = bg.profile_at(grid.radius() / math.sqrt(t)) / t
        w_vals = raw * (bg.alpha / (float(raw.sum()) * grid.dx**2))
    if bg.beta == 0.0:
        d_vals = np.zeros((n, n))
    else:
        raw = np.exp(-grid.radius_sq() / (4.0 * t)) / (4.0 * np.pi * t)
        d_vals = raw * (bg.beta / (float(raw.sum()) * grid.dx**2))
    return ScalarField(grid, w_vals), ScalarField(grid, d_vals)


def background_velocity(bg: Background, t: float, grid: GridSpec) -> VelocityField:
    """Closed-form velocity of the radial backgrounds (exact, no periodic images)."""
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    x, y = grid.coords()
    rho = grid.radius() / math.sqrt(t)
    u1 = np.zeros((grid.n, grid.n))
    u2 = np.zeros((grid.n, grid.n))
    if bg.alpha != 0.0:
        s = (bg.alpha / t) * bg.swirl_at(rho)
        u1 -= s * y
        u2 += s * x
    if bg.beta != 0.0:
        s = (bg.beta / t) * gaussian_swirl(rho)
        u1 += s * x
        u2 += s * y
    # The 1/r tails are not periodic, so the row x=-L/2 (one grid line for
    # both box faces) would otherwise pick one branch of the seam jump and
    # break the discrete point-reflection equivariance of the stepper.
    # Averaging with the point-reflected field replaces the seam values by
    # the jump midpoint and is bitwise neutral everywhere else.
    flip = (grid.n - np.arange(grid.n)) % grid.n
    u1 = 0.5 * (u1 - u1[np.ix_(flip, flip)])
    u2 = 0.5 * (u2 - u2[np.ix_(flip, flip)])
    return VelocityField(ScalarField(grid, u1), ScalarField(grid, u2))


def reconstruct_velocity(state, background: Background) -> VelocityField:
    """Full velocity of a state: closed-form background plus spectral residuals.

    The state's omega and d are split against the background's gridded pair;
    the residuals must be mean-zero to the spectral guard, which holds
    whenever the background masses match the state's alpha and beta.
    """
    g = state.grid
    w_ref, d_ref = background_fields(background, state.t, g)
    res_w = ScalarField(g, state.omega.values - w_ref.values)
    res_d = ScalarField(g, state.d.values - d_ref.values)
    u = background_velocity(background, state.t, g)
    u = u + biot_savart(res_w)
    u = u + grad_inverse(res_d)
    return u
