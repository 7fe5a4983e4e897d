"""Canonical fields, norms, and the self-similar change of variables.

The reference profile G(x) = (1/4pi) exp(-|x|^2/4) has unit mass and is the
t=1 slice of the spreading vortex alpha*(1/t)G(x/sqrt(t)).  Self-similar
variables relabel the same samples: W = t*omega lives on the box L/sqrt(t)
with tau = ln t, so no resampling ever happens and transforms invert exactly
(bit-for-bit when sqrt(t) is a power of two).

The w-norm integrates G^{-1} f^2, a weight that grows like exp(r^2/4).  It is
evaluated in log space and refuses fields whose weighted integrand has not
collapsed by the box edge, since a silent blow-up there would poison every
decay monitor built on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EdgeDecayError
from .grid import GridSpec, ScalarField, make_grid

FOUR_PI = 4.0 * np.pi


def gaussian_G(grid: GridSpec) -> ScalarField:
    """Unit-mass Gaussian (1/4pi) exp(-|x|^2/4) sampled on the grid."""
    return ScalarField(grid, np.exp(-grid.radius_sq() / 4.0) / FOUR_PI)


def oseen_vortex(alpha: float, t: float, grid: GridSpec) -> ScalarField:
    """Spreading vortex profile alpha*(1/t)G(x/sqrt(t))."""
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    return ScalarField(
        grid, (alpha / t) * np.exp(-grid.radius_sq() / (4.0 * t)) / FOUR_PI
    )


def mean_integral(f: ScalarField) -> float:
    """Rectangle-rule integral over the box (spectrally accurate)."""
    return float(f.values.sum()) * f.grid.dx**2


def lp_norm(f: ScalarField, p: float) -> float:
    """L^p norm; p = inf is the grid max of |f|."""
    if p == np.inf:
        return float(np.max(np.abs(f.values)))
    p = float(p)
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    return float((np.abs(f.values) ** p).sum() * f.grid.dx**2) ** (1.0 / p)


def lpm_norm(f: ScalarField, p: float, m: float) -> float:
    """Norm of (1+|x|^2)^{m/2} f in L^p."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if m == 0:
        return lp_norm(f, p)
    w = (1.0 + f.grid.radius_sq()) ** (0.5 * m)
    return lp_norm(ScalarField(f.grid, w * f.values), p)


def _edge_ring(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a[0, :], a[-1, :], a[:, 0], a[:, -1]])


def weighted_w_norm(f: ScalarField) -> float:
    """sqrt of integral G^{-1} f^2 dx.

    The weight grows like exp(r^2/4), so the weighted integrand must have
    collapsed below 1e-6 of its peak by the box edge; otherwise the value is
    dominated by truncation and an EdgeDecayError is raised.
    """
    vals = f.values
    if not vals.any():
        return 0.0
    # log integrand: ln(4pi) + r^2/4 + 2 ln|f|, -inf where f = 0
    with np.errstate(divide="ignore"):
        log_int = math.log(FOUR_PI) + f.grid.radius_sq() / 4.0 + 2.0 * np.log(
            np.abs(vals)
        )
    peak = float(np.max(log_int))
    edge = float(np.max(_edge_ring(log_int)))
    if edge - peak >= math.log(1e-6):
        raise EdgeDecayError(
            "weight blow-up: weighted integrand at the box edge is "
            f"{math.exp(edge - peak):.2e} of its peak (needs < 1e-6); "
            "the box is too small for this diagnostic"
        )
    total = float(np.exp(log_int - peak).sum()) * f.grid.dx**2
    return math.exp(0.5 * peak) * math.sqrt(total)


def first_moment(f: ScalarField) -> float:
    """Integral of |x| |f(x)| dx."""
    return float((f.grid.radius() * np.abs(f.values)).sum()) * f.grid.dx**2


@dataclass(frozen=True)
class SimState:
    """Vorticity/divergence pair at physical time t with cached masses."""

    omega: ScalarField
    d: ScalarField
    t: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.omega.grid.compatible(self.d.grid):
            raise ValueError("omega and d live on different grids")
        if not (self.t > 0.0):
            raise ValueError(f"t must be positive, got {self.t}")
        qa = mean_integral(self.omega)
        qb = mean_integral(self.d)
        if abs(qa - self.alpha) > 1e-10 * (1.0 + abs(self.alpha)):
            raise ValueError(
                f"cached alpha {self.alpha} disagrees with quadrature {qa}"
            )
        if abs(qb - self.beta) > 1e-10 * (1.0 + abs(self.beta)):
            raise ValueError(
                f"cached beta {self.beta} disagrees with quadrature {qb}"
            )

    @classmethod
    def from_fields(cls, omega: ScalarField, d: ScalarField, t: float) -> "SimState":
        return cls(omega=omega, d=d, t=float(t),
                   alpha=mean_integral(omega), beta=mean_integral(d))

    @property
    def grid(self) -> GridSpec:
        return self.omega.grid


@dataclass(frozen=True)
class SelfSimilarState:
    """Rescaled pair W = t*omega, D = t*d on the xi-grid, tau = ln t."""

    W: ScalarField
    D: ScalarField
    tau: float

    def __post_init__(self):
        if not self.W.grid.compatible(self.D.grid):
            raise ValueError("W and D live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.W.grid


def to_self_similar(s: SimState) -> SelfSimilarState:
    """Relabel a physical state into self-similar variables (no resampling)."""
    root = math.sqrt(s.t)
    xi_grid = make_grid(s.grid.n, s.grid.box_len / root)
    return SelfSimilarState(
        W=ScalarField(xi_grid, s.t * s.omega.values),
        D=ScalarField(xi_grid, s.t * s.d.values),
        tau=math.log(s.t),
    )


def from_self_similar(ss: SelfSimilarState, t: float) -> SimState:
    """Invert to_self_similar at physical time t."""
    t = float(t)
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    root = math.sqrt(t)
    x_grid = make_grid(ss.grid.n, ss.grid.box_len * root)
    omega = ScalarField(x_grid, ss.W.values / t)
    d = ScalarField(x_grid, ss.D.values / t)
    return SimState.from_fields(omega, d, t)
