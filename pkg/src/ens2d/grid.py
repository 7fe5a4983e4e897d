"""Periodic square grid and Fourier-space operators.

Everything downstream (velocity reconstruction, time stepping, diagnostics)
works on an n-by-n periodic box of side L that stands in for the plane, so the
box has to dominate the support of every field it carries.  Fields are sampled
at x_i = (i - n/2)*dx, which places the origin exactly on a grid point: radial
profiles and the linear-drift weight never need off-grid interpolation at r=0.

Wavenumber bookkeeping: mode index m carries k = (2*pi/L)*m with m mapped to
the symmetric range (-n/2, n/2].  First derivatives zero the Nyquist mode
(its sign is not representable for a real field), which only affects content
the 2/3-rule mask discards anyway.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeanNotZeroError


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Uniform periodic n x n grid on [-L/2, L/2)^2 with spectral tables."""

    n: int
    box_len: float
    dx: float
    x1: np.ndarray
    modes: np.ndarray
    k1: np.ndarray
    k1_diff: np.ndarray
    ksq: np.ndarray
    dealias_mask: np.ndarray

    def compatible(self, other: "GridSpec") -> bool:
        return self.n == other.n and self.box_len == other.box_len

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Broadcastable coordinate arrays (x1 down rows, x2 across columns)."""
        return self.x1[:, None], self.x1[None, :]

    def radius(self) -> np.ndarray:
        x, y = self.coords()
        return np.hypot(x, y)

    def radius_sq(self) -> np.ndarray:
        x, y = self.coords()
        return x * x + y * y


def make_grid(n: int, box_len: float) -> GridSpec:
    """Build a GridSpec.

    Args:
        n: points per axis; even and at least 16.
        box_len: side length L of the periodic box.

    Returns:
        GridSpec with coordinates, wavenumbers and the 2/3-rule mask.
    """
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 16 or n % 2 != 0:
        raise ValueError(f"n must be even and >= 16, got {n}")
    box_len = float(box_len)
    if not np.isfinite(box_len) or box_len <= 0.0:
        raise ValueError(f"box_len must be positive and finite, got {box_len}")

    dx = box_len / n
    x1 = dx * (np.arange(n) - n // 2)
    modes = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    modes[n // 2] = n // 2  # map Nyquist into (-n/2, n/2]
    k1 = (2.0 * np.pi / box_len) * modes
    k1_diff = k1.copy()
    k1_diff[n // 2] = 0.0
    ksq = k1[:, None] ** 2 + k1[None, :] ** 2
    keep = np.abs(modes) < n / 3.0
    dealias_mask = keep[:, None] & keep[None, :]

    for arr in (x1, modes, k1, k1_diff, ksq, dealias_mask):
        arr.setflags(write=False)
    return GridSpec(n=n, box_len=box_len, dx=dx, x1=x1, modes=modes, k1=k1,
                    k1_diff=k1_diff, ksq=ksq, dealias_mask=dealias_mask)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real scalar samples bound to a grid."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"values shape {vals.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)

    def _check_grid(self, other: "ScalarField") -> None:
        if not self.grid.compatible(other.grid):
            raise ValueError("fields live on different grids")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self._check_grid(other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        self._check_grid(other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, ScalarField):
            self._check_grid(c)
            return ScalarField(self.grid, self.values * c.values)
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


def zero_field(grid: GridSpec) -> ScalarField:
    return ScalarField(grid, np.zeros((grid.n, grid.n)))


def derivative(f: ScalarField, axis: int) -> ScalarField:
    """Spectral partial derivative along axis 1 (rows) or 2 (columns)."""
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    g = f.grid
    fh = np.fft.fft2(f.values)
    mult = 1j * (g.k1_diff[:, None] if axis == 1 else g.k1_diff[None, :])
    return ScalarField(g, np.fft.ifft2(mult * fh).real)


def laplacian(f: ScalarField) -> ScalarField:
    g = f.grid
    fh = np.fft.fft2(f.values)
    return ScalarField(g, np.fft.ifft2(-g.ksq * fh).real)


def dealias(f: ScalarField) -> ScalarField:
    """Zero all modes outside the 2/3-rule band."""
    g = f.grid
    fh = np.fft.fft2(f.values)
    return ScalarField(g, np.fft.ifft2(g.dealias_mask * fh).real)


def poisson_inverse(f: ScalarField) -> ScalarField:
    """Mean-zero phi with laplacian(phi) = f.

    The k=0 mode of a periodic Poisson problem is ill-posed, so the input mean
    must vanish: |mean(f)| <= 1e-12 * ||f||_L1 / L^2.
    """
    g = f.grid
    mean_density = abs(float(f.values.mean()))
    l1_density = float(np.abs(f.values).mean())
    if mean_density > 1e-12 * l1_density:
        raise MeanNotZeroError(
            "poisson_inverse needs a mean-zero field; "
            f"|mean| = {mean_density * g.box_len**2:.3e}"
        )
    fh = np.fft.fft2(f.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        ph = -fh / g.ksq
    ph[0, 0] = 0.0
    return ScalarField(g, np.fft.ifft2(ph).real)
