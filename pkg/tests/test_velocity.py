import math

import numpy as np
import pytest

from ens2d.errors import MeanNotZeroError
from ens2d.fields import SimState, gaussian_G, lp_norm, mean_integral
from ens2d.grid import ScalarField, derivative, make_grid, zero_field
from ens2d.velocity import (
    background_fields,
    background_velocity,
    biot_savart,
    curl,
    div,
    gaussian_swirl,
    grad_inverse,
    make_background,
    radial_velocity,
    reconstruct_velocity,
)

GRID = make_grid(256, 40.0)


def test_biot_savart_zero():
    u = biot_savart(zero_field(GRID))
    assert np.all(u.u1.values == 0.0)
    assert np.all(u.u2.values == 0.0)


def test_biot_savart_defining_identities():
    w = derivative(gaussian_G(GRID), 1)
    u = biot_savart(w)
    assert np.max(np.abs(curl(u).values - w.values)) < 1e-11
    assert np.max(np.abs(div(u).values)) < 1e-11


def test_grad_inverse_defining_identities():
    d = derivative(gaussian_G(GRID), 1)
    u = grad_inverse(d)
    assert np.max(np.abs(div(u).values - d.values)) < 1e-11
    assert np.max(np.abs(curl(u).values)) < 1e-11


def test_mean_zero_guard():
    G = gaussian_G(GRID)
    with pytest.raises(MeanNotZeroError, match="background"):
        biot_savart(G)
    with pytest.raises(MeanNotZeroError):
        grad_inverse(G)


def _dipole_error(n, L):
    g = make_grid(n, L)
    x, y = g.coords()
    w = (np.exp(-((x - 5.0) ** 2 + y**2) / 4.0)
         - np.exp(-((x + 5.0) ** 2 + y**2) / 4.0)) / (4.0 * np.pi)
    u = biot_savart(ScalarField(g, w))
    i0 = n // 2
    # each unit vortex at (+-5, 0) advects the origin downward
    exact = -2.0 * radial_velocity(1.0, 1.0, 5.0)
    return max(abs(u.u1.values[i0, i0]), abs(u.u2.values[i0, i0] - exact))


def test_dipole_against_superposed_closed_form():
    # periodic-image error: measured 3.2e-3 on L=40, shrinking ~4x per
    # doubling of the box
    e40 = _dipole_error(256, 40.0)
    e80 = _dipole_error(512, 80.0)
    assert e40 < 5e-3
    assert e80 < e40 / 3.0


def test_grad_inverse_potential_route():
    x, y = GRID.coords()
    phi = np.exp(-(x * x + y * y) / 2.0)
    d = ScalarField(GRID, (x * x + y * y - 2.0) * phi)
    u = grad_inverse(d)
    assert np.max(np.abs(u.u1.values + x * phi)) < 1e-10
    assert np.max(np.abs(u.u2.values + y * phi)) < 1e-10


def test_radial_velocity_values():
    assert abs(radial_velocity(1.0, 1.0, 2.0) - 0.05030255578378809) < 1e-16
    # formula check at several radii
    for r in (0.5, 1.0, 3.0):
        want = -np.expm1(-r * r / 4.0) / (2.0 * np.pi * r)
        assert abs(radial_velocity(1.0, 1.0, r) - want) < 1e-16
    # regular limit near the origin
    assert radial_velocity(1.0, 1.0, 0.0) == 0.0
    r = 1e-9
    assert abs(radial_velocity(1.0, 1.0, r) - r / (8.0 * np.pi)) < 1e-25
    # array input
    rr = np.array([0.0, 1e-9, 1.0, 5.0])
    out = radial_velocity(2.0, 4.0, rr)
    assert out.shape == rr.shape
    assert out[0] == 0.0
    with pytest.raises(ValueError):
        radial_velocity(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        radial_velocity(1.0, 1.0, -1.0)


def test_radial_velocity_mass_scaling():
    # speed scales linearly in the carried mass
    beta = 2.0 * np.pi
    for r in (0.7, 2.0, 6.0):
        assert abs(radial_velocity(beta, 1.0, r)
                   - beta * radial_velocity(1.0, 1.0, r)) < 1e-15


def test_reconstruct_pure_vortex_background():
    t = 2.0
    bg = make_background(1.0, 0.0)
    w_ref, _ = background_fields(bg, t, GRID)
    st = SimState.from_fields(w_ref, zero_field(GRID), t)
    u = reconstruct_velocity(st, bg)
    i0 = GRID.n // 2
    for m in (4, 16, 40, 80):
        r = GRID.x1[i0 + m]
        # azimuthal velocity at (r, 0) points along +x2
        assert abs(u.u2.values[i0 + m, i0] - radial_velocity(1.0, t, r)) < 1e-8
        assert abs(u.u1.values[i0 + m, i0]) < 1e-8


def test_reconstruct_pure_divergence_background():
    t = 2.0
    beta = 2.0 * np.pi
    bg = make_background(0.0, beta)
    _, d_ref = background_fields(bg, t, GRID)
    st = SimState.from_fields(zero_field(GRID), d_ref, t)
    u = reconstruct_velocity(st, bg)
    i0 = GRID.n // 2
    for m in (4, 40):
        r = GRID.x1[i0 + m]
        assert abs(u.u1.values[i0 + m, i0] - radial_velocity(beta, t, r)) < 1e-8
        assert abs(u.u2.values[i0 + m, i0]) < 1e-12
    # divergence consistency through the split: div of the spectral part
    # plus the closed-form background divergence recovers d
    res_d = ScalarField(GRID, st.d.values - d_ref.values)
    ud = grad_inverse(res_d)
    assert np.max(np.abs(div(ud).values + d_ref.values - st.d.values)) < 1e-8


def test_reconstruct_zero_state():
    st = SimState.from_fields(zero_field(GRID), zero_field(GRID), 1.0)
    u = reconstruct_velocity(st, make_background(0.0, 0.0))
    assert np.all(u.u1.values == 0.0)
    assert np.all(u.u2.values == 0.0)


def test_reconstruct_split_consistency():
    # localized state with net masses: the background carries the 1/r tails,
    # so curl/div of the spectral residual close the loop
    x, y = GRID.coords()
    w = np.exp(-((x - 1.5) ** 2 + (y + 0.8) ** 2) / 4.0) / (4.0 * np.pi)
    d = 0.5 * np.exp(-((x + 0.4) ** 2 + y**2) / 3.0)
    st = SimState.from_fields(ScalarField(GRID, w), ScalarField(GRID, d), 1.0)
    bg = make_background(st.alpha, st.beta)
    w_ref, d_ref = background_fields(bg, st.t, GRID)
    us = biot_savart(ScalarField(GRID, w - w_ref.values))
    ud = grad_inverse(ScalarField(GRID, d - d_ref.values))
    u_spec = us + ud
    assert np.max(np.abs(curl(u_spec).values + w_ref.values - w)) < 1e-7
    assert np.max(np.abs(div(u_spec).values + d_ref.values - d)) < 1e-7


def test_background_velocity_far_tail():
    # beyond the profile's radial table the swirl switches to the exact
    # enclosed-mass tail; compare against the closed-form speed
    bg = make_background(1.0, 0.0)
    g = make_grid(64, 36.0)
    t = 0.25  # rescaled corner radius ~102 >> r_max
    u = background_velocity(bg, t, g)
    i0 = g.n // 2
    for m in (8, 24, 31):
        r = g.x1[i0 + m]
        assert abs(u.u2.values[i0 + m, i0] - radial_velocity(1.0, t, r)) < 1e-10


def test_gaussian_swirl_limit():
    assert abs(gaussian_swirl(np.array([0.0]))[0] - 1.0 / (8.0 * np.pi)) < 1e-16
    rho = np.array([2.0])
    want = -np.expm1(-1.0) / (2.0 * np.pi * 4.0)
    assert abs(gaussian_swirl(rho)[0] - want) < 1e-16


def test_interpolation_ratio_homogeneous():
    f = derivative(gaussian_G(GRID), 1)

    def ratio(field):
        u = grad_inverse(field)
        sup = max(lp_norm(u.u1, np.inf), lp_norm(u.u2, np.inf))
        return sup / math.sqrt(lp_norm(field, 1) * lp_norm(field, np.inf))

    base = ratio(f)
    # powers of two scale every float exactly
    assert ratio(4.0 * f) == base
    assert ratio(16.0 * f) == base
    assert abs(ratio(3.0 * f) - base) < 1e-12 * base
