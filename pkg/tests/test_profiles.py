import math

import numpy as np
import pytest

from ens2d.fields import gaussian_G, mean_integral
from ens2d.grid import make_grid
from ens2d.profiles import (
    solve_ws,
    tilde_pair,
    ws_field,
    ws_max_location,
    ws_minus_g_norm,
)

PI = np.pi


def test_beta_zero_is_gaussian():
    p = solve_ws(0.0)
    exact = np.exp(-p.r**2 / 4.0) / (4.0 * PI)
    assert np.max(np.abs(p.w - exact)) < 1e-10


def test_profile_invariants():
    for beta in (-2 * PI, 0.0, 2 * PI, 8 * PI, 16 * PI):
        p = solve_ws(beta)
        assert np.all(p.w > 0.0)
        assert np.all(np.diff(p.cumulative_mass) >= 0.0)
        assert abs(p.cumulative_mass[-1] - 1.0) < 1e-8
        assert p.w[-1] <= 1e-12 * p.w.max()


def test_monotonicity_dichotomy():
    # decreasing from the origin iff beta <= 4pi, else a single interior ring
    for beta in (-2 * PI, 0.0, 2 * PI, 4 * PI):
        p = solve_ws(beta)
        body = p.w[p.r <= 20.0]
        assert np.all(np.diff(body) < 0.0)
        assert int(np.argmax(p.w)) == 0
    for beta in (8 * PI, 16 * PI):
        p = solve_ws(beta)
        body = p.w[p.r <= 20.0]
        d = np.diff(body)
        flips = np.sum((d[:-1] > 0) & (d[1:] <= 0))
        assert p.w[1] > p.w[0]  # slope sign at origin ~ (beta - 4pi)
        assert flips == 1
        assert ws_max_location(p) > 0.0
        assert p.w.max() > p.w[0]


def test_slope_sign_near_origin():
    assert solve_ws(2 * PI).w[1] < solve_ws(2 * PI).w[0]
    assert solve_ws(8 * PI).w[1] > solve_ws(8 * PI).w[0]


def test_max_location_values():
    assert ws_max_location(solve_ws(0.0)) == 0.0
    assert ws_max_location(solve_ws(2 * PI)) == 0.0
    # ring radii frozen from a 1e6-point scan of the closed-form log profile
    assert abs(ws_max_location(solve_ws(8 * PI)) - 2.5247785) < 1e-4
    assert abs(ws_max_location(solve_ws(16 * PI)) - 3.9601480) < 1e-4


def test_solver_validation():
    with pytest.raises(ValueError):
        solve_ws(0.0, 30.0, 500)
    with pytest.raises(ValueError):
        solve_ws(0.0, 10.0, 6001)
    with pytest.raises(ValueError):
        solve_ws(-4000.0)  # tail underflows double precision


def test_refinement_stability():
    pa = solve_ws(8 * PI, 30.0, 6001)
    pb = solve_ws(8 * PI, 30.0, 12001)
    assert np.max(np.abs(pb.w[::2] - pa.w)) < 1e-10


def test_ws_field_beta_zero_matches_gaussian():
    g = make_grid(256, 40.0)
    f = ws_field(solve_ws(0.0), g)
    assert np.max(np.abs(f.values - gaussian_G(g).values)) < 1e-12


def test_ws_field_rejects_oversized_grid():
    g = make_grid(64, 90.0)  # corner radius ~63 > r_max
    with pytest.raises(ValueError):
        ws_field(solve_ws(0.0), g)


def test_tilde_pair_examples():
    g = make_grid(256, 40.0)
    w, d = tilde_pair(1.0, 0.0, 1.0, g)
    assert np.max(np.abs(w.values - gaussian_G(g).values)) < 1e-12
    assert np.all(d.values == 0.0)

    w, d = tilde_pair(2.0, 2 * PI, 4.0, g)
    assert abs(mean_integral(w) - 2.0) < 1e-7
    assert abs(mean_integral(d) - 2 * PI) < 1e-7

    # t=4 halves radii and quarters amplitudes relative to t=1
    w1, _ = tilde_pair(2.0, 2 * PI, 1.0, g)
    i0 = g.n // 2
    for m in (0, 4, 10, 30):
        assert abs(w.values[i0 + 2 * m, i0] - 0.25 * w1.values[i0 + m, i0]) < 1e-12


def test_tilde_pair_validation():
    g = make_grid(256, 40.0)
    with pytest.raises(ValueError):
        tilde_pair(1.0, 0.0, 0.0, g)
    with pytest.raises(ValueError):
        tilde_pair(1.0, 0.0, 0.25, g)  # rescaled corner radius ~57 > r_max


def test_ws_minus_g_norm_scaling():
    assert ws_minus_g_norm(0.0) == 0.0
    ratios = [ws_minus_g_norm(b) / b for b in (0.05, 0.1, 0.2, 0.4)]
    spread = (max(ratios) - min(ratios)) / min(ratios)
    assert spread < 0.20
    # measured ratio is ~0.0412 with spread ~0.6%
    assert abs(ratios[0] - 0.0412) < 0.002

    neg = ws_minus_g_norm(-0.2)
    pos = ws_minus_g_norm(0.2)
    assert np.isfinite(neg)
    assert 0.5 < neg / pos < 2.0
    with pytest.raises(ValueError):
        ws_minus_g_norm(20.0 * PI)
