"""Time integration of the coupled vorticity/divergence system.

The divergence obeys a pure heat equation and is advanced exactly by the
Fourier multiplier exp(-|k|^2 dt).  The vorticity uses the same multiplier as
an integrating factor with classical RK4 on the advection term (Lawson
scheme), so diffusion contributes no stiffness and the k=0 mode of both
fields is carried through bitwise: the masses alpha and beta are conserved to
round-off by construction, not by monitoring.

Everything dynamic runs in physical x-t variables.  Self-similar quantities
come from exact relabeling, so the linear drift of the rescaled equations is
never discretized inside the time loop; it appears only in the diagnostic
operator apply_L, where a smooth radial mask keeps the drift from touching
the box edge.  Long rescaled horizons use restart rescaling: at four times
the segment's start time the state maps back to unit scale by pure index
arithmetic (no interpolation), which is exact once diffusion has emptied the
upper half of the spectrum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError, ConservationBreachError, EdgeDecayError
from .fields import SimState, lp_norm, mean_integral
from .grid import GridSpec, ScalarField, make_grid
from .velocity import (
    Background,
    background_fields,
    background_velocity,
    make_background,
    reconstruct_velocity,
)


@dataclass(frozen=True)
class StepControls:
    """Step-size and output cadence knobs."""

    cfl_number: float = 0.4
    dt_max: float = 0.05
    dealias: bool = True
    snapshot_every: int = 0
    monitor_every: int = 10

    def __post_init__(self):
        if not (0.0 < self.cfl_number <= 1.0):
            raise ValueError(f"cfl_number must be in (0, 1], got {self.cfl_number}")
        if not (self.dt_max > 0.0):
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")


@dataclass
class Trajectory:
    """Result of evolve: monitor rows, optional snapshots, and the final state.

    times holds the effective time of every completed step (strictly
    increasing across restarts).  scale_power counts restart rescalings; the
    effective time is local t times 4**scale_power.
    """

    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    times: list = field(default_factory=list)
    final_state: SimState | None = None
    scale_power: int = 0
    completed: bool = False
    error: str | None = None


def heat_evolve_exact(d: ScalarField, dt: float) -> ScalarField:
    """Exact periodic heat flow over duration dt."""
    dt = float(dt)
    if dt < 0.0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0.0:
        return d
    g = d.grid
    dh = np.fft.fft2(d.values)
    return ScalarField(g, np.fft.ifft2(np.exp(-g.ksq * dt) * dh).real)


class _Engine:
    """Per-run spectral workspace: cached multipliers and background pack."""

    def __init__(self, grid: GridSpec, bg: Background, dealias_on: bool):
        self.grid = grid
        self.bg = bg
        self.dealias_on = dealias_on
        self.mask = grid.dealias_mask
        self.ik1 = 1j * grid.k1_diff[:, None]
        self.ik2 = 1j * grid.k1_diff[None, :]
        self._exp_dt = None
        self._exp_pair = None
        self._pack_t = None
        self._pack = None
        self.last_u_sup: float | None = None

    def exps(self, dt: float):
        if dt != self._exp_dt:
            self._exp_dt = dt
            self._exp_pair = (
                np.exp(-self.grid.ksq * dt),
                np.exp(-self.grid.ksq * (dt / 2.0)),
            )
        return self._exp_pair

    def bg_pack(self, t: float):
        if t != self._pack_t:
            w_ref, d_ref = background_fields(self.bg, t, self.grid)
            u = background_velocity(self.bg, t, self.grid)
            self._pack_t = t
            self._pack = (
                np.fft.fft2(w_ref.values),
                np.fft.fft2(d_ref.values),
                u.u1.values,
                u.u2.values,
            )
        return self._pack

    def nonlinear_hat(self, wh: np.ndarray, dh: np.ndarray, pack) -> np.ndarray:
        """Spectral -div(u w) with the background split applied."""
        wrh, drh, ub1, ub2 = pack
        res_w = wh - wrh
        res_d = dh - drh
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_w = res_w / self.grid.ksq
            inv_d = res_d / self.grid.ksq
        inv_w[0, 0] = 0.0
        inv_d[0, 0] = 0.0
        u1h = self.ik2 * inv_w - self.ik1 * inv_d
        u2h = -self.ik1 * inv_w - self.ik2 * inv_d
        if self.dealias_on:
            u1h *= self.mask
            u2h *= self.mask
            w_real = np.fft.ifft2(wh * self.mask).real
        else:
            w_real = np.fft.ifft2(wh).real
        u1 = np.fft.ifft2(u1h).real + ub1
        u2 = np.fft.ifft2(u2h).real + ub2
        self.last_u_sup = max(float(np.max(np.abs(u1))), float(np.max(np.abs(u2))))
        out = -(
            self.ik1 * np.fft.fft2(u1 * w_real) + self.ik2 * np.fft.fft2(u2 * w_real)
        )
        if self.dealias_on:
            out *= self.mask
        return out

    def advance(self, w_vals, d_vals, t: float, dt: float):
        wh = np.fft.fft2(w_vals)
        dh = np.fft.fft2(d_vals)
        E, Eh = self.exps(dt)
        pack = self.bg_pack(t)
        dh_half = dh * Eh
        dh_full = dh * E
        k1 = self.nonlinear_hat(wh, dh, pack)
        k2 = self.nonlinear_hat(Eh * (wh + (dt / 2.0) * k1), dh_half, pack)
        k3 = self.nonlinear_hat(Eh * wh + (dt / 2.0) * k2, dh_half, pack)
        k4 = self.nonlinear_hat(E * wh + dt * (Eh * k3), dh_full, pack)
        wh_new = E * wh + (dt / 6.0) * (E * k1 + 2.0 * (Eh * (k2 + k3)) + k4)
        return np.fft.ifft2(wh_new).real, np.fft.ifft2(dh_full).real


def rhs_vorticity(omega: ScalarField, d: ScalarField, t: float,
                  background: Background, dealias: bool = True) -> ScalarField:
    """Conservative advection term -div(u w) at time t."""
    if not omega.grid.compatible(d.grid):
        raise ValueError("omega and d live on different grids")
    eng = _Engine(omega.grid, background, dealias)
    out = eng.nonlinear_hat(
        np.fft.fft2(omega.values), np.fft.fft2(d.values), eng.bg_pack(float(t))
    )
    return ScalarField(omega.grid, np.fft.ifft2(out).real)


def cfl_dt(state: SimState, controls: StepControls,
           background: Background | None = None) -> float:
    """Advective step bound min(dt_max, cfl*dx/sup|u|)."""
    bg = background if background is not None else make_background(state.alpha, state.beta)
    u = reconstruct_velocity(state, bg)
    sup = max(lp_norm(u.u1, np.inf), lp_norm(u.u2, np.inf))
    if sup == 0.0:
        return controls.dt_max
    return min(controls.dt_max, controls.cfl_number * state.grid.dx / sup)


def step(state: SimState, controls: StepControls | None = None,
         background: Background | None = None, dt: float | None = None,
         _engine: _Engine | None = None) -> SimState:
    """Advance one step; raises on blow-up or conservation breach."""
    controls = controls if controls is not None else StepControls()
    bg = background if background is not None else make_background(state.alpha, state.beta)
    if dt is None:
        dt = cfl_dt(state, controls, bg)
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    eng = _engine if _engine is not None else _Engine(state.grid, bg, controls.dealias)

    sup0 = float(np.max(np.abs(state.omega.values)))
    w_new, d_new = eng.advance(state.omega.values, state.d.values, state.t, dt)

    if not (np.all(np.isfinite(w_new)) and np.all(np.isfinite(d_new))):
        raise BlowupError(f"blow-up: non-finite field values at t={state.t + dt}")
    sup1 = float(np.max(np.abs(w_new)))
    if sup1 > 10.0 * sup0:
        raise BlowupError(
            f"blow-up: sup|omega| grew {sup1 / max(sup0, 1e-300):.1f}x in one step"
        )
    new = SimState(
        omega=ScalarField(state.grid, w_new),
        d=ScalarField(state.grid, d_new),
        t=state.t + dt,
        alpha=state.alpha,
        beta=state.beta,
    )
    tol = 1e-9 * (1.0 + abs(state.alpha) + abs(state.beta))
    da = abs(mean_integral(new.omega) - state.alpha)
    db = abs(mean_integral(new.d) - state.beta)
    if da > tol or db > tol:
        raise ConservationBreachError(
            f"conservation breach: |d alpha|={da:.3e}, |d beta|={db:.3e} > {tol:.3e}"
        )
    return new


def restart_rescale(state: SimState) -> SimState:
    """Map a state to a quarter of its time by exact index arithmetic.

    The zoomed field 4*omega(2x) continues the same solution at t/4 on the
    same grid; even-index subsampling is spectrally exact once diffusion has
    emptied the upper half of the spectrum.  The outer quarter-band, which
    samples beyond the old box, is zero-filled.
    """
    n = state.grid.n
    q = n // 4

    def remap(vals):
        out = np.zeros_like(vals)
        out[q:3 * q, q:3 * q] = 4.0 * vals[::2, ::2]
        return out

    return SimState(
        omega=ScalarField(state.grid, remap(state.omega.values)),
        d=ScalarField(state.grid, remap(state.d.values)),
        t=state.t / 4.0,
        alpha=state.alpha,
        beta=state.beta,
    )


def evolve(state: SimState, t_end: float, controls: StepControls | None = None,
           background: Background | None = None, monitor=None,
           restart_rescaling: bool = False) -> Trajectory:
    """Advance to effective time t_end, collecting monitor rows.

    monitor, if given, is called as monitor(state, t_eff) and its return value
    is stored in the trajectory rows at the monitor cadence.  With
    restart_rescaling, t_end is interpreted as effective time
    t_local * 4**scale_power.  Step failures abort with a flagged partial
    trajectory instead of raising.
    """
    controls = controls if controls is not None else StepControls()
    if not (t_end > state.t):
        raise ValueError(f"t_end={t_end} must exceed state.t={state.t}")
    bg = background if background is not None else make_background(state.alpha, state.beta)
    eng = _Engine(state.grid, bg, controls.dealias)

    traj = Trajectory()
    k = 0
    t_seg_start = state.t
    restart_at = 4.0 * t_seg_start
    t_eff = state.t
    eps = 1e-12 * max(1.0, abs(t_end))

    def emit(st, te):
        if monitor is not None:
            traj.rows.append((te, monitor(st, te)))

    emit(state, t_eff)
    steps_done = 0
    last_emit = 0
    last_snap = 0
    while t_eff < t_end - eps:
        local_target = t_end / 4.0**k
        if eng.last_u_sup is None:
            dt = cfl_dt(state, controls, bg)
        elif eng.last_u_sup == 0.0:
            dt = controls.dt_max
        else:
            # velocity recorded during the previous step's stages; one step
            # stale, which the 0.4 default absorbs
            dt = min(controls.dt_max,
                     controls.cfl_number * state.grid.dx / eng.last_u_sup)
        dt = min(dt, local_target - state.t)
        if restart_rescaling:
            dt = min(dt, restart_at - state.t)
        try:
            state = step(state, controls, bg, dt=dt, _engine=eng)
        except (BlowupError, ConservationBreachError) as exc:
            traj.final_state = state
            traj.scale_power = k
            traj.completed = False
            traj.error = str(exc)
            return traj
        steps_done += 1
        t_eff = state.t * 4.0**k
        traj.times.append(t_eff)
        if controls.monitor_every > 0 and steps_done - last_emit >= controls.monitor_every:
            emit(state, t_eff)
            last_emit = steps_done
        if controls.snapshot_every > 0 and steps_done - last_snap >= controls.snapshot_every:
            traj.snapshots.append((t_eff, state))
            last_snap = steps_done
        if (restart_rescaling and t_eff < t_end - eps
                and state.t >= restart_at * (1.0 - 1e-12)):
            state = restart_rescale(state)
            k += 1
            eng.last_u_sup = None  # velocity scale jumps at a restart
    if last_emit != steps_done:
        emit(state, t_eff)
    traj.final_state = state
    traj.scale_power = k
    traj.completed = True
    return traj


_DRIFT_MASKS: dict = {}


def _drift_mask(grid: GridSpec) -> np.ndarray:
    key = (grid.n, grid.box_len)
    if key not in _DRIFT_MASKS:
        r = grid.radius()
        r0 = 0.45 * grid.box_len
        r1 = 0.5 * grid.box_len
        chi = np.where(
            r <= r0, 1.0,
            np.where(r >= r1, 0.0, 0.5 * (1.0 + np.cos(np.pi * (r - r0) / (r1 - r0)))),
        )
        chi.setflags(write=False)
        _DRIFT_MASKS[key] = chi
    return _DRIFT_MASKS[key]


def apply_L(f: ScalarField) -> ScalarField:
    """Self-similar generator: laplacian + half the radial drift + identity.

    The drift xi . grad grows linearly, so the field must have decayed at the
    box edge; a smooth radial mask on the outer 10% of the box keeps the
    drift term from amplifying wrap-around noise.
    """
    g = f.grid
    vals = f.values
    vmax = float(np.max(np.abs(vals)))
    if vmax > 0.0:
        edge = max(
            float(np.max(np.abs(vals[0, :]))), float(np.max(np.abs(vals[-1, :]))),
            float(np.max(np.abs(vals[:, 0]))), float(np.max(np.abs(vals[:, -1]))),
        )
        if edge >= 1e-6 * vmax:
            raise EdgeDecayError(
                f"edge value {edge:.2e} vs peak {vmax:.2e}: field must decay "
                "at the box edge for the linear drift term"
            )
    fh = np.fft.fft2(vals)
    lap = np.fft.ifft2(-g.ksq * fh).real
    d1 = np.fft.ifft2(1j * g.k1_diff[:, None] * fh).real
    d2 = np.fft.ifft2(1j * g.k1_diff[None, :] * fh).real
    x, y = g.coords()
    drift = 0.5 * (x * d1 + y * d2) * _drift_mask(g)
    return ScalarField(g, lap + drift + vals)


def semigroup_apply(f: ScalarField, tau: float) -> ScalarField:
    """Exact semigroup of apply_L via conjugation with heat flow.

    Treats f as unit-time data, heat-evolves it for exp(tau)-1, and relabels
    at t = exp(tau).  The result lives on the relabeled (shrunken) box
    L*exp(-tau/2); compare references sampled on that grid.
    """
    tau = float(tau)
    if tau < 0.0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    if tau == 0.0:
        return f
    g = f.grid
    new_len = g.box_len * math.exp(-tau / 2.0)
    if new_len < 16.0:
        raise ValueError(
            f"relabeled box {new_len:.2f} < 16 (8 Gaussian widths): "
            f"tau={tau} too large for box {g.box_len}"
        )
    scale = math.exp(tau)
    evolved = heat_evolve_exact(f, scale - 1.0)
    return ScalarField(make_grid(g.n, new_len), scale * evolved.values)
