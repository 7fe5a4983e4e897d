"""Named experiment runners behind the command line.

A scenario is a fixed recipe (initial data, horizon, tracked quantities,
pass bands) driven by a flat key = value config.  Every run emits the same
versioned diagnostics CSV, a structured summary, and optional field
snapshots, so downstream tooling never recomputes physics.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import (
    COLUMNS,
    DiagnosticsRow,
    beta_cross_term,
    coercivity_check,
    decay_fit,
    entropy_production_check,
    envelope_fit,
    envelope_ratio,
    fisher_information,
    relative_entropy,
    theorem_monitors,
)
from .errors import NegativeVorticityError
from .evolution import StepControls, apply_L, evolve, rhs_vorticity, semigroup_apply
from .fields import (
    SimState,
    gaussian_G,
    lp_norm,
    lpm_norm,
    mean_integral,
    oseen_vortex,
    weighted_w_norm,
)
from .grid import GridSpec, ScalarField, derivative, make_grid
from .profiles import solve_ws, tilde_pair
from .velocity import biot_savart, grad_inverse, make_background

SCENARIOS = (
    "ws-profile",
    "oseen-fixed-point",
    "theorem1-relaxation",
    "theorem2-perturbation",
    "entropy-monitor",
    "operator-suite",
)
GENERATORS = ("gaussian-patches", "dipole-divergence", "tilde-plus-noise")

CSV_VERSION = "ens-diagnostics-v1"
PROFILE_VERSION = "ens-profile-v1"
SUMMARY_VERSION = "ens-summary-v1"


# ---------------------------------------------------------------- config

def parse_number(token: str) -> float:
    """Float literal, optionally in units of pi: '2pi', '-pi', '0.5pi'."""
    s = token.strip().lower()
    if any(c.isspace() for c in s):
        # float() tolerates stray whitespace; config values must not
        raise ValueError(f"malformed number {token!r}")
    if s.endswith("pi"):
        head = s[:-2]
        if head in ("", "+"):
            return math.pi
        if head == "-":
            return -math.pi
        return float(head) * math.pi
    return float(s)


def parse_flag(token: str) -> bool:
    s = token.strip().lower()
    if s in ("on", "true", "1", "yes"):
        return True
    if s in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"expected on/off, got {token!r}")


def parse_config_text(text: str) -> dict[str, str]:
    """Flat 'key = value' lines; '#' starts a comment; later keys win."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ValueError(f"config line {lineno}: empty key or value in {raw!r}")
        pairs[key] = val
    return pairs


_COMMON_DEFAULTS = {
    "grid.n": "256",
    "grid.box_len": "40",
    "time.t0": "1",
    "time.t1": "10",
    "time.cfl": "0.4",
    "time.dt_max": "0.05",
    "time.restart_rescale": "off",
    "physics.alpha": "1",
    "physics.beta": "0",
    "ic.generator": "gaussian-patches",
    "ic.seed": "0",
    "ic.patches": "0,0,1",
    "ic.size": "0.01",
    "ic.dipole_amplitude": "0.05",
    "output.directory": "",
    "output.snapshot_every": "0",
    "output.monitor_every": "10",
}

_SCENARIO_DEFAULTS = {
    "ws-profile": {},
    "oseen-fixed-point": {"time.t1": "10"},
    "theorem1-relaxation": {
        "time.t1": "100",
        "time.restart_rescale": "on",
        "ic.generator": "dipole-divergence",
        "ic.patches": "2,0,2;-2,0,1",
        "output.monitor_every": "5",
    },
    "theorem2-perturbation": {
        "time.t1": "54.598150033144236",  # e^4, tau window [0, 4]
        "time.restart_rescale": "on",
        "physics.beta": "0.1",
        "ic.generator": "tilde-plus-noise",
        "output.monitor_every": "5",
    },
    "entropy-monitor": {
        "time.t1": "20",
        "time.restart_rescale": "on",
        "ic.patches": "2,0,2;-2,0,1",
        "output.monitor_every": "5",
    },
    "operator-suite": {},
}


@dataclass
class ScenarioConfig:
    scenario: str
    n: int
    box_len: float
    t0: float
    t1: float
    cfl: float
    dt_max: float
    restart_rescale: bool
    alpha: float
    beta: float
    generator: str
    seed: int
    patches: str
    size: float
    dipole_amplitude: float
    directory: str
    snapshot_every: int
    monitor_every: int

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(
                f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}"
            )
        if self.generator not in GENERATORS:
            raise ValueError(
                f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}"
            )
        if not (self.t1 > self.t0 > 0.0):
            raise ValueError(f"need t1 > t0 > 0, got t0={self.t0}, t1={self.t1}")
        if self.n < 16 or self.n % 2:
            raise ValueError(f"grid.n must be even and >= 16, got {self.n}")
        if not (self.box_len > 0.0):
            raise ValueError(f"grid.box_len must be positive, got {self.box_len}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"time.cfl must be in (0, 1], got {self.cfl}")
        if not (self.dt_max > 0.0):
            raise ValueError(f"time.dt_max must be positive, got {self.dt_max}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if not (self.size > 0.0):
            raise ValueError(f"ic.size must be positive, got {self.size}")
        if self.snapshot_every < 0 or self.monitor_every < 1:
            raise ValueError("output cadences must be >= 0 (snapshots) and >= 1 (monitor)")


def build_config(pairs: dict[str, str]) -> ScenarioConfig:
    """Merge user pairs over the scenario defaults and validate."""
    if "scenario" not in pairs:
        raise ValueError("config must set 'scenario'")
    name = pairs["scenario"]
    if name not in _SCENARIO_DEFAULTS:
        raise ValueError(
            f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}"
        )
    merged = dict(_COMMON_DEFAULTS)
    merged.update(_SCENARIO_DEFAULTS[name])
    for key, val in pairs.items():
        if key == "scenario":
            continue
        if key not in _COMMON_DEFAULTS:
            raise ValueError(f"unknown config key {key!r}")
        merged[key] = val
    return ScenarioConfig(
        scenario=name,
        n=int(merged["grid.n"]),
        box_len=parse_number(merged["grid.box_len"]),
        t0=parse_number(merged["time.t0"]),
        t1=parse_number(merged["time.t1"]),
        cfl=parse_number(merged["time.cfl"]),
        dt_max=parse_number(merged["time.dt_max"]),
        restart_rescale=parse_flag(merged["time.restart_rescale"]),
        alpha=parse_number(merged["physics.alpha"]),
        beta=parse_number(merged["physics.beta"]),
        generator=merged["ic.generator"],
        seed=int(merged["ic.seed"]),
        patches=merged["ic.patches"],
        size=parse_number(merged["ic.size"]),
        dipole_amplitude=parse_number(merged["ic.dipole_amplitude"]),
        directory=merged["output.directory"],
        snapshot_every=int(merged["output.snapshot_every"]),
        monitor_every=int(merged["output.monitor_every"]),
    )


# ---------------------------------------------------------------- generators

def _parse_patches(spec: str):
    patches = []
    for part in spec.split(";"):
        bits = part.split(",")
        if len(bits) != 3:
            raise ValueError(f"patch {part!r} is not 'x,y,weight'")
        patches.append(tuple(float(b) for b in bits))
    total = sum(w for _, _, w in patches)
    if total <= 0.0:
        raise ValueError("patch weights must sum to a positive value")
    return [(cx, cy, w / total) for cx, cy, w in patches]


def _patch_field(grid: GridSpec, patches, alpha: float) -> ScalarField:
    x, y = grid.coords()
    vals = np.zeros((grid.n, grid.n))
    for cx, cy, w in patches:
        vals += w * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / 4.0) / (4.0 * math.pi)
    return ScalarField(grid, alpha * vals)


def _seeded_noise(grid: GridSpec, rng, kmax: int = 10,
                  envelope: float | None = 3.0) -> ScalarField:
    """Seeded band-limited real field, exactly mean-zero.

    With an envelope the modes are damped by exp(-r^2/envelope) and the mean
    is removed with a Gaussian multiple, not a constant, so the field keeps
    the decay the weighted norms require.  envelope=None keeps the raw
    periodic trigonometric sum (already mean-zero, no spatial decay).
    """
    n = grid.n
    coeffs = np.zeros((n, n), dtype=complex)
    for _ in range(40):
        i = int(rng.integers(-kmax, kmax + 1))
        j = int(rng.integers(-kmax, kmax + 1))
        if i == 0 and j == 0:
            continue
        amp = rng.normal() + 1j * rng.normal()
        coeffs[i % n, j % n] += amp
        coeffs[(-i) % n, (-j) % n] += np.conj(amp)
    raw = np.fft.ifft2(coeffs).real
    raw /= max(np.abs(raw).max(), 1e-300)
    if envelope is None:
        return ScalarField(grid, raw)
    vals = raw * np.exp(-grid.radius_sq() / envelope)
    vals -= mean_integral(ScalarField(grid, vals)) * gaussian_G(grid).values
    return ScalarField(grid, vals)


def generate_ic(name: str, cfg: ScenarioConfig, grid: GridSpec):
    """Deterministic (omega0, d0) for a generator name and seed."""
    if name == "gaussian-patches":
        omega0 = _patch_field(grid, _parse_patches(cfg.patches), cfg.alpha)
        d0 = oseen_vortex(cfg.beta, cfg.t0, grid)
        return omega0, d0
    if name == "dipole-divergence":
        if cfg.beta != 0.0:
            raise ValueError("dipole-divergence carries zero mass; set physics.beta = 0")
        omega0 = _patch_field(grid, _parse_patches(cfg.patches), cfg.alpha)
        x, _ = grid.coords()
        d0 = ScalarField(
            grid,
            -cfg.dipole_amplitude
            * (x / (8.0 * math.pi))
            * np.exp(-grid.radius_sq() / 4.0),
        )
        return omega0, d0
    if name == "tilde-plus-noise":
        rng = np.random.default_rng(cfg.seed)
        profile = solve_ws(cfg.beta)
        root = math.sqrt(cfg.t0)
        raw = profile.spline(grid.radius() / root) / cfg.t0
        # renormalize the gridded profile so the quadrature mass is alpha
        # exactly; the radial solve only pins it to ~1e-9
        w_ref = raw * (cfg.alpha / (float(raw.sum()) * grid.dx**2))
        d_ref = oseen_vortex(cfg.beta, cfg.t0, grid)
        # build and size the noise in xi variables, then map back: the two
        # grids share nodes under the exact relabeling x = sqrt(t0) xi
        gx = make_grid(grid.n, grid.box_len / root)
        w_noise = _seeded_noise(gx, rng)
        w_noise = ScalarField(gx, (cfg.size / weighted_w_norm(w_noise)) * w_noise.values)
        d_noise = _seeded_noise(gx, rng)
        d_noise = ScalarField(gx, (cfg.size / weighted_w_norm(d_noise)) * d_noise.values)
        omega0 = ScalarField(grid, w_ref + w_noise.values / cfg.t0)
        d0 = ScalarField(grid, d_ref.values + d_noise.values / cfg.t0)
        return omega0, d0
    raise ValueError(f"unknown generator {name!r}")


# ---------------------------------------------------------------- results

@dataclass(frozen=True)
class Criterion:
    name: str
    measured: float
    band: str
    passed: bool


@dataclass(frozen=True)
class FitLine:
    name: str
    value: float
    r2: float


@dataclass
class ScenarioResult:
    scenario: str
    rows: list = field(default_factory=list)
    criteria: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    error: str | None = None
    out_dir: str | None = None

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return 3
        return 0 if all(c.passed for c in self.criteria) else 1

    def summary_lines(self) -> list[str]:
        lines = [f"# {SUMMARY_VERSION}", f"scenario: {self.scenario}"]
        if self.error is not None:
            lines.append(f"error: {self.error}")
        for f_ in self.fits:
            lines.append(f"fit: {f_.name} | value = {f_.value:.10g} | r2 = {f_.r2:.10g}")
        for c in self.criteria:
            lines.append(
                f"criterion: {c.name} | measured = {c.measured:.10g} "
                f"| band = {c.band} | pass = {'true' if c.passed else 'false'}"
            )
        lines.append(f"exit: {self.exit_code}")
        return lines


# ---------------------------------------------------------------- row builder

class _RowBuilder:
    """Monitor callback: turns states into DiagnosticsRow, tracking extras."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.profile = solve_ws(cfg.beta)
        self.envelope: tuple | None = None
        self.oseen_rel_errors: list[float] = []

    def reference_pair(self, state: SimState):
        t = state.t
        rr = state.grid.radius() / math.sqrt(t)
        w_ref = ScalarField(state.grid, (state.alpha / t) * self.profile.spline(rr))
        d_ref = oseen_vortex(state.beta, t, state.grid)
        return w_ref, d_ref

    def __call__(self, state: SimState, t_eff: float) -> DiagnosticsRow:
        cfg = self.cfg
        t = state.t
        mon = theorem_monitors(state, self.reference_pair(state), weight_errors="nan")
        # raw x-space norms are reported for the effective (unrescaled)
        # solution: a restart divides them by 4^(k(1-1/p))
        fac = t / t_eff
        mon["l2"] *= math.sqrt(fac)
        mon["linf"] *= fac
        mon["d_p2"] *= math.sqrt(fac)
        mon["d_pinf"] *= fac

        gx = make_grid(state.grid.n, state.grid.box_len / math.sqrt(t))
        w_big = ScalarField(gx, t * state.omega.values)
        entropy = fisher = cross = math.nan
        if cfg.alpha == 1.0:
            if cfg.beta == 0.0:
                ref_xi = gaussian_G(gx)
            else:
                ref_xi = ScalarField(gx, self.profile.spline(gx.radius()))
            try:
                entropy = relative_entropy(w_big, ref_xi)
                fisher = fisher_information(w_big, ref_xi)
            except NegativeVorticityError:
                pass
            if cfg.beta == 0.0:
                cross = 0.0
            else:
                ws_xi = ScalarField(gx, self.profile.spline(gx.radius()))
                cross = beta_cross_term(w_big, ws_xi, cfg.beta)
        if lp_norm(w_big, np.inf) == 0.0:
            ratio = 0.0
        else:
            if self.envelope is None:
                self.envelope = envelope_fit(w_big)
            ratio = envelope_ratio(w_big, *self.envelope)

        if cfg.scenario == "oseen-fixed-point":
            exact = oseen_vortex(state.alpha, t, state.grid)
            sup = max(lp_norm(exact, np.inf), 1e-300)
            self.oseen_rel_errors.append(lp_norm(state.omega - exact, np.inf) / sup)

        return DiagnosticsRow(
            t=t_eff,
            tau=math.log(t_eff),
            alpha_resid=mean_integral(state.omega) - state.alpha,
            beta_resid=mean_integral(state.d) - state.beta,
            entropy=entropy,
            fisher=fisher,
            beta_cross=cross,
            envelope_ratio=ratio,
            **mon,
        )


def _conservation_criteria(rows) -> list[Criterion]:
    da = max(abs(r.alpha_resid - rows[0].alpha_resid) for r in rows)
    db = max(abs(r.beta_resid - rows[0].beta_resid) for r in rows)
    return [
        Criterion("conservation_alpha", da, "<= 1e-8", da <= 1e-8),
        Criterion("conservation_beta", db, "<= 1e-8", db <= 1e-8),
    ]


def _run_evolution(cfg: ScenarioConfig):
    grid = make_grid(cfg.n, cfg.box_len)
    omega0, d0 = generate_ic(cfg.generator, cfg, grid)
    state = SimState(omega=omega0, d=d0, t=cfg.t0, alpha=cfg.alpha, beta=cfg.beta)
    controls = StepControls(
        cfl_number=cfg.cfl,
        dt_max=cfg.dt_max,
        snapshot_every=cfg.snapshot_every,
        monitor_every=cfg.monitor_every,
    )
    builder = _RowBuilder(cfg)
    traj = evolve(
        state,
        cfg.t1,
        controls=controls,
        monitor=builder,
        restart_rescaling=cfg.restart_rescale,
    )
    rows = [row for _, row in traj.rows]
    return rows, builder, traj


# ---------------------------------------------------------------- scenarios

def _scenario_oseen(cfg: ScenarioConfig, result: ScenarioResult):
    rows, builder, traj = _run_evolution(cfg)
    result.rows = rows
    if not traj.completed:
        result.error = traj.error
        return traj
    worst = max(builder.oseen_rel_errors)
    result.criteria = [
        Criterion("oseen_sup_rel_error", worst, "<= 1e-4", worst <= 1e-4),
        *_conservation_criteria(rows),
    ]
    return traj


def _series(rows, name):
    return np.array([getattr(r, name) for r in rows])


def _monotone_criteria(rows, names, band=0.0) -> list[Criterion]:
    out = []
    for name in names:
        v = _series(rows, name)
        worst_rise = float(np.max(np.diff(v))) if len(v) > 1 else 0.0
        out.append(
            Criterion(
                f"{name}_nonincreasing",
                worst_rise,
                f"<= {band:g}",
                worst_rise <= band,
            )
        )
    return out


def _scenario_theorem1(cfg: ScenarioConfig, result: ScenarioResult):
    rows, _, traj = _run_evolution(cfg)
    result.rows = rows
    if not traj.completed:
        result.error = traj.error
        return traj
    names = ("th1_p1", "th1_p2", "th1_pinf")
    result.criteria = _monotone_criteria(rows, names)
    for name in names:
        v = _series(rows, name)
        ratio = float(v[-1] / v[0])
        result.criteria.append(
            Criterion(f"{name}_final_ratio", ratio, "<= 0.2", ratio <= 0.2)
        )
    result.criteria.extend(_conservation_criteria(rows))
    return traj


def _scenario_theorem2(cfg: ScenarioConfig, result: ScenarioResult):
    rows, _, traj = _run_evolution(cfg)
    result.rows = rows
    if not traj.completed:
        result.error = traj.error
        return traj
    taus = _series(rows, "tau")
    for name, floor in (("wp_w", 0.25), ("dp_w", 0.45)):
        slope, r2 = decay_fit(taus, _series(rows, name), "exponential")
        rate = -slope
        result.fits.append(FitLine(f"{name}_rate", rate, r2))
        result.criteria.append(
            Criterion(f"{name}_rate", rate, f">= {floor}", rate >= floor)
        )
    result.criteria.extend(_conservation_criteria(rows))
    return traj


def _scenario_entropy(cfg: ScenarioConfig, result: ScenarioResult):
    if cfg.alpha != 1.0:
        raise ValueError("entropy-monitor tracks H with unit vorticity mass; "
                         "set physics.alpha = 1")
    rows, _, traj = _run_evolution(cfg)
    result.rows = rows
    if not traj.completed:
        result.error = traj.error
        return traj
    result.criteria = _conservation_criteria(rows)
    if cfg.beta == 0.0:
        hs = _series(rows, "entropy")
        fs = _series(rows, "fisher")
        if np.any(np.isnan(hs)):
            result.criteria.append(
                Criterion("entropy_defined", math.nan, "no negative-W rows", False)
            )
            return traj
        worst_rise = float(np.max(np.diff(hs)))
        resid = entropy_production_check(_series(rows, "tau"), hs, fs)
        result.criteria.extend([
            Criterion("entropy_nonincreasing", worst_rise, "<= 0", worst_rise <= 0.0),
            Criterion("production_residual", resid, "<= 0.05", resid <= 0.05),
        ])
    else:
        cross = _series(rows, "beta_cross")
        worst = float(np.max(np.abs(cross)))
        radial = (cfg.generator == "gaussian-patches"
                  and all(cx == 0.0 and cy == 0.0
                          for cx, cy, _ in _parse_patches(cfg.patches)))
        if radial:
            result.criteria.append(
                Criterion("beta_cross_radial_sup", worst, "<= 1e-8", worst <= 1e-8)
            )
        else:
            result.criteria.append(
                Criterion("beta_cross_finite", worst, "finite",
                          bool(np.all(np.isfinite(cross))))
            )
    return traj


def _scenario_ws_profile(cfg: ScenarioConfig, result: ScenarioResult):
    profile = solve_ws(cfg.beta)
    mass_err = abs(float(profile.cumulative_mass[-1]) - 1.0)
    result.criteria.append(
        Criterion("profile_unit_mass", mass_err, "<= 1e-8", mass_err <= 1e-8)
    )
    if cfg.beta == 0.0:
        dev = float(np.max(np.abs(profile.w - np.exp(-profile.r**2 / 4.0) / (4.0 * math.pi))))
        result.criteria.append(
            Criterion("beta0_matches_gaussian", dev, "<= 1e-10", dev <= 1e-10)
        )
    peak = int(np.argmax(profile.w))
    if cfg.beta <= 4.0 * math.pi:
        worst_rise = float(np.max(np.diff(profile.w)))
        result.criteria.append(
            Criterion("profile_monotone", worst_rise, "<= 0", worst_rise <= 0.0)
        )
    else:
        r_peak = float(profile.r[peak])
        result.criteria.append(
            Criterion("profile_interior_max", r_peak, "> 0", r_peak > 0.0)
        )
    # steadiness of the gridded pair: generator and advection cancel
    grid = make_grid(cfg.n, cfg.box_len)
    w_ref, d_ref = tilde_pair(cfg.alpha, cfg.beta, 1.0, grid)
    bg = make_background(cfg.alpha, cfg.beta)
    resid = apply_L(w_ref) + rhs_vorticity(w_ref, d_ref, 1.0, bg)
    sup = lp_norm(resid, np.inf)
    result.criteria.append(
        Criterion("steady_residual_sup", sup, "<= 1e-5", sup <= 1e-5)
    )
    return None


def _operator_suite_checks(seed: int = 0):
    grid = make_grid(256, 40.0)
    rng = np.random.default_rng(seed)
    checks = []

    worst_curl = worst_div = 0.0
    for _ in range(3):
        f = _seeded_noise(grid, rng, kmax=20, envelope=None)
        u = biot_savart(f)
        curl = derivative(u.u2, 1) - derivative(u.u1, 2)
        div = derivative(u.u1, 1) + derivative(u.u2, 2)
        worst_curl = max(worst_curl, lp_norm(curl - f, np.inf))
        worst_div = max(worst_div, lp_norm(div, np.inf))
    checks.append(Criterion("biot_savart_curl_identity", worst_curl, "<= 1e-11",
                            worst_curl <= 1e-11))
    checks.append(Criterion("biot_savart_divergence_free", worst_div, "<= 1e-11",
                            worst_div <= 1e-11))

    worst_div_id = worst_curl_free = 0.0
    for _ in range(3):
        f = _seeded_noise(grid, rng, kmax=20, envelope=None)
        v = grad_inverse(f)
        div = derivative(v.u1, 1) + derivative(v.u2, 2)
        curl = derivative(v.u2, 1) - derivative(v.u1, 2)
        worst_div_id = max(worst_div_id, lp_norm(div - f, np.inf))
        worst_curl_free = max(worst_curl_free, lp_norm(curl, np.inf))
    checks.append(Criterion("grad_inverse_div_identity", worst_div_id, "<= 1e-11",
                            worst_div_id <= 1e-11))
    checks.append(Criterion("grad_inverse_curl_free", worst_curl_free, "<= 1e-11",
                            worst_curl_free <= 1e-11))

    G = gaussian_G(grid)
    x, y = grid.coords()
    d1g = ScalarField(grid, -(x / 2.0) * G.values)
    kern = lp_norm(apply_L(G), np.inf)
    mode = lp_norm(apply_L(d1g) + ScalarField(grid, 0.5 * d1g.values), np.inf)
    checks.append(Criterion("generator_kernel_gaussian", kern, "<= 1e-11", kern <= 1e-11))
    checks.append(Criterion("generator_first_mode", mode, "<= 1e-11", mode <= 1e-11))

    out = semigroup_apply(G, 0.5)
    fix = lp_norm(out - gaussian_G(out.grid), np.inf)
    checks.append(Criterion("semigroup_fixes_gaussian", fix, "<= 1e-11", fix <= 1e-11))
    taus = np.linspace(0.1, 1.2, 8)
    norms = [lpm_norm(semigroup_apply(d1g, tau), 2, 2.0) for tau in taus]
    slope, _ = decay_fit(taus, norms, "exponential")
    rate_dev = abs(-slope - 0.5) / 0.5
    checks.append(Criterion("semigroup_first_mode_rate", rate_dev, "<= 0.02",
                            rate_dev <= 0.02))
    sh = ScalarField(grid, np.exp(-((x - 1.0) ** 2 + y**2) / 4.0))
    tau = 0.8
    lhs = derivative(semigroup_apply(sh, tau), 1)
    rhs_ = semigroup_apply(derivative(sh, 1), tau)
    comm = lp_norm(
        ScalarField(lhs.grid, lhs.values - math.exp(tau / 2.0) * rhs_.values), np.inf
    )
    checks.append(Criterion("semigroup_commutation", comm, "<= 1e-8", comm <= 1e-8))

    lhs_e, rhs_e = coercivity_check(d1g, 0.45, 4e-5)
    checks.append(Criterion("coercivity_eigenmode_margin", lhs_e - rhs_e, "> 0",
                            lhs_e > rhs_e))
    worst_margin = math.inf
    for s in range(10):
        wp = _seeded_noise(grid, np.random.default_rng(1000 + s), kmax=20, envelope=3.0)
        lhs_c, rhs_c = coercivity_check(wp, 0.45, 4e-5)
        worst_margin = min(worst_margin, lhs_c - rhs_c)
    checks.append(Criterion("coercivity_random_margin", worst_margin, "> 0",
                            worst_margin > 0.0))
    return checks


def _scenario_operator_suite(cfg: ScenarioConfig, result: ScenarioResult):
    result.criteria = _operator_suite_checks(cfg.seed)
    return None


_RUNNERS = {
    "ws-profile": _scenario_ws_profile,
    "oseen-fixed-point": _scenario_oseen,
    "theorem1-relaxation": _scenario_theorem1,
    "theorem2-perturbation": _scenario_theorem2,
    "entropy-monitor": _scenario_entropy,
    "operator-suite": _scenario_operator_suite,
}


# ---------------------------------------------------------------- artifacts

def _fmt(v: float) -> str:
    return "%.17g" % v


def write_diagnostics_csv(path: str, rows) -> None:
    lines = [f"# {CSV_VERSION}: " + ",".join(COLUMNS), ",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row.as_tuple()))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_profile_csv(path: str, beta: float, r_cut: float = 10.0) -> None:
    profile = solve_ws(beta)
    keep = profile.r <= r_cut
    lines = [f"# {PROFILE_VERSION}: beta = {_fmt(beta)}", "r,ws"]
    for r, w in zip(profile.r[keep], profile.w[keep]):
        lines.append(f"{_fmt(r)},{_fmt(w)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_snapshot(directory: str, name: str, state_field: ScalarField,
                   kind: str, t: float, t_eff: float) -> None:
    meta = [
        f"name = {name}",
        f"n = {state_field.grid.n}",
        f"box_len = {_fmt(state_field.grid.box_len)}",
        f"t = {_fmt(t)}",
        f"t_eff = {_fmt(t_eff)}",
        f"kind = {kind}",
        "byte_order = little",
        "dtype = float64",
        "layout = row-major",
    ]
    with open(os.path.join(directory, name + ".meta"), "w") as fh:
        fh.write("\n".join(meta) + "\n")
    data = np.ascontiguousarray(state_field.values, dtype="<f8")
    with open(os.path.join(directory, name + ".bin"), "wb") as fh:
        fh.write(data.tobytes())


def read_snapshot(meta_path: str):
    """Load a (metadata, field) pair written by write_snapshot."""
    with open(meta_path) as fh:
        meta = parse_config_text(fh.read())
    n = int(meta["n"])
    box_len = float(meta["box_len"])
    if meta.get("byte_order") != "little" or meta.get("dtype") != "float64":
        raise ValueError(f"unsupported snapshot encoding in {meta_path}")
    bin_path = os.path.join(os.path.dirname(meta_path), meta["name"] + ".bin")
    data = np.fromfile(bin_path, dtype="<f8")
    if data.size != n * n:
        raise ValueError(
            f"snapshot {bin_path} holds {data.size} values, expected {n * n}"
        )
    vals = data.reshape(n, n).astype(float)
    return meta, ScalarField(make_grid(n, box_len), vals)


def _write_artifacts(cfg: ScenarioConfig, result: ScenarioResult, traj) -> None:
    out = cfg.directory
    if not out:
        return
    os.makedirs(out, exist_ok=True)
    result.out_dir = out
    write_diagnostics_csv(os.path.join(out, "diagnostics.csv"), result.rows)
    with open(os.path.join(out, "summary"), "w") as fh:
        fh.write("\n".join(result.summary_lines()) + "\n")
    if cfg.scenario == "ws-profile":
        write_profile_csv(os.path.join(out, "profile.csv"), cfg.beta)
    if traj is not None:
        for i, (t_eff, snap) in enumerate(traj.snapshots):
            write_snapshot(out, f"snap{i:04d}_omega", snap.omega, "omega",
                           snap.t, t_eff)
            write_snapshot(out, f"snap{i:04d}_d", snap.d, "divergence",
                           snap.t, t_eff)


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Run one scenario; artifacts are written when cfg.directory is set."""
    result = ScenarioResult(scenario=cfg.scenario)
    traj = None
    try:
        traj = _RUNNERS[cfg.scenario](cfg, result)
    except Exception as exc:  # recorded, not raised: the summary is the record
        result.error = f"{type(exc).__name__}: {exc}"
    _write_artifacts(cfg, result, traj)
    return result
