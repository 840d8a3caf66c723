"""Named experiment suites.

Every suite is a pure function of an ExperimentConfig returning a result
dict with "series" (name -> (header, rows)) for CSV emission and "checks"
(name -> float/bool) consumed by the acceptance tests and the CLI summary.
"""

import numpy as np

from .config import ExperimentConfig
from .diagnostics import (envelope_value, fit_rate, pair_sobolev_norm,
                          sobolev_norm)
from .evolution import DataParams, Stepper, evolve, make_initial_data
from .propagators import T0, AnalyticWaveData, FreeWaveData, free_wave_spectrum
from .scattering import (LowModeSet, PhaseTable, cauchy_increments,
                         identity_residual, residual_terms, theta_growth_slopes,
                         theta_prime_table, window_ratios)
from .spectral import SpectralGrid
from .transform import box_tilde_n_source, dyadic_window_sums

__all__ = ["run_experiment", "run_smoke", "run_reference", "run_cascade",
           "run_dichotomy", "run_theta_growth", "run_convergence",
           "cascade_oracle_series"]


def _series(header, rows):
    return ([str(h) for h in header], [list(r) for r in rows])


# ---------------------------------------------------------------------------
# smoke
# ---------------------------------------------------------------------------

def run_smoke(cfg: ExperimentConfig):
    """Zero-amplitude run: every tracked series must be identically zero."""
    data = DataParams(amplitude=0.0, radius_n=cfg.data.radius_n,
                      radius_e=cfg.data.radius_e, moment=0.0)
    rows = []

    def obs(state):
        rows.append((state.t, state.grid.norm_phys(state.n),
                     state.grid.norm_phys(state.E[0]) + state.grid.norm_phys(state.E[1])))

    evolve(cfg.grid, data, cfg.t_end, cfg.dt, cfg.snapshot_stride,
           observer=obs, keep_states=False)
    peak = max(max(r[1], r[2]) for r in rows)
    return {"series": {"smoke": _series(("t", "norm_n", "norm_e"), rows)},
            "checks": {"all_zero": peak == 0.0}}


# ---------------------------------------------------------------------------
# reference run: decay, Sobolev, section-5 contrast, residual identity
# ---------------------------------------------------------------------------

def run_reference(cfg: ExperimentConfig, identity_times=None, ds_refine=True):
    cfg.require_box()
    g = cfg.grid
    if identity_times is None:
        identity_times = [float(t) for t in np.arange(2.0, cfg.t_end + 1e-9, 2.0)]

    decay_rows = []
    sobolev_rows = []
    contrast_rows = []
    kept = []

    def obs(state):
        sup_e = envelope_value(g, state.t, state.E, "one")
        env_e = envelope_value(g, state.t, state.E, "kg")
        env_n = envelope_value(g, state.t, state.n, "wave")
        decay_rows.append((state.t, sup_e, env_e, env_n))
        sob_n = pair_sobolev_norm(g, [state.ndot,
                                      g.derivative(state.n, 0),
                                      g.derivative(state.n, 1)], 4)
        sob_e = pair_sobolev_norm(g, list(state.E), 6)
        sobolev_rows.append((state.t, sob_n, sob_e))
        if state.t >= 7.5:
            src = box_tilde_n_source(state)
            e2_hat = g.dealias(g.forward(state.e_abs2()))
            lap_e2 = g.inverse(-g.xi_abs**2 * e2_hat)
            contrast_rows.append((state.t, g.norm_phys(src), g.norm_phys(lap_e2)))
        if any(abs(state.t - ti) < 0.25 * cfg.dt for ti in identity_times):
            kept.append(state)

    evolve(g, cfg.data, cfg.t_end, cfg.dt, cfg.snapshot_stride,
           observer=obs, keep_states=False)

    s0 = make_initial_data(g, cfg.data)
    wave_data = FreeWaveData.from_fields(g, s0.n, s0.ndot)
    modes = LowModeSet.build(wave_data, cfg.p)
    xi_pts = np.column_stack([g.XI1.ravel(), g.XI2.ravel()])

    identity_rows = []
    refine_rows = []
    for state in kept:
        terms = residual_terms(state, wave_data, p=cfg.p, modes=modes)
        thp_tab = theta_prime_table(modes, state.t, xi_pts, cfg.p, cfg.ds)
        res = identity_residual(g, terms, thp_tab.reshape(g.N, g.N))
        res_exact = identity_residual(g, terms, terms["theta_prime"])
        identity_rows.append((state.t, res, res_exact))
        if ds_refine and state.t <= 10.0:
            thp_half = theta_prime_table(modes, state.t, xi_pts, cfg.p, 0.5 * cfg.ds)
            res_half = identity_residual(g, terms, thp_half.reshape(g.N, g.N))
            refine_rows.append((state.t, res, res_half,
                                res / res_half if res_half > 0 else np.inf))

    times = np.array([r[0] for r in decay_rows])
    sup_e = np.array([r[1] for r in decay_rows])
    fit_sel = times >= 5.0 - 1e-9
    (alpha, _), fit_resid = fit_rate(times[fit_sel], sup_e[fit_sel], "power")

    win = (times >= 8.0 - 1e-9) & (times <= 40.0 + 1e-9)
    env_e = np.array([r[2] for r in decay_rows])[win]
    env_n = np.array([r[3] for r in decay_rows])[win]
    sob = np.array(sobolev_rows)
    sob_win = sob[sob[:, 0] <= 40.0 + 1e-9]

    ctimes = np.array([r[0] for r in contrast_rows])
    w_src = dyadic_window_sums(ctimes, [r[1] for r in contrast_rows], range(3, 5))
    w_lap = dyadic_window_sums(ctimes, [r[2] for r in contrast_rows], range(3, 5))

    checks = {
        "alpha": alpha,
        "alpha_residual": fit_resid,
        "env_e_spread": float(np.max(env_e) / np.median(env_e)) if len(env_e) else np.inf,
        "env_e_dip": float(np.min(env_e) / np.median(env_e)) if len(env_e) else 0.0,
        "env_n_spread": float(np.max(env_n) / np.median(env_n)) if len(env_n) else np.inf,
        "env_n_dip": float(np.min(env_n) / np.median(env_n)) if len(env_n) else 0.0,
        "sobolev_n_var": float(np.max(sob_win[:, 1]) / np.min(sob_win[:, 1]) - 1.0),
        "sobolev_e_var": float(np.max(sob_win[:, 2]) / np.min(sob_win[:, 2]) - 1.0),
        "identity_worst": max(r[1] for r in identity_rows),
        "identity_worst_exact": max(r[2] for r in identity_rows),
        "boxsrc_window_ratio": w_src[1][1] / w_src[0][1] if len(w_src) > 1 else np.nan,
        "lap_e2_window_ratio": w_lap[1][1] / w_lap[0][1] if len(w_lap) > 1 else np.nan,
    }
    if refine_rows:
        checks["ds_refine_ratio"] = float(np.median([r[3] for r in refine_rows]))
    return {
        "series": {
            "decay": _series(("t", "sup_e", "env_e_kg", "env_n_wave"), decay_rows),
            "sobolev": _series(("t", "h4_dn", "h6_e"), sobolev_rows),
            "contrast": _series(("t", "norm_box_tilde_src", "norm_lap_e2"), contrast_rows),
            "identity": _series(("t", "residual_tabulated", "residual_exact"),
                                identity_rows),
            "identity_refine": _series(("t", "res_ds", "res_ds_half", "ratio"),
                                       refine_rows),
        },
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# cascade
# ---------------------------------------------------------------------------

def cascade_oracle_series(moment, times):
    """(mu^2 / 2 pi) int_0^(t - t0) sin(u)^2 / u du by fine Simpson quadrature;
    the continuum growth law of ||l||^2 under the (1/2pi) Plancherel scaling."""
    out = []
    for t in times:
        tau = t - T0
        if tau <= 0:
            out.append(0.0)
            continue
        n = max(64, 2 * int(np.ceil(tau / 0.05)))
        u = np.linspace(0.0, tau, n + 1)
        f = np.empty_like(u)
        f[0] = 0.0
        f[1:] = np.sin(u[1:]) ** 2 / u[1:]
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        out.append(float(np.dot(w, f) * (u[1] - u[0]) / 3.0) * moment**2 / (2.0 * np.pi))
    return np.asarray(out)


def _norms_no_mean(grid, n_hat):
    """(1/2pi)||n_hat|| with the zero mode dropped (the box-mean term is a
    periodic artifact absent on the plane)."""
    keep = n_hat.copy()
    keep[0, 0] = 0.0
    return grid.norm_spec(keep) / (2.0 * np.pi)


def run_cascade(cfg: ExperimentConfig, branch="full"):
    """Energy-cascade measurement: fitted b in ||n||^2 ~ a + b log t against
    the oracle slope b*; also tracks sup_t ||dn||."""
    if abs(cfg.data.moment) < 1e-12 or cfg.data.n1_divergence:
        raise ValueError("cascade requires a nonzero n1 moment; "
                         "use the dichotomy runner for moment = 0")
    g = cfg.grid
    s0 = make_initial_data(g, cfg.data)
    data = FreeWaveData.from_fields(g, s0.n, s0.ndot)
    rows = []

    if branch == "free":
        times = np.arange(T0, cfg.t_end + 1e-9, cfg.dt * cfg.snapshot_stride)
        for t in times:
            lhat, dlhat = free_wave_spectrum(data, t, derivative=True)
            nn = _norms_no_mean(g, lhat)
            dn = np.sqrt((g.norm_spec(dlhat) / (2 * np.pi)) ** 2
                         + (g.norm_spec(g.xi_abs * lhat) / (2 * np.pi)) ** 2)
            rows.append((t, nn, dn))
    elif branch == "full":
        cfg.require_box()

        def obs(state):
            n_hat = g.forward(state.n)
            nn = _norms_no_mean(g, n_hat)
            dn = np.sqrt((g.norm_phys(state.ndot)) ** 2
                         + (g.norm_spec(g.xi_abs * n_hat) / (2 * np.pi)) ** 2)
            rows.append((state.t, nn, dn))

        evolve(g, cfg.data, cfg.t_end, cfg.dt, cfg.snapshot_stride,
               observer=obs, keep_states=False, with_m=False)
    else:
        raise ValueError("branch must be 'free' or 'full'")

    times = np.array([r[0] for r in rows])
    nsq = np.array([r[1] for r in rows]) ** 2
    dn = np.array([r[2] for r in rows])
    t_hi = cfg.fit_t_max if cfg.fit_t_max is not None else times[-1]
    sel = (times >= cfg.fit_t_min) & (times <= t_hi + 1e-9)
    (a_fit, b_fit), _ = fit_rate(times[sel], nsq[sel], "log")
    oracle = cascade_oracle_series(cfg.data.moment, times[sel])
    (a_star, b_star), _ = fit_rate(times[sel], oracle, "log")

    i4 = int(np.argmin(np.abs(times - 4.0)))
    checks = {
        "b": b_fit, "b_star": b_star, "b_ratio": b_fit / b_star,
        "sup_dn": float(np.max(dn)),
        "dn_at_4": float(dn[i4]),
        "dn_growth": float(np.max(dn[times >= 4.0]) / dn[i4]),
    }
    full_rows = [(t, nn, dnv, b_fit, b_star) for (t, nn, dnv) in rows]
    return {"series": {"cascade": _series(("t", "norm_n", "norm_dn", "fit_b", "oracle_b"),
                                          full_rows)},
            "checks": checks}


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------

def _window_range(t_end):
    # complete dyadic windows [2^m, 2^(m+1)] inside (t0, t_end]
    m_hi = int(np.floor(np.log2(t_end + 1e-9))) - 1
    return list(range(2, m_hi + 1))


def run_dichotomy(cfg: ExperimentConfig):
    """Cauchy increments of the plain and phase-corrected profiles over
    dyadic windows, at low bands. The nonzero-moment branch also builds the
    full-lattice phase table for the modified profile."""
    cfg.require_box()
    g = cfg.grid
    windows = _window_range(cfg.t_end)
    want = sorted({2.0**m for m in windows} | {2.0 ** (windows[-1] + 1)} | {cfg.t_end})
    want = [t for t in want if t <= cfg.t_end + 1e-9]

    br = g.xi_bracket
    times_kept, specs = [], []

    def obs(state):
        if not any(abs(state.t - ti) < 0.25 * cfg.dt for ti in want):
            return
        ph = np.exp(1j * state.t * br)
        f_plus = [ph * (g.forward(state.Edot[c]) - 1j * br * g.forward(state.E[c]))
                  for c in range(2)]
        times_kept.append(state.t)
        specs.append(f_plus)

    evolve(g, cfg.data, cfg.t_end, cfg.dt, cfg.snapshot_stride,
           observer=obs, keep_states=False, with_m=False)

    plain = cauchy_increments(g, times_kept, specs, windows, cfg.c_e, cfg.d_e,
                              k_lo=cfg.k_lo, k_hi=cfg.k_hi)
    plain_peak, plain_ratio = window_ratios(plain)

    result_rows = [(m, plain_peak[m], plain_ratio.get(m, np.nan)) for m in sorted(plain)]
    deepest = max(plain_ratio)
    checks = {"plain_max_ratio": max(plain_ratio.values()),
              "plain_min_ratio": min(plain_ratio.values()),
              # calibration-frozen detector statistic: the consecutive-window
              # ratio at the deepest (most asymptotic) window pair
              "plain_last_ratio": plain_ratio[deepest]}
    series = {"dichotomy_plain": _series(("window_m", "plain_peak", "plain_ratio"),
                                         result_rows)}

    if not cfg.data.n1_divergence and abs(cfg.data.moment) > 0:
        s0 = make_initial_data(g, cfg.data)
        wave_data = FreeWaveData.from_fields(g, s0.n, s0.ndot)
        cut = 2.0 ** (cfg.k_hi + 1)
        sel = g.xi_abs.ravel() <= cut
        xi_pts = np.column_stack([g.XI1.ravel()[sel], g.XI2.ravel()[sel]])
        table = PhaseTable.build(wave_data, xi_pts, np.asarray(times_kept),
                                 cfg.p, cfg.ds)
        phases = []
        for i in range(len(times_kept)):
            full = np.zeros(g.N * g.N)
            full[sel] = table.phase_dyn[i]
            phases.append(full.reshape(g.N, g.N))
        modified = cauchy_increments(g, times_kept, specs, windows, cfg.c_e,
                                     cfg.d_e, k_lo=cfg.k_lo, k_hi=cfg.k_hi,
                                     phases=phases)
        mod_peak, mod_ratio = window_ratios(modified)
        series["dichotomy_modified"] = _series(
            ("window_m", "modified_peak", "modified_ratio"),
            [(m, mod_peak[m], mod_ratio.get(m, np.nan)) for m in sorted(modified)])
        checks["modified_max_ratio"] = max(mod_ratio.values())
        checks["modified_last_ratio"] = mod_ratio[max(mod_ratio)]
    return {"series": series, "checks": checks}


# ---------------------------------------------------------------------------
# theta growth (free-data only; no PDE solve)
# ---------------------------------------------------------------------------

def run_theta_growth(cfg: ExperimentConfig):
    """Slope of the printed-normalization Theta against log t per tabulated
    frequency, over long horizons reachable because only the free wave enters."""
    mu = cfg.data.moment
    if cfg.data.n1_divergence:
        data = AnalyticWaveData(L=cfg.theta_l, a1=cfg.data.amplitude,
                                r1=cfg.data.radius_n, divergence_form=True)
    else:
        data = AnalyticWaveData(L=cfg.theta_l,
                                a1=mu / (2.0 * np.pi * cfg.data.radius_n**2),
                                r1=cfg.data.radius_n)
    xi_pts = np.array([[v, 0.0] for v in cfg.xi_table])
    t_lo, t_hi = 256.0, cfg.theta_t_max
    times = np.unique(np.concatenate([
        np.array([64.0, 128.0]), np.geomspace(t_lo, t_hi, 13)]))
    table = PhaseTable.build(data, xi_pts, times, cfg.p, ds=0.5)
    rows = []
    for i, t in enumerate(times):
        rows.append((t, *table.theta[i]))
    header = ["t"] + [f"theta_xi{v:g}" for v in cfg.xi_table]
    checks = {}
    if abs(mu) > 0 and not cfg.data.n1_divergence:
        slopes = theta_growth_slopes(table, t_lo, t_hi)
        for v, s in zip(cfg.xi_table, slopes):
            checks[f"slope_ratio_xi{v:g}"] = float(s / (np.pi * mu))
    else:
        sel64 = int(np.argmin(np.abs(times - 64.0)))
        for j, v in enumerate(cfg.xi_table):
            ref = abs(table.theta[sel64, j])
            peak = float(np.max(np.abs(table.theta[:, j])))
            checks[f"bounded_ratio_xi{v:g}"] = peak / ref if ref > 0 else 0.0
    return {"series": {"theta_growth": _series(header, rows)}, "checks": checks}


# ---------------------------------------------------------------------------
# integrator self-convergence and the decomposition cross-check
# ---------------------------------------------------------------------------

def run_convergence(cfg: ExperimentConfig):
    """Global order-2 self-convergence and the n = l + Lap m residual at two
    time steps (the residual must track the integrator error and shrink ~4x)."""
    from .evolution import check_decomposition

    cfg.require_box()
    g = cfg.grid
    s0 = make_initial_data(g, cfg.data)
    data = FreeWaveData.from_fields(g, s0.n, s0.ndot)

    finals = {}
    resid = {}
    # reference at dt/8: coarse enough contamination that e(dt)/e(dt/2)
    # sits near the clean order-2 value 4 (63/15 ~ 4.2) instead of 5
    for k, dt in enumerate([cfg.dt, cfg.dt / 2.0, cfg.dt / 8.0]):
        stride = max(1, int(round((cfg.t_end - T0) / dt / 8)))
        traj = evolve(g, cfg.data, cfg.t_end, dt, snapshot_stride=stride)
        finals[dt] = traj.states[-1]
        if k < 2:
            resid[dt] = check_decomposition(traj, data, eps=cfg.data.amplitude)

    def dist(a, b):
        return np.sqrt(g.norm_phys(a.n - b.n) ** 2
                       + sum(g.norm_phys(a.E[c] - b.E[c]) ** 2 for c in range(2)))

    dts = [cfg.dt, cfg.dt / 2.0, cfg.dt / 8.0]
    e_coarse = dist(finals[dts[0]], finals[dts[2]])
    e_fine = dist(finals[dts[1]], finals[dts[2]])
    checks = {
        "self_error_coarse": e_coarse,
        "self_error_fine": e_fine,
        "order_ratio": e_coarse / e_fine,
        "decomp_coarse": resid[dts[0]],
        "decomp_fine": resid[dts[1]],
        "decomp_ratio": resid[dts[0]] / resid[dts[1]],
        "decomp_vs_self": resid[dts[0]] / (e_coarse / max(g.norm_phys(finals[dts[0]].n), 1e-30)),
    }
    rows = [(dts[0], e_coarse, resid[dts[0]]), (dts[1], e_fine, resid[dts[1]])]
    return {"series": {"convergence": _series(("dt", "self_error", "decomp_residual"),
                                              rows)},
            "checks": checks}


_RUNNERS = {
    "smoke": run_smoke,
    "reference": run_reference,
    "decay": run_reference,
    "identity": run_reference,
    "cascade": run_cascade,
    "dichotomy": run_dichotomy,
    "theta-growth": run_theta_growth,
    "convergence": run_convergence,
}


def run_experiment(cfg: ExperimentConfig):
    runner = _RUNNERS[cfg.experiment]
    if cfg.experiment == "cascade":
        return runner(cfg, branch="full")
    return runner(cfg)
