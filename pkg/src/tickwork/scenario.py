"""Scenario configs: validation, execution, and artifact emission.

A scenario is a JSON-able dict:

    {"model": "...", "params": {...},
     "run": {"dt": ..., "horizon": ..., "trials": ..., "master_seed": ...,
             "record_every": ...},
     "outputs": ["trajectory", "events", "ledger", "metrics"],
     "out_path": "dir"}

Unknown keys are rejected (with a closest-match hint), every numeric
parameter is validated by the model's own constructor before any
simulation runs, and all artifacts are written atomically (temp file +
rename) with floats at 17 significant digits so identical runs produce
byte-identical files.  The manifest echoes the fully resolved config and
is itself a valid config for re-running.
"""

from __future__ import annotations

import difflib
import json
import math
import os
import tempfile
from dataclasses import replace

import numpy as np

from . import laser as laser_mod
from . import metrics as metrics_mod
from . import pendulum as pend_mod
from . import processes
from . import quartz as quartz_mod
from . import shuttle as shuttle_mod
from . import thermal as thermal_mod
from .errors import NoLimitCycleError, TickworkError
from .records import EventRecord
from .sde import run_ensemble
from .streams import RngStream


class ConfigError(TickworkError):
    """Invalid scenario configuration; the message names the bad key."""


MODELS = ("pendulum", "quartz", "laser", "kerr", "shuttle", "radiocarbon",
          "mach", "tls-thermal", "tls-readout", "thermal-time")

OUTPUT_KINDS = ("trajectory", "events", "ledger", "metrics")

RUN_DEFAULTS = {"dt": None, "horizon": None, "trials": 1,
                "master_seed": 0, "record_every": 1}

# per-model parameter schema: name -> default (REQUIRED means mandatory)
REQUIRED = object()

PARAM_SPECS: dict[str, dict] = {
    "pendulum": {"Gamma": REQUIRED, "mu": REQUIRED, "psi0": 0.0,
                 "sigma": 0.0, "omega_tilde": 1.0, "on_cycle": False,
                 "x0": 0.1, "y0": 0.0, "psi_init": 0.0},
    "quartz": {"gamma": REQUIRED, "eta": REQUIRED, "beta": REQUIRED,
               "omega": 1.0, "kappa": 1.0, "chi": 0.0, "D": 0.0,
               "v0": 0.1, "x0": 0.1, "y0": 0.0, "static_sweep": False,
               "sweep_span": 1.5, "sweep_points": 601},
    "laser": {"G": REQUIRED, "n_sat": REQUIRED, "kappa": REQUIRED,
              "n_max": 0},
    "kerr": {"G": REQUIRED, "n_sat": REQUIRED, "kappa": REQUIRED,
             "eps": 0.01, "delta": 0.0, "chi_kerr": REQUIRED,
             "a0_re": 0.1, "a0_im": 0.0},
    "shuttle": {"gamma_L": REQUIRED, "gamma_R": REQUIRED, "nu": 1.0,
                "eta": 1.0, "chi": 1.0, "kappa": 0.1, "mode": "ensemble",
                "n0": 0.3, "x0": 0.05, "y0": 0.0, "r_star": -1.0,
                "Omega": 0.0, "gated": True},
    "radiocarbon": {"gamma_decay": REQUIRED, "true_time": REQUIRED},
    "mach": {"T1": REQUIRED, "T2": REQUIRED, "T3": REQUIRED,
             "k": REQUIRED},
    "tls-thermal": {"epsilon": REQUIRED, "gamma": REQUIRED,
                    "n_bar": REQUIRED, "initial": "down"},
    "tls-readout": {"epsilon": REQUIRED, "gamma": REQUIRED,
                    "n_bar": REQUIRED, "Gamma_meas": REQUIRED,
                    "eta_det": 1.0, "Delta": 0.0, "filter_window": -1.0,
                    "init": "thermal"},
    "thermal-time": {"epsilon": REQUIRED, "gamma": REQUIRED,
                     "n_bar": REQUIRED},
}

RUN_REQUIRED = {
    "pendulum": ("dt", "horizon"),
    "quartz": (),           # checked in the runner (sweep needs neither)
    "laser": (),
    "kerr": ("dt", "horizon"),
    "shuttle": ("horizon",),
    "radiocarbon": (),
    "mach": ("dt", "horizon"),
    "tls-readout": ("dt", "horizon"),
    "tls-thermal": ("horizon",),
    "thermal-time": ("dt", "horizon"),
}


def _reject_unknown(given: dict, allowed, context: str):
    for key in given:
        if key not in allowed:
            hint = difflib.get_close_matches(key, list(allowed), n=1)
            extra = f"; closest match: {hint[0]!r}" if hint else ""
            raise ConfigError(
                f"unknown {context} key {key!r}{extra}")


def validate_config(config: dict) -> dict:
    """Check and resolve a scenario config; returns it with all defaults
    materialized.  Raises ConfigError naming the offending key."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(config, ("model", "params", "run", "outputs",
                             "out_path"), "config")
    model = config.get("model")
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; choose from {MODELS}")
    spec = PARAM_SPECS[model]
    params = dict(config.get("params", {}))
    _reject_unknown(params, spec, f"parameter (model {model!r})")
    for key, default in spec.items():
        if key not in params:
            if default is REQUIRED:
                raise ConfigError(f"missing required parameter {key!r} "
                                  f"for model {model!r}")
            params[key] = default
    run = dict(config.get("run", {}))
    _reject_unknown(run, RUN_DEFAULTS, "run")
    for key, default in RUN_DEFAULTS.items():
        run.setdefault(key, default)
    for key in RUN_REQUIRED[model]:
        if run[key] is None:
            raise ConfigError(f"model {model!r} requires run.{key}")
    if int(run["trials"]) < 1:
        raise ConfigError("run.trials must be at least 1")
    if int(run["record_every"]) < 1:
        raise ConfigError("run.record_every must be at least 1")
    outputs = list(config.get("outputs", ["metrics"]))
    for kind in outputs:
        if kind not in OUTPUT_KINDS:
            raise ConfigError(f"unknown output kind {kind!r}")
    resolved = {"model": model, "params": params, "run": run,
                "outputs": outputs,
                "out_path": config.get("out_path", "tickwork-out")}
    # eager numeric validation through the model constructors
    _build_model_params(model, params)
    return resolved


def _build_model_params(model: str, p: dict):
    """Instantiate the model's parameter object (validates invariants)."""
    try:
        if model == "pendulum":
            return pend_mod.PendulumParams(p["Gamma"], p["mu"], p["psi0"],
                                           p["sigma"], p["omega_tilde"])
        if model == "quartz":
            return quartz_mod.QuartzParams(p["gamma"], p["eta"], p["beta"],
                                           p["omega"], p["kappa"], p["chi"],
                                           p["D"])
        if model in ("laser", "kerr"):
            return laser_mod.LaserParams(
                p["G"], p["n_sat"], p["kappa"], eps=p.get("eps", 0.0),
                delta=p.get("delta", 0.0),
                chi_kerr=p.get("chi_kerr", 0.0))
        if model == "shuttle":
            if p["mode"] not in ("ensemble", "trajectory", "oncycle"):
                raise ConfigError("shuttle mode must be ensemble, "
                                  "trajectory, or oncycle")
            return shuttle_mod.ShuttleParams(p["gamma_L"], p["gamma_R"],
                                             p["nu"], p["eta"], p["chi"],
                                             p["kappa"])
        if model == "radiocarbon":
            if p["gamma_decay"] <= 0 or p["true_time"] <= 0:
                raise ConfigError("gamma_decay and true_time must be positive")
            return p
        if model == "mach":
            if p["k"] <= 0:
                raise ConfigError("cooling constant k must be positive")
            return p
        if model == "tls-thermal":
            if p["initial"] not in ("up", "down"):
                raise ConfigError("initial must be 'up' or 'down'")
            return thermal_mod.TlsParams(p["epsilon"], p["gamma"],
                                         n_bar=p["n_bar"])
        if model == "tls-readout":
            if p["init"] not in ("thermal", "ground", "excited"):
                raise ConfigError("init must be thermal, ground, or excited")
            return thermal_mod.TlsParams(
                p["epsilon"], p["gamma"], n_bar=p["n_bar"],
                Gamma_meas=p["Gamma_meas"], Delta=p["Delta"],
                eta_det=p["eta_det"])
        if model == "thermal-time":
            return thermal_mod.TlsParams(p["epsilon"], p["gamma"],
                                         n_bar=p["n_bar"])
    except ConfigError:
        raise
    except TickworkError as err:
        raise ConfigError(f"invalid parameters for model {model!r}: {err}") \
            from err
    raise ConfigError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# runners: produce {"trajectory": table, "events": table, "ledger": table,
#                   "metrics": dict}; a table is (columns, rows)


def _traj_table(trajs):
    labels = trajs[0].labels
    cols = ["trial", "t", *labels]
    rows = []
    for k, tr in enumerate(trajs):
        for i, t in enumerate(tr.times):
            rows.append((k, t, *tr.states[i]))
    return cols, rows


def _events_table(records):
    cols = ["trial", "time", "label"]
    rows = []
    for k, rec in enumerate(records):
        for t, lab in zip(rec.times, rec.labels):
            rows.append((k, t, lab))
    return cols, rows


def _ledger_table(ledgers, extra_heats=None):
    cols = ["trial", "cycle", "period", "work", "heat"]
    if extra_heats:
        cols.append("heat_balance")
    rows = []
    for k, led in enumerate(ledgers):
        for i in range(len(led)):
            row = [k, i, led.periods[i], led.works[i], led.heats[i]]
            if extra_heats:
                row.append(extra_heats[k][i])
            rows.append(tuple(row))
    return cols, rows


def _run_pendulum(p, run, wanted):
    params = _build_model_params("pendulum", p)
    trials = int(run["trials"])
    seed = int(run["master_seed"])
    rec_every = int(run["record_every"])
    artifacts = {}
    if p["on_cycle"]:
        trajs = [pend_mod.simulate_phase_on_cycle(
            params, run["dt"], run["horizon"], RngStream(seed, k),
            psi_init=p["psi_init"], record_every=rec_every)
            for k in range(trials)]
        if "trajectory" in wanted:
            artifacts["trajectory"] = _traj_table(trajs)
        ledgers = [pend_mod.cycle_ledger(tr, params) for tr in trajs]
        artifacts["ledger"] = _ledger_table(ledgers)
        periods = np.concatenate([led.periods for led in ledgers]) \
            if ledgers else np.empty(0)
        halves = [pend_mod.half_cycle_samples(tr, params) for tr in trajs]
        ht = np.concatenate([h[0] for h in halves])
        hw = np.concatenate([h[1] for h in halves])
        slope = float(np.polyfit(ht, hw, 1)[0]) if len(ht) > 2 else math.nan
        artifacts["metrics"] = {
            "r_star": pend_mod.limit_cycle_radius(params),
            "mean_period": float(periods.mean()) if len(periods) else math.nan,
            "period_variance": float(periods.var(ddof=1))
            if len(periods) > 1 else math.nan,
            "n_cycles": int(len(periods)),
            "half_cycle_work_slope": slope,
            "work_period_slope_deterministic":
                2.0 * params.mu * pend_mod.limit_cycle_radius(params)
                * math.cos(params.psi0) / math.pi,
        }
    else:
        trajs = [pend_mod.simulate_pendulum(
            params, run["dt"], run["horizon"],
            RngStream(seed, k) if params.sigma > 0 else None,
            x0=(p["x0"], p["y0"]), record_every=rec_every)
            for k in range(trials)]
        if "trajectory" in wanted:
            artifacts["trajectory"] = _traj_table(trajs)
        tr0 = trajs[0]
        ticks = metrics_mod.extract_ticks(tr0, "kick-transition",
                                          component="K")
        late = ticks.tick_times[ticks.tick_times > 0.5 * run["horizon"]]
        x, y = tr0.component("x"), tr0.component("y")
        mask = tr0.times > 0.5 * run["horizon"]
        r = np.sqrt(x[mask] ** 2 + y[mask] ** 2)
        artifacts["metrics"] = {
            "r_star": pend_mod.limit_cycle_radius(params),
            "late_amplitude_mean": float(r.mean()),
            "mean_tick_period": float(np.diff(late).mean())
            if len(late) > 2 else math.nan,
            "n_ticks": int(len(ticks)),
        }
    return artifacts


def _run_quartz(p, run, wanted):
    params = _build_model_params("quartz", p)
    artifacts = {}
    if p["static_sweep"]:
        span, npts = p["sweep_span"], int(p["sweep_points"])
        up = np.linspace(-span, span, npts)
        path = np.concatenate([up, up[::-1]])
        v = quartz_mod.hysteresis_sweep(params.beta, params.eta, path)
        cols = ["trial", "t", "X", "V"]
        rows = [(0, float(i), path[i], v[i]) for i in range(len(path))]
        artifacts["trajectory"] = (cols, rows)
        jumps = np.where(np.abs(np.diff(v)) > 0.5)[0]
        up_sw, down_sw = quartz_mod.switching_inputs(params.beta, params.eta)
        vc, _ = quartz_mod.hysteresis_thresholds(params.beta)
        artifacts["metrics"] = {
            "V_c": vc,
            "up_switch_input": up_sw,
            "down_switch_input": down_sw,
            "observed_switch_inputs": [float(path[j]) for j in jumps],
        }
        return artifacts
    if run["dt"] is None or run["horizon"] is None:
        raise ConfigError("quartz time simulation requires run.dt and "
                          "run.horizon")
    seed = int(run["master_seed"])
    stream = RngStream(seed, 0) if params.D > 0 else None
    traj = quartz_mod.simulate_quartz(params, run["dt"], run["horizon"],
                                      stream, x0=(p["v0"], p["x0"], p["y0"]),
                                      record_every=int(run["record_every"]))
    artifacts["trajectory"] = _traj_table([traj])
    ticks = metrics_mod.extract_ticks(traj, "rising-zero-cross",
                                      component="V")
    late = ticks.tick_times[ticks.tick_times > 0.5 * run["horizon"]]
    artifacts["metrics"] = {
        "amplitude_X": quartz_mod.late_amplitude(traj, "X"),
        "mean_tick_period": float(np.diff(late).mean())
        if len(late) > 2 else math.nan,
        "n_ticks": int(len(ticks)),
    }
    return artifacts


def _run_laser(p, run, wanted):
    params = _build_model_params("laser", p)
    n_max = int(p["n_max"]) if p["n_max"] else None
    target = laser_mod.steady_state_distribution(params, n_max)
    n_max = target.n_max
    dt = 0.05 / (params.G * params.n_sat + params.kappa * n_max)
    p0 = np.zeros(n_max + 1)
    p0[0] = 1.0
    dist = laser_mod.PhotonDistribution(p0)
    block = max(int(round(0.1 / dt)), 1)
    ns = np.arange(n_max + 1)
    rows = [(0, 0.0, dist.mean(), float(np.abs(dist.p - target.p).sum()))]
    t = 0.0
    l1 = rows[0][3]
    while l1 > 1e-6 and t < 200.0:
        dist = laser_mod.evolve_photon_distribution(dist, params, dt, block)
        t += block * dt
        l1 = float(np.abs(dist.p - target.p).sum())
        rows.append((0, t, dist.mean(), l1))
    artifacts = {"trajectory": (["trial", "t", "mean_n", "l1_to_ss"], rows)}
    metrics = {
        "ss_mean": target.mean(),
        "ss_fano": target.fano(),
        "nbar_above": params.nbar_above,
        "relaxation_l1": l1,
        "relaxation_time": t,
        "phase_diffusion_rate":
            laser_mod.phase_diffusion_rate(params.kappa, params.nbar_above),
    }
    if params.G < params.kappa:
        metrics["nbar_below"] = params.nbar_below
    artifacts["metrics"] = metrics
    return artifacts


def _run_kerr(p, run, wanted):
    params = _build_model_params("kerr", p)
    traj = laser_mod.simulate_semiclassical(
        params, run["dt"], run["horizon"], kerr=True,
        a0=complex(p["a0_re"], p["a0_im"]),
        record_every=int(run["record_every"]))
    artifacts = {"trajectory": _traj_table([traj])}
    im = traj.component("im")
    late_mask = traj.times > 0.5 * run["horizon"]
    ticks = metrics_mod.extract_ticks(traj, "rising-zero-cross",
                                      component="im")
    late = ticks.tick_times[ticks.tick_times > 0.5 * run["horizon"]]
    re = traj.component("re")
    intensity = float((re[late_mask] ** 2 + im[late_mask] ** 2).mean())
    freq = 2.0 * math.pi / float(np.diff(late).mean()) \
        if len(late) > 2 else math.nan
    periods = np.diff(late)
    q_rate = params.kappa * intensity  # balance: loss = pump on the cycle
    ledger_rows = [(0, i, periods[i], q_rate * periods[i],
                    q_rate * periods[i]) for i in range(len(periods))]
    artifacts["ledger"] = (["trial", "cycle", "period", "work", "heat"],
                           ledger_rows)
    artifacts["metrics"] = {
        "pulse_frequency": freq,
        "predicted_frequency": params.chi_kerr * params.nbar_above,
        "intensity": intensity,
        "dissipation_rate": q_rate,
    }
    return artifacts


def _run_shuttle(p, run, wanted):
    params = _build_model_params("shuttle", p)
    trials = int(run["trials"])
    seed = int(run["master_seed"])
    mode = p["mode"]
    artifacts = {}
    if mode == "ensemble":
        if run["dt"] is None:
            raise ConfigError("shuttle ensemble mode requires run.dt")
        traj = shuttle_mod.simulate_shuttle_ensemble(
            params, run["dt"], run["horizon"],
            x0=(p["n0"], complex(p["x0"], p["y0"])),
            record_every=int(run["record_every"]))
        artifacts["trajectory"] = _traj_table([traj])
        x = traj.component("X")
        y = traj.component("Y")
        n = traj.component("n")
        mask = traj.times > 0.75 * run["horizon"]
        e_bar = float((0.5 * (x[mask] ** 2 + y[mask] ** 2)).mean())
        power = float((params.chi * y[mask] * n[mask]).mean())
        metrics = {
            "late_amplitude": float(0.5 * (x[mask].max() - x[mask].min())),
            "kappa_E": params.kappa * e_bar,
            "electrical_power": power,
        }
        try:
            metrics["r_star_equation"] = shuttle_mod.limit_cycle_amplitude(params)
        except (NoLimitCycleError, TickworkError):
            metrics["r_star_equation"] = math.nan
        artifacts["metrics"] = metrics
        return artifacts
    # event-producing modes
    Omega = p["Omega"] if p["Omega"] > 0 else params.nu
    r_star = p["r_star"]
    if mode == "oncycle" and r_star < 0:
        r_star = shuttle_mod.limit_cycle_amplitude(params)
    if mode == "trajectory":
        if run["dt"] is None:
            raise ConfigError("shuttle trajectory mode requires run.dt")

        def one(stream):
            return shuttle_mod.simulate_shuttle_trajectory(
                params, run["dt"], run["horizon"], stream, n0=int(p["n0"]),
                alpha0=complex(p["x0"], p["y0"]),
                record_every=int(run["record_every"]))

        results = run_ensemble(one, trials, seed)
        trajs = [r[0] for r in results]
        events = [r[1] for r in results]
        artifacts["trajectory"] = _traj_table(trajs)
        if r_star < 0:
            try:
                r_star = shuttle_mod.limit_cycle_amplitude(params)
            except (NoLimitCycleError, TickworkError):
                r_star = math.nan
    else:
        def one(stream):
            return shuttle_mod.sample_oncycle_events(
                params, r_star, Omega, run["horizon"], stream,
                gated=bool(p["gated"]))

        events = run_ensemble(one, trials, seed)
    artifacts["events"] = _events_table(events)
    metrics = {"r_star": r_star, "Omega": Omega,
               "n_unloads": int(sum(ev.count(shuttle_mod.LABEL_OFF)
                                    for ev in events))}
    window = 10.0 * 2.0 * math.pi / Omega
    try:
        metrics["fano_unloads"] = metrics_mod.counting_fano(
            events, window, label=shuttle_mod.LABEL_OFF)
    except TickworkError:
        metrics["fano_unloads"] = math.nan
    if not math.isnan(r_star):
        ledgers = [shuttle_mod.event_cycle_ledger(ev, params, r_star,
                                                  "paper") for ev in events]
        extra = [shuttle_mod.event_cycle_ledger(ev, params, r_star,
                                                "balance").heats
                 for ev in events]
        artifacts["ledger"] = _ledger_table(ledgers, extra_heats=extra)
        metrics["mean_heat_rate_paper"] = shuttle_mod.average_heat(
            params, r_star, 1.0, "paper") if r_star > 0 else 0.0
    artifacts["metrics"] = metrics
    return artifacts


def _run_radiocarbon(p, run, wanted):
    trials = int(run["trials"])
    seed = int(run["master_seed"])
    lam = p["gamma_decay"] * p["true_time"]
    counts = np.array([RngStream(seed, k).generator().poisson(lam)
                       for k in range(trials)])
    estimates = counts / p["gamma_decay"]
    events = processes.thinning_sample(lambda t: p["gamma_decay"],
                                       p["gamma_decay"], p["true_time"],
                                       RngStream(seed, 0), label="decay")
    rec = thermal_mod.radiocarbon_estimate(int(counts[0]), p["gamma_decay"])
    artifacts = {
        "events": _events_table([events]),
        "metrics": {
            "true_time": p["true_time"],
            "mean_estimate": float(estimates.mean()),
            "std_estimate": float(estimates.std(ddof=1))
            if trials > 1 else math.nan,
            "relative_error_oracle":
                1.0 / math.sqrt(lam),
            "first_trial_estimate": rec.estimate,
            "first_trial_relative_error": rec.relative_error,
        },
    }
    return artifacts


def _run_mach(p, run, wanted):
    T0 = (p["T1"], p["T2"], p["T3"])
    traj = thermal_mod.simulate_mach(T0, p["k"], run["dt"], run["horizon"],
                                     record_every=int(run["record_every"]))
    closed = thermal_mod.mach_temperatures(T0, p["k"], traj.times)
    dev = float(np.max(np.abs(traj.states - closed)))
    t1_final = float(traj.states[-1, 0])
    est = thermal_mod.mach_time_estimate(t1_final, T0, p["k"])
    artifacts = {
        "trajectory": _traj_table([traj]),
        "metrics": {
            "closed_form_max_deviation": dev,
            "temperature_sum_drift":
                float(np.max(np.abs(traj.states.sum(axis=1) - sum(T0)))),
            "time_estimate_from_T1": est.estimate,
            "horizon": run["horizon"],
        },
    }
    return artifacts


def _run_tls_thermal(p, run, wanted):
    params = _build_model_params("tls-thermal", p)
    trials = int(run["trials"])
    seed = int(run["master_seed"])

    def one(stream):
        return thermal_mod.telegraph_record(params, run["horizon"], stream,
                                            initial=p["initial"])

    records = run_ensemble(one, trials, seed)
    fracs = [processes.occupancy_fraction(rec, p["initial"])
             for rec in records]
    n_up = records[0].count("up")
    t_est = thermal_mod.tls_time_estimate(n_up, params)
    T_est = thermal_mod.tls_temperature_estimate(n_up, run["horizon"], params)
    artifacts = {
        "events": _events_table(records),
        "metrics": {
            "up_fraction": float(np.mean(fracs)),
            "up_fraction_oracle":
                params.n_bar / (2.0 * params.n_bar + 1.0),
            "n_up_transitions": int(n_up),
            "time_estimate": t_est.estimate,
            "temperature_estimate": T_est.estimate,
            "duality_product": thermal_mod.duality_product(n_up, params),
        },
    }
    return artifacts


def _init_state(name: str, params) -> thermal_mod.DensityMatrix:
    if name == "thermal":
        return thermal_mod.thermal_state(params.beta, params.epsilon)
    if name == "excited":
        return thermal_mod.DensityMatrix(np.diag([1.0, 0.0]))
    return thermal_mod.DensityMatrix(np.diag([0.0, 1.0]))


def _run_tls_readout(p, run, wanted):
    params = _build_model_params("tls-readout", p)
    trials = int(run["trials"])
    seed = int(run["master_seed"])
    window = p["filter_window"]
    if window <= 0:
        window = 4.0 / (params.eta_det * params.Gamma_meas)
    rho0 = _init_state(p["init"], params)
    trajs = []
    all_events = []
    fracs = []
    for k in range(trials):
        traj, current = thermal_mod.simulate_readout_trajectory(
            params, run["dt"], run["horizon"], RngStream(seed, k),
            rho0=rho0, record_every=int(run["record_every"]))
        trajs.append(traj)
        events, _ = thermal_mod.detect_jumps(current, run["dt"], window)
        all_events.append(events)
        fracs.append(processes.occupancy_fraction(
            events, initial=events.meta["initial"]))
    artifacts = {
        "trajectory": _traj_table(trajs),
        "events": _events_table(all_events),
        "metrics": {
            "detected_up_fraction": float(np.mean(fracs)),
            "up_fraction_oracle":
                params.n_bar / (2.0 * params.n_bar + 1.0),
            "n_detected_transitions": int(sum(len(e) for e in all_events)),
            "filter_window": window,
            "jump_visibility_ratio":
                params.Gamma_meas / max(params.rate_up, 1e-300),
        },
    }
    return artifacts


def _run_thermal_time(p, run, wanted):
    params = _build_model_params("thermal-time", p)
    eps = params.epsilon
    H = np.diag([eps / 2.0, -eps / 2.0]).astype(complex)
    rho = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)
    dt = run["dt"]
    n_steps = int(round(run["horizon"] / dt))
    rows = [(0, 0.0, 0.5, 0.0)]
    coh = [0.5]
    for j in range(n_steps):
        rho = thermal_mod.thermal_time_step(rho, H, params.gamma,
                                            params.n_bar, dt)
        c = abs(rho[0, 1])
        coh.append(c)
        rows.append((0, (j + 1) * dt, c,
                     float((rho[0, 0] - rho[1, 1]).real)))
    coh = np.array(coh)
    times = np.arange(n_steps + 1) * dt
    rate_fit = -float(np.polyfit(times, np.log(coh), 1)[0])
    artifacts = {
        "trajectory": (["trial", "t", "coherence", "z"], rows),
        "metrics": {
            "coherence_decay_rate_fit": rate_fit,
            "coherence_decay_rate_exact":
                thermal_mod.coherence_decay_rate(eps, params.gamma,
                                                 params.n_bar),
            "tick_rate": params.gamma * params.n_bar,
        },
    }
    return artifacts


_RUNNERS = {
    "pendulum": _run_pendulum,
    "quartz": _run_quartz,
    "laser": _run_laser,
    "kerr": _run_kerr,
    "shuttle": _run_shuttle,
    "radiocarbon": _run_radiocarbon,
    "mach": _run_mach,
    "tls-thermal": _run_tls_thermal,
    "tls-readout": _run_tls_readout,
    "thermal-time": _run_thermal_time,
}


# ---------------------------------------------------------------------------
# artifact writing


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tickwork-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, table):
    cols, rows = table
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def run_scenario(config: dict, out_dir: str | None = None) -> dict:
    """Validate and execute a scenario; write requested artifacts.

    Returns {"manifest": path, <kind>: path, ...}.  The manifest echoes
    the fully resolved configuration, including the seed, and can be fed
    back in as a config to reproduce the run byte for byte.
    """
    resolved = validate_config(config)
    if out_dir is not None:
        resolved["out_path"] = out_dir
    out = resolved["out_path"]
    os.makedirs(out, exist_ok=True)
    artifacts = _RUNNERS[resolved["model"]](resolved["params"],
                                            resolved["run"],
                                            tuple(resolved["outputs"]))
    written = {}
    manifest_path = os.path.join(out, "manifest.json")
    _atomic_write(manifest_path,
                  json.dumps(resolved, indent=2, sort_keys=True,
                             default=_json_default) + "\n")
    written["manifest"] = manifest_path
    for kind in resolved["outputs"]:
        if kind == "metrics":
            path = os.path.join(out, "metrics.json")
            _atomic_write(path, json.dumps(artifacts.get("metrics", {}),
                                           indent=2, sort_keys=True,
                                           default=_json_default) + "\n")
        else:
            if kind not in artifacts:
                raise ConfigError(
                    f"model {resolved['model']!r} (this mode) does not "
                    f"produce {kind!r} output")
            path = os.path.join(out, f"{kind}.csv")
            _write_csv(path, artifacts[kind])
        written[kind] = path
    return written
