"""Built-in scenario presets.

Each preset is a complete, validated configuration for the `run`
subcommand, reproducing one of the package's reference plots as data
(CSV/JSON).  Numeric parameters are spelled out so a preset also serves
as a template for custom configs.
"""

from __future__ import annotations

import math

_SIN01 = math.asin(0.1)
_SIN02 = math.asin(0.2)

PRESETS: dict[str, dict] = {
    "pendulum-limit-cycle": {
        "description": "kicked pendulum settling onto its limit cycle "
                       "(sin psi0=0.1, Gamma=0.1, mu=0.1, no noise)",
        "config": {
            "model": "pendulum",
            "params": {"Gamma": 0.1, "mu": 0.1, "psi0": _SIN01,
                       "sigma": 0.0},
            "run": {"dt": 1e-3, "horizon": 400.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 10},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "pendulum-phase-paths": {
        "description": "five jittered kick-signal sample paths from phase "
                       "diffusion on the cycle (sigma=0.1, mu=Gamma=1)",
        "config": {
            "model": "pendulum",
            "params": {"Gamma": 1.0, "mu": 1.0, "psi0": _SIN01,
                       "sigma": 0.1, "on_cycle": True},
            "run": {"dt": 1e-3, "horizon": 30.0, "trials": 5,
                    "master_seed": 20260810, "record_every": 5},
            "outputs": ["trajectory"],
        },
    },
    "pendulum-kick-average": {
        "description": "ensemble of dephasing kick signals whose mean "
                       "follows the enveloped square-wave series "
                       "(psi0=0, sigma=0.2, 100 trials)",
        "config": {
            "model": "pendulum",
            "params": {"Gamma": 1.0, "mu": 1.0, "psi0": 0.0, "sigma": 0.2,
                       "on_cycle": True},
            "run": {"dt": 1e-3, "horizon": 30.0, "trials": 100,
                    "master_seed": 20260810, "record_every": 5},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "pendulum-period-histogram": {
        "description": "tick-period histogram over 300 noisy cycles "
                       "(Gamma=0.1, mu=0.1, sigma=0.1)",
        "config": {
            "model": "pendulum",
            "params": {"Gamma": 0.1, "mu": 0.1, "psi0": 0.0, "sigma": 0.1,
                       "on_cycle": True},
            "run": {"dt": 1e-3, "horizon": 400.0, "trials": 300,
                    "master_seed": 20260810, "record_every": 5},
            "outputs": ["ledger", "metrics"],
        },
    },
    "pendulum-work-period": {
        "description": "work vs period scatter over 50 noisy half-cycles "
                       "(sin psi0=0.2, Gamma=0.1, mu=0.1, sigma=0.1)",
        "config": {
            "model": "pendulum",
            "params": {"Gamma": 0.1, "mu": 0.1, "psi0": _SIN02,
                       "sigma": 0.1, "on_cycle": True},
            "run": {"dt": 1e-3, "horizon": 170.0, "trials": 1,
                    "master_seed": 20260810},
            "outputs": ["ledger", "metrics"],
        },
    },
    "quartz-limit-cycle": {
        "description": "trigger-driven crystal: square output voltage and "
                       "sinusoidal crystal voltage on the cycle "
                       "(omega=1, gamma=0.1, eta=8, kappa=1, beta=1, chi=5)",
        "config": {
            "model": "quartz",
            "params": {"gamma": 0.1, "eta": 8.0, "beta": 1.0, "omega": 1.0,
                       "kappa": 1.0, "chi": 5.0, "D": 0.0},
            "run": {"dt": 1e-3, "horizon": 400.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 10},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "quartz-hysteresis": {
        "description": "static hysteresis loop of the trigger response "
                       "(beta=1.8, eta=0.6)",
        "config": {
            "model": "quartz",
            "params": {"gamma": 0.1, "eta": 0.6, "beta": 1.8,
                       "static_sweep": True, "sweep_span": 1.5,
                       "sweep_points": 601},
            "run": {"trials": 1, "master_seed": 20260810},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "laser-steady-state": {
        "description": "photon-number relaxation onto the detailed-balance "
                       "steady state (G=100, n_sat=1, kappa=4)",
        "config": {
            "model": "laser",
            "params": {"G": 100.0, "n_sat": 1.0, "kappa": 4.0},
            "run": {"trials": 1, "master_seed": 20260810},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "laser-kerr-pulsing": {
        "description": "self-pulsing of the field quadrature with an "
                       "intracavity Kerr medium (chi=0.2, eps=0.01, "
                       "G=100, n_sat=1, kappa=4)",
        "config": {
            "model": "kerr",
            "params": {"G": 100.0, "n_sat": 1.0, "kappa": 4.0,
                       "eps": 0.01, "delta": 0.0, "chi_kerr": 0.2},
            "run": {"dt": 1e-4, "horizon": 60.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 10},
            "outputs": ["trajectory", "ledger", "metrics"],
        },
    },
    "shuttle-lc": {
        "description": "mean-field shuttle limit cycle: charge, "
                       "displacement and current "
                       "(gamma_L=gamma_R=0.1, nu=1, eta=1, chi=1, kappa=0.1)",
        "config": {
            "model": "shuttle",
            "params": {"gamma_L": 0.1, "gamma_R": 0.1, "nu": 1.0,
                       "eta": 1.0, "chi": 1.0, "kappa": 0.1,
                       "mode": "ensemble"},
            "run": {"dt": 1e-3, "horizon": 1500.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 20},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "shuttle-counting": {
        "description": "regular unload events on a large prescribed cycle "
                       "(r*=5, Omega=2pi, eta=0.3, gamma=1)",
        "config": {
            "model": "shuttle",
            "params": {"gamma_L": 1.0, "gamma_R": 1.0, "nu": 1.0,
                       "eta": 0.3, "chi": 1.0, "kappa": 0.1,
                       "mode": "oncycle", "r_star": 5.0,
                       "Omega": 2.0 * math.pi, "gated": True},
            "run": {"horizon": 300.0, "trials": 1,
                    "master_seed": 20260810},
            "outputs": ["events", "ledger", "metrics"],
        },
    },
    "shuttle-poisson-reference": {
        "description": "bare Poisson unload process (r*=0 reference for "
                       "the counting comparison)",
        "config": {
            "model": "shuttle",
            "params": {"gamma_L": 1.0, "gamma_R": 1.0, "nu": 1.0,
                       "eta": 0.3, "chi": 1.0, "kappa": 0.1,
                       "mode": "oncycle", "r_star": 0.0,
                       "Omega": 2.0 * math.pi, "gated": False},
            "run": {"horizon": 300.0, "trials": 1,
                    "master_seed": 20260810},
            "outputs": ["events", "metrics"],
        },
    },
    "tls-jumps": {
        "description": "quantum jumps of a thermally driven TLS under "
                       "strong continuous readout (Nbar=0.9, Gamma=5, "
                       "gamma=0.1)",
        "config": {
            "model": "tls-readout",
            "params": {"epsilon": 1.0, "gamma": 0.1, "n_bar": 0.9,
                       "Gamma_meas": 5.0, "eta_det": 1.0,
                       "filter_window": 0.8, "init": "ground"},
            "run": {"dt": 2e-4, "horizon": 100.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 50},
            "outputs": ["trajectory", "events", "metrics"],
        },
    },
    "tls-thermal-telegraph": {
        "description": "thermal telegraph of a TLS (n_bar=5): transition "
                       "counting as an irreversible clock",
        "config": {
            "model": "tls-thermal",
            "params": {"epsilon": 1.0, "gamma": 1.0, "n_bar": 5.0,
                       "initial": "down"},
            "run": {"horizon": 10000.0, "trials": 1,
                    "master_seed": 20260810},
            "outputs": ["events", "metrics"],
        },
    },
    "radiocarbon-dating": {
        "description": "decay-count dating: estimator spread over 2000 "
                       "ensembles of true age 100 (gamma=1)",
        "config": {
            "model": "radiocarbon",
            "params": {"gamma_decay": 1.0, "true_time": 100.0},
            "run": {"trials": 2000, "master_seed": 20260810},
            "outputs": ["metrics"],
        },
    },
    "mach-cooling": {
        "description": "three-body cooling clock: temperatures relax to "
                       "the mean at rate 3k (T=(10,20,30), k=1/3)",
        "config": {
            "model": "mach",
            "params": {"T1": 10.0, "T2": 20.0, "T3": 30.0,
                       "k": 1.0 / 3.0},
            "run": {"dt": 1e-3, "horizon": 6.0, "trials": 1,
                    "master_seed": 20260810, "record_every": 10},
            "outputs": ["trajectory", "metrics"],
        },
    },
    "thermal-time-flow": {
        "description": "stochastic-tick evolution: coherence damping at "
                       "gamma nbar (1 - cos(eps/(gamma nbar)))",
        "config": {
            "model": "thermal-time",
            "params": {"epsilon": 1.0, "gamma": 2.0, "n_bar": 1.0},
            "run": {"dt": 0.05, "horizon": 10.0, "trials": 1,
                    "master_seed": 20260810},
            "outputs": ["trajectory", "metrics"],
        },
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(name)
    # deep-ish copy so callers can mutate
    import copy

    return copy.deepcopy(PRESETS[name]["config"])
