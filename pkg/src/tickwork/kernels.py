"""Backend selection and chunked drivers for the hot simulation loops.

The compiled extension (`tickwork._fast`, Cython) and the reference lane
(`tickwork._reference`, NumPy) expose identical block-stepping functions.
This module picks one at import time - the compiled lane when available,
unless TICKWORK_PURE=1 forces the reference lane - and wraps the block
steppers with the bookkeeping that is the same for both: per-trial noise
streams, fixed-size step blocks (bounded memory), record subsampling, and
blowup diagnostics.

Everything here is deterministic given (parameters, streams); the backend
and the block size never change the drawn random sequence.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import NumericalBlowupError
from .streams import RngStream

if os.environ.get("TICKWORK_PURE"):
    from . import _reference as _impl

    BACKEND = "reference"
else:
    try:
        from . import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _reference as _impl

        BACKEND = "reference"


BLOCK_STEPS = 8192


def backend_name() -> str:
    return BACKEND


def get_impl(name: str):
    """Return a named backend module ("compiled" or "reference").

    Used by the parity tests and the benchmark; simulation code should go
    through the public drivers below instead.
    """
    if name == "reference":
        from . import _reference

        return _reference
    if name == "compiled":
        from . import _fast

        return _fast
    raise ValueError(f"unknown backend {name!r}")


def _generators(streams, m):
    if streams is None:
        return None
    gens = [s.generator() for s in streams]
    if len(gens) != m:
        raise ValueError("one stream per trial required")
    return gens


def _noise_block(gens, m, nb, sqrt_dt, scratch):
    if gens is None:
        return scratch[:, :nb]  # zeros, never read when amplitude is 0
    for i, g in enumerate(gens):
        scratch[i, :nb] = g.standard_normal(nb)
    block = scratch[:, :nb]
    block *= sqrt_dt
    return block


def _record_columns(s0, nb, record_every):
    """Global steps j in [s0, s0+nb) whose post-step state is recorded,
    i.e. (j+1) divisible by record_every.  Returns (local cols, record idx)."""
    first = ((s0 // record_every) + 1) * record_every - 1
    cols = np.arange(first, s0 + nb, record_every) - s0
    cols = cols[cols >= 0]
    idx = (cols + s0 + 1) // record_every - 1
    return cols.astype(np.intp), idx.astype(np.intp)


def _chunked(step, m, n_steps, record_every, n_out, streams, dt, use_noise,
             trial_offset=0):
    """Run `step(dw_block, outs) -> status` over blocks; collect records.

    `step` advances the persistent state by dw_block.shape[1] steps and
    fills the (m, nb) views in `outs`.  Returns (m, n_rec, n_out) records.
    """
    n_rec = n_steps // record_every
    rec = np.empty((m, n_rec, n_out))
    gens = _generators(streams, m) if use_noise else None
    noise_scratch = np.zeros((m, BLOCK_STEPS))
    out_scratch = [np.empty((m, BLOCK_STEPS)) for _ in range(n_out)]
    sqrt_dt = np.sqrt(dt)
    s0 = 0
    while s0 < n_steps:
        nb = min(BLOCK_STEPS, n_steps - s0)
        dw = _noise_block(gens, m, nb, sqrt_dt, noise_scratch)
        outs = [o[:, :nb] for o in out_scratch]
        status = step(dw, outs)
        if status >= 0:
            t_fail = (s0 + status + 1) * dt
            raise NumericalBlowupError(
                "state left the representable range",
                time=t_fail,
                trial=trial_offset if m == 1 else None,
            )
        cols, idx = _record_columns(s0, nb, record_every)
        if len(cols):
            for q in range(n_out):
                rec[:, idx, q] = outs[q][:, cols]
        s0 += nb
    return rec


def pendulum_paths(x0, y0, *, gamma, mu, sin_psi0, cos_psi0, noise_amp,
                   dt, n_steps, streams=None, record_every=1):
    """Batched kicked-pendulum paths; returns (m, n_rec, 3) = (x, y, K)."""
    x = np.array(x0, dtype=float, ndmin=1).copy()
    y = np.array(y0, dtype=float, ndmin=1).copy()
    m = len(x)

    def step(dw, outs):
        return _impl.pendulum_block(x, y, gamma, mu, sin_psi0, cos_psi0,
                                    noise_amp, dt, dw, *outs)

    return _chunked(step, m, n_steps, record_every, 3, streams, dt,
                    use_noise=noise_amp != 0.0)


def phase_paths(psi_init, *, omega, noise_scale, mu, psi_offset,
                dt, n_steps, streams=None, record_every=1):
    """Batched on-cycle phase paths; returns (m, n_rec, 2) = (psi, K)."""
    psi = np.array(psi_init, dtype=float, ndmin=1).copy()
    m = len(psi)

    def step(dw, outs):
        return _impl.phase_block(psi, omega, noise_scale, mu, psi_offset,
                                 dt, dw, *outs)

    return _chunked(step, m, n_steps, record_every, 2, streams, dt,
                    use_noise=noise_scale != 0.0)


def quartz_paths(v0, x0, y0, *, gamma, eta, beta, omega, kappa, chi,
                 noise_amp, dt, n_steps, streams=None, record_every=1):
    """Batched trigger+resonator paths; returns (m, n_rec, 3) = (V, X, Y)."""
    v = np.array(v0, dtype=float, ndmin=1).copy()
    x = np.array(x0, dtype=float, ndmin=1).copy()
    y = np.array(y0, dtype=float, ndmin=1).copy()
    m = len(v)

    def step(dw, outs):
        return _impl.quartz_block(v, x, y, gamma, eta, beta, omega, kappa,
                                  chi, noise_amp, dt, dw, *outs)

    return _chunked(step, m, n_steps, record_every, 3, streams, dt,
                    use_noise=noise_amp != 0.0)


def semiclassical_paths(a0, *, eps, delta, chi_kerr, gain, n_sat, kappa,
                        dither, dt, n_steps, streams=None, record_every=1):
    """Batched cavity-amplitude paths; returns (m, n_rec, 2) = (Re, Im).

    The complex dither consumes two normals per trial per block (a Re
    block, then an Im block) from the trial's stream.
    """
    a0 = np.array(a0, dtype=complex, ndmin=1)
    are = a0.real.copy()
    aim = a0.imag.copy()
    m = len(are)
    if dither != 0.0 and streams is None:
        raise ValueError("dither requires per-trial streams")
    gens = _generators(streams, m) if dither != 0.0 else None
    n_rec = n_steps // record_every
    rec = np.empty((m, n_rec, 2))
    dw_re = np.zeros((m, BLOCK_STEPS))
    dw_im = np.zeros((m, BLOCK_STEPS))
    out_re = np.empty((m, BLOCK_STEPS))
    out_im = np.empty((m, BLOCK_STEPS))
    sqrt_dt = np.sqrt(dt)
    s0 = 0
    while s0 < n_steps:
        nb = min(BLOCK_STEPS, n_steps - s0)
        if gens is not None:
            for i, g in enumerate(gens):
                dw_re[i, :nb] = g.standard_normal(nb)
                dw_im[i, :nb] = g.standard_normal(nb)
            dw_re[:, :nb] *= sqrt_dt
            dw_im[:, :nb] *= sqrt_dt
        status = _impl.semiclassical_block(
            are, aim, eps, delta, chi_kerr, gain, n_sat, kappa, dither, dt,
            dw_re[:, :nb], dw_im[:, :nb], out_re[:, :nb], out_im[:, :nb])
        if status >= 0:
            raise NumericalBlowupError(
                "cavity amplitude left the representable range",
                time=(s0 + status + 1) * dt,
                trial=0 if m == 1 else None,
            )
        cols, idx = _record_columns(s0, nb, record_every)
        if len(cols):
            rec[:, idx, 0] = out_re[:, cols]
            rec[:, idx, 1] = out_im[:, cols]
        s0 += nb
    return rec


def shuttle_ode_paths(n0, x0, y0, *, gamma_l, gamma_r, eta, nu, chi, kappa,
                      dt, n_steps, record_every=1):
    """Batched mean-field shuttle paths; returns (m, n_rec, 3) = (n, X, Y)."""
    n = np.array(n0, dtype=float, ndmin=1).copy()
    x = np.array(x0, dtype=float, ndmin=1).copy()
    y = np.array(y0, dtype=float, ndmin=1).copy()
    m = len(n)

    def step(dw, outs):
        return _impl.shuttle_ode_block(n, x, y, gamma_l, gamma_r, eta, nu,
                                       chi, kappa, dt, *outs)

    return _chunked(step, m, n_steps, record_every, 3, None, dt,
                    use_noise=False)


def sme_paths(a0, c0, *, omega, gamma_down, gamma_up, meas_rate, eta_det,
              dt, n_steps, streams, record_every=1, want_current=True):
    """Batched conditional two-level trajectories under continuous readout.

    Returns (records, currents): records is (m, n_rec, 3) = (<sz>, Re c,
    Im c) subsampled every `record_every` steps; currents is the (m,
    n_steps) full-rate normalized photocurrent, or None.
    """
    a = np.array(a0, dtype=float, ndmin=1).copy()
    c0 = np.array(c0, dtype=complex, ndmin=1)
    cre = c0.real.copy()
    cim = c0.imag.copy()
    m = len(a)
    sqeg = np.sqrt(eta_det * meas_rate)
    n_rec = n_steps // record_every
    rec = np.empty((m, n_rec, 3))
    cur = np.empty((m, n_steps)) if want_current else None
    gens = _generators(streams, m)
    noise_scratch = np.empty((m, BLOCK_STEPS))
    out_z = np.empty((m, BLOCK_STEPS))
    out_cre = np.empty((m, BLOCK_STEPS))
    out_cim = np.empty((m, BLOCK_STEPS))
    out_i = np.empty((m, BLOCK_STEPS))
    sqrt_dt = np.sqrt(dt)
    s0 = 0
    while s0 < n_steps:
        nb = min(BLOCK_STEPS, n_steps - s0)
        dw = _noise_block(gens, m, nb, sqrt_dt, noise_scratch)
        status = _impl.sme_block(a, cre, cim, omega, gamma_down, gamma_up,
                                 meas_rate, sqeg, dt, dw,
                                 out_z[:, :nb], out_cre[:, :nb],
                                 out_cim[:, :nb], out_i[:, :nb])
        if status >= 0:
            raise NumericalBlowupError(
                "conditional state lost positivity",
                time=(s0 + status + 1) * dt,
                trial=0 if m == 1 else None,
            )
        cols, idx = _record_columns(s0, nb, record_every)
        if len(cols):
            rec[:, idx, 0] = out_z[:, cols]
            rec[:, idx, 1] = out_cre[:, cols]
            rec[:, idx, 2] = out_cim[:, cols]
        if want_current:
            cur[:, s0:s0 + nb] = out_i[:, :nb]
        s0 += nb
    return rec, cur


def pdmp_path(*, n0, x0, y0, gamma_l, gamma_r, eta, nu, chi, kappa,
              dt, n_steps, stream: RngStream, record_every=1):
    """Single-electron shuttle trajectory (piecewise-deterministic jumps).

    Returns (records, event_times, event_kinds) where records is
    (n_rec, 3) = (n, X, Y) and event kind 0/1 = electron on/off the dot.
    """
    gen = stream.generator()
    state = np.array([float(n0), x0, y0, 0.0])
    thr_ptr = np.zeros(1, dtype=np.int64)
    ev_ptr = np.zeros(1, dtype=np.int64)
    out_n = np.empty(n_steps)
    out_x = np.empty(n_steps)
    out_y = np.empty(n_steps)
    ev_times = []
    ev_kinds = []
    refill = 256
    thresholds = gen.standard_exponential(refill)
    ev_t = np.empty(refill)
    ev_k = np.empty(refill, dtype=np.int64)
    step = 0
    while True:
        status, step = _impl.pdmp_steps(
            state, gamma_l, gamma_r, eta, nu, chi, kappa, dt, n_steps, step,
            thresholds, thr_ptr, ev_t, ev_k, ev_ptr, out_n, out_x, out_y)
        ne = int(ev_ptr[0])
        ev_times.append(ev_t[:ne].copy())
        ev_kinds.append(ev_k[:ne].copy())
        if status == 2:
            raise NumericalBlowupError(
                "tunnelling exponent overflow (|4 eta X| > 700)",
                time=(step + 1) * dt,
            )
        if status == 0:
            break
        # thresholds exhausted: draw a fresh block from the same stream
        thresholds = gen.standard_exponential(refill)
        thr_ptr[0] = 0
        ev_ptr[0] = 0
        ev_t = np.empty(refill)
        ev_k = np.empty(refill, dtype=np.int64)
    rec_idx = np.arange(record_every - 1, n_steps, record_every)
    records = np.stack([out_n[rec_idx], out_x[rec_idx], out_y[rec_idx]],
                       axis=1)
    return records, np.concatenate(ev_times), np.concatenate(ev_kinds)
