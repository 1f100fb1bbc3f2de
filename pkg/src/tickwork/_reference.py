"""Reference kernels: pure NumPy implementations of the hot inner loops.

Each function advances a batch of independent trials through one block of
fixed time steps, updating the state arrays in place and writing per-step
outputs.  The compiled lane in `_fast.pyx` implements the same functions
with identical arithmetic (same operation order, IEEE semantics), so the
two lanes agree bit for bit; `tickwork.kernels` picks one at import time.

Status return convention: -1 on success, otherwise the index of the first
step inside the block at which the state left the representable range.
"""

from __future__ import annotations

import numpy as np


def _first_failure(*arrays) -> int:
    # arrays are (m, B) per-step outputs; find the earliest bad step
    bad = ~np.isfinite(arrays[0])
    for a in arrays[1:]:
        bad |= ~np.isfinite(a)
    if not bad.any():
        return -1
    return int(np.where(bad.any(axis=0))[0][0])


def pendulum_block(x, y, gamma, mu, spsi, cpsi, namp, dt, dw,
                   out_x, out_y, out_k):
    """Kicked, damped oscillator: dx = y dt, dy = (-x - G y + K) dt + a dW.

    K(x, y) = -mu * sign(spsi*x - cpsi*y), evaluated at the pre-step state.
    """
    nb = dw.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            arg = spsi * x - cpsi * y
            k = np.where(arg > 0.0, -mu, np.where(arg < 0.0, mu, 0.0))
            xn = x + y * dt
            yn = y + ((-x - gamma * y + k) * dt + namp * dw[:, j])
            x[:] = xn
            y[:] = yn
            out_x[:, j] = x
            out_y[:, j] = y
            out_k[:, j] = k
    return _first_failure(out_x, out_y)


def phase_block(psi, omega, s, mu, psi0, dt, dw, out_psi, out_k):
    """Phase on the limit cycle: dpsi = -omega dt + s dW, with the kick
    signal K(t) = -mu * sign(cos(psi + psi0)) emitted alongside."""
    nb = dw.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            psi[:] = psi + (-omega * dt + s * dw[:, j])
            c = np.cos(psi + psi0)
            out_psi[:, j] = psi
            out_k[:, j] = np.where(c > 0.0, -mu, np.where(c < 0.0, mu, 0.0))
    return _first_failure(out_psi)


def quartz_block(v, x, y, gamma, eta, beta, omega, kappa, chi, namp, dt, dw,
                 out_v, out_x, out_y):
    """Trigger + resonator: dV per the two-exponential relaxation law,
    dX = w Y dt, dY = (-w X - k Y + chi V) dt + a dW."""
    nb = dw.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            tb = np.tanh(beta * v)
            g = (v + tb) / (1.0 + v * tb)
            ex = np.exp(eta * x)
            vn = v + (gamma * (1.0 - g) / ex - gamma * (1.0 + g) * ex) * dt
            xn = x + omega * y * dt
            yn = y + ((-omega * x - kappa * y + chi * v) * dt + namp * dw[:, j])
            v[:] = vn
            x[:] = xn
            y[:] = yn
            out_v[:, j] = v
            out_x[:, j] = x
            out_y[:, j] = y
    return _first_failure(out_v, out_x, out_y)


def semiclassical_block(are, aim, eps, delta, chik, gain, ns, kappa,
                        dither, dt, dw_re, dw_im, out_re, out_im):
    """Cavity amplitude flow with saturable gain and optional Kerr phase:

        da = [-i eps - i (delta + chik |a|^2) a
              - (kappa a / 2) (1 - gain ns / (kappa (|a|^2 + ns)))] dt

    `dither` adds a zero-mean complex Gaussian of that amplitude per step.
    """
    nb = out_re.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            n2 = are * are + aim * aim
            sat = 0.5 * kappa * (1.0 - gain * ns / (kappa * (n2 + ns)))
            det = delta + chik * n2
            dre = (det * aim - sat * are) * dt
            dim = (-eps - det * are - sat * aim) * dt
            if dither != 0.0:
                dre = dre + dither * dw_re[:, j]
                dim = dim + dither * dw_im[:, j]
            are[:] = are + dre
            aim[:] = aim + dim
            out_re[:, j] = are
            out_im[:, j] = aim
    return _first_failure(out_re, out_im)


def shuttle_ode_block(n, x, y, gl, gr, eta, nu, chi, kappa, dt,
                      out_n, out_x, out_y):
    """Mean-field shuttle: exact exponential relaxation of the charge at
    frozen displacement, Euler step for the oscillator quadratures.

    Returns the step index on exponent overflow (|4 eta X| > 700).
    """
    nb = out_n.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            w = 4.0 * eta * x
            if np.any(np.abs(w) > 700.0) or np.any(~np.isfinite(w)):
                return j
            a = gl * np.exp(-w)
            b = a + gr * np.exp(w)
            neq = a / b
            nn = neq + (n - neq) * np.exp(-b * dt)
            xn = x + (nu * y - 0.5 * kappa * x) * dt
            yn = y + (-nu * x - 0.5 * kappa * y + chi * n) * dt
            n[:] = nn
            x[:] = xn
            y[:] = yn
            out_n[:, j] = n
            out_x[:, j] = x
            out_y[:, j] = y
    return _first_failure(out_x, out_y)


def sme_block(a, cre, cim, omega, gdown, gup, bigGam, sqeg, dt, dw,
              out_z, out_cre, out_cim, out_i):
    """Conditional two-level state under thermal jumps, dephasing at rate
    `bigGam`, and continuous energy readout of strength sqeg = sqrt(eta*Gam).

    State is (excited population a, coherence c); trace and Hermiticity are
    exact by construction.  Emits <sz>, the coherence, and the normalized
    current record.  Returns the step index if positivity is violated
    beyond 1e-8.
    """
    nb = dw.shape[1]
    with np.errstate(all="ignore"):
        for j in range(nb):
            z = 2.0 * a - 1.0
            da = (-gdown * a + gup * (1.0 - a)) * dt \
                + sqeg * (2.0 * a * (1.0 - z)) * dw[:, j]
            fac = (-0.5 * (gdown + gup) - 2.0 * bigGam) * dt \
                - sqeg * 2.0 * z * dw[:, j]
            dcre = cre * fac + 2.0 * omega * cim * dt
            dcim = cim * fac - 2.0 * omega * cre * dt
            a[:] = a + da
            cre[:] = cre + dcre
            cim[:] = cim + dcim
            out_z[:, j] = 2.0 * a - 1.0
            out_cre[:, j] = cre
            out_cim[:, j] = cim
            out_i[:, j] = z + dw[:, j] / (sqeg * dt)
            # positivity monitor: rho eigenvalues are 0.5 +/- sqrt(r2)
            r2 = (a - 0.5) * (a - 0.5) + cre * cre + cim * cim
            if np.any(r2 > 0.25 + 1e-8) or np.any(~np.isfinite(r2)):
                return j
    return -1


def pdmp_steps(state, gl, gr, eta, nu, chi, kappa, dt, n_steps, start_step,
               thresholds, thr_ptr, ev_time, ev_kind, ev_ptr,
               out_n, out_x, out_y):
    """Piecewise-deterministic shuttle trajectory for a single trial.

    `state` = [n, x, y, acc] with n in {0, 1} and acc the integrated jump
    intensity since the last jump.  A jump fires when acc crosses the next
    Exp(1) threshold; the jump time is placed inside the step by linear
    interpolation.  The oscillator always advances with the pre-jump charge.

    Returns (status, next_step): 0 = block done, 1 = thresholds exhausted
    (caller refills and re-enters), 2 = exponent overflow at next_step.
    """
    n = state[0]
    x = state[1]
    y = state[2]
    acc = state[3]
    tp = int(thr_ptr[0])
    ep = int(ev_ptr[0])
    j = start_step
    while j < n_steps:
        w = 4.0 * eta * x
        if not (-700.0 <= w <= 700.0):
            state[0] = n; state[1] = x; state[2] = y; state[3] = acc
            thr_ptr[0] = tp; ev_ptr[0] = ep
            return 2, j
        lam = gl * np.exp(-w) if n == 0.0 else gr * np.exp(w)
        xn = x + (nu * y - 0.5 * kappa * x) * dt
        yn = y + (-nu * x - 0.5 * kappa * y + chi * n) * dt
        paused = False
        if acc + lam * dt >= thresholds[tp]:
            frac = (thresholds[tp] - acc) / (lam * dt)
            ev_time[ep] = (j + frac) * dt
            ev_kind[ep] = 0 if n == 0.0 else 1   # 0 = onto dot, 1 = off dot
            ep += 1
            n = 1.0 - n
            acc = 0.0
            tp += 1
            paused = tp >= len(thresholds)
        else:
            acc = acc + lam * dt
        x, y = xn, yn
        out_n[j] = n
        out_x[j] = x
        out_y[j] = y
        j += 1
        if paused:
            state[0] = n; state[1] = x; state[2] = y; state[3] = acc
            thr_ptr[0] = tp; ev_ptr[0] = ep
            return 1, j
    state[0] = n; state[1] = x; state[2] = y; state[3] = acc
    thr_ptr[0] = tp; ev_ptr[0] = ep
    return 0, n_steps
