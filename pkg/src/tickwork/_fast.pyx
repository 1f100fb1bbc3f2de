# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Cython implementations of the hot inner loops.

Mirrors `tickwork._reference` function for function with identical
arithmetic (same operation order; built with -ffp-contract=off so the
compiler cannot fuse multiply-adds).  See that module for the contracts.
"""

from libc.math cimport cos, exp, fabs, isfinite, tanh

import numpy as np


def pendulum_block(double[:] x, double[:] y, double gamma, double mu,
                   double spsi, double cpsi, double namp, double dt,
                   double[:, :] dw, double[:, :] out_x, double[:, :] out_y,
                   double[:, :] out_k):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t nb = dw.shape[1]
    cdef Py_ssize_t i, j
    cdef double xi, yi, arg, k, xn, yn
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            xi = x[i]
            yi = y[i]
            f = -1
            for j in range(nb):
                arg = spsi * xi - cpsi * yi
                if arg > 0.0:
                    k = -mu
                elif arg < 0.0:
                    k = mu
                else:
                    k = 0.0
                xn = xi + yi * dt
                yn = yi + ((-xi - gamma * yi + k) * dt + namp * dw[i, j])
                xi = xn
                yi = yn
                out_x[i, j] = xi
                out_y[i, j] = yi
                out_k[i, j] = k
                if f < 0 and not (isfinite(xi) and isfinite(yi)):
                    f = j
                    break
            x[i] = xi
            y[i] = yi
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def phase_block(double[:] psi, double omega, double s, double mu,
                double psi0, double dt, double[:, :] dw,
                double[:, :] out_psi, double[:, :] out_k):
    cdef Py_ssize_t m = psi.shape[0]
    cdef Py_ssize_t nb = dw.shape[1]
    cdef Py_ssize_t i, j
    cdef double p, c
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            p = psi[i]
            f = -1
            for j in range(nb):
                p = p + (-omega * dt + s * dw[i, j])
                c = cos(p + psi0)
                out_psi[i, j] = p
                if c > 0.0:
                    out_k[i, j] = -mu
                elif c < 0.0:
                    out_k[i, j] = mu
                else:
                    out_k[i, j] = 0.0
                if f < 0 and not isfinite(p):
                    f = j
                    break
            psi[i] = p
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def quartz_block(double[:] v, double[:] x, double[:] y, double gamma,
                 double eta, double beta, double omega, double kappa,
                 double chi, double namp, double dt, double[:, :] dw,
                 double[:, :] out_v, double[:, :] out_x, double[:, :] out_y):
    cdef Py_ssize_t m = v.shape[0]
    cdef Py_ssize_t nb = dw.shape[1]
    cdef Py_ssize_t i, j
    cdef double vi, xi, yi, tb, g, ex, vn, xn, yn
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            vi = v[i]
            xi = x[i]
            yi = y[i]
            f = -1
            for j in range(nb):
                tb = tanh(beta * vi)
                g = (vi + tb) / (1.0 + vi * tb)
                ex = exp(eta * xi)
                vn = vi + (gamma * (1.0 - g) / ex - gamma * (1.0 + g) * ex) * dt
                xn = xi + omega * yi * dt
                yn = yi + ((-omega * xi - kappa * yi + chi * vi) * dt
                           + namp * dw[i, j])
                vi = vn
                xi = xn
                yi = yn
                out_v[i, j] = vi
                out_x[i, j] = xi
                out_y[i, j] = yi
                if f < 0 and not (isfinite(vi) and isfinite(xi)
                                  and isfinite(yi)):
                    f = j
                    break
            v[i] = vi
            x[i] = xi
            y[i] = yi
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def semiclassical_block(double[:] are, double[:] aim, double eps,
                        double delta, double chik, double gain, double ns,
                        double kappa, double dither, double dt,
                        double[:, :] dw_re, double[:, :] dw_im,
                        double[:, :] out_re, double[:, :] out_im):
    cdef Py_ssize_t m = are.shape[0]
    cdef Py_ssize_t nb = out_re.shape[1]
    cdef Py_ssize_t i, j
    cdef double re, im, n2, sat, det, dre, dim
    cdef bint noisy = dither != 0.0
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            re = are[i]
            im = aim[i]
            f = -1
            for j in range(nb):
                n2 = re * re + im * im
                sat = 0.5 * kappa * (1.0 - gain * ns / (kappa * (n2 + ns)))
                det = delta + chik * n2
                dre = (det * im - sat * re) * dt
                dim = (-eps - det * re - sat * im) * dt
                if noisy:
                    dre = dre + dither * dw_re[i, j]
                    dim = dim + dither * dw_im[i, j]
                re = re + dre
                im = im + dim
                out_re[i, j] = re
                out_im[i, j] = im
                if f < 0 and not (isfinite(re) and isfinite(im)):
                    f = j
                    break
            are[i] = re
            aim[i] = im
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def shuttle_ode_block(double[:] n, double[:] x, double[:] y, double gl,
                      double gr, double eta, double nu, double chi,
                      double kappa, double dt, double[:, :] out_n,
                      double[:, :] out_x, double[:, :] out_y):
    cdef Py_ssize_t m = n.shape[0]
    cdef Py_ssize_t nb = out_n.shape[1]
    cdef Py_ssize_t i, j
    cdef double ni, xi, yi, w, a, b, neq, nn, xn, yn
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            ni = n[i]
            xi = x[i]
            yi = y[i]
            f = -1
            for j in range(nb):
                w = 4.0 * eta * xi
                if fabs(w) > 700.0 or not isfinite(w):
                    f = j
                    break
                a = gl * exp(-w)
                b = a + gr * exp(w)
                neq = a / b
                nn = neq + (ni - neq) * exp(-b * dt)
                xn = xi + (nu * yi - 0.5 * kappa * xi) * dt
                yn = yi + (-nu * xi - 0.5 * kappa * yi + chi * ni) * dt
                ni = nn
                xi = xn
                yi = yn
                out_n[i, j] = ni
                out_x[i, j] = xi
                out_y[i, j] = yi
                if f < 0 and not (isfinite(xi) and isfinite(yi)):
                    f = j
                    break
            n[i] = ni
            x[i] = xi
            y[i] = yi
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def sme_block(double[:] a, double[:] cre, double[:] cim, double omega,
              double gdown, double gup, double bigGam, double sqeg,
              double dt, double[:, :] dw, double[:, :] out_z,
              double[:, :] out_cre, double[:, :] out_cim,
              double[:, :] out_i):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t nb = dw.shape[1]
    cdef Py_ssize_t i, j
    cdef double ai, ri, mi, z, da, fac, dre, dim, r2
    cdef Py_ssize_t fail = -1, f
    with nogil:
        for i in range(m):
            ai = a[i]
            ri = cre[i]
            mi = cim[i]
            f = -1
            for j in range(nb):
                z = 2.0 * ai - 1.0
                da = (-gdown * ai + gup * (1.0 - ai)) * dt \
                    + sqeg * (2.0 * ai * (1.0 - z)) * dw[i, j]
                fac = (-0.5 * (gdown + gup) - 2.0 * bigGam) * dt \
                    - sqeg * 2.0 * z * dw[i, j]
                dre = ri * fac + 2.0 * omega * mi * dt
                dim = mi * fac - 2.0 * omega * ri * dt
                ai = ai + da
                ri = ri + dre
                mi = mi + dim
                out_z[i, j] = 2.0 * ai - 1.0
                out_cre[i, j] = ri
                out_cim[i, j] = mi
                out_i[i, j] = z + dw[i, j] / (sqeg * dt)
                r2 = (ai - 0.5) * (ai - 0.5) + ri * ri + mi * mi
                if f < 0 and (r2 > 0.25 + 1e-8 or not isfinite(r2)):
                    f = j
                    break
            a[i] = ai
            cre[i] = ri
            cim[i] = mi
            if f >= 0 and (fail < 0 or f < fail):
                fail = f
    return fail


def pdmp_steps(double[:] state, double gl, double gr, double eta, double nu,
               double chi, double kappa, double dt, Py_ssize_t n_steps,
               Py_ssize_t start_step, double[:] thresholds, long long[:] thr_ptr,
               double[:] ev_time, long long[:] ev_kind, long long[:] ev_ptr,
               double[:] out_n, double[:] out_x, double[:] out_y):
    cdef double n = state[0]
    cdef double x = state[1]
    cdef double y = state[2]
    cdef double acc = state[3]
    cdef Py_ssize_t tp = <Py_ssize_t> thr_ptr[0]
    cdef Py_ssize_t ep = <Py_ssize_t> ev_ptr[0]
    cdef Py_ssize_t n_thr = thresholds.shape[0]
    cdef Py_ssize_t j = start_step
    cdef double w, lam, xn, yn, frac
    cdef bint paused
    cdef int status = 0
    with nogil:
        while j < n_steps:
            w = 4.0 * eta * x
            if not (-700.0 <= w <= 700.0):
                status = 2
                break
            if n == 0.0:
                lam = gl * exp(-w)
            else:
                lam = gr * exp(w)
            xn = x + (nu * y - 0.5 * kappa * x) * dt
            yn = y + (-nu * x - 0.5 * kappa * y + chi * n) * dt
            paused = False
            if acc + lam * dt >= thresholds[tp]:
                frac = (thresholds[tp] - acc) / (lam * dt)
                ev_time[ep] = (j + frac) * dt
                ev_kind[ep] = 0 if n == 0.0 else 1
                ep += 1
                n = 1.0 - n
                acc = 0.0
                tp += 1
                paused = tp >= n_thr
            else:
                acc = acc + lam * dt
            x = xn
            y = yn
            out_n[j] = n
            out_x[j] = x
            out_y[j] = y
            j += 1
            if paused:
                status = 1
                break
    state[0] = n
    state[1] = x
    state[2] = y
    state[3] = acc
    thr_ptr[0] = tp
    ev_ptr[0] = ep
    return status, j
