"""Hot loops: filter-bank programs, 3x3 mixing, and the estimator recursion.

Every kernel has a numba version and a fallback.  The filter bank and the
mixer fall back to vectorized numpy/scipy; the estimator is inherently
sequential and falls back to the same loop run by the interpreter.  The
active implementation is chosen once at import time (see ``_jit``).
"""
import math

import numpy as np
from scipy.signal import lfilter

from ._jit import USE_NUMBA, njit

LOWPASS, LAG, WASHOUT, TIME_WEIGHT, GAIN = 0, 1, 2, 3, 4

EST_FIELDS = (
    "beta2_hat",
    "w",
    "beta2_ft",
    "beta2_ft_ok",
    "sign",
    "beta_hat",
    "beta_hat_ok",
    "omega_hat",
    "w1",
    "w2",
    "omega_ft",
    "omega_ft_ok",
)
GENERATOR_CORRECTED, GENERATOR_PRINTED = 0, 1


def foh_coefficients(lam, dt):
    """Exact first-order-hold discretization of ``x' = -lam x + lam u``.

    With ``u`` linear between samples ``u0`` and ``u1`` over one step,
    ``x1 = e x0 + c0 u0 + c1 u1`` holds exactly.  Returns ``(e, c0, c1)``.
    """
    a = lam * dt
    if a < 0.5:
        # c0 = sum_{n>=2} (-1)^n (n-1) a^{n-1} / n!  (closed form cancels badly)
        c0 = 0.0
        term = 1.0  # a^{n-1}/n! for n=1
        for n in range(2, 30):
            term *= a / n
            c0 += (-1) ** n * (n - 1) * term
    else:
        c0 = (1.0 - math.exp(-a) - a * math.exp(-a)) / a
    one_minus_e = -math.expm1(-a)
    return 1.0 - one_minus_e, c0, one_minus_e - c0


@njit
def relax_factor(x):
    """``(1 - exp(-x)) / x``, equal to 1 at ``x == 0``."""
    if x == 0.0:
        return 1.0
    return -math.expm1(-x) / x


# ---------------------------------------------------------------- filter bank


@njit
def _bank_loop(inputs, t, kind, src, dst, par, ce, c0, c1, n_reg, out_ptr, out_reg, out_coef):
    n_steps, n_in = inputs.shape
    n_ops = kind.shape[0]
    n_out = out_ptr.shape[0] - 1
    reg = np.zeros(n_reg)
    x = np.zeros(n_ops)
    prev = np.zeros(n_ops)
    out = np.empty((n_steps, n_out))
    for k in range(n_steps):
        for j in range(n_in):
            reg[j] = inputs[k, j]
        tk = t[k]
        for i in range(n_ops):
            u = reg[src[i]]
            kd = kind[i]
            if kd <= WASHOUT:
                if k > 0:
                    x[i] = ce[i] * x[i] + c0[i] * prev[i] + c1[i] * u
                prev[i] = u
                if kd == LOWPASS:
                    v = x[i]
                elif kd == LAG:
                    v = x[i] / par[i]
                else:
                    v = par[i] * (u - x[i])
            elif kd == TIME_WEIGHT:
                if par[i] == 1.0:
                    v = tk * u
                else:
                    v = (tk * tk) * u
            else:
                v = par[i] * u
            reg[dst[i]] = v
        for j in range(n_out):
            acc = 0.0
            for q in range(out_ptr[j], out_ptr[j + 1]):
                acc += out_coef[q] * reg[out_reg[q]]
            out[k, j] = acc
    return out


def _bank_vectorized(inputs, t, kind, src, dst, par, ce, c0, c1, n_reg, out_ptr, out_reg, out_coef):
    n_steps, n_in = inputs.shape
    reg = [None] * n_reg
    for j in range(n_in):
        reg[j] = inputs[:, j]
    for i in range(kind.shape[0]):
        u = reg[src[i]]
        kd = kind[i]
        if kd <= WASHOUT:
            # zi makes the first output zero: the filter state starts at rest
            x = lfilter([c1[i], c0[i]], [1.0, -ce[i]], u, zi=[-c1[i] * u[0]])[0]
            if kd == LOWPASS:
                v = x
            elif kd == LAG:
                v = x / par[i]
            else:
                v = par[i] * (u - x)
        elif kd == TIME_WEIGHT:
            v = t * u if par[i] == 1.0 else (t * t) * u
        else:
            v = par[i] * u
        reg[dst[i]] = v
    out = np.empty((n_steps, out_ptr.shape[0] - 1))
    for j in range(out.shape[1]):
        acc = np.zeros(n_steps)
        for q in range(out_ptr[j], out_ptr[j + 1]):
            acc += out_coef[q] * reg[out_reg[q]]
        out[:, j] = acc
    return out


# ---------------------------------------------------------------------- mixing


def _adj3(m):
    """Adjugate and determinant of ``(..., 3, 3)`` arrays by cofactors."""
    a, b, c = m[..., 0, 0], m[..., 0, 1], m[..., 0, 2]
    d, e, f = m[..., 1, 0], m[..., 1, 1], m[..., 1, 2]
    g, h, i = m[..., 2, 0], m[..., 2, 1], m[..., 2, 2]
    adj = np.empty(m.shape)
    adj[..., 0, 0] = e * i - f * h
    adj[..., 0, 1] = c * h - b * i
    adj[..., 0, 2] = b * f - c * e
    adj[..., 1, 0] = f * g - d * i
    adj[..., 1, 1] = a * i - c * g
    adj[..., 1, 2] = c * d - a * f
    adj[..., 2, 0] = d * h - e * g
    adj[..., 2, 1] = b * g - a * h
    adj[..., 2, 2] = a * e - b * d
    det = a * adj[..., 0, 0] + b * adj[..., 1, 0] + c * adj[..., 2, 0]
    return det, adj


def _mix_vectorized(z, psi):
    det, adj = _adj3(psi)
    y = (adj[..., 0] * z[..., None, 0] + adj[..., 1] * z[..., None, 1]) + adj[..., 2] * z[..., None, 2]
    return det, y


@njit
def _mix_loop(z, psi):
    n = z.shape[0]
    det = np.empty(n)
    y = np.empty((n, 3))
    for k in range(n):
        a, b, c = psi[k, 0, 0], psi[k, 0, 1], psi[k, 0, 2]
        d, e, f = psi[k, 1, 0], psi[k, 1, 1], psi[k, 1, 2]
        g, h, i = psi[k, 2, 0], psi[k, 2, 1], psi[k, 2, 2]
        a00 = e * i - f * h
        a01 = c * h - b * i
        a02 = b * f - c * e
        a10 = f * g - d * i
        a11 = a * i - c * g
        a12 = c * d - a * f
        a20 = d * h - e * g
        a21 = b * g - a * h
        a22 = a * e - b * d
        det[k] = a * a00 + b * a10 + c * a20
        z0, z1, z2 = z[k, 0], z[k, 1], z[k, 2]
        y[k, 0] = (a00 * z0 + a01 * z1) + a02 * z2
        y[k, 1] = (a10 * z0 + a11 * z1) + a12 * z2
        y[k, 2] = (a20 * z0 + a21 * z1) + a22 * z2
    return det, y


# ------------------------------------------------------------------ estimator


@njit
def _estimate_loop(delta, y1, y2, reset, dt, gamma, gamma2, eps_w, eps_sign, variant, beta2_init, omega_init):
    n = delta.shape[0]
    out = np.zeros((n, 12))
    b2 = beta2_init
    b2_anchor = beta2_init
    w = 1.0
    om = omega_init
    om_anchor = omega_init
    w1 = 1.0
    w2 = 0.0
    started = False
    sign_held = 0.0
    sum_d = 0.0
    sum_y = 0.0
    for k in range(n):
        dk = delta[k]
        if reset[k]:
            w = 1.0
            b2_anchor = b2
            started = False
            w1 = 1.0
            w2 = 0.0
        # sign recovery with a deadzone relative to the running RMS
        sum_d += dk * dk
        sum_y += y2[k] * y2[k]
        rms_d = math.sqrt(sum_d / (k + 1))
        rms_y = math.sqrt(sum_y / (k + 1))
        if abs(dk) > eps_sign * rms_d and abs(y2[k]) > eps_sign * rms_y:
            s = (1.0 if dk > 0 else -1.0) * (1.0 if y2[k] > 0 else -1.0)
            sign_held = s
        b2ft_ok = (1.0 - w) > eps_w
        b2ft = (b2 - b2_anchor * w) / (1.0 - w) if b2ft_ok else 0.0
        bh_ok = b2ft_ok and sign_held != 0.0
        bh = math.sqrt(max(0.0, b2ft)) * sign_held if bh_ok else 0.0
        omft_ok = started and bh_ok and (1.0 - w1) > eps_w
        omft = (om - w1 * om_anchor - w2) / (1.0 - w1) if omft_ok else 0.0
        out[k, 0] = b2
        out[k, 1] = w
        out[k, 2] = b2ft
        out[k, 3] = 1.0 if b2ft_ok else 0.0
        out[k, 4] = sign_held
        out[k, 5] = bh
        out[k, 6] = 1.0 if bh_ok else 0.0
        out[k, 7] = om
        out[k, 8] = w1
        out[k, 9] = w2
        out[k, 10] = omft
        out[k, 11] = 1.0 if omft_ok else 0.0

        # advance t_k -> t_k + dt with coefficients frozen over the step
        x = gamma * dk * dk * dt
        b2 = b2 + gamma * dt * relax_factor(x) * dk * (y1[k] - dk * b2)
        w = w * math.exp(-x)
        if bh_ok:
            if not started:
                started = True
                om_anchor = om
                w1 = 1.0
                w2 = 0.0
            a = gamma2 * dk * dk * bh * bh
            xa = a * dt
            ea = math.exp(-xa)
            forcing = bh + gamma2 * dk * bh * y2[k]
            om = om + (forcing - a * om) * dt * relax_factor(xa)
            if variant == GENERATOR_CORRECTED:
                w2 = ea * w2 + bh * w1 * dt * ea
                w1 = w1 * ea
            else:
                a1 = gamma2 * dk * dk * bh
                diff = a - a1
                if abs(diff * dt) < 1e-8:
                    integral = dt * ea
                else:
                    integral = (math.exp(-a1 * dt) - ea) / diff
                w2 = ea * w2 + w1 * integral
                w1 = w1 * math.exp(-a1 * dt)
    return out


# ------------------------------------------------------------------ dispatch

bank_numba = _bank_loop
bank_numpy = _bank_vectorized
mix_numba = _mix_loop
mix_numpy = _mix_vectorized
estimate_numba = _estimate_loop
estimate_python = _estimate_loop.py_func

run_bank = bank_numba if USE_NUMBA else bank_numpy
mix_series = mix_numba if USE_NUMBA else mix_numpy
estimate_series = estimate_numba if USE_NUMBA else estimate_python
