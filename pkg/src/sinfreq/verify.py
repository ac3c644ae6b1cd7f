"""Built-in identity checks run by ``sinfreq verify``."""
import math
from dataclasses import dataclass

import numpy as np

from . import drem
from .regressor import RegressorBank, check_swapping_lemma, regression_residual
from .signal_gen import SignalSpec, beta_at, check_eq4, omega_true, sample, analytic_derivatives

REFERENCE_SIGNAL = SignalSpec.linear_chirp(2.0, 1.0, 1.0, 0.05)
REFERENCE_LAMBDAS = (1.0, 2.0, 3.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def random_specs(n, seed=0):
    rng = np.random.default_rng(seed)
    return [
        SignalSpec.linear_chirp(
            rng.uniform(0.5, 5), rng.uniform(0, 2 * np.pi), rng.uniform(0.5, 5), rng.uniform(-0.2, 0.2)
        )
        for _ in range(n)
    ]


def eq4_sweep(n_specs=100, seed=0, tol=1e-9):
    t = np.linspace(0.1, 29.9, 2000)
    worst = 0.0
    for spec in random_specs(n_specs, seed):
        yddd = analytic_derivatives(spec, t)[3]
        worst = max(worst, float(np.max(np.abs(check_eq4(spec, t)) / (1 + np.abs(yddd)))))
    return CheckResult("third-derivative identity", worst <= tol, f"max rel residual {worst:.2e} (tol {tol:g})")


def swapping_lemma_suite(spec=REFERENCE_SIGNAL, lambdas=REFERENCE_LAMBDAS, horizon=30.0, dt=1e-3, tol=0.01, min_ratio=1.8):
    parts, ok = [], True
    for lam in lambdas:
        d1, m1 = check_swapping_lemma(lam, spec, horizon, dt)
        d2, _ = check_swapping_lemma(lam, spec, horizon, dt / 2)
        ratio = d1 / d2 if d2 > 0 else math.inf
        ok &= d1 <= tol * m1 and ratio >= min_ratio
        parts.append(f"lam={lam:g}: {d1 / m1:.2e} of max|LHS|, x{ratio:.2f} at dt/2")
    return CheckResult("swapping lemma", bool(ok), "; ".join(parts))


def regression_rms(spec, lambdas, dt, horizon, t_from):
    """Per-lambda ``RMS(residual) / RMS(Z)`` over ``[t_from, horizon]``."""
    t = np.arange(int(round(horizon / dt)) + 1) * dt
    regs = RegressorBank(lambdas).run(sample(spec, t), t)
    r = regression_residual(regs, beta_at(spec, t)[:, None], omega_true(spec, t)[:, None])
    m = t >= t_from
    return np.sqrt(np.mean(r[m] ** 2, axis=0)) / np.sqrt(np.mean(regs[m, :, 0] ** 2, axis=0))


def settle_time(lambdas):
    """Start of the window free of start-up transients: 20 slowest time constants."""
    return 20.0 / min(lambdas)


def regression_identity(spec=REFERENCE_SIGNAL, lambdas=REFERENCE_LAMBDAS, dt=1e-3, horizon=30.0, t_from=None, tol=0.02):
    t_from = settle_time(lambdas) if t_from is None else t_from
    r1 = regression_rms(spec, lambdas, dt, horizon, t_from)
    r2 = regression_rms(spec, lambdas, dt / 2, horizon, t_from)
    ok = bool(np.all(r1 <= tol) and np.all(r2 < r1))
    detail = ", ".join(f"lam={lam:g}: {a:.2e} -> {b:.2e}" for lam, a, b in zip(lambdas, r1, r2))
    return CheckResult(f"regression identity on t>={t_from:g}s", ok, detail + " (dt -> dt/2)")


def adjugate_oracle(n=1000, seed=0, tol_adj=1e-12, tol_solve=1e-10):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, 3, 3))
    z = rng.standard_normal((n, 3))
    adj = drem.adjugate(m)
    det = drem.det3(m)
    prod = adj @ m
    scale = np.abs(adj).max(axis=(1, 2)) * np.abs(m).max(axis=(1, 2))
    err_adj = float(np.max(np.abs(prod - det[:, None, None] * np.eye(3)).max(axis=(1, 2)) / scale))
    d, y = drem.mix_series(np.concatenate([z[:, :, None], m], axis=2))
    x = np.linalg.solve(m, z[:, :, None])[:, :, 0]
    err_solve = float(np.max(np.abs(y / d[:, None] - x).max(axis=1) / np.abs(x).max(axis=1)))
    ok = err_adj <= tol_adj and err_solve <= tol_solve
    return CheckResult("adjugate mixing", ok, f"adj*M-det*I {err_adj:.1e}, Y/det vs solve {err_solve:.1e}")


def run_all():
    return [eq4_sweep(), swapping_lemma_suite(), regression_identity(), adjugate_oracle()]
