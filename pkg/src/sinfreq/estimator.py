"""Finite-time estimation of beta and w from the mixed scalar regressions.

The mixer yields ``Delta beta^2 = Y1`` and ``Delta beta w = Y2``.  A gradient
estimator for ``beta^2`` runs alongside the decaying scalar
``w = exp(-gamma int Delta^2)``, so the true value can be recovered as
``(b2(t) - b2(0) w) / (1 - w)`` as soon as ``w < 1``.  The same idea applied
to the frequency observer

    w_hat' = beta_hat + gamma2 Delta beta_hat (Y2 - Delta beta_hat w_hat)

needs two generators,

    w1' = -a w1,  w1(0) = 1
    w2' = -a w2 + beta_hat w1,  w2(0) = 0,   a = gamma2 Delta^2 beta_hat^2

for which ``e = w_hat - w1 w_hat(0) - w2 - (1 - w1) w`` obeys ``e' = -a e``
with ``e(0) = 0``.  All scalar ODEs are advanced with the exact solution of
the step-frozen linear equation, so huge gains stay stable at any step.

Unavailable estimates are reported as ``None``.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, NumericalError

GENERATOR_VARIANTS = {"corrected": kernels.GENERATOR_CORRECTED, "printed": kernels.GENERATOR_PRINTED}


@dataclass(frozen=True)
class EstimatorConfig:
    gamma: float = 1e5
    gamma2: float = 1e5
    epsilon_w: float = 1e-6
    epsilon_sign: float = 1e-3
    # "printed" uses w1' = -gamma2 Delta^2 beta_hat w1 and w2' = -a w2 + w1
    generator_variant: str = "corrected"
    beta2_init: float = 0.0
    omega_init: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.gamma2 > 0):
            raise ConfigurationError("gamma and gamma2 must be positive")
        if not 0 < self.epsilon_w < 1:
            raise ConfigurationError("epsilon_w must lie in (0, 1)")
        if not self.epsilon_sign >= 0:
            raise ConfigurationError("epsilon_sign must be non-negative")
        if self.generator_variant not in GENERATOR_VARIANTS:
            raise ConfigurationError(f"generator_variant must be one of {sorted(GENERATOR_VARIANTS)}")


@dataclass
class EstimatorState:
    beta2_hat: float = 0.0
    w: float = 1.0
    omega_hat: float = 0.0
    w1: float = 1.0
    w2: float = 0.0
    # values the finite-time quotients are anchored to (start of the window)
    beta2_anchor: float = 0.0
    omega_anchor: float = 0.0
    observer_started: bool = False
    sign: int = 0
    _sum_delta2: float = 0.0
    _sum_y2sq: float = 0.0
    _count: int = 0

    @classmethod
    def initial(cls, cfg):
        return cls(
            beta2_hat=cfg.beta2_init,
            beta2_anchor=cfg.beta2_init,
            omega_hat=cfg.omega_init,
            omega_anchor=cfg.omega_init,
        )

    def reset_window(self):
        """Restart the finite-time windows, keeping the integrator states."""
        self.w = 1.0
        self.beta2_anchor = self.beta2_hat
        self.observer_started = False
        self.w1 = 1.0
        self.w2 = 0.0


def _finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise NumericalError(f"non-finite estimator input {v}")


def step_beta2(state, delta, y1, cfg, dt):
    """Advance ``b2' = gamma Delta (Y1 - Delta b2)`` and ``w' = -gamma Delta^2 w``."""
    _finite(delta, y1)
    x = cfg.gamma * delta * delta * dt
    state.beta2_hat = state.beta2_hat + cfg.gamma * dt * kernels.relax_factor(x) * delta * (y1 - delta * state.beta2_hat)
    state.w = state.w * math.exp(-x)
    return state


def ft_beta2(state, cfg):
    if 1.0 - state.w > cfg.epsilon_w:
        return (state.beta2_hat - state.beta2_anchor * state.w) / (1.0 - state.w)
    return None


def sign_beta(delta, y2, cfg, state=None):
    """``sign(Delta) * sign(Y2)``, or 0 inside the deadzone.

    With a ``state`` the deadzone is relative to the running RMS of each
    factor and the last decided sign is held in ``state.sign``.
    """
    if state is None:
        rms_d, rms_y = abs(delta), abs(y2)
    else:
        state._count += 1
        state._sum_delta2 += delta * delta
        state._sum_y2sq += y2 * y2
        rms_d = math.sqrt(state._sum_delta2 / state._count)
        rms_y = math.sqrt(state._sum_y2sq / state._count)
    if abs(delta) > cfg.epsilon_sign * rms_d and abs(y2) > cfg.epsilon_sign * rms_y:
        s = (1 if delta > 0 else -1) * (1 if y2 > 0 else -1)
    else:
        s = 0
    if state is not None and s != 0:
        state.sign = s
    return s


def beta_hat(state, cfg):
    b2 = ft_beta2(state, cfg)
    if b2 is None or state.sign == 0:
        return None
    return math.sqrt(max(0.0, b2)) * state.sign


def step_omega(state, delta, y2, beta_hat, cfg, dt):
    """Advance the frequency observer and its two generators by one step.

    ``beta_hat=None`` holds the observer (no feed-forward, no gain) and keeps
    the generators idle; they start on the first step with an estimate.
    """
    _finite(delta, y2)
    if beta_hat is None:
        return state
    if not state.observer_started:
        state.observer_started = True
        state.omega_anchor = state.omega_hat
        state.w1, state.w2 = 1.0, 0.0
    a = cfg.gamma2 * delta * delta * beta_hat * beta_hat
    xa = a * dt
    ea = math.exp(-xa)
    forcing = beta_hat + cfg.gamma2 * delta * beta_hat * y2
    state.omega_hat = state.omega_hat + (forcing - a * state.omega_hat) * dt * kernels.relax_factor(xa)
    if cfg.generator_variant == "corrected":
        state.w2 = ea * state.w2 + beta_hat * state.w1 * dt * ea
        state.w1 = state.w1 * ea
    else:
        a1 = cfg.gamma2 * delta * delta * beta_hat
        diff = a - a1
        integral = dt * ea if abs(diff * dt) < 1e-8 else (math.exp(-a1 * dt) - ea) / diff
        state.w2 = ea * state.w2 + state.w1 * integral
        state.w1 = state.w1 * math.exp(-a1 * dt)
    return state


def omega_quotient(state, cfg):
    """The finite-time frequency quotient, guarded only by ``1 - w1``."""
    if 1.0 - state.w1 > cfg.epsilon_w:
        return (state.omega_hat - state.w1 * state.omega_anchor - state.w2) / (1.0 - state.w1)
    return None


def ft_omega(state, cfg):
    if not state.observer_started or beta_hat(state, cfg) is None:
        return None
    return omega_quotient(state, cfg)


@dataclass(frozen=True)
class Estimate:
    beta2_hat: float
    w: float
    beta2_ft: float | None
    sign: int
    beta_hat: float | None
    omega_hat: float
    w1: float
    w2: float
    omega_ft: float | None


class Estimator:
    """Sample-by-sample driver: report estimates at ``t``, then advance to ``t + dt``."""

    def __init__(self, cfg=None):
        self.cfg = cfg or EstimatorConfig()
        self.state = EstimatorState.initial(self.cfg)

    def update(self, delta, y_mixed, dt, reset=False):
        st, cfg = self.state, self.cfg
        if reset:
            st.reset_window()
        y1, y2 = float(y_mixed[0]), float(y_mixed[1])
        sign_beta(delta, y2, cfg, st)
        bh = beta_hat(st, cfg)
        est = Estimate(st.beta2_hat, st.w, ft_beta2(st, cfg), st.sign, bh, st.omega_hat, st.w1, st.w2, ft_omega(st, cfg))
        step_beta2(st, delta, y1, cfg, dt)
        step_omega(st, delta, y2, bh, cfg, dt)
        return est


def run_estimator(delta, y_mixed, dt, cfg=None, reset=None, backend=None):
    """Batch run over whole series; returns ``{field: array}`` (see ``kernels.EST_FIELDS``).

    Availability is reported in the ``*_ok`` fields; unavailable values are 0.
    """
    cfg = cfg or EstimatorConfig()
    delta = np.ascontiguousarray(delta, dtype=float)
    y_mixed = np.asarray(y_mixed, dtype=float)
    n = delta.shape[0]
    reset = np.zeros(n, dtype=np.bool_) if reset is None else np.ascontiguousarray(reset, dtype=np.bool_)
    fn = backend or kernels.estimate_series
    out = fn(
        delta,
        np.ascontiguousarray(y_mixed[:, 0]),
        np.ascontiguousarray(y_mixed[:, 1]),
        reset,
        float(dt),
        float(cfg.gamma),
        float(cfg.gamma2),
        float(cfg.epsilon_w),
        float(cfg.epsilon_sign),
        GENERATOR_VARIANTS[cfg.generator_variant],
        float(cfg.beta2_init),
        float(cfg.omega_init),
    )
    return {name: out[:, j] for j, name in enumerate(kernels.EST_FIELDS)}
