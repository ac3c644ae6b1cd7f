"""Filtered regression ``Z = beta^2 Psi1 + beta*w Psi2 + w^2 Psi3`` for one lambda.

``w`` here is the instantaneous frequency ``w(t)``.  All chains are fed by
the raw samples ``y``; with ``F = lam/(p+lam)``, ``L = 1/(p+lam)`` and
``W = lam p/(p+lam)``::

    Z    = W W W [y]
    Psi1 = - F F [t^2 W[y]]  + 2 F F L [t W[y]]  + 6 L [t S3]
           - 6 F F F [t y]   + 18 F F F L [y]    - 30 L L S3
    Psi2 = - 6 F F F [y]     - 2 t S3            + 12 L S3
    Psi3 = - S3,             S3 = W F F [y] = lam^3 p/(p+lam)^3 [y]

The ``-30 L L S3`` term (``lam^3 p/(p+lam)^5``) carries a ``beta^2`` factor
and belongs to ``Psi1``; without it the identity is off by
``30 beta^2 lam^3 p/(p+lam)^5 [y]``.  The identity holds up to start-up
transients that decay like ``t^4 exp(-lam t)``, because the chains start at
rest while ``y`` and its derivatives do not vanish at ``t = 0``.
"""
from dataclasses import dataclass

import numpy as np

from . import lti_filters as lf
from .errors import ConfigurationError, NumericalError
from .signal_gen import beta_at, omega_true, sample

CHANNEL_OUTPUTS = ("z", "psi1", "psi2", "psi3")


@dataclass(frozen=True)
class ChannelOutputs:
    z: float
    psi1: float
    psi2: float
    psi3: float
    t: float

    def as_array(self):
        return np.array([self.z, self.psi1, self.psi2, self.psi3])


def _add_channel(net, lam, prefix="", source="y"):
    """Wire one lambda's pipelines into ``net``; shared sub-chains exist once."""
    F, L, W = lf.lowpass, lf.lag, lf.washout
    p = prefix

    def add(name, src, nodes):
        net.add(p + name, src if src == source else p + src, nodes)

    add("w1", source, [W(lam)])
    add("zc", "w1", [W(lam), W(lam)])
    add("s3", "w1", [F(lam), F(lam)])
    add("s4", "s3", [L(lam)])
    add("s5", "s4", [L(lam)])
    add("f3", source, [F(lam), F(lam), F(lam)])
    add("f3l", "f3", [L(lam)])
    add("a", "w1", [lf.time_weight(2), F(lam), F(lam)])
    add("b", "w1", [lf.time_weight(1), F(lam), F(lam), L(lam)])
    add("ts3", "s3", [lf.time_weight(1)])  # t S3, used by Psi1 and Psi2
    add("c", "ts3", [L(lam)])
    add("d", source, [lf.time_weight(1), F(lam), F(lam), F(lam)])

    net.combine(p + "z", {p + "zc": 1.0})
    net.combine(
        p + "psi1",
        {p + "a": -1.0, p + "b": 2.0, p + "c": 6.0, p + "d": -6.0, p + "f3l": 18.0, p + "s5": -30.0},
    )
    net.combine(p + "psi2", {p + "f3": -6.0, p + "ts3": -2.0, p + "s4": 12.0})
    net.combine(p + "psi3", {p + "s3": -1.0})


def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0 or not np.isfinite(lam):
        raise ConfigurationError(f"lambda must be positive and finite, got {lam}")
    return lam


class RegressorChannel:
    """Streaming realization of the four regression signals for one lambda."""

    def __init__(self, lam):
        self.lam = _check_lambda(lam)
        self.network = lf.FilterNetwork(["y"])
        _add_channel(self.network, self.lam)
        self.latest = None

    def reset(self):
        self.network.reset()
        self.latest = None

    def advance(self, y, t):
        """Consume the sample ``y`` taken at ``t``; return the outputs at ``t``."""
        if not np.isfinite(y):
            raise NumericalError(f"non-finite sample {y} at t={t}")
        out = self.network.step({"y": float(y)}, t)
        self.latest = ChannelOutputs(out["z"], out["psi1"], out["psi2"], out["psi3"], t)
        return self.latest


def make_channel(lam):
    return RegressorChannel(lam)


class RegressorBank:
    """All lambda channels compiled into one filter program for batch runs."""

    def __init__(self, lambdas):
        self.lambdas = tuple(_check_lambda(v) for v in lambdas)
        self.network = lf.FilterNetwork(["y"])
        for i, lam in enumerate(self.lambdas):
            _add_channel(self.network, lam, prefix=f"l{i}_")

    def run(self, y, t, backend=None):
        """Return an ``(N, n_lambda, 4)`` array ordered ``(Z, Psi1, Psi2, Psi3)``."""
        out = self.network.run({"y": y}, t, backend=backend)
        n = len(self.lambdas)
        res = np.empty((len(t), n, 4))
        for i in range(n):
            for j, name in enumerate(CHANNEL_OUTPUTS):
                res[:, i, j] = out[f"l{i}_{name}"]
        return res


def channel_series(y, t, lam, backend=None):
    """Batch version of :class:`RegressorChannel` for one lambda: ``(N, 4)``."""
    return RegressorBank([lam]).run(y, t, backend=backend)[:, 0, :]


def regression_residual(outputs, beta, omega):
    """``Z - beta^2 Psi1 - beta w Psi2 - w^2 Psi3`` for ``(..., 4)`` outputs."""
    z, p1, p2, p3 = (outputs[..., j] for j in range(4))
    return z - beta**2 * p1 - beta * omega * p2 - omega**2 * p3


def check_swapping_lemma(lam, spec, horizon, dt):
    """Max deviation between both sides of the swapping identity with ``x = w(t)``.

    ``F[x y] = x F[y] - L[x' F[y]]`` with ``F = lam/(p+lam)``, ``L = 1/(p+lam)``
    and ``x' = beta``.  The two sides run as independent cascades.  Returns
    ``(max |LHS - RHS|, max |LHS|)``.
    """
    lam = _check_lambda(lam)
    t = np.arange(int(round(horizon / dt)) + 1) * dt
    y = sample(spec, t)
    x = omega_true(spec, t)
    xdot = beta_at(spec, t)
    lhs = lf.FilterGraph([lf.lowpass(lam)]).run(x * y, t)
    fy = lf.FilterGraph([lf.lowpass(lam)]).run(y, t)
    # x' stays inside the lag so piecewise rates are handled exactly
    correction = lf.FilterGraph([lf.lag(lam)]).run(xdot * fy, t)
    rhs = x * fy - correction
    return float(np.max(np.abs(lhs - rhs))), float(np.max(np.abs(lhs)))
