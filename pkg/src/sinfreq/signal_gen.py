"""Ground-truth sinusoid with a piecewise-linear frequency.

The model is ``y(t) = A sin(w(t) t + phi)`` where ``w`` has a constant rate
``beta_i`` on each half-open segment ``[t_i, t_{i+1})``.  Note the phase
argument is ``w(t) * t``, not the integral of ``w``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class SignalSpec:
    """Amplitude, phase, initial frequency and frequency-rate schedule.

    ``rate_segments`` is a sequence of ``(t_start, beta)`` pairs with strictly
    increasing ``t_start`` beginning at 0.  A zero amplitude is accepted as a
    degenerate (silent) signal.
    """

    amplitude: float
    phase: float
    omega0: float
    rate_segments: tuple = ((0.0, 0.0),)

    def __post_init__(self):
        segs = tuple((float(t0), float(b)) for t0, b in self.rate_segments)
        object.__setattr__(self, "rate_segments", segs)
        for name in ("amplitude", "phase", "omega0"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise ConfigurationError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if self.amplitude < 0:
            raise ConfigurationError(f"amplitude must be >= 0, got {self.amplitude}")
        if not segs:
            raise ConfigurationError("rate_segments must not be empty")
        if segs[0][0] != 0.0:
            raise ConfigurationError("first rate segment must start at t=0")
        starts = [s[0] for s in segs]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ConfigurationError("rate segment starts must be strictly increasing")
        if not all(np.isfinite(s[0]) and np.isfinite(s[1]) for s in segs):
            raise ConfigurationError("rate segments must be finite")

    @classmethod
    def linear_chirp(cls, amplitude, phase, omega0, beta):
        return cls(amplitude, phase, omega0, ((0.0, beta),))

    @property
    def switch_times(self):
        """Segment boundaries after t=0."""
        return tuple(s[0] for s in self.rate_segments[1:])

    def _tables(self):
        starts = np.array([s[0] for s in self.rate_segments])
        betas = np.array([s[1] for s in self.rate_segments])
        # w at each segment start
        w_start = self.omega0 + np.concatenate(([0.0], np.cumsum(betas[:-1] * np.diff(starts))))
        return starts, betas, w_start


def _as_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("time must be finite and >= 0")
    return arr


def _segment_index(spec, t):
    starts, _, _ = spec._tables()
    return np.searchsorted(starts, t, side="right") - 1


def beta_at(spec, t):
    """Frequency rate in force at ``t`` (right-continuous at switches)."""
    t = _as_time(t)
    _, betas, _ = spec._tables()
    out = betas[_segment_index(spec, t)]
    return float(out) if out.ndim == 0 else out


def omega_true(spec, t):
    """Instantaneous frequency ``w(t)``, exact segment by segment."""
    t = _as_time(t)
    starts, betas, w_start = spec._tables()
    i = _segment_index(spec, t)
    out = w_start[i] + betas[i] * (t - starts[i])
    return float(out) if out.ndim == 0 else out


def sample(spec, t):
    """Signal value ``A sin(w(t) t + phi)``."""
    t = _as_time(t)
    out = spec.amplitude * np.sin(omega_true(spec, t) * t + spec.phase)
    return float(out) if np.ndim(out) == 0 else out


def _check_interior(spec, t):
    for ts in spec.switch_times:
        if np.any(t == ts):
            raise DomainError(f"derivatives are undefined at the rate switch t={ts}")


def analytic_derivatives(spec, t):
    """Closed-form ``(y, y', y'', y''')`` inside a rate segment.

    With ``theta = w t + phi`` and ``s = w + beta t``::

        y'   =  A cos(theta) s
        y''  = -A sin(theta) s^2 + 2 beta A cos(theta)
        y''' = -A cos(theta) s^3 - 6 beta A sin(theta) s
    """
    t = _as_time(t)
    _check_interior(spec, t)
    a = spec.amplitude
    w = omega_true(spec, t)
    b = beta_at(spec, t)
    theta = w * t + spec.phase
    s = w + b * t
    sn, cs = np.sin(theta), np.cos(theta)
    y = a * sn
    yd = a * cs * s
    ydd = -a * sn * s**2 + 2.0 * b * a * cs
    yddd = -a * cs * s**3 - 6.0 * b * a * sn * s
    return y, yd, ydd, yddd


def check_eq4(spec, t):
    """Residual of the third-derivative identity expressed through ``y`` and ``y'``.

    ``y''' = -b^2 t^2 y' - 6 b^2 t y - 2 b w t y' - 6 b w y - w^2 y'`` with the
    instantaneous ``w = w(t)``.
    """
    y, yd, _, yddd = analytic_derivatives(spec, t)
    t = np.asarray(t, dtype=float)
    w = omega_true(spec, t)
    b = beta_at(spec, t)
    rhs = -(b**2) * t**2 * yd - 6 * b**2 * t * y - 2 * b * w * t * yd - 6 * b * w * y - w**2 * yd
    return yddd - rhs
