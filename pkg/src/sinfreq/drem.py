"""Stack three filtered regressions and decouple them by adjugate mixing.

With ``Z = Psi Sigma`` and ``Sigma = (beta^2, beta w, w^2)``, multiplying by
``adj(Psi)`` gives ``det(Psi) Sigma = adj(Psi) Z``: three scalar regressions
sharing the regressor ``Delta = det(Psi)``.  Nothing here divides by Delta.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericalError, SynchronizationError


@dataclass(frozen=True)
class RegressionSnapshot:
    z: np.ndarray  # (3,)
    psi: np.ndarray  # (3, 3), row i from channel lambda_i
    t: float


@dataclass(frozen=True)
class DremOutput:
    delta: float
    y_mixed: np.ndarray  # (3,)
    t: float


def adjugate(m):
    """Adjugate of a 3x3 (or stacked ``(..., 3, 3)``) matrix."""
    return kernels._adj3(np.asarray(m, dtype=float))[1]


def det3(m):
    return kernels._adj3(np.asarray(m, dtype=float))[0]


def stack(c1, c2, c3):
    """Rows ordered as the channels are passed (lambda_1, lambda_2, lambda_3)."""
    chans = (c1, c2, c3)
    if not (c1.t == c2.t == c3.t):
        raise SynchronizationError(f"channel timestamps differ: {[c.t for c in chans]}")
    z = np.array([c.z for c in chans])
    psi = np.array([[c.psi1, c.psi2, c.psi3] for c in chans])
    return RegressionSnapshot(z, psi, c1.t)


def mix(snapshot):
    psi = np.asarray(snapshot.psi, dtype=float)
    z = np.asarray(snapshot.z, dtype=float)
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(z))):
        raise NumericalError(f"non-finite regression entries at t={snapshot.t}")
    delta, y = kernels._mix_vectorized(z, psi)
    return DremOutput(float(delta), np.asarray(y), snapshot.t)


def mix_series(regs, backend=None):
    """Mix a ``(N, 3, 4)`` regressor array into ``delta (N,)`` and ``Y (N, 3)``."""
    regs = np.asarray(regs, dtype=float)
    z = np.ascontiguousarray(regs[:, :, 0])
    psi = np.ascontiguousarray(regs[:, :, 1:])
    fn = backend or kernels.mix_series
    return fn(z, psi)
