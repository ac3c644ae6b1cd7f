"""First-order filter atoms, time-weight nodes and their cascades.

Each first-order block is discretized exactly under a first-order hold: the
block input is taken to vary linearly between consecutive samples.  All
states start at rest at the first sample.  Outputs are produced at sample
instants, so a time weight multiplies the sample at its own time stamp
regardless of whether it sits inside a cascade or at its output.

Three atoms cover every chain used by the regressor::

    LOWPASS  lam/(p+lam)    x' = -lam x + lam u,  out = x
    LAG      1/(p+lam)      out = x / lam (same state)
    WASHOUT  lam p/(p+lam)  out = lam (u - x), realized without differentiation
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigurationError, NumericalError


@dataclass
class FirstOrderBlock:
    kind: int
    lam: float
    x: float = field(default=0.0, repr=False)
    _u_prev: float = field(default=0.0, repr=False)
    _primed: bool = field(default=False, repr=False)
    _dt: float = field(default=-1.0, repr=False)
    _coef: tuple = field(default=(0.0, 0.0, 0.0), repr=False)

    def __post_init__(self):
        if self.kind not in (kernels.LOWPASS, kernels.LAG, kernels.WASHOUT):
            raise ConfigurationError(f"not a first-order block kind: {self.kind}")
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise ConfigurationError(f"lambda must be positive and finite, got {self.lam}")
        self.lam = float(self.lam)

    @property
    def param(self):
        return self.lam

    def reset(self):
        self.x = 0.0
        self._u_prev = 0.0
        self._primed = False

    def step(self, u, t, dt):
        if not self._primed:
            self._primed = True
        else:
            if dt != self._dt:
                self._coef = kernels.foh_coefficients(self.lam, dt)
                self._dt = dt
            e, c0, c1 = self._coef
            self.x = e * self.x + c0 * self._u_prev + c1 * u
        self._u_prev = u
        if self.kind == kernels.LOWPASS:
            return self.x
        if self.kind == kernels.LAG:
            return self.x / self.lam
        return self.lam * (u - self.x)


@dataclass
class TimeWeightNode:
    """Multiplies its input by ``t**power`` (power 1 or 2); stateless."""

    power: int
    kind: int = field(default=kernels.TIME_WEIGHT, init=False)

    def __post_init__(self):
        if self.power not in (1, 2):
            raise ConfigurationError(f"time weight power must be 1 or 2, got {self.power}")

    @property
    def param(self):
        return float(self.power)

    def reset(self):
        pass

    def step(self, u, t, dt):
        return t * u if self.power == 1 else (t * t) * u


@dataclass
class Gain:
    k: float = 1.0
    kind: int = field(default=kernels.GAIN, init=False)

    @property
    def param(self):
        return float(self.k)

    def reset(self):
        pass

    def step(self, u, t, dt):
        return self.k * u


def lowpass(lam):
    return FirstOrderBlock(kernels.LOWPASS, lam)


def lag(lam):
    return FirstOrderBlock(kernels.LAG, lam)


def washout(lam):
    return FirstOrderBlock(kernels.WASHOUT, lam)


def time_weight(power):
    return TimeWeightNode(power)


_FACTORIES = {
    "lowpass": lowpass,
    "lag": lag,
    "washout": washout,
    "t": time_weight,
    "time": time_weight,
    "gain": Gain,
}


def _make_node(desc):
    if isinstance(desc, (FirstOrderBlock, TimeWeightNode, Gain)):
        return desc
    if isinstance(desc, str):
        desc = (desc,)
    name, *args = desc
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ConfigurationError(f"unknown filter node {name!r}") from None
    return factory(*args)


class FilterGraph:
    """A single-input single-output cascade, applied left to right.

    Node order matters: time weights do not commute with the filter blocks.
    """

    def __init__(self, nodes):
        self.nodes = [_make_node(d) for d in nodes]
        self._t_last = None

    def __repr__(self):
        return f"FilterGraph({self.nodes!r})"

    def reset(self):
        for node in self.nodes:
            node.reset()
        self._t_last = None

    def step(self, u, t):
        """Feed the input sample taken at time ``t``; return the output at ``t``.

        The first call only initializes; later calls integrate over the
        interval since the previous sample, which must be positive.
        """
        if self._t_last is None:
            dt = 0.0
        else:
            dt = t - self._t_last
            if not dt > 0:
                raise ConfigurationError(f"time step must be positive, got dt={dt}")
        if not math.isfinite(u):
            raise NumericalError(f"non-finite filter input {u} at t={t}")
        self._t_last = t
        for node in self.nodes:
            u = node.step(u, t, dt)
        return u

    def run(self, u, t):
        """Filter a whole uniformly sampled series from rest."""
        net = FilterNetwork(["u"])
        net.add("out", "u", self.nodes)
        return net.run({"u": u}, t)["out"]


def compose(nodes):
    """Build a :class:`FilterGraph` from node objects or ``(kind, param)`` tuples.

    >>> compose([("washout", 1.0)] * 3)   # lam^3 p^3 / (p+lam)^3
    """
    nodes = list(nodes)
    if not nodes:
        raise ConfigurationError("a filter graph needs at least one node")
    return FilterGraph(nodes)


def step_graph(graph, u, t):
    return graph.step(u, t)


class FilterNetwork:
    """Named cascades fed by named inputs or by other cascades' outputs.

    Outputs are linear combinations of any named signal.  The same network
    can be stepped sample by sample or compiled into a flat op program that an
    accelerated kernel runs over a whole series.
    """

    def __init__(self, inputs):
        self.inputs = list(inputs)
        self._pipes = []  # (name, source, FilterGraph)
        self._names = set(self.inputs)
        self.outputs = {}

    def add(self, name, source, nodes):
        if name in self._names:
            raise ConfigurationError(f"duplicate signal name {name!r}")
        if source not in self._names:
            raise ConfigurationError(f"unknown source {source!r} for {name!r}")
        graph = nodes if isinstance(nodes, FilterGraph) else compose(nodes)
        self._pipes.append((name, source, graph))
        self._names.add(name)
        return graph

    def combine(self, name, terms):
        """Declare output ``name`` as ``sum(coef * signal)`` over ``terms.items()``."""
        for sig in terms:
            if sig not in self._names:
                raise ConfigurationError(f"unknown signal {sig!r} in output {name!r}")
        self.outputs[name] = dict(terms)

    @property
    def output_names(self):
        return list(self.outputs) if self.outputs else [p[0] for p in self._pipes]

    def _terms(self):
        if self.outputs:
            return self.outputs
        return {p[0]: {p[0]: 1.0} for p in self._pipes}

    def reset(self):
        for _, _, g in self._pipes:
            g.reset()

    def step(self, values, t):
        """Advance every cascade with input samples at ``t``; return the outputs."""
        sig = dict(values)
        for name, source, graph in self._pipes:
            sig[name] = graph.step(sig[source], t)
        out = {}
        for name, terms in self._terms().items():
            acc = 0.0
            for s, c in terms.items():
                acc += c * sig[s]
            out[name] = acc
        return out

    def compile(self, dt):
        """Flatten to kernel op arrays for a uniform step ``dt``."""
        reg = {n: i for i, n in enumerate(self.inputs)}
        kind, src, dst, par, ce, c0, c1 = [], [], [], [], [], [], []
        n_reg = len(self.inputs)
        for name, source, graph in self._pipes:
            cur = reg[source]
            for node in graph.nodes:
                kind.append(node.kind)
                src.append(cur)
                dst.append(n_reg)
                par.append(node.param)
                if node.kind <= kernels.WASHOUT:
                    e, a0, a1 = kernels.foh_coefficients(node.lam, dt)
                else:
                    e, a0, a1 = 0.0, 0.0, 0.0
                ce.append(e)
                c0.append(a0)
                c1.append(a1)
                cur = n_reg
                n_reg += 1
            reg[name] = cur
        ptr, oreg, ocoef = [0], [], []
        for terms in self._terms().values():
            for s, c in terms.items():
                oreg.append(reg[s])
                ocoef.append(float(c))
            ptr.append(len(oreg))
        i64 = lambda v: np.asarray(v, dtype=np.int64)  # noqa: E731
        f64 = lambda v: np.asarray(v, dtype=np.float64)  # noqa: E731
        return (i64(kind), i64(src), i64(dst), f64(par), f64(ce), f64(c0), f64(c1), n_reg, i64(ptr), i64(oreg), f64(ocoef))

    def run(self, inputs, t, backend=None):
        """Run from rest over a uniform grid ``t``; returns ``{output: array}``.

        ``backend`` may be a kernel function to force one implementation.
        """
        t = np.ascontiguousarray(t, dtype=np.float64)
        if t.ndim != 1 or t.size == 0:
            raise ConfigurationError("time grid must be a non-empty 1-D array")
        cols = np.column_stack([np.asarray(inputs[n], dtype=np.float64) for n in self.inputs])
        if cols.shape[0] != t.size:
            raise ConfigurationError("input series and time grid differ in length")
        if not np.all(np.isfinite(cols)):
            bad = int(np.argmax(~np.all(np.isfinite(cols), axis=1)))
            raise NumericalError(f"non-finite filter input at step {bad}", step=bad)
        dt = float(t[1] - t[0]) if t.size > 1 else 1.0
        if not dt > 0:
            raise ConfigurationError(f"time step must be positive, got dt={dt}")
        fn = backend or kernels.run_bank
        out = fn(np.ascontiguousarray(cols), t, *self.compile(dt))
        return {name: out[:, j] for j, name in enumerate(self._terms())}
