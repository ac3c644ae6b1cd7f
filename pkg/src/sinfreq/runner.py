"""Scenario runs: signal -> regressor bank -> mixer -> estimator -> CSV + summary."""
import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import drem
from .errors import ConfigurationError, FormatError, NumericalError
from .estimator import EstimatorConfig, run_estimator
from .regressor import RegressorBank, regression_residual
from .signal_gen import SignalSpec, beta_at, omega_true, sample

CSV_NAME = "timeseries.csv"
SUMMARY_NAME = "summary.json"


@dataclass
class ScenarioConfig:
    amplitude: float = 2.0
    phase: float = 1.0
    omega0: float = 1.0
    rate_segments: list = field(default_factory=lambda: [[0.0, 0.05]])
    lambdas: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    gamma: float = 1e5
    gamma2: float = 1e5
    dt: float = 1e-3
    horizon: float = 30.0
    epsilon_w: float = 1e-6
    epsilon_sign: float = 1e-3
    reset_on_segment_switch: bool = False
    output_path: str = "out"
    log_stride: int = 10
    generator_variant: str = "corrected"
    beta_tolerance: float = 5e-3
    omega_tolerance: float = 0.05
    residual_window_start: float = 1.0

    def __post_init__(self):
        if len(self.lambdas) != 3:
            raise ConfigurationError("exactly three lambdas are required")
        lams = [float(v) for v in self.lambdas]
        if any(not v > 0 for v in lams):
            raise ConfigurationError("lambdas must be positive")
        if len(set(lams)) != 3:
            raise ConfigurationError("lambdas must be pairwise distinct (otherwise det(Psi) = 0)")
        self.lambdas = lams
        if not 0 < self.dt <= 0.01:
            raise ConfigurationError(f"dt must lie in (0, 0.01], got {self.dt}")
        if not 0 < self.horizon <= 600:
            raise ConfigurationError(f"horizon must lie in (0, 600], got {self.horizon}")
        if not (isinstance(self.log_stride, int) and self.log_stride >= 1):
            raise ConfigurationError("log_stride must be a positive integer")
        self.signal  # validates the signal fields
        self.estimator_config  # validates gains and thresholds
        # sign recovery reads sign(beta * w); it needs w > 0 throughout
        knots = [0.0, self.horizon] + [s[0] for s in self.signal.rate_segments if s[0] <= self.horizon]
        if min(omega_true(self.signal, np.array(knots))) <= 0:
            raise ConfigurationError("frequency must stay positive over the horizon")

    @property
    def signal(self):
        return SignalSpec(self.amplitude, self.phase, self.omega0, tuple(map(tuple, self.rate_segments)))

    @property
    def estimator_config(self):
        return EstimatorConfig(
            gamma=self.gamma,
            gamma2=self.gamma2,
            epsilon_w=self.epsilon_w,
            epsilon_sign=self.epsilon_sign,
            generator_variant=self.generator_variant,
        )

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt)) + 1

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from None

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self):
        return asdict(self)


@dataclass
class RunSummary:
    final_beta_hat: float | None
    final_omega_err: float | None
    beta_convergence_time: float | None
    omega_convergence_time: float | None
    min_abs_delta: float
    median_abs_delta: float
    residual_rms_per_lambda: list
    n_steps: int = 0

    def to_dict(self):
        return asdict(self)


@dataclass
class RunResult:
    config: ScenarioConfig
    t: np.ndarray
    series: dict  # column name -> full-resolution array
    available: dict  # column name -> bool array, for estimates that can be missing
    summary: RunSummary


def convergence_time(t, err, ok, tol):
    """First grid time after which ``ok and err <= tol`` holds to the end."""
    good = ok & (err <= tol)
    if not good.size or not good[-1]:
        return None
    bad = np.flatnonzero(~good)
    return float(t[0]) if bad.size == 0 else float(t[bad[-1] + 1])


def _first_nonfinite(arrays):
    for name, arr in arrays.items():
        flat = np.asarray(arr).reshape(len(arr), -1)
        bad = ~np.all(np.isfinite(flat), axis=1)
        if bad.any():
            k = int(np.argmax(bad))
            return k, name
    return None


def run(config, backend=None):
    """Execute a scenario at full resolution and return every series plus the summary.

    ``backend`` is an optional dict with ``bank``/``mix``/``estimate`` kernels.
    """
    backend = backend or {}
    spec = config.signal
    n = config.n_steps
    t = np.arange(n) * config.dt
    y = sample(spec, t)
    om = omega_true(spec, t)
    beta = beta_at(spec, t)

    regs = RegressorBank(config.lambdas).run(y, t, backend=backend.get("bank"))
    delta, ymix = drem.mix_series(regs, backend=backend.get("mix"))
    bad = _first_nonfinite({"regressor": regs, "delta": delta, "Y": ymix})
    if bad:
        raise NumericalError(f"non-finite {bad[1]} at step {bad[0]}", step=bad[0])

    reset = np.zeros(n, dtype=bool)
    if config.reset_on_segment_switch:
        for ts in spec.switch_times:
            k = int(math.ceil(ts / config.dt - 1e-9))
            if k < n:
                reset[k] = True
    est = run_estimator(delta, ymix, config.dt, config.estimator_config, reset, backend=backend.get("estimate"))
    bad = _first_nonfinite(est)
    if bad:
        raise NumericalError(f"non-finite {bad[1]} at step {bad[0]}", step=bad[0])

    resid = regression_residual(regs, beta[:, None], om[:, None])
    # w^2 = Y3/Delta as a logged diagnostic where |Delta| is well above its noise
    big = np.abs(delta) > 1e-3 * max(float(np.max(np.abs(delta))), 1e-300)
    omega_y3 = np.zeros(n)
    np.divide(ymix[:, 2], delta, out=omega_y3, where=big)
    omega_y3 = np.sqrt(np.maximum(omega_y3, 0.0))

    series = {"t": t, "y": y, "omega_true": om, "beta_true": beta}
    for i in range(3):
        for j, name in enumerate(("z", "psi1", "psi2", "psi3")):
            series[f"{name}_{i + 1}"] = regs[:, i, j]
    series.update(delta=delta, y1=ymix[:, 0], y2=ymix[:, 1], y3=ymix[:, 2])
    for name in ("beta2_hat", "w", "beta2_ft", "sign", "beta_hat", "omega_hat", "w1", "w2", "omega_ft"):
        series[name] = est[name]
    for i in range(3):
        series[f"resid_{i + 1}"] = resid[:, i]
    series["omega_y3"] = omega_y3
    available = {
        "beta2_ft": est["beta2_ft_ok"] > 0,
        "beta_hat": est["beta_hat_ok"] > 0,
        "omega_ft": est["omega_ft_ok"] > 0,
        "omega_y3": big,
    }

    b_ok, o_ok = available["beta_hat"], available["omega_ft"]
    b_err = np.abs(est["beta_hat"] - beta)
    o_err = np.abs(est["omega_ft"] - om)
    win = t >= config.residual_window_start
    rms = []
    for i in range(3):
        zr = math.sqrt(float(np.mean(regs[win, i, 0] ** 2))) if win.any() else 0.0
        rr = math.sqrt(float(np.mean(resid[win, i] ** 2))) if win.any() else 0.0
        rms.append(rr / zr if zr > 0 else 0.0)
    abs_d = np.abs(delta)
    summary = RunSummary(
        final_beta_hat=float(est["beta_hat"][-1]) if b_ok[-1] else None,
        final_omega_err=float(o_err[-1]) if o_ok[-1] else None,
        beta_convergence_time=convergence_time(t, b_err, b_ok, config.beta_tolerance),
        omega_convergence_time=convergence_time(t, o_err, o_ok, config.omega_tolerance),
        min_abs_delta=float(abs_d.min()),
        median_abs_delta=float(np.median(abs_d)),
        residual_rms_per_lambda=rms,
        n_steps=n,
    )
    return RunResult(config, t, series, available, summary)


def _fmt(v):
    return "%.17g" % v


def write_csv(result, path):
    """Every ``log_stride``-th step; missing estimates are left empty."""
    stride = result.config.log_stride
    cols = list(result.series)
    idx = np.arange(0, len(result.t), stride)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        data = [result.series[c][idx] for c in cols]
        masks = [result.available.get(c) for c in cols]
        for r, k in enumerate(idx):
            cells = []
            for c, arr, m in zip(cols, data, masks):
                if m is not None and not m[k]:
                    cells.append("")
                elif c == "sign":
                    cells.append(str(int(arr[r])))
                else:
                    cells.append(_fmt(arr[r]))
            fh.write(",".join(cells) + "\n")


def run_to_dir(config, out_dir=None):
    out_dir = out_dir or config.output_path
    os.makedirs(out_dir, exist_ok=True)
    result = run(config)
    csv_path = os.path.join(out_dir, CSV_NAME)
    write_csv(result, csv_path)
    with open(os.path.join(out_dir, SUMMARY_NAME), "w") as fh:
        json.dump({"summary": result.summary.to_dict(), "config": config.to_dict()}, fh, indent=2)
        fh.write("\n")
    return result, csv_path


PLOT_FILES = {
    "signal.dat": ("t", "y"),
    "beta.dat": ("t", "beta_hat", "beta_true"),
    "omega.dat": ("t", "omega_ft", "omega_true"),
}


def emit_plot_data(csv_path, out_dir):
    """Write the signal, beta and frequency series as whitespace-separated columns.

    Rows whose estimate is missing are skipped.  Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = []
        if header is not None:
            needed = {c for cols in PLOT_FILES.values() for c in cols}
            missing = needed - set(header)
            if missing:
                raise FormatError(f"{csv_path}: missing columns {sorted(missing)}")
            pos = {c: header.index(c) for c in needed}
            for row in reader:
                if len(row) != len(header):
                    raise FormatError(
                        f"{csv_path}, line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                    )
                rows.append({c: row[i] for c, i in pos.items()})
    paths = []
    for fname, cols in PLOT_FILES.items():
        path = os.path.join(out_dir, fname)
        with open(path, "w") as out:
            for r in rows:
                if any(r[c] == "" for c in cols):
                    continue
                out.write(" ".join(r[c] for c in cols) + "\n")
        paths.append(path)
    return paths
