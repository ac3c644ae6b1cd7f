import math

import numpy as np
import pytest
from scipy import signal as sps

from sinfreq import lti_filters as lf
from sinfreq.errors import ConfigurationError, NumericalError

from conftest import grid


def stream(graph, u, t):
    return np.array([lf.step_graph(graph, a, b) for a, b in zip(u, t)])


def test_lowpass_step_at_one_second():
    t = grid(1.0, 1e-3)
    out = lf.compose([lf.lowpass(1.0)]).run(np.ones_like(t), t)
    assert out[-1] == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert out[-1] == pytest.approx(0.63212, abs=1e-5)


def test_washout_step_at_one_second():
    t = grid(1.0, 1e-3)
    out = lf.compose([lf.washout(1.0)]).run(np.ones_like(t), t)
    assert out[-1] == pytest.approx(math.exp(-1), abs=1e-12)


@pytest.mark.parametrize("make", [lf.lowpass, lf.lag, lf.washout])
def test_zero_input_gives_zero(make):
    t = grid(5.0, 1e-2)
    assert np.all(lf.compose([make(2.0)]).run(np.zeros_like(t), t) == 0)


def test_streaming_matches_batch():
    t = grid(4.0, 1e-2)
    u = np.sin(3 * t) + 0.2 * t
    nodes = [("washout", 2.0), ("t", 1), ("lowpass", 1.5), ("lag", 3.0), ("t", 2)]
    batch = lf.compose(nodes).run(u, t)
    assert np.allclose(stream(lf.compose(nodes), u, t), batch, rtol=1e-12, atol=1e-13)


def lowpass_sine_response(lam, w, t):
    # lam/(p+lam) applied to sin(w t) from rest
    g = lam / (lam**2 + w**2)
    return g * (lam * np.sin(w * t) - w * np.cos(w * t) + w * np.exp(-lam * t))


@pytest.mark.parametrize("lam", [1.0, 3.0])
def test_discretization_error_halves_with_dt(lam):
    w = 2.0
    errs = []
    for dt in (1e-2, 5e-3):
        t = grid(10 / lam, dt)
        out = lf.compose([lf.lowpass(lam)]).run(np.sin(w * t), t)
        errs.append(np.max(np.abs(out - lowpass_sine_response(lam, w, t))))
    assert errs[0] / errs[1] >= 1.9


def test_step_response_exact_for_any_step():
    # a held-constant input is reproduced exactly by a first-order hold
    lam = 2.0
    for dt in (1e-1, 1e-2, 1e-3):
        t = grid(5.0, dt)
        out = lf.compose([lf.lowpass(lam)]).run(np.ones_like(t), t)
        assert np.max(np.abs(out - (1 - np.exp(-lam * t)))) < 1e-12


def test_stiff_step_stays_bounded():
    t = grid(1.0, 1e-2)
    out = lf.compose([lf.lowpass(1e6)]).run(np.ones_like(t), t)
    assert np.all(np.abs(out) <= 1 + 1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
def test_bounded_input_bounded_output(lam):
    rng = np.random.default_rng(1)
    t = grid(20.0, 1e-2)
    u = np.repeat(rng.uniform(-1, 1, len(t) // 50 + 1), 50)[: len(t)]
    M = np.max(np.abs(u))
    bounds = {lf.lowpass: M, lf.lag: M / lam, lf.washout: 2 * lam * M}
    for make, bound in bounds.items():
        out = lf.compose([make(lam)]).run(u, t)
        assert np.max(np.abs(out)) <= bound * (1 + 1e-9)


def test_linearity():
    rng = np.random.default_rng(2)
    t = grid(5.0, 1e-2)
    u1, u2 = rng.standard_normal((2, len(t)))
    g = lf.compose([("washout", 1.0), ("lowpass", 2.0), ("lag", 3.0)])
    a = 2.5
    lhs = g.run(a * u1 + u2, t)
    rhs = a * g.run(u1, t) + g.run(u2, t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


def test_same_lambda_permutations_commute():
    t = grid(10.0, 1e-3)
    u = np.sin(t) + np.cos(2.3 * t)
    lam = 2.0
    a = lf.compose([("washout", lam), ("lowpass", lam), ("lag", lam)]).run(u, t)
    b = lf.compose([("lag", lam), ("washout", lam), ("lowpass", lam)]).run(u, t)
    assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(a))


def test_mixed_lambda_permutations_commute_to_discretization():
    t = grid(10.0, 1e-3)
    u = np.sin(t) + np.cos(2.3 * t)
    a = lf.compose([("washout", 1.0), ("lowpass", 3.0)]).run(u, t)
    b = lf.compose([("lowpass", 3.0), ("washout", 1.0)]).run(u, t)
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_time_weight_breaks_commutation():
    t = grid(10.0, 1e-3)
    u = np.sin(t)
    a = lf.compose([("t", 1), ("lowpass", 1.0)]).run(u, t)
    b = lf.compose([("lowpass", 1.0), ("t", 1)]).run(u, t)
    assert np.max(np.abs(a - b)) > 0.1 * np.max(np.abs(a))


def steady_state_gain(nodes_tf, w):
    num, den = nodes_tf
    return np.polyval(num, 1j * w) / np.polyval(den, 1j * w)


@pytest.mark.parametrize(
    "nodes, tf",
    [
        ([("washout", 1.5)] * 3, ([1.5**3, 0, 0, 0], np.poly([-1.5] * 3))),
        (
            [("washout", 1.5), ("lowpass", 1.5), ("lowpass", 1.5), ("lag", 1.5)],
            ([1.5**3, 0], np.poly([-1.5] * 4)),
        ),
    ],
    ids=["three-washouts", "washout-lowpass-lowpass-lag"],
)
def test_cascade_realizes_transfer_function(nodes, tf):
    dt = 1e-3
    t = grid(40.0, dt)
    w = 1.3
    out = lf.compose(nodes).run(np.sin(w * t), t)
    _, ref, _ = sps.lsim(tf, np.sin(w * t), t)
    tail = t > 25
    assert np.max(np.abs(out[tail] - ref[tail])) < 1e-5
    h = steady_state_gain(tf, w)
    assert np.allclose(out[tail], np.abs(h) * np.sin(w * t[tail] + np.angle(h)), atol=1e-5)


def test_identity_gain_passthrough():
    t = grid(1.0, 1e-2)
    u = np.cos(t)
    assert np.array_equal(lf.compose([("gain", 1.0)]).run(u, t), u)


def test_empty_graph_rejected():
    with pytest.raises(ConfigurationError):
        lf.compose([])


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf])
def test_bad_lambda_rejected(bad):
    with pytest.raises(ConfigurationError):
        lf.lowpass(bad)


def test_bad_time_weight_rejected():
    with pytest.raises(ConfigurationError):
        lf.time_weight(3)


def test_nonpositive_step_rejected():
    g = lf.compose([lf.lowpass(1.0)])
    g.step(1.0, 0.0)
    g.step(1.0, 0.1)
    with pytest.raises(ConfigurationError):
        g.step(1.0, 0.1)


def test_nonfinite_input_fails_fast():
    g = lf.compose([lf.lowpass(1.0)])
    g.step(1.0, 0.0)
    with pytest.raises(NumericalError):
        g.step(float("nan"), 0.1)
    t = grid(1.0, 0.1)
    u = np.ones_like(t)
    u[3] = np.inf
    with pytest.raises(NumericalError):
        g.run(u, t)


def test_reset_restores_rest_state():
    g = lf.compose([("lowpass", 1.0), ("lag", 2.0)])
    t = grid(1.0, 0.1)
    first = stream(g, np.ones_like(t), t)
    g.reset()
    assert np.array_equal(stream(g, np.ones_like(t), t), first)
