import math

import pytest
from hypothesis import given, strategies as st

from mramopt.numerics import (
    BisectionConfig,
    BracketError,
    ConvergenceError,
    bisect_monotone,
    lambert_w0,
    lambert_w0_log,
    lambert_w0_log_array,
)

special = pytest.importorskip("scipy.special")


@pytest.mark.parametrize("x", [1e-300, 1e-12, 0.1, 1.0, math.e, 10.0, 1e5, 1e100, 1e300])
def test_lambert_matches_scipy(x):
    assert lambert_w0(x) == pytest.approx(special.lambertw(x).real, rel=1e-14)


@given(st.floats(0.0, 1e300))
def test_lambert_round_trip(x):
    w = lambert_w0(x)
    assert w >= 0
    if x < 1.0:
        assert w * math.exp(w) == pytest.approx(x, rel=1e-14, abs=1e-300)
    else:
        # w e^w amplifies rounding in w by (1 + w); compare in log form instead
        assert w + math.log(w) == pytest.approx(math.log(x), rel=1e-14)


@given(st.floats(-50.0, 5000.0))
def test_lambert_log_round_trip(log_x):
    w = lambert_w0_log(log_x)
    assert w + math.log(w) == pytest.approx(log_x, rel=1e-13, abs=1e-13)


def test_lambert_log_array():
    out = lambert_w0_log_array([-math.inf, 0.0, 1.0, 800.0])
    assert out[0] == 0.0
    assert out[1] == pytest.approx(special.lambertw(1.0).real, rel=1e-15)
    assert out[2] == pytest.approx(special.lambertw(math.e).real, rel=1e-15)
    assert out[3] + math.log(out[3]) == pytest.approx(800.0, rel=1e-15)


@pytest.mark.parametrize("x", [-1.0, math.nan, math.inf])
def test_lambert_domain(x):
    with pytest.raises(ValueError):
        lambert_w0(x)


def test_bisect_finds_root():
    x = bisect_monotone(lambda v: v ** 3, 2.0, 0.0, 2.0, BisectionConfig(abs_tol=1e-13))
    assert x == pytest.approx(2 ** (1 / 3), abs=1e-13)


def test_bisect_decreasing_and_expansion():
    x = bisect_monotone(lambda v: -v, -100.0, 0.0, 1.0, increasing=False)
    assert x == pytest.approx(100.0, abs=1e-9)
    x = bisect_monotone(lambda v: v, -100.0, 0.0, 1.0)
    assert x == pytest.approx(-100.0, abs=1e-9)


def test_bisect_iteration_bound():
    calls = []

    def f(v):
        calls.append(v)
        return v

    cfg = BisectionConfig(abs_tol=1e-10)
    bisect_monotone(f, 0.123456789, 0.0, 1.0, cfg)
    # Pure halving needs ceil(log2(width / tol)) steps plus the two end evaluations.
    assert len(calls) <= math.ceil(math.log2(1.0 / 1e-10)) + 3


def test_newton_acceleration_reduces_evaluations():
    counts = {}
    for name, fp in [("plain", None), ("newton", lambda v: 3 * v * v)]:
        n = [0]

        def f(v):
            n[0] += 1
            return v ** 3

        bisect_monotone(f, 5.0, 0.0, 10.0, BisectionConfig(abs_tol=1e-12), fprime=fp)
        counts[name] = n[0]
    assert counts["newton"] < counts["plain"] / 2


def test_bisect_errors():
    with pytest.raises(BracketError):
        bisect_monotone(lambda v: math.tanh(v), 2.0, 0.0, 1.0, BisectionConfig(max_expansions=5))
    with pytest.raises(ConvergenceError):
        bisect_monotone(lambda v: v, 0.3, 0.0, 1.0, BisectionConfig(abs_tol=1e-12, max_iter=3))
    with pytest.raises(ValueError):
        bisect_monotone(lambda v: v, 0.5, 1.0, 0.0)


@given(st.floats(-1e3, 1e3), st.floats(0.1, 10.0))
def test_bisect_property(target, scale):
    cfg = BisectionConfig(abs_tol=1e-9)
    x = bisect_monotone(lambda v: scale * v + math.atan(v), target, -1.0, 1.0, cfg)
    assert abs(scale * x + math.atan(x) - target) <= 1e-9
