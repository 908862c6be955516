import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from mramopt.duration_opt import (
    Budget,
    cavefill_durations,
    ground_levels,
    water_level_report,
    waterfill_durations,
)
from mramopt.model import DeviceParams, mse_terms

LN2 = math.log(2.0)
DEV = DeviceParams()


def word_mse(i, t):
    return float(np.sum(mse_terms(i, t, DEV)))


@st.composite
def instances(draw, max_bits=8):
    bits = draw(st.integers(1, max_bits))
    i = np.array(draw(st.lists(st.floats(1.01, 5.0), min_size=bits, max_size=bits)))
    E = draw(st.floats(0.5, 50.0 * bits))
    return i, E


def test_budget_validation():
    for kwargs in ({"energy": 0}, {"energy": math.inf}, {"energy": 1, "latency_cap": 0}, {"energy": 1, "epsilon": 0}):
        with pytest.raises(ValueError):
            Budget(**kwargs)
    assert Budget(10).min_current == 1.001


def test_two_bit_closed_form():
    t, out = waterfill_durations([2.0, 2.0], Budget(8.0))
    np.testing.assert_allclose(t, [1 - LN2 / 2, 1 + LN2 / 2], rtol=0, atol=1e-12)
    assert out.active_bits == {0, 1} and not out.capped_bits and not out.saturated


def test_low_budget_turns_lsb_off():
    E = 2 * LN2
    t, out = waterfill_durations([2.0, 2.0], Budget(E))
    assert t[0] == 0.0
    assert t[1] == pytest.approx(E / 4, rel=1e-12)
    assert out.active_bits == {1}


def test_cave_filling_frozen_values():
    t, out = cavefill_durations([2.0, 2.0], Budget(6.0, latency_cap=1.0))
    np.testing.assert_allclose(t, [0.5, 1.0], atol=1e-12)
    assert out.capped_bits == {1}
    t, out = cavefill_durations([2.0, 2.0], Budget(8.0, latency_cap=1.0))
    np.testing.assert_array_equal(t, [1.0, 1.0])
    assert out.saturated and out.residual == 0.0


def test_saturated_leaves_energy_unspent():
    t, out = cavefill_durations([2.0, 2.0], Budget(100.0, latency_cap=1.0))
    np.testing.assert_array_equal(t, [1.0, 1.0])
    assert out.saturated and out.residual == pytest.approx(92.0)


def test_waterfill_ignores_cap():
    b = Budget(20.0, latency_cap=0.5)
    t, _ = waterfill_durations([2.0, 2.5, 3.0], b)
    assert t.max() > 0.5
    t2, _ = cavefill_durations([2.0, 2.5, 3.0], Budget(20.0))
    np.testing.assert_array_equal(t, t2)


def test_rejects_low_currents():
    with pytest.raises(ValueError):
        waterfill_durations([1.0005, 2.0], Budget(5.0))
    with pytest.raises(ValueError):
        waterfill_durations([], Budget(5.0))


def test_ground_levels():
    g = ground_levels([2.0, 3.0])
    assert g[0] == pytest.approx(math.log(4 / 2))
    assert g[1] == pytest.approx(math.log(9 / (2 * 4 * 2)))


@given(instances())
@settings(max_examples=200, deadline=None)
def test_waterfill_kkt(inst):
    i, E = inst
    t, out = waterfill_durations(i, Budget(E))
    assert np.all(t >= 0)
    assert float(np.sum(i * i * t)) == pytest.approx(E, rel=1e-9)
    for row in water_level_report(i, t, out.dual_value):
        assert row.residual <= 1e-8 * max(1.0, abs(row.level))


@given(instances(), st.floats(0.05, 5.0))
@settings(max_examples=200, deadline=None)
def test_cavefill_kkt(inst, cap):
    i, E = inst
    t, out = cavefill_durations(i, Budget(E, latency_cap=cap))
    assert np.all(t >= 0) and np.all(t <= cap)
    spent = float(np.sum(i * i * t))
    if out.saturated:
        np.testing.assert_array_equal(t, cap)
        assert spent <= E
    else:
        assert spent == pytest.approx(E, rel=1e-9)
        for row in water_level_report(i, t, out.dual_value, cap):
            assert row.residual <= 1e-8 * max(1.0, abs(row.level))


@given(instances(max_bits=4), st.data())
@settings(max_examples=100, deadline=None)
def test_no_feasible_perturbation_does_better(inst, data):
    i, E = inst
    t, _ = waterfill_durations(i, Budget(E))
    best = word_mse(i, t)
    # random point on the energy shell
    w = np.array(data.draw(st.lists(st.floats(0.0, 1.0), min_size=i.size, max_size=i.size)))
    assume(w.sum() > 1e-6)
    other = (w / w.sum()) * E / (i * i)
    assert best <= word_mse(i, other) * (1 + 1e-9)


def test_level_monotone_in_budget():
    i = np.array([1.5, 2.0, 2.5, 3.0])
    levels = [waterfill_durations(i, Budget(E))[1].log_dual for E in (1.0, 5.0, 20.0, 80.0)]
    assert all(a < b for a, b in zip(levels, levels[1:]))


def test_report_infers_level():
    i = np.array([2.0, 2.0])
    t, out = waterfill_durations(i, Budget(8.0))
    rows = water_level_report(i, t)
    assert rows[0].level == pytest.approx(out.log_dual, abs=1e-12)
    assert [r.status for r in rows] == ["interior", "interior"]
    with pytest.raises(ValueError):
        water_level_report(i, [0.0, 0.0])
