import numpy as np
import pytest

from mramopt.duration_opt import Budget
from mramopt.iwf import optimize_word, uniform_baseline
from mramopt.model import DeviceParams, PulseSchedule, mse
from mramopt.simulate import (
    BATCH_SIZE,
    SimConfig,
    bit_error_probabilities,
    load_raw_image,
    simulate_image,
    simulate_words,
)

DEV = DeviceParams()


@pytest.fixture(scope="module")
def sched8():
    return optimize_word(8, Budget(160.0)).schedule


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(samples=0)
    with pytest.raises(ValueError):
        SimConfig(samples=1, seed=-1)
    with pytest.raises(ValueError):
        SimConfig(samples=1, probability_source="x")


def test_probabilities_capped():
    s = PulseSchedule.from_arrays([2.0, 2.0], [0.0, 10.0])
    p = bit_error_probabilities(s, DEV, "proxy")
    assert p[0] == 0.5 and p[1] < 1e-6


@pytest.mark.parametrize("source", ["exact", "proxy"])
def test_unbiased_against_simulated_model(sched8, source):
    st = simulate_words(sched8, DEV, SimConfig(samples=1_000_000, seed=7, probability_source=source))
    assert st.samples_used == 1_000_000
    assert abs(st.empirical_mse - st.model_mse) <= 3 * st.std_error
    assert st.analytic_mse == mse(sched8, DEV)


def test_reproducible_and_seed_sensitive(sched8):
    cfg = SimConfig(samples=3 * BATCH_SIZE + 17, seed=11)
    assert simulate_words(sched8, DEV, cfg) == simulate_words(sched8, DEV, cfg)
    other = simulate_words(sched8, DEV, SimConfig(samples=cfg.samples, seed=12))
    assert other.empirical_mse != simulate_words(sched8, DEV, cfg).empirical_mse


def test_error_free_channel():
    s = PulseSchedule.from_arrays([3.0] * 4, [40.0] * 4)
    st = simulate_words(s, DEV, SimConfig(samples=1000))
    assert st.empirical_mse == 0.0
    assert st.to_dict()["psnr_empirical"] == "inf"


def test_too_many_bits():
    s = PulseSchedule.from_arrays([2.0] * 17, [1.0] * 17)
    with pytest.raises(ValueError):
        simulate_words(s, DEV, SimConfig(samples=10))


def test_image_psnr_gap(sched8, tmp_path):
    # gradient test image; gap between schedules tracks 10 log10(1/gamma)
    img = (np.add.outer(np.arange(128), np.arange(128)) % 256).astype(np.uint8)
    path = tmp_path / "img.raw"
    img.tofile(path)
    loaded = load_raw_image(path, 128, 128)
    np.testing.assert_array_equal(loaded, img)
    uni, _ = uniform_baseline(8, Budget(160.0), DEV)
    cfg = SimConfig(samples=60, seed=3, probability_source="proxy")
    a = simulate_image(sched8, DEV, loaded, cfg)
    b = simulate_image(uni, DEV, loaded.tobytes(), cfg)
    gamma = a.analytic_mse / b.analytic_mse
    assert a.psnr_empirical - b.psnr_empirical == pytest.approx(10 * np.log10(1 / gamma), abs=0.5)


def test_image_errors(sched8, tmp_path):
    path = tmp_path / "bad.raw"
    path.write_bytes(b"\x00" * 10)
    with pytest.raises(ValueError):
        load_raw_image(path, 4, 4)
    with pytest.raises(ValueError):
        simulate_image(PulseSchedule.from_arrays([2.0] * 4, [1.0] * 4), DEV, b"\x00", SimConfig(1))
    with pytest.raises(ValueError):
        simulate_image(sched8, DEV, np.zeros(4, dtype=np.int32), SimConfig(1))
