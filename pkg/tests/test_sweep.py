import io
import math

import numpy as np
import pytest

from mramopt.iwf import all_active_threshold, reduction_ratio_bound
from mramopt.sweep import energy_at_psnr, energy_sweep, psnr_energy_saving, write_csv


@pytest.fixture(scope="module")
def rows():
    return energy_sweep(8, np.arange(120.0, 241.0, 10.0))


def test_mse_strictly_decreasing(rows):
    for a, b in zip(rows, rows[1:]):
        assert b.mse_uniform < a.mse_uniform and b.mse_opt < a.mse_opt


def test_gamma_constant_above_threshold(rows):
    for r in rows:
        assert r.energy > all_active_threshold(8)
        assert r.gamma == pytest.approx(reduction_ratio_bound(8), rel=1e-9)


def test_saving(rows):
    e_uni, e_opt, saving = psnr_energy_saving(rows, 40.0)
    assert e_opt < e_uni
    assert saving == pytest.approx(1 - e_opt / e_uni)


def test_interpolation():
    assert energy_at_psnr([0, 10], [20, 40], 30) == 5.0
    with pytest.raises(ValueError):
        energy_at_psnr([0, 10], [20, 40], 50)
    with pytest.raises(ValueError):
        energy_at_psnr([0, 10, 20], [20, 40, 40], 30)


def test_csv(rows):
    buf = io.StringIO()
    write_csv(rows[:2], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "energy,mse_uniform,mse_opt,psnr_uniform,psnr_opt,gamma,iterations"
    assert len(lines) == 3
    vals = lines[1].split(",")
    assert float(vals[0]) == rows[0].energy and float(vals[2]) == rows[0].mse_opt
    assert not any("e" in v.lower() and "inf" not in v for v in vals[:1])
    assert all(math.isfinite(float(v)) for v in vals)
