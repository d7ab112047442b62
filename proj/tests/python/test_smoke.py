# Copyright 2026 The amtj Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import amtj


def test_present_vector():
    assert amtj.present_encrypt("0000000000000000", "0" * 20) == "5579C1387B228445"
    assert amtj.present_encrypt("FFFFFFFFFFFFFFFF", "F" * 20) == "3333DCD3213210D2"


def test_bad_hex_raises_value_error():
    with pytest.raises(ValueError):
        amtj.present_encrypt("00", "0" * 20)


def test_energy_closed_form():
    e = amtj.adiabatic_transition_energy(6.21e3, 10e-15, 80e-9, 1.0)
    assert math.isclose(e, 6.21e3 * 10e-15 / 80e-9 * 10e-15, rel_tol=1e-12)
    assert e < amtj.conventional_switching_energy(10e-15, 1.0)


def test_sweep_rows():
    rows = amtj.energy_sweep()
    assert [r["freq_mhz"] for r in rows] == [5, 10, 12.5, 25, 50]
    assert rows[3]["reduction_pct"] >= 60.0


def test_metrics():
    assert math.isclose(amtj.ned([7.1, 102.0]), 0.93039, abs_tol=1e-4)
    assert amtj.nsd([1.0, 3.0]) == pytest.approx(0.5)
    assert amtj.sbox_energy_report("adiabatic-mtj")["ned"] < 0.01
    assert amtj.sbox_energy_report("cmos")["ned"] > 0.80


def test_traces_and_cpa(tmp_path):
    ts = amtj.gen_traces("cmos", 400, "00112233445566778899", seed=7)
    assert len(ts) == 400
    assert ts.samples.shape == (400, ts.n_samples)
    assert ts.samples.dtype == np.float32
    path = tmp_path / "t.amtj"
    ts.save(path)
    back = amtj.load_traces(path)
    assert np.array_equal(back.samples, ts.samples)
    assert back.plaintexts == ts.plaintexts
    res = amtj.cpa(back)
    assert res["success"] is True
    assert res["recovered_roundkey"] == "0011223344556677"


def test_pearson_matches_numpy():
    rng = np.random.default_rng(3)
    x = rng.normal(size=1000)
    y = 0.3 * x + rng.normal(size=1000)
    assert amtj.pearson(list(x), list(y)) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)


def test_corrupt_file(tmp_path):
    p = tmp_path / "bad.amtj"
    p.write_bytes(b"junk")
    with pytest.raises(amtj.TraceFileError):
        amtj.load_traces(p)
