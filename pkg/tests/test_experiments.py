import json

import numpy as np
import pytest

from conftest import make_config
from cqedsim.errors import CalibrationError
from cqedsim.experiments import (
    calibrate_nu_corr,
    run_beamsplit_map,
    run_stark_amplitude_sweep,
    run_stark_detuning_sweep,
    run_tms_chevron,
)
from cqedsim.model import ExperimentConfig, load_config, serialize_config
from cqedsim.sweepio import read_sweep_csv, write_meta_json, write_sweep_csv


def test_stark_amp_sweep_basics():
    cfg = make_config(experiment={
        "kind": "stark_amp", "target": "qubit",
        "axes": {"eps_MHz": (0.0, 3.0, 7.63)},
    })
    res = run_stark_amplitude_sweep(cfg)
    late = res.columns["qubit_shift_late_kHz"]
    early = res.columns["qubit_shift_early_kHz"]
    assert late[0] == 0.0 and early[0] == 0.0  # eps = 0 exactly zero
    assert np.all(late[1:] > 0)
    assert np.all(early[1:] < 0)
    assert list(res.errors) == ["", "", ""]
    assert res.metadata["config_echo"]["experiment"]["target"] == "qubit"


def test_stark_amp_cavity_target():
    cfg = make_config(experiment={
        "kind": "stark_amp", "target": "cavity",
        "axes": {"eps_MHz": (0.0, 6.0)},
    })
    res = run_stark_amplitude_sweep(cfg)
    assert res.metadata["config_echo"]["experiment"]["detuning_MHz"] == 18.5
    assert res.columns["qubit_shift_late_kHz"][1] < 0


def test_detuning_sweep_guard_and_tracking():
    cfg = make_config(experiment={
        "kind": "stark_detuning",
        "axes": {"delta_q_MHz": (-60.0, -30.0, -1.0, 30.0)},
    })
    res = run_stark_detuning_sweep(cfg)
    assert res.errors[2] == "degenerate_drive"
    assert np.isnan(res.columns["shift_late_kHz"][2])
    assert res.errors[0] == "" and res.errors[3] == ""
    assert res.columns["confidence_e0_late"][0] > 0.9
    # late positive below resonance, negative above
    assert res.columns["shift_late_kHz"][0] > 0
    assert res.columns["shift_late_kHz"][3] < 0


def test_chevron_small_grid():
    cfg = make_config(experiment={
        "kind": "chevron", "photon_index": 0, "gate_time_us": 1.0,
        "axes": {"eps_q_MHz": (0.0, 2.8), "eps_c_MHz": (0.0, 14.0)},
    })
    res = run_tms_chevron(cfg)
    grid = res.grid("p_e_late")
    assert grid[0, 0] == 0.0  # eps = 0 corner: exactly zero
    assert grid[0, 1] == pytest.approx(0.0, abs=1e-12)  # no qubit drive
    assert 0.0 <= grid[1, 1] <= 1.0
    assert grid[1, 1] > grid[1, 0]  # two-photon resonance needs both tones


def test_chevron_reproducible_from_echo():
    experiment = {
        "kind": "chevron", "photon_index": 0, "gate_time_us": 0.5,
        "axes": {"eps_q_MHz": (0.0, 2.0), "eps_c_MHz": (0.0, 10.0)},
    }
    cfg = make_config(experiment=experiment)
    first = run_tms_chevron(cfg)
    echo = json.dumps(first.metadata["config_echo"])
    cfg2 = load_config(echo)
    second = run_tms_chevron(cfg2)
    assert np.array_equal(first.columns["p_e_late"],
                          second.columns["p_e_late"])


def test_beamsplit_map_tau_zero_row():
    cfg = make_config(experiment={
        "kind": "beamsplit", "nu_corr_MHz": -2.89,
        "axes": {"tau_us": (0.0, 2.0), "offset_MHz": (-0.2, 0.0, 0.2)},
    })
    res = run_beamsplit_map(cfg)
    grid = res.grid("p_e_late")
    assert np.all(grid[0] == 0.0)  # tau = 0 row identically zero
    assert res.metadata["nu_corr_MHz"] == -2.89
    assert res.metadata["nu_corr_reference_MHz"] == -5.02


def test_calibrate_requires_signal():
    cfg = make_config(experiment={
        "kind": "beamsplit", "eps_q_MHz": 0.0, "eps_c_MHz": 0.0})
    with pytest.raises(CalibrationError):
        calibrate_nu_corr(cfg)


def test_csv_round_trip(tmp_path):
    cfg = make_config(experiment={
        "kind": "stark_amp", "target": "qubit",
        "axes": {"eps_MHz": (0.0, 4.0)},
        "models": ["late", "early"],
    })
    res = run_stark_amplitude_sweep(cfg)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(res, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + 2  # header + one row per cell
    back = read_sweep_csv(path)
    for name, values in res.columns.items():
        assert np.array_equal(back[name], values, equal_nan=True)
    meta_path = tmp_path / "sweep.meta.json"
    write_meta_json(res, meta_path)
    doc = json.loads(meta_path.read_text())
    assert doc["kind"] == "stark_amp"
    assert doc["metadata"]["config_echo"]["system"]["omega_q_MHz"] == 5311.0


def test_csv_degenerate_cell_marker(tmp_path):
    cfg = make_config(experiment={
        "kind": "stark_detuning",
        "axes": {"delta_q_MHz": (-30.0, -0.5, 30.0)},
    })
    res = run_stark_detuning_sweep(cfg)
    path = tmp_path / "sweep.csv"
    write_sweep_csv(res, path)
    text = path.read_text()
    assert "degenerate_drive" in text
    assert "-0.5,NaN,NaN" in text
    back = read_sweep_csv(path)
    assert back["error"][1] == "degenerate_drive"
    assert np.isnan(back["shift_late_kHz"][1])


def test_byte_identical_csv(tmp_path):
    cfg = make_config(experiment={
        "kind": "chevron", "gate_time_us": 0.4,
        "axes": {"eps_q_MHz": (0.0, 2.0), "eps_c_MHz": (5.0, 10.0)},
    })
    paths = []
    for k in range(2):
        res = run_tms_chevron(cfg)
        p = tmp_path / f"run{k}.csv"
        write_sweep_csv(res, p)
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_serialize_embeds_resolved_axes():
    cfg = make_config(experiment={
        "kind": "chevron", "gate_time_us": 0.4,
        "axes": {"eps_q_MHz": (0.0, 2.0), "eps_c_MHz": (5.0, 10.0)},
    })
    res = run_tms_chevron(cfg)
    echo = res.metadata["config_echo"]
    assert echo["experiment"]["axes"]["eps_q_MHz"] == [0.0, 2.0]
    # echo parses back into a valid config
    cfg2 = load_config(json.dumps(echo))
    assert serialize_config(cfg2)
