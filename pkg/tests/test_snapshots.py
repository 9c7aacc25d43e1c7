# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import io

import numpy as np
import pytest

from elastoslab import Simulation
from elastoslab.cli import read_energy
from elastoslab.diagnostics import CSV_COLUMNS
from elastoslab.grid import Grid
from elastoslab.initial_data import assemble_initial_data, make_velocity
from elastoslab.snapshots import read_snapshot, snapshot_name, state_fields, write_snapshot
from elastoslab.watchers import CSVWriter, Recorder, SnapshotWriter


def rest_simulation(**kwargs):
    grid = Grid(16, 16, 16)
    initial = assemble_initial_data(make_velocity(grid, "standard", 0.01), "canonical")
    return Simulation(initial, kappa=0.2, dt=0.005, quiet=True, **kwargs)


def test_snapshot_file(tmp_path):
    rng = np.random.default_rng(3)
    scalar = rng.standard_normal((8, 8, 9))
    vector = rng.standard_normal((3, 8, 8, 9))
    path = write_snapshot(str(tmp_path / "a" / snapshot_name(7)), 0.25, [("q", scalar), ("v", vector)])

    assert path.endswith("step_000007.esl")
    with open(path, "rb") as fp:
        assert fp.read(4) == b"ESLB"
    t, fields = read_snapshot(path)
    assert t == 0.25
    assert list(fields) == ["q", "v"]
    assert np.array_equal(fields["q"], scalar)
    assert np.array_equal(fields["v"], vector)


def test_snapshot_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.esl"
    path.write_bytes(b"NOPE" + bytes(40))

    with pytest.raises(ValueError):
        read_snapshot(str(path))
    with pytest.raises(ValueError):
        write_snapshot(str(tmp_path / "x.esl"), 0.0, [])
    with pytest.raises(ValueError):
        write_snapshot(str(tmp_path / "x.esl"), 0.0, [("q", np.zeros((8, 8, 9))), ("v", np.zeros((3, 8, 8, 5)))])


def test_state_fields():
    simulation = rest_simulation()
    fields = dict(state_fields(simulation.state))

    assert fields["q"].shape == (16, 16, 17)
    assert fields["psi"].shape == (3, 16, 16, 17)
    assert np.max(np.abs(fields["q"])) == 0.0


def test_watchers(tmp_path):
    simulation = rest_simulation(record_every=2)
    csv = CSVWriter(simulation, str(tmp_path / "energy.csv"))
    snapshots = SnapshotWriter(simulation, str(tmp_path / "snapshots"), every=2)
    recorder = Recorder(simulation)
    simulation.watchers.extend([csv, snapshots, recorder])
    simulation.steps(5, show_progress=False)

    # records at 0, 2, 4 and the final state at 5
    assert csv.rows == 4
    assert [record.step for record in recorder.records] == [0, 2, 4, 5]
    assert snapshots.files == ["step_000000.esl", "step_000002.esl", "step_000004.esl", "step_000005.esl"]
    assert all("q" not in state.cache for state in recorder.states)

    with io.open(str(tmp_path / "energy.csv"), encoding="utf-8") as fp:
        assert fp.readline().strip() == ",".join(CSV_COLUMNS)
    energy = read_energy(str(tmp_path))
    assert list(energy["step"]) == [0, 2, 4, 5]
    assert energy["E_kappa"][0] == recorder.records[0].E_kappa

    t, fields = read_snapshot(str(tmp_path / "snapshots" / "step_000004.esl"))
    assert abs(t - 0.02) < 1e-12
    assert np.max(np.abs(fields["v"])) > 0.0


def test_csv_reset(tmp_path):
    simulation = rest_simulation(record_every=1)
    csv = CSVWriter(simulation, str(tmp_path / "energy.csv"))
    simulation.watchers.append(csv)
    simulation.steps(1, show_progress=False)
    assert csv.rows == 2

    simulation.reset()
    assert csv.rows == 0
    with open(str(tmp_path / "energy.csv")) as fp:
        assert len(fp.readlines()) == 1
