# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import json
import os

from PIL import Image

from elastoslab.cli import cmd_picture, cmd_run, cmd_verify, main, member_directory, sweep_report
from elastoslab.runconfig import RunConfig

MANIFEST_KEYS = {
    "config",
    "kappa",
    "seed",
    "versions",
    "wall_time",
    "steps",
    "T_run",
    "completed",
    "violation",
    "M0",
    "snapshots",
}


def small_config(tmp_path):
    return RunConfig(
        n1=16,
        n2=16,
        n3=16,
        kappa=[0.2, 0.15],
        T=0.01,
        dt=0.005,
        velocity="standard",
        snapshot_every=1,
        record_every=1,
        quiet=True,
        output=str(tmp_path / "sweep"),
    )


def test_run_and_report(tmp_path):
    config = small_config(tmp_path)

    assert cmd_run(config, show_progress=False) == 0

    root = config.output
    with open(os.path.join(root, "sweep.json")) as fp:
        listing = json.load(fp)
    assert listing["members"] == ["kappa_0.2", "kappa_0.15"]
    for kappa in config.kappa:
        directory = member_directory(root, kappa)
        with open(os.path.join(directory, "manifest.json")) as fp:
            manifest = json.load(fp)
        assert set(manifest) == MANIFEST_KEYS
        assert manifest["kappa"] == kappa
        assert manifest["completed"] is True
        assert manifest["violation"] is None
        assert manifest["steps"] == 2
        assert manifest["snapshots"] == ["step_000000.esl", "step_000001.esl", "step_000002.esl"]

    report = sweep_report([root])
    assert [row["kappa"] for row in report["rows"]] == [0.2, 0.15]
    assert report["band"]
    assert report["non_shrinking"]
    assert report["uniform"]
    assert len(report["gaps"]) == 1
    assert main(["sweep-report", root]) == 0

    out = str(tmp_path / "picture.png")
    assert cmd_picture(member_directory(root, 0.15), out, size=16) == 0
    with Image.open(out) as image:
        assert image.size[0] > 0


def test_sweep_report_needs_two_runs(tmp_path):
    config = small_config(tmp_path).replace(kappa=[0.2])
    cmd_run(config, show_progress=False)

    assert main(["sweep-report", config.output]) == 2
    assert main(["sweep-report", str(tmp_path / "nothing"), str(tmp_path / "nowhere")]) == 2


def test_main_verbs(tmp_path):
    assert main([]) == 2
    assert main(["configs"]) == 0
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    out = str(tmp_path / "reports" / "verify.json")
    assert main(["verify", "--check", "boundary_norm", "--n", "16", "--quiet", "--out", out]) == 0
    with open(out) as fp:
        report = json.load(fp)
    assert [check["name"] for check in report["checks"]] == ["boundary_norm"]
    assert report["seed"] == 12345
    assert report["n"] == 16


def test_verify_records_the_seed(tmp_path):
    out = str(tmp_path / "verify.json")
    assert main(["verify", "--check", "ig0_round_trip", "--n", "8", "--seed", "7", "--quiet", "--out", out]) == 0
    with open(out) as fp:
        report = json.load(fp)
    assert report["seed"] == 7
    assert report["config"]["seed"] == 7
    assert report["checks"][0]["passed"]

    config = RunConfig(n1=8, n2=8, seed=21)
    out = str(tmp_path / "again.json")
    assert cmd_verify(config, ["ig0_round_trip"], out, quiet=True) == 0
    with open(out) as fp:
        report = json.load(fp)
    assert report["n"] == 8
    assert report["seed"] == 21
