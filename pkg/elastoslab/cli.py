# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Command line verbs:

    elastoslab run --config standard --out runs/standard --jobs 4
    elastoslab verify --config standard --seed 7 --n 32
    elastoslab sweep-report runs/standard
    elastoslab picture --run runs/standard/kappa_0.1 --out standard.png
"""

import argparse
import glob
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import ElastoslabError, MissingRun
from .grid import Grid
from .runconfig import RunConfig, build_initial_data
from .simulation import Simulation
from .snapshots import read_snapshot
from .utils import json_dump, load_config, versions
from .watchers import CSVWriter, SnapshotWriter

UNIFORMITY_BAND = 0.1


def member_directory(root, kappa):
    return os.path.join(root, "kappa_%r" % (kappa,))


def run_member(config, kappa, directory, show_progress=False):
    """
    One run of a sweep: writes energy.csv, snapshots/ and manifest.json
    into directory and returns the manifest.

    Args:
        * config: (dict) RunConfig.to_json() output
        * kappa: (float) this member's kappa
        * directory: (str) output directory
    """
    config = RunConfig(**config)
    os.makedirs(directory, exist_ok=True)
    start = time.monotonic()
    if not config.quiet:
        print("Random seed set to:", config.seed)
    initial = build_initial_data(config)
    simulation = Simulation(
        initial,
        kappa=kappa,
        dt=config.dt,
        cfl=config.cfl,
        record_every=config.record_every,
        track_deformation=config.track_deformation,
        quiet=config.quiet,
    )
    simulation.watchers.append(CSVWriter(simulation, os.path.join(directory, "energy.csv")))
    snapshots = SnapshotWriter(simulation, os.path.join(directory, "snapshots"), config.snapshot_every)
    simulation.watchers.append(snapshots)
    simulation.seconds(config.T, show_progress=show_progress, quiet=config.quiet)
    manifest = {
        "config": config.to_json(),
        "kappa": kappa,
        "seed": config.seed,
        "versions": versions(),
        "wall_time": time.monotonic() - start,
        "steps": simulation.step_count,
        "T_run": simulation.time,
        "completed": simulation.reached(config.T),
        "violation": None if simulation.violation is None else simulation.violation.to_json(),
        "M0": simulation.M0,
        "snapshots": list(snapshots.files),
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fp:
        json_dump(manifest, fp)
    return manifest


def cmd_run(config, out=None, jobs=1, show_progress=True):
    """
    One run per kappa of the configuration, in parallel when jobs > 1.

    Returns the exit status: 0 when every member ran (a priori
    violations included), 1 on a solver failure.
    """
    root = out if out is not None else config.output
    os.makedirs(root, exist_ok=True)
    kappas = list(config.kappa)
    directories = [member_directory(root, kappa) for kappa in kappas]
    with open(os.path.join(root, "sweep.json"), "w") as fp:
        json_dump(
            {"kappa": kappas, "members": [os.path.basename(d) for d in directories], "config": config.to_json()}, fp
        )
    status = 0
    if jobs > 1 and len(kappas) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(run_member, config.to_json(), kappa, directory)
                for kappa, directory in zip(kappas, directories)
            ]
            results = []
            for kappa, future in zip(kappas, futures):
                try:
                    results.append(future.result())
                except ElastoslabError as exc:
                    print("kappa=%r failed: %s" % (kappa, exc))
                    status = 1
    else:
        results = []
        for kappa, directory in zip(kappas, directories):
            try:
                results.append(run_member(config.to_json(), kappa, directory, show_progress))
            except ElastoslabError as exc:
                print("kappa=%r failed: %s" % (kappa, exc))
                status = 1
    if not config.quiet:
        for manifest in results:
            print(
                "kappa=%-8r steps=%-6d T_run=%-10.6g completed=%s"
                % (manifest["kappa"], manifest["steps"], manifest["T_run"], manifest["completed"])
            )
    return status


def cmd_verify(config=None, names=None, out=None, n=None, show_progress=True, quiet=False):
    """
    Run the property suite; exit status 1 iff any check fails.

    Args:
        * config: (RunConfig) supplies the seed of the randomized checks
          and, unless n is given, the base resolution n1
        * names: (list of str) run only these checks
        * out: (str) write the report, seed included, as JSON
        * n: (int) base resolution
    """
    from .verify import run_checks

    config = config if config is not None else RunConfig()
    n = config.n1 if n is None else n
    if not quiet:
        print("Random seed set to:", config.seed)
    results = run_checks(n=n, names=names, seed=config.seed, show_progress=show_progress, quiet=quiet)
    if out is not None:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        report = {
            "n": n,
            "seed": config.seed,
            "config": config.to_json(),
            "checks": [result.to_json() for result in results],
            "versions": versions(),
        }
        with open(out, "w") as fp:
            json_dump(report, fp)
    failed = [result.name for result in results if not result.passed]
    if not quiet:
        print("%d checks, %d failed%s" % (len(results), len(failed), (": " + ", ".join(failed)) if failed else ""))
    return 1 if failed else 0


def read_energy(directory):
    """
    energy.csv as a structured array with one field per column.
    """
    filename = os.path.join(directory, "energy.csv")
    data = np.genfromtxt(filename, delimiter=",", names=True, dtype=float, encoding="utf-8")
    return np.atleast_1d(data)


def _members(directories):
    members = []
    for directory in directories:
        sweep = os.path.join(directory, "sweep.json")
        if os.path.exists(sweep):
            with open(sweep) as fp:
                listing = json.load(fp)
            members.extend(os.path.join(directory, name) for name in listing["members"])
        else:
            members.append(directory)
    return members


def load_run(directory):
    for name in ("manifest.json", "energy.csv"):
        if not os.path.exists(os.path.join(directory, name)):
            raise MissingRun("no %s in %r" % (name, directory))
    with open(os.path.join(directory, "manifest.json")) as fp:
        manifest = json.load(fp)
    return manifest, read_energy(directory)


def trajectory_gap(first, second):
    """
    sup over common snapshot times of ||eta_first - eta_second||_2.
    """
    names = sorted(set(first["snapshots"]) & set(second["snapshots"]))
    if not names:
        return math.nan
    config = first["config"]
    grid = Grid(config["n1"], config["n2"], config["n3"])
    gap = 0.0
    for name in names:
        a = read_snapshot(os.path.join(first["directory"], "snapshots", name))[1]["eta_displacement"]
        b = read_snapshot(os.path.join(second["directory"], "snapshots", name))[1]["eta_displacement"]
        gap = max(gap, grid.sobolev_norm(a - b, 2))
    return gap


def sweep_report(directories):
    """
    Summary of a kappa sweep.

    Returns a dict with one row per member (kappa descending) and the
    uniformity verdict. Raises MissingRun when a member is incomplete
    or fewer than two runs are given.
    """
    members = _members(directories)
    if len(members) < 2:
        raise MissingRun("a sweep report needs at least two runs, got %d" % len(members))
    rows = []
    for directory in members:
        manifest, energy = load_run(directory)
        manifest["directory"] = directory
        rows.append(
            {
                "kappa": manifest["kappa"],
                "sup_E_kappa": float(np.nanmax(energy["E_kappa"])),
                "M0": manifest["M0"],
                "T_run": manifest["T_run"],
                "completed": manifest["completed"],
                "violation": manifest["violation"] is not None,
                "manifest": manifest,
            }
        )
    rows.sort(key=lambda row: -row["kappa"])
    gaps = [trajectory_gap(a["manifest"], b["manifest"]) for a, b in zip(rows, rows[1:])]
    sups = [row["sup_E_kappa"] for row in rows]
    band = (max(sups) - min(sups)) <= UNIFORMITY_BAND * min(sups)
    times = [row["T_run"] for row in rows]
    non_shrinking = all(later >= earlier * (1 - 1e-12) for earlier, later in zip(times, times[1:]))
    finite = [gap for gap in gaps if math.isfinite(gap)]
    contracting = len(finite) == len(gaps) and all(b < a for a, b in zip(finite, finite[1:]))
    for row in rows:
        del row["manifest"]
    return {
        "rows": rows,
        "gaps": gaps,
        "band": band,
        "non_shrinking": non_shrinking,
        "contracting": contracting,
        "uniform": band and non_shrinking and all(row["completed"] for row in rows),
    }


def print_report(report):
    print("%-10s %-22s %-22s %-12s %-9s %-9s" % ("kappa", "sup E_kappa", "M0", "T_run", "complete", "violated"))
    for row in report["rows"]:
        print(
            "%-10r %-22.17g %-22.17g %-12.6g %-9s %-9s"
            % (row["kappa"], row["sup_E_kappa"], row["M0"], row["T_run"], row["completed"], row["violation"])
        )
    for (a, b), gap in zip(zip(report["rows"], report["rows"][1:]), report["gaps"]):
        print("gap kappa=%r -> %r: %.6g" % (a["kappa"], b["kappa"], gap))
    print(
        "kappa-uniformity: %s (band %s, T_run non-shrinking %s, gaps contracting %s)"
        % (
            "PASS" if report["uniform"] else "FAIL",
            report["band"],
            report["non_shrinking"],
            report["contracting"],
        )
    )


def cmd_sweep_report(directories, out=None, quiet=False):
    report = sweep_report(directories)
    if out is not None:
        with open(out, "w") as fp:
            json_dump(report, fp)
    if not quiet:
        print_report(report)
    return 0 if report["uniform"] else 1


def cmd_picture(directory, out, size=128):
    from .pictures import energy_to_image, gallery, snapshot_pictures

    energy = read_energy(directory)
    images = [energy_to_image(energy["t"], energy["E_kappa"], width=2 * size, height=size)]
    files = sorted(glob.glob(os.path.join(directory, "snapshots", "*.esl")))
    if files:
        images.extend(snapshot_pictures(read_snapshot(files[-1])[1], size))
    gallery(*images).save(out)
    return 0


def _load(args):
    if args.config is None:
        config = RunConfig()
    else:
        config = load_config(args.config)
        if config is None:
            return None
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "quiet", False):
        changes["quiet"] = True
    return config.replace(**changes) if changes else config


def make_parser():
    parser = argparse.ArgumentParser(prog="elastoslab", description="Free-boundary elastodynamics laboratory")
    verbs = parser.add_subparsers(dest="verb")

    run = verbs.add_parser("run", help="run every kappa of a configuration")
    run.add_argument("--config", help="config file or name on the search path")
    run.add_argument("--out", help="output directory (default: the config's output)")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers")
    run.add_argument("--seed", type=int, help="override the config's seed")
    run.add_argument("--quiet", action="store_true")

    verify = verbs.add_parser("verify", help="run the property suite")
    verify.add_argument("--config", help="config file or name; supplies the seed and the resolution")
    verify.add_argument("--n", type=int, help="base resolution (default: the config's n1)")
    verify.add_argument("--seed", type=int, help="override the config's seed")
    verify.add_argument("--check", action="append", help="run only this check (repeatable)")
    verify.add_argument("--out", help="write the report as JSON")
    verify.add_argument("--quiet", action="store_true")

    report = verbs.add_parser("sweep-report", help="summarize a kappa sweep")
    report.add_argument("runs", nargs="+", help="sweep roots or run directories")
    report.add_argument("--out", help="write the report as JSON")

    picture = verbs.add_parser("picture", help="render the last snapshot and the energy curve")
    picture.add_argument("--run", required=True, help="run directory")
    picture.add_argument("--out", required=True, help="PNG file")
    picture.add_argument("--size", type=int, default=128)

    verbs.add_parser("configs", help="list the available configurations")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "run":
            config = _load(args)
            if config is None:
                return 2
            return cmd_run(config, args.out, args.jobs, show_progress=not config.quiet)
        elif args.verb == "verify":
            config = _load(args)
            if config is None:
                return 2
            return cmd_verify(config, args.check, args.out, args.n, show_progress=not args.quiet, quiet=args.quiet)
        elif args.verb == "sweep-report":
            return cmd_sweep_report(args.runs, args.out)
        elif args.verb == "picture":
            return cmd_picture(args.run, args.out, args.size)
        elif args.verb == "configs":
            load_config()
            return 0
    except MissingRun as exc:
        print("Missing run: %s" % exc)
        return 2
    except ElastoslabError as exc:
        print("Error: %s" % exc)
        return 1
    parser.print_help()
    return 2


if __name__ == "__main__":
    sys.exit(main())
