# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import math
import signal
import time
from contextlib import contextmanager
from itertools import count
from numbers import Number

from . import evolution
from .diagnostics import record_state
from .errors import StepRejected
from .mollifier import make_kernel
from .utils import format_time, progress_bar

DEFAULT_HANDLER = signal.getsignal(signal.SIGINT)


class Trajectory:
    """
    The outcome of a run: the recorded (state, record) pairs, whether
    the final time was reached, and the a priori status that stopped it
    early (None otherwise).
    """

    def __init__(self, snapshots, completed, violation=None, T_run=0.0, M0=None, steps=0):
        self.snapshots = list(snapshots)
        self.completed = completed
        self.violation = violation
        self.T_run = T_run
        self.M0 = M0
        self.steps = steps

    def __repr__(self):
        return "<Trajectory %d records, T_run=%.6g, completed=%s>" % (
            len(self.snapshots),
            self.T_run,
            self.completed,
        )

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)

    def __getitem__(self, item):
        return self.snapshots[item]

    @property
    def states(self):
        return [state for (state, record) in self.snapshots]

    @property
    def records(self):
        return [record for (state, record) in self.snapshots]

    def sup_energy(self):
        """
        sup over the recorded times of E_kappa.
        """
        return max(record.E_kappa for record in self.records)

    def to_json(self):
        return {
            "completed": self.completed,
            "violation": None if self.violation is None else self.violation.to_json(),
            "T_run": self.T_run,
            "M0": self.M0,
            "steps": self.steps,
            "records": len(self.snapshots),
        }


class Simulation:
    """
    The kappa-system started from one set of initial data.
    """

    def __init__(
        self,
        initial,
        kappa=0.1,
        dt=1e-3,
        cfl=0.3,
        record_every=10,
        track_deformation=True,
        quiet=False,
        **kwargs
    ):
        """
        Args:
            * initial: (InitialData) validated initial data
            * kappa: (float) mollification scale
            * dt: (float) time step; 0 means cfl * h_min / speed of the
              initial state
            * cfl: (float) CFL factor
            * record_every: (int) steps between energy records
            * track_deformation: (bool) co-evolve F for the F = grad eta G0 check
            * quiet: (bool) if True, don't print any messages
        """
        config = {
            "kappa": kappa,
            "dt": dt,
            "cfl": cfl,
            "record_every": record_every,
            "track_deformation": track_deformation,
            "quiet": quiet,
        }
        if len(kwargs) != 0:
            raise AttributeError("unknown arguments for Simulation: %s" % list(kwargs.keys()))
        self.initial = initial
        self.grid = initial.v0.grid
        self.step_display = "tqdm"
        self.watchers = []
        self.config = config.copy()
        self.initialize()  # default values
        self.reset()  # from config

    def __repr__(self):
        return "<Simulation kappa=%r, t=%.6g, on %r>" % (self.kappa, self.time, self.grid)

    def initialize(self):
        """
        Sets the default values.
        """
        self.quiet = False
        self.kappa = 0.1
        self.kernel = None
        self.dt = 1e-3
        self.cfl = 0.3
        self.record_every = 10
        self.track_deformation = True
        self.stop = False  # should stop?
        self.state = None
        self.step_count = 0
        self.last_record = None
        self.violation = None
        self.M0 = None
        self.baseline = None
        self.last_dt = None

    def reset(self):
        """
        Back to the initial data.
        """
        self.reset_watchers()
        self.from_json(self.config)
        self.state = evolution.initial_state(self.initial, self.kernel, self.track_deformation)
        self.step_count = 0
        self.last_record = None
        self.violation = None
        self.M0 = None
        self.baseline = None
        self.last_dt = None
        self.stop = False

    def from_json(self, config):
        self.config = config
        if "quiet" in config:
            self.quiet = config["quiet"]
        if "cfl" in config:
            self.cfl = config["cfl"]
        if "dt" in config:
            dt = config["dt"]
            if not isinstance(dt, Number) or dt < 0 or not math.isfinite(dt):
                raise ValueError("Invalid dt: %r; should be a positive number or 0" % (dt,))
            self.dt = dt
        if "record_every" in config:
            if not isinstance(config["record_every"], int) or config["record_every"] < 1:
                raise ValueError("Invalid record_every: %r; should be a positive int" % (config["record_every"],))
            self.record_every = config["record_every"]
        if "track_deformation" in config:
            self.track_deformation = bool(config["track_deformation"])
        if "kappa" in config:
            self.kappa = config["kappa"]
            self.kernel = make_kernel(self.kappa, self.grid)

    def to_json(self):
        config = dict(self.config)
        config["grid"] = self.grid.to_json()
        return config

    @property
    def time(self):
        return self.state.t if self.state is not None else 0.0

    def record(self):
        """
        Attach (or return the attached) Recorder.
        """
        from .watchers import Recorder

        for watcher in self.watchers:
            if isinstance(watcher, Recorder):
                return watcher
        recorder = Recorder(self)
        self.watchers.append(recorder)
        return recorder

    def draw_watchers(self):
        for watcher in self.watchers:
            watcher.draw()

    def reset_watchers(self):
        for watcher in self.watchers:
            watcher.reset()

    def update_watchers(self):
        for watcher in self.watchers:
            watcher.update()

    def del_watchers(self):
        self.watchers[:] = []

    def observe(self):
        """
        Measure the EnergyRecord of the current state.
        """
        record = record_state(self.state, self.step_count, self.M0, self.baseline)
        if self.M0 is None:
            self.M0 = record.E_kappa
            self.baseline = record.baseline
        self.last_record = record
        return record

    def fresh_record(self):
        if self.last_record is not None and self.last_record.step == self.step_count:
            return self.last_record
        return None

    def time_step(self, dt=None):
        """
        The step to use: dt, else the configured dt, else the CFL limit of
        the current state.
        """
        dt = self.dt if dt is None else dt
        if dt == 0:
            dt = evolution.cfl_limit(self.state, self.cfl)
            if math.isinf(dt):
                # a state at rest has no speed; use unit speed
                dt = self.cfl * self.grid.h_min
        return dt

    def _signal_handler(self, *args, **kwargs):
        """
        Handler for Control+C.
        """
        self.stop = True

    @contextmanager
    def _no_interrupt(self):
        """
        Suspends signal handling execution
        """
        self.stop = False
        signal.signal(signal.SIGINT, self._signal_handler)

        try:
            yield None
        finally:
            signal.signal(signal.SIGINT, DEFAULT_HANDLER)

    def step(self, dt=None):
        """
        Advance by one Runge-Kutta step.

        Args:
            * dt: (Number, optional) the time step

        Raises StepRejected, leaving the state untouched, when a stage
        leaves the a priori regime.
        """
        if dt is not None and not isinstance(dt, Number):
            raise ValueError("Invalid time_step: %r; should be a number or None" % (dt,))
        dt = self.time_step(dt)
        self.state = evolution.step(self.state, dt, self.cfl)
        self.step_count += 1
        if self.step_count % self.record_every == 0:
            self.observe()
        self.update_watchers()

    def steps(self, steps=1, dt=None, show_progress=True, quiet=False):
        """
        Run for N steps, or until the a priori regime is left or
        Control+C is pressed.

        Args:
            * steps: (int) either a finite number, or infinity
            * dt: (float, optional) the time step
            * show_progress: (bool) show a progress bar
            * quiet: (bool) if True, do not show the status message when
              completed
        """
        dt = self.time_step(dt)
        self.last_dt = dt
        if self.last_record is None:
            self.observe()
            self.update_watchers()
        if steps == float("inf"):
            step_iter = count()
        else:
            step_iter = range(steps)
        with self._no_interrupt():
            start_real_time = time.monotonic()
            start_time = self.time
            for _ in progress_bar(step_iter, show_progress and not quiet and not self.quiet, self.step_display):
                if self.stop:
                    break
                try:
                    self.step(dt)
                except StepRejected as exc:
                    self.violation = exc.violation.status
                    if not quiet and not self.quiet:
                        print("A priori regime left after t=%.6g: %r" % (self.time, self.violation))
                    break

        if self.fresh_record() is None:
            self.observe()
            self.update_watchers()
        stop_real_time = time.monotonic()
        speed = (self.time - start_time) / max(stop_real_time - start_real_time, 1e-12)
        if steps > 1 and not quiet and not self.quiet:
            print(
                "Simulation stopped at: %s; speed %s x real time"
                % (format_time(self.time), round(speed, 6))
            )
        self.draw_watchers()

    def seconds(self, seconds=0.5, dt=None, show_progress=True, quiet=False):
        """
        Run for `seconds` of simulated time.
        """
        dt = self.time_step(dt)
        steps = int(round(seconds / dt))
        self.steps(steps, dt, show_progress, quiet)

    def reached(self, T):
        """
        True when the run got to time T (within half a step) without
        leaving the a priori regime.
        """
        dt = abs(self.last_dt) if self.last_dt is not None else 0.0
        return self.violation is None and self.time >= T - 0.5 * dt

    def run(self, T=0.5, dt=None, show_progress=True, quiet=False):
        """
        Run up to time T and return the Trajectory.
        """
        recorder = self.record()
        dt = self.time_step(dt)
        self.seconds(max(T - self.time, 0.0), dt, show_progress, quiet)
        return Trajectory(recorder.snapshots, self.reached(T), self.violation, self.time, self.M0, self.step_count)


def run(initial, kappa, T, dt, record_every=10, track_deformation=True, quiet=True, show_progress=False):
    """
    Integrate the kappa-system from initial data up to time T.

    A priori violations end the run early; the truncated trajectory is
    returned with the violation report.
    """
    simulation = Simulation(
        initial,
        kappa=kappa,
        dt=dt,
        record_every=record_every,
        track_deformation=track_deformation,
        quiet=quiet,
    )
    return simulation.run(T, show_progress=show_progress, quiet=quiet)
