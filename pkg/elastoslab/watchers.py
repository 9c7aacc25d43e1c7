# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import io
import os

from .diagnostics import CSV_COLUMNS
from .snapshots import snapshot_name, state_fields, write_snapshot
from .utils import format_float


class Watcher:
    def __init__(self, simulation):
        self.simulation = simulation
        self.last_step = None

    def draw(self):
        """
        Some watchers need to be told explicitly when a run is over.
        """
        raise NotImplementedError("need to implement watcher.draw()")

    def update(self):
        """
        Called after every step.
        """
        raise NotImplementedError("need to implement watcher.update()")

    def reset(self):
        """
        Some watchers hold state and need to be reset.
        """
        raise NotImplementedError("need to implement watcher.reset()")

    def fresh_record(self):
        """
        The simulation's record if it was measured at the current step
        and this watcher has not seen it yet.
        """
        record = self.simulation.fresh_record()
        if record is None or record.step == self.last_step:
            return None
        self.last_step = record.step
        return record


class Recorder(Watcher):
    """
    Keeps the (state, record) pairs of a run.
    """

    def __init__(self, simulation):
        super().__init__(simulation)
        self.snapshots = []

    def draw(self):
        pass

    def update(self):
        record = self.fresh_record()
        if record is not None:
            state = self.simulation.state
            # drop the cache; it holds every elliptic subproblem
            self.snapshots.append((state.derive(state.t, state.eta, state.v, state.F), record))

    def reset(self):
        self.snapshots = []
        self.last_step = None

    @property
    def states(self):
        return [state for (state, record) in self.snapshots]

    @property
    def records(self):
        return [record for (state, record) in self.snapshots]


class CSVWriter(Watcher):
    """
    Writes energy.csv, one row per record.
    """

    def __init__(self, simulation, filename):
        super().__init__(simulation)
        self.filename = filename
        self.rows = 0
        self.reset()

    def draw(self):
        pass

    def update(self):
        record = self.fresh_record()
        if record is not None:
            with io.open(self.filename, "a", encoding="utf-8", newline="\n") as fp:
                fp.write(",".join(format_float(value) for value in record.row()) + "\n")
            self.rows += 1

    def reset(self):
        directory = os.path.dirname(self.filename)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with io.open(self.filename, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(",".join(CSV_COLUMNS) + "\n")
        self.rows = 0
        self.last_step = None


class SnapshotWriter(Watcher):
    """
    Dumps the fields of the current state every `every` steps and once
    more when the run ends.
    """

    def __init__(self, simulation, directory, every=50):
        super().__init__(simulation)
        self.directory = directory
        self.every = every
        self.files = []

    def write(self):
        from .evolution import solve_state_pressure

        simulation = self.simulation
        state = simulation.state
        if "q" not in state.cache:
            solve_state_pressure(state)
        name = snapshot_name(simulation.step_count)
        write_snapshot(os.path.join(self.directory, name), state.t, state_fields(state))
        self.files.append(name)
        self.last_step = simulation.step_count

    def draw(self):
        if self.every > 0 and self.last_step != self.simulation.step_count:
            self.write()

    def update(self):
        step = self.simulation.step_count
        if self.every > 0 and step % self.every == 0 and step != self.last_step:
            self.write()

    def reset(self):
        self.files = []
        self.last_step = None
