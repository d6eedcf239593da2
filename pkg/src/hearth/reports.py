"""
reports: result containers shared by the solver, evaluation, and the CLI
Corey Rayburn Yung <coreyrayburnyung@gmail.com>
Copyright 2020-2023, Corey Rayburn Yung
License: Apache-2.0

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.

Contents:
    STATUSES (tuple[str, ...]): possible solve outcomes.
    ControlSamples: states and extracted controls on a uniform time grid.
    Verdict: per-criterion success breakdown.
    PhaseRecord: what one phase of the solve did.
    SolveReport: everything produced by a solve.

To Do:


"""
from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

if TYPE_CHECKING:
    from . import aghf
    from . import evaluation

STATUSES: tuple[str, ...] = (
    'solved', 'phase1_failed', 'phase2_stalled', 'evaluation_failed')


@dataclasses.dataclass(eq = False)
class ControlSamples(object):
    """Uniformly sampled reference states and extracted controls.

    Args:
        times (np.ndarray): sample times, shape (S,).
        states (np.ndarray): reference states, shape (S, 2N).
        controls (np.ndarray): extracted controls u, shape (S, m).
        infeasibility (np.ndarray): auxiliary coordinates uc, shape
            (S, 2N - m).

    """
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    infeasibility: np.ndarray

    @property
    def count(self) -> int:
        return int(self.times.size)


@dataclasses.dataclass(eq = False, kw_only = True)
class Verdict(object):
    """Success criteria of a closed-loop run and the values behind them.

    Every pass flag is derived from the stored values, so a verdict read back
    from disk reproduces the same decisions.

    Args:
        terminal_error (float): infinity norm of x(T) - xf.
        epsilon (float): terminal threshold.
        margin (float): fractional slack applied to box bounds.
        box_excess (dict[str, float]): worst excess over each inflated box
            bound. A box passes when its excess is not positive.
        obstacle_excess (dict[str, float]): worst radius minus distance for
            each obstacle. An obstacle passes when its excess is negative.
        diverged (bool): whether the closed-loop simulation blew up.
            Defaults to False.

    """
    terminal_error: float
    epsilon: float
    margin: float
    box_excess: dict[str, float] = dataclasses.field(default_factory = dict)
    obstacle_excess: dict[str, float] = dataclasses.field(
        default_factory = dict)
    diverged: bool = False

    """ Properties """

    @property
    def terminal_ok(self) -> bool:
        return (not self.diverged) and self.terminal_error < self.epsilon

    @property
    def constraints_ok(self) -> bool:
        return all(value <= 0.0 for value in self.box_excess.values())

    @property
    def obstacles_ok(self) -> bool:
        return all(value < 0.0 for value in self.obstacle_excess.values())

    @property
    def success(self) -> bool:
        return self.terminal_ok and self.constraints_ok and self.obstacles_ok

    """ Public Methods """

    def to_dict(self) -> dict[str, Any]:
        """Returns a JSON-ready breakdown with values and decisions."""
        return {
            'success': self.success,
            'terminal': {
                'error': self.terminal_error,
                'epsilon': self.epsilon,
                'passed': self.terminal_ok},
            'constraints': {
                'margin': self.margin,
                'excess': dict(self.box_excess),
                'passed': self.constraints_ok},
            'obstacles': {
                'excess': dict(self.obstacle_excess),
                'passed': self.obstacles_ok},
            'diverged': self.diverged}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Verdict:
        """Rebuilds a verdict from the output of 'to_dict'."""
        return cls(
            terminal_error = float(data['terminal']['error']),
            epsilon = float(data['terminal']['epsilon']),
            margin = float(data['constraints']['margin']),
            box_excess = {
                k: float(v) for k, v in data['constraints']['excess'].items()},
            obstacle_excess = {
                k: float(v) for k, v in data['obstacles']['excess'].items()},
            diverged = bool(data.get('diverged', False)))


@dataclasses.dataclass(eq = False, kw_only = True)
class PhaseRecord(object):
    """Outcome of one phase.

    Args:
        name (str): 'phase1' or 'phase2'.
        skipped (bool): whether the phase was skipped.
        trajectory (aghf.Trajectory): trajectory the phase ended with.
        trace (Optional[aghf.FlowTrace]): flow history. None when skipped.
        max_violation (float): largest constraint value at the end.
        wall_time (float): seconds spent in the phase.

    """
    name: str
    skipped: bool
    trajectory: aghf.Trajectory
    trace: Optional[aghf.FlowTrace] = None
    max_violation: float = -np.inf
    wall_time: float = 0.0

    @property
    def initial_action(self) -> Optional[float]:
        return None if self.trace is None else self.trace.actions[0]

    @property
    def final_action(self) -> Optional[float]:
        return None if self.trace is None else self.trace.actions[-1]


@dataclasses.dataclass(eq = False, kw_only = True)
class SolveReport(object):
    """Everything a Phase 1 / Phase 2 solve produced.

    The solver fills the flow results. Evaluation later attaches the dense
    controls, the closed-loop verdict and the error-bound diagnostic.

    Args:
        status (str): one of STATUSES.
        trajectory (aghf.Trajectory): final trajectory.
        phase1 (PhaseRecord): Phase 1 outcome (possibly skipped).
        phase2 (Optional[PhaseRecord]): Phase 2 outcome. None when Phase 1
            failed.
        action (float): Phase-2 action functional of 'trajectory'.
        feasibility_defect (float): max over nodes of |xdot_P1 - x_P2|.
        measured_defect (float): integral of |uc|^2 over the horizon.
        defect_bound (float): action / kd, which bounds 'measured_defect'.
        max_violation (float): largest constraint value at the nodes.
        controls (Optional[ControlSamples]): dense controls. Defaults to
            None.
        verdict (Optional[Verdict]): closed-loop verdict. Defaults to None.
        error_bound (Optional[float]): estimated feasibility error bound.
            Defaults to None.
        constants (Optional[evaluation.ErrorBoundConstants]): constants used
            for 'error_bound'. Defaults to None.
        wall_times (dict[str, float]): seconds per stage.

    """
    status: str
    trajectory: aghf.Trajectory
    phase1: PhaseRecord
    phase2: Optional[PhaseRecord] = None
    action: float = np.nan
    feasibility_defect: float = np.nan
    measured_defect: float = np.nan
    defect_bound: float = np.nan
    max_violation: float = -np.inf
    controls: Optional[ControlSamples] = None
    verdict: Optional[Verdict] = None
    error_bound: Optional[float] = None
    constants: Optional[evaluation.ErrorBoundConstants] = None
    wall_times: dict[str, float] = dataclasses.field(default_factory = dict)

    """ Properties """

    @property
    def phase1_skipped(self) -> bool:
        return self.phase1.skipped

    @property
    def success(self) -> bool:
        """Returns whether the solve finished and passed its verdict."""
        return (
            self.status == 'solved'
            and self.verdict is not None
            and self.verdict.success)

    @property
    def action_history(self) -> np.ndarray:
        """Returns (s, action) rows of Phase 2, or of Phase 1 if it failed."""
        record = self.phase2 if self.phase2 is not None else self.phase1
        if record.trace is None:
            return np.zeros((0, 2))
        return np.column_stack((record.trace.s, record.trace.actions))

    """ Public Methods """

    def summary(self) -> dict[str, Any]:
        """Returns a JSON-ready summary of the solve."""
        phases = {}
        for record in (self.phase1, self.phase2):
            if record is None:
                continue
            phases[record.name] = {
                'skipped': record.skipped,
                'initial_action': record.initial_action,
                'final_action': record.final_action,
                'max_violation': _finite_or_none(record.max_violation),
                'wall_time': record.wall_time,
                'steps': (
                    None if record.trace is None else record.trace.accepted),
                'rejected': (
                    None if record.trace is None else record.trace.rejected),
                'steady_state': (
                    None if record.trace is None
                    else record.trace.steady_state)}
        summary = {
            'status': self.status,
            'success': self.success,
            'action': self.action,
            'feasibility_defect': self.feasibility_defect,
            'measured_defect': self.measured_defect,
            'defect_bound': self.defect_bound,
            'max_violation': _finite_or_none(self.max_violation),
            'phases': phases,
            'wall_times': dict(self.wall_times),
            'verdict': None if self.verdict is None else self.verdict.to_dict(),
            'error_bound': None}
        if self.error_bound is not None and self.constants is not None:
            summary['error_bound'] = {
                'value': self.error_bound,
                'label': 'estimated',
                'constants': self.constants.to_dict()}
        return summary


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None
