"""
aghf: the affine geometric heat flow on a Chebyshev grid
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
    Trajectory: node samples of x(t, s) at one value of s.
    SolverConfig: flow horizon, tolerances, and integrator selection.
    FlowRecord: one row of the flow history.
    FlowTrace: history of an integrated flow.
    Phase: Lagrangian, solver settings and grid degree of one phase.
    aghf_rhs: right-hand side of the flow at every node.
    flow: integrates the flow from s = 0 to s_max.
    action_functional: quadrature of the Lagrangian along a trajectory.
    feasibility_defect: largest |xdot_P1 - x_P2| over the nodes.
    measured_defect: integral of |uc|^2 over the horizon.
    defect_bound: action / kd, an upper bound on the measured defect.
    initial_guess: boundary-respecting starting trajectory.
    solve_phase1_phase2: feasibility phase followed by optimization phase.

The flow state handed to the integrators holds only the interior rows of the
trajectory, so the boundary rows stay bit-for-bit equal to x0 and xf.

To Do:


"""
from __future__ import annotations

import concurrent.futures
import dataclasses
import logging
import os
import time
from typing import Any, Optional

import numpy as np

from . import configuration
from . import dynamics
from . import errors
from . import integrators
from . import lagrangian
from . import pseudospectral
from . import reports
from . import validators

logger = logging.getLogger(__name__)

TIMINGS: tuple[str, ...] = ('smooth', 'linear')


@dataclasses.dataclass(eq = False)
class Trajectory(object):
    """State samples on a spectral grid with pinned boundary rows.

    Args:
        grid (pseudospectral.SpectralGrid): collocation grid.
        values (np.ndarray): (p + 1) x 2N state samples.
        x0 (np.ndarray): initial state, equal to values[0].
        xf (np.ndarray): final state, equal to values[p].

    """
    grid: pseudospectral.SpectralGrid
    values: np.ndarray
    x0: np.ndarray
    xf: np.ndarray

    """ Initialization Methods """

    def __post_init__(self) -> None:
        self.values = validators.FINITE.validate(self.values, name = 'values')
        self.x0 = validators.FINITE.validate(self.x0, name = 'x0')
        self.xf = validators.FINITE.validate(self.xf, name = 'xf')
        width = self.x0.size
        if self.x0.ndim != 1 or width % 2 or self.xf.shape != self.x0.shape:
            raise errors.DomainError(
                'x0 and xf must be 2N-vectors of the same length')
        validators.Shape(shape = (self.grid.size, width)).validate(
            self.values, name = 'values')
        if not (np.array_equal(self.values[0], self.x0)
                and np.array_equal(self.values[-1], self.xf)):
            raise errors.DomainError(
                'trajectory boundary rows must equal x0 and xf')

    @classmethod
    def create(
        cls,
        grid: pseudospectral.SpectralGrid,
        values: Any,
        x0: Any,
        xf: Any) -> Trajectory:
        """Builds a trajectory after overwriting the boundary rows.

        Args:
            grid (pseudospectral.SpectralGrid): collocation grid.
            values (Any): (p + 1) x 2N samples. Rows 0 and p are replaced.
            x0 (Any): initial state.
            xf (Any): final state.

        Returns:
            Trajectory: the pinned trajectory.

        """
        samples = np.array(values, dtype = float)
        start = np.asarray(x0, dtype = float)
        end = np.asarray(xf, dtype = float)
        if samples.shape == (grid.size, start.size) == (grid.size, end.size):
            samples[0] = start
            samples[-1] = end
        return cls(grid = grid, values = samples, x0 = start, xf = end)

    """ Properties """

    @property
    def dof(self) -> int:
        return self.x0.size // 2

    @property
    def times(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def positions(self) -> np.ndarray:
        return self.values[:, :self.dof]

    @property
    def velocities(self) -> np.ndarray:
        return self.values[:, self.dof:]

    """ Public Methods """

    def derivative(self) -> np.ndarray:
        """Returns xdot at the nodes by spectral differentiation."""
        return self.grid.differentiate(self.values)

    def interior(self) -> np.ndarray:
        """Returns the flattened interior rows (the flow state)."""
        return self.values[1:-1].ravel()

    def with_interior(self, interior: np.ndarray) -> Trajectory:
        """Returns a copy whose interior rows are taken from 'interior'."""
        values = np.empty_like(self.values)
        values[0] = self.x0
        values[-1] = self.xf
        values[1:-1] = np.reshape(interior, (self.grid.size - 2, -1))
        return Trajectory(
            grid = self.grid, values = values, x0 = self.x0, xf = self.xf)

    def resample(self, grid: pseudospectral.SpectralGrid) -> Trajectory:
        """Interpolates the trajectory onto another grid of the same horizon.

        Raises:
            DomainError: if the horizons differ.

        """
        if grid.horizon != self.grid.horizon:
            raise errors.DomainError(
                f'cannot resample a horizon of {self.grid.horizon} onto '
                f'{grid.horizon}')
        if grid.degree == self.grid.degree:
            return self
        values = self.grid.interpolate(self.values, grid.nodes)
        return Trajectory.create(grid, values, self.x0, self.xf)


@dataclasses.dataclass(eq = False, kw_only = True)
class SolverConfig(object):
    """Settings of one flow integration.

    Args:
        s_max (float): flow horizon. Defaults to 0.5.
        rel_tol (float): relative tolerance. Defaults to 1e-8.
        abs_tol (float): absolute tolerance. Defaults to 1e-10.
        max_steps (int): accepted-step budget. Defaults to 100000.
        initial_step (Optional[float]): first step size. Defaults to None,
            which lets the integrator choose.
        steady_state_tol (float): the flow stops early once the infinity norm
            of the right-hand side is at most this value. Defaults to 1e-6.
        parallel_nodes (bool): whether node gradients are evaluated on a
            thread pool. Defaults to False.
        method (str): registered integrator kind. Defaults to 'bdf'.
        stall_rtol (float): relative action decrease over the last tenth of
            the horizon above which an unsettled flow counts as stalled.
            Defaults to 1e-2.
        workers (Optional[int]): thread count for 'parallel_nodes'. Defaults
            to None, meaning the CPU count.

    """
    s_max: float = configuration.DEFAULT_S_MAX
    rel_tol: float = configuration.DEFAULT_REL_TOL
    abs_tol: float = configuration.DEFAULT_ABS_TOL
    max_steps: int = configuration.DEFAULT_MAX_STEPS
    initial_step: Optional[float] = None
    steady_state_tol: float = configuration.DEFAULT_STEADY_STATE_TOL
    parallel_nodes: bool = False
    method: str = configuration.DEFAULT_METHOD
    stall_rtol: float = configuration.DEFAULT_STALL_RTOL
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ('s_max', 'rel_tol', 'abs_tol', 'steady_state_tol',
                     'stall_rtol'):
            validators.POSITIVE.validate(getattr(self, name), name = name)
        validators.Minimum(minimum = 1, allow_equal = True).validate(
            self.max_steps, name = 'max_steps')
        if self.initial_step is not None:
            validators.POSITIVE.validate(
                self.initial_step, name = 'initial_step')
        if self.workers is not None:
            validators.Minimum(minimum = 1, allow_equal = True).validate(
                self.workers, name = 'workers')
        # Fails early on an unknown method name.
        integrators.FlowIntegrator.registry.withdraw(self.method)

    def integrator(self) -> integrators.FlowIntegrator:
        """Returns the configured flow integrator."""
        return integrators.FlowIntegrator.create(
            self.method,
            rel_tol = self.rel_tol,
            abs_tol = self.abs_tol,
            first_step = self.initial_step)


@dataclasses.dataclass(frozen = True)
class FlowRecord(object):
    """State of the flow after an accepted step.

    'defect' is the integral of |uc|^2, which stays below action / kd.

    """
    s: float
    action: float
    rhs_norm: float
    violation: float
    defect: float = np.nan


@dataclasses.dataclass(eq = False, kw_only = True)
class FlowTrace(object):
    """History of one flow integration.

    Args:
        records (list[FlowRecord]): one record at s = 0 and one per accepted
            step.
        accepted (int): accepted steps.
        rejected (Optional[int]): rejected trial steps, when the integrator
            reports them.
        nfev (int): right-hand side evaluations.
        wall_time (float): seconds spent integrating.
        steady_state (bool): whether the flow stopped on the steady-state
            test.
        method (str): integrator kind.

    """
    records: list[FlowRecord] = dataclasses.field(default_factory = list)
    accepted: int = 0
    rejected: Optional[int] = None
    nfev: int = 0
    wall_time: float = 0.0
    steady_state: bool = False
    method: str = configuration.DEFAULT_METHOD

    def __len__(self) -> int:
        return len(self.records)

    @property
    def s(self) -> np.ndarray:
        return np.array([r.s for r in self.records])

    @property
    def actions(self) -> np.ndarray:
        return np.array([r.action for r in self.records])

    @property
    def rhs_norms(self) -> np.ndarray:
        return np.array([r.rhs_norm for r in self.records])

    @property
    def violations(self) -> np.ndarray:
        return np.array([r.violation for r in self.records])

    @property
    def defects(self) -> np.ndarray:
        return np.array([r.defect for r in self.records])

    def as_array(self) -> np.ndarray:
        """Returns rows (s, action, rhs_norm, violation)."""
        return np.array(
            [[r.s, r.action, r.rhs_norm, r.violation] for r in self.records],
            dtype = float).reshape(-1, 4)

    def stalled(self, s_max: float, rtol: float) -> bool:
        """Returns whether the action still moved at the end of the flow.

        A flow is stalled when it did not stop on the steady-state test and
        the action fell by more than 'rtol' (relative) over the last tenth of
        the horizon.

        """
        if self.steady_state or len(self.records) < 2:  # noqa: PLR2004
            return False
        s = self.s
        actions = self.actions
        start = s[-1] - configuration.STALL_WINDOW * s_max
        earlier = actions[s <= start]
        before = earlier[-1] if earlier.size else actions[0]
        drop = before - actions[-1]
        return bool(drop > rtol * max(abs(before), np.finfo(float).tiny))


@dataclasses.dataclass(eq = False, kw_only = True)
class Phase(object):
    """One phase of a solve.

    Args:
        spec (lagrangian.LagrangianSpec): Lagrangian of the phase.
        config (SolverConfig): flow settings.
        degree (int): Chebyshev degree p. Defaults to 12.

    """
    spec: lagrangian.LagrangianSpec
    config: SolverConfig = dataclasses.field(default_factory = SolverConfig)
    degree: int = configuration.DEFAULT_DEGREE


""" Right-Hand Side """


def _gradients(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray,
    parallel: bool = False,
    workers: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Returns node gradients for flat (K, 2N) inputs.

    Each node is independent, so splitting the batch over threads yields the
    same numbers as the sequential path.

    """
    if not parallel:
        return lagrangian.lagrangian_gradients(spec, model, x, xdot)
    count = workers or os.cpu_count() or 1
    chunks = min(count, x.shape[0])
    pieces = list(zip(
        np.array_split(x, chunks), np.array_split(xdot, chunks)))
    with concurrent.futures.ThreadPoolExecutor(max_workers = count) as pool:
        results = list(pool.map(
            lambda pair: lagrangian.lagrangian_gradients(
                spec, model, pair[0], pair[1]),
            pieces))
    return (
        np.concatenate([r[0] for r in results]),
        np.concatenate([r[1] for r in results]))


def _stacked_rhs(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    grid: pseudospectral.SpectralGrid,
    values: np.ndarray,
    parallel: bool = False,
    workers: Optional[int] = None) -> np.ndarray:
    """Evaluates the flow for a stack of trajectories, shape (C, p + 1, 2N)."""
    stack, nodes, width = values.shape
    xdot = np.einsum('ij,cjk->cik', grid.diff_matrix, values)
    flat_x = values.reshape(-1, width)
    dl_dx, dl_dxdot = _gradients(
        spec, model, flat_x, xdot.reshape(-1, width), parallel, workers)
    dl_dx = dl_dx.reshape(stack, nodes, width)
    dl_dxdot = dl_dxdot.reshape(stack, nodes, width)
    residual = np.einsum('ij,cjk->cik', grid.diff_matrix, dl_dxdot) - dl_dx
    rhs = lagrangian.metric_solve(
        spec, model, flat_x, residual.reshape(-1, width))
    rhs = rhs.reshape(stack, nodes, width)
    rhs[:, 0] = 0.0
    rhs[:, -1] = 0.0
    if not np.all(np.isfinite(rhs)):
        raise errors.NonFiniteError('heat flow right-hand side is not finite')
    return rhs


def aghf_rhs(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory,
    parallel_nodes: bool = False) -> np.ndarray:
    """Returns d(values)/ds at every node.

    Interior rows are M^-1 (D dL/dxdot - dL/dx), with xdot = D values and D
    the spectral differentiation matrix. Penalty terms sit inside the same
    expression. Boundary rows are zero.

    Args:
        spec (lagrangian.LagrangianSpec): the Lagrangian.
        model (dynamics.RobotModel): the robot.
        traj (Trajectory): current trajectory.
        parallel_nodes (bool): evaluate node gradients on a thread pool.
            Defaults to False.

    Raises:
        NonFiniteError: if any entry is NaN or infinite.

    Returns:
        np.ndarray: (p + 1) x 2N right-hand side.

    """
    return _stacked_rhs(
        spec, model, traj.grid, traj.values[None], parallel_nodes)[0]


def _rhs_norm(rhs: np.ndarray) -> float:
    return float(np.max(np.abs(rhs))) if rhs.size else 0.0


def action_functional(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory) -> float:
    """Returns the Clenshaw-Curtis quadrature of L along 'traj'."""
    values = lagrangian.lagrangian_values(
        spec, model, traj.values, traj.derivative())
    return traj.grid.integrate(values)


def _violation(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory) -> float:
    return lagrangian.max_violation(
        spec, model, traj.values, traj.derivative())


def feasibility_defect(model: dynamics.RobotModel, traj: Trajectory) -> float:
    """Returns max over nodes of |xdot_P1 - x_P2| (infinity norm)."""
    n = model.dof
    rates = traj.derivative()
    return float(np.max(np.abs(rates[:, :n] - traj.values[:, n:])))


def measured_defect(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory) -> float:
    """Returns the integral of |uc|^2 over the horizon.

    'spec' is accepted for symmetry with 'defect_bound'; the defect does not
    depend on it.

    """
    _, uc = dynamics.extract_controls(model, traj.values, traj.derivative())
    return traj.grid.integrate(np.sum(uc**2, axis = -1))


def defect_bound(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory) -> float:
    """Returns action / kd, which bounds 'measured_defect' from above."""
    return action_functional(spec, model, traj) / spec.kd


""" Flow Integration """


def _record(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory,
    s: float,
    rhs: np.ndarray) -> FlowRecord:
    return FlowRecord(
        s = float(s),
        action = action_functional(spec, model, traj),
        rhs_norm = _rhs_norm(rhs),
        violation = _violation(spec, model, traj),
        defect = measured_defect(spec, model, traj))


def flow(
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    initial: Trajectory,
    config: SolverConfig) -> tuple[Trajectory, FlowTrace]:
    """Integrates the heat flow from s = 0 to s_max.

    The method of lines turns the flow into an ODE system in s over the
    interior node values. Every accepted step is recorded, and integration
    stops early once the right-hand side norm drops to steady_state_tol.

    Args:
        spec (lagrangian.LagrangianSpec): the Lagrangian.
        model (dynamics.RobotModel): the robot.
        initial (Trajectory): trajectory at s = 0.
        config (SolverConfig): flow settings.

    Raises:
        StepSizeUnderflow: if the integrator cannot make progress. The last
            accepted trajectory and the trace are attached.
        MaxStepsExceeded: if max_steps steps do not reach s_max.
        NonFiniteError: if the right-hand side stops being finite.

    Returns:
        tuple[Trajectory, FlowTrace]: final trajectory and its history.

    """
    started = time.perf_counter()
    trace = FlowTrace(method = config.method)
    grid = initial.grid
    rows = grid.size - 2
    width = initial.x0.size
    boundary = (initial.x0, initial.xf)

    def fun(s: float, y: np.ndarray) -> np.ndarray:
        columns = y.reshape(y.shape[0], -1)
        stack = np.empty((columns.shape[1], grid.size, width))
        stack[:, 0] = boundary[0]
        stack[:, -1] = boundary[1]
        stack[:, 1:-1] = columns.T.reshape(-1, rows, width)
        rhs = _stacked_rhs(
            spec, model, grid, stack, config.parallel_nodes, config.workers)
        interior = rhs[:, 1:-1].reshape(columns.shape[1], -1).T
        return interior.reshape(y.shape)

    current = initial
    rhs = aghf_rhs(spec, model, current, config.parallel_nodes)
    trace.records.append(_record(spec, model, current, 0.0, rhs))
    if rows == 0 or trace.records[-1].rhs_norm <= config.steady_state_tol:
        trace.steady_state = True
        trace.wall_time = time.perf_counter() - started
        logger.debug('initial trajectory is already at steady state')
        return current, trace
    solver = config.integrator().start(
        fun, 0.0, current.interior(), config.s_max)
    while solver.status == 'running':
        message = solver.step()
        if solver.status == 'failed':
            trace.nfev = solver.nfev
            trace.rejected = getattr(solver, 'rejected', None)
            trace.wall_time = time.perf_counter() - started
            raise errors.StepSizeUnderflow(
                f'{config.method} integrator failed: {message}',
                trajectory = current,
                trace = trace)
        trace.accepted += 1
        current = current.with_interior(solver.y)
        rhs = aghf_rhs(spec, model, current, config.parallel_nodes)
        trace.records.append(_record(spec, model, current, solver.t, rhs))
        logger.debug(
            's = %.6g action = %.10g rhs = %.3e',
            solver.t, trace.records[-1].action, trace.records[-1].rhs_norm)
        if trace.records[-1].rhs_norm <= config.steady_state_tol:
            trace.steady_state = True
            break
        if solver.status == 'running' and trace.accepted >= config.max_steps:
            trace.nfev = solver.nfev
            trace.rejected = getattr(solver, 'rejected', None)
            trace.wall_time = time.perf_counter() - started
            raise errors.MaxStepsExceeded(
                f'flow used {config.max_steps} steps before s = '
                f'{config.s_max}',
                trajectory = current,
                trace = trace)
    trace.nfev = solver.nfev
    trace.rejected = getattr(solver, 'rejected', None)
    trace.wall_time = time.perf_counter() - started
    logger.debug(
        'flow finished at s = %.6g after %d steps (%d evaluations)',
        trace.records[-1].s, trace.accepted, trace.nfev)
    return current, trace


""" Initial Guesses """


def initial_guess(
    grid: pseudospectral.SpectralGrid,
    x0: Any,
    xf: Any,
    timing: str = 'smooth') -> Trajectory:
    """Builds a starting trajectory between two states.

    Configurations follow a cubic Hermite blend that honours the boundary
    velocities ('smooth'), or a constant-rate straight line ('linear').
    Either way the interior velocities are the spectral derivative of the
    configurations.

    Args:
        grid (pseudospectral.SpectralGrid): collocation grid.
        x0 (Any): initial state, a 2N-vector.
        xf (Any): final state, a 2N-vector.
        timing (str): 'smooth' or 'linear'. Defaults to 'smooth'.

    Raises:
        DomainError: if 'timing' is unknown or the states are malformed.

    Returns:
        Trajectory: the guess.

    """
    if timing not in TIMINGS:
        raise errors.DomainError(
            f'timing must be one of {TIMINGS}, got {timing!r}')
    start = dynamics.StatePoint.from_vector(x0)
    end = dynamics.StatePoint.from_vector(xf)
    if start.position.shape != end.position.shape:
        raise errors.DomainError('x0 and xf must have the same length')
    tau = (grid.nodes / grid.horizon)[:, None]
    if timing == 'linear':
        positions = start.position + tau * (end.position - start.position)
    else:
        horizon = grid.horizon
        positions = (
            (2 * tau**3 - 3 * tau**2 + 1) * start.position
            + (tau**3 - 2 * tau**2 + tau) * horizon * start.velocity
            + (3 * tau**2 - 2 * tau**3) * end.position
            + (tau**3 - tau**2) * horizon * end.velocity)
    velocities = grid.differentiate(positions)
    return Trajectory.create(
        grid, np.hstack((positions, velocities)),
        start.as_vector(), end.as_vector())


def _as_trajectory(
    guess: Any,
    grid: pseudospectral.SpectralGrid,
    x0: np.ndarray,
    xf: np.ndarray,
    timing: str) -> Trajectory:
    if guess is None:
        return initial_guess(grid, x0, xf, timing)
    if isinstance(guess, Trajectory):
        if not (np.array_equal(guess.x0, x0) and np.array_equal(guess.xf, xf)):
            raise errors.DomainError(
                'initial guess does not respect the boundary states')
        return guess.resample(grid)
    return Trajectory.create(grid, guess, x0, xf)


""" Phase 1 / Phase 2 """


def solve_phase1_phase2(
    model: dynamics.RobotModel,
    x0: Any,
    xf: Any,
    horizon: float,
    phase1: Phase,
    phase2: Phase,
    guess: Optional[Any] = None,
    timing: str = 'smooth',
    feasibility_tol: Optional[float] = None) -> reports.SolveReport:
    """Drives a guess into the feasible set, then optimizes within it.

    Phase 1 is skipped when the guess already satisfies every constraint to
    within 'feasibility_tol'. Its result is interpolated onto the Phase-2
    grid when the degrees differ.

    Args:
        model (dynamics.RobotModel): the robot.
        x0 (Any): initial state.
        xf (Any): final state.
        horizon (float): final time T.
        phase1 (Phase): feasibility phase (mode 'phase1' Lagrangian).
        phase2 (Phase): optimization phase.
        guess (Optional[Any]): Trajectory or (p + 1) x 2N samples on the
            Phase-1 grid. Defaults to None, which builds one with
            'initial_guess'.
        timing (str): timing of the built guess. Defaults to 'smooth'.
        feasibility_tol (float): largest acceptable constraint value after
            Phase 1. Defaults to None, meaning 1e-3.

    Raises:
        Phase1Failed: if Phase 1 ends with a constraint value above
            'feasibility_tol'. The partial report is attached.
        Phase2Stalled: if Phase 2 neither settled nor flattened out. The
            report is attached.

    Returns:
        reports.SolveReport: flow results without evaluation data.

    """
    if feasibility_tol is None:
        feasibility_tol = configuration.FEASIBILITY_TOL
    started = time.perf_counter()
    start = validators.FINITE.validate(np.atleast_1d(x0), name = 'x0')
    end = validators.FINITE.validate(np.atleast_1d(xf), name = 'xf')
    grid1 = pseudospectral.build_grid(phase1.degree, horizon)
    grid2 = pseudospectral.build_grid(phase2.degree, horizon)
    current = _as_trajectory(guess, grid1, start, end, timing)
    violation = _violation(phase1.spec, model, current)
    if violation <= feasibility_tol:
        logger.info(
            'phase 1 skipped: guess violation %.3e is within %.1e',
            violation, feasibility_tol)
        record1 = reports.PhaseRecord(
            name = 'phase1', skipped = True, trajectory = current,
            max_violation = violation)
    else:
        logger.info('phase 1 started: guess violation %.3e', violation)
        clock = time.perf_counter()
        current, trace = flow(phase1.spec, model, current, phase1.config)
        violation = _violation(phase1.spec, model, current)
        record1 = reports.PhaseRecord(
            name = 'phase1', skipped = False, trajectory = current,
            trace = trace, max_violation = violation,
            wall_time = time.perf_counter() - clock)
        logger.info(
            'phase 1 finished: violation %.3e after %d steps',
            violation, trace.accepted)
        if violation > feasibility_tol:
            report = _report(
                'phase1_failed', phase2.spec, model, current, record1, None,
                started)
            raise errors.Phase1Failed(
                f'phase 1 ended with constraint value {violation:.3e} above '
                f'{feasibility_tol:.1e}',
                report = report)
    current = current.resample(grid2)
    logger.info('phase 2 started')
    clock = time.perf_counter()
    current, trace = flow(phase2.spec, model, current, phase2.config)
    record2 = reports.PhaseRecord(
        name = 'phase2', skipped = False, trajectory = current,
        trace = trace, max_violation = _violation(phase2.spec, model, current),
        wall_time = time.perf_counter() - clock)
    logger.info(
        'phase 2 finished: action %.10g after %d steps',
        trace.actions[-1], trace.accepted)
    if trace.stalled(phase2.config.s_max, phase2.config.stall_rtol):
        report = _report(
            'phase2_stalled', phase2.spec, model, current, record1, record2,
            started)
        raise errors.Phase2Stalled(
            'phase 2 did not settle: the action was still falling at '
            f's = {phase2.config.s_max}',
            report = report)
    return _report(
        'solved', phase2.spec, model, current, record1, record2, started)


def _report(
    status: str,
    spec: lagrangian.LagrangianSpec,
    model: dynamics.RobotModel,
    traj: Trajectory,
    phase1: reports.PhaseRecord,
    phase2: Optional[reports.PhaseRecord],
    started: float) -> reports.SolveReport:
    action = action_functional(spec, model, traj)
    return reports.SolveReport(
        status = status,
        trajectory = traj,
        phase1 = phase1,
        phase2 = phase2,
        action = action,
        feasibility_defect = feasibility_defect(model, traj),
        measured_defect = measured_defect(spec, model, traj),
        defect_bound = action / spec.kd,
        max_violation = _violation(spec, model, traj),
        wall_times = {
            'phase1': phase1.wall_time,
            'phase2': 0.0 if phase2 is None else phase2.wall_time,
            'solve': time.perf_counter() - started})
