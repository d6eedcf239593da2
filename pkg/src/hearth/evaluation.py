"""
evaluation: closed-loop replay, success criteria, and error-bound diagnostics
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
    PROVENANCES (tuple[str, ...]): origins of error-bound constants.
    EvaluationConfig: feedback gains, success thresholds, and sampling.
    ErrorBoundConstants: C1, C2, C3, Y1 and Y2 of the feasibility bound.
    Reference (abc.ABC): reference states and feedforward controls in time.
    SampledReference (Reference): linear interpolation of dense samples.
    SpectralReference (Reference): barycentric interpolation of a
        trajectory with controls extracted on the fly.
    ClosedLoopRun: sampled closed-loop states and applied controls.
    sample_times: uniform sample times on [0, T].
    extract_control_trajectory: dense controls along a trajectory.
    closed_loop_integrate: simulates the robot under feedforward plus PD
        feedback.
    open_loop_error: largest deviation when the extracted control is
        replayed without feedback.
    evaluate_success: success verdict of a closed-loop run.
    feasibility_error_bound: estimated bound on the replay error.
    estimate_constants: sampled estimates of the bound's constants.
    evaluate_report: attaches controls, verdict, and bound to a report.
    replay: closed-loop run plus verdict, failing on divergence.

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
import logging
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
from scipy import integrate

from . import aghf
from . import configuration
from . import constraints as constraint_specs
from . import dynamics
from . import errors
from . import lagrangian
from . import reports
from . import validators

logger = logging.getLogger(__name__)

PROVENANCES: tuple[str, ...] = ('user_supplied', 'sampled_estimate')


@dataclasses.dataclass(eq = False, kw_only = True)
class EvaluationConfig(object):
    """Settings of the closed-loop check.

    Args:
        kp (float): position feedback gain. Defaults to 100.
        kv (float): velocity feedback gain. Defaults to 100.
        epsilon (float): terminal error threshold. Defaults to 0.05.
        constraint_margin (float): fractional slack on box bounds. Defaults
            to 0.05.
        obstacle_dt (float): sampling step of the checks in s. Defaults to
            1e-2.
        dense_dt (float): spacing of emitted controls in s. Defaults to 1e-3.
        rel_tol (float): relative tolerance of the simulation. Defaults to
            1e-8.
        abs_tol (float): absolute tolerance of the simulation. Defaults to
            1e-10.
        divergence_norm (float): state norm treated as divergence. Defaults
            to 1e6.
        seed (int): seed of the constant estimation. Defaults to 0.
        estimate_samples (int): random states per sampling box. Defaults to
            64.
        box_scale (float): largest sampling box, relative to the bounding
            box of the trajectory. Defaults to 1.0.

    """
    kp: float = configuration.DEFAULT_KP
    kv: float = configuration.DEFAULT_KV
    epsilon: float = configuration.DEFAULT_EPSILON
    constraint_margin: float = configuration.DEFAULT_CONSTRAINT_MARGIN
    obstacle_dt: float = configuration.DEFAULT_OBSTACLE_DT
    dense_dt: float = configuration.DEFAULT_DENSE_DT
    rel_tol: float = configuration.DEFAULT_REL_TOL
    abs_tol: float = configuration.DEFAULT_ABS_TOL
    divergence_norm: float = configuration.DIVERGENCE_NORM
    seed: int = configuration.DEFAULT_SEED
    estimate_samples: int = configuration.DEFAULT_ESTIMATE_SAMPLES
    box_scale: float = configuration.DEFAULT_BOX_SCALE

    def __post_init__(self) -> None:
        for name in ('kp', 'kv', 'epsilon', 'constraint_margin',
                     'obstacle_dt', 'dense_dt', 'rel_tol', 'abs_tol',
                     'divergence_norm', 'box_scale'):
            validators.POSITIVE.validate(getattr(self, name), name = name)
        validators.Minimum(minimum = 1, allow_equal = True).validate(
            self.estimate_samples, name = 'estimate_samples')


@dataclasses.dataclass(eq = False, kw_only = True)
class ErrorBoundConstants(object):
    """Constants of the feasibility error bound.

    Sampled estimates are lower bounds of the true global constants, so any
    bound computed from them is an estimate.

    Args:
        C1 (float): bound on the action of the solution.
        C2 (float): bound on |Fc|.
        C3 (float): bound on the integral of |u|^2.
        Y1 (float): Lipschitz constant of the drift fd.
        Y2 (float): Lipschitz constant of the actuated field F.
        provenance (str): 'user_supplied' or 'sampled_estimate'. Defaults to
            'user_supplied'.

    """
    C1: float  # noqa: N815
    C2: float  # noqa: N815
    C3: float  # noqa: N815
    Y1: float  # noqa: N815
    Y2: float  # noqa: N815
    provenance: str = 'user_supplied'

    def __post_init__(self) -> None:
        for name in ('C1', 'C2', 'C3', 'Y1', 'Y2'):
            value = validators.FINITE.validate(
                getattr(self, name), name = name)
            validators.NON_NEGATIVE.validate(value, name = name)
            setattr(self, name, float(value))
        if self.provenance not in PROVENANCES:
            raise errors.DomainError(
                f'provenance must be one of {PROVENANCES}, got '
                f'{self.provenance!r}')

    def to_dict(self) -> dict[str, Any]:
        return {
            'C1': self.C1, 'C2': self.C2, 'C3': self.C3, 'Y1': self.Y1,
            'Y2': self.Y2, 'provenance': self.provenance}


@dataclasses.dataclass(eq = False)
class Reference(abc.ABC):
    """Reference states x*(t) and feedforward controls u*(t) on [0, T]."""

    """ Required Subclass Methods """

    @property
    @abc.abstractmethod
    def horizon(self) -> float:
        """Returns T."""

    @abc.abstractmethod
    def state(self, t: float) -> np.ndarray:
        """Returns x*(t) as a 2N-vector."""

    @abc.abstractmethod
    def control(self, t: float) -> np.ndarray:
        """Returns u*(t) as an m-vector."""


@dataclasses.dataclass(eq = False)
class SampledReference(Reference):
    """Piecewise-linear reference through dense samples.

    Args:
        times (np.ndarray): increasing sample times starting at 0.
        states (np.ndarray): states at 'times', shape (S, 2N).
        controls (np.ndarray): controls at 'times', shape (S, m).

    """
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray

    def __post_init__(self) -> None:
        self.times = validators.FINITE.validate(self.times, name = 'times')
        count = self.times.size
        states = validators.FINITE.validate(self.states, name = 'states')
        controls = validators.FINITE.validate(
            self.controls, name = 'controls')
        if count < 2 or np.any(np.diff(self.times) <= 0):  # noqa: PLR2004
            raise errors.DomainError(
                'reference times must be increasing with at least 2 samples')
        if np.ndim(states) == 0 or np.ndim(controls) == 0 or (
                states.shape[0] != count or controls.shape[0] != count):
            raise errors.DomainError(
                'reference states and controls need one row per time')
        self.states = states.reshape(count, -1)
        self.controls = controls.reshape(count, -1)

    @classmethod
    def from_samples(cls, samples: reports.ControlSamples) -> SampledReference:
        return cls(
            times = samples.times,
            states = samples.states,
            controls = samples.controls)

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def _lookup(self, table: np.ndarray, t: float) -> np.ndarray:
        return np.array(
            [np.interp(t, self.times, column) for column in table.T])

    def state(self, t: float) -> np.ndarray:
        return self._lookup(self.states, t)

    def control(self, t: float) -> np.ndarray:
        return self._lookup(self.controls, t)


@dataclasses.dataclass(eq = False)
class SpectralReference(Reference):
    """Reference read directly off a spectral trajectory.

    Args:
        model (dynamics.RobotModel): robot used for control extraction.
        trajectory (aghf.Trajectory): solved trajectory.

    """
    model: dynamics.RobotModel
    trajectory: aghf.Trajectory

    def __post_init__(self) -> None:
        self._rates = self.trajectory.derivative()

    @property
    def horizon(self) -> float:
        return float(self.trajectory.grid.horizon)

    def _clipped(self, t: float) -> float:
        return float(np.clip(t, 0.0, self.horizon))

    def state(self, t: float) -> np.ndarray:
        grid = self.trajectory.grid
        return grid.interpolate(self.trajectory.values, self._clipped(t))

    def control(self, t: float) -> np.ndarray:
        grid = self.trajectory.grid
        time = self._clipped(t)
        u, _ = dynamics.extract_controls(
            self.model,
            grid.interpolate(self.trajectory.values, time),
            grid.interpolate(self._rates, time))
        return u


@dataclasses.dataclass(eq = False)
class ClosedLoopRun(object):
    """Closed-loop states and applied controls at the check times."""
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray


def sample_times(horizon: float, dt: float) -> np.ndarray:
    """Returns 0, dt, 2 dt, ... up to T, always ending at T.

    There are floor(T / dt) + 1 uniform samples. T is appended when it is not
    already the last one.

    """
    validators.POSITIVE.validate(horizon, name = 'horizon')
    validators.POSITIVE.validate(dt, name = 'dt')
    count = int(np.floor(horizon / dt + 1e-9)) + 1
    times = np.arange(count) * dt
    times = times[times <= horizon]
    if horizon - times[-1] > 1e-9 * horizon:
        times = np.append(times, horizon)
    else:
        times[-1] = horizon
    return times


def extract_control_trajectory(
    model: dynamics.RobotModel,
    traj: aghf.Trajectory,
    dense_dt: float = configuration.DEFAULT_DENSE_DT) -> reports.ControlSamples:
    """Extracts the control along 'traj' on a uniform grid.

    States and their spectral derivatives are interpolated to the samples and
    passed through control extraction.

    Args:
        model (dynamics.RobotModel): the robot.
        traj (aghf.Trajectory): solved trajectory.
        dense_dt (float): sample spacing. Defaults to 1e-3.

    Returns:
        reports.ControlSamples: floor(T / dense_dt) + 1 samples (plus T when
            the spacing does not divide T).

    """
    grid = traj.grid
    times = sample_times(grid.horizon, dense_dt)
    states = grid.interpolate(traj.values, times)
    rates = grid.interpolate(traj.derivative(), times)
    controls, infeasibility = dynamics.extract_controls(model, states, rates)
    return reports.ControlSamples(
        times = times,
        states = states,
        controls = controls,
        infeasibility = infeasibility)


def _simulate(
    model: dynamics.RobotModel,
    reference: Reference,
    config: EvaluationConfig,
    kp: float,
    kv: float) -> ClosedLoopRun:
    n = model.dof
    actuation = model.actuation

    def applied(t: float, y: np.ndarray) -> np.ndarray:
        target = reference.state(t)
        correction = kp * (target[:n] - y[:n]) + kv * (target[n:] - y[n:])
        return reference.control(t) + actuation.T @ correction

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        qdd = model.forward_dynamics(y[:n], y[n:], applied(t, y))
        return np.concatenate((y[n:], qdd))

    def diverged(t: float, y: np.ndarray) -> float:
        return config.divergence_norm - float(np.linalg.norm(y))

    diverged.terminal = True
    times = sample_times(reference.horizon, config.obstacle_dt)
    solution = integrate.solve_ivp(
        rhs, (0.0, reference.horizon), reference.state(0.0),
        method = 'RK45',
        t_eval = times,
        events = diverged,
        rtol = config.rel_tol,
        atol = config.abs_tol)
    if solution.status == 1:
        raise errors.DivergenceError(
            f'closed-loop state norm exceeded {config.divergence_norm:.1e} '
            f'at t = {solution.t_events[0][0]:.4g}')
    if solution.status != 0:
        raise errors.DivergenceError(
            f'closed-loop simulation failed: {solution.message}')
    states = solution.y.T
    controls = np.array(
        [applied(t, y) for t, y in zip(solution.t, states)])
    return ClosedLoopRun(
        times = solution.t, states = states, controls = controls)


def closed_loop_integrate(
    model: dynamics.RobotModel,
    reference: Reference,
    config: Optional[EvaluationConfig] = None) -> ClosedLoopRun:
    """Simulates H qdd + C = B u_fb from the reference's initial state.

    u_fb(t) = u*(t) + B^T (kp (q* - q) + kv (qd* - qd)), which is the usual
    PD correction around the feedforward when B = I. States are reported at
    the obstacle_dt check times.

    Args:
        model (dynamics.RobotModel): the robot.
        reference (Reference): reference and feedforward.
        config (Optional[EvaluationConfig]): settings. Defaults to None, which
            uses EvaluationConfig().

    Raises:
        DivergenceError: if the state norm exceeds divergence_norm or the
            integrator fails.

    Returns:
        ClosedLoopRun: sampled states and applied controls.

    """
    config = config or EvaluationConfig()
    return _simulate(model, reference, config, config.kp, config.kv)


def open_loop_error(
    model: dynamics.RobotModel,
    reference: Reference,
    config: Optional[EvaluationConfig] = None) -> float:
    """Returns max_t |x~(t) - x*(t)|_2 when u* is replayed without feedback."""
    config = config or EvaluationConfig()
    run = _simulate(model, reference, config, 0.0, 0.0)
    targets = np.array([reference.state(t) for t in run.times])
    return float(np.max(np.linalg.norm(run.states - targets, axis = -1)))


def _label(index: int, constraint: constraint_specs.ConstraintSpec) -> str:
    return f'{index}_{constraint.kind}'


def evaluate_success(
    model: dynamics.RobotModel,
    states: Any,
    controls: Any,
    constraints: Sequence[constraint_specs.ConstraintSpec],
    xf: Any,
    config: Optional[EvaluationConfig] = None) -> reports.Verdict:
    """Applies the success criteria to a sampled closed-loop run.

    The terminal criterion is |x(T) - xf|_inf < epsilon with x(T) the last
    sample. Each box bound is widened by constraint_margin times its
    magnitude and must hold at every sample. Every frame of the model must
    lie strictly outside every obstacle (bare radius) at every sample, even
    frames the obstacle penalty is not attached to.

    Args:
        model (dynamics.RobotModel): the robot.
        states (Any): sampled states, shape (S, 2N), ending at T.
        controls (Any): applied controls, shape (S, m).
        constraints (Sequence[constraint_specs.ConstraintSpec]): constraints
            to check.
        xf (Any): target final state.
        config (Optional[EvaluationConfig]): thresholds. Defaults to None,
            which uses EvaluationConfig().

    Returns:
        reports.Verdict: values and pass flags of every criterion.

    """
    config = config or EvaluationConfig()
    states = np.atleast_2d(np.asarray(states, dtype = float))
    controls = np.atleast_2d(np.asarray(controls, dtype = float))
    target = np.asarray(xf, dtype = float)
    terminal = float(np.max(np.abs(states[-1] - target)))
    if not np.isfinite(terminal):
        terminal = np.inf
    boxes: dict[str, float] = {}
    obstacles: dict[str, float] = {}
    for index, constraint in enumerate(constraints):
        excess = constraint.violation(
            model, states, controls, config.constraint_margin)
        if constraint.group == 'obstacle':
            obstacles[_label(index, constraint)] = excess
        else:
            boxes[_label(index, constraint)] = excess
    verdict = reports.Verdict(
        terminal_error = terminal,
        epsilon = config.epsilon,
        margin = config.constraint_margin,
        box_excess = boxes,
        obstacle_excess = obstacles)
    logger.info(
        'verdict: success=%s terminal=%.3e constraints=%s obstacles=%s',
        verdict.success, terminal, verdict.constraints_ok,
        verdict.obstacles_ok)
    return verdict


def feasibility_error_bound(
    constants: ErrorBoundConstants,
    T: float,  # noqa: N803
    kd: float) -> float:
    """Returns sqrt((3 T C1 C2^2 / kd) exp(3 T (Y1^2 T + Y2^2 C3))).

    Bounds |x~(t) - x(t)|_2, where x~ replays the extracted control of the
    solution x open loop.

    Raises:
        DomainError: if T or kd is not positive.

    """
    validators.POSITIVE.validate(T, name = 'T')
    validators.POSITIVE.validate(kd, name = 'kd')
    c = constants
    growth = 3.0 * T * (c.Y1**2 * T + c.Y2**2 * c.C3)
    return float(np.sqrt(3.0 * T * c.C1 * c.C2**2 / kd * np.exp(growth)))


def _rungs(box_scale: float) -> list[float]:
    """Returns quarter multiples up to 'box_scale', then 'box_scale'."""
    rungs = [0.25 * k for k in range(1, int(np.floor(box_scale / 0.25)) + 1)]
    if not rungs or not np.isclose(rungs[-1], box_scale):
        rungs.append(float(box_scale))
    return rungs


def _field_jacobian_norms(
    model: dynamics.RobotModel,
    points: np.ndarray) -> tuple[float, float, float]:
    """Returns sup |dfd/dx|, sup |dF/dx| and sup |Fc| over 'points'."""
    count, width = points.shape
    steps = configuration.FD_STEP * (1.0 + np.abs(points))
    shifts = steps[:, :, None] * np.eye(width)[None, :, :]
    stencil = np.concatenate(
        (points[:, None, :] + shifts, points[:, None, :] - shifts), axis = 1)
    fields = dynamics.affine_decomposition(model, stencil.reshape(-1, width))
    drift = fields.fd.reshape(count, 2, width, width)
    actuated = fields.F.reshape(count, 2, width, width, model.inputs)
    scale = 2.0 * steps[:, :, None]
    # Columns index the perturbed coordinate.
    drift_jac = np.swapaxes((drift[:, 0] - drift[:, 1]) / scale, 1, 2)
    actuated_diff = (actuated[:, 0] - actuated[:, 1]) / scale[..., None]
    actuated_jac = np.moveaxis(actuated_diff, 1, -1).reshape(count, -1, width)
    complement = dynamics.affine_decomposition(model, points).Fc
    return (
        float(np.max(np.linalg.norm(drift_jac, ord = 2, axis = (-2, -1)))),
        float(np.max(np.linalg.norm(actuated_jac, ord = 2, axis = (-2, -1)))),
        float(np.max(np.linalg.norm(complement, ord = 2, axis = (-2, -1)))))


def estimate_constants(
    model: dynamics.RobotModel,
    traj: aghf.Trajectory,
    action: float,
    seed: int = configuration.DEFAULT_SEED,
    samples: int = configuration.DEFAULT_ESTIMATE_SAMPLES,
    box_scale: float = configuration.DEFAULT_BOX_SCALE) -> ErrorBoundConstants:
    """Estimates the error-bound constants by sampling.

    C1 is the action with 10% headroom. C3 is the quadrature of |u|^2 along
    the solution. C2, Y1 and Y2 are suprema of |Fc| and of finite-difference
    Jacobian norms of fd and F over the nodes and over random states drawn
    from boxes around the trajectory. The boxes are the trajectory's bounding
    box scaled by 0.25, 0.5, ... up to 'box_scale', and each one is drawn
    from its own seeded stream, so a larger 'box_scale' only adds samples.

    Args:
        model (dynamics.RobotModel): the robot.
        traj (aghf.Trajectory): solved trajectory.
        action (float): action functional of 'traj'.
        seed (int): random seed. Defaults to 0.
        samples (int): random states per box. Defaults to 64.
        box_scale (float): largest box scale. Defaults to 1.0.

    Returns:
        ErrorBoundConstants: estimates marked 'sampled_estimate'.

    """
    validators.NON_NEGATIVE.validate(action, name = 'action')
    validators.POSITIVE.validate(box_scale, name = 'box_scale')
    values = traj.values
    low, high = values.min(axis = 0), values.max(axis = 0)
    center = 0.5 * (low + high)
    half = np.maximum(0.5 * (high - low), 0.1)
    points = [values]
    for index, scale in enumerate(_rungs(box_scale)):
        rng = np.random.default_rng([seed, index])
        draws = rng.uniform(-1.0, 1.0, size = (samples, values.shape[1]))
        points.append(center + scale * half * draws)
    y1, y2, c2 = _field_jacobian_norms(model, np.vstack(points))
    u, _ = dynamics.extract_controls(model, values, traj.derivative())
    c3 = traj.grid.integrate(np.sum(u**2, axis = -1))
    return ErrorBoundConstants(
        C1 = configuration.ACTION_HEADROOM * action,
        C2 = c2,
        C3 = max(c3, 0.0),
        Y1 = y1,
        Y2 = y2,
        provenance = 'sampled_estimate')


def evaluate_report(
    report: reports.SolveReport,
    model: dynamics.RobotModel,
    spec: lagrangian.LagrangianSpec,
    config: Optional[EvaluationConfig] = None) -> reports.SolveReport:
    """Attaches dense controls, the verdict, and the error bound to 'report'.

    The closed loop tracks the piecewise-linear reference through the dense
    samples, which is exactly what a saved solution replays.

    Args:
        report (reports.SolveReport): solve output.
        model (dynamics.RobotModel): the robot.
        spec (lagrangian.LagrangianSpec): Phase-2 Lagrangian, which supplies
            kd and the constraints to check.
        config (Optional[EvaluationConfig]): settings. Defaults to None.

    Returns:
        reports.SolveReport: 'report', updated in place.

    """
    config = config or EvaluationConfig()
    traj = report.trajectory
    report.controls = extract_control_trajectory(model, traj, config.dense_dt)
    report.verdict = replay(
        model,
        SampledReference.from_samples(report.controls),
        spec.constraints,
        traj.xf,
        config)
    try:
        report.constants = estimate_constants(
            model, traj, max(report.action, 0.0),
            seed = config.seed,
            samples = config.estimate_samples,
            box_scale = config.box_scale)
        report.error_bound = feasibility_error_bound(
            report.constants, traj.grid.horizon, spec.kd)
    except (errors.DecompositionError, errors.NonFiniteError) as error:
        logger.warning('skipped error-bound estimate: %s', error)
    return report


def replay(
    model: dynamics.RobotModel,
    reference: Reference,
    constraints: Sequence[constraint_specs.ConstraintSpec],
    xf: Any,
    config: Optional[EvaluationConfig] = None) -> reports.Verdict:
    """Runs the closed loop on 'reference' and judges it.

    Divergence yields a failing verdict instead of an exception.

    """
    config = config or EvaluationConfig()
    try:
        run = closed_loop_integrate(model, reference, config)
    except errors.DivergenceError as error:
        logger.warning('closed loop diverged: %s', error)
        return reports.Verdict(
            terminal_error = np.inf,
            epsilon = config.epsilon,
            margin = config.constraint_margin,
            diverged = True)
    return evaluate_success(
        model, run.states, run.controls, constraints, xf, config)
