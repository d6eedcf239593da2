"""
lagrangian: penalized Lagrangians and their Euler-Lagrange ingredients
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
    MODES (tuple[str, ...]): names of the Lagrangian modes.
    LagrangianSpec: running cost, dynamics weight kd, constraints and mode.
    lagrangian_values: batched Lagrangian.
    lagrangian_gradients: batched partial derivatives, analytic or by
        central differences.
    lagrangian_value, el_gradients: single-point versions of the above.
    constraint_values: every constraint value g stacked per point.
    max_violation: largest constraint value over a set of points.
    metric_solve: applies M^-1 of the selected mode.

The three modes differ only in the terms they add to kd |xdot_P1 - x_P2|^2:

    phase1: sum of penalties b(g) over all constraints.
    phase2: running cost c(x, xdot, u) plus the penalties.
    legacy: |H(q) xdot_P2 + C(q, x_P2)|^2 plus the penalties, paired with the
        metric M = diag(kd I, H^T H).

To Do:


"""
from __future__ import annotations

import dataclasses
import logging
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np

from . import configuration
from . import constraints as constraint_specs
from . import costs
from . import dynamics
from . import errors
from . import validators

logger = logging.getLogger(__name__)

MODES: tuple[str, ...] = ('phase1', 'phase2', 'legacy')
GRADIENT_METHODS: tuple[str, ...] = ('auto', 'analytic', 'finite_difference')


@dataclasses.dataclass(eq = False, kw_only = True)
class LagrangianSpec(object):
    """Everything needed to evaluate one Lagrangian.

    Args:
        cost (costs.CostSpec): running cost c(x, xdot, u). Ignored in phase1
            and legacy modes. Defaults to SquaredControl.
        kd (float): weight of the dynamics defect |xdot_P1 - x_P2|^2.
            Defaults to 1e4.
        constraints (Sequence[constraint_specs.ConstraintSpec]): penalized
            inequality constraints. Defaults to an empty tuple.
        mode (str): 'phase1', 'phase2' or 'legacy'. Defaults to 'phase2'.

    """
    cost: costs.CostSpec = dataclasses.field(
        default_factory = costs.SquaredControl)
    kd: float = configuration.DEFAULT_KD
    constraints: Sequence[constraint_specs.ConstraintSpec] = ()
    mode: str = 'phase2'

    def __post_init__(self) -> None:
        validators.POSITIVE.validate(self.kd, name = 'kd')
        self.kd = float(self.kd)
        if self.mode not in MODES:
            raise errors.DomainError(
                f'mode must be one of {MODES}, got {self.mode!r}')
        self.constraints = tuple(self.constraints)

    """ Properties """

    @property
    def uses_control(self) -> bool:
        """Returns whether the extracted control enters the Lagrangian."""
        return self.mode == 'phase2' or any(
            c.uses_control for c in self.constraints)

    """ Public Methods """

    def replace(self, **changes: Any) -> LagrangianSpec:
        """Returns a copy with 'changes' applied."""
        return dataclasses.replace(self, **changes)


def _pair(
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Returns flat (K, 2N) copies of 'x' and 'xdot' and the batch shape."""
    width = 2 * model.dof
    if isinstance(x, dynamics.StatePoint):
        x = x.as_vector()
    states = np.asarray(x, dtype = float)
    rates = np.asarray(xdot, dtype = float)
    for name, values in (('x', states), ('xdot', rates)):
        if values.ndim == 0 or values.shape[-1] != width:
            raise errors.DomainError(
                f'{name} must have trailing dimension {width}, got shape '
                f'{values.shape}')
    if states.shape != rates.shape:
        raise errors.DomainError(
            f'x and xdot shapes differ: {states.shape} vs {rates.shape}')
    batch = states.shape[:-1]
    return states.reshape(-1, width), rates.reshape(-1, width), batch


def _generalized_force(
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> np.ndarray:
    n = model.dof
    return model.inverse_dynamics(
        q = x[:, :n], qd = x[:, n:], qdd = xdot[:, n:])


def _generalized_force_jacobians(
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns tau = H xdot_P2 + C with d tau/dx and d tau/dxdot."""
    n = model.dof
    q = x[:, :n]
    tau, dq, dqd = model.inverse_dynamics_derivatives(
        q = q, qd = x[:, n:], qdd = xdot[:, n:])
    dtau_dx = np.concatenate((dq, dqd), axis = -1)
    dtau_dxdot = np.concatenate(
        (np.zeros_like(dq), model.mass_matrix(q)), axis = -1)
    return tau, dtau_dx, dtau_dxdot


def _controls(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> Optional[np.ndarray]:
    if not spec.uses_control:
        return None
    u, _ = dynamics.extract_controls(model, x, xdot)
    return u


def _values(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> np.ndarray:
    n = model.dof
    defect = xdot[:, :n] - x[:, n:]
    total = spec.kd * np.sum(defect**2, axis = -1)
    u = _controls(spec, model, x, xdot)
    if spec.mode == 'phase2':
        total = total + spec.cost.value(model, x, xdot, u)
    elif spec.mode == 'legacy':
        total = total + np.sum(
            _generalized_force(model, x, xdot)**2, axis = -1)
    for constraint in spec.constraints:
        total = total + constraint.penalties(model, x, u)
    return total


def lagrangian_values(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any) -> np.ndarray:
    """Evaluates the Lagrangian at a batch of points.

    Args:
        spec (LagrangianSpec): the Lagrangian.
        model (dynamics.RobotModel): the robot.
        x (Any): states with shape (..., 2N).
        xdot (Any): state time derivatives with shape (..., 2N).

    Returns:
        np.ndarray: values with the batch shape of 'x'.

    """
    states, rates, batch = _pair(model, x, xdot)
    return _values(spec, model, states, rates).reshape(batch)


def _analytic_gradients(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = model.dof
    defect = xdot[:, :n] - x[:, n:]
    dl_dx = np.zeros_like(x)
    dl_dxdot = np.zeros_like(xdot)
    dl_dxdot[:, :n] = 2.0 * spec.kd * defect
    dl_dx[:, n:] = -2.0 * spec.kd * defect
    u = du_dx = du_dxdot = None
    if spec.uses_control:
        u, du_dx, du_dxdot = dynamics.control_jacobians(model, x, xdot)
    if spec.mode == 'phase2':
        dc_dx, dc_dxdot, dc_du = spec.cost.gradients(model, x, xdot, u)
        dl_dx += dc_dx + np.einsum('ki,kij->kj', dc_du, du_dx)
        dl_dxdot += dc_dxdot + np.einsum('ki,kij->kj', dc_du, du_dxdot)
    elif spec.mode == 'legacy':
        tau, dtau_dx, dtau_dxdot = _generalized_force_jacobians(
            model, x, xdot)
        dl_dx += 2.0 * np.einsum('ki,kij->kj', tau, dtau_dx)
        dl_dxdot += 2.0 * np.einsum('ki,kij->kj', tau, dtau_dxdot)
    for constraint in spec.constraints:
        g = constraint.values(model, x, u)
        slope = constraint_specs.penalty_slope(g, constraint)
        dg_dx, dg_du = constraint.jacobians(model, x, u)
        dl_dx += np.einsum('kg,kgj->kj', slope, dg_dx)
        if constraint.uses_control:
            through = np.einsum('kg,kgi->ki', slope, dg_du)
            dl_dx += np.einsum('ki,kij->kj', through, du_dx)
            dl_dxdot += np.einsum('ki,kij->kj', through, du_dxdot)
    return dl_dx, dl_dxdot


def _step_sizes(values: np.ndarray) -> np.ndarray:
    return configuration.FD_STEP * (1.0 + np.abs(values))


def _finite_difference_gradients(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    xdot: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central differences with step 1e-6 (1 + |entry|), all in one batch."""
    count, width = x.shape
    joined = np.concatenate((x, xdot), axis = -1)
    steps = _step_sizes(joined)
    directions = np.eye(2 * width)
    shifts = steps[:, :, None] * directions[None, :, :]
    stencil = np.concatenate(
        (joined[:, None, :] + shifts, joined[:, None, :] - shifts), axis = 1)
    stencil = stencil.reshape(-1, 2 * width)
    values = _values(spec, model, stencil[:, :width], stencil[:, width:])
    values = values.reshape(count, 2, 2 * width)
    gradient = (values[:, 0] - values[:, 1]) / (2.0 * steps)
    return gradient[:, :width], gradient[:, width:]


def lagrangian_gradients(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any,
    method: str = 'auto') -> tuple[np.ndarray, np.ndarray]:
    """Returns dL/dx and dL/dxdot at a batch of points.

    The analytic path chains cost and input-penalty derivatives through the
    inverse-dynamics Jacobians, which requires an identity actuation map
    whenever the extracted control enters the Lagrangian. 'auto' falls back
    to central differences for other models.

    Args:
        spec (LagrangianSpec): the Lagrangian.
        model (dynamics.RobotModel): the robot.
        x (Any): states with shape (..., 2N).
        xdot (Any): state time derivatives with shape (..., 2N).
        method (str): 'auto', 'analytic' or 'finite_difference'. Defaults
            to 'auto'.

    Raises:
        DomainError: if 'method' is unknown.
        UnsupportedModelError: if 'analytic' is requested for a model that
            needs the general control extraction.

    Returns:
        tuple[np.ndarray, np.ndarray]: gradients shaped like 'x'.

    """
    if method not in GRADIENT_METHODS:
        raise errors.DomainError(
            f'method must be one of {GRADIENT_METHODS}, got {method!r}')
    states, rates, batch = _pair(model, x, xdot)
    analytic = model.fully_actuated or not spec.uses_control
    if method == 'finite_difference' or (method == 'auto' and not analytic):
        if method == 'auto':
            logger.debug(
                'using central differences for %s gradients',
                type(model).__name__)
        dl_dx, dl_dxdot = _finite_difference_gradients(
            spec, model, states, rates)
    else:
        dl_dx, dl_dxdot = _analytic_gradients(spec, model, states, rates)
    shape = batch + (2 * model.dof,)
    return dl_dx.reshape(shape), dl_dxdot.reshape(shape)


def _point(x: Any, xdot: Any) -> tuple[np.ndarray, np.ndarray]:
    """Returns one finite (x, xdot) pair as (1, 2N) arrays."""
    if isinstance(x, dynamics.StatePoint):
        x = x.as_vector()
    state = validators.FINITE.validate(np.atleast_1d(x), name = 'x')
    rate = validators.FINITE.validate(np.atleast_1d(xdot), name = 'xdot')
    if state.ndim != 1 or rate.ndim != 1:
        raise errors.DomainError('x and xdot must be vectors')
    return state[None, :], rate[None, :]


def lagrangian_value(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any) -> float:
    """Returns the Lagrangian at one point (x, xdot)."""
    state, rate = _point(x, xdot)
    return float(lagrangian_values(spec, model, state, rate)[0])


def el_gradients(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any,
    method: str = 'auto') -> tuple[np.ndarray, np.ndarray]:
    """Returns (dL/dx, dL/dxdot) at one point as 2N-vectors."""
    state, rate = _point(x, xdot)
    dl_dx, dl_dxdot = lagrangian_gradients(
        spec, model, state, rate, method = method)
    return dl_dx[0], dl_dxdot[0]


def constraint_values(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any) -> np.ndarray:
    """Returns every constraint value g stacked along the last axis.

    Args:
        spec (LagrangianSpec): supplies the constraints.
        model (dynamics.RobotModel): the robot.
        x (Any): states with shape (..., 2N).
        xdot (Any): state time derivatives with shape (..., 2N).

    Returns:
        np.ndarray: values with shape (..., G). G is 0 without constraints.

    """
    states, rates, batch = _pair(model, x, xdot)
    u = None
    if any(c.uses_control for c in spec.constraints):
        u, _ = dynamics.extract_controls(model, states, rates)
    blocks = [c.values(model, states, u) for c in spec.constraints]
    stacked = (
        np.concatenate(blocks, axis = -1) if blocks
        else np.zeros((states.shape[0], 0)))
    return stacked.reshape(batch + (stacked.shape[-1],))


def max_violation(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: Any,
    xdot: Any) -> float:
    """Returns the largest constraint value, or -inf without constraints."""
    values = constraint_values(spec, model, x, xdot)
    return float(np.max(values)) if values.size else -np.inf


def metric_solve(
    spec: LagrangianSpec,
    model: dynamics.RobotModel,
    x: np.ndarray,
    residual: np.ndarray) -> np.ndarray:
    """Returns M^-1 'residual' for the metric of 'spec'.

    M is the identity except in legacy mode, where M = diag(kd I, H^T H).

    Args:
        spec (LagrangianSpec): selects the metric.
        model (dynamics.RobotModel): the robot.
        x (np.ndarray): states with shape (K, 2N).
        residual (np.ndarray): vectors with shape (K, 2N).

    Returns:
        np.ndarray: solved vectors with shape (K, 2N).

    """
    if spec.mode != 'legacy':
        return residual
    n = model.dof
    inertia = model.mass_matrix(x[..., :n])
    gram = np.swapaxes(inertia, -1, -2) @ inertia
    lower = np.linalg.solve(gram, residual[..., n:, None])[..., 0]
    return np.concatenate((residual[..., :n] / spec.kd, lower), axis = -1)
