"""
constraints: penalty-encoded state, input and obstacle constraints
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
    activation: smooth switch S(g) = 1/2 + 1/2 tanh(c g).
    penalty: b(g) = k g^2 S(g).
    penalty_slope: db/dg.
    ConstraintSpec (registrars.Subclasser, abc.ABC): base class for
        inequality constraints g <= 0.
    StateBox (ConstraintSpec): bounds on joint positions.
    VelocityBox (ConstraintSpec): bounds on joint velocities.
    InputBox (ConstraintSpec): bounds on the extracted control.
    CircleObstacle (ConstraintSpec): planar disc that selected frames must
        stay outside of.

Constraint values are batched: 'x' has shape (K, 2N) and 'u' has shape
(K, m). Each box bound becomes one one-sided inequality, and infinite bounds
are skipped.

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
from typing import Any, ClassVar, Optional

import numpy as np
from scipy import special

from . import configuration
from . import dynamics
from . import errors
from . import registrars
from . import registries
from . import validators


def activation(g: Any, c_cons: float) -> Any:
    """Returns S(g) = 1/2 + 1/2 tanh(c_cons g).

    Evaluated as the logistic function of 2 c_cons g, which is the same value
    without the cancellation of 1/2 - 1/2 tanh for negative g.

    Args:
        g (Any): constraint value(s).
        c_cons (float): sharpness of the switch.

    Returns:
        Any: activation with the shape of 'g'.

    """
    return special.expit(2.0 * c_cons * np.asarray(g, dtype = float))


def penalty(g: Any, spec: ConstraintSpec) -> Any:
    """Returns b(g) = k_cons g^2 S(g) for the gains of 'spec'."""
    g = np.asarray(g, dtype = float)
    return spec.gain * g**2 * activation(g, spec.sharpness)


def penalty_slope(g: Any, spec: ConstraintSpec) -> Any:
    """Returns db/dg = k_cons (2 g S + g^2 S') with S' = 2 c S (1 - S)."""
    g = np.asarray(g, dtype = float)
    switch = activation(g, spec.sharpness)
    slope = 2.0 * spec.sharpness * switch * (1.0 - switch)
    return spec.gain * (2.0 * g * switch + g**2 * slope)


@dataclasses.dataclass(eq = False, kw_only = True)
class ConstraintSpec(registrars.Subclasser, abc.ABC):
    """Base class for inequality constraints g(x, xdot, u) <= 0.

    Args:
        gain (float): penalty gain k_cons. Defaults to 1e4.
        sharpness (float): activation sharpness c_cons. Defaults to 100.

    Attributes:
        group (ClassVar[str]): which phase gains apply to the constraint:
            'state', 'input' or 'obstacle'.
        uses_control (ClassVar[bool]): whether g depends on the extracted
            control.

    """
    gain: float = configuration.DEFAULT_STATE_GAIN
    sharpness: float = configuration.DEFAULT_SHARPNESS
    registry: ClassVar[registries.Catalog] = registries.Catalog(
        family = 'constraint')
    group: ClassVar[str] = 'state'
    uses_control: ClassVar[bool] = False

    """ Initialization Methods """

    def __post_init__(self) -> None:
        validators.POSITIVE.validate(self.gain, name = 'gain')
        validators.POSITIVE.validate(self.sharpness, name = 'sharpness')

    """ Required Subclass Methods """

    @abc.abstractmethod
    def values(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        """Returns constraint values with shape (K, G)."""

    @abc.abstractmethod
    def jacobians(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        """Returns dg/dx (K, G, 2N) and dg/du (K, G, m)."""

    @abc.abstractmethod
    def violation(
        self,
        model: dynamics.RobotModel,
        states: np.ndarray,
        controls: np.ndarray,
        margin: float) -> float:
        """Returns the worst excess over the evaluation bound.

        Args:
            model (dynamics.RobotModel): the robot.
            states (np.ndarray): sampled states, shape (S, 2N).
            controls (np.ndarray): sampled applied controls, shape (S, m).
            margin (float): fractional slack on box bounds.

        Returns:
            float: largest excess; the constraint holds when it is not
                positive (boxes) or negative (obstacles).

        """

    """ Instance Methods """

    def penalties(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        """Returns the summed penalty b(g) per point, shape (K,)."""
        return np.sum(penalty(self.values(model, x, u), self), axis = -1)

    def satisfied(
        self,
        model: dynamics.RobotModel,
        states: np.ndarray,
        controls: np.ndarray,
        margin: float) -> bool:
        """Returns whether sampled states and controls pass the check."""
        return bool(self.violation(model, states, controls, margin) <= 0.0)

    def with_gains(self, gain: float, sharpness: float) -> ConstraintSpec:
        """Returns a copy with new penalty gains."""
        return dataclasses.replace(self, gain = gain, sharpness = sharpness)


@dataclasses.dataclass(eq = False, kw_only = True)
class _Box(ConstraintSpec):
    """Shared logic of box constraints on one slice of a vector.

    Args:
        lower (Optional[Any]): lower bounds. Defaults to None (unbounded).
        upper (Optional[Any]): upper bounds. Defaults to None (unbounded).
        indices (Optional[Any]): 0-based entries the bounds apply to.
            Defaults to None, meaning every entry.

    """
    lower: Optional[Any] = None
    upper: Optional[Any] = None
    indices: Optional[Any] = None

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.lower is None and self.upper is None:
            raise errors.DomainError('a box needs a lower or an upper bound')
        self.lower = None if self.lower is None else np.atleast_1d(
            np.asarray(self.lower, dtype = float))
        self.upper = None if self.upper is None else np.atleast_1d(
            np.asarray(self.upper, dtype = float))
        if self.lower is not None and self.upper is not None:
            if self.lower.shape != self.upper.shape:
                raise errors.DomainError(
                    'lower and upper must have the same length')
            if np.any(self.lower > self.upper):
                raise errors.DomainError('lower bounds exceed upper bounds')
        if self.indices is not None:
            self.indices = np.atleast_1d(np.asarray(self.indices, dtype = int))

    @abc.abstractmethod
    def _width(self, model: dynamics.RobotModel) -> int:
        """Returns the length of the bounded vector."""

    @abc.abstractmethod
    def _slice(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        """Returns the bounded vector, shape (K, width)."""

    def _rows(
        self,
        model: dynamics.RobotModel,
        margin: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns (entry, sign, bound) for each one-sided inequality."""
        width = self._width(model)
        indices = (
            np.arange(width) if self.indices is None else self.indices)
        if np.any(indices < 0) or np.any(indices >= width):
            raise errors.DomainError(
                f'{self.kind} indices must lie in [0, {width})')
        entries, signs, bounds = [], [], []
        for side, sign, values in (
                ('upper', 1.0, self.upper), ('lower', -1.0, self.lower)):
            if values is None:
                continue
            if values.size not in (1, indices.size):
                raise errors.DomainError(
                    f'{self.kind} {side} has {values.size} entries for '
                    f'{indices.size} bounded values')
            values = np.broadcast_to(values, indices.shape)
            for entry, value in zip(indices, values):
                if np.isfinite(value):
                    entries.append(entry)
                    signs.append(sign)
                    bounds.append(value + sign * margin * abs(value))
        return (
            np.asarray(entries, dtype = int),
            np.asarray(signs, dtype = float),
            np.asarray(bounds, dtype = float))

    def _bounded(
        self,
        model: dynamics.RobotModel,
        z: np.ndarray,
        margin: float = 0.0) -> np.ndarray:
        entries, signs, bounds = self._rows(model, margin)
        return signs * (z[..., entries] - bounds)

    def values(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        return self._bounded(model, self._slice(model, x, u))

    def violation(
        self,
        model: dynamics.RobotModel,
        states: np.ndarray,
        controls: np.ndarray,
        margin: float) -> float:
        excess = self._bounded(
            model, self._slice(model, states, controls), margin)
        return float(np.max(excess)) if excess.size else -np.inf

    def _selector(self, model: dynamics.RobotModel) -> np.ndarray:
        """Returns d(g)/d(bounded vector), shape (G, width)."""
        entries, signs, _ = self._rows(model)
        selector = np.zeros((entries.size, self._width(model)))
        selector[np.arange(entries.size), entries] = signs
        return selector


@dataclasses.dataclass(eq = False, kw_only = True)
class StateBox(_Box):
    """Bounds lower <= q <= upper on joint positions."""
    kind: ClassVar[str] = 'state_box'

    def _width(self, model: dynamics.RobotModel) -> int:
        return model.dof

    def _slice(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        return x[..., :model.dof]

    def jacobians(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        selector = self._selector(model)
        dg_dx = np.zeros(
            x.shape[:-1] + (selector.shape[0], 2 * model.dof))
        dg_dx[..., :model.dof] = selector
        return dg_dx, np.zeros(
            x.shape[:-1] + (selector.shape[0], model.inputs))


@dataclasses.dataclass(eq = False, kw_only = True)
class VelocityBox(_Box):
    """Bounds lower <= qd <= upper on joint velocities."""
    kind: ClassVar[str] = 'velocity_box'

    def _width(self, model: dynamics.RobotModel) -> int:
        return model.dof

    def _slice(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        return x[..., model.dof:]

    def jacobians(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        selector = self._selector(model)
        dg_dx = np.zeros(
            x.shape[:-1] + (selector.shape[0], 2 * model.dof))
        dg_dx[..., model.dof:] = selector
        return dg_dx, np.zeros(
            x.shape[:-1] + (selector.shape[0], model.inputs))


@dataclasses.dataclass(eq = False, kw_only = True)
class InputBox(_Box):
    """Bounds lower <= u <= upper on the extracted control."""
    gain: float = configuration.DEFAULT_INPUT_GAIN
    kind: ClassVar[str] = 'input_box'
    group: ClassVar[str] = 'input'
    uses_control: ClassVar[bool] = True

    def _width(self, model: dynamics.RobotModel) -> int:
        return model.inputs

    def _slice(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        if u is None:
            raise errors.DomainError('input_box needs the extracted control')
        return u

    def jacobians(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        selector = self._selector(model)
        dg_du = np.broadcast_to(
            selector, x.shape[:-1] + selector.shape).copy()
        return np.zeros(
            x.shape[:-1] + (selector.shape[0], 2 * model.dof)), dg_du


@dataclasses.dataclass(eq = False, kw_only = True)
class CircleObstacle(ConstraintSpec):
    """Planar disc that the selected frames must stay outside of.

    g = r_infl^2 - |p_f(q) - center|^2 for each attached frame f, with the
    inflated radius r_infl = radius + clearance. The evaluation check in
    'violation' covers every frame of the model.

    Args:
        center (Any): disc center (x, y) in m.
        radius (float): disc radius in m.
        clearance (float): extra distance kept by the planner. The evaluation
            check uses the bare radius. Defaults to 0.0.
        frames (Optional[Any]): 1-based frame numbers (frame i is the tip of
            link i). Defaults to None, meaning every frame.

    """
    center: Any
    radius: float
    clearance: float = configuration.DEFAULT_CLEARANCE
    frames: Optional[Any] = None
    gain: float = configuration.DEFAULT_OBSTACLE_GAIN
    kind: ClassVar[str] = 'circle_obstacle'
    group: ClassVar[str] = 'obstacle'

    def __post_init__(self) -> None:
        super().__post_init__()
        self.center = validators.Shape(shape = (2,)).validate(
            validators.FINITE.validate(self.center, name = 'center'),
            name = 'center')
        validators.POSITIVE.validate(self.radius, name = 'radius')
        validators.NON_NEGATIVE.validate(self.clearance, name = 'clearance')
        if self.frames is not None:
            self.frames = np.atleast_1d(np.asarray(self.frames, dtype = int))

    @property
    def inflated_radius(self) -> float:
        """Returns radius + clearance."""
        return float(self.radius + self.clearance)

    def _selected(self, model: dynamics.RobotModel) -> np.ndarray:
        if self.frames is None:
            return np.arange(model.frames)
        if np.any(self.frames < 1) or np.any(self.frames > model.frames):
            raise errors.DomainError(
                f'obstacle frames must lie in [1, {model.frames}]')
        return self.frames - 1

    def _offsets(
        self,
        model: dynamics.RobotModel,
        q: np.ndarray) -> np.ndarray:
        positions = model.forward_kinematics(q)[..., self._selected(model), :]
        return positions - self.center

    def values(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> np.ndarray:
        offsets = self._offsets(model, x[..., :model.dof])
        return self.inflated_radius**2 - np.sum(offsets**2, axis = -1)

    def jacobians(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        u: Optional[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        q = x[..., :model.dof]
        offsets = self._offsets(model, q)
        frames = model.frame_jacobians(q)[..., self._selected(model), :, :]
        dg_dq = -2.0 * np.einsum('...fa,...fan->...fn', offsets, frames)
        dg_dx = np.concatenate((dg_dq, np.zeros_like(dg_dq)), axis = -1)
        return dg_dx, np.zeros(dg_dq.shape[:-1] + (model.inputs,))

    def violation(
        self,
        model: dynamics.RobotModel,
        states: np.ndarray,
        controls: np.ndarray,
        margin: float) -> float:
        # Every frame is checked, not only the attached ones.
        positions = model.forward_kinematics(states[..., :model.dof])
        offsets = positions - self.center
        distances = np.sqrt(np.sum(offsets**2, axis = -1))
        return float(np.max(self.radius - distances))

    def satisfied(
        self,
        model: dynamics.RobotModel,
        states: np.ndarray,
        controls: np.ndarray,
        margin: float) -> bool:
        # Frames must be strictly outside; touching the boundary fails.
        return bool(self.violation(model, states, controls, margin) < 0.0)
