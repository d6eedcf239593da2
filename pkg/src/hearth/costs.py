"""
costs: running costs c(x, xdot, u) of the optimal control problem
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
    CostSpec (registrars.Subclasser, abc.ABC): base class for running costs.
    SquaredControl (CostSpec): |u|^2.
    WeightedSquaredControl (CostSpec): sum_i w_i u_i^2.
    QuadraticStateCost (CostSpec): w_u |u|^2 plus a diagonal quadratic
        penalty on the distance to a reference state.

Every method works on batches: 'x' and 'xdot' have shape (K, 2N) and 'u' has
shape (K, m).

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
from typing import Any, ClassVar, Optional

import numpy as np

from . import dynamics
from . import errors
from . import registrars
from . import registries
from . import validators


@dataclasses.dataclass(eq = False, kw_only = True)
class CostSpec(registrars.Subclasser, abc.ABC):
    """Base class for running costs c(x, xdot, u).

    Subclasses register themselves under their 'kind', which is the name used
    in problem files.

    """
    registry: ClassVar[registries.Catalog] = registries.Catalog(
        family = 'running cost')

    """ Required Subclass Methods """

    @abc.abstractmethod
    def value(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> np.ndarray:
        """Returns the cost at each of K points, shape (K,)."""

    @abc.abstractmethod
    def gradients(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns partial derivatives (dc/dx, dc/dxdot, dc/du)."""


@dataclasses.dataclass(eq = False, kw_only = True)
class SquaredControl(CostSpec):
    """Minimum-effort cost |u|^2."""
    kind: ClassVar[str] = 'squared_control'

    def value(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> np.ndarray:
        return np.sum(u**2, axis = -1)

    def gradients(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.zeros_like(x), np.zeros_like(xdot), 2.0 * u


@dataclasses.dataclass(eq = False, kw_only = True)
class WeightedSquaredControl(CostSpec):
    """Weighted effort cost sum_i w_i u_i^2.

    Args:
        weights (Any): strictly positive weight per control input.

    """
    weights: Any
    kind: ClassVar[str] = 'weighted_squared_control'

    def __post_init__(self) -> None:
        self.weights = np.atleast_1d(
            validators.FINITE.validate(self.weights, name = 'weights'))
        validators.POSITIVE.validate(self.weights, name = 'weights')

    def _checked(self, u: np.ndarray) -> np.ndarray:
        if self.weights.size != u.shape[-1]:
            raise errors.DomainError(
                f'weights has {self.weights.size} entries for '
                f'{u.shape[-1]} control inputs')
        return self.weights

    def value(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> np.ndarray:
        return np.sum(self._checked(u) * u**2, axis = -1)

    def gradients(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.zeros_like(x),
            np.zeros_like(xdot),
            2.0 * self._checked(u) * u)


@dataclasses.dataclass(eq = False, kw_only = True)
class QuadraticStateCost(CostSpec):
    """Effort plus tracking cost w_u |u|^2 + (x - r)^T diag(w_x) (x - r).

    Args:
        control_weight (float): weight w_u on the effort term. Defaults to
            1.0.
        state_weights (Optional[Any]): nonnegative 2N weights w_x. Defaults to
            None, which means zeros.
        reference (Optional[Any]): reference state r. Defaults to None, which
            means the origin. Problem files default it to the final state.

    """
    control_weight: float = 1.0
    state_weights: Optional[Any] = None
    reference: Optional[Any] = None
    kind: ClassVar[str] = 'custom_state_cost'

    def __post_init__(self) -> None:
        validators.NON_NEGATIVE.validate(
            self.control_weight, name = 'control_weight')
        if self.state_weights is not None:
            self.state_weights = np.atleast_1d(validators.FINITE.validate(
                self.state_weights, name = 'state_weights'))
            validators.NON_NEGATIVE.validate(
                self.state_weights, name = 'state_weights')
        if self.reference is not None:
            self.reference = np.atleast_1d(validators.FINITE.validate(
                self.reference, name = 'reference'))

    def _offset(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        width = x.shape[-1]
        weights = (
            np.zeros(width) if self.state_weights is None
            else self.state_weights)
        reference = (
            np.zeros(width) if self.reference is None else self.reference)
        if weights.size != width or reference.size != width:
            raise errors.DomainError(
                f'state_weights and reference must have {width} entries')
        return weights, x - reference

    def value(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> np.ndarray:
        weights, offset = self._offset(x)
        return (
            self.control_weight * np.sum(u**2, axis = -1)
            + np.sum(weights * offset**2, axis = -1))

    def gradients(
        self,
        model: dynamics.RobotModel,
        x: np.ndarray,
        xdot: np.ndarray,
        u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        weights, offset = self._offset(x)
        return (
            2.0 * weights * offset,
            np.zeros_like(xdot),
            2.0 * self.control_weight * u)
