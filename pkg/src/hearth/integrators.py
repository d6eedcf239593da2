"""
integrators: adaptive steppers that advance the heat flow in s
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
    DormandPrince (integrate.OdeSolver): explicit Dormand-Prince 5(4) pair
        with FSAL stages that counts rejected steps.
    FlowIntegrator (registrars.Subclasser, abc.ABC): base class for
        registered integrator kinds.
    DormandPrinceIntegrator (FlowIntegrator): 'dopri5'.
    ScipyIntegrator (FlowIntegrator): wraps a scipy OdeSolver class.
    RK45Integrator, DOP853Integrator, BDFIntegrator, RadauIntegrator,
        LSODAIntegrator (ScipyIntegrator): 'rk45', 'dop853', 'bdf', 'radau'
        and 'lsoda'.

Every kind returns a started scipy OdeSolver, so a single driver loop (see
aghf.flow) calls 'step' on any of them and inspects 't', 'y', 'status' and
'nfev'.

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
from collections.abc import Callable
from typing import Any, ClassVar, Optional

import numpy as np
from scipy import integrate

from . import configuration
from . import registrars
from . import registries
from . import validators

# Dormand-Prince 5(4) tableau.
_NODES = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_COUPLING = (
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176,
              -5103 / 18656]))
_WEIGHTS = np.array(
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Difference between the fifth and fourth order weights (seven stages).
_ERROR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
     -1 / 40])
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


def _rms(values: np.ndarray) -> float:
    return float(np.sqrt(np.mean(values**2)))


class DormandPrince(integrate.OdeSolver):
    """Explicit Dormand-Prince 5(4) solver.

    The step is accepted when the RMS of the embedded error estimate, scaled
    by atol + rtol * max(|y_old|, |y_new|), is at most one. Unlike the scipy
    solvers it also reports how many trial steps were rejected.

    Args:
        fun (Callable): right-hand side fun(s, y).
        t0 (float): initial flow parameter.
        y0 (np.ndarray): initial state vector.
        t_bound (float): final flow parameter.
        rtol (float): relative tolerance.
        atol (float): absolute tolerance.
        first_step (Optional[float]): initial step. Defaults to None, which
            estimates one from the first derivative.
        max_step (float): largest allowed step. Defaults to inf.
        min_step (float): smallest allowed step before the solver fails.
        vectorized (bool): whether 'fun' accepts column stacks. Defaults to
            False.

    """

    def __init__(
        self,
        fun: Callable,
        t0: float,
        y0: np.ndarray,
        t_bound: float,
        rtol: float,
        atol: float,
        first_step: Optional[float] = None,
        max_step: float = np.inf,
        min_step: float = configuration.MIN_STEP,
        vectorized: bool = False) -> None:
        super().__init__(fun, t0, y0, t_bound, vectorized)
        self.rtol = rtol
        self.atol = atol
        self.max_step = max_step
        self.min_step = min_step
        self.rejected = 0
        self.derivative = self.fun(self.t, self.y)
        self.h_abs = (
            self._initial_step() if first_step is None else float(first_step))

    def _initial_step(self) -> float:
        scale = self.atol + self.rtol * np.abs(self.y)
        size = _rms(self.y / scale)
        slope = _rms(self.derivative / scale)
        if size < 1e-5 or slope < 1e-5:
            step = 1e-6
        else:
            step = 0.01 * size / slope
        return float(min(step, self.max_step, abs(self.t_bound - self.t)))

    def _stages(
        self,
        h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rates = [self.derivative]
        for node, coupling in zip(_NODES[1:], _COUPLING[1:]):
            increment = h * np.dot(coupling, np.asarray(rates))
            rates.append(self.fun(self.t + node * h, self.y + increment))
        y_new = self.y + h * np.dot(_WEIGHTS, np.asarray(rates))
        last = self.fun(self.t + h, y_new)
        rates.append(last)
        error = h * np.dot(_ERROR, np.asarray(rates))
        return y_new, last, error

    def _step_impl(self) -> tuple[bool, Optional[str]]:
        floor = max(
            self.min_step,
            10.0 * abs(np.nextafter(self.t, self.direction * np.inf) - self.t))
        h_abs = min(self.h_abs, self.max_step)
        while True:
            if h_abs < floor:
                return False, (
                    f'step size {h_abs:.3e} fell below {floor:.3e} at '
                    f's = {self.t:.6g}')
            h = h_abs * self.direction
            t_new = self.t + h
            if self.direction * (t_new - self.t_bound) > 0:
                t_new = self.t_bound
                h = t_new - self.t
                h_abs = abs(h)
            y_new, derivative, error = self._stages(h)
            scale = self.atol + self.rtol * np.maximum(
                np.abs(self.y), np.abs(y_new))
            norm = _rms(error / scale)
            if norm <= 1.0:
                factor = (
                    _MAX_FACTOR if norm == 0.0
                    else min(_MAX_FACTOR, _SAFETY * norm**-0.2))
                break
            self.rejected += 1
            h_abs *= max(_MIN_FACTOR, _SAFETY * norm**-0.2)
        self.t = t_new
        self.y = y_new
        self.derivative = derivative
        self.h_abs = h_abs * factor
        return True, None


@dataclasses.dataclass(eq = False, kw_only = True)
class FlowIntegrator(registrars.Subclasser, abc.ABC):
    """Base class for integrator kinds selectable by name.

    Args:
        rel_tol (float): relative tolerance. Defaults to 1e-8.
        abs_tol (float): absolute tolerance. Defaults to 1e-10.
        first_step (Optional[float]): initial step size. Defaults to None,
            which lets the solver choose.
        max_step (float): largest allowed step. Defaults to inf.

    """
    rel_tol: float = configuration.DEFAULT_REL_TOL
    abs_tol: float = configuration.DEFAULT_ABS_TOL
    first_step: Optional[float] = None
    max_step: float = np.inf
    registry: ClassVar[registries.Catalog] = registries.Catalog(
        family = 'flow integrator')
    stiff: ClassVar[bool] = False

    """ Initialization Methods """

    def __post_init__(self) -> None:
        validators.POSITIVE.validate(self.rel_tol, name = 'rel_tol')
        validators.POSITIVE.validate(self.abs_tol, name = 'abs_tol')
        validators.POSITIVE.validate(self.max_step, name = 'max_step')
        if self.first_step is not None:
            validators.POSITIVE.validate(self.first_step, name = 'first_step')

    """ Required Subclass Methods """

    @abc.abstractmethod
    def start(
        self,
        fun: Callable[[float, np.ndarray], np.ndarray],
        s0: float,
        y0: np.ndarray,
        s_bound: float) -> integrate.OdeSolver:
        """Returns a solver positioned at (s0, y0) and bounded by 's_bound'.

        'fun' must accept a 1-D state or a 2-D column stack of states.

        """


@dataclasses.dataclass(eq = False, kw_only = True)
class DormandPrinceIntegrator(FlowIntegrator):
    """In-house Dormand-Prince 5(4) pair that also counts rejections."""
    kind: ClassVar[str] = 'dopri5'

    def start(
        self,
        fun: Callable[[float, np.ndarray], np.ndarray],
        s0: float,
        y0: np.ndarray,
        s_bound: float) -> integrate.OdeSolver:
        return DormandPrince(
            fun, s0, y0, s_bound,
            rtol = self.rel_tol,
            atol = self.abs_tol,
            first_step = self.first_step,
            max_step = self.max_step)


@dataclasses.dataclass(eq = False, kw_only = True)
class ScipyIntegrator(FlowIntegrator):
    """Adapts a scipy OdeSolver class to the integrator interface.

    Attributes:
        solver (ClassVar[type[integrate.OdeSolver]]): the wrapped class.

    """
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.RK45

    def start(
        self,
        fun: Callable[[float, np.ndarray], np.ndarray],
        s0: float,
        y0: np.ndarray,
        s_bound: float) -> integrate.OdeSolver:
        options: dict[str, Any] = {
            'rtol': self.rel_tol,
            'atol': self.abs_tol,
            'max_step': self.max_step,
            'vectorized': True}
        if self.first_step is not None:
            options['first_step'] = self.first_step
        return self.solver(fun, s0, y0, s_bound, **options)


@dataclasses.dataclass(eq = False, kw_only = True)
class RK45Integrator(ScipyIntegrator):
    kind: ClassVar[str] = 'rk45'
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.RK45


@dataclasses.dataclass(eq = False, kw_only = True)
class DOP853Integrator(ScipyIntegrator):
    kind: ClassVar[str] = 'dop853'
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.DOP853


@dataclasses.dataclass(eq = False, kw_only = True)
class BDFIntegrator(ScipyIntegrator):
    """Variable-order backward differentiation, the default for stiff flows.

    Its Jacobian is built by finite differences over column stacks, which is
    where the vectorized right-hand side pays off.

    """
    kind: ClassVar[str] = 'bdf'
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.BDF
    stiff: ClassVar[bool] = True


@dataclasses.dataclass(eq = False, kw_only = True)
class RadauIntegrator(ScipyIntegrator):
    kind: ClassVar[str] = 'radau'
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.Radau
    stiff: ClassVar[bool] = True


@dataclasses.dataclass(eq = False, kw_only = True)
class LSODAIntegrator(ScipyIntegrator):
    kind: ClassVar[str] = 'lsoda'
    solver: ClassVar[type[integrate.OdeSolver]] = integrate.LSODA
    stiff: ClassVar[bool] = True
