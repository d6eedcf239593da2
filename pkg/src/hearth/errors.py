"""
errors: exceptions raised by hearth
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
    HearthError: base class for all package exceptions.
    DomainError (HearthError, ValueError): argument outside its domain.
    ConfigError (HearthError, ValueError): invalid problem configuration.
    UnknownKindError (HearthError, KeyError): unregistered kind name.
    DecompositionError (HearthError, ArithmeticError): singular augmented
        control matrix.
    UnsupportedModelError (HearthError, NotImplementedError): analytic path
        unavailable for the model's actuation.
    NonFiniteError (HearthError, ArithmeticError): NaN or infinite values.
    FlowError (HearthError, RuntimeError): base class for flow failures.
    StepSizeUnderflow (FlowError): integrator step collapsed.
    MaxStepsExceeded (FlowError): step budget exhausted.
    PhaseError (HearthError, RuntimeError): base class for phase failures.
    Phase1Failed (PhaseError): feasibility phase ended with violated
        constraints.
    Phase2Stalled (PhaseError): optimization phase never settled.
    DivergenceError (HearthError, RuntimeError): closed-loop state blew up.
    ArtifactError (HearthError, ValueError): missing or malformed solution
        files.

To Do:


"""
from __future__ import annotations

from typing import Any, Optional


class HearthError(Exception):
    """Base class for hearth exceptions."""


class DomainError(HearthError, ValueError):
    """Raised when an argument is outside of its mathematical domain."""


class ConfigError(HearthError, ValueError):
    """Raised when a problem configuration fails validation."""


class UnknownKindError(HearthError, KeyError):
    """Raised when a kind name is not in a registry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ''


class DecompositionError(HearthError, ArithmeticError):
    """Raised when the augmented control matrix cannot be inverted."""


class UnsupportedModelError(HearthError, NotImplementedError):
    """Raised when an operation needs a fully actuated model."""


class NonFiniteError(HearthError, ArithmeticError):
    """Raised when a computation produces NaN or infinite values."""


class FlowError(HearthError, RuntimeError):
    """Base class for failures while integrating the heat flow.

    Args:
        message (str): description of the failure.
        trajectory (Optional[Any]): last accepted trajectory. Defaults to None.
        trace (Optional[Any]): flow trace up to the failure. Defaults to None.

    """

    def __init__(
        self,
        message: str,
        trajectory: Optional[Any] = None,
        trace: Optional[Any] = None) -> None:
        super().__init__(message)
        self.trajectory = trajectory
        self.trace = trace


class StepSizeUnderflow(FlowError):
    """Raised when the flow integrator's step size collapses."""


class MaxStepsExceeded(FlowError):
    """Raised when the flow uses up its step budget."""


class PhaseError(HearthError, RuntimeError):
    """Base class for failures of a solve phase.

    Args:
        message (str): description of the failure.
        report (Optional[Any]): partial solve report. Defaults to None.

    """

    def __init__(self, message: str, report: Optional[Any] = None) -> None:
        super().__init__(message)
        self.report = report


class Phase1Failed(PhaseError):
    """Raised when Phase 1 ends without reaching the feasible set."""


class Phase2Stalled(PhaseError):
    """Raised when Phase 2 exhausts its horizon without settling."""


class DivergenceError(HearthError, RuntimeError):
    """Raised when a closed-loop simulation leaves the sane state region."""


class ArtifactError(HearthError, ValueError):
    """Raised when a saved solution is missing or malformed."""
