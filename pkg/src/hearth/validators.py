"""
validators: value validators for numeric parameters and arrays
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
    Minimum (base.Validator): validates that a number (or every entry of an
        array) is above a minimum.
    Finite (base.Validator): validates that an array has no NaN or infinite
        entries.
    Shape (base.Validator): validates the shape of an array.
    POSITIVE, NON_NEGATIVE, FINITE: shared validator instances.

To Do:


"""
from __future__ import annotations

import dataclasses
from typing import Any, Optional

import numpy as np

from . import base
from . import errors


@dataclasses.dataclass
class Minimum(base.Validator):
    """Validates that a number, or every entry of an array, exceeds a minimum.

    Args:
        minimum (float): lowest acceptable value. Defaults to 0.0.
        allow_equal (bool): whether 'minimum' itself is acceptable. Defaults to
            False.

    """
    minimum: float = 0.0
    allow_equal: bool = False

    """ Instance Methods """

    def validate(self, item: Any, name: str = 'value') -> Any:
        """Returns 'item' if it is above 'minimum'.

        Args:
            item (Any): number or array to validate.
            name (str): field name used in error messages. Defaults to
                'value'.

        Raises:
            DomainError: if any entry of 'item' is at or below 'minimum'
                (below, if 'allow_equal' is True) or is not a number.

        Returns:
            Any: 'item' unchanged.

        """
        values = np.asarray(item, dtype = float)
        if np.any(np.isnan(values)):
            raise errors.DomainError(f'{name} must be a number, got {item}')
        if self.allow_equal:
            passed = np.all(values >= self.minimum)
            relation = 'at least'
        else:
            passed = np.all(values > self.minimum)
            relation = 'greater than'
        if not passed:
            raise errors.DomainError(
                f'{name} must be {relation} {self.minimum}, got {item}')
        return item


@dataclasses.dataclass
class Finite(base.Validator):
    """Validates that every entry of an array is finite."""

    """ Instance Methods """

    def validate(self, item: Any, name: str = 'value') -> np.ndarray:
        """Returns 'item' as a float array if all of its entries are finite.

        Args:
            item (Any): array-like to validate.
            name (str): field name used in error messages. Defaults to
                'value'.

        Raises:
            NonFiniteError: if 'item' has NaN or infinite entries.

        Returns:
            np.ndarray: 'item' converted to a float array.

        """
        values = np.asarray(item, dtype = float)
        if not np.all(np.isfinite(values)):
            raise errors.NonFiniteError(f'{name} has non-finite entries')
        return values


@dataclasses.dataclass
class Shape(base.Validator):
    """Validates the shape of an array.

    Args:
        shape (tuple[Optional[int], ...]): expected shape. None entries accept
            any length along that axis.

    """
    shape: tuple[Optional[int], ...] = ()

    """ Instance Methods """

    def validate(self, item: Any, name: str = 'value') -> np.ndarray:
        """Returns 'item' as a float array if its shape matches 'shape'.

        Args:
            item (Any): array-like to validate.
            name (str): field name used in error messages. Defaults to
                'value'.

        Raises:
            DomainError: if the shape of 'item' does not match.

        Returns:
            np.ndarray: 'item' converted to a float array.

        """
        values = np.asarray(item, dtype = float)
        matches = values.ndim == len(self.shape) and all(
            expected is None or expected == actual
            for expected, actual in zip(self.shape, values.shape))
        if not matches:
            expected = tuple('*' if s is None else s for s in self.shape)
            raise errors.DomainError(
                f'{name} must have shape {expected}, got {values.shape}')
        return values


POSITIVE = Minimum(minimum = 0.0, allow_equal = False)
NON_NEGATIVE = Minimum(minimum = 0.0, allow_equal = True)
FINITE = Finite()
