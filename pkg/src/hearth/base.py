"""
base: interfaces for registries, registrars, and validators
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
    Factory (abc.ABC): interface for classes that build instances of stored
        kinds from configuration parameters.
    Registrar (abc.ABC): interface for classes that send items to a registry.
    Registry (MutableMapping): interface for stores of registered kinds
        (robot models, costs, constraints, and flow integrators).
    Validator (abc.ABC): interface for value validators.

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
from collections.abc import Hashable, Iterator, MutableMapping
from typing import Any, ClassVar, Optional


@dataclasses.dataclass
class Factory(abc.ABC):
    """Base class for factories."""

    """ Required Subclass Methods """

    @classmethod
    @abc.abstractmethod
    def create(cls, kind: str, **parameters: Any) -> Any:
        """Creates an instance of the registered 'kind' from 'parameters'.

        Args:
            kind (str): name of the stored class.
            parameters (Any): keyword arguments passed to the stored class.

        Returns:
            Any: created instance.

        """


@dataclasses.dataclass
class Registrar(abc.ABC):
    """Base class for registrars.

    A registrar sends a class to a registry. Keeping the registrar apart from
    the registry lets each family of kinds (models, costs, constraints,
    integrators) own a separate store while sharing the registration logic.

    Attributes:
        registry (ClassVar[Registry]): stores registered classes by kind name.

    """
    registry: ClassVar[Registry]

    """ Class Methods """

    @classmethod
    def register(cls, item: type[Any], name: Optional[str] = None) -> None:
        """Adds 'item' to 'registry'.

        Args:
            item (type[Any]): class to add to the registry.
            name (Optional[str]): key for 'item'. Defaults to None, in which
                case the 'kind' attribute of 'item' is used.

        """
        cls.registry.deposit(item = item, name = name)
        return


@dataclasses.dataclass
class Registry(MutableMapping):
    """Base class for registries of kinds.

    Storing and fetching go through 'deposit' and 'withdraw', so subclasses
    decide how names are derived and how unknown names are reported. 'keys'
    returns a tuple in registration order.

    Args:
        contents (MutableMapping[Hashable, Any]): stored dictionary. Defaults
            to an empty dict.

    """
    contents: MutableMapping[Hashable, Any] = dataclasses.field(
        default_factory = dict)

    """ Required Subclass Methods """

    @abc.abstractmethod
    def deposit(self, item: Any, name: Optional[Hashable] = None) -> None:
        """Adds 'item' to 'contents'.

        Args:
            item (Any): class to add to the registry.
            name (Optional[Hashable]): key to use to store 'item'. Defaults to
                None.

        """

    @abc.abstractmethod
    def withdraw(self, item: Hashable) -> Any:
        """Returns a stored item based on 'item'.

        Args:
            item (Hashable): key name corresponding to the stored item sought.

        Returns:
            Any: stored item.

        """

    """ Instance Methods """

    def delete(self, item: Hashable) -> None:
        """Deletes 'item' in 'contents'.

        Args:
            item (Hashable): key in 'contents' to delete.

        """
        del self.contents[item]
        return

    def keys(self) -> tuple[Hashable, ...]:
        return tuple(self.contents.keys())

    """ Dunder Methods """

    def __getitem__(self, key: Hashable) -> Any:
        return self.withdraw(item = key)

    def __setitem__(self, key: Hashable, value: Any) -> None:
        self.deposit(item = value, name = key)
        return

    def __delitem__(self, key: Hashable) -> None:
        self.delete(item = key)
        return

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.contents)

    def __len__(self) -> int:
        return len(self.contents)


@dataclasses.dataclass
class Validator(abc.ABC):
    """Base class for value validators."""

    """ Required Subclass Methods """

    @abc.abstractmethod
    def validate(self, item: Any, name: str = 'value') -> Any:
        """Returns a validated 'item'.

        Args:
            item (Any): object to validate.
            name (str): field name used in error messages. Defaults to
                'value'.

        Returns:
            Any: validated object.

        """
