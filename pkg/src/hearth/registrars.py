"""
registrars: automatic registration of kinds
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
    Subclasser (base.Registrar, base.Factory): automatically registers
        concrete subclasses by their 'kind' and builds them by name.

To Do:


"""
from __future__ import annotations

import contextlib
import dataclasses
import inspect
from typing import Any, ClassVar

from . import base
from . import registries


@dataclasses.dataclass
class Subclasser(base.Registrar, base.Factory):
    """Mixin that registers every concrete subclass declaring a 'kind'.

    Each family (robot models, costs, constraints, integrators) declares its
    own 'registry' class attribute on its base class, so kinds from different
    families never collide.

    Attributes:
        registry (ClassVar[base.Registry]): stores subclasses. Defaults to an
            instance of Catalog.
        kind (ClassVar[str]): config name of the subclass.

    """
    registry: ClassVar[base.Registry] = registries.Catalog()
    kind: ClassVar[str] = ''

    """ Initialization Methods """

    def __init_subclass__(cls, *args: Any, **kwargs: Any) -> None:
        """Automatically registers a concrete subclass."""
        # Because Subclasser is used as a mixin, other base class
        # '__init_subclass__' methods must still run.
        with contextlib.suppress(AttributeError):
            super().__init_subclass__(*args, **kwargs)
        if cls.__dict__.get('kind') and not inspect.isabstract(cls):
            cls.register(cls, name = cls.kind)

    """ Class Methods """

    @classmethod
    def create(cls, kind: str, **parameters: Any) -> Any:
        """Creates an instance of the subclass registered under 'kind'.

        Args:
            kind (str): config name of the subclass.
            parameters (Any): keyword arguments for the subclass.

        Returns:
            Any: instance of the registered subclass.

        """
        return cls.registry.withdraw(item = kind)(**parameters)

    @classmethod
    def kinds(cls) -> tuple[str, ...]:
        """Returns the registered kind names.

        Returns:
            tuple[str, ...]: registered names in registration order.

        """
        return tuple(cls.registry.keys())
