"""
registries: stores of registered kinds
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
    Catalog (base.Registry): stores registered classes keyed by their config
        name.

To Do:


"""
from __future__ import annotations

import dataclasses
from collections.abc import Hashable
from typing import Any, Optional

from . import base
from . import errors


@dataclasses.dataclass
class Catalog(base.Registry):
    """Stores registered classes keyed by their config name.

    Args:
        contents (MutableMapping[Hashable, Any]): stored dictionary. Defaults
            to an empty dict.
        family (str): human-readable name of the stored kinds, used in error
            messages. Defaults to 'kind'.

    """
    family: str = 'kind'

    """ Instance Methods """

    def deposit(self, item: Any, name: Optional[Hashable] = None) -> None:
        """Adds 'item' to 'contents'.

        Args:
            item (Any): class to add to the registry.
            name (Optional[Hashable]): key to use to store 'item'. If not
                passed, the 'kind' attribute of 'item' is used. Defaults to
                None.

        Raises:
            TypeError: if no name is passed and 'item' has no 'kind'.

        """
        name = name or getattr(item, 'kind', None)
        if not name:
            raise TypeError(f'{item} needs a kind name to be registered')
        self.contents[name] = item
        return

    def withdraw(self, item: Hashable) -> Any:
        """Returns the class registered under 'item'.

        Args:
            item (Hashable): kind name of the stored class.

        Raises:
            UnknownKindError: if 'item' is not registered.

        Returns:
            Any: stored class.

        """
        try:
            return self.contents[item]
        except (KeyError, TypeError):
            known = ', '.join(sorted(str(k) for k in self.contents))
            raise errors.UnknownKindError(
                f'unknown {self.family} {item!r} (known: {known})') from None
