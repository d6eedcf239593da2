"""
framework: package-wide runtime settings
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
    resolve_log_level: picks the log level from an argument or the
        environment.
    configure_logging: attaches a stderr handler to the 'hearth' logger.

ToDo:


"""
from __future__ import annotations

import logging
import os
import sys
from typing import Optional

from . import configuration
from . import errors


def resolve_log_level(level: Optional[str | int] = None) -> int:
    """Returns the numeric log level to use.

    Args:
        level (Optional[str | int]): explicit level name or number. Defaults
            to None, which reads the HEARTH_LOG_LEVEL environment variable
            and falls back to WARNING.

    Raises:
        ConfigError: if the level name is not a logging level.

    Returns:
        int: numeric logging level.

    """
    if level is None:
        level = os.environ.get(
            configuration.LOG_LEVEL_VARIABLE, configuration.DEFAULT_LOG_LEVEL)
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).strip().upper())
    if not isinstance(value, int):
        raise errors.ConfigError(f'unknown log level {level!r}')
    return value


def configure_logging(
    level: Optional[str | int] = None,
    quiet: bool = False) -> logging.Logger:
    """Sends package diagnostics to standard error.

    Calling it again only changes the level; handlers are not duplicated.

    Args:
        level (Optional[str | int]): log level. Defaults to None (see
            'resolve_log_level').
        quiet (bool): forces ERROR regardless of 'level'. Defaults to False.

    Returns:
        logging.Logger: the 'hearth' package logger.

    """
    logger = logging.getLogger('hearth')
    logger.setLevel(logging.ERROR if quiet else resolve_log_level(level))
    if not any(getattr(h, '_hearth', False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(configuration.LOG_FORMAT))
        handler._hearth = True
        logger.addHandler(handler)
    return logger
