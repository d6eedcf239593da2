"""
artifacts: plot-ready CSV and JSON files for solutions and sweeps
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
    TRAJECTORY_FILE, CONTROL_FILE, NODES_FILE, TRACE_FILE,
        PHASE1_TRACE_FILE, SUMMARY_FILE, VERDICT_FILE (str): file names
        inside a solution directory.
    write_table: writes a CSV with a one-line header at full precision.
    read_table: reads a CSV written by 'write_table'.
    write_json: writes JSON with sorted keys.
    read_json: reads a JSON file.
    write_solution: writes every file of a solved report.
    read_reference: rebuilds the dense reference of a saved solution.

CSV files use ',' separators, LF newlines and 17 significant digits, so
every float64 survives a write and read unchanged.

To Do:


"""
from __future__ import annotations

import json
import logging
import pathlib
from collections.abc import Sequence
from typing import Any

import numpy as np

from . import aghf
from . import errors
from . import evaluation
from . import reports

logger = logging.getLogger(__name__)

TRAJECTORY_FILE: str = 'trajectory.csv'
CONTROL_FILE: str = 'control.csv'
NODES_FILE: str = 'nodes.csv'
TRACE_FILE: str = 'flow_trace.csv'
PHASE1_TRACE_FILE: str = 'flow_trace_phase1.csv'
SUMMARY_FILE: str = 'summary.json'
VERDICT_FILE: str = 'verdict.json'
TRACE_COLUMNS: tuple[str, ...] = ('s', 'action', 'rhs_norm', 'violation')


def _numbered(prefix: str, count: int) -> list[str]:
    return [f'{prefix}_{i}' for i in range(1, count + 1)]


def state_columns(dof: int) -> list[str]:
    """Returns ['q_1', ..., 'q_N', 'qd_1', ..., 'qd_N']."""
    return _numbered('q', dof) + _numbered('qd', dof)


def write_table(
    path: str | pathlib.Path,
    columns: Sequence[str],
    rows: np.ndarray) -> pathlib.Path:
    """Writes 'rows' under a header of 'columns'.

    Raises:
        DomainError: if the row width does not match the header.

    """
    path = pathlib.Path(path)
    rows = np.asarray(rows, dtype = float).reshape(-1, len(columns))
    path.parent.mkdir(parents = True, exist_ok = True)
    np.savetxt(
        path, rows,
        fmt = '%.17g',
        delimiter = ',',
        newline = '\n',
        header = ','.join(columns),
        comments = '')
    return path


def read_table(path: str | pathlib.Path) -> tuple[list[str], np.ndarray]:
    """Returns the header and the (rows, columns) values of a CSV file.

    Raises:
        ArtifactError: if the file is missing or not numeric.

    """
    path = pathlib.Path(path)
    try:
        with path.open('r', encoding = 'utf-8', newline = '') as stream:
            header = stream.readline().strip().split(',')
            values = np.loadtxt(stream, delimiter = ',', ndmin = 2)
    except OSError as error:
        raise errors.ArtifactError(f'cannot read {path}: {error}') from None
    except ValueError as error:
        raise errors.ArtifactError(f'{path}: {error}') from None
    if values.size and values.shape[1] != len(header):
        raise errors.ArtifactError(
            f'{path}: {values.shape[1]} columns under a header of '
            f'{len(header)}')
    return header, values.reshape(-1, len(header))


def write_json(path: str | pathlib.Path, data: Any) -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents = True, exist_ok = True)
    with path.open('w', encoding = 'utf-8', newline = '\n') as stream:
        json.dump(data, stream, indent = 2, sort_keys = True)
        stream.write('\n')
    return path


def read_json(path: str | pathlib.Path) -> Any:
    path = pathlib.Path(path)
    try:
        with path.open('r', encoding = 'utf-8') as stream:
            return json.load(stream)
    except OSError as error:
        raise errors.ArtifactError(f'cannot read {path}: {error}') from None
    except json.JSONDecodeError as error:
        raise errors.ArtifactError(f'{path}: {error}') from None


def write_trace(
    path: str | pathlib.Path,
    trace: aghf.FlowTrace) -> pathlib.Path:
    return write_table(path, TRACE_COLUMNS, trace.as_array())


def write_solution(
    directory: str | pathlib.Path,
    report: reports.SolveReport,
    summary: dict[str, Any],
    formats: Sequence[str] = ('csv', 'json')) -> list[pathlib.Path]:
    """Writes the files of a solve into 'directory'.

    Args:
        directory (str | pathlib.Path): output directory, created if needed.
        report (reports.SolveReport): evaluated solve output. Dense files are
            skipped when it carries no controls.
        summary (dict[str, Any]): JSON summary to store.
        formats (Sequence[str]): any of 'csv' and 'json'. Defaults to both.

    Returns:
        list[pathlib.Path]: written files.

    """
    directory = pathlib.Path(directory)
    written = []
    if 'csv' in formats:
        traj = report.trajectory
        if report.controls is not None:
            samples = report.controls
            written.append(write_table(
                directory / TRAJECTORY_FILE,
                ['t', *state_columns(traj.dof)],
                np.column_stack((samples.times, samples.states))))
            written.append(write_table(
                directory / CONTROL_FILE,
                ['t', *_numbered('u', samples.controls.shape[1])],
                np.column_stack((samples.times, samples.controls))))
        written.append(write_table(
            directory / NODES_FILE,
            ['t', *state_columns(traj.dof)],
            np.column_stack((traj.times, traj.values))))
        if report.phase2 is not None and report.phase2.trace is not None:
            written.append(
                write_trace(directory / TRACE_FILE, report.phase2.trace))
        if report.phase1.trace is not None:
            written.append(write_trace(
                directory / PHASE1_TRACE_FILE, report.phase1.trace))
    if 'json' in formats:
        written.append(write_json(directory / SUMMARY_FILE, summary))
    logger.info('wrote %d files to %s', len(written), directory)
    return written


def read_reference(
    directory: str | pathlib.Path) -> evaluation.SampledReference:
    """Rebuilds the dense reference stored in a solution directory.

    Raises:
        ArtifactError: if a file is missing, malformed, or the two files do
            not share the same time column.

    """
    directory = pathlib.Path(directory)
    header, states = read_table(directory / TRAJECTORY_FILE)
    _, controls = read_table(directory / CONTROL_FILE)
    if header[:1] != ['t'] or (len(header) - 1) % 2:
        raise errors.ArtifactError(
            f'{directory / TRAJECTORY_FILE}: expected t, q_*, qd_* columns')
    if controls.shape[1] < 2 or not np.array_equal(  # noqa: PLR2004
            states[:, 0], controls[:, 0]):
        raise errors.ArtifactError(
            f'{directory}: trajectory and control times differ')
    try:
        return evaluation.SampledReference(
            times = states[:, 0],
            states = states[:, 1:],
            controls = controls[:, 1:])
    except errors.DomainError as error:
        raise errors.ArtifactError(f'{directory}: {error}') from None
