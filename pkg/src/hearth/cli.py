"""
cli: 'solve', 'evaluate' and 'sweep' commands
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
    EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CRITERIA (int): exit codes.
    cmd_solve: solves a problem file and writes its artifacts.
    cmd_evaluate: replays a saved solution and writes its verdict.
    cmd_sweep: solves a problem file for each value of one parameter.
    build_parser: returns the argument parser.
    main: console entry point.

Results go to standard output; every diagnostic goes to standard error.

To Do:


"""
from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import logging
import pathlib
import sys
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np

from . import artifacts
from . import errors
from . import evaluation
from . import framework
from . import problem
from . import reports

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_CONFIG: int = 1
EXIT_SOLVER: int = 2
EXIT_CRITERIA: int = 3

SWEEP_FILE: str = 'sweep.csv'
TRIALS_FILE: str = 'trials.csv'
SWEEP_COLUMNS: tuple[str, ...] = (
    'value', 'trials', 'success', 'action_mean', 'action_std', 'defect_mean',
    'defect_std', 'wall_time_mean', 'wall_time_std')
TRIAL_COLUMNS: tuple[str, ...] = (
    'value', 'repeat', 'exit_code', 'success', 'action', 'defect',
    'wall_time')

_SOLVER_FAILURES = (
    errors.FlowError,
    errors.NonFiniteError,
    errors.DecompositionError,
    errors.UnsupportedModelError)


def _error(message: str) -> None:
    print(f'hearth: error: {message}', file = sys.stderr)


def _load(
    config_path: str | pathlib.Path,
    overrides: Sequence[str],
    seed: Optional[int]) -> problem.Problem:
    return problem.build_problem(
        problem.load_problem(config_path, overrides), seed = seed)


""" solve """


@dataclasses.dataclass(eq = False, kw_only = True)
class SolveOutcome(object):
    """What one solve produced.

    Args:
        code (int): exit code.
        report (Optional[reports.SolveReport]): solve report. None when the
            flow itself failed.
        summary (dict[str, Any]): JSON summary written to disk.

    """
    code: int
    report: Optional[reports.SolveReport]
    summary: dict[str, Any]


def run_solve(prob: problem.Problem) -> SolveOutcome:
    """Solves and evaluates 'prob' without writing anything."""
    report = None
    try:
        report = prob.solve()
    except errors.PhaseError as error:
        _error(str(error))
        report = error.report
    except _SOLVER_FAILURES as error:
        _error(f'{type(error).__name__}: {error}')
        summary = {
            'status': 'flow_failed',
            'success': False,
            'error': f'{type(error).__name__}: {error}'}
        return SolveOutcome(
            code = EXIT_SOLVER, report = None, summary = summary)
    if report.status == 'solved':
        try:
            evaluation.evaluate_report(
                report, prob.model, prob.phase2.spec, prob.evaluation)
        except _SOLVER_FAILURES as error:
            _error(f'evaluation failed: {type(error).__name__}: {error}')
            report.status = 'evaluation_failed'
    if report.status != 'solved':
        code = EXIT_SOLVER
    elif report.success:
        code = EXIT_OK
    else:
        code = EXIT_CRITERIA
    summary = report.summary()
    return SolveOutcome(code = code, report = report, summary = summary)


def solve_and_write(prob: problem.Problem) -> SolveOutcome:
    """Solves 'prob' and writes its artifacts to 'output.directory'.

    The summary echoes the seed and the validated problem file.

    """
    outcome = run_solve(prob)
    outcome.summary['exit_code'] = outcome.code
    outcome.summary['seed'] = prob.evaluation.seed
    outcome.summary['problem'] = prob.config.model_dump(mode = 'json')
    directory = pathlib.Path(prob.config.output.directory)
    if outcome.report is None:
        artifacts.write_json(
            directory / artifacts.SUMMARY_FILE, outcome.summary)
    else:
        artifacts.write_solution(
            directory, outcome.report, outcome.summary,
            prob.config.output.formats)
    return outcome


def _one_line(outcome: SolveOutcome) -> str:
    report = outcome.report
    if report is None:
        return f'success=False status={outcome.summary["status"]}'
    phase1 = (
        'skipped' if report.phase1_skipped
        else f'{report.phase1.trace.accepted} steps')
    phase2 = (
        '-' if report.phase2 is None or report.phase2.trace is None
        else f'{report.phase2.trace.accepted} steps')
    return (
        f'success={report.success} status={report.status} '
        f'action={report.action:.10g} '
        f'solve_time={report.wall_times.get("solve", 0.0):.3f}s '
        f'phase1={phase1} phase2={phase2}')


def cmd_solve(
    config_path: str | pathlib.Path,
    overrides: Sequence[str] = (),
    output_dir: Optional[str | pathlib.Path] = None,
    seed: Optional[int] = None) -> int:
    """Solves a problem file and writes its artifacts.

    Args:
        config_path (str | pathlib.Path): TOML problem file.
        overrides (Sequence[str]): 'dotted.path=value' overrides.
        output_dir (Optional[str | pathlib.Path]): replaces
            'output.directory'. Defaults to None.
        seed (Optional[int]): replaces 'evaluation.seed'. Defaults to None.

    Returns:
        int: 0 when the verdict passes, 1 on a configuration error, 2 when
            the solver fails, and 3 when the verdict fails.

    """
    if output_dir is not None:
        overrides = [
            *overrides,
            f'output.directory="{pathlib.Path(output_dir).as_posix()}"']
    try:
        prob = _load(config_path, overrides, seed)
    except errors.ConfigError as error:
        _error(str(error))
        return EXIT_CONFIG
    try:
        outcome = solve_and_write(prob)
    except OSError as error:
        _error(f'cannot write to {prob.config.output.directory}: {error}')
        return EXIT_CONFIG
    print(_one_line(outcome))
    return outcome.code


""" evaluate """


def cmd_evaluate(
    solution: str | pathlib.Path,
    config_path: str | pathlib.Path,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None) -> int:
    """Replays a saved solution and writes 'verdict.json' next to it.

    The replay uses the same dense reference the solve evaluated, so with
    the same problem file the verdict matches the one in 'summary.json'.

    Returns:
        int: 0 when the verdict passes, 1 on malformed inputs, 2 when the
            replay fails numerically, and 3 when the verdict fails.

    """
    try:
        prob = _load(config_path, overrides, seed)
        reference = artifacts.read_reference(solution)
    except (errors.ConfigError, errors.ArtifactError) as error:
        _error(str(error))
        return EXIT_CONFIG
    width = 2 * prob.model.dof
    if reference.states.shape[1] != width or (
            reference.controls.shape[1] != prob.model.inputs):
        _error(
            f'{solution}: columns do not match a model with {width} states '
            f'and {prob.model.inputs} inputs')
        return EXIT_CONFIG
    try:
        verdict = evaluation.replay(
            prob.model, reference, prob.phase2.spec.constraints, prob.xf,
            prob.evaluation)
    except _SOLVER_FAILURES as error:
        _error(f'replay failed: {type(error).__name__}: {error}')
        return EXIT_SOLVER
    breakdown = verdict.to_dict()
    try:
        artifacts.write_json(
            pathlib.Path(solution) / artifacts.VERDICT_FILE, breakdown)
    except OSError as error:
        _error(f'cannot write verdict: {error}')
        return EXIT_CONFIG
    print(json.dumps(breakdown, indent = 2, sort_keys = True))
    return EXIT_OK if verdict.success else EXIT_CRITERIA



""" sweep """


def _failed_trial(code: int) -> dict[str, Any]:
    return {
        'code': code, 'success': False, 'action': np.nan, 'defect': np.nan,
        'wall_time': np.nan}


def _trial(
    config_path: str,
    overrides: list[str],
    seed: Optional[int],
    quiet: bool) -> dict[str, Any]:
    """Runs one sweep trial in its own output directory."""
    framework.configure_logging(quiet = quiet)
    prob = _load(config_path, overrides, seed)
    outcome = solve_and_write(prob)
    report = outcome.report
    if report is None:
        return _failed_trial(outcome.code)
    return {
        'code': outcome.code,
        'success': report.success,
        'action': report.action,
        'defect': report.feasibility_defect,
        'wall_time': report.wall_times.get('solve', np.nan)}


def _statistics(values: Sequence[float]) -> tuple[float, float]:
    finite = np.asarray(values, dtype = float)
    finite = finite[np.isfinite(finite)]
    if finite.size == 0:
        return np.nan, np.nan
    spread = float(np.std(finite, ddof = 1)) if finite.size > 1 else np.nan
    return float(np.mean(finite)), spread


def _run_trials(
    plan: list[tuple[int, int, list[str]]],
    config_path: str,
    seed: Optional[int],
    jobs: int,
    quiet: bool) -> dict[tuple[int, int], dict[str, Any]]:
    results: dict[tuple[int, int], dict[str, Any]] = {}
    if jobs == 1:
        for index, trial, extra in plan:
            try:
                results[(index, trial)] = _trial(
                    config_path, extra, seed, quiet)
            except (errors.HearthError, OSError) as error:
                _error(f'trial {index}.{trial} failed: {error}')
                results[(index, trial)] = _failed_trial(EXIT_SOLVER)
        return results
    with concurrent.futures.ProcessPoolExecutor(max_workers = jobs) as pool:
        futures = {
            pool.submit(_trial, config_path, extra, seed, quiet): (index, trial)
            for index, trial, extra in plan}
        for future in concurrent.futures.as_completed(futures):
            index, trial = futures[future]
            try:
                results[(index, trial)] = future.result()
            except Exception as error:  # noqa: BLE001
                _error(f'trial {index}.{trial} failed: {error}')
                results[(index, trial)] = _failed_trial(EXIT_SOLVER)
    return results


def cmd_sweep(
    config_path: str | pathlib.Path,
    parameter: str,
    values: Sequence[str],
    overrides: Sequence[str] = (),
    output_dir: Optional[str | pathlib.Path] = None,
    seed: Optional[int] = None,
    repeat: int = 1,
    jobs: int = 1,
    quiet: bool = False) -> int:
    """Solves a problem file once per value (and repeat) of 'parameter'.

    Each trial writes its artifacts to 'value_<i>/trial_<r>' below the
    output directory. Trials run in a process pool when 'jobs' exceeds one.
    Failed trials are recorded and do not stop the sweep. 'trials.csv' lists
    every trial and 'sweep.csv' aggregates them per value; std columns need
    at least two finite trials.

    Args:
        config_path (str | pathlib.Path): TOML problem file.
        parameter (str): dotted override path, for example 'phase2.kd'.
        values (Sequence[str]): numeric TOML literals to assign.
        overrides (Sequence[str]): further overrides applied to every trial.
        output_dir (Optional[str | pathlib.Path]): replaces
            'output.directory'. Defaults to None.
        seed (Optional[int]): replaces 'evaluation.seed'. Defaults to None.
        repeat (int): trials per value. Defaults to 1.
        jobs (int): worker processes. Defaults to 1.
        quiet (bool): silences logging below ERROR. Defaults to False.

    Returns:
        int: 0 once every trial ran, 1 on a configuration error.

    """
    if not values:
        _error('sweep needs at least one value')
        return EXIT_CONFIG
    if repeat < 1 or jobs < 1:
        _error('repeat and jobs must be at least 1')
        return EXIT_CONFIG
    numbers = []
    try:
        for text in values:
            number = problem.parse_override(f'{parameter}={text}')[1]
            if isinstance(number, bool) or not isinstance(
                    number, (int, float)):
                raise errors.ConfigError(
                    f'sweep value {text!r} is not a number')
            numbers.append(float(number))
            base = _load(config_path, [*overrides, f'{parameter}={text}'], seed)
    except errors.ConfigError as error:
        _error(str(error))
        return EXIT_CONFIG
    root = pathlib.Path(output_dir or base.config.output.directory)
    plan = []
    for index, text in enumerate(values):
        for trial in range(repeat):
            subdirectory = root / f'value_{index:03d}' / f'trial_{trial:03d}'
            plan.append((index, trial, [
                *overrides,
                f'{parameter}={text}',
                f'output.directory="{subdirectory.as_posix()}"']))
    results = _run_trials(plan, str(config_path), seed, jobs, quiet)
    trials = []
    aggregate = []
    for index, number in enumerate(numbers):
        rows = [results[(index, trial)] for trial in range(repeat)]
        for trial, row in enumerate(rows):
            trials.append([
                number, trial, row['code'], float(row['success']),
                row['action'], row['defect'], row['wall_time']])
        aggregate.append([
            number, repeat, float(np.mean([r['success'] for r in rows])),
            *_statistics([r['action'] for r in rows]),
            *_statistics([r['defect'] for r in rows]),
            *_statistics([r['wall_time'] for r in rows])])
        logger.info(
            'sweep %s = %g: %d of %d trials succeeded', parameter, number,
            sum(bool(r['success']) for r in rows), repeat)
    artifacts.write_table(root / TRIALS_FILE, TRIAL_COLUMNS, np.array(trials))
    artifacts.write_table(root / SWEEP_FILE, SWEEP_COLUMNS, np.array(aggregate))
    print(
        f'sweep of {parameter}: {len(plan)} trials, '
        f'wrote {root / SWEEP_FILE}')
    return EXIT_OK


""" Entry Point """


def build_parser() -> argparse.ArgumentParser:
    """Returns the 'hearth' argument parser."""
    shared = argparse.ArgumentParser(add_help = False)
    shared.add_argument(
        '--config', required = True,
        help = 'TOML problem file')
    shared.add_argument(
        '--set', dest = 'overrides', action = 'append', default = [],
        metavar = 'KEY=VALUE',
        help = 'override a dotted field with a TOML literal (repeatable)')
    shared.add_argument(
        '--seed', type = int, default = None,
        help = 'seed for sampled constant estimation (default: from config)')
    shared.add_argument(
        '--quiet', action = 'store_true',
        help = 'only log errors')
    parser = argparse.ArgumentParser(
        prog = 'hearth',
        description = 'Affine geometric heat flow trajectory optimization.')
    commands = parser.add_subparsers(dest = 'command', required = True)
    solve = commands.add_parser(
        'solve', parents = [shared],
        help = 'solve a problem file and write its artifacts')
    solve.add_argument(
        '--output-dir', default = None,
        help = 'output directory (default: output.directory)')
    evaluate = commands.add_parser(
        'evaluate', parents = [shared],
        help = 'replay a saved solution and write verdict.json')
    evaluate.add_argument(
        'solution',
        help = 'solution directory written by solve')
    sweep = commands.add_parser(
        'sweep', parents = [shared],
        help = 'solve once per value of one parameter')
    sweep.add_argument(
        '--parameter', required = True,
        help = 'dotted override path, for example phase2.kd')
    sweep.add_argument(
        '--values', nargs = '*', default = [],
        help = 'numeric values to assign')
    sweep.add_argument(
        '--repeat', type = int, default = 1,
        help = 'trials per value (default: 1)')
    sweep.add_argument(
        '--jobs', type = int, default = 1,
        help = 'worker processes (default: 1)')
    sweep.add_argument(
        '--output-dir', default = None,
        help = 'sweep directory (default: output.directory)')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return EXIT_CONFIG if error.code else EXIT_OK
    try:
        framework.configure_logging(quiet = args.quiet)
    except errors.ConfigError as error:
        _error(str(error))
        return EXIT_CONFIG
    if args.command == 'solve':
        return cmd_solve(
            args.config, args.overrides, args.output_dir, args.seed)
    if args.command == 'evaluate':
        return cmd_evaluate(
            args.solution, args.config, args.overrides, args.seed)
    return cmd_sweep(
        args.config, args.parameter, args.values, args.overrides,
        args.output_dir, args.seed, args.repeat, args.jobs, args.quiet)
