"""
test_scenarios: end-to-end runs of the shipped problem files
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

The pendulum and two-link runs take minutes and are deselected by default;
run them with 'pytest -m scenario'.

ToDo:

"""
from __future__ import annotations

import pathlib
from collections.abc import Sequence

import numpy as np
import pytest

from hearth import artifacts
from hearth import cli
from hearth import problem
from hearth import reports


SCENARIOS = pathlib.Path(__file__).parent.parent / 'scenarios'


def _solve(name: str, overrides: Sequence[str] = ()) -> cli.SolveOutcome:
    prob = problem.build_problem(
        problem.load_problem(SCENARIOS / f'{name}.toml', overrides))
    return cli.run_solve(prob)


def _monotone(report: reports.SolveReport) -> bool:
    for record in (report.phase1, report.phase2):
        if record is None or record.trace is None:
            continue
        actions = record.trace.actions
        if not np.all(actions[1:] <= actions[:-1] * (1 + 1e-8) + 1e-10):
            return False
    return True


def test_kd_sweep_shrinks_the_defect() -> None:
    defects = []
    for kd in ('1e2', '1e4', '1e6'):
        outcome = _solve(
            'double_integrator',
            [f'phase2.kd={kd}', 'evaluation.dense_dt=1e-2'])
        report = outcome.report
        assert report is not None and report.status == 'solved'
        assert _monotone(report)
        defects.append(report.feasibility_defect)
    assert defects[0] > defects[1] > defects[2]
    assert report.verdict.terminal_error < 0.05
    assert outcome.code == cli.EXIT_OK


@pytest.mark.scenario
def test_pendulum_swing_up() -> None:
    outcome = _solve('pendulum_swing_up')
    report = outcome.report
    assert outcome.code == cli.EXIT_OK
    assert _monotone(report)
    assert report.verdict.terminal_error < 0.05
    assert report.verdict.constraints_ok
    sampled = report.controls.controls[::10]
    assert np.max(np.abs(sampled)) <= 1.05 * 15.0


@pytest.mark.scenario
def test_two_link_obstacle_phases() -> None:
    outcome = _solve('two_link_obstacle')
    report = outcome.report
    assert not report.phase1_skipped
    assert report.phase1.max_violation <= 1e-3
    assert report.phase2.max_violation <= 1e-3
    assert report.phase2.final_action <= report.phase2.initial_action
    assert _monotone(report)
    assert report.verdict.obstacles_ok and report.verdict.constraints_ok
    assert report.verdict.success
    assert outcome.code == cli.EXIT_OK


@pytest.mark.scenario
def test_two_link_obstacle_is_deterministic(tmp_path: pathlib.Path) -> None:
    written = []
    for run in range(2):
        report = _solve('two_link_obstacle').report
        for record in (report.phase1, report.phase2):
            path = tmp_path / f'{record.name}_{run}.csv'
            artifacts.write_trace(path, record.trace)
            written.append(path.read_bytes())
    assert written[0] == written[2]
    assert written[1] == written[3]


@pytest.mark.scenario
def test_unreachable_goal_fails_cleanly(tmp_path: pathlib.Path) -> None:
    directory = tmp_path / 'blocked'
    code = cli.main([
        'solve', '--config', str(SCENARIOS / 'pendulum_swing_up.toml'),
        '--output-dir', str(directory), '--quiet',
        '--set',
        'constraints=[{kind = "circle_obstacle", center = [0.0, 1.0], '
        'radius = 0.3}]',
        '--set', 'phase1.p=10', '--set', 'phase1.s_max=0.2'])
    assert code in (cli.EXIT_SOLVER, cli.EXIT_CRITERIA)
    summary = artifacts.read_json(directory / artifacts.SUMMARY_FILE)
    assert not summary['success']
    assert summary['status'] != 'solved' or not summary['verdict']['success']


if __name__ == '__main__':
    test_kd_sweep_shrinks_the_defect()
