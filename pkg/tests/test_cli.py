"""
test_cli: tests the solve, evaluate and sweep commands
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

ToDo:

"""
from __future__ import annotations

import pathlib

import numpy as np
import pytest

from hearth import artifacts
from hearth import cli
from hearth import errors


SCENARIOS = pathlib.Path(__file__).parent.parent / 'scenarios'
POINT = str(SCENARIOS / 'double_integrator.toml')
COARSE = ['--set', 'evaluation.dense_dt=1e-2']
INPUT_LIMIT = [
    '--set',
    'constraints=[{kind = "input_box", lower = [-20.0], upper = [20.0]}]']


@pytest.fixture(scope = 'module')
def solved(tmp_path_factory: pytest.TempPathFactory) -> pathlib.Path:
    directory = tmp_path_factory.mktemp('point') / 'solution'
    code = cli.main([
        'solve', '--config', POINT, '--output-dir', str(directory),
        '--quiet', *COARSE])
    assert code == cli.EXIT_OK
    return directory


def test_solve_writes_artifacts(solved: pathlib.Path) -> None:
    for name in (
            artifacts.TRAJECTORY_FILE, artifacts.CONTROL_FILE,
            artifacts.NODES_FILE, artifacts.TRACE_FILE,
            artifacts.SUMMARY_FILE):
        assert (solved / name).is_file()
    summary = artifacts.read_json(solved / artifacts.SUMMARY_FILE)
    assert summary['status'] == 'solved' and summary['success']
    assert summary['exit_code'] == cli.EXIT_OK
    assert summary['seed'] == 0
    assert summary['problem']['phase2']['kd'] == 1e4
    assert summary['action'] == pytest.approx(12.0, rel = 0.05)
    assert summary['verdict']['terminal']['passed']
    assert summary['error_bound']['label'] == 'estimated'
    header, rows = artifacts.read_table(solved / artifacts.TRAJECTORY_FILE)
    assert header == ['t', 'q_1', 'qd_1']
    assert rows.shape == (101, 3)
    np.testing.assert_array_equal(rows[0, 1:], [0.0, 0.0])
    header, trace = artifacts.read_table(solved / artifacts.TRACE_FILE)
    assert header == list(artifacts.TRACE_COLUMNS)
    assert np.all(np.diff(trace[:, 1]) <= 1e-9 * abs(trace[0, 1]))


def test_evaluate_reproduces_the_verdict(
    solved: pathlib.Path,
    capsys: pytest.CaptureFixture) -> None:
    assert cli.main([
        'evaluate', str(solved), '--config', POINT, *COARSE]) == cli.EXIT_OK
    verdict = artifacts.read_json(solved / artifacts.VERDICT_FILE)
    summary = artifacts.read_json(solved / artifacts.SUMMARY_FILE)
    assert verdict == summary['verdict']
    assert '"success": true' in capsys.readouterr().out


def _copy(solved: pathlib.Path, target: pathlib.Path, scale: float) -> None:
    for name in (artifacts.TRAJECTORY_FILE, artifacts.CONTROL_FILE):
        header, rows = artifacts.read_table(solved / name)
        if name == artifacts.CONTROL_FILE:
            rows[:, 1:] *= scale
        artifacts.write_table(target / name, header, rows)


def test_evaluate_rejects_tampered_controls(
    solved: pathlib.Path,
    tmp_path: pathlib.Path) -> None:
    _copy(solved, tmp_path / 'clean', 1.0)
    _copy(solved, tmp_path / 'tampered', 10.0)
    assert cli.main([
        'evaluate', str(tmp_path / 'clean'), '--config', POINT,
        *INPUT_LIMIT]) == cli.EXIT_OK
    assert cli.main([
        'evaluate', str(tmp_path / 'tampered'), '--config', POINT,
        *INPUT_LIMIT]) == cli.EXIT_CRITERIA
    verdict = artifacts.read_json(
        tmp_path / 'tampered' / artifacts.VERDICT_FILE)
    assert not verdict['success']
    assert not verdict['constraints']['passed']
    assert verdict['constraints']['excess']['0_input_box'] > 0.0


def test_evaluate_malformed_inputs(
    solved: pathlib.Path,
    tmp_path: pathlib.Path) -> None:
    assert cli.main([
        'evaluate', str(tmp_path), '--config', POINT]) == cli.EXIT_CONFIG
    two_link = str(SCENARIOS / 'two_link_obstacle.toml')
    assert cli.main([
        'evaluate', str(solved), '--config', two_link]) == cli.EXIT_CONFIG


def test_configuration_errors(
    tmp_path: pathlib.Path,
    capsys: pytest.CaptureFixture) -> None:
    mismatch = tmp_path / 'mismatch.toml'
    mismatch.write_text(
        '[system]\nkind = "planar_chain"\nN = 2\nmasses = [1.0]\n'
        'lengths = [1.0]\n\n[task]\nx0 = [0.0, 0.0]\nxf = [1.0, 0.0]\n'
        'T = 1.0\n',
        encoding = 'utf-8')
    assert cli.main(['solve', '--config', str(mismatch)]) == cli.EXIT_CONFIG
    assert 'masses has 1 entries but N is 2' in capsys.readouterr().err
    missing = str(tmp_path / 'missing.toml')
    assert cli.main(['solve', '--config', missing]) == cli.EXIT_CONFIG
    assert cli.main([
        'solve', '--config', POINT, '--set', 'phase2.kd']) == cli.EXIT_CONFIG
    assert cli.main([
        'solve', '--config', POINT, '--set', 'phase2.kd=0']) == (
            cli.EXIT_CONFIG)
    assert cli.main(['launch', '--config', POINT]) == cli.EXIT_CONFIG
    assert cli.main(['solve']) == cli.EXIT_CONFIG
    assert not list(tmp_path.glob('**/summary.json'))


def test_cost_dimensions_are_checked_before_solving(
    tmp_path: pathlib.Path,
    capsys: pytest.CaptureFixture) -> None:
    weights = [
        '--set',
        'cost={kind = "weighted_squared_control", weights = [1.0, 2.0]}']
    tracking = [
        '--set',
        'cost={kind = "custom_state_cost", state_weights = [1.0]}']
    for override in (weights, tracking):
        assert cli.main([
            'solve', '--config', POINT, '--output-dir',
            str(tmp_path), *override]) == cli.EXIT_CONFIG
        assert 'cost: ' in capsys.readouterr().err
    assert not list(tmp_path.glob('**/summary.json'))


def test_evaluate_reports_replay_failures(
    solved: pathlib.Path,
    tmp_path: pathlib.Path,
    monkeypatch: pytest.MonkeyPatch) -> None:
    _copy(solved, tmp_path, 1.0)

    def singular(*args, **kwargs):
        raise errors.DecompositionError('fbar is singular')

    monkeypatch.setattr(cli.evaluation, 'replay', singular)
    assert cli.main([
        'evaluate', str(tmp_path), '--config', POINT]) == cli.EXIT_SOLVER
    assert not (tmp_path / artifacts.VERDICT_FILE).exists()


def test_solver_failure_is_recorded(tmp_path: pathlib.Path) -> None:
    directory = tmp_path / 'budget'
    assert cli.main([
        'solve', '--config', POINT, '--output-dir', str(directory),
        '--quiet', '--set', 'phase2.max_steps=1']) == cli.EXIT_SOLVER
    summary = artifacts.read_json(directory / artifacts.SUMMARY_FILE)
    assert summary['status'] == 'flow_failed'
    assert summary['exit_code'] == cli.EXIT_SOLVER
    assert 'MaxStepsExceeded' in summary['error']
    assert not (directory / artifacts.TRAJECTORY_FILE).exists()


def test_sweep(tmp_path: pathlib.Path) -> None:
    assert cli.cmd_sweep(POINT, 'phase2.kd', [], output_dir = tmp_path) == (
        cli.EXIT_CONFIG)
    assert cli.cmd_sweep(
        POINT, 'phase2.kd', ['high'], output_dir = tmp_path) == cli.EXIT_CONFIG
    assert cli.cmd_sweep(
        POINT, 'phase2.kd', ['1e2'], output_dir = tmp_path, repeat = 0) == (
            cli.EXIT_CONFIG)
    code = cli.main([
        'sweep', '--config', POINT, '--parameter', 'phase2.kd',
        '--values', '1e2', '1e4', '--output-dir', str(tmp_path), '--quiet',
        '--set', 'phase2.p=10', *COARSE])
    assert code == cli.EXIT_OK
    header, rows = artifacts.read_table(tmp_path / cli.SWEEP_FILE)
    assert header == list(cli.SWEEP_COLUMNS)
    np.testing.assert_array_equal(rows[:, 0], [1e2, 1e4])
    np.testing.assert_array_equal(rows[:, 1], [1.0, 1.0])
    assert np.all(np.isnan(rows[:, 4]))
    header, trials = artifacts.read_table(tmp_path / cli.TRIALS_FILE)
    assert header == list(cli.TRIAL_COLUMNS)
    assert trials.shape == (2, len(cli.TRIAL_COLUMNS))
    for index in range(2):
        summary = artifacts.read_json(
            tmp_path / f'value_{index:03d}' / 'trial_000'
            / artifacts.SUMMARY_FILE)
        assert summary['problem']['phase2']['p'] == 10
    assert rows[0, 5] > rows[1, 5]


if __name__ == '__main__':
    pytest.main([__file__])
