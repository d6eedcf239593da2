"""
test_problem: tests problem files, overrides and problem building
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

import hearth
from hearth import constraints
from hearth import costs
from hearth import problem


SCENARIOS = pathlib.Path(__file__).parent.parent / 'scenarios'


def _data(**sections) -> dict:
    data = {
        'system': {'kind': 'double_integrator', 'masses': [1.0]},
        'task': {'x0': [0.0, 0.0], 'xf': [1.0, 0.0], 'T': 1.0}}
    data.update(sections)
    return data


def test_parse_override() -> None:
    assert problem.parse_override('phase2.kd=1e5') == ('phase2.kd', 1e5)
    assert problem.parse_override(' phase2.p = 20 ') == ('phase2.p', 20)
    assert problem.parse_override('output.directory="out/a"') == (
        'output.directory', 'out/a')
    assert problem.parse_override('task.timing=linear') == (
        'task.timing', 'linear')
    assert problem.parse_override('task.x0=[0.0, 1.5]') == (
        'task.x0', [0.0, 1.5])
    with pytest.raises(hearth.errors.ConfigError):
        problem.parse_override('phase2.kd')
    with pytest.raises(hearth.errors.ConfigError):
        problem.parse_override('=3')


def test_apply_override() -> None:
    data = _data(constraints = [{'kind': 'input_box', 'upper': [2.0]}])
    problem.apply_override(data, 'phase2.kd', 10.0)
    assert data['phase2'] == {'kd': 10.0}
    problem.apply_override(data, 'constraints.0.gain', 5.0)
    assert data['constraints'][0]['gain'] == 5.0
    problem.apply_override(data, 'task.T', 2.0)
    assert data['task']['T'] == 2.0
    with pytest.raises(hearth.errors.ConfigError, match = 'constraints.4'):
        problem.apply_override(data, 'constraints.4.gain', 1.0)
    with pytest.raises(hearth.errors.ConfigError, match = 'task.T.x'):
        problem.apply_override(data, 'task.T.x.y', 1.0)


def test_validation_messages() -> None:
    config = problem.validate_problem(_data())
    assert config.phase2.kd == 1e4 and config.phase2.method == 'bdf'
    assert config.system.dof == 1
    bad = _data(system = {
        'kind': 'planar_chain', 'N': 3, 'masses': [1.0, 1.0],
        'lengths': [1.0, 1.0]})
    with pytest.raises(hearth.errors.ConfigError, match = 'system') as caught:
        problem.validate_problem(bad)
    assert 'masses has 2 entries but N is 3' in str(caught.value)
    wide = _data()
    wide['task']['x0'] = [0.0, 0.0, 0.0]
    with pytest.raises(
            hearth.errors.ConfigError, match = 'task.x0 has 3 entries'):
        problem.validate_problem(wide)
    with pytest.raises(hearth.errors.ConfigError, match = 'phase2.kd'):
        problem.validate_problem(_data(phase2 = {'kd': -1.0}))
    with pytest.raises(hearth.errors.ConfigError, match = 'phase2.kd'):
        problem.validate_problem(_data(phase2 = {'kd': float('nan')}))
    with pytest.raises(hearth.errors.ConfigError, match = 'phase1.typo'):
        problem.validate_problem(_data(phase1 = {'typo': 1}))
    with pytest.raises(hearth.errors.ConfigError, match = 'unknown method'):
        problem.validate_problem(_data(phase2 = {'method': 'euler'}))
    with pytest.raises(hearth.errors.ConfigError, match = 'lengths'):
        problem.validate_problem(_data(system = {
            'kind': 'planar_chain', 'masses': [1.0]}))


def test_read_problem(tmp_path: pathlib.Path) -> None:
    with pytest.raises(hearth.errors.ConfigError, match = 'cannot read'):
        problem.read_problem(tmp_path / 'missing.toml')
    broken = tmp_path / 'broken.toml'
    broken.write_text('[system]\nkind = \n', encoding = 'utf-8')
    with pytest.raises(hearth.errors.ConfigError, match = 'line 2'):
        problem.read_problem(broken)
    config = problem.load_problem(
        SCENARIOS / 'double_integrator.toml',
        ['phase2.kd=1e2', 'output.directory="elsewhere"'])
    assert config.phase2.kd == 100.0
    assert config.phase2.p == 16
    assert config.output.directory == 'elsewhere'
    assert config.task.timing == 'linear'


def test_scenarios_build() -> None:
    for path in sorted(SCENARIOS.glob('*.toml')):
        built = problem.build_problem(problem.load_problem(path))
        assert built.x0.size == 2 * built.model.dof
        assert built.phase1.spec.mode == 'phase1'
        assert built.phase2.spec.mode == 'phase2'
        assert built.horizon > 0.0
    arm = problem.build_problem(
        problem.load_problem(SCENARIOS / 'two_link_obstacle.toml'))
    assert arm.model.dof == 2 and arm.phase2.degree == 24
    obstacle = arm.phase2.spec.constraints[0]
    assert isinstance(obstacle, constraints.CircleObstacle)
    assert obstacle.gain == 1e7 and obstacle.sharpness == 100.0
    box = arm.phase2.spec.constraints[1]
    assert box.gain == 1e4


def test_build_problem() -> None:
    gains = _data(
        constraints = [{'kind': 'input_box', 'lower': [-9.0], 'upper': [9.0]}],
        phase1 = {'k_input': 1e6, 'c_input': 20.0},
        phase2 = {'kd': 1e3, 'mode': 'legacy', 'method': 'dopri5'},
        evaluation = {'seed': 4})
    built = problem.build_problem(problem.validate_problem(gains))
    assert built.phase1.spec.constraints[0].gain == 1e6
    assert built.phase1.spec.constraints[0].sharpness == 20.0
    assert built.phase2.spec.constraints[0].gain == 1e4
    assert built.phase2.spec.mode == 'legacy'
    assert built.phase2.config.method == 'dopri5'
    assert built.phase2.spec.kd == 1e3
    assert built.evaluation.seed == 4
    assert problem.build_problem(
        problem.validate_problem(gains), seed = 9).evaluation.seed == 9
    tracking = problem.build_problem(problem.validate_problem(_data(
        cost = {'kind': 'custom_state_cost', 'state_weights': [1.0, 0.0]})))
    cost = tracking.phase2.spec.cost
    assert isinstance(cost, costs.QuadraticStateCost)
    np.testing.assert_array_equal(cost.reference, [1.0, 0.0])
    pair = problem.build_problem(problem.validate_problem(_data(
        system = {'kind': 'double_integrator', 'N': 2},
        task = {'x0': [0.0] * 4, 'xf': [1.0, 2.0, 0.0, 0.0], 'T': 1.0})))
    assert pair.model.dof == 2 and pair.model.inputs == 2


def test_build_problem_errors() -> None:
    unknown = _data(constraints = [{'kind': 'ellipse_obstacle'}])
    with pytest.raises(hearth.errors.ConfigError, match = '^constraints.0: '):
        problem.build_problem(problem.validate_problem(unknown))
    robot = _data(system = {'kind': 'scara', 'masses': [1.0]})
    with pytest.raises(hearth.errors.ConfigError, match = '^system: '):
        problem.build_problem(problem.validate_problem(robot))
    frames = {
        'system': {
            'kind': 'planar_chain', 'masses': [1.0, 1.0],
            'lengths': [1.0, 1.0]},
        'task': {'x0': [0.0] * 4, 'xf': [1.0, 0.0, 0.0, 0.0], 'T': 1.0},
        'constraints': [
            {'kind': 'input_box', 'upper': [5.0, 5.0]},
            {'kind': 'circle_obstacle', 'center': [0.0, 0.0],
             'radius': 0.2, 'frames': [3]}]}
    with pytest.raises(hearth.errors.ConfigError, match = '^constraints.1: '):
        problem.build_problem(problem.validate_problem(frames))
    cost = _data(cost = {'kind': 'weighted_squared_control', 'weights': [0.0]})
    with pytest.raises(hearth.errors.ConfigError, match = '^cost: '):
        problem.build_problem(problem.validate_problem(cost))
    weights = _data(cost = {
        'kind': 'weighted_squared_control', 'weights': [1.0, 2.0]})
    with pytest.raises(hearth.errors.ConfigError, match = 'weights has 2'):
        problem.build_problem(problem.validate_problem(weights))
    tracking = _data(cost = {
        'kind': 'custom_state_cost', 'state_weights': [1.0, 1.0, 1.0]})
    with pytest.raises(hearth.errors.ConfigError, match = '^cost: '):
        problem.build_problem(problem.validate_problem(tracking))
    reference = _data(cost = {
        'kind': 'custom_state_cost', 'reference': [0.0]})
    with pytest.raises(hearth.errors.ConfigError, match = '^cost: '):
        problem.build_problem(problem.validate_problem(reference))


if __name__ == '__main__':
    test_parse_override()
    test_apply_override()
    test_validation_messages()
    test_scenarios_build()
    test_build_problem()
    test_build_problem_errors()
