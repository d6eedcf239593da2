"""
test_costs_constraints: tests running costs and penalized constraints
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

import numpy as np
import pytest

import hearth
from hearth import constraints
from hearth import costs
from hearth import dynamics


TWO_LINK = dynamics.PlanarChain(masses = [1.0, 1.0], lengths = [1.0, 1.0])


def _numeric_jacobian(function, point: np.ndarray) -> np.ndarray:
    columns = []
    for j in range(point.size):
        step = 1e-6 * (1 + abs(point[j]))
        shift = np.zeros(point.size)
        shift[j] = step
        columns.append(
            (function(point + shift) - function(point - shift)) / (2 * step))
    return np.stack(columns, axis = -1)


def test_cost_values_and_gradients() -> None:
    x = np.array([[0.1, -0.2, 0.3, 0.4]])
    xdot = np.zeros_like(x)
    u = np.array([[3.0, -4.0]])
    squared = costs.CostSpec.create('squared_control')
    np.testing.assert_allclose(squared.value(TWO_LINK, x, xdot, u), [25.0])
    dx, dxdot, du = squared.gradients(TWO_LINK, x, xdot, u)
    np.testing.assert_array_equal(dx, 0.0)
    np.testing.assert_array_equal(dxdot, 0.0)
    np.testing.assert_array_equal(du, [[6.0, -8.0]])
    weighted = costs.WeightedSquaredControl(weights = [2.0, 0.5])
    np.testing.assert_allclose(weighted.value(TWO_LINK, x, xdot, u), [26.0])
    np.testing.assert_allclose(
        weighted.gradients(TWO_LINK, x, xdot, u)[2], [[12.0, -4.0]])
    with pytest.raises(hearth.errors.DomainError):
        costs.WeightedSquaredControl(weights = [1.0]).value(
            TWO_LINK, x, xdot, u)
    with pytest.raises(hearth.errors.DomainError):
        costs.WeightedSquaredControl(weights = [1.0, 0.0])
    reference = np.array([0.0, 0.0, 0.3, 0.0])
    tracking = costs.QuadraticStateCost(
        control_weight = 0.5,
        state_weights = [1.0, 2.0, 0.0, 1.0],
        reference = reference)
    expected = 0.5 * 25.0 + 0.01 + 2.0 * 0.04 + 0.16
    np.testing.assert_allclose(
        tracking.value(TWO_LINK, x, xdot, u), [expected])
    dx, _, du = tracking.gradients(TWO_LINK, x, xdot, u)
    np.testing.assert_allclose(dx, [[0.2, -0.8, 0.0, 0.8]])
    np.testing.assert_allclose(du, [[3.0, -4.0]])
    plain = costs.QuadraticStateCost()
    np.testing.assert_allclose(plain.value(TWO_LINK, x, xdot, u), [25.0])
    with pytest.raises(hearth.errors.UnknownKindError):
        costs.CostSpec.create('time_optimal')


def test_activation_and_penalty() -> None:
    assert constraints.activation(0.0, 100.0) == pytest.approx(0.5)
    assert constraints.activation(1.0, 100.0) == pytest.approx(1.0)
    assert constraints.activation(0.01, 200.0) == pytest.approx(
        (1 + np.tanh(2.0)) / 2, rel = 1e-12)
    assert constraints.activation(0.01, 200.0) == pytest.approx(
        0.98201, abs = 1e-5)
    deep = constraints.activation(-1.0, 100.0)
    assert 0.0 < deep < 1e-80
    box = constraints.StateBox(upper = [1.0], gain = 10.0, sharpness = 5.0)
    assert constraints.penalty(0.0, box) == 0.0
    g = np.linspace(-0.5, 0.5, 11)
    np.testing.assert_allclose(
        constraints.penalty(g, box),
        10.0 * g**2 * 0.5 * (1 + np.tanh(5.0 * g)), rtol = 1e-12, atol = 1e-15)
    assert np.all(constraints.penalty(g, box) >= 0.0)
    step = 1e-6
    for value in (-0.3, 0.0, 0.2):
        numeric = (
            constraints.penalty(value + step, box)
            - constraints.penalty(value - step, box)) / (2 * step)
        assert constraints.penalty_slope(value, box) == pytest.approx(
            numeric, abs = 1e-6)


def test_box_values() -> None:
    box = constraints.StateBox(lower = [-1.0], upper = [2.0], indices = [1])
    x = np.array([[5.0, 2.5, 0.0, 0.0], [0.0, -1.5, 0.0, 0.0]])
    np.testing.assert_allclose(
        box.values(TWO_LINK, x, None), [[0.5, -3.5], [-3.5, 0.5]])
    velocity = constraints.VelocityBox(upper = 1.0)
    np.testing.assert_allclose(
        velocity.values(TWO_LINK, np.array([[0.0, 0.0, 2.0, 0.5]]), None),
        [[1.0, -0.5]])
    inputs = constraints.InputBox(lower = -15.0, upper = 15.0)
    assert inputs.group == 'input' and inputs.uses_control
    u = np.array([[16.0, -20.0]])
    np.testing.assert_allclose(
        inputs.values(TWO_LINK, x[:1], u), [[1.0, -35.0, -31.0, 5.0]])
    with pytest.raises(hearth.errors.DomainError):
        inputs.values(TWO_LINK, x[:1], None)
    with pytest.raises(hearth.errors.DomainError):
        constraints.StateBox()
    with pytest.raises(hearth.errors.DomainError):
        constraints.StateBox(lower = [1.0], upper = [0.0])
    with pytest.raises(hearth.errors.DomainError):
        constraints.StateBox(upper = [1.0], indices = [2]).values(
            TWO_LINK, x, None)
    with pytest.raises(hearth.errors.DomainError):
        constraints.StateBox(upper = [1.0], gain = 0.0)


def test_box_violation_margin() -> None:
    inputs = constraints.InputBox(lower = -10.0, upper = 10.0)
    states = np.zeros((3, 4))
    within = np.array([[10.4, 0.0], [0.0, -10.4], [1.0, 1.0]])
    assert inputs.satisfied(TWO_LINK, states, within, 0.05)
    assert not inputs.satisfied(TWO_LINK, states, within, 0.0)
    outside = within.copy()
    outside[2, 1] = 10.6
    assert not inputs.satisfied(TWO_LINK, states, outside, 0.05)
    assert inputs.violation(TWO_LINK, states, outside, 0.05) == (
        pytest.approx(0.1))


def test_obstacle() -> None:
    pendulum = dynamics.PlanarChain(masses = [1.0], lengths = [1.0])
    obstacle = constraints.CircleObstacle(
        center = [1.0, 0.0], radius = 0.5, clearance = 0.1)
    assert obstacle.group == 'obstacle' and not obstacle.uses_control
    assert obstacle.inflated_radius == pytest.approx(0.6)
    hanging = np.array([[0.0, 0.0]])
    np.testing.assert_allclose(
        obstacle.values(pendulum, hanging, None), [[0.36 - 2.0]])
    inside = np.array([[np.pi / 2, 0.0]])
    np.testing.assert_allclose(
        obstacle.values(pendulum, inside, None), [[0.36]], atol = 1e-12)
    assert not obstacle.satisfied(pendulum, inside, np.zeros((1, 1)), 0.05)
    assert obstacle.satisfied(pendulum, hanging, np.zeros((1, 1)), 0.05)
    touching = constraints.CircleObstacle(center = [1.0, -1.0], radius = 1.0)
    assert not touching.satisfied(pendulum, hanging, np.zeros((1, 1)), 0.0)
    tip = constraints.CircleObstacle(
        center = [1.0, -1.0], radius = 0.2, frames = [2])
    bent = np.array([[np.pi / 2, -np.pi / 2, 0.0, 0.0]])
    assert tip.violation(TWO_LINK, bent, np.zeros((1, 2)), 0.0) == (
        pytest.approx(0.2))
    with pytest.raises(hearth.errors.DomainError):
        constraints.CircleObstacle(
            center = [0.0, 0.0], radius = 0.2, frames = [3]).values(
                TWO_LINK, bent, None)
    with pytest.raises(hearth.errors.DomainError):
        constraints.CircleObstacle(center = [0.0], radius = 0.2)
    with pytest.raises(hearth.errors.DomainError):
        constraints.CircleObstacle(center = [0.0, 0.0], radius = -0.2)


def test_jacobians_match_finite_differences() -> None:
    rng = np.random.default_rng(11)
    specs = [
        constraints.StateBox(lower = [-1.0, -2.0], upper = [1.0, 2.0]),
        constraints.VelocityBox(upper = [3.0], indices = [0]),
        constraints.CircleObstacle(center = [1.2, -0.8], radius = 0.3)]
    for x in rng.uniform(-2.0, 2.0, (5, 4)):
        for spec in specs:
            dg_dx, dg_du = spec.jacobians(TWO_LINK, x[None], None)
            numeric = _numeric_jacobian(
                lambda point: spec.values(TWO_LINK, point[None], None)[0], x)
            np.testing.assert_allclose(dg_dx[0], numeric, atol = 1e-6)
            assert dg_du.shape == dg_dx.shape[:-1] + (2,)
    inputs = constraints.InputBox(lower = [-1.0, -1.0], upper = [1.0, 1.0])
    u = rng.normal(size = 2)
    _, dg_du = inputs.jacobians(TWO_LINK, np.zeros((1, 4)), u[None])
    numeric = _numeric_jacobian(
        lambda point: inputs.values(TWO_LINK, np.zeros((1, 4)), point[None])[0],
        u)
    np.testing.assert_allclose(dg_du[0], numeric, atol = 1e-8)


def test_with_gains() -> None:
    obstacle = constraints.CircleObstacle(
        center = [0.0, 0.0], radius = 0.1, frames = [1])
    assert obstacle.gain == 1e5
    updated = obstacle.with_gains(1e7, 50.0)
    assert updated.gain == 1e7 and updated.sharpness == 50.0
    assert obstacle.gain == 1e5
    assert isinstance(updated, constraints.CircleObstacle)
    np.testing.assert_array_equal(updated.frames, [1])
    created = constraints.ConstraintSpec.create(
        'input_box', lower = -2.0, upper = 2.0)
    assert isinstance(created, constraints.InputBox)
    assert created.gain == 1e4


if __name__ == '__main__':
    test_cost_values_and_gradients()
    test_activation_and_penalty()
    test_box_values()
    test_box_violation_margin()
    test_obstacle()
    test_jacobians_match_finite_differences()
    test_with_gains()
