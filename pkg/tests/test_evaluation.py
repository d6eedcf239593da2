"""
test_evaluation: tests control extraction, closed-loop replay and verdicts
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
from hearth import aghf
from hearth import constraints
from hearth import dynamics
from hearth import evaluation
from hearth import lagrangian
from hearth import pseudospectral


POINT = dynamics.DoubleIntegrator(masses = [1.0])
PENDULUM = dynamics.PlanarChain(masses = [1.0], lengths = [1.0])
START = np.array([0.0, 0.0])
GOAL = np.array([1.0, 0.0])


def _cubic() -> aghf.Trajectory:
    return aghf.initial_guess(pseudospectral.build_grid(12, 1.0), START, GOAL)


def test_sample_times() -> None:
    times = evaluation.sample_times(1.0, 1e-3)
    assert times.size == 1001
    assert times[0] == 0.0 and times[-1] == 1.0
    np.testing.assert_allclose(
        evaluation.sample_times(1.0, 0.3), [0.0, 0.3, 0.6, 0.9, 1.0])
    assert evaluation.sample_times(2.0, 1e-2).size == 201
    with pytest.raises(hearth.errors.DomainError):
        evaluation.sample_times(1.0, 0.0)


def test_extract_control_trajectory() -> None:
    samples = evaluation.extract_control_trajectory(POINT, _cubic(), 1e-3)
    assert samples.count == 1001
    np.testing.assert_allclose(
        samples.controls[:, 0], 6.0 - 12.0 * samples.times, atol = 1e-3)
    assert np.max(np.abs(samples.infeasibility)) < 1e-8
    np.testing.assert_array_equal(samples.states[0], START)
    np.testing.assert_allclose(samples.states[-1], GOAL, atol = 1e-14)


def test_closed_loop_tracks_a_feasible_reference() -> None:
    traj = _cubic()
    spectral = evaluation.SpectralReference(model = POINT, trajectory = traj)
    run = evaluation.closed_loop_integrate(POINT, spectral)
    assert run.times.size == 101
    assert np.max(np.abs(run.states[-1] - GOAL)) < 1e-4
    assert evaluation.open_loop_error(POINT, spectral) < 1e-4
    samples = evaluation.extract_control_trajectory(POINT, traj)
    sampled = evaluation.SampledReference.from_samples(samples)
    assert sampled.horizon == 1.0
    np.testing.assert_allclose(sampled.control(0.5), [0.0], atol = 1e-9)
    verdict = evaluation.replay(POINT, sampled, [], GOAL)
    assert verdict.success and not verdict.diverged
    assert verdict.terminal_error < 1e-3


def test_closed_loop_pendulum_hold() -> None:
    upright = np.array([np.pi, 0.0])
    times = np.array([0.0, 1.0])
    hold = evaluation.SampledReference(
        times = times,
        states = np.vstack((upright, upright)),
        controls = np.zeros((2, 1)))
    run = evaluation.closed_loop_integrate(PENDULUM, hold)
    assert np.max(np.abs(run.states[-1] - upright)) < 1e-6
    config = evaluation.EvaluationConfig(kp = 1.0, kv = 1.0)
    nudged = evaluation.SampledReference(
        times = times,
        states = np.vstack((upright, upright)),
        controls = np.full((2, 1), 0.5))
    run = evaluation.closed_loop_integrate(PENDULUM, nudged, config)
    assert np.max(np.abs(run.states[-1] - upright)) > 1e-3


def test_divergence() -> None:
    runaway = evaluation.SampledReference(
        times = np.array([0.0, 1.0]),
        states = np.zeros((2, 2)),
        controls = np.full((2, 1), 1e4))
    config = evaluation.EvaluationConfig(divergence_norm = 10.0)
    with pytest.raises(hearth.errors.DivergenceError):
        evaluation.closed_loop_integrate(POINT, runaway, config)
    verdict = evaluation.replay(POINT, runaway, [], START, config)
    assert verdict.diverged and not verdict.success
    assert verdict.terminal_error == np.inf


def test_reference_validation() -> None:
    with pytest.raises(hearth.errors.DomainError):
        evaluation.SampledReference(
            times = np.array([0.0, 0.0]),
            states = np.zeros((2, 2)),
            controls = np.zeros((2, 1)))
    with pytest.raises(hearth.errors.DomainError):
        evaluation.SampledReference(
            times = np.array([0.0, 1.0]),
            states = np.zeros((3, 2)),
            controls = np.zeros((2, 1)))
    with pytest.raises(hearth.errors.DomainError):
        evaluation.EvaluationConfig(epsilon = 0.0)


def test_success_criteria() -> None:
    box = constraints.InputBox(lower = -5.0, upper = 5.0)
    target = np.array([np.pi, 0.0])
    states = np.array([[0.0, 0.0], target])
    verdict = evaluation.evaluate_success(
        PENDULUM, states, [[0.0], [5.2]], [box], target)
    assert verdict.constraints_ok and verdict.success
    assert verdict.box_excess['0_input_box'] == pytest.approx(-0.05)
    verdict = evaluation.evaluate_success(
        PENDULUM, states, [[0.0], [-5.3]], [box], target)
    assert not verdict.constraints_ok and not verdict.success
    near = np.array([[0.0, 0.0], target + [0.049, -0.02]])
    assert evaluation.evaluate_success(
        PENDULUM, near, [[0.0], [0.0]], [], target).terminal_ok
    far = np.array([[0.0, 0.0], target + [0.0, 0.051]])
    verdict = evaluation.evaluate_success(
        PENDULUM, far, [[0.0], [0.0]], [], target)
    assert not verdict.terminal_ok
    assert verdict.terminal_error == pytest.approx(0.051)
    hanging = np.zeros((2, 2))
    touching = constraints.CircleObstacle(center = [1.0, -1.0], radius = 1.0)
    verdict = evaluation.evaluate_success(
        PENDULUM, hanging, np.zeros((2, 1)), [touching], [0.0, 0.0])
    assert verdict.terminal_ok and not verdict.obstacles_ok
    assert verdict.obstacle_excess == {'0_circle_obstacle': 0.0}
    clear = constraints.CircleObstacle(center = [1.0, -1.0], radius = 0.99)
    verdict = evaluation.evaluate_success(
        PENDULUM, hanging, np.zeros((2, 1)), [box, clear], [0.0, 0.0])
    assert verdict.success
    assert set(verdict.to_dict()) >= {'success', 'terminal', 'constraints'}


def test_feasibility_error_bound() -> None:
    unit = evaluation.ErrorBoundConstants(
        C1 = 1.0, C2 = 1.0, C3 = 0.0, Y1 = 0.0, Y2 = 0.0)
    assert evaluation.feasibility_error_bound(unit, 1.0, 3.0) == (
        pytest.approx(1.0))
    assert evaluation.feasibility_error_bound(unit, 1.0, 300.0) == (
        pytest.approx(0.1))
    grown = evaluation.ErrorBoundConstants(
        C1 = 1.0, C2 = 1.0, C3 = 2.0, Y1 = 1.0, Y2 = 0.5)
    expected = np.sqrt(3.0 * 2.0 / 1e4 * np.exp(3.0 * 2.0 * (2.0 + 0.5)))
    assert evaluation.feasibility_error_bound(grown, 2.0, 1e4) == (
        pytest.approx(expected))
    with pytest.raises(hearth.errors.DomainError):
        evaluation.feasibility_error_bound(unit, 1.0, 0.0)
    with pytest.raises(hearth.errors.DomainError):
        evaluation.ErrorBoundConstants(
            C1 = -1.0, C2 = 1.0, C3 = 0.0, Y1 = 0.0, Y2 = 0.0)
    with pytest.raises(hearth.errors.DomainError):
        evaluation.ErrorBoundConstants(
            C1 = 1.0, C2 = 1.0, C3 = 0.0, Y1 = 0.0, Y2 = 0.0,
            provenance = 'guessed')


def test_estimate_constants() -> None:
    constants = evaluation.estimate_constants(POINT, _cubic(), 12.0)
    assert constants.provenance == 'sampled_estimate'
    assert constants.Y1 == pytest.approx(1.0, rel = 1e-6)
    assert constants.Y2 == pytest.approx(0.0, abs = 1e-9)
    assert constants.C2 == pytest.approx(1.0, rel = 1e-12)
    assert constants.C3 == pytest.approx(12.0, rel = 1e-6)
    assert constants.C1 >= 12.0
    grid = pseudospectral.build_grid(8, 1.0)
    two = dynamics.PlanarChain(masses = [1.0, 1.0], lengths = [1.0, 1.0])
    traj = aghf.initial_guess(
        grid, [0.0, 0.0, 0.0, 0.0], [np.pi / 2, 0.0, 0.0, 0.0])
    small = evaluation.estimate_constants(two, traj, 5.0, seed = 3)
    large = evaluation.estimate_constants(
        two, traj, 5.0, seed = 3, box_scale = 2.0)
    repeat = evaluation.estimate_constants(two, traj, 5.0, seed = 3)
    assert large.Y1 >= small.Y1 and large.Y2 >= small.Y2
    assert repeat.to_dict() == small.to_dict()
    for value in small.to_dict().values():
        if isinstance(value, float):
            assert value >= 0.0


def test_evaluate_report() -> None:
    phase = aghf.Phase(
        spec = lagrangian.LagrangianSpec(kd = 1e4),
        config = aghf.SolverConfig(s_max = 0.05),
        degree = 10)
    report = aghf.solve_phase1_phase2(
        POINT, START, GOAL, 1.0,
        aghf.Phase(spec = phase.spec.replace(mode = 'phase1')), phase)
    config = evaluation.EvaluationConfig(dense_dt = 1e-2)
    evaluation.evaluate_report(report, POINT, phase.spec, config)
    assert report.controls.count == 101
    assert report.verdict.success
    assert report.constants.provenance == 'sampled_estimate'
    assert 0.0 < report.error_bound < np.inf


def test_obstacles_check_every_frame() -> None:
    two = dynamics.PlanarChain(masses = [1.0, 1.0], lengths = [1.0, 1.0])
    hanging = np.zeros((2, 4))
    elbow = constraints.CircleObstacle(
        center = [0.0, -1.0], radius = 0.3, frames = [2])
    tip = elbow.values(two, hanging[:1], None)
    assert tip.shape == (1, 1) and tip[0, 0] < 0.0
    verdict = evaluation.evaluate_success(
        two, hanging, np.zeros((2, 2)), [elbow], np.zeros(4))
    assert verdict.terminal_ok and not verdict.obstacles_ok
    assert verdict.obstacle_excess['0_circle_obstacle'] == pytest.approx(0.3)
    assert not verdict.success


def test_verdict_is_monotone_in_thresholds() -> None:
    box = constraints.InputBox(lower = -5.0, upper = 5.0)
    target = np.array([np.pi, 0.0])
    states = np.array([[0.0, 0.0], target + [0.06, 0.0]])
    controls = np.array([[0.0], [5.3]])
    passed = []
    for epsilon in (0.01, 0.05, 0.07, 0.2):
        for margin in (0.0, 0.05, 0.07, 0.2):
            config = evaluation.EvaluationConfig(
                epsilon = epsilon, constraint_margin = margin)
            verdict = evaluation.evaluate_success(
                PENDULUM, states, controls, [box], target, config)
            passed.append((epsilon, margin, verdict.success))
    for epsilon, margin, success in passed:
        if success:
            assert all(
                later for e, m, later in passed
                if e >= epsilon and m >= margin)
    assert not passed[0][2] and passed[-1][2]


def test_error_bound_covers_open_loop_error() -> None:
    phase = aghf.Phase(
        spec = lagrangian.LagrangianSpec(kd = 1e4),
        config = aghf.SolverConfig(s_max = 0.1),
        degree = 16)
    report = aghf.solve_phase1_phase2(
        POINT, START, GOAL, 1.0,
        aghf.Phase(spec = phase.spec.replace(mode = 'phase1')), phase)
    config = evaluation.EvaluationConfig(dense_dt = 1e-2)
    evaluation.evaluate_report(report, POINT, phase.spec, config)
    spectral = evaluation.SpectralReference(
        model = POINT, trajectory = report.trajectory)
    measured = evaluation.open_loop_error(POINT, spectral, config)
    assert 0.0 <= measured <= report.error_bound


if __name__ == '__main__':
    test_sample_times()
    test_extract_control_trajectory()
    test_closed_loop_tracks_a_feasible_reference()
    test_closed_loop_pendulum_hold()
    test_divergence()
    test_reference_validation()
    test_success_criteria()
    test_feasibility_error_bound()
    test_estimate_constants()
    test_evaluate_report()
    test_obstacles_check_every_frame()
    test_verdict_is_monotone_in_thresholds()
    test_error_bound_covers_open_loop_error()
