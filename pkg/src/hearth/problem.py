"""
problem: TOML problem files, their schema, and the objects they build
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
    SystemSection, TaskSection, CostSection, ConstraintSection,
        PhaseSection, EvaluationSection, OutputSection (pydantic.BaseModel):
        sections of a problem file.
    ProblemConfig (pydantic.BaseModel): a whole problem file.
    Problem: solver-ready objects built from a ProblemConfig.
    parse_override: splits 'dotted.path=value' into a path and a value.
    apply_override: sets one dotted path in raw problem data.
    validate_problem: validates raw data into a ProblemConfig.
    load_problem: reads, overrides and validates a TOML problem file.
    build_problem: turns a ProblemConfig into a Problem.

Every solver default mirrors configuration.py, so a problem file only needs
the system and the task.

To Do:


"""
from __future__ import annotations

import copy
import dataclasses
import pathlib
import tomllib
from collections.abc import Sequence
from typing import Any, Literal, Optional

import numpy as np
import pydantic

from . import aghf
from . import configuration
from . import constraints as constraint_specs
from . import costs
from . import dynamics
from . import errors
from . import evaluation
from . import integrators
from . import lagrangian
from . import reports

_STRICT = pydantic.ConfigDict(extra = 'forbid', allow_inf_nan = False)


class SystemSection(pydantic.BaseModel):
    """Robot model.

    'N' may be omitted when 'masses' is given. For the double integrator,
    'masses' defaults to ones.

    """
    model_config = _STRICT

    kind: str
    N: Optional[int] = pydantic.Field(default = None, ge = 1)
    masses: Optional[list[float]] = None
    lengths: Optional[list[float]] = None
    gravity: float = configuration.GRAVITY
    actuation: Optional[list[list[float]]] = None

    @pydantic.model_validator(mode = 'after')
    def _check_dimensions(self) -> SystemSection:
        if self.masses is None and self.N is None:
            raise ValueError('masses or N is required')
        if self.masses is not None and self.N is not None and (
                len(self.masses) != self.N):
            raise ValueError(
                f'masses has {len(self.masses)} entries but N is {self.N}')
        if self.kind == 'planar_chain':
            if self.lengths is None:
                raise ValueError('lengths is required for planar_chain')
            if self.masses is None:
                raise ValueError('masses is required for planar_chain')
            if len(self.lengths) != len(self.masses):
                raise ValueError(
                    f'lengths has {len(self.lengths)} entries but masses has '
                    f'{len(self.masses)}')
        elif self.lengths is not None:
            raise ValueError(f'lengths does not apply to {self.kind}')
        return self

    @property
    def dof(self) -> int:
        return len(self.masses) if self.masses is not None else int(self.N)


class TaskSection(pydantic.BaseModel):
    """Boundary states and horizon."""
    model_config = _STRICT

    x0: list[float]
    xf: list[float]
    T: float = pydantic.Field(gt = 0)
    timing: Literal['smooth', 'linear'] = 'smooth'


class CostSection(pydantic.BaseModel):
    """Running cost of Phase 2."""
    model_config = _STRICT

    kind: str = 'squared_control'
    weights: Optional[list[float]] = None
    control_weight: Optional[float] = pydantic.Field(default = None, ge = 0)
    state_weights: Optional[list[float]] = None
    reference: Optional[list[float]] = None


class ConstraintSection(pydantic.BaseModel):
    """One box or obstacle.

    Box 'indices' are 0-based; obstacle 'frames' are 1-based link tips.

    """
    model_config = _STRICT

    kind: str
    lower: Optional[list[float]] = None
    upper: Optional[list[float]] = None
    indices: Optional[list[int]] = None
    center: Optional[list[float]] = None
    radius: Optional[float] = pydantic.Field(default = None, gt = 0)
    clearance: Optional[float] = pydantic.Field(default = None, ge = 0)
    frames: Optional[list[int]] = None
    gain: Optional[float] = pydantic.Field(default = None, gt = 0)
    sharpness: Optional[float] = pydantic.Field(default = None, gt = 0)


class PhaseSection(pydantic.BaseModel):
    """Lagrangian weights and flow settings of one phase.

    Per-group gains ('k_state', 'k_input', 'k_obstacle' and the matching 'c'
    sharpness values) override the gains of every constraint in that group.

    """
    model_config = _STRICT

    kd: float = pydantic.Field(default = configuration.DEFAULT_KD, gt = 0)
    p: int = pydantic.Field(default = configuration.DEFAULT_DEGREE, ge = 2)
    s_max: float = pydantic.Field(default = configuration.DEFAULT_S_MAX, gt = 0)
    rel_tol: float = pydantic.Field(
        default = configuration.DEFAULT_REL_TOL, gt = 0)
    abs_tol: float = pydantic.Field(
        default = configuration.DEFAULT_ABS_TOL, gt = 0)
    max_steps: int = pydantic.Field(
        default = configuration.DEFAULT_MAX_STEPS, ge = 1)
    initial_step: Optional[float] = pydantic.Field(default = None, gt = 0)
    steady_state_tol: float = pydantic.Field(
        default = configuration.DEFAULT_STEADY_STATE_TOL, gt = 0)
    stall_rtol: float = pydantic.Field(
        default = configuration.DEFAULT_STALL_RTOL, gt = 0)
    method: str = configuration.DEFAULT_METHOD
    parallel_nodes: bool = False
    workers: Optional[int] = pydantic.Field(default = None, ge = 1)
    mode: Optional[Literal['phase2', 'legacy']] = None
    feasibility_tol: float = pydantic.Field(
        default = configuration.FEASIBILITY_TOL, gt = 0)
    k_state: Optional[float] = pydantic.Field(default = None, gt = 0)
    k_input: Optional[float] = pydantic.Field(default = None, gt = 0)
    k_obstacle: Optional[float] = pydantic.Field(default = None, gt = 0)
    c_state: Optional[float] = pydantic.Field(default = None, gt = 0)
    c_input: Optional[float] = pydantic.Field(default = None, gt = 0)
    c_obstacle: Optional[float] = pydantic.Field(default = None, gt = 0)

    @pydantic.field_validator('method')
    @classmethod
    def _known_method(cls, value: str) -> str:
        kinds = integrators.FlowIntegrator.kinds()
        if value not in kinds:
            raise ValueError(f'unknown method {value!r} (known: {kinds})')
        return value


class EvaluationSection(pydantic.BaseModel):
    """Closed-loop replay and error-bound settings."""
    model_config = _STRICT

    kp: float = pydantic.Field(default = configuration.DEFAULT_KP, ge = 0)
    kv: float = pydantic.Field(default = configuration.DEFAULT_KV, ge = 0)
    epsilon: float = pydantic.Field(
        default = configuration.DEFAULT_EPSILON, gt = 0)
    constraint_margin: float = pydantic.Field(
        default = configuration.DEFAULT_CONSTRAINT_MARGIN, ge = 0)
    obstacle_dt: float = pydantic.Field(
        default = configuration.DEFAULT_OBSTACLE_DT, gt = 0)
    dense_dt: float = pydantic.Field(
        default = configuration.DEFAULT_DENSE_DT, gt = 0)
    rel_tol: float = pydantic.Field(
        default = configuration.DEFAULT_REL_TOL, gt = 0)
    abs_tol: float = pydantic.Field(
        default = configuration.DEFAULT_ABS_TOL, gt = 0)
    seed: int = configuration.DEFAULT_SEED
    estimate_samples: int = pydantic.Field(
        default = configuration.DEFAULT_ESTIMATE_SAMPLES, ge = 1)
    box_scale: float = pydantic.Field(
        default = configuration.DEFAULT_BOX_SCALE, gt = 0)


class OutputSection(pydantic.BaseModel):
    """Where and what to write."""
    model_config = _STRICT

    directory: str = 'output'
    formats: list[Literal['csv', 'json']] = ['csv', 'json']


class ProblemConfig(pydantic.BaseModel):
    """A complete problem file."""
    model_config = _STRICT

    system: SystemSection
    task: TaskSection
    cost: CostSection = pydantic.Field(default_factory = CostSection)
    constraints: list[ConstraintSection] = pydantic.Field(
        default_factory = list)
    phase1: PhaseSection = pydantic.Field(default_factory = PhaseSection)
    phase2: PhaseSection = pydantic.Field(default_factory = PhaseSection)
    evaluation: EvaluationSection = pydantic.Field(
        default_factory = EvaluationSection)
    output: OutputSection = pydantic.Field(default_factory = OutputSection)

    @pydantic.model_validator(mode = 'after')
    def _check_task(self) -> ProblemConfig:
        width = 2 * self.system.dof
        for name in ('x0', 'xf'):
            size = len(getattr(self.task, name))
            if size != width:
                raise ValueError(
                    f'task.{name} has {size} entries but the system state '
                    f'has {width}')
        return self


@dataclasses.dataclass(eq = False, kw_only = True)
class Problem(object):
    """Solver-ready objects described by a problem file."""
    config: ProblemConfig
    model: dynamics.RobotModel
    x0: np.ndarray
    xf: np.ndarray
    horizon: float
    timing: str
    phase1: aghf.Phase
    phase2: aghf.Phase
    feasibility_tol: float
    evaluation: evaluation.EvaluationConfig

    def solve(self) -> reports.SolveReport:
        """Runs both phases; see aghf.solve_phase1_phase2."""
        return aghf.solve_phase1_phase2(
            self.model, self.x0, self.xf, self.horizon,
            self.phase1, self.phase2,
            timing = self.timing,
            feasibility_tol = self.feasibility_tol)


""" Loading """


def _literal(text: str) -> Any:
    try:
        return tomllib.loads(f'value = {text}')['value']
    except tomllib.TOMLDecodeError:
        return text


def parse_override(text: str) -> tuple[str, Any]:
    """Returns (path, value) for 'dotted.path=value'.

    The value is read as a TOML literal; anything that is not one is kept as
    a bare string.

    Raises:
        ConfigError: if there is no '=' or the path is empty.

    """
    path, sep, value = text.partition('=')
    path = path.strip()
    if not sep or not path:
        raise errors.ConfigError(
            f'override {text!r} must look like section.field=value')
    return path, _literal(value.strip())


def apply_override(data: dict[str, Any], path: str, value: Any) -> None:
    """Sets 'path' (dotted; integers index lists) in 'data' in place.

    Raises:
        ConfigError: if the path runs through a value that is not a table or
            an out-of-range list index.

    """
    parts = path.split('.')
    node: Any = data
    for depth, part in enumerate(parts):
        last = depth == len(parts) - 1
        where = '.'.join(parts[:depth + 1])
        if isinstance(node, list):
            try:
                index = int(part)
                if last:
                    node[index] = value
                else:
                    node = node[index]
            except (ValueError, IndexError):
                raise errors.ConfigError(
                    f'{where}: not a valid list index') from None
        elif isinstance(node, dict):
            if last:
                node[part] = value
            else:
                node = node.setdefault(part, {})
        else:
            raise errors.ConfigError(f'{where}: parent is not a table')


def _describe(error: pydantic.ValidationError) -> str:
    lines = []
    for item in error.errors():
        where = '.'.join(str(part) for part in item['loc']) or 'problem'
        reason = item['msg'].removeprefix('Value error, ')
        lines.append(f'{where}: {reason}')
    return '; '.join(lines)


def validate_problem(data: dict[str, Any]) -> ProblemConfig:
    """Validates raw problem data.

    Raises:
        ConfigError: listing 'section.field: reason' for every failure.

    """
    try:
        return ProblemConfig.model_validate(data)
    except pydantic.ValidationError as error:
        raise errors.ConfigError(_describe(error)) from None


def read_problem(path: str | pathlib.Path) -> dict[str, Any]:
    """Returns the raw table of a TOML problem file.

    Raises:
        ConfigError: if the file is unreadable or not valid TOML. Parse
            errors carry the line and column.

    """
    path = pathlib.Path(path)
    try:
        with path.open('rb') as stream:
            return tomllib.load(stream)
    except OSError as error:
        raise errors.ConfigError(f'cannot read {path}: {error}') from None
    except tomllib.TOMLDecodeError as error:
        raise errors.ConfigError(f'{path}: {error}') from None


def load_problem(
    path: str | pathlib.Path,
    overrides: Sequence[str] = ()) -> ProblemConfig:
    """Reads a problem file, applies '--set' overrides, and validates it."""
    data = copy.deepcopy(read_problem(path))
    for text in overrides:
        apply_override(data, *parse_override(text))
    return validate_problem(data)


""" Building """


def _model(section: SystemSection) -> dynamics.RobotModel:
    masses = (
        section.masses if section.masses is not None
        else [1.0] * section.dof)
    parameters: dict[str, Any] = {
        'masses': masses,
        'gravity': section.gravity,
        'actuation': section.actuation}
    if section.lengths is not None:
        parameters['lengths'] = section.lengths
    return dynamics.RobotModel.create(section.kind, **parameters)


def _cost(section: CostSection, xf: list[float]) -> costs.CostSpec:
    parameters = section.model_dump(exclude = {'kind'}, exclude_none = True)
    if section.kind == 'custom_state_cost':
        parameters.setdefault('reference', xf)
    return costs.CostSpec.create(section.kind, **parameters)


def _constraint(
    section: ConstraintSection) -> constraint_specs.ConstraintSpec:
    parameters = section.model_dump(exclude = {'kind'}, exclude_none = True)
    return constraint_specs.ConstraintSpec.create(section.kind, **parameters)


def _with_phase_gains(
    constraint: constraint_specs.ConstraintSpec,
    section: PhaseSection) -> constraint_specs.ConstraintSpec:
    gain = getattr(section, f'k_{constraint.group}')
    sharpness = getattr(section, f'c_{constraint.group}')
    return constraint.with_gains(
        gain = constraint.gain if gain is None else gain,
        sharpness = constraint.sharpness if sharpness is None else sharpness)


def _phase(
    section: PhaseSection,
    mode: str,
    cost: costs.CostSpec,
    constraints: Sequence[constraint_specs.ConstraintSpec]) -> aghf.Phase:
    spec = lagrangian.LagrangianSpec(
        cost = cost,
        kd = section.kd,
        constraints = [_with_phase_gains(c, section) for c in constraints],
        mode = mode)
    solver = aghf.SolverConfig(
        s_max = section.s_max,
        rel_tol = section.rel_tol,
        abs_tol = section.abs_tol,
        max_steps = section.max_steps,
        initial_step = section.initial_step,
        steady_state_tol = section.steady_state_tol,
        parallel_nodes = section.parallel_nodes,
        method = section.method,
        stall_rtol = section.stall_rtol,
        workers = section.workers)
    return aghf.Phase(spec = spec, config = solver, degree = section.p)


def build_evaluation(
    section: EvaluationSection,
    seed: Optional[int] = None) -> evaluation.EvaluationConfig:
    """Returns the evaluation settings, with 'seed' taking precedence."""
    parameters = section.model_dump()
    if seed is not None:
        parameters['seed'] = seed
    return evaluation.EvaluationConfig(**parameters)


def build_problem(
    config: ProblemConfig,
    seed: Optional[int] = None) -> Problem:
    """Builds the model, both phases and the evaluation settings.

    Args:
        config (ProblemConfig): validated problem file.
        seed (Optional[int]): overrides 'evaluation.seed'. Defaults to None.

    Raises:
        ConfigError: if a section is valid on its own but rejected by the
            object it builds, for example an unknown constraint kind or an
            obstacle frame the model does not have.

    Returns:
        Problem: solver-ready objects.

    """
    where = 'system'
    try:
        model = _model(config.system)
        where = 'cost'
        cost = _cost(config.cost, config.task.xf)
        x0 = np.asarray(config.task.x0, dtype = float)[None]
        u0 = np.zeros((1, model.inputs))
        cost.value(model, x0, np.zeros_like(x0), u0)
        built = []
        for index, section in enumerate(config.constraints):
            where = f'constraints.{index}'
            built.append(_constraint(section))
            built[-1].values(model, x0, u0)
        where = 'phase1'
        phase1 = _phase(config.phase1, 'phase1', cost, built)
        where = 'phase2'
        phase2 = _phase(
            config.phase2, config.phase2.mode or 'phase2', cost, built)
        where = 'evaluation'
        evaluation_config = build_evaluation(config.evaluation, seed)
    except (
            errors.DomainError, errors.NonFiniteError, errors.UnknownKindError,
            TypeError) as error:
        raise errors.ConfigError(f'{where}: {error}') from None
    return Problem(
        config = config,
        model = model,
        x0 = np.asarray(config.task.x0, dtype = float),
        xf = np.asarray(config.task.xf, dtype = float),
        horizon = config.task.T,
        timing = config.task.timing,
        phase1 = phase1,
        phase2 = phase2,
        feasibility_tol = config.phase1.feasibility_tol,
        evaluation = evaluation_config)
