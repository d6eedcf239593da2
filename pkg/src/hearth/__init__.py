"""Affine geometric heat flow trajectory optimization for rigid-body robots."""

from __future__ import annotations


__version__ = '0.1.0'

__author__: str = 'Corey Rayburn Yung'

__all__: list[str] = [
    'aghf',
    'artifacts',
    'cli',
    'configuration',
    'constraints',
    'costs',
    'dynamics',
    'errors',
    'evaluation',
    'framework',
    'integrators',
    'lagrangian',
    'problem',
    'pseudospectral',
    'reports',
    'validators',
    'DoubleIntegrator',
    'EvaluationConfig',
    'HearthError',
    'LagrangianSpec',
    'Phase',
    'PlanarChain',
    'SolverConfig',
    'SpectralGrid',
    'Trajectory',
    'affine_decomposition',
    'aghf_rhs',
    'build_grid',
    'closed_loop_integrate',
    'el_gradients',
    'estimate_constants',
    'evaluate_success',
    'extract_control',
    'feasibility_error_bound',
    'flow',
    'initial_guess',
    'inverse_dynamics',
    'lagrangian_value',
    'solve_phase1_phase2']


from . import aghf
from . import artifacts
from . import cli
from . import configuration
from . import constraints
from . import costs
from . import dynamics
from . import errors
from . import evaluation
from . import framework
from . import integrators
from . import lagrangian
from . import problem
from . import pseudospectral
from . import reports
from . import validators
from .aghf import (
    Phase, SolverConfig, Trajectory, aghf_rhs, flow, initial_guess,
    solve_phase1_phase2)
from .dynamics import (
    DoubleIntegrator, PlanarChain, affine_decomposition, extract_control,
    inverse_dynamics)
from .errors import HearthError
from .evaluation import (
    EvaluationConfig, closed_loop_integrate, estimate_constants,
    evaluate_success, feasibility_error_bound)
from .lagrangian import LagrangianSpec, el_gradients, lagrangian_value
from .pseudospectral import SpectralGrid, build_grid
