"""
configuration: default settings for hearth
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

Module-level solver, penalty, and evaluation defaults. The values mirror the
published parameter tables for the heat-flow planner so that a minimal problem
file reproduces those settings.

To Do:


"""
from __future__ import annotations


""" Flow Defaults """

DEFAULT_KD: float = 1e4
DEFAULT_DEGREE: int = 12
DEFAULT_S_MAX: float = 0.5
DEFAULT_METHOD: str = 'bdf'
DEFAULT_REL_TOL: float = 1e-8
DEFAULT_ABS_TOL: float = 1e-10
DEFAULT_MAX_STEPS: int = 100_000
DEFAULT_STEADY_STATE_TOL: float = 1e-6
DEFAULT_STALL_RTOL: float = 1e-2
STALL_WINDOW: float = 0.1
FEASIBILITY_TOL: float = 1e-3
MIN_STEP: float = 1e-14
FD_STEP: float = 1e-6

""" Penalty Defaults """

DEFAULT_SHARPNESS: float = 100.0
DEFAULT_STATE_GAIN: float = 1e4
DEFAULT_INPUT_GAIN: float = 1e4
DEFAULT_OBSTACLE_GAIN: float = 1e5
DEFAULT_CLEARANCE: float = 0.0

""" Dynamics Defaults """

GRAVITY: float = 9.81
MIN_RECIPROCAL_CONDITION: float = 1e-12

""" Evaluation Defaults """

DEFAULT_KP: float = 100.0
DEFAULT_KV: float = 100.0
DEFAULT_EPSILON: float = 0.05
DEFAULT_CONSTRAINT_MARGIN: float = 0.05
DEFAULT_OBSTACLE_DT: float = 1e-2
DEFAULT_DENSE_DT: float = 1e-3
DIVERGENCE_NORM: float = 1e6
DEFAULT_SEED: int = 0
DEFAULT_ESTIMATE_SAMPLES: int = 64
DEFAULT_BOX_SCALE: float = 1.0
ACTION_HEADROOM: float = 1.1

""" Logging """

LOG_LEVEL_VARIABLE: str = 'HEARTH_LOG_LEVEL'
DEFAULT_LOG_LEVEL: str = 'WARNING'
LOG_FORMAT: str = '%(asctime)s %(levelname)s %(name)s: %(message)s'
