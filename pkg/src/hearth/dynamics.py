"""
dynamics: rigid-body models, inverse dynamics, and control extraction
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
    RobotModel (registrars.Subclasser, abc.ABC): base class for models of the
        form H(q) qdd + C(q, qd) = B u.
    DoubleIntegrator (RobotModel): decoupled point masses without gravity.
    PlanarChain (RobotModel): planar serial chain with point masses at the
        distal end of each link, angles measured from the downward vertical.
    StatePoint: state split into configuration and velocity halves.
    AffineDecomposition: drift, actuated and complementary fields of the
        control-affine form.
    mass_matrix, inverse_dynamics, bias_term, forward_kinematics: functional
        access to model methods.
    affine_decomposition: builds the control-affine form at a state.
    extract_control: recovers (u, uc) from a state and its time derivative.
    control_derivatives: Jacobians of the extracted control.
    extract_controls, control_jacobians: batched versions used on grids.

All model methods accept arrays with leading batch dimensions, so that a whole
collocation grid (or several of them) is evaluated in one call.

To Do:


"""
from __future__ import annotations

import abc
import dataclasses
import logging
from typing import Any, ClassVar, Optional

import numpy as np

from . import configuration
from . import errors
from . import registrars
from . import registries
from . import validators

logger = logging.getLogger(__name__)


def _batch(array: Any, width: int, name: str) -> tuple[np.ndarray, tuple]:
    """Returns 'array' reshaped to (K, width) and its leading batch shape."""
    values = np.asarray(array, dtype = float)
    if values.ndim == 0 or values.shape[-1] != width:
        raise errors.DomainError(
            f'{name} must have trailing dimension {width}, got shape '
            f'{values.shape}')
    batch = values.shape[:-1]
    return values.reshape(-1, width), batch


def _perp(vectors: np.ndarray) -> np.ndarray:
    """Rotates planar vectors by +90 degrees."""
    return np.stack((-vectors[..., 1], vectors[..., 0]), axis = -1)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Returns the scalar planar cross product a x b."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclasses.dataclass(eq = False, kw_only = True)
class RobotModel(registrars.Subclasser, abc.ABC):
    """Base class for rigid-body models H(q) qdd + C(q, qd) = B u.

    Args:
        masses (Any): one mass (kg) per degree of freedom.
        gravity (float): gravitational acceleration in m/s^2. Defaults to
            9.81.
        actuation (Optional[Any]): N x m actuation map B. Defaults to None,
            which means the N x N identity.

    """
    masses: Any
    gravity: float = configuration.GRAVITY
    actuation: Optional[Any] = None
    registry: ClassVar[registries.Catalog] = registries.Catalog(
        family = 'robot model')

    """ Initialization Methods """

    def __post_init__(self) -> None:
        """Validates and normalizes the model parameters."""
        self.masses = np.atleast_1d(
            validators.FINITE.validate(self.masses, name = 'masses'))
        validators.POSITIVE.validate(self.masses, name = 'masses')
        if self.masses.ndim != 1:
            raise errors.DomainError('masses must be a vector')
        validators.FINITE.validate(self.gravity, name = 'gravity')
        self.gravity = float(self.gravity)
        if self.actuation is None:
            self.actuation = np.eye(self.dof)
        else:
            self.actuation = validators.Shape(
                shape = (self.dof, None)).validate(
                    validators.FINITE.validate(
                        np.atleast_2d(self.actuation), name = 'actuation'),
                    name = 'actuation')
            if not 0 < self.inputs <= self.dof:
                raise errors.DomainError(
                    f'actuation must have between 1 and {self.dof} columns')

    """ Properties """

    @property
    def dof(self) -> int:
        """Returns the number of degrees of freedom N."""
        return int(self.masses.size)

    @property
    def inputs(self) -> int:
        """Returns the number of control inputs m."""
        return int(self.actuation.shape[1])

    @property
    def fully_actuated(self) -> bool:
        """Returns whether B is the N x N identity."""
        return self.actuation.shape == (self.dof, self.dof) and bool(
            np.array_equal(self.actuation, np.eye(self.dof)))

    @property
    @abc.abstractmethod
    def frames(self) -> int:
        """Returns the number of planar frames reported by kinematics."""

    """ Required Subclass Methods """

    @abc.abstractmethod
    def _inverse_dynamics(
        self,
        q: np.ndarray,
        qd: np.ndarray,
        qdd: np.ndarray,
        tangents: bool) -> tuple[np.ndarray, ...]:
        """Returns tau and, if 'tangents', (tau, dtau/dq, dtau/dqd).

        Arguments are (K, N) arrays. Jacobians have shape (K, N, N) with
        entry [k, i, j] = d tau_i / d x_j.

        """

    @abc.abstractmethod
    def _kinematics(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Returns frame positions (K, F, 2) and Jacobians (K, F, 2, N)."""

    """ Instance Methods """

    def mass_matrix(self, q: Any) -> np.ndarray:
        """Returns the mass matrix H(q).

        Point masses give H = sum_i m_i J_i^T J_i, where J_i is the Jacobian
        of the i-th mass position.

        Args:
            q (Any): configuration with shape (..., N).

        Returns:
            np.ndarray: H with shape (..., N, N).

        """
        flat, batch = _batch(q, self.dof, 'q')
        _, jacobians = self._kinematics(flat)
        matrix = np.einsum(
            'f,kfai,kfaj->kij', self.masses, jacobians, jacobians)
        return matrix.reshape(batch + (self.dof, self.dof))

    def inverse_dynamics(self, q: Any, qd: Any, qdd: Any) -> np.ndarray:
        """Returns H(q) qdd + C(q, qd).

        Args:
            q (Any): configuration with shape (..., N).
            qd (Any): velocity with shape (..., N).
            qdd (Any): acceleration with shape (..., N).

        Returns:
            np.ndarray: generalized forces with shape (..., N).

        """
        q, batch = _batch(q, self.dof, 'q')
        qd, _ = _batch(np.broadcast_to(qd, batch + (self.dof,)), self.dof,
                       'qd')
        qdd, _ = _batch(np.broadcast_to(qdd, batch + (self.dof,)), self.dof,
                        'qdd')
        tau = self._inverse_dynamics(q, qd, qdd, tangents = False)[0]
        return tau.reshape(batch + (self.dof,))

    def inverse_dynamics_derivatives(
        self,
        q: Any,
        qd: Any,
        qdd: Any) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns inverse dynamics and its partial derivatives.

        Args:
            q (Any): configuration with shape (..., N).
            qd (Any): velocity with shape (..., N).
            qdd (Any): acceleration with shape (..., N).

        Returns:
            tuple[np.ndarray, np.ndarray, np.ndarray]: tau with shape
                (..., N), and d tau / dq and d tau / dqd with shape
                (..., N, N).

        """
        q, batch = _batch(q, self.dof, 'q')
        qd, _ = _batch(np.broadcast_to(qd, batch + (self.dof,)), self.dof,
                       'qd')
        qdd, _ = _batch(np.broadcast_to(qdd, batch + (self.dof,)), self.dof,
                        'qdd')
        tau, dq, dqd = self._inverse_dynamics(q, qd, qdd, tangents = True)
        square = batch + (self.dof, self.dof)
        return (
            tau.reshape(batch + (self.dof,)),
            dq.reshape(square),
            dqd.reshape(square))

    def bias_term(self, q: Any, qd: Any) -> np.ndarray:
        """Returns C(q, qd), the Coriolis, centrifugal and gravity forces."""
        return self.inverse_dynamics(q = q, qd = qd, qdd = np.zeros(self.dof))

    def forward_kinematics(self, q: Any) -> np.ndarray:
        """Returns the planar world position of every frame.

        Args:
            q (Any): configuration with shape (..., N).

        Returns:
            np.ndarray: positions with shape (..., F, 2).

        """
        flat, batch = _batch(q, self.dof, 'q')
        positions, _ = self._kinematics(flat)
        return positions.reshape(batch + (self.frames, 2))

    def frame_jacobians(self, q: Any) -> np.ndarray:
        """Returns d(frame position)/dq with shape (..., F, 2, N)."""
        flat, batch = _batch(q, self.dof, 'q')
        _, jacobians = self._kinematics(flat)
        return jacobians.reshape(batch + (self.frames, 2, self.dof))

    def forward_dynamics(self, q: Any, qd: Any, u: Any) -> np.ndarray:
        """Returns qdd = H(q)^-1 (B u - C(q, qd))."""
        generalized = np.einsum('ij,...j->...i', self.actuation, u)
        rhs = generalized - self.bias_term(q = q, qd = qd)
        return np.linalg.solve(self.mass_matrix(q), rhs[..., None])[..., 0]


@dataclasses.dataclass(eq = False, kw_only = True)
class DoubleIntegrator(RobotModel):
    """Decoupled point masses, m_i qdd_i = u_i, without gravity.

    Kinematics report a single planar frame at (q_1, q_2), or (q_1, 0) for a
    one-dimensional integrator, so that obstacles can be attached to it.

    """
    kind: ClassVar[str] = 'double_integrator'

    @property
    def frames(self) -> int:
        return 1

    def mass_matrix(self, q: Any) -> np.ndarray:
        _, batch = _batch(q, self.dof, 'q')
        return np.broadcast_to(
            np.diag(self.masses), batch + (self.dof, self.dof)).copy()

    def _inverse_dynamics(
        self,
        q: np.ndarray,
        qd: np.ndarray,
        qdd: np.ndarray,
        tangents: bool) -> tuple[np.ndarray, ...]:
        tau = self.masses * qdd
        if not tangents:
            return (tau,)
        zeros = np.zeros(q.shape + (self.dof,))
        return tau, zeros, zeros.copy()

    def _kinematics(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        count = q.shape[0]
        positions = np.zeros((count, 1, 2))
        jacobians = np.zeros((count, 1, 2, self.dof))
        planar = min(self.dof, 2)
        positions[:, 0, :planar] = q[:, :planar]
        for axis in range(planar):
            jacobians[:, 0, axis, axis] = 1.0
        return positions, jacobians


@dataclasses.dataclass(eq = False, kw_only = True)
class PlanarChain(RobotModel):
    """Planar serial chain of massless links with point masses at their tips.

    Joint angles are relative to the previous link, and the first is measured
    from the downward vertical, so q = 0 hangs straight down with zero gravity
    torque. Inverse dynamics use the recursive Newton-Euler algorithm with the
    base accelerating upward at g to account for gravity.

    Args:
        masses (Any): tip mass of each link in kg.
        lengths (Any): length of each link in m.
        gravity (float): gravitational acceleration. Defaults to 9.81.
        actuation (Optional[Any]): N x m actuation map. Defaults to identity.

    """
    lengths: Any
    kind: ClassVar[str] = 'planar_chain'

    """ Initialization Methods """

    def __post_init__(self) -> None:
        """Validates link lengths against the masses."""
        super().__post_init__()
        self.lengths = np.atleast_1d(
            validators.FINITE.validate(self.lengths, name = 'lengths'))
        validators.POSITIVE.validate(self.lengths, name = 'lengths')
        if self.lengths.shape != self.masses.shape:
            raise errors.DomainError(
                f'lengths has {self.lengths.size} entries but masses has '
                f'{self.masses.size}')

    """ Properties """

    @property
    def frames(self) -> int:
        return self.dof

    """ Private Methods """

    def _links(self, q: np.ndarray) -> np.ndarray:
        """Returns link vectors r_i = l_i (sin theta_i, -cos theta_i)."""
        theta = np.cumsum(q, axis = -1)
        return self.lengths[:, None] * np.stack(
            (np.sin(theta), -np.cos(theta)), axis = -1)

    def _kinematics(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        links = self._links(q)
        positions = np.cumsum(links, axis = 1)
        swept = np.cumsum(_perp(links), axis = 1)
        before = np.concatenate(
            (np.zeros_like(swept[:, :1]), swept[:, :-1]), axis = 1)
        # Column j of frame i sums perp(r_k) for j <= k <= i.
        columns = swept[:, :, None, :] - before[:, None, :, :]
        mask = np.tril(np.ones((self.dof, self.dof)))
        columns = columns * mask[None, :, :, None]
        return positions, np.moveaxis(columns, 3, 2)

    def _inverse_dynamics(
        self,
        q: np.ndarray,
        qd: np.ndarray,
        qdd: np.ndarray,
        tangents: bool) -> tuple[np.ndarray, ...]:
        count, dof = q.shape
        links = self._links(q)
        normals = _perp(links)
        omega = np.cumsum(qd, axis = -1)
        alpha = np.cumsum(qdd, axis = -1)
        if tangents:
            # Directions 0..N-1 seed q, directions N..2N-1 seed qd.
            seeds = np.eye(2 * dof)
            dtheta = np.cumsum(seeds[:, :dof], axis = -1)
            domega = np.cumsum(seeds[:, dof:], axis = -1)
            dlinks = dtheta[None, :, :, None] * normals[:, None, :, :]
            dacc = np.zeros((count, 2 * dof, 2))
        accel = np.zeros((count, 2))
        accel[:, 1] = self.gravity
        forces = []
        dforces = []
        for i in range(dof):
            r = links[:, i]
            accel = (
                accel
                + alpha[:, i, None] * normals[:, i]
                - omega[:, i, None]**2 * r)
            forces.append(self.masses[i] * accel)
            if tangents:
                dacc = (
                    dacc
                    - (alpha[:, i, None, None] * dtheta[None, :, i, None]
                       * r[:, None, :])
                    - (2.0 * omega[:, i, None, None]
                       * domega[None, :, i, None] * r[:, None, :])
                    - omega[:, i, None, None]**2 * dlinks[:, :, i])
                dforces.append(self.masses[i] * dacc)
        tau = np.zeros((count, dof))
        force = np.zeros((count, 2))
        moment = np.zeros(count)
        if tangents:
            dtau = np.zeros((count, 2 * dof, dof))
            dforce = np.zeros((count, 2 * dof, 2))
            dmoment = np.zeros((count, 2 * dof))
        for i in reversed(range(dof)):
            r = links[:, i]
            force = force + forces[i]
            moment = moment + _cross(r, force)
            tau[:, i] = moment
            if tangents:
                dforce = dforce + dforces[i]
                dmoment = (
                    dmoment
                    + _cross(dlinks[:, :, i], force[:, None, :])
                    + _cross(r[:, None, :], dforce))
                dtau[:, :, i] = dmoment
        if not tangents:
            return (tau,)
        jacobian = np.swapaxes(dtau, 1, 2)
        return tau, jacobian[:, :, :dof], jacobian[:, :, dof:]


@dataclasses.dataclass(eq = False)
class StatePoint(object):
    """State x = [x_P1; x_P2] split into configuration and velocity.

    Args:
        position (Any): configuration N-vector (x_P1).
        velocity (Any): velocity N-vector (x_P2).

    """
    position: Any
    velocity: Any

    def __post_init__(self) -> None:
        self.position = np.atleast_1d(
            validators.FINITE.validate(self.position, name = 'position'))
        self.velocity = np.atleast_1d(
            validators.FINITE.validate(self.velocity, name = 'velocity'))
        if self.position.shape != self.velocity.shape:
            raise errors.DomainError(
                'position and velocity must have the same shape')

    @classmethod
    def from_vector(cls, x: Any) -> StatePoint:
        """Splits a 2N-vector into its halves."""
        values = np.atleast_1d(np.asarray(x, dtype = float))
        if values.ndim != 1 or values.size % 2:
            raise errors.DomainError(
                f'state must be a 2N-vector, got shape {values.shape}')
        half = values.size // 2
        return cls(position = values[:half], velocity = values[half:])

    def as_vector(self) -> np.ndarray:
        """Returns the stacked 2N-vector."""
        return np.concatenate((self.position, self.velocity))


@dataclasses.dataclass(eq = False)
class AffineDecomposition(object):
    """Control-affine form xdot = fd(x) + F(x) u with complement Fc.

    Args:
        fd (np.ndarray): drift, shape (..., 2N).
        F (np.ndarray): actuated field, shape (..., 2N, m).
        Fc (np.ndarray): complementary field, shape (..., 2N, 2N - m).
        fbar (np.ndarray): [Fc | F], shape (..., 2N, 2N).

    """
    fd: np.ndarray
    F: np.ndarray  # noqa: N815
    Fc: np.ndarray  # noqa: N815
    fbar: np.ndarray


def _state_array(model: RobotModel, x: Any) -> np.ndarray:
    if isinstance(x, StatePoint):
        x = x.as_vector()
    values = np.asarray(x, dtype = float)
    if values.ndim == 0 or values.shape[-1] != 2 * model.dof:
        raise errors.DomainError(
            f'state must have trailing dimension {2 * model.dof}, got shape '
            f'{values.shape}')
    return values


def mass_matrix(model: RobotModel, q: Any) -> np.ndarray:
    """Returns the mass matrix of 'model' at 'q'."""
    return model.mass_matrix(validators.FINITE.validate(q, name = 'q'))


def inverse_dynamics(
    model: RobotModel,
    q: Any,
    qd: Any,
    qdd: Any) -> np.ndarray:
    """Returns H(q) qdd + C(q, qd) by recursive Newton-Euler."""
    return model.inverse_dynamics(
        q = validators.FINITE.validate(q, name = 'q'),
        qd = validators.FINITE.validate(qd, name = 'qd'),
        qdd = validators.FINITE.validate(qdd, name = 'qdd'))


def bias_term(model: RobotModel, q: Any, qd: Any) -> np.ndarray:
    """Returns C(q, qd) = inverse_dynamics(q, qd, 0)."""
    return model.bias_term(
        q = validators.FINITE.validate(q, name = 'q'),
        qd = validators.FINITE.validate(qd, name = 'qd'))


def forward_kinematics(model: RobotModel, q: Any) -> np.ndarray:
    """Returns the planar positions of every frame of 'model'."""
    return model.forward_kinematics(validators.FINITE.validate(q, name = 'q'))


def affine_decomposition(model: RobotModel, x: Any) -> AffineDecomposition:
    """Builds the control-affine form of 'model' at state 'x'.

    fd = [x_P2; -H^-1 C] and F = [0; H^-1 B]. For B = I the complement is
    Fc = [I; 0]. Otherwise Fc is an orthonormal basis of the orthogonal
    complement of range(F), computed by Householder QR (a stable
    Gram-Schmidt).

    Args:
        model (RobotModel): the robot.
        x (Any): StatePoint or array with shape (..., 2N).

    Raises:
        DecompositionError: if fbar has reciprocal condition below 1e-12.

    Returns:
        AffineDecomposition: the decomposition (batched like 'x').

    """
    state = validators.FINITE.validate(_state_array(model, x), name = 'x')
    n, m = model.dof, model.inputs
    q, v = state[..., :n], state[..., n:]
    batch = state.shape[:-1]
    inertia = model.mass_matrix(q)
    bias = model.bias_term(q = q, qd = v)
    drift = np.concatenate(
        (v, -np.linalg.solve(inertia, bias[..., None])[..., 0]), axis = -1)
    lower = np.linalg.solve(
        inertia, np.broadcast_to(model.actuation, batch + (n, m)))
    actuated = np.concatenate(
        (np.zeros(batch + (n, m)), lower), axis = -2)
    if model.fully_actuated:
        complement = np.broadcast_to(
            np.concatenate((np.eye(n), np.zeros((n, n))), axis = 0),
            batch + (2 * n, n)).copy()
    else:
        basis, _ = np.linalg.qr(actuated, mode = 'complete')
        complement = basis[..., :, m:]
    fbar = np.concatenate((complement, actuated), axis = -1)
    reciprocal = 1.0 / np.linalg.cond(fbar)
    if np.any(~np.isfinite(reciprocal)) or np.any(
            reciprocal < configuration.MIN_RECIPROCAL_CONDITION):
        raise errors.DecompositionError(
            'augmented control matrix is singular to working precision '
            f'(reciprocal condition {np.min(reciprocal):.3e})')
    return AffineDecomposition(
        fd = drift, F = actuated, Fc = complement, fbar = fbar)


def extract_controls(
    model: RobotModel,
    x: Any,
    xdot: Any) -> tuple[np.ndarray, np.ndarray]:
    """Batched control extraction.

    Args:
        model (RobotModel): the robot.
        x (Any): states with shape (..., 2N).
        xdot (Any): state time derivatives with shape (..., 2N).

    Returns:
        tuple[np.ndarray, np.ndarray]: u with shape (..., m) and uc with
            shape (..., 2N - m).

    """
    state = _state_array(model, x)
    rate = _state_array(model, xdot)
    n = model.dof
    if model.fully_actuated:
        u = model.inverse_dynamics(
            q = state[..., :n], qd = state[..., n:], qdd = rate[..., n:])
        return u, rate[..., :n] - state[..., n:]
    decomposition = affine_decomposition(model, state)
    residual = rate - decomposition.fd
    solution = np.linalg.solve(
        decomposition.fbar, residual[..., None])[..., 0]
    split = 2 * n - model.inputs
    return solution[..., split:], solution[..., :split]


def extract_control(
    model: RobotModel,
    x: Any,
    xdot: Any) -> tuple[np.ndarray, np.ndarray]:
    """Recovers the control u and infeasibility coordinate uc.

    Solves fbar [uc; u] = xdot - fd. For B = I this reduces to inverse
    dynamics, u = H(x_P1) xdot_P2 + C(x_P1, x_P2), and uc = xdot_P1 - x_P2.

    Args:
        model (RobotModel): the robot.
        x (Any): StatePoint or 2N-vector.
        xdot (Any): 2N-vector time derivative of the state.

    Returns:
        tuple[np.ndarray, np.ndarray]: (u, uc).

    """
    state = validators.FINITE.validate(_state_array(model, x), name = 'x')
    rate = validators.FINITE.validate(
        _state_array(model, xdot), name = 'xdot')
    return extract_controls(model, state, rate)


def control_jacobians(
    model: RobotModel,
    x: Any,
    xdot: Any) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched extracted control with its Jacobians for B = I.

    Args:
        model (RobotModel): the robot.
        x (Any): states with shape (..., 2N).
        xdot (Any): state time derivatives with shape (..., 2N).

    Raises:
        UnsupportedModelError: if B is not the identity.

    Returns:
        tuple[np.ndarray, np.ndarray, np.ndarray]: u with shape (..., m),
            du/dx and du/dxdot with shape (..., m, 2N).

    """
    if not model.fully_actuated:
        raise errors.UnsupportedModelError(
            'analytic control derivatives need an identity actuation map')
    state = _state_array(model, x)
    rate = _state_array(model, xdot)
    n = model.dof
    q, v, a = state[..., :n], state[..., n:], rate[..., n:]
    u, du_dq, du_dv = model.inverse_dynamics_derivatives(q = q, qd = v, qdd = a)
    du_dx = np.concatenate((du_dq, du_dv), axis = -1)
    du_dxdot = np.concatenate(
        (np.zeros_like(du_dq), model.mass_matrix(q)), axis = -1)
    return u, du_dx, du_dxdot


def control_derivatives(
    model: RobotModel,
    x: Any,
    xdot: Any) -> tuple[np.ndarray, np.ndarray]:
    """Returns (du/dx, du/dxdot), each m x 2N, for a fully actuated model."""
    state = validators.FINITE.validate(_state_array(model, x), name = 'x')
    rate = validators.FINITE.validate(
        _state_array(model, xdot), name = 'xdot')
    _, du_dx, du_dxdot = control_jacobians(model, state, rate)
    return du_dx, du_dxdot
