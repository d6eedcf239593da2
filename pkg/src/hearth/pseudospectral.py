"""
pseudospectral: Chebyshev grids, differentiation, interpolation, quadrature
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
    SpectralGrid: Chebyshev-Gauss-Lobatto nodes on [0, T] with the matching
        differentiation matrix and Clenshaw-Curtis weights.
    build_grid: creates a SpectralGrid.
    interpolate: evaluates the degree-p interpolant of node samples.
    quadrature: integrates node samples over [0, T].
    fit_and_differentiate: spectral derivative of node samples.

To Do:


"""
from __future__ import annotations

import dataclasses
import logging
from typing import Any

import numpy as np
from scipy import interpolate as sp_interpolate

from . import errors
from . import validators

logger = logging.getLogger(__name__)

# Relative slack accepted on the ends of [0, T] before a time is out of range.
_RANGE_SLACK = 1e-12


def _chebyshev_points(p: int) -> np.ndarray:
    """Returns cos(j*pi/p) for j = 0..p, descending from 1 to -1.

    The sine form keeps the points exactly antisymmetric about 0.

    """
    return np.sin(np.pi * np.arange(p, -p - 1, -2) / (2 * p))


def _chebyshev_matrix(points: np.ndarray) -> np.ndarray:
    """Returns the Chebyshev differentiation matrix on [-1, 1].

    Off-diagonal entries use the closed form. The diagonal is the negated row
    sum so that constants differentiate to zero up to rounding.

    """
    p = points.size - 1
    c = np.ones(p + 1)
    c[0] = c[-1] = 2.0
    c = c * (-1.0) ** np.arange(p + 1)
    dx = points[:, np.newaxis] - points[np.newaxis, :]
    matrix = np.outer(c, 1.0 / c) / (dx + np.eye(p + 1))
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, -matrix.sum(axis = 1))
    return matrix


def _clenshaw_curtis(p: int) -> np.ndarray:
    """Returns Clenshaw-Curtis weights on [-1, 1] at cos(j*pi/p)."""
    theta = np.pi * np.arange(p + 1) / p
    weights = np.zeros(p + 1)
    interior = theta[1:-1]
    v = np.ones(p - 1)
    if p % 2 == 0:
        weights[0] = weights[-1] = 1.0 / (p**2 - 1)
        for k in range(1, p // 2):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k**2 - 1)
        v -= np.cos(p * interior) / (p**2 - 1)
    else:
        weights[0] = weights[-1] = 1.0 / p**2
        for k in range(1, (p - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * interior) / (4 * k**2 - 1)
    weights[1:-1] = 2.0 * v / p
    return weights


@dataclasses.dataclass(eq = False)
class SpectralGrid(object):
    """Chebyshev-Gauss-Lobatto collocation grid on [0, T].

    Nodes are stored in ascending physical time. Because t = T(1 - x)/2 maps
    the descending Chebyshev points onto ascending times, the row order of
    the raw Chebyshev operators already matches and only the scale changes.

    Args:
        degree (int): polynomial degree p. The grid has p + 1 nodes.
        horizon (float): final time T in seconds.
        nodes (np.ndarray): p + 1 strictly increasing times in [0, T].
        diff_matrix (np.ndarray): (p + 1) x (p + 1) differentiation matrix.
        quad_weights (np.ndarray): p + 1 Clenshaw-Curtis weights.

    """
    degree: int
    horizon: float
    nodes: np.ndarray
    diff_matrix: np.ndarray
    quad_weights: np.ndarray

    """ Properties """

    @property
    def size(self) -> int:
        """Returns the number of nodes."""
        return self.degree + 1

    """ Class Methods """

    @classmethod
    def create(cls, degree: int, horizon: float) -> SpectralGrid:
        """Builds a grid of 'degree' on [0, 'horizon'].

        Args:
            degree (int): polynomial degree p, at least 1.
            horizon (float): final time T, positive.

        Raises:
            DomainError: if 'degree' < 1 or 'horizon' <= 0.

        Returns:
            SpectralGrid: the grid.

        """
        if int(degree) != degree or degree < 1:
            raise errors.DomainError(
                f'degree must be a positive integer, got {degree}')
        validators.POSITIVE.validate(horizon, name = 'horizon')
        validators.FINITE.validate(horizon, name = 'horizon')
        degree = int(degree)
        horizon = float(horizon)
        points = _chebyshev_points(degree)
        nodes = 0.5 * horizon * (1.0 - points)
        nodes[0] = 0.0
        nodes[-1] = horizon
        diff_matrix = (-2.0 / horizon) * _chebyshev_matrix(points)
        quad_weights = 0.5 * horizon * _clenshaw_curtis(degree)
        return cls(
            degree = degree,
            horizon = horizon,
            nodes = nodes,
            diff_matrix = diff_matrix,
            quad_weights = quad_weights)

    """ Instance Methods """

    def differentiate(self, samples: Any) -> np.ndarray:
        """Returns the spectral derivative of node 'samples'.

        Args:
            samples (Any): array whose first axis runs over the nodes.

        Raises:
            DomainError: if the first axis does not have p + 1 entries.

        Returns:
            np.ndarray: derivative samples with the shape of 'samples'.

        """
        values = np.asarray(samples, dtype = float)
        if values.ndim == 0 or values.shape[0] != self.size:
            raise errors.DomainError(
                f'samples must have {self.size} rows, got shape '
                f'{values.shape}')
        return np.tensordot(self.diff_matrix, values, axes = (1, 0))

    def integrate(self, integrand: Any) -> float | np.ndarray:
        """Integrates node samples of 'integrand' over [0, T].

        Args:
            integrand (Any): array whose first axis runs over the nodes.

        Raises:
            DomainError: if the first axis does not have p + 1 entries.

        Returns:
            float | np.ndarray: integral (one per trailing column).

        """
        values = np.asarray(integrand, dtype = float)
        if values.ndim == 0 or values.shape[0] != self.size:
            raise errors.DomainError(
                f'integrand must have {self.size} entries, got shape '
                f'{values.shape}')
        result = np.tensordot(self.quad_weights, values, axes = (0, 0))
        return float(result) if result.ndim == 0 else result

    def interpolate(self, values: Any, t: Any) -> np.ndarray:
        """Evaluates the degree-p interpolant of node 'values' at times 't'.

        Barycentric Lagrange evaluation, which returns the stored node rows
        exactly when 't' hits a node.

        Args:
            values (Any): (p + 1) x d node samples.
            t (Any): scalar time or array of times in [0, T].

        Raises:
            DomainError: if 'values' has the wrong number of rows or any time
                is outside [0, T].

        Returns:
            np.ndarray: a d-vector for scalar 't', otherwise an array of shape
                t.shape + (d,).

        """
        samples = np.asarray(values, dtype = float)
        if samples.ndim == 0 or samples.shape[0] != self.size:
            raise errors.DomainError(
                f'values must have {self.size} rows, got shape '
                f'{samples.shape}')
        times = np.asarray(t, dtype = float)
        slack = _RANGE_SLACK * self.horizon
        if np.any(~np.isfinite(times)) or np.any(times < -slack) or np.any(
                times > self.horizon + slack):
            raise errors.DomainError(
                f'interpolation times must lie in [0, {self.horizon}]')
        flat = np.clip(times.reshape(-1), 0.0, self.horizon)
        interpolant = sp_interpolate.BarycentricInterpolator(
            self.nodes, samples)
        result = np.asarray(interpolant(flat), dtype = float)
        # Pin node hits to the stored rows exactly.
        hits = np.clip(np.searchsorted(self.nodes, flat), 0, self.degree)
        exact = self.nodes[hits] == flat
        result[exact] = samples[hits[exact]]
        return result.reshape(times.shape + samples.shape[1:])


def build_grid(p: int, T: float) -> SpectralGrid:
    """Creates a Chebyshev-Gauss-Lobatto grid of degree 'p' on [0, 'T'].

    Args:
        p (int): polynomial degree, at least 1.
        T (float): horizon in seconds, positive.

    Returns:
        SpectralGrid: the grid.

    """
    return SpectralGrid.create(degree = p, horizon = T)


def interpolate(grid: SpectralGrid, values: Any, t: Any) -> np.ndarray:
    """Evaluates the interpolant of node 'values' at 't'."""
    return grid.interpolate(values = values, t = t)


def quadrature(grid: SpectralGrid, integrand_at_nodes: Any) -> float:
    """Integrates node samples over [0, T] with Clenshaw-Curtis weights."""
    values = np.asarray(integrand_at_nodes, dtype = float)
    if values.ndim != 1:
        raise errors.DomainError(
            f'integrand must be a vector of {grid.size} values, got shape '
            f'{values.shape}')
    return grid.integrate(values)


def fit_and_differentiate(grid: SpectralGrid, samples: Any) -> np.ndarray:
    """Returns diff_matrix @ samples for (p + 1) x N node samples."""
    values = np.asarray(samples, dtype = float)
    if values.ndim != 2:  # noqa: PLR2004
        raise errors.DomainError(
            f'samples must be a (p + 1) x N matrix, got shape {values.shape}')
    return grid.differentiate(values)
