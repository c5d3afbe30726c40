"""Von Neumann quantities of a group-ring Laplacian by Fourier transform over the torus.

For Z^d the von Neumann trace of f(Delta) is the torus average of
trace f(Delta(theta)).  All averages here use a uniform product grid shifted
by half a cell, ``theta_i = (i + 1/2) / N``, which keeps the sample set away
from theta = 0 where the symbol usually has extra kernel.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .laurent import LaurentMatrix, adjoint, evaluate_many

GRID_OFFSET = 0.5
_CHUNK = 1 << 15


class Estimate(NamedTuple):
    value: float
    error: float

    def __float__(self) -> float:
        return self.value


def torus_grid(n: int, d: int, offset: float = GRID_OFFSET) -> np.ndarray:
    axis = (np.arange(n) + offset) / n
    return np.array(list(itertools.product(axis, repeat=d))).reshape(-1, d)


def _check(delta: LaurentMatrix, grid_size: int) -> None:
    if delta.rows != delta.cols or adjoint(delta) != delta:
        raise ValueError("density needs a self-adjoint group-ring matrix")
    if grid_size < 2 or grid_size % 2:
        raise ValueError(f"grid_size must be even and >= 2, got {grid_size}")


def sample_eigenvalues(delta: LaurentMatrix, grid_size: int, offset: float = GRID_OFFSET) -> np.ndarray:
    """Sorted eigenvalues of the symbol at every grid point, shape (grid_size**d, n)."""
    pts = torus_grid(grid_size, delta.rank, offset)
    out = np.empty((len(pts), delta.rows))
    for lo in range(0, len(pts), _CHUNK):
        block = evaluate_many(delta, pts[lo:lo + _CHUNK])
        out[lo:lo + _CHUNK] = np.linalg.eigvalsh(block) if delta.rows else 0.0
    return out


@dataclass(eq=False)
class VNDensity:
    """Spectral density of a self-adjoint group-ring matrix, sampled on the torus."""

    delta: LaurentMatrix = field(repr=False)
    grid_size: int
    samples: np.ndarray = field(repr=False)
    j: int | None = None
    kernel_tol: float = 1e-7
    tie_tol: float = 1e-9
    offset: float = GRID_OFFSET
    _half: VNDensity | None = field(default=None, repr=False)
    _sorted: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_cells(self) -> int:
        return self.samples.shape[1]

    @property
    def points(self) -> int:
        return self.samples.shape[0]

    @property
    def half(self) -> VNDensity:
        """Same density on the grid of half the size (for error estimates)."""
        if self._half is None:
            n = self.grid_size // 2
            self._half = VNDensity(self.delta, n, sample_eigenvalues(self.delta, n, self.offset),
                                   self.j, self.kernel_tol, self.tie_tol, self.offset)
        return self._half

    def _flat(self) -> np.ndarray:
        if self._sorted is None:
            flat = self.samples.ravel().copy()
            # numeric zeros are pinned at 0 so they count for every lambda >= 0
            flat[np.abs(flat) < self.kernel_tol] = 0.0
            self._sorted = np.sort(flat)
        return self._sorted

    def F(self, lam) -> np.ndarray | float:
        lam_arr = np.asarray(lam, dtype=float)
        if np.any(lam_arr < 0):
            raise ValueError("lambda must be nonnegative")
        flat = self._flat()
        edge = np.where(lam_arr == 0, 0.0, lam_arr + self.tie_tol)
        counts = np.searchsorted(flat, edge, side="right")
        out = counts / self.points
        return float(out) if np.ndim(out) == 0 else out

    def F_error(self, lam) -> np.ndarray | float:
        return np.abs(np.asarray(self.F(lam)) - np.asarray(self.half.F(lam)))

    def F_sup_error(self) -> float:
        """sup over lambda of |F - F_half|, evaluated at every breakpoint of either step function."""
        nodes = np.unique(np.concatenate([self._flat(), self.half._flat()]))
        nodes = nodes[nodes >= 0]
        return float(np.max(np.abs(self.F(nodes) - self.half.F(nodes)), initial=0.0))

    def error_estimate(self) -> dict[str, float]:
        return {"betti": self.betti_estimate.error, "F_sup": self.F_sup_error(),
                "log_det_prime": abs(self.log_det_prime() - self.half.log_det_prime())}

    @property
    def betti(self) -> float:
        return self.F(0.0)

    @property
    def betti_estimate(self) -> Estimate:
        return Estimate(self.betti, abs(self.betti - self.half.betti))

    def kernel_dims(self, kernel_tol: float | None = None) -> np.ndarray:
        tol = self.kernel_tol if kernel_tol is None else kernel_tol
        return (np.abs(self.samples) < tol).sum(axis=1)

    def log_det_prime(self) -> float:
        pos = self.samples[self.samples > self.kernel_tol]
        return math.fsum(np.log(pos).tolist()) / self.points

    def trace_power(self, k: int) -> float:
        return math.fsum((self.samples ** k).ravel().tolist()) / self.points

    def metadata(self) -> dict:
        return {"grid_size": self.grid_size, "offset": self.offset, "points": self.points,
                "kernel_tol": self.kernel_tol}


def density(delta: LaurentMatrix, grid_size: int, j: int | None = None,
            kernel_tol: float = 1e-7, tie_tol: float = 1e-9) -> VNDensity:
    _check(delta, grid_size)
    return VNDensity(delta, grid_size, sample_eigenvalues(delta, grid_size), j, kernel_tol, tie_tol)


def fk_determinant(delta: LaurentMatrix, grid_size: int, kernel_tol: float = 1e-7) -> Estimate:
    """log det'_pi: torus average of the summed log of the positive eigenvalues of the symbol."""
    dens = density(delta, grid_size, kernel_tol=kernel_tol)
    value = dens.log_det_prime()
    return Estimate(value, abs(value - dens.half.log_det_prime()))


def trace_power_quadrature(delta: LaurentMatrix, k: int, grid_size: int) -> Estimate:
    """Torus average of trace(Delta(theta)^k), with a half-grid error estimate."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    dens = density(delta, grid_size)
    value = dens.trace_power(k)
    return Estimate(value, abs(value - dens.half.trace_power(k)))


def exact_grid_size(delta: LaurentMatrix, k: int) -> int:
    """Even grid size that integrates trace(Delta(theta)^k) exactly, 4 k span (at least 4)."""
    n = max(4, 4 * k * max(delta.max_shift_span(), 1))
    return n + (n % 2)
