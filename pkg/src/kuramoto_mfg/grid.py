"""Uniform periodic grid on the torus with spectral calculus.

All other modules sample their functions on a ``TorusGrid`` and use the
operations here: spectral differentiation (``diff``), periodic trapezoid
quadrature (``integrate``, spectrally accurate for smooth integrands),
band-limited off-grid evaluation (``eval_offgrid``) and the spectral
antiderivative of a zero-mean function (``antiderivative``).

Differentiation is realized by a dense matrix so that the nonlinear
solver can reuse exactly the same discrete operator inside its
linearizations; for the grid sizes used here (M <= 1024) the O(M^2)
matvec is negligible next to the dense linear solves.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidParams

TWO_PI = 2.0 * np.pi

MIN_NODES = 16


@lru_cache(maxsize=8)
def _diff_matrix(m: int) -> np.ndarray:
    # Fourier differentiation matrix for an even node count: identical to
    # transforming, multiplying mode k by ik (Nyquist zeroed for real
    # output) and transforming back.
    idx = np.arange(m)
    delta = idx[:, None] - idx[None, :]
    old = np.seterr(divide="ignore")
    try:
        cot = 1.0 / np.tan(delta * (np.pi / m))
    finally:
        np.seterr(**old)
    sign = np.where(delta % 2 == 0, 1.0, -1.0)
    d = 0.5 * sign * cot
    np.fill_diagonal(d, 0.0)
    d.setflags(write=False)
    return d


@lru_cache(maxsize=8)
def _second_diff_matrix(m: int) -> np.ndarray:
    d = _diff_matrix(m)
    d2 = d @ d
    d2.setflags(write=False)
    return d2


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid x_j = 2*pi*j/M, j = 0..M-1, with even M >= 16.

    Node M/2 lands exactly on pi, which the shape checks rely on for
    endpoint limits. Instances are immutable and safe to share.
    """

    m: int
    nodes: np.ndarray = field(repr=False, compare=False)
    spacing: float = field(compare=False)

    @property
    def diff_matrix(self) -> np.ndarray:
        return _diff_matrix(self.m)

    @property
    def second_diff_matrix(self) -> np.ndarray:
        return _second_diff_matrix(self.m)

    @property
    def half(self) -> int:
        """Index of the node at x = pi."""
        return self.m // 2

    @property
    def half_nodes(self) -> np.ndarray:
        """Nodes of the closed half interval [0, pi]."""
        return self.nodes[: self.half + 1]

    def reflect_values(self, values: np.ndarray) -> np.ndarray:
        """Samples of x -> f(-x); the torus reflection fixing 0 and pi."""
        return np.concatenate((values[:1], values[:0:-1]))


@dataclass(frozen=True)
class GridFn:
    """Real samples of a function on a TorusGrid."""

    grid: TorusGrid
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.m,):
            raise InvalidParams(
                f"expected {self.grid.m} samples, got shape {values.shape}"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def even_defect(self) -> float:
        """Sup deviation from evenness about 0 and pi."""
        return float(np.max(np.abs(self.values - self.grid.reflect_values(self.values))))

    def odd_defect(self) -> float:
        """Sup deviation from oddness about 0 and pi."""
        return float(np.max(np.abs(self.values + self.grid.reflect_values(self.values))))


def make_grid(m: int) -> TorusGrid:
    """Build the uniform torus grid with M nodes.

    M must be even (so that pi is a node) and at least 16.
    """
    if m % 2 != 0:
        raise InvalidParams(f"M must be even, got {m}")
    if m < MIN_NODES:
        raise InvalidParams(f"M must be at least {MIN_NODES}, got {m}")
    nodes = TWO_PI * np.arange(m) / m
    nodes.setflags(write=False)
    return TorusGrid(m=m, nodes=nodes, spacing=TWO_PI / m)


def grid_fn(grid: TorusGrid, f) -> GridFn:
    """Sample a callable on the grid."""
    return GridFn(grid, np.asarray(f(grid.nodes), dtype=float))


def diff(fn: GridFn) -> GridFn:
    """Spectral derivative; exact for trigonometric polynomials of
    degree < M/2."""
    return GridFn(fn.grid, diff_values(fn.grid, fn.values))


def _clean_rfft(values: np.ndarray) -> np.ndarray:
    """rFFT truncated beyond the last mode that clears the noise floor.

    The forward transform injects noise of order eps * ||f||_2 into
    every coefficient. Left in place it gets amplified by k (or k^2)
    under differentiation and dominates residuals near 1e-11. All modes
    above the highest one exceeding 64 * eps * ||f||_2 are
    indistinguishable from that noise for any float64 input and are
    zeroed; for smooth samples the genuine band is untouched.
    """
    coeffs = np.fft.rfft(values)
    floor = 64.0 * np.finfo(float).eps * float(np.linalg.norm(values))
    above = np.nonzero(np.abs(coeffs) > floor)[0]
    band = above[-1] if above.size else 0
    coeffs[band + 1 :] = 0.0
    return coeffs


def diff_values(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    """Spectral derivative of raw samples: transform, multiply mode k by
    ik with the Nyquist mode zeroed, transform back.

    This transform route (with the sub-roundoff mode filter of
    ``_clean_rfft``) carries far less rounding noise than the equivalent
    dense-matrix product, which matters for residuals near 1e-11; the
    dense matrices are kept for assembling linear operators only.
    """
    m = grid.m
    coeffs = _clean_rfft(values)
    k = np.arange(m // 2 + 1)
    coeffs *= 1j * k
    coeffs[m // 2] = 0.0
    return np.fft.irfft(coeffs, n=m)


def integrate(fn: GridFn) -> float:
    """Periodic trapezoid rule h * sum(values)."""
    return float(fn.grid.spacing * np.sum(fn.values))


def eval_offgrid(fn: GridFn, x) -> float | np.ndarray:
    """Band-limited (trigonometric) interpolation through all samples.

    Accepts a scalar or an array of angles; values are reduced mod 2*pi
    implicitly by the trigonometric basis.
    """
    m = fn.grid.m
    coeffs = np.fft.rfft(fn.values)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(1, m // 2)
    phases = np.exp(1j * np.outer(xs, k))
    interior = 2.0 * np.real(phases @ coeffs[1 : m // 2])
    nyquist = np.real(coeffs[m // 2]) * np.cos((m // 2) * xs)
    out = (np.real(coeffs[0]) + interior + nyquist) / m
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out[0])
    return out


def antiderivative(fn: GridFn) -> GridFn:
    """Periodic antiderivative G with G(0) = 0 of a zero-mean function.

    The mean is removed before inverting the derivative (callers pass
    zero-mean integrands; removing the numerical mean only discards
    roundoff). The Nyquist mode carries no sine partner and is dropped.
    """
    m = fn.grid.m
    coeffs = _clean_rfft(fn.values)
    k = np.arange(m // 2 + 1)
    out = np.zeros_like(coeffs)
    out[1 : m // 2] = coeffs[1 : m // 2] / (1j * k[1 : m // 2])
    values = np.fft.irfft(out, n=m)
    values -= values[0]
    return GridFn(fn.grid, values)


def rfft_coefficients(fn: GridFn) -> np.ndarray:
    """Raw rFFT coefficients of the samples (length M/2 + 1)."""
    return np.fft.rfft(fn.values)


def spectral_cleanup(grid: TorusGrid, values: np.ndarray) -> np.ndarray:
    """Resynthesize samples from their above-noise spectral band.

    Dense linear solves leave white noise of order eps * cond in their
    output samples; resynthesizing through the truncated spectrum of
    ``_clean_rfft`` removes it without touching resolved content. Used
    on Newton iterates and variation solves so residual checks are not
    polluted by solver roundoff.
    """
    return np.fft.irfft(_clean_rfft(values), n=grid.m)
