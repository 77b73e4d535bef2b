"""Krein integral equation on the triangle and the kernel-to-potential map.

For an admissible kernel H on (-1, 1) the equation

    R(x, t) + H(x - t) + int_0^x R(x, s) H(s - t) ds = 0,   0 <= t <= x <= 1,

is solved row by row: for fixed x the trapezoid discretization turns the
row R(x, .) into the solution of a dense block linear system with a
block-Toeplitz coefficient built from the samples of H.  The potential of
the reconstructed operator is the boundary trace V(x) = i R(x, 0).

Admissibility is probed through the discretized convolution operator
I + (g -> int_0^1 H(x-s) g(s) ds): positive definiteness of its symmetric
Nystrom form is the numerical stand-in for unique solvability.
"""

import numpy as np
import scipy.linalg as sla

from dataclasses import dataclass

from ._grids import trapezoid_weights, uniform_step
from .accelerant import Accelerant
from .direct import SPotential
from .errors import InputError, NotAccelerant

__all__ = ["KreinKernel", "krein_solve", "theta", "is_accelerant"]

COND_LIMIT = 1e12


@dataclass(frozen=True)
class KreinKernel:
    """Lower-triangular grid solution R(x_i, t_j), 0 <= j <= i <= N.

    values[i, j] holds the d x d block; entries above the diagonal are zero.
    max_residual is the largest node residual of the discretized equation.
    """

    grid: np.ndarray
    values: np.ndarray
    max_residual: float


def _aligned_accelerant(H: Accelerant, n):
    if H.n_half != n:
        H = H.resample(n)
    return H


def krein_solve(H: Accelerant, n=None) -> KreinKernel:
    """Solve the triangular integral equation by row-wise Nystrom systems.

    n is the number of grid intervals on [0, 1] (defaults to the half-grid
    of H; H is linearly resampled when the grids disagree).  Raises
    NotAccelerant when a row system is singular or has condition number
    beyond 1e12, which is the discrete symptom of H failing the
    admissibility criterion.
    """
    if n is None:
        n = H.n_half
    H = _aligned_accelerant(H, n)
    d = H.d
    h = 1.0 / n
    hs = H.samples  # index k+n <-> H(k*h), k = -n..n

    # toeplitz[k, j] = H((k-j) h) for 0 <= k, j <= n
    k_idx = np.arange(n + 1)
    toeplitz = hs[(k_idx[:, None] - k_idx[None, :]) + n]

    values = np.zeros((n + 1, n + 1, d, d), dtype=complex)
    values[0, 0] = -hs[n]
    max_res = 0.0
    eye_small = np.eye(d)
    for i in range(1, n + 1):
        w = np.full(i + 1, h)
        w[0] = w[-1] = 0.5 * h
        blocks = toeplitz[: i + 1, : i + 1] * w[:, None, None, None]
        blocks[k_idx[: i + 1], k_idx[: i + 1]] += eye_small
        # unknown row X solves X @ M = -B with M in block layout (k a, j b)
        M = blocks.transpose(0, 2, 1, 3).reshape((i + 1) * d, (i + 1) * d)
        B = hs[i - k_idx[: i + 1] + n].transpose(1, 0, 2).reshape(d, (i + 1) * d)
        try:
            lu, piv = sla.lu_factor(M.T)
        except sla.LinAlgError as exc:
            raise NotAccelerant(f"row {i}: singular Nystrom system") from exc
        getri_cond = _rcond(M, lu)
        if not np.isfinite(getri_cond) or getri_cond > COND_LIMIT:
            raise NotAccelerant(
                f"row {i}: Nystrom system condition {getri_cond:.3e} beyond {COND_LIMIT:.1e}"
            )
        X = sla.lu_solve((lu, piv), -B.T).T
        res = np.abs(X @ M + B).max()
        max_res = max(max_res, float(res))
        values[i, : i + 1] = X.reshape(d, i + 1, d).transpose(1, 0, 2)

    grid = np.linspace(0.0, 1.0, n + 1)
    return KreinKernel(grid=grid, values=values, max_residual=max_res)


def _rcond(M, lu):
    anorm = np.linalg.norm(M.T, 1)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm)
    if info != 0 or rcond == 0:
        return np.inf
    return 1.0 / rcond


def residual_tolerance(H: Accelerant):
    """Acceptance level 1e-8 * (1 + ||H||_inf) for the node residuals."""
    return 1e-8 * (1.0 + H.norm_inf())


def theta(H: Accelerant, n=None) -> SPotential:
    """Potential of the reconstructed operator: V(x) = i R(x, 0)."""
    kernel = krein_solve(H, n)
    samples = 1j * kernel.values[:, 0]
    n_eff = kernel.grid.size - 1
    if n_eff % 2:
        raise InputError("theta needs an even grid interval count")
    return SPotential(d=H.d, grid=kernel.grid, samples=samples)


def is_accelerant(H: Accelerant, n=None):
    """(flag, margin): positivity of the symmetrized operator I + conv(H).

    margin is the smallest eigenvalue of I + W^(1/2) C W^(1/2) where C is
    the kernel matrix H(x_p - x_q) on [0, 1] and W the trapezoid weights;
    flag is margin > 0.
    """
    if n is None:
        n = H.n_half
    H = _aligned_accelerant(H, n)
    xs = np.linspace(0.0, 1.0, n + 1)
    uniform_step(xs)
    k_idx = np.arange(n + 1)
    C = H.samples[(k_idx[:, None] - k_idx[None, :]) + H.n_half]
    w = trapezoid_weights(n + 1, 1.0 / n)
    sq = np.sqrt(w)
    sym = C * (sq[:, None] * sq[None, :])[:, :, None, None]
    big = sym.transpose(0, 2, 1, 3).reshape((n + 1) * H.d, (n + 1) * H.d)
    big = 0.5 * (big + big.conj().T)
    margin = float(np.linalg.eigvalsh(big).min() + 1.0)
    return margin > 0.0, margin
