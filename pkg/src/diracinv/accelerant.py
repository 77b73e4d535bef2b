"""Accelerant construction from spectral data.

The free operator with boundary unitary U has eigenvalues gamma_k + pi*n
(over the distinct eigenphases gamma_1 < ... < gamma_s of U) with the
eigenprojectors of U as norming matrices.  Globally indexed as
z0_(n*s+k) = gamma_k + pi*n, they induce the window partition
Delta_m = [(z0_(m-1)+z0_m)/2, (z0_m+z0_(m+1))/2).

The accelerant is the restriction to (-1, 1) of the Fourier-type transform
of the difference between the spectral measure and the free one.  It is
evaluated pointwise by window-paired summation,

    H(t) = sum_m [ sum_{lambda_j in Delta_m} A_j e^{2i lambda_j t}
                   - A0_m e^{2i z0_m t} ],

with two regularizations of the bare truncation (both on by default):

* a raised-cosine spectral window over the whole covered range, which is
  the mollified evaluation of the underlying distribution and restores
  fast pointwise convergence on compact subsets of (-1, 1);
* replacement of the samples within one resolution cell of t = +-1 by
  extrapolation from the converged interior.  The free measure carries
  delta masses exactly at t = +-1, so no summation rule can recover the
  one-sided limits there; the truncated sums are provably off by an O(1)
  amount in that cell.

The result is symmetrized to H(-t) = H(t)* afterwards.
"""

from dataclasses import dataclass

import numpy as np

from . import matcore
from ._grids import trapezoid_weights, uniform_step
from .direct import SpectralData
from .errors import InputError, WindowUnderflow

__all__ = [
    "Accelerant",
    "FreeSpectrum",
    "WindowPartition",
    "free_spectrum",
    "windows",
    "accelerant_from_measure",
    "gram_kernel_check",
]


@dataclass(frozen=True)
class Accelerant:
    """d x d kernel samples on a symmetric uniform grid over [-1, 1].

    sym_residual records max_t ||H(-t) - H(t)*|| before symmetrization.
    """

    d: int
    grid: np.ndarray
    samples: np.ndarray
    sym_residual: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        uniform_step(grid)
        if grid.size % 2 == 0 or abs(grid[0] + 1) > 1e-12 or abs(grid[-1] - 1) > 1e-12:
            raise InputError("accelerant grid must be [-1, 1] with 2N+1 nodes")
        object.__setattr__(self, "grid", grid)
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (grid.size, self.d, self.d):
            raise InputError(f"accelerant samples have shape {samples.shape}")
        object.__setattr__(self, "samples", samples)

    @property
    def n_half(self):
        return (self.grid.size - 1) // 2

    def norm_inf(self):
        return float(np.max(np.linalg.norm(self.samples, ord=2, axis=(1, 2))))

    def symmetry_defect(self):
        flip = np.conj(np.transpose(self.samples[::-1], (0, 2, 1)))
        return float(np.max(np.linalg.norm(self.samples - flip, ord=2, axis=(1, 2))))

    @classmethod
    def zero(cls, d, n_half=64):
        grid = np.linspace(-1.0, 1.0, 2 * n_half + 1)
        return cls(d=d, grid=grid, samples=np.zeros((grid.size, d, d), dtype=complex))

    @classmethod
    def from_function(cls, f, d, n_half=64):
        grid = np.linspace(-1.0, 1.0, 2 * n_half + 1)
        samples = np.array([np.asarray(f(t), dtype=complex).reshape(d, d) for t in grid])
        return cls(d=d, grid=grid, samples=samples)

    def resample(self, n_half):
        """Linear interpolation onto a grid with n_half intervals per half."""
        if n_half == self.n_half:
            return self
        grid = np.linspace(-1.0, 1.0, 2 * n_half + 1)
        flat = self.samples.reshape(self.grid.size, -1)
        out = np.empty((grid.size, flat.shape[1]), dtype=complex)
        for col in range(flat.shape[1]):
            out[:, col] = np.interp(grid, self.grid, flat[:, col].real) \
                + 1j * np.interp(grid, self.grid, flat[:, col].imag)
        return Accelerant(d=self.d, grid=grid,
                          samples=out.reshape(grid.size, self.d, self.d),
                          sym_residual=self.sym_residual)


def _index_split(ms, s):
    """m = n*s + k with k in 1..s; returns (n, k) arrays."""
    ms = np.asarray(ms, dtype=int)
    n = (ms - 1) // s
    k = ms - n * s
    return n, k


@dataclass(frozen=True)
class FreeSpectrum:
    """Free eigenvalues z0_m = gamma_k + pi*n with their projector weights."""

    decomposition: matcore.UnitaryDecomposition
    ms: np.ndarray
    zetas: np.ndarray
    projectors: np.ndarray


@dataclass(frozen=True)
class WindowPartition:
    """Half-open tiling Delta_m = [bounds[i], bounds[i+1]) for m = ms[i]."""

    ms: np.ndarray
    bounds: np.ndarray

    def assign(self, lams):
        """Window index for each value; -1 when outside the covered range."""
        lams = np.asarray(lams, dtype=float)
        pos = np.searchsorted(self.bounds, lams, side="right") - 1
        valid = (pos >= 0) & (pos < len(self.ms))
        return np.where(valid, self.ms[np.clip(pos, 0, len(self.ms) - 1)], -10 ** 9)

    @property
    def lo(self):
        return self.bounds[0]

    @property
    def hi(self):
        return self.bounds[-1]


def _free_zetas(gammas, ms):
    n, k = _index_split(ms, len(gammas))
    return np.asarray(gammas)[k - 1] + np.pi * n


def free_spectrum(U, m_range) -> FreeSpectrum:
    """Free eigenvalues and projector weights for indices m_range = (m_lo, m_hi)."""
    dec = U if isinstance(U, matcore.UnitaryDecomposition) else matcore.unitary_eig(U)
    m_lo, m_hi = m_range
    ms = np.arange(m_lo, m_hi + 1)
    n, k = _index_split(ms, dec.s)
    zetas = dec.gammas[k - 1] + np.pi * n
    return FreeSpectrum(decomposition=dec, ms=ms, zetas=zetas,
                        projectors=dec.projectors[k - 1])


def windows(U, m_range) -> WindowPartition:
    """Window partition Delta_m for m in m_range = (m_lo, m_hi), inclusive."""
    dec = U if isinstance(U, matcore.UnitaryDecomposition) else matcore.unitary_eig(U)
    m_lo, m_hi = m_range
    ms = np.arange(m_lo, m_hi + 1)
    z_ext = _free_zetas(dec.gammas, np.arange(m_lo - 1, m_hi + 2))
    bounds = 0.5 * (z_ext[:-1] + z_ext[1:])
    return WindowPartition(ms=ms, bounds=bounds)


def _damping_weights(values, zeta_span, enabled):
    """Raised-cosine spectral window over the covered range.

    Evaluating the paired sum with these weights is the mollified pairing
    of the underlying distribution against a kernel of width ~1/zeta_span;
    it converges uniformly on compact subsets of (-1, 1), unlike the bare
    truncation whose tails die only like 1/m near the interval ends.
    """
    values = np.asarray(values, dtype=float)
    if not enabled:
        return np.ones_like(values)
    cut = 1.02 * zeta_span
    w = np.cos(0.5 * np.pi * np.clip(values / cut, -1.0, 1.0)) ** 2
    return w


def _paired_terms(a: SpectralData, U, m_max, fejer):
    """Window assignment and weights shared by the sum and the Gram check.

    Returns (lams, mats, w_data, free_zetas, free_projs, w_free).
    """
    dec = matcore.unitary_eig(np.asarray(U, dtype=complex)) \
        if not isinstance(U, matcore.UnitaryDecomposition) else U
    part = windows(dec, (-m_max, m_max))
    lo, hi = a.window
    if lo > part.lo + 1e-12 or hi < part.hi - 1e-12:
        raise WindowUnderflow(
            f"data window [{lo:.4f}, {hi:.4f}) does not cover the "
            f"paired range [{part.lo:.4f}, {part.hi:.4f}) for m_max={m_max}"
        )
    lams = a.lams()
    mats = a.mats()
    assigned = part.assign(lams)
    keep = assigned > -10 ** 8
    fs = free_spectrum(dec, (-m_max, m_max))
    zeta_span = float(np.max(np.abs(fs.zetas)))
    w_data = _damping_weights(lams[keep], zeta_span, fejer)
    w_free = _damping_weights(fs.zetas, zeta_span, fejer)
    return lams[keep], mats[keep], w_data, fs.zetas, fs.projectors, w_free


def accelerant_from_measure(a: SpectralData, U, n_half=256, m_max=40,
                            fejer=True) -> Accelerant:
    """Accelerant of the operator behind the spectral data, by paired sums.

    U is the boundary unitary of the doubled operator (known or estimated);
    its free spectrum supplies the paired reference terms.  The data must
    cover every window Delta_m with |m| <= m_max, otherwise WindowUnderflow
    is raised.  n_half fixes the output grid (2*n_half+1 nodes on [-1, 1]).
    fejer toggles the raised-cosine spectral damping of the paired sums;
    the boundary-cell extrapolation is always applied.
    """
    lams, mats, w_data, z0, p0, w_free = _paired_terms(a, U, m_max, fejer)
    ts = np.linspace(-1.0, 1.0, 2 * n_half + 1)
    e_data = np.exp(2j * np.outer(lams, ts))
    e_free = np.exp(2j * np.outer(z0, ts))
    raw = np.einsum("j,jt,jab->tab", w_data, e_data, mats)
    raw -= np.einsum("m,mt,mab->tab", w_free, e_free, p0)

    flip = np.conj(np.transpose(raw[::-1], (0, 2, 1)))
    sym_residual = float(np.max(np.linalg.norm(raw - flip, ord=2, axis=(1, 2))))
    samples = 0.5 * (raw + flip)
    _extrapolate_edges(samples, n_half, float(np.max(np.abs(z0))))
    flip = np.conj(np.transpose(samples[::-1], (0, 2, 1)))
    return Accelerant(d=2 * a.r, grid=ts, samples=0.5 * (samples + flip),
                      sym_residual=sym_residual)


def _extrapolate_edges(samples, n_half, zeta_span, width_factor=4.0):
    """Replace the unresolved boundary layer of the sum by extrapolation.

    The truncated series converges pointwise on compact subsets of the
    open interval only; within roughly one resolution cell 1/zeta_span of
    t = +-1 the partial sums still feel the free delta train sitting at
    the endpoints.  Those samples are replaced by a quadratic least-squares
    extension of the adjacent converged region.
    """
    h = 1.0 / n_half
    n_lay = int(np.ceil(width_factor / (zeta_span * h))) if zeta_span > 0 else 1
    n_lay = min(max(n_lay, 1), n_half // 4)
    n_fit = max(2 * n_lay, 4)
    n_tot = samples.shape[0]

    good = np.arange(n_tot - n_lay - n_fit, n_tot - n_lay)
    bad = np.arange(n_tot - n_lay, n_tot)
    coef = np.polynomial.polynomial.polyfit(
        good.astype(float), samples[good].reshape(n_fit, -1), deg=2)
    samples[bad] = np.polynomial.polynomial.polyval(
        bad.astype(float), coef).T.reshape(n_lay, *samples.shape[1:])

    good = np.arange(n_lay, n_lay + n_fit)
    bad = np.arange(0, n_lay)
    coef = np.polynomial.polynomial.polyfit(
        good.astype(float), samples[good].reshape(n_fit, -1), deg=2)
    samples[bad] = np.polynomial.polynomial.polyval(
        bad.astype(float), coef).T.reshape(n_lay, *samples.shape[1:])


def _conv_matrix(H: Accelerant, xs, w):
    """Nystrom matrix of g -> int_0^1 H(x-s) g(s) ds on the grid xs."""
    diffs = xs[:, None] - xs[None, :]
    h = uniform_step(H.grid)
    idx = diffs / h + H.n_half
    idx_lo = np.clip(np.floor(idx).astype(int), 0, H.grid.size - 2)
    frac = idx - idx_lo
    vals = (1.0 - frac)[..., None, None] * H.samples[idx_lo] \
        + frac[..., None, None] * H.samples[idx_lo + 1]
    return vals * w[None, :, None, None]


def gram_kernel_check(a: SpectralData, H: Accelerant, U, m_max=None,
                      grid_n=None):
    """Residual of the Gram identity between the paired spectral sum and H.

    Both sides are discretized as operators on grid functions over (0, 1):
    the left side is the plain (undamped) window-paired truncation of
    sum_j Y0(lambda_j) A_j Y0(lambda_j)* minus its free counterpart, the
    right side the convolution with H.  Returns the operator 2-norm of the
    difference.
    """
    if m_max is None:
        # largest symmetric window range fully covered by the data
        dec = matcore.unitary_eig(np.asarray(U, dtype=complex)) \
            if not isinstance(U, matcore.UnitaryDecomposition) else U
        m_max = 1
        while m_max < 10 ** 5:
            part = windows(dec, (-(m_max + 1), m_max + 1))
            if a.window[0] > part.lo + 1e-12 or a.window[1] < part.hi - 1e-12:
                break
            m_max += 1
    lams, mats, _, z0, p0, _ = _paired_terms(a, U, m_max, fejer=False)

    if grid_n is None:
        xs = H.grid[H.n_half:]
    else:
        xs = np.linspace(0.0, 1.0, grid_n)
    w = trapezoid_weights(xs.size, xs[1] - xs[0])

    u_data = np.exp(2j * np.outer(lams, xs))
    u_free = np.exp(2j * np.outer(z0, xs))
    lhs = np.einsum("jp,jq,jab->paqb", u_data, np.conj(u_data) * w, mats)
    lhs -= np.einsum("mp,mq,mab->paqb", u_free, np.conj(u_free) * w, p0)
    rhs = np.transpose(_conv_matrix(H, xs, w), (0, 2, 1, 3))

    n = xs.size * H.d
    return float(np.linalg.norm((lhs - rhs).reshape(n, n), 2))
