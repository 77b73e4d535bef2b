"""Correspondence between the interval system on (-1, 1) and the doubled
separated-boundary system on (0, 1).

The potential map sends the r x r potential q to the 2r x 2r block
potential V(x) = [[0, q(x)], [q(-x)*, 0]]; the function map rearranges a
C^(2r)-valued function on (-1, 1) into a C^(4r)-valued one on (0, 1).  The
doubled operator that matches the interval operator with boundary unitary
U carries the boundary unitary sigma*U, where the sign sigma is fixed once
by comparing free spectra rather than hard-coded (textbook statements of
the equivalence differ on this sign; the free interval spectrum is an
unambiguous referee).
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import matcore
from .direct import Potential, SPotential, free_char_T, locate_kernel_points
from .errors import AntiCommutationViolated, AsymmetricGrid, InputError, NoConsistentSign

__all__ = [
    "SignConvention",
    "v_from_q",
    "q_from_v",
    "anti_commutation_residual",
    "lift_function",
    "resolve_sign_convention",
]

log = logging.getLogger(__name__)

DEFAULT_C5_TOL = 1e-3

_sign_cache: dict[int, "SignConvention"] = {}


@dataclass(frozen=True)
class SignConvention:
    """sigma in {+1, -1} such that the interval operator with boundary
    unitary U corresponds to the doubled operator with sigma*U."""

    sigma: int


def v_from_q(q: Potential) -> SPotential:
    """Doubled potential [[0, q(x)], [q(-x)*, 0]] on [0, 1], mirrored grid."""
    m = q.half_intervals
    r = q.r
    pos = q.samples[m:]                      # q(x_i), x_i >= 0
    neg = q.samples[m::-1]                   # q(-x_i)
    samples = np.zeros((m + 1, 2 * r, 2 * r), dtype=complex)
    samples[:, :r, r:] = pos
    samples[:, r:, :r] = np.conj(np.transpose(neg, (0, 2, 1)))
    return SPotential(d=2 * r, grid=np.linspace(0.0, 1.0, m + 1), samples=samples)


def anti_commutation_residual(V: SPotential):
    """Largest grid norm of the diagonal r x r blocks of V.

    Zero exactly when V(x) J = -J V(x) on the grid, J = -i diag(I_r, -I_r).
    """
    r, rem = divmod(V.d, 2)
    if rem:
        raise InputError("anti-commutation residual needs an even block size")
    res11 = np.linalg.norm(V.samples[:, :r, :r], ord=2, axis=(1, 2))
    res22 = np.linalg.norm(V.samples[:, r:, r:], ord=2, axis=(1, 2))
    return float(max(res11.max(initial=0.0), res22.max(initial=0.0)))


def q_from_v(V: SPotential, tol=DEFAULT_C5_TOL):
    """Invert the doubled-potential map: q(x) = V12(x) for x > 0,
    q(x) = V21(-x)* for x < 0, the two one-sided limits averaged at 0.

    Returns (q, residual) where residual measures the violation of the
    anti-commutation structure (nonzero diagonal blocks).  Raises
    AntiCommutationViolated when the residual exceeds tol; pass tol=None
    to skip the gate.
    """
    residual = anti_commutation_residual(V)
    if tol is not None and residual > tol:
        raise AntiCommutationViolated(
            f"diagonal-block residual {residual:.3e} exceeds {tol:.3e}"
        )
    r = V.d // 2
    m = V.grid.size - 1
    v12 = V.samples[:, :r, r:]
    v21_star = np.conj(np.transpose(V.samples[:, r:, :r], (0, 2, 1)))
    samples = np.empty((2 * m + 1, r, r), dtype=complex)
    samples[m:] = v12
    samples[m::-1] = v21_star
    samples[m] = 0.5 * (v12[0] + v21_star[0])
    q = Potential(r=r, grid=np.linspace(-1.0, 1.0, 2 * m + 1), samples=samples)
    return q, residual


def lift_function(grid, values):
    """Rearrange y on a symmetric grid over [-1, 1] into
    (y1(x), y2(-x), y1(-x), y2(x)) on the positive half-grid.

    values has shape (2m+1, 2r) or (2m+1, 2r, k); the L2 norm is preserved
    exactly at the level of matched trapezoid sums.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    m, rem = divmod(grid.size - 1, 2)
    if rem or np.max(np.abs(grid + grid[::-1])) > 1e-12:
        raise AsymmetricGrid("lift needs a grid symmetric about 0")
    squeeze = values.ndim == 2
    if squeeze:
        values = values[:, :, None]
    r = values.shape[1] // 2
    y1, y2 = values[:, :r], values[:, r:]
    out = np.concatenate(
        (y1[m:], y2[m::-1], y1[m::-1], y2[m:]), axis=1
    )
    return grid[m:], (out[:, :, 0] if squeeze else out)


def _free_spectrum_list(U, window, merge_tol=1e-9):
    """Sorted (eigenvalue, multiplicity) of the free doubled operator in the window."""
    dec = matcore.unitary_eig(U)
    lo, hi = window
    out = []
    for gamma, p in zip(dec.gammas, dec.projectors):
        mult = int(round(np.trace(p).real))
        n_lo = int(np.ceil((lo - gamma) / np.pi))
        n_hi = int(np.floor((hi - gamma) / np.pi))
        for n in range(n_lo, n_hi + 1):
            z = gamma + np.pi * n
            if lo <= z < hi:
                out.append((z, mult))
    out.sort()
    # phases 0 and pi- can alias the same free eigenvalue at window scale
    merged = []
    for z, mult in out:
        if merged and z - merged[-1][0] < merge_tol:
            merged[-1][1] += mult
        else:
            merged.append([z, mult])
    return [(z, m) for z, m in merged]


def _spectra_match(sa, sb, tol):
    if len(sa) != len(sb):
        return False
    return all(abs(za - zb) <= tol and ma == mb
               for (za, ma), (zb, mb) in zip(sa, sb))


def resolve_sign_convention(r, n_unitaries=3, seed=1905, tol=1e-8,
                            use_cache=True) -> SignConvention:
    """Fix the sign sigma relating the boundary unitaries of the two systems.

    For several seeded random unitaries U, the free interval spectrum
    (kernel points of A_U Y0(-1) + B_U Y0(1), using the explicit free
    solution) is compared against the free doubled spectra of +U and -U;
    exactly one sign must match every time.
    """
    if use_cache and r in _sign_cache:
        return _sign_cache[r]

    rng = np.random.default_rng(seed)
    window = (-3.6 * np.pi, 3.6 * np.pi)
    candidates = {1, -1}
    for _ in range(n_unitaries):
        U = matcore.haar_unitary(2 * r, rng)
        seeds = np.array([z for sigma in (1, -1)
                          for z, _ in _free_spectrum_list(sigma * U, window)])
        spec_t = locate_kernel_points(lambda lams: free_char_T(U, lams), window,
                                      seeds=seeds, scan_step=np.pi / 24)
        still = set()
        for sigma in candidates:
            if _spectra_match(spec_t, _free_spectrum_list(sigma * U, window), tol):
                still.add(sigma)
        candidates = still
        if not candidates:
            break
    if len(candidates) != 1:
        raise NoConsistentSign(
            f"sign candidates after {n_unitaries} trials: {sorted(candidates)}"
        )
    convention = SignConvention(sigma=candidates.pop())
    log.info("boundary-unitary sign convention resolved: sigma=%+d", convention.sigma)
    if use_cache:
        _sign_cache[r] = convention
    return convention
