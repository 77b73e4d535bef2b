"""Dense complex linear algebra helpers with the conventions used throughout.

A unitary matrix U is decomposed as U = sum_k exp(2i*gamma_k) P_k with
pairwise distinct phases gamma_k in [0, pi) and orthogonal projectors P_k
resolving the identity.  The principal square root follows the same branch:
U^(1/2) = sum_k exp(i*gamma_k) P_k.
"""

import numpy as np
from dataclasses import dataclass

from .errors import AmbiguousRank, DegenerateClustering, NotUnitary, Singular

__all__ = [
    "UnitaryDecomposition",
    "unitary_eig",
    "principal_sqrt_unitary",
    "nearest_projector",
    "polar_unitary",
    "haar_unitary",
]

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class UnitaryDecomposition:
    """Spectral decomposition of a unitary matrix U = sum exp(2i*gamma_k) P_k.

    gammas are strictly increasing in [0, pi); projectors[k] is the
    orthogonal projector onto the eigenspace of exp(2i*gamma_k).
    """

    gammas: np.ndarray
    projectors: np.ndarray

    @property
    def s(self):
        return len(self.gammas)

    def reconstruct(self):
        """Rebuild sum_k exp(2i*gamma_k) P_k."""
        phases = np.exp(2j * self.gammas)
        return np.einsum("k,kab->ab", phases, self.projectors)

    def sqrt(self):
        """Rebuild sum_k exp(i*gamma_k) P_k (principal branch)."""
        phases = np.exp(1j * self.gammas)
        return np.einsum("k,kab->ab", phases, self.projectors)


def _check_unitary(U, tol):
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {U.shape}")
    defect = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2)
    if not np.isfinite(defect) or defect > tol:
        raise NotUnitary(f"unitarity defect {defect:.3e} exceeds tolerance {tol:.3e}")
    return U


def unitary_eig(U, tol_unitary=1e-10, cluster_tol=1e-6):
    """Decompose a unitary matrix into phases gamma_k in [0, pi) and projectors.

    Eigenvalues are clustered on the unit circle: two eigenvalues whose
    gamma-phases differ by less than cluster_tol are merged into one
    projector.  Raises DegenerateClustering when two distinct clusters end
    up closer than 2*cluster_tol, since the merge decision would then
    depend on round-off.
    """
    U = _check_unitary(U, tol_unitary)
    n = U.shape[0]
    w, v = np.linalg.eig(U)

    # sort by phase on [0, 2pi); gamma = phase / 2
    theta = np.mod(np.angle(w), _TWO_PI)
    order = np.argsort(theta)
    theta, v = theta[order], v[:, order]

    # circular gaps between consecutive eigenphases; cut where the gap is
    # large, wrapping the last-to-first gap around 2pi
    gaps = np.diff(theta, append=theta[0] + _TWO_PI)
    merge_tol = 2.0 * cluster_tol  # phase of U moves twice as fast as gamma
    cuts = np.flatnonzero(gaps >= merge_tol)
    if cuts.size == 0:
        groups = [np.arange(n)]
    else:
        groups = []
        start = cuts[-1] + 1  # first member after the wraparound cut
        idx = np.arange(n)
        rolled = np.roll(idx, -start)
        sizes = np.diff(np.concatenate(([0], np.mod(cuts - start, n) + 1)))
        pos = 0
        for size in sizes:
            groups.append(rolled[pos:pos + size])
            pos += size

    gammas, projectors = [], []
    for g in groups:
        # circular mean of the cluster's eigenvalues fixes the phase
        z = np.sum(np.exp(1j * theta[g]))
        th = np.mod(np.angle(z), _TWO_PI)
        gammas.append(0.5 * th)
        q, _ = np.linalg.qr(v[:, g])
        p = q @ q.conj().T
        projectors.append(0.5 * (p + p.conj().T))

    gammas = np.asarray(gammas)
    order = np.argsort(gammas)
    gammas, projectors = gammas[order], np.asarray(projectors)[order]

    if len(gammas) > 1:
        # separation measured on the gamma circle (period pi)
        seps = np.diff(gammas, append=gammas[0] + np.pi)
        if np.min(seps) < merge_tol:
            raise DegenerateClustering(
                f"clusters separated by {np.min(seps):.3e} < {merge_tol:.3e}"
            )

    return UnitaryDecomposition(gammas=gammas, projectors=projectors)


def principal_sqrt_unitary(U, tol_unitary=1e-10, cluster_tol=1e-6):
    """Square root of a unitary matrix with all eigenvalue phases in [0, pi)."""
    return unitary_eig(U, tol_unitary, cluster_tol).sqrt()


def nearest_projector(A, ambiguous_band=0.05):
    """Round a nearly-projector matrix to an exact orthogonal projector.

    Hermitizes A, then snaps eigenvalues to {0, 1} by thresholding at 1/2.
    Raises AmbiguousRank when an eigenvalue falls inside
    (1/2 - ambiguous_band, 1/2 + ambiguous_band), since the intended rank
    is then not recoverable.
    """
    A = np.asarray(A, dtype=complex)
    h = 0.5 * (A + A.conj().T)
    w, v = np.linalg.eigh(h)
    if np.any(np.abs(w - 0.5) < ambiguous_band):
        worst = w[np.argmin(np.abs(w - 0.5))]
        raise AmbiguousRank(f"eigenvalue {worst:.4f} inside the ambiguous band around 1/2")
    keep = v[:, w > 0.5]
    p = keep @ keep.conj().T
    return 0.5 * (p + p.conj().T)


def polar_unitary(A, singular_tol=1e-12):
    """Unitary factor of the polar decomposition, the closest unitary to A."""
    A = np.asarray(A, dtype=complex)
    u, s, vh = np.linalg.svd(A)
    if s[-1] < singular_tol:
        raise Singular(f"smallest singular value {s[-1]:.3e} below {singular_tol:.3e}")
    return u @ vh


def haar_unitary(n, rng):
    """Haar-distributed random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
