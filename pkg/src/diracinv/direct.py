"""Direct spectral problem for the interval Dirac operators.

Two canonical systems appear throughout:

* the half-size system on [-1, 1] with an r x r potential q entering the
  off-diagonal blocks, boundary condition A_U y(-1) + B_U y(1) = 0 with
  A_U = P2 + U P1, B_U = P1 + U P2 and a 2r x 2r unitary U;
* the doubled system on [0, 1] with a 2r x 2r potential V, separated
  boundary conditions f1(0) = f2(0), f1(1) = U f2(1), characteristic
  matrix s(z) = b_U phi(1, z) and Weyl function M(z) = -s(z)^(-1) c(z).

Eigenvalues are located as the real points where the smallest singular
value of the characteristic matrix vanishes; norming matrices are computed
constructively (kernel projector compressed against the solution Gram
matrix), through the doubled fundamental solution, or as residues of the
Weyl function.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from ._grids import simpson_weights, uniform_step
from ._ode import propagate
from .errors import (
    ContourTouchesPole,
    InputError,
    NotEigenvalue,
    ScanTooCoarse,
    SingularAtEigenvalue,
)

__all__ = [
    "Potential",
    "SPotential",
    "FundamentalSolution",
    "SpectralDatum",
    "SpectralData",
    "solve_cauchy_T",
    "solve_cauchy_S",
    "char_matrix",
    "weyl_function",
    "find_eigenvalues",
    "norming_matrix_T",
    "norming_matrix_S",
    "norming_matrix_residue",
    "spectral_data",
    "boundary_matrices_T",
    "free_char_T",
]

log = logging.getLogger(__name__)

DEFAULT_KERNEL_TOL = 1e-7
DEFAULT_RESOLUTION = 1e-10
_MERGE_TOL = 1e-9


# ---------------------------------------------------------------------------
# domain types


def _validate_samples(samples, n_nodes, size, what):
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (n_nodes, size, size):
        raise InputError(
            f"{what} samples have shape {samples.shape}, expected {(n_nodes, size, size)}"
        )
    if not np.all(np.isfinite(samples)):
        raise InputError(f"{what} samples contain non-finite entries")
    return samples


@dataclass(frozen=True)
class Potential:
    """r x r matrix potential sampled on a symmetric uniform grid over [-1, 1].

    The node count is 2m+1 with even m, so that 0 is a node (the Cauchy
    problems start there) and composite Simpson applies on each half.
    """

    r: int
    grid: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        uniform_step(grid)
        m, rem = divmod(grid.size - 1, 2)
        if rem or m % 2 or abs(grid[0] + 1) > 1e-12 or abs(grid[-1] - 1) > 1e-12:
            raise InputError("potential grid must be [-1, 1] with 2m+1 nodes, m even")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(
            self, "samples", _validate_samples(self.samples, grid.size, self.r, "potential")
        )

    @property
    def half_intervals(self):
        return (self.grid.size - 1) // 2

    @classmethod
    def zero(cls, r, n_half=64):
        n_half += n_half % 2
        grid = np.linspace(-1.0, 1.0, 2 * n_half + 1)
        return cls(r=r, grid=grid, samples=np.zeros((grid.size, r, r), dtype=complex))

    @classmethod
    def from_function(cls, f, r, n_half=64):
        """Sample a callable x -> r x r array (or scalar when r == 1)."""
        n_half += n_half % 2
        grid = np.linspace(-1.0, 1.0, 2 * n_half + 1)
        samples = np.array([np.asarray(f(x), dtype=complex).reshape(r, r) for x in grid])
        return cls(r=r, grid=grid, samples=samples)


@dataclass(frozen=True)
class SPotential:
    """d x d matrix potential (d = 2r) sampled uniformly on [0, 1], even interval count."""

    d: int
    grid: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        uniform_step(grid)
        if (grid.size - 1) % 2 or abs(grid[0]) > 1e-12 or abs(grid[-1] - 1) > 1e-12:
            raise InputError("S-side grid must be [0, 1] with an even interval count")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(
            self, "samples", _validate_samples(self.samples, grid.size, self.d, "S-potential")
        )

    @classmethod
    def zero(cls, d, n=64):
        n += n % 2
        grid = np.linspace(0.0, 1.0, n + 1)
        return cls(d=d, grid=grid, samples=np.zeros((grid.size, d, d), dtype=complex))

    @classmethod
    def from_function(cls, f, d, n=64):
        n += n % 2
        grid = np.linspace(0.0, 1.0, n + 1)
        samples = np.array([np.asarray(f(x), dtype=complex).reshape(d, d) for x in grid])
        return cls(d=d, grid=grid, samples=samples)

    def embedded(self):
        """Doubled coefficient [[0, V], [V*, 0]] on the grid, shape (n, 2d, 2d)."""
        n, d = self.grid.size, self.d
        big = np.zeros((n, 2 * d, 2 * d), dtype=complex)
        big[:, :d, d:] = self.samples
        big[:, d:, :d] = np.conj(np.transpose(self.samples, (0, 2, 1)))
        return big


@dataclass(frozen=True)
class FundamentalSolution:
    """Matrix solution of a Cauchy problem sampled on the solver grid."""

    grid: np.ndarray
    values: np.ndarray  # (n_nodes, rows, cols)

    def at_start(self):
        return self.values[np.argmin(np.abs(self.grid))]


@dataclass(frozen=True)
class SpectralDatum:
    lam: float
    A: np.ndarray
    mult: int


@dataclass
class SpectralData:
    """Sorted eigenvalue / norming-matrix pairs with window metadata.

    window is the half-open coverage interval [lo, hi) that was scanned;
    every eigenvalue of the operator inside it is present.
    """

    r: int
    data: list
    window: tuple
    U: np.ndarray | None = None
    anchor: int = field(init=False, default=0)

    def __post_init__(self):
        lams = np.array([d.lam for d in self.data])
        if lams.size and np.any(np.diff(lams) <= 0):
            raise InputError("eigenvalues must be strictly increasing")
        self.anchor = int(np.searchsorted(lams, 0.0))

    def lams(self):
        return np.array([d.lam for d in self.data])

    def mats(self):
        return np.array([d.A for d in self.data])

    def mults(self):
        return np.array([d.mult for d in self.data], dtype=int)

    def __len__(self):
        return len(self.data)


# ---------------------------------------------------------------------------
# canonical matrices

def _a_row(r2):
    """a = 2^(-1/2) (I, -I), mapping C^(4r) -> C^(2r)."""
    return np.hstack((np.eye(r2), -np.eye(r2))) / np.sqrt(2.0)


def _big_J(r2):
    return -1j * np.diag(np.concatenate((np.ones(r2), -np.ones(r2))))


def _phi_psi_init(r2):
    """Initial values (J a*, a*) of the two doubled Cauchy problems."""
    a = _a_row(r2)
    return _big_J(r2) @ a.conj().T, a.conj().T


def _b_U(U):
    w = matcore.principal_sqrt_unitary(U)
    return np.hstack((w.conj().T, -w)) / np.sqrt(2.0)


def boundary_matrices_T(U):
    """(A_U, B_U) = (P2 + U P1, P1 + U P2) for the interval system."""
    U = np.asarray(U, dtype=complex)
    r = U.shape[0] // 2
    p1 = np.zeros_like(U)
    p2 = np.zeros_like(U)
    p1[:r, :r] = np.eye(r)
    p2[r:, r:] = np.eye(r)
    return p2 + U @ p1, p1 + U @ p2


def free_char_T(U, lams):
    """Boundary matrix A_U Y0(-1, lam) + B_U Y0(1, lam) of the free interval
    operator, using the explicit free solution Y0 = diag(e^{i lam x} I, e^{-i lam x} I).
    """
    U = np.asarray(U, dtype=complex)
    r = U.shape[0] // 2
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    au, bu = boundary_matrices_T(U)
    e = np.exp(1j * lams)
    out = np.empty((lams.size, 2 * r, 2 * r), dtype=complex)
    for i in range(lams.size):
        y_m = np.diag(np.concatenate((np.full(r, 1 / e[i]), np.full(r, e[i]))))
        y_p = np.diag(np.concatenate((np.full(r, e[i]), np.full(r, 1 / e[i]))))
        out[i] = au @ y_m + bu @ y_p
    return out


# ---------------------------------------------------------------------------
# Cauchy problems


def solve_cauchy_T(q: Potential, lam) -> FundamentalSolution:
    """Fundamental solution Y of the interval system, Y(0) = I, over [-1, 1]."""
    coeff = np.zeros((q.grid.size, 2 * q.r, 2 * q.r), dtype=complex)
    coeff[:, : q.r, q.r:] = q.samples
    coeff[:, q.r:, : q.r] = np.conj(np.transpose(q.samples, (0, 2, 1)))
    mid = (q.grid.size - 1) // 2
    traj = propagate(q.grid, coeff, np.array([lam]), np.eye(2 * q.r),
                     start=mid, trajectory=True)
    return FundamentalSolution(grid=q.grid, values=traj[0])


def solve_cauchy_S(V: SPotential, zeta):
    """Solutions (phi, psi) of the doubled system with phi(0) = J a*, psi(0) = a*."""
    y_phi, y_psi = _phi_psi_init(V.d)
    traj = propagate(V.grid, V.embedded(), np.array([zeta]),
                     np.hstack((y_phi, y_psi)), trajectory=True)
    phi = FundamentalSolution(grid=V.grid, values=traj[0, :, :, : V.d])
    psi = FundamentalSolution(grid=V.grid, values=traj[0, :, :, V.d:])
    return phi, psi


def _char_weyl_batch(V, U, zetas):
    """(s(z), c(z)) for a batch of z from one joint propagation."""
    y_phi, y_psi = _phi_psi_init(V.d)
    _, y_end = propagate(V.grid, V.embedded(), zetas, np.hstack((y_phi, y_psi)))
    b = _b_U(U)
    s = np.matmul(b, y_end[:, :, : V.d])
    c = np.matmul(b, y_end[:, :, V.d:])
    return s, c


def _char_batch(V, U, zetas):
    y_phi, _ = _phi_psi_init(V.d)
    _, y_end = propagate(V.grid, V.embedded(), zetas, y_phi)
    return np.matmul(_b_U(U), y_end)


def char_matrix(V: SPotential, U, zeta):
    """Characteristic matrix s(z) = b_U phi(1, z); eigenvalues are its kernel points."""
    return _char_batch(V, U, np.atleast_1d(np.asarray(zeta, dtype=complex)))[0]


def weyl_function(V: SPotential, U, zeta, singular_tol=1e-12):
    """Weyl function M(z) = -s(z)^(-1) c(z), meromorphic Herglotz."""
    s, c = _char_weyl_batch(V, U, np.atleast_1d(np.asarray(zeta, dtype=complex)))
    smin = np.linalg.svd(s[0], compute_uv=False)[-1]
    if smin < singular_tol:
        raise SingularAtEigenvalue(f"characteristic matrix has sigma_min={smin:.3e}")
    return -np.linalg.solve(s[0], c[0])


# ---------------------------------------------------------------------------
# kernel-point location on the real line


def _min_singular(mats):
    return np.linalg.svd(mats, compute_uv=False)[:, -1]


def _refine_vshape(fn, a, m, b, fa, fm, fb, xtol, max_iter=90):
    """Vectorized minimizer for V-shaped sigma_min profiles.

    Keeps triples a < m < b with f(m) <= min(f(a), f(b)); proposes the
    intersection of the two secant lines and falls back to bisecting the
    longer subinterval.  fn maps an array of points to an array of values.
    """
    a, m, b = (np.array(v, dtype=float) for v in (a, m, b))
    fa, fm, fb = (np.array(v, dtype=float) for v in (fa, fm, fb))
    for _ in range(max_iter):
        active = (b - a) > xtol
        if not np.any(active):
            break
        s1 = (fm - fa) / (m - a)
        s2 = (fb - fm) / (b - m)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (fb - fa + s1 * a - s2 * b) / (s1 - s2)
        bad = ~np.isfinite(x) | (x <= a) | (x >= b) | (s1 >= 0) | (s2 <= 0)
        longer_left = (m - a) > (b - m)
        x = np.where(bad, np.where(longer_left, 0.5 * (a + m), 0.5 * (m + b)), x)
        # keep the proposal away from the current interior point
        guard = 0.05 * (b - a)
        too_close = np.abs(x - m) < guard
        x = np.where(too_close & longer_left, 0.5 * (a + m), x)
        x = np.where(too_close & ~longer_left, 0.5 * (m + b), x)

        fx = np.full_like(x, np.inf)
        fx[active] = fn(x[active])

        lower = fx < fm
        on_left = x < m
        # four cases; vectorized bracket update
        new_a = np.where(on_left, np.where(lower, a, x), np.where(lower, m, a))
        new_m = np.where(lower, x, m)
        new_b = np.where(on_left, np.where(lower, m, b), np.where(lower, b, x))
        new_fa = np.where(on_left, np.where(lower, fa, fx), np.where(lower, fm, fa))
        new_fm = np.where(lower, fx, fm)
        new_fb = np.where(on_left, np.where(lower, fm, fb), np.where(lower, fb, fx))
        a = np.where(active, new_a, a)
        m = np.where(active, new_m, m)
        b = np.where(active, new_b, b)
        fa = np.where(active, new_fa, fa)
        fm = np.where(active, new_fm, fm)
        fb = np.where(active, new_fb, fb)
    return m, fm


def locate_kernel_points(mat_fn, window, seeds=None, scan_step=np.pi / 16,
                         tau_ker=DEFAULT_KERNEL_TOL, resolution=DEFAULT_RESOLUTION):
    """Real points in [lo, hi) where the matrix function loses rank.

    mat_fn maps an array of real points to a stacked array of matrices.
    The profile sigma_min(mat_fn(x)) is scanned on a uniform grid (densified
    around the seed points), local minima are refined to the requested
    resolution, and a point is accepted when sigma_min falls below tau_ker.
    Multiplicity is the number of singular values below tau_ker.

    Returns a list of (point, multiplicity), sorted.
    """
    lo, hi = window
    if not hi > lo:
        raise InputError("empty scan window")

    pts = np.arange(lo - 2 * scan_step, hi + 2 * scan_step, scan_step)
    if seeds is not None and len(seeds):
        # dense cloud around each seed so that neighbouring roots produce
        # separate scan minima instead of one shared valley
        offsets = np.array([0.0, 1 / 16, 1 / 8, 3 / 16, 1 / 4, 3 / 8, 1 / 2, 3 / 4, 1.0])
        cloud = np.concatenate((-offsets[:0:-1], offsets)) * scan_step
        pts = np.concatenate((pts, (np.asarray(seeds)[:, None] + cloud).ravel()))
    pts = np.unique(pts)
    f = _min_singular(mat_fn(pts))

    interior = np.flatnonzero((f[1:-1] <= f[:-2]) & (f[1:-1] <= f[2:])) + 1
    if interior.size == 0:
        return []

    def fn(xs):
        return _min_singular(mat_fn(xs))

    roots, fvals = _refine_vshape(
        fn, pts[interior - 1], pts[interior], pts[interior + 1],
        f[interior - 1], f[interior], f[interior + 1], xtol=resolution,
    )
    keep = fvals < tau_ker
    roots = np.sort(roots[keep])
    if roots.size == 0:
        return []

    # merge collapsed roots; combined multiplicity comes from the singular
    # value count at the merged point
    groups = np.split(roots, np.flatnonzero(np.diff(roots) > _MERGE_TOL) + 1)
    centers = np.array([g.mean() for g in groups])
    svals = np.linalg.svd(mat_fn(centers), compute_uv=False)
    out = []
    for g, center, sv in zip(groups, centers, svals):
        mult = int(np.sum(sv < tau_ker))
        if mult == 0:
            continue
        if len(g) > 1 and mult < len(g):
            raise ScanTooCoarse(
                f"{len(g)} scan minima collapsed at {center:.12g} but kernel dimension is {mult}"
            )
        if lo - resolution <= center < hi - resolution:
            out.append((float(center), mult))
    return out


def find_eigenvalues(V: SPotential, U, window, oversample=2,
                     tau_ker=DEFAULT_KERNEL_TOL, resolution=DEFAULT_RESOLUTION):
    """Real eigenvalues (with multiplicities) of the doubled operator in the window.

    The scan runs at step pi/(8*oversample) and is densified around the
    free eigenvalues gamma_k + pi*n of the boundary unitary, where the
    spectrum concentrates.  Afterwards the found rank per free-eigenvalue
    window is compared with the rank of the corresponding eigenprojector;
    deficient windows trigger progressively finer local rescans, so that
    split multiplets are resolved down to separations of order tau_ker.
    """
    dec = matcore.unitary_eig(U)
    lo, hi = window
    ns = np.arange(np.floor(lo / np.pi) - 1, np.ceil(hi / np.pi) + 1)
    seeds = (dec.gammas[:, None] + np.pi * ns[None, :]).ravel()
    seeds = seeds[(seeds > lo - 0.5) & (seeds < hi + 0.5)]
    mat_fn = lambda zs: _char_batch(V, U, zs)  # noqa: E731
    found = locate_kernel_points(
        mat_fn, window, seeds=seeds,
        scan_step=np.pi / (8.0 * oversample), tau_ker=tau_ker, resolution=resolution,
    )
    return _complete_window_ranks(mat_fn, dec, found, window,
                                  tau_ker=tau_ker, resolution=resolution)


def _complete_window_ranks(mat_fn, dec, found, window, tau_ker, resolution,
                           first_step=0.02, shrink=12.0, min_step=3e-8):
    """Rescan free-eigenvalue windows whose found rank falls short.

    A multiplet that splits by less than the scan resolution shows up as a
    single point with too small a multiplicity; zooming in around the
    window until the step drops below the kernel-tolerance scale either
    finds the missing roots or confirms a genuinely merged multiplet.
    Per-window rank deficits that stem from eigenvalue migration between
    neighbouring windows simply leave the rescans empty.
    """
    lo, hi = window
    ranks = np.array([int(round(np.trace(p).real)) for p in dec.projectors])
    s = dec.s
    zs0, bounds = [], []
    n_lo = int(np.floor((lo - dec.gammas[0]) / np.pi)) - 1
    n_hi = int(np.ceil((hi - dec.gammas[-1]) / np.pi)) + 1
    all_z0 = np.concatenate([dec.gammas + np.pi * n for n in range(n_lo, n_hi + 1)])
    all_z0.sort()
    mids = 0.5 * (all_z0[:-1] + all_z0[1:])
    exp_rank = {}
    for i in range(1, len(all_z0) - 1):
        if lo <= mids[i - 1] and mids[i] <= hi:
            k = int(np.argmin(np.abs(np.mod(all_z0[i] - dec.gammas + np.pi / 2, np.pi)
                                     - np.pi / 2)))
            exp_rank[i] = (all_z0[i], mids[i - 1], mids[i], ranks[k])

    found = list(found)
    step = first_step
    while step >= min_step:
        deficits = []
        for z0, wlo, whi, rank in exp_rank.values():
            have = sum(m for z, m in found if wlo <= z < whi)
            if have < rank:
                deficits.append((max(wlo, lo), min(whi, hi)))
        if not deficits:
            break
        for sub_lo, sub_hi in deficits:
            extra = locate_kernel_points(mat_fn, (sub_lo, sub_hi), seeds=None,
                                         scan_step=step, tau_ker=tau_ker,
                                         resolution=resolution)
            for z, m in extra:
                if all(abs(z - z_old) > _MERGE_TOL for z_old, _ in found):
                    found.append((z, m))
        step /= shrink
    found.sort()
    return found


# ---------------------------------------------------------------------------
# norming matrices


def _kernel_basis(mat, tau):
    u, s, vh = np.linalg.svd(mat)
    basis = vh[s < tau].conj().T
    return basis


def _compress_inverse(M, E, cond_warn=1e8, what="norming matrix"):
    """E (E* M E)^(-1) E* for an orthonormal kernel basis E."""
    small = E.conj().T @ M @ E
    small = 0.5 * (small + small.conj().T)
    w = np.linalg.eigvalsh(small)
    if w[0] <= 0 or w[-1] / w[0] > cond_warn:
        log.warning("%s: compressed Gram matrix has eigenvalue range [%.3e, %.3e]",
                    what, w[0], w[-1])
    out = E @ np.linalg.solve(small, E.conj().T)
    return 0.5 * (out + out.conj().T)


def norming_matrix_T(q: Potential, U, lam, tau_ker=DEFAULT_KERNEL_TOL) -> SpectralDatum:
    """Norming matrix of the interval operator at an eigenvalue lam.

    Computes M = (1/2) int Y* Y over [-1, 1] by composite Simpson, the
    kernel E of A_U Y(-1) + B_U Y(1), and returns the inverse of the
    compression of M to E (zero on the orthogonal complement).
    """
    sol = solve_cauchy_T(q, lam)
    h = uniform_step(sol.grid)
    w = simpson_weights(sol.grid.size, h)
    M = 0.5 * np.einsum("n,nqa,nqb->ab", w, np.conj(sol.values), sol.values)
    au, bu = boundary_matrices_T(U)
    bnd = au @ sol.values[0] + bu @ sol.values[-1]
    E = _kernel_basis(bnd, tau_ker)
    if E.shape[1] == 0:
        raise NotEigenvalue(f"boundary matrix has trivial kernel at {lam}")
    A = _compress_inverse(M, E)
    return SpectralDatum(lam=float(np.real(lam)), A=A, mult=E.shape[1])


def _norming_S_batch(V, U, zetas, tau_ker=DEFAULT_KERNEL_TOL):
    """Norming matrices of the doubled operator at a batch of eigenvalues."""
    d = V.d
    zetas = np.asarray(zetas, dtype=float)
    traj = propagate(V.grid, V.embedded(), zetas, np.eye(2 * d), trajectory=True)
    h = uniform_step(V.grid)
    w = simpson_weights(V.grid.size, h)
    gram = 0.5 * np.einsum("n,znqa,znqb->zab", w, np.conj(traj), traj)

    r2 = d
    sq2 = np.sqrt(2.0)
    bigA = np.zeros((2 * r2, 2 * r2), dtype=complex)
    bigA[r2:, :r2] = -np.eye(r2) / sq2
    bigA[r2:, r2:] = np.eye(r2) / sq2
    bigB = np.zeros((2 * r2, 2 * r2), dtype=complex)
    bigB[:r2, :r2] = np.eye(r2) / sq2
    bigB[:r2, r2:] = -np.asarray(U, dtype=complex) / sq2

    a = _a_row(r2)
    aJ = a @ _big_J(r2)
    Ja_star = _big_J(r2) @ a.conj().T
    out = []
    for i, z in enumerate(zetas):
        bnd = bigA + bigB @ traj[i, -1]
        E = _kernel_basis(bnd, tau_ker)
        if E.shape[1] == 0:
            raise NotEigenvalue(f"separated boundary matrix has trivial kernel at {z}")
        Dj = _compress_inverse(gram[i], E)
        C = -0.5 * aJ @ Dj @ Ja_star
        C = 0.5 * (C + C.conj().T)
        out.append(SpectralDatum(lam=float(z), A=C, mult=E.shape[1]))
    return out


def norming_matrix_S(V: SPotential, U, zeta, tau_ker=DEFAULT_KERNEL_TOL) -> SpectralDatum:
    """Norming matrix via the doubled fundamental solution and the
    compression formula C = -(1/2) a J D J a*."""
    return _norming_S_batch(V, U, [zeta], tau_ker)[0]


def norming_matrix_residue(V: SPotential, U, zeta, radius, n_points=64,
                           pole_tol=1e-8):
    """Norming matrix as minus the residue of the Weyl function.

    Trapezoid rule on a circle about the eigenvalue; the radius must stay
    below half the gap to the neighbouring eigenvalues.
    """
    theta = 2.0 * np.pi * np.arange(n_points) / n_points
    ring = zeta + radius * np.exp(1j * theta)
    s, c = _char_weyl_batch(V, U, ring)
    smin = _min_singular(s)
    if np.min(smin) < pole_tol:
        raise ContourTouchesPole(
            f"sigma_min={np.min(smin):.3e} on the contour of radius {radius}"
        )
    m_vals = -np.linalg.solve(s, c)
    # -(1/2 pi i) contour integral, trapezoid in theta
    C = -(radius / n_points) * np.einsum("z,zab->ab", np.exp(1j * theta), m_vals)
    return 0.5 * (C + C.conj().T)


def spectral_data(V: SPotential, U, window, oversample=2,
                  tau_ker=DEFAULT_KERNEL_TOL, resolution=DEFAULT_RESOLUTION,
                  U_label=None) -> SpectralData:
    """Eigenvalues and norming matrices of the doubled operator in a window."""
    found = find_eigenvalues(V, U, window, oversample=oversample,
                             tau_ker=tau_ker, resolution=resolution)
    zetas = [z for z, _ in found]
    data = _norming_S_batch(V, U, zetas, tau_ker) if zetas else []
    return SpectralData(r=V.d // 2, data=data, window=tuple(window),
                        U=U if U_label is None else U_label)
