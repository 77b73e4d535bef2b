import numpy as np
import pytest

from diracinv import matcore
from diracinv.errors import AmbiguousRank, DegenerateClustering, NotUnitary, Singular


def test_identity_decomposition():
    dec = matcore.unitary_eig(np.eye(2))
    assert dec.s == 1
    assert np.allclose(dec.gammas, [0.0], atol=1e-14)
    assert np.allclose(dec.projectors[0], np.eye(2), atol=1e-14)


def test_diag_plus_minus_one():
    dec = matcore.unitary_eig(np.diag([1.0, -1.0]))
    assert np.allclose(dec.gammas, [0.0, np.pi / 2], atol=1e-14)
    assert np.allclose(dec.projectors[0], np.diag([1.0, 0.0]), atol=1e-14)
    assert np.allclose(dec.projectors[1], np.diag([0.0, 1.0]), atol=1e-14)


@pytest.mark.parametrize("n", [2, 4])
@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_random_unitary_reconstruction(n, seed):
    # reconstruct-and-compare oracle: the decomposition must rebuild U
    rng = np.random.default_rng(seed)
    U = matcore.haar_unitary(n, rng)
    dec = matcore.unitary_eig(U)
    assert np.linalg.norm(dec.reconstruct() - U, 2) < 1e-10
    # projector system invariants
    total = np.zeros((n, n), dtype=complex)
    for k, p in enumerate(dec.projectors):
        assert np.linalg.norm(p @ p - p, 2) < 1e-12
        assert np.linalg.norm(p - p.conj().T, 2) < 1e-13
        for q in dec.projectors[k + 1:]:
            assert np.linalg.norm(p @ q, 2) < 1e-12
        total += p
    assert np.linalg.norm(total - np.eye(n), 2) < 1e-12
    assert np.all(np.diff(dec.gammas) > 0)
    assert dec.gammas[0] >= 0 and dec.gammas[-1] < np.pi


def test_degenerate_eigenvalues_merge():
    # repeated eigenvalue -1 must come back as a single rank-2 projector
    rng = np.random.default_rng(7)
    W = matcore.haar_unitary(3, rng)
    U = W @ np.diag([-1.0, -1.0, 1.0]) @ W.conj().T
    dec = matcore.unitary_eig(U)
    assert dec.s == 2
    ranks = [int(round(np.trace(p).real)) for p in dec.projectors]
    assert sorted(ranks) == [1, 2]
    assert np.linalg.norm(dec.reconstruct() - U, 2) < 1e-10


def test_not_unitary_rejected():
    with pytest.raises(NotUnitary):
        matcore.unitary_eig(np.diag([1.0, 2.0]))
    with pytest.raises(NotUnitary):
        matcore.polar_and_check = matcore.principal_sqrt_unitary(np.ones((2, 2)))


def test_degenerate_clustering_error():
    eps = 1e-7  # between cluster_tol and 2*cluster_tol
    U = np.diag([1.0, np.exp(1j * 3 * eps)])
    with pytest.raises(DegenerateClustering):
        matcore.unitary_eig(U, cluster_tol=eps)


def test_sqrt_trivial_cases():
    assert np.allclose(matcore.principal_sqrt_unitary(np.eye(2)), np.eye(2), atol=1e-14)
    W = matcore.principal_sqrt_unitary(np.diag([1.0, -1.0]))
    assert np.allclose(W, np.diag([1.0, 1j]), atol=1e-14)


@pytest.mark.parametrize("seed", [5, 6, 7])
def test_sqrt_square_back(seed):
    # square-back oracle plus branch check on the eigenphases
    rng = np.random.default_rng(seed)
    U = matcore.haar_unitary(4, rng)
    W = matcore.principal_sqrt_unitary(U)
    assert np.linalg.norm(W @ W - U, 2) < 1e-10
    assert np.linalg.norm(W.conj().T @ W - np.eye(4), 2) < 1e-12
    phases = np.mod(np.angle(np.linalg.eigvals(W)), 2 * np.pi)
    assert np.all(phases < np.pi + 1e-12)


def test_nearest_projector_threshold():
    out = matcore.nearest_projector(np.diag([0.98, 0.01]))
    assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-14)


def test_nearest_projector_fixed_point():
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    p = q @ q.conj().T
    out = matcore.nearest_projector(p)
    assert np.linalg.norm(out - p, 2) < 1e-12
    assert np.linalg.norm(out @ out - out, 2) < 1e-12


def test_nearest_projector_perturb_and_recover():
    rng = np.random.default_rng(13)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v /= np.linalg.norm(v)
    p = np.outer(v, v.conj())
    e = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    e = 0.5 * (e + e.conj().T)
    e *= 0.1 / np.linalg.norm(e, 2)
    out = matcore.nearest_projector(p + e)
    assert int(round(np.trace(out).real)) == 1
    assert np.linalg.norm(out - p, 2) < 0.3


def test_nearest_projector_ambiguous():
    with pytest.raises(AmbiguousRank):
        matcore.nearest_projector(np.diag([0.52, 0.0]))


def test_polar_unitary():
    rng = np.random.default_rng(17)
    U = matcore.haar_unitary(3, rng)
    assert np.linalg.norm(matcore.polar_unitary(U) - U, 2) < 1e-13
    assert np.allclose(matcore.polar_unitary(2 * np.eye(3)), np.eye(3), atol=1e-14)
    e = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    e = 0.5 * (e + e.conj().T)
    e *= 0.05 / np.linalg.norm(e, 2)
    out = matcore.polar_unitary(U @ (np.eye(3) + e))
    assert np.linalg.norm(out - U, 2) < 0.2
    with pytest.raises(Singular):
        matcore.polar_unitary(np.diag([1.0, 0.0]))
