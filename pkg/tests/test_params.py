import itertools

import numpy as np
import pytest

import hrgm
from hrgm import (
    CayleyMengerBlocks,
    ParameterError,
    cayley_menger,
    cm_inverse_blocks,
    farris,
    farris_inverse,
    gamma_to_sigma,
    gamma_to_theta,
    is_valid_precision,
    is_valid_variogram,
    project_variogram,
    projection_matrix,
    q_from_theta,
    sigma_to_theta,
    theta_from_q,
    theta_to_gamma,
)
from oracles import random_variogram

GAMMA2 = np.array([[0.0, 2.0], [2.0, 0.0]])
SIGMA2 = np.array([[0.5, -0.5], [-0.5, 0.5]])


def test_projection_matrix_d2():
    assert np.allclose(projection_matrix(2), SIGMA2)


def test_projection_matrix_row_sums_and_idempotence():
    for d in (2, 3, 5, 9):
        p = projection_matrix(d)
        assert np.abs(p @ np.ones(d)).max() < 1e-14
        assert np.abs(p @ p - p).max() < 1e-12


def test_projection_matrix_rejects_small_dimension():
    with pytest.raises(ValueError):
        projection_matrix(1)


def test_gamma_to_sigma_d2():
    assert np.allclose(gamma_to_sigma(GAMMA2), SIGMA2, atol=1e-14)


def test_gamma_to_sigma_permutation_equivariance(rng):
    gamma = random_variogram(rng, 5)
    perm = rng.permutation(5)
    lhs = gamma_to_sigma(gamma[np.ix_(perm, perm)])
    rhs = gamma_to_sigma(gamma)[np.ix_(perm, perm)]
    assert np.abs(lhs - rhs).max() < 1e-12


def test_gamma_to_sigma_path3(path3_gamma):
    sigma = gamma_to_sigma(path3_gamma)
    assert np.abs(sigma @ np.ones(3)).max() < 1e-12
    w = np.sort(np.linalg.eigvalsh(sigma))
    assert abs(w[0]) < 1e-12
    assert np.all(w[1:] > 0)


def test_gamma_to_sigma_rejects_invalid():
    bad = np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]])
    # distances 1, 1, 4 violate the triangle inequality of sqrt entries
    with pytest.raises(ParameterError, match="eigenvalue"):
        gamma_to_sigma(bad)


def test_sigma_to_theta_d2():
    theta = sigma_to_theta(SIGMA2)
    assert np.allclose(theta, SIGMA2, atol=1e-12)
    assert abs(q_from_theta(theta)[0, 1] - 0.5) < 1e-12


def test_theta_times_sigma_is_projection(rng):
    for d in (3, 5, 8):
        gamma = random_variogram(rng, d)
        sigma = gamma_to_sigma(gamma)
        theta = sigma_to_theta(sigma)
        assert np.abs(theta @ sigma - projection_matrix(d)).max() < 1e-10


def test_tree_adjacency_is_reciprocal_edge_values():
    # star on 4 vertices with distinct edge values
    from hrgm import tree_metric_complete

    edges = [(0, 3), (1, 3), (2, 3)]
    values = np.array([0.7, 1.3, 2.1])
    gamma = tree_metric_complete(4, edges, values)
    q = q_from_theta(gamma_to_theta(gamma))
    for (u, v), val in zip(edges, values):
        assert abs(q[u, v] - 1.0 / val) < 1e-10
    assert abs(q[0, 1]) < 1e-10 and abs(q[0, 2]) < 1e-10 and abs(q[1, 2]) < 1e-10


def test_theta_to_gamma_d2():
    theta = theta_from_q(np.array([[0.0, 0.5], [0.5, 0.0]]))
    assert abs(theta_to_gamma(theta)[0, 1] - 2.0) < 1e-12


def test_round_trip_random(rng):
    for d in range(2, 11):
        gamma = random_variogram(rng, d)
        back = theta_to_gamma(gamma_to_theta(gamma))
        assert np.abs(back - gamma).max() < 1e-10


def test_triangle_unit_weights_gamma():
    q = np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    gamma = theta_to_gamma(theta_from_q(q))
    off = gamma[~np.eye(3, dtype=bool)]
    assert np.abs(off - 2.0 / 3.0).max() < 1e-12


def test_farris_d2():
    gamma = np.array([[0.0, 1.7], [1.7, 0.0]])
    assert np.allclose(farris(gamma, 0), [[1.7]])


def test_farris_path3(path3_gamma):
    assert np.allclose(farris(path3_gamma, 0), [[1.0, 1.0], [1.0, 2.0]])


def test_farris_round_trip(rng):
    for d in (2, 4, 7):
        gamma = random_variogram(rng, d)
        for k in range(d):
            back = farris_inverse(farris(gamma, k), k)
            assert np.abs(back - gamma).max() < 1e-12


def test_cayley_menger_d2_determinant():
    for g in (0.5, 2.0, 7.3):
        cm = cayley_menger(np.array([[0.0, g], [g, 0.0]]))
        assert abs(np.linalg.det(cm) - g) < 1e-12


def test_cayley_menger_det_equals_anchored_det(rng):
    for d in range(2, 9):
        gamma = random_variogram(rng, d)
        det_cm = np.linalg.det(cayley_menger(gamma))
        for k in range(d):
            det_k = np.linalg.det(farris(gamma, k))
            assert abs(det_cm - det_k) < 1e-9 * max(abs(det_cm), 1.0)


def test_cayley_menger_linearity(rng):
    gamma = random_variogram(rng, 4)
    diff = cayley_menger(2 * gamma) - cayley_menger(gamma)
    assert np.allclose(diff[:4, :4], -0.5 * gamma)
    assert np.abs(diff[4, :]).max() == 0.0 and np.abs(diff[:, 4]).max() == 0.0


def test_cm_inverse_blocks_d2():
    blocks = cm_inverse_blocks(GAMMA2)
    assert np.allclose(blocks.theta, SIGMA2, atol=1e-12)
    assert np.allclose(blocks.r, [0.5, 0.5])
    assert abs(blocks.r_squared - 0.5) < 1e-12


def test_cm_inverse_blocks_product_identity(rng):
    for d in range(2, 11):
        gamma = random_variogram(rng, d)
        blocks = cm_inverse_blocks(gamma)
        prod = cayley_menger(gamma) @ blocks.assemble()
        assert np.abs(prod - np.eye(d + 1)).max() < 1e-10


def test_cm_inverse_blocks_border_sums_to_one(rng):
    for d in (2, 5, 9):
        gamma = random_variogram(rng, d)
        assert abs(cm_inverse_blocks(gamma).r.sum() - 1.0) < 1e-10


def test_blocks_assemble_shape():
    blocks = CayleyMengerBlocks(theta=SIGMA2, r=np.array([0.5, 0.5]), r_squared=0.5)
    full = blocks.assemble()
    assert full.shape == (3, 3)
    assert full[2, 2] == -0.5


def test_conversion_equivariance_under_permutation(rng):
    gamma = random_variogram(rng, 6)
    perm = rng.permutation(6)
    theta = gamma_to_theta(gamma)
    rel = np.abs(
        gamma_to_theta(gamma[np.ix_(perm, perm)]) - theta[np.ix_(perm, perm)]
    ).max() / np.abs(theta).max()
    assert rel < 1e-10
    blocks = cm_inverse_blocks(gamma)
    blocks_p = cm_inverse_blocks(gamma[np.ix_(perm, perm)])
    assert np.abs(blocks_p.r - blocks.r[perm]).max() < 1e-10
    assert abs(blocks_p.r_squared - blocks.r_squared) < 1e-10
    assert np.abs(gamma_to_sigma(gamma) @ np.ones(6)).max() < 1e-12


def test_validity_predicates(rng):
    gamma = random_variogram(rng, 5)
    assert is_valid_variogram(gamma)
    assert is_valid_precision(gamma_to_theta(gamma))
    bad = gamma.copy()
    bad[0, 1] = bad[1, 0] = -0.5
    assert not is_valid_variogram(bad)
    assert not is_valid_precision(np.eye(5))
    assert not is_valid_variogram(gamma[:1, :1])


def test_sigma_to_theta_rejects_wrong_rank():
    with pytest.raises(ParameterError):
        sigma_to_theta(np.zeros((3, 3)))
    with pytest.raises(ParameterError, match="row"):
        sigma_to_theta(np.eye(3))


def test_project_variogram_idempotent(rng):
    gamma = random_variogram(rng, 6)
    assert np.abs(project_variogram(gamma) - gamma).max() < 1e-10


def test_project_variogram_repairs_indefinite(rng):
    gamma = random_variogram(rng, 5)
    noisy = gamma + 0.8 * random_variogram(rng, 5) - 0.8 * random_variogram(rng, 5)
    noisy = 0.5 * (noisy + noisy.T)
    np.fill_diagonal(noisy, 0.0)
    if is_valid_variogram(noisy):
        noisy[0, 1] = noisy[1, 0] = -1.0
    fixed = project_variogram(noisy)
    assert is_valid_variogram(fixed, tol=1e-10)
