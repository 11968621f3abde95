import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pureic.product4 import (
    OMEGA0,
    BlochPair,
    CollisionNotFound,
    bloch_eigvecs,
    bloch_projection,
    find_entangled_collision,
    h_fast,
    h_functionals,
    h_literal,
    max_entangled_state,
    product_basis,
    product_bases,
    rotation_of_unitary,
    sigma_operators,
    su2_of_quaternion,
    verify_fast_path,
)
from pureic.qlinalg import PAULIS, SIGMA_X, SIGMA_Y, SIGMA_Z, dot_sigma, operator_system_equal, projections_of


def unit(rng, k):
    v = rng.standard_normal((k, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_pairs(rng):
    d = unit(rng, 8)
    return [BlochPair(d[2 * j], d[2 * j + 1]) for j in range(4)]


def random_su2(rng):
    return su2_of_quaternion(rng.standard_normal(4))


def test_bloch_projection_examples():
    np.testing.assert_allclose(bloch_projection([0, 0, 1]), np.diag([1, 0]))
    np.testing.assert_allclose(bloch_projection([1, 0, 0]), np.full((2, 2), 0.5))


@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
@settings(max_examples=100, deadline=None)
def test_bloch_eigvecs_property(v):
    n = np.asarray(v)
    if np.linalg.norm(n) < 1e-3:
        return
    n = n / np.linalg.norm(n)
    plus, minus = bloch_eigvecs(n)
    S = dot_sigma(n)
    np.testing.assert_allclose(S @ plus, plus, atol=1e-12)
    np.testing.assert_allclose(S @ minus, -minus, atol=1e-12)
    assert abs(np.vdot(plus, minus)) < 1e-12


def test_bloch_eigvecs_south_pole():
    plus, minus = bloch_eigvecs([0, 0, -1])
    np.testing.assert_allclose(np.abs(plus), [0, 1])
    np.testing.assert_allclose(np.abs(minus), [1, 0])


def test_product_basis_standard():
    B = product_basis(BlochPair([0, 0, 1], [0, 0, 1]))
    np.testing.assert_allclose(np.abs(B.vectors), np.eye(4), atol=1e-15)


def test_product_basis_span(rng):
    pair = random_pairs(rng)[0]
    B = product_basis(pair)
    assert B.orthonormality_error() < 1e-12
    gens = np.stack(sigma_operators(pair))
    assert operator_system_equal(projections_of([B]).flat(), gens)


def test_product_bases_requires_four(rng):
    with pytest.raises(ValueError):
        product_bases(random_pairs(rng)[:3])
    assert len(product_bases(random_pairs(rng))) == 4


def test_max_entangled_examples():
    np.testing.assert_allclose(max_entangled_state(np.eye(2)), OMEGA0)
    np.testing.assert_allclose(max_entangled_state(SIGMA_X), np.array([0, 1, 1, 0]) / np.sqrt(2))
    with pytest.raises(ValueError):
        max_entangled_state(np.diag([1, 2]))


def test_marginals_are_maximally_mixed(rng):
    psi = max_entangled_state(random_su2(rng)).reshape(2, 2)
    np.testing.assert_allclose(psi @ psi.conj().T, np.eye(2) / 2, atol=1e-14)
    np.testing.assert_allclose(psi.T @ psi.conj(), np.eye(2) / 2, atol=1e-14)


def test_local_terms_vanish(rng):
    psi = max_entangled_state(random_su2(rng))
    for pair in random_pairs(rng):
        ms_i, i_ns, _ = sigma_operators(pair)
        assert abs(np.vdot(psi, ms_i @ psi)) < 1e-14
        assert abs(np.vdot(psi, i_ns @ psi)) < 1e-14


def test_rotation_examples():
    np.testing.assert_allclose(rotation_of_unitary(np.eye(2)), np.eye(3), atol=1e-15)
    t = 0.8
    Uz = np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)])
    c, s = np.cos(t), np.sin(t)
    np.testing.assert_allclose(rotation_of_unitary(Uz), [[c, s, 0], [-s, c, 0], [0, 0, 1]], atol=1e-14)
    with pytest.raises(ValueError):
        rotation_of_unitary(1j * np.eye(2))


def test_rotation_properties(rng):
    for _ in range(20):
        U, V = random_su2(rng), random_su2(rng)
        R = rotation_of_unitary(U)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-13)
        assert np.linalg.det(R) == pytest.approx(1)
        np.testing.assert_allclose(rotation_of_unitary(-U), R, atol=1e-14)
        np.testing.assert_allclose(rotation_of_unitary(U @ V), rotation_of_unitary(V) @ R, atol=1e-13)
        x = rng.standard_normal(3)
        np.testing.assert_allclose(U.conj().T @ dot_sigma(x) @ U, dot_sigma(R @ x), atol=1e-13)


def test_su2_of_quaternion(rng):
    U = random_su2(rng)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(2), atol=1e-14)
    assert np.linalg.det(U) == pytest.approx(1)
    q1, q2 = rng.standard_normal(4), rng.standard_normal(4)
    q1, q2 = q1 / np.linalg.norm(q1), q2 / np.linalg.norm(q2)
    a, b = max_entangled_state(su2_of_quaternion(q1)), max_entangled_state(su2_of_quaternion(q2))
    assert abs(np.vdot(a, b)) == pytest.approx(abs(q1 @ q2), abs=1e-13)


def test_h_identity_example():
    pairs = [BlochPair([0, 0, 1], [0, 0, 1])] * 4
    np.testing.assert_allclose(h_literal(pairs, np.eye(3)), 1)
    np.testing.assert_allclose(h_fast(pairs, np.eye(3)), 1)
    yy = [BlochPair([0, 1, 0], [0, 1, 0])] * 4
    np.testing.assert_allclose(h_literal(yy, np.eye(3)), -1)


def test_h_fast_matches_literal(rng):
    for _ in range(50):
        pairs, A = random_pairs(rng), rng.standard_normal((3, 3))
        np.testing.assert_allclose(h_fast(pairs, A), h_literal(pairs, A), atol=1e-12)
    assert verify_fast_path() < 1e-12
    pairs = random_pairs(rng)
    np.testing.assert_allclose(h_functionals(pairs, np.eye(3), fast=True), h_functionals(pairs, np.eye(3)))


def test_statistics_are_determined_by_h(rng):
    # Each outcome probability is (1 + s t h_j(R_U)) / 4.
    pairs, U = random_pairs(rng), random_su2(rng)
    psi = max_entangled_state(U)
    h = h_fast(pairs, rotation_of_unitary(U))
    for j, B in enumerate(product_bases(pairs)):
        probs = np.abs(B.vectors.conj() @ psi) ** 2
        signs = np.array([1, -1, -1, 1])
        np.testing.assert_allclose(probs, (1 + signs * h[j]) / 4, atol=1e-13)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_collision_found(seed):
    rng = np.random.default_rng(seed)
    pairs = random_pairs(rng)
    res = find_entangled_collision(pairs, seed=seed)
    assert res.f_residual < 1e-9
    assert res.probability_gap < 1e-8
    assert res.state_overlap <= 1 - 1e-3
    bases = product_bases(pairs)
    for b, p in zip(bases, res.probabilities1):
        np.testing.assert_allclose(p, np.abs(b.vectors.conj() @ res.omega1) ** 2, atol=1e-14)
    np.testing.assert_allclose(res.R1 @ res.R1.T, np.eye(3), atol=1e-12)


def test_collision_identical_pairs():
    pairs = [BlochPair([0, 0, 1], [1, 0, 0])] * 4
    res = find_entangled_collision(pairs, seed=0)
    assert res.probability_gap < 1e-8 and res.state_overlap <= 1 - 1e-3


def test_collision_deterministic(rng):
    pairs = random_pairs(rng)
    a = find_entangled_collision(pairs, seed=5)
    b = find_entangled_collision(pairs, seed=5)
    np.testing.assert_array_equal(a.omega1, b.omega1)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())


def test_collision_failure_reported(rng):
    # An impossible separation forces every restart to fail.
    with pytest.raises(CollisionNotFound):
        find_entangled_collision(random_pairs(rng), restarts=2, separation=0.6)
    with pytest.raises(ValueError):
        find_entangled_collision(random_pairs(rng), separation=0)


def test_pauli_constants():
    np.testing.assert_array_equal(PAULIS, np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z]))
