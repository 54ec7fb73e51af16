import numpy as np
import pytest
from scipy.linalg import expm

from src.base.exceptions import RegistrationError
from src.model.assignment import NodeMapping
from src.model.registration import (
    RigidTransform,
    fit_rigid,
    project,
    registration_residual,
)

QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


def random_rotation(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def identity_mapping(n):
    return NodeMapping(pairs=tuple((i, i) for i in range(n)), total_cost=0.0)


def objective(P, Q, xform):
    return float(np.sum((project(P, xform) - Q) ** 2))


def test_project_identity_is_noop(rng):
    points = rng.random((5, 3))

    np.testing.assert_array_equal(project(points, RigidTransform.identity(3)), points)


def test_project_translates_then_rotates():
    xform = RigidTransform(rotation=QUARTER_TURN, translation=np.array([1.0, 0.0]))

    np.testing.assert_allclose(project(np.zeros((1, 2)), xform), [[0.0, 1.0]], atol=1e-15)


def test_project_dimension_mismatch():
    with pytest.raises(ValueError):
        project(np.zeros((2, 3)), RigidTransform.identity(2))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_noiseless_recovery(n, rng):
    for _ in range(50):
        R = random_rotation(n, rng)
        t = rng.normal(size=n)
        P = rng.normal(size=(20 + int(rng.integers(0, 10)), n))
        Q = (P + t) @ R.T

        xform = fit_rigid(P, Q, identity_mapping(len(P)))

        assert np.linalg.norm(xform.rotation - R) <= 1e-9
        assert np.linalg.norm(xform.translation - t) <= 1e-9
        assert xform.is_proper
        np.testing.assert_allclose(project(P, xform), Q, atol=1e-9)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_noisy_recovery_residual(n, rng):
    sigma = 0.01

    for _ in range(20):
        R = random_rotation(n, rng)
        t = rng.normal(size=n)
        P = rng.normal(size=(30, n))
        Q = (P + t) @ R.T + sigma * rng.standard_normal(P.shape)

        mapping = identity_mapping(len(P))
        xform = fit_rigid(P, Q, mapping)

        assert registration_residual(P, Q, mapping, xform) <= 3 * sigma


def test_translation_is_applied_before_rotation():
    P = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    t = np.array([1.0, 0.0])
    Q = (P + t) @ QUARTER_TURN.T

    xform = fit_rigid(P, Q, identity_mapping(3))

    np.testing.assert_allclose(xform.translation, t, atol=1e-12)
    assert not np.allclose(xform.translation, QUARTER_TURN @ t)
    np.testing.assert_allclose(project(P, xform), Q, atol=1e-12)
    assert xform.rotation_angle == pytest.approx(90.0)


def test_reflections_are_excluded(rng):
    P = rng.normal(size=(10, 2))
    Q = P * np.array([-1.0, 1.0])

    xform = fit_rigid(P, Q, identity_mapping(10))

    assert xform.is_proper


def test_degenerate_collinear_points_give_a_proper_rotation():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])

    xform = fit_rigid(P, P + 0.5, identity_mapping(3))

    assert xform.is_proper
    np.testing.assert_allclose(project(P, xform), P + 0.5, atol=1e-9)


def test_fit_is_a_local_minimum(rng):
    R = random_rotation(3, rng)
    P = rng.normal(size=(25, 3))
    Q = (P + rng.normal(size=3)) @ R.T + 0.05 * rng.standard_normal(P.shape)

    best = fit_rigid(P, Q, identity_mapping(25))
    best_value = objective(P, Q, best)

    for _ in range(200):
        skew = 1e-3 * rng.standard_normal((3, 3))
        perturbed = RigidTransform(
            rotation=best.rotation @ expm(skew - skew.T),
            translation=best.translation + 1e-3 * rng.standard_normal(3),
        )
        assert best_value <= objective(P, Q, perturbed)


def test_fit_uses_only_mapped_pairs():
    prev = np.array([[0.0, 0.0], [1.0, 0.0], [50.0, 50.0]])
    curr = np.array([[5.0, 5.0], [6.0, 5.0]])
    mapping = NodeMapping(pairs=((0, 0), (1, 1)), total_cost=0.0)

    xform = fit_rigid(prev, curr, mapping)

    np.testing.assert_allclose(xform.translation, [5.0, 5.0], atol=1e-12)


def test_fewer_than_two_pairs():
    with pytest.raises(RegistrationError):
        fit_rigid(np.zeros((1, 2)), np.ones((1, 2)), identity_mapping(1))


def test_transform_export():
    exported = RigidTransform.identity(3).to_dict()

    assert exported["rotation_angle"] is None
    np.testing.assert_array_equal(exported["translation"], np.zeros(3))
