import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import sqrtm

from semihilbert_radius.config import OptConfig
from semihilbert_radius.errors import InvalidParams, NotABounded, ZeroWeight
from semihilbert_radius.estimates import Direction, Method
from semihilbert_radius.radii import (
    SeminormParams, a_numrad, a_op_seminorm, alpha_beta_seminorm, alpha_seminorm, euclid_radius,
    joint_crawford, joint_min_modulus, joint_op_norm, pull_back, seminorm_at,
)
from semihilbert_radius.semihilbert import OpTuple, a_norm, build_space, cartesian_a, lift_op

JORDAN = np.array([[0.0, 1.0], [0.0, 0.0]])


def test_op_seminorm_identity_weight(make_matrix):
    T = make_matrix(4)

    est = a_op_seminorm(build_space(np.eye(4)), T)

    assert est.direction == Direction.EXACT
    assert_allclose(est.value, np.linalg.norm(T, 2), rtol=1e-10)


def test_op_seminorm_of_identity(singular_space):
    assert_allclose(a_op_seminorm(singular_space, np.eye(singular_space.dim)).value, 1.0, rtol=1e-10)


def test_op_seminorm_invertible_weight(invertible_space, make_matrix):
    T = make_matrix(invertible_space.dim)
    root = sqrtm(invertible_space.A)
    expected = np.linalg.norm(root @ T @ np.linalg.inv(root), 2)

    assert_allclose(a_op_seminorm(invertible_space, T).value, expected, rtol=1e-7)


def test_certificate_pulls_back_to_a_unit_vector(singular_space, make_op):
    T = make_op(singular_space)

    est = a_op_seminorm(singular_space, T)
    x = pull_back(singular_space, est.certificate)

    assert_allclose(a_norm(singular_space, x), 1.0, rtol=1e-8)
    assert_allclose(a_norm(singular_space, T @ x), est.value, rtol=1e-7)


def test_unbounded_operator_rejected():
    space = build_space(np.diag([1.0, 0.0]))

    with pytest.raises(NotABounded):
        a_op_seminorm(space, JORDAN)


def test_numrad_jordan_block():
    est = a_numrad(build_space(np.eye(2)), JORDAN)

    assert est.method == Method.THETA_SWEEP
    assert_allclose(est.value, 0.5, rtol=1e-12)


def test_numrad_bounds(singular_space, make_op):
    T = make_op(singular_space)
    norm = a_op_seminorm(singular_space, T).value

    value = a_numrad(singular_space, T).value

    assert norm / 2.0 - 1e-9 <= value <= norm + 1e-9


def test_numrad_of_selfadjoint_part_is_its_norm(singular_space, make_op):
    R, _ = cartesian_a(singular_space, make_op(singular_space))

    assert_allclose(a_numrad(singular_space, R).value, a_op_seminorm(singular_space, R).value, rtol=1e-7)


def test_numrad_nilpotent_reduction(singular_space):
    Q = singular_space.range_basis
    N = 2.0 * Q[:, :1] @ np.conj(Q[:, 1:].T)
    T = lift_op(singular_space, N)

    assert_allclose(a_numrad(singular_space, T).value, a_op_seminorm(singular_space, T).value / 2.0, rtol=1e-7)


def test_zero_weight_gives_zero_supremum():
    space = build_space(np.zeros((3, 3)))

    assert a_op_seminorm(space, np.eye(3)).value == 0.0
    assert euclid_radius(space, OpTuple.of(np.eye(3), np.eye(3))).value == 0.0
    with pytest.raises(ZeroWeight):
        joint_crawford(space, OpTuple.of(np.eye(3)))
    with pytest.raises(ZeroWeight):
        joint_min_modulus(space, OpTuple.of(np.eye(3)))


def test_joint_norm_of_identities(singular_space):
    identity = np.eye(singular_space.dim)

    assert_allclose(joint_op_norm(singular_space, OpTuple.of(identity, identity)).value, np.sqrt(2.0))


def test_joint_norm_single_member(singular_space, make_op):
    T = make_op(singular_space)

    assert_allclose(joint_op_norm(singular_space, T).value, a_op_seminorm(singular_space, T).value, rtol=1e-10)


def test_joint_norm_sphere_method(singular_space, make_op, small_opt):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))
    exact = joint_op_norm(singular_space, T).value

    est = joint_op_norm(singular_space, T, method='sphere', opt=small_opt)

    assert est.direction == Direction.LOWER_BOUND
    assert est.value <= exact * (1.0 + 1e-12)
    assert_allclose(est.value, exact, rtol=1e-6)


def test_joint_norm_unknown_method(singular_space):
    with pytest.raises(InvalidParams):
        joint_op_norm(singular_space, np.eye(singular_space.dim), method='power')


def test_euclid_radius_of_identities(singular_space, small_opt):
    identity = np.eye(singular_space.dim)

    est = euclid_radius(singular_space, OpTuple.of(identity, identity, identity), small_opt)

    assert_allclose(est.value, np.sqrt(3.0), rtol=1e-10)


def test_euclid_radius_single_member_is_numrad(singular_space, make_op):
    T = make_op(singular_space)

    assert_allclose(euclid_radius(singular_space, OpTuple.of(T)).value, a_numrad(singular_space, T).value)


def test_euclid_radius_between_norm_bounds(invertible_space, make_op, small_opt):
    T = OpTuple.of(make_op(invertible_space), make_op(invertible_space))
    norm = joint_op_norm(invertible_space, T).value

    value = euclid_radius(invertible_space, T, small_opt).value

    assert norm / (2.0 * np.sqrt(2.0)) <= value <= norm * (1.0 + 1e-9)


def test_crawford_examples(small_opt):
    space = build_space(np.eye(2))

    assert_allclose(joint_crawford(space, OpTuple.of(np.eye(2)), small_opt).value, 1.0, rtol=1e-10)
    assert joint_crawford(space, OpTuple.of(np.diag([1.0, -1.0])), small_opt).value <= 1e-6


def test_crawford_upper_bound_direction(singular_space, make_op, small_opt):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))

    est = joint_crawford(singular_space, T, small_opt)

    assert est.direction == Direction.UPPER_BOUND
    assert est.value <= joint_op_norm(singular_space, T).value * (1.0 + 1e-9)


def test_min_modulus_examples():
    space = build_space(np.eye(2))

    assert_allclose(joint_min_modulus(space, OpTuple.of(np.eye(2))).value, 1.0)
    assert_allclose(joint_min_modulus(space, OpTuple.of(np.diag([1.0, 0.0]))).value, 0.0, atol=1e-12)


def test_seminorm_params_validation():
    with pytest.raises(InvalidParams):
        SeminormParams(0.0, 0.0)
    with pytest.raises(InvalidParams):
        SeminormParams(-1.0, 1.0)
    with pytest.raises(InvalidParams):
        SeminormParams(1.0, float('inf'))


def test_alpha_beta_limits_dispatch(singular_space, make_op, small_opt):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))

    norm = alpha_beta_seminorm(singular_space, T, SeminormParams(0.0, 1.0), small_opt)
    radius = alpha_beta_seminorm(singular_space, T, SeminormParams(1.0, 0.0), small_opt)

    assert_allclose(norm.value, joint_op_norm(singular_space, T).value)
    assert_allclose(radius.value, euclid_radius(singular_space, T, small_opt).value)


def test_alpha_beta_general_optimizer_at_zero_alpha(singular_space, make_op, small_opt):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))

    est = alpha_beta_seminorm(singular_space, T, SeminormParams(0.0, 1.0), small_opt, dispatch=False)

    assert_allclose(est.value, joint_op_norm(singular_space, T).value, rtol=1e-6)


def test_alpha_beta_equivalence_bounds(invertible_space, make_op, small_opt):
    T = OpTuple.of(make_op(invertible_space), make_op(invertible_space))
    params = SeminormParams(0.5, 2.0)
    norm = joint_op_norm(invertible_space, T).value
    radius = euclid_radius(invertible_space, T, small_opt).value

    est = alpha_beta_seminorm(invertible_space, T, params, small_opt)

    assert est.direction == Direction.LOWER_BOUND
    assert np.sqrt(params.alpha) * radius <= est.value * (1.0 + 1e-6)
    assert np.sqrt(params.beta) * norm <= est.value * (1.0 + 1e-6)
    assert est.value <= np.sqrt(params.total) * norm * (1.0 + 1e-9)


def test_alpha_beta_value_read_at_certificate(singular_space, make_op, small_opt):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))
    params = SeminormParams(1.0, 0.25)

    est = alpha_beta_seminorm(singular_space, T, params, small_opt)

    assert_allclose(seminorm_at(singular_space, T, params, est.certificate), est.value, rtol=1e-10)


def test_alpha_beta_constant_tuple(singular_space, make_op, small_opt):
    S = make_op(singular_space)
    params = SeminormParams(0.3, 0.7)

    single = alpha_beta_seminorm(singular_space, OpTuple.of(S), params, small_opt).value
    constant = alpha_beta_seminorm(singular_space, OpTuple.constant(S, 3), params, small_opt).value

    assert_allclose(constant, np.sqrt(3.0) * single, rtol=1e-6)


def test_alpha_seminorm(singular_space, make_op, small_opt):
    T = make_op(singular_space)

    value = alpha_seminorm(singular_space, T, 1.0, small_opt).value

    assert_allclose(value, a_numrad(singular_space, T).value)
    with pytest.raises(InvalidParams):
        alpha_seminorm(singular_space, T, 1.5)


def test_rank_one_diagonal_weight():
    space = build_space(np.diag([4.0, 0.0]))
    T = np.diag([3.0, 1.0])

    assert_allclose(a_op_seminorm(space, T).value, 3.0, rtol=1e-12)
    assert_allclose(a_numrad(space, T).value, 3.0, rtol=1e-12)
    assert_allclose(joint_op_norm(space, OpTuple.of(T, T)).value, 3.0 * np.sqrt(2.0), rtol=1e-12)
    assert_allclose(euclid_radius(space, OpTuple.of(T, 2.0 * T)).value, np.sqrt(45.0), rtol=1e-10)
    assert_allclose(joint_crawford(space, OpTuple.of(T, 2.0 * T)).value, np.sqrt(45.0), rtol=1e-10)
    assert_allclose(joint_min_modulus(space, OpTuple.of(T, 2.0 * T)).value, np.sqrt(45.0), rtol=1e-12)


def test_rank_one_random_weight(rank_one_space, make_op, small_opt):
    T = OpTuple.of(make_op(rank_one_space), make_op(rank_one_space))
    norm = a_op_seminorm(rank_one_space, T[0]).value

    # range(A) is a line: every A-unit vector gives the same values
    assert_allclose(a_numrad(rank_one_space, T[0]).value, norm, rtol=1e-10)
    assert_allclose(euclid_radius(rank_one_space, T, small_opt).value,
                    joint_op_norm(rank_one_space, T).value, rtol=1e-10)
    assert_allclose(joint_crawford(rank_one_space, T, small_opt).value,
                    joint_min_modulus(rank_one_space, T).value, rtol=1e-10)


def test_crawford_cancellation_at_default_budget():
    space = build_space(np.eye(2))

    assert joint_crawford(space, OpTuple.of(np.diag([1.0, -1.0])), OptConfig()).value <= 1e-6


def test_joint_norm_sampling_method(singular_space, make_op):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))
    exact = joint_op_norm(singular_space, T).value

    est = joint_op_norm(singular_space, T, method='sampling', opt=OptConfig(brute_force_samples=20_000, seed=8))

    assert est.method == Method.SAMPLING
    assert est.direction == Direction.LOWER_BOUND
    assert est.value <= exact * (1.0 + 1e-12)
    assert est.value >= 0.9 * exact
    x = pull_back(singular_space, est.certificate)
    assert_allclose(a_norm(singular_space, x), 1.0, rtol=1e-10)
