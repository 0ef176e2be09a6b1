import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from semihilbert_radius.errors import DimensionMismatch, NotABounded, NotPSD
from semihilbert_radius.harness.ensembles import a_bounded_op, gaussian, random_weight
from semihilbert_radius.semihilbert import (
    OpTuple, a_adjoint, a_adjoint_tuple, a_inner, a_norm, build_space, cartesian_a, classify, compress_op,
    lift_op, random_a_unitary, reduce_op, require_a_bounded, tuple_predicates,
)

T22 = np.array([[1.0 + 2.0j, 3.0 - 1.0j], [0.5j, -2.0]])


def test_build_space_identity():
    space = build_space(np.eye(3))

    assert space.rank == 3
    assert_allclose(space.projP, np.eye(3), atol=1e-14)
    assert_allclose(space.sqrtA, np.eye(3), atol=1e-14)
    assert space.null_basis.shape == (3, 0)


def test_build_space_singular_diagonal():
    space = build_space(np.diag([4.0, 0.0]))

    assert space.rank == 1
    assert_allclose(space.sqrtA, np.diag([2.0, 0.0]), atol=1e-14)
    assert_allclose(space.projP, np.diag([1.0, 0.0]), atol=1e-14)
    assert space.range_basis.shape == (2, 1)


def test_build_space_rejects_indefinite_weight():
    with pytest.raises(NotPSD):
        build_space(np.diag([1.0, -1.0]))


def test_reduce_identity_weight():
    assert_allclose(reduce_op(build_space(np.eye(2)), T22), T22)


def test_reduce_and_adjoint_on_rank_one_weight():
    space = build_space(np.diag([1.0, 0.0]))

    assert_allclose(reduce_op(space, T22), [[T22[0, 0], 0.0], [0.0, 0.0]], atol=1e-14)
    assert_allclose(a_adjoint(space, T22), [[np.conj(T22[0, 0]), 0.0], [0.0, 0.0]], atol=1e-14)
    assert compress_op(space, T22).shape == (1, 1)


def test_adjoint_identity_weight_is_conjugate_transpose():
    assert_allclose(a_adjoint(build_space(np.eye(2)), T22), np.conj(T22.T))


@settings(max_examples=25, deadline=None, derandomize=True)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(2, 5), data=st.data())
def test_adjoint_defining_identity(seed, dim, data):
    rank = data.draw(st.integers(1, dim))
    rng = np.random.default_rng(seed)
    space = build_space(random_weight(rng, dim, rank))
    T = a_bounded_op(space, rng)
    x, y = gaussian(rng, 2, dim)
    scale = np.linalg.norm(space.A) * np.linalg.norm(T) * np.linalg.norm(x) * np.linalg.norm(y)

    lhs = a_inner(space, T @ x, y)
    rhs = a_inner(space, x, a_adjoint(space, T) @ y)

    assert abs(lhs - rhs) <= 1e-8 * scale


def test_double_adjoint_is_compression_to_range(singular_space, make_matrix):
    T = make_matrix(singular_space.dim)
    P = singular_space.projP

    twice = a_adjoint(singular_space, a_adjoint(singular_space, T))

    assert_allclose(twice, P @ T @ P, atol=1e-8 * np.linalg.norm(T))


def test_lift_then_reduce(singular_space, make_matrix):
    X = make_matrix(singular_space.dim)
    P = singular_space.projP

    assert_allclose(reduce_op(singular_space, lift_op(singular_space, X)), P @ X @ P,
                    atol=1e-8 * np.linalg.norm(X))


def test_inner_product_hermitian_symmetry(invertible_space, rng):
    x, y = gaussian(rng, 2, invertible_space.dim)

    assert_allclose(a_inner(invertible_space, x, y), np.conj(a_inner(invertible_space, y, x)))
    assert_allclose(a_norm(invertible_space, x) ** 2, a_inner(invertible_space, x, x).real)


def test_inner_product_rejects_wrong_length(invertible_space):
    with pytest.raises(DimensionMismatch):
        a_inner(invertible_space, np.ones(3), np.ones(4))


def test_classify_unitary_identity_weight(rng):
    Q, _ = np.linalg.qr(gaussian(rng, 3, 3))

    flags = classify(build_space(np.eye(3)), Q)

    assert flags.a_bounded and flags.in_B_A
    assert flags.a_isometry and flags.a_unitary


def test_classify_not_a_bounded():
    space = build_space(np.diag([1.0, 0.0]))
    T = np.array([[0.0, 1.0], [0.0, 0.0]])

    flags = classify(space, T)

    assert not flags.a_bounded
    assert not flags.in_B_A
    with pytest.raises(NotABounded):
        require_a_bounded(space, OpTuple.of(T))


def test_classify_a_selfadjoint_part(singular_space, make_op):
    re_part, _ = cartesian_a(singular_space, make_op(singular_space))

    flags = classify(singular_space, re_part)

    assert flags.a_selfadjoint
    assert flags.a_bounded == flags.in_B_A


def test_classify_a_positive(invertible_space, make_op):
    T = make_op(invertible_space)

    assert classify(invertible_space, a_adjoint(invertible_space, T) @ T).a_positive


def test_cartesian_parts_identity_weight(rng):
    X = gaussian(rng, 3, 3)
    H = X + np.conj(X.T)
    space = build_space(np.eye(3))

    re_h, im_h = cartesian_a(space, H)
    re_ih, im_ih = cartesian_a(space, 1j * H)

    assert_allclose(re_h, H)
    assert_allclose(im_h, 0.0, atol=1e-14)
    assert_allclose(re_ih, 0.0, atol=1e-14)
    assert_allclose(im_ih, H)


def test_identity_tuple_is_commuting_and_normal(singular_space):
    pred = tuple_predicates(singular_space, OpTuple.constant(np.eye(singular_space.dim), 3))

    assert pred.commuting
    assert pred.a_normal


def test_polynomial_tuple_commutes(make_matrix):
    M = make_matrix(4)
    T = OpTuple.of(M, M @ M, M @ M @ M)

    assert tuple_predicates(build_space(np.eye(4)), T).commuting


def test_random_tuple_does_not_commute(make_matrix):
    T = OpTuple.of(make_matrix(4), make_matrix(4))

    assert not tuple_predicates(build_space(np.eye(4)), T).commuting


def test_diagonalizable_normal_tuple(rng):
    Q, _ = np.linalg.qr(gaussian(rng, 4, 4))
    T = OpTuple.of(*(Q @ np.diag(gaussian(rng, 1, 4)[0]) @ np.conj(Q.T) for _ in range(3)))

    pred = tuple_predicates(build_space(np.eye(4)), T)

    assert pred.commuting
    assert pred.a_normal


def test_random_a_unitary(singular_space, rng):
    U = random_a_unitary(singular_space, rng)

    flags = classify(singular_space, U)
    residual = np.linalg.norm(a_adjoint(singular_space, U) @ U - singular_space.projP)

    assert flags.a_isometry and flags.a_unitary
    assert residual <= 1e-8


def test_tuple_shapes_must_agree():
    with pytest.raises(DimensionMismatch):
        OpTuple.of(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        OpTuple(())


def test_tuple_arithmetic(make_matrix):
    T = OpTuple.of(make_matrix(3), make_matrix(3))
    S = OpTuple.of(make_matrix(3), make_matrix(3))

    assert_allclose(T.product(S)[1], T[1] @ S[1])
    assert_allclose(T.add(S)[0], T[0] + S[0])
    assert_allclose(T.power(2)[0], T[0] @ T[0])
    assert_allclose(T.scale(2j)[1], 2j * T[1])
    assert T.stack().shape == (2, 3, 3)


def test_tuple_adjoint_is_memberwise(singular_space, make_op):
    T = OpTuple.of(make_op(singular_space), make_op(singular_space))

    sharp = a_adjoint_tuple(singular_space, T)

    assert sharp.n == 2
    for op, op_sharp in zip(T, sharp):
        assert_allclose(op_sharp, a_adjoint(singular_space, op))


def _scale(space, *ops):
    return 1e-8 * (1.0 + np.linalg.norm(space.A)) * np.prod([1.0 + np.linalg.norm(T) for T in ops])


@pytest.mark.parametrize('space_name', ['singular_space', 'rank_one_space', 'invertible_space'])
def test_reduction_is_multiplicative(space_name, make_op, request):
    space = request.getfixturevalue(space_name)
    T, S = make_op(space), make_op(space)

    assert_allclose(reduce_op(space, T @ S), reduce_op(space, T) @ reduce_op(space, S),
                    atol=_scale(space, T, S))


@pytest.mark.parametrize('space_name', ['singular_space', 'rank_one_space'])
def test_reduction_of_adjoint(space_name, make_matrix, request):
    space = request.getfixturevalue(space_name)
    T = make_matrix(space.dim)

    expected = np.conj(reduce_op(space, T).T) @ space.projP

    assert_allclose(reduce_op(space, a_adjoint(space, T)), expected, atol=_scale(space, T))


@pytest.mark.parametrize('space_name', ['singular_space', 'rank_one_space'])
def test_adjoint_reverses_products(space_name, make_op, request):
    space = request.getfixturevalue(space_name)
    T, S = make_op(space), make_op(space)

    assert_allclose(a_adjoint(space, T @ S), a_adjoint(space, S) @ a_adjoint(space, T),
                    atol=_scale(space, T, S))


@pytest.mark.parametrize('space_name', ['singular_space', 'rank_one_space'])
def test_triple_adjoint(space_name, make_matrix, request):
    space = request.getfixturevalue(space_name)
    T = make_matrix(space.dim)
    sharp = a_adjoint(space, T)

    assert_allclose(a_adjoint(space, a_adjoint(space, sharp)), sharp, atol=_scale(space, T))


@settings(max_examples=25, deadline=None, derandomize=True)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(2, 5), data=st.data())
def test_seminorm_of_image_through_reduction(seed, dim, data):
    rank = data.draw(st.integers(1, dim))
    rng = np.random.default_rng(seed)
    space = build_space(random_weight(rng, dim, rank))
    T = a_bounded_op(space, rng)
    x = gaussian(rng, 1, dim)[0]

    expected = np.linalg.norm(reduce_op(space, T) @ space.sqrtA @ x)

    assert abs(a_norm(space, T @ x) - expected) <= _scale(space, T) * (1.0 + np.linalg.norm(x))


def test_rank_one_space_fixture(rank_one_space):
    assert rank_one_space.rank == 1
    assert rank_one_space.range_basis.shape == (rank_one_space.dim, 1)
