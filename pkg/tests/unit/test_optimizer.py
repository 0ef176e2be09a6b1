import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from semihilbert_radius.config import OptConfig
from semihilbert_radius.errors import DimensionMismatch, InvalidParams
from semihilbert_radius.estimates import Direction, Method
from semihilbert_radius.harness.ensembles import gaussian
from semihilbert_radius.optimizer import (
    ModulusObjective, QuadraticFormObjective, SumObjective, brute_force_extremum, polish,
    random_unit_vectors, sampled_maximum, sampled_minimum, sphere_maximize, sphere_minimize,
    tangent_gradient,
)

JORDAN = np.array([[0.0, 1.0], [0.0, 0.0]])


def random_hermitian(rng, dim):
    X = gaussian(rng, dim, dim)
    return X + np.conj(X.T)


def test_quadratic_form_maximum(small_opt):
    est = sphere_maximize(QuadraticFormObjective.gram([np.diag([3.0, 1.0])]), small_opt)

    assert est.method == Method.SPHERE_OPT
    assert est.direction == Direction.LOWER_BOUND
    assert_allclose(est.value, 9.0, rtol=1e-10)
    assert_allclose(abs(est.certificate[0]), 1.0, rtol=1e-5)


def test_quadratic_form_minimum(small_opt):
    est = sphere_minimize(QuadraticFormObjective.gram([np.diag([3.0, 1.0])]), small_opt)

    assert est.direction == Direction.UPPER_BOUND
    assert_allclose(est.value, 1.0, rtol=1e-10)


def test_modulus_objective_jordan_block(small_opt):
    assert_allclose(sphere_maximize(ModulusObjective(JORDAN), small_opt).value, 0.25, rtol=1e-8)


def test_modulus_objective_cancellation(small_opt):
    est = sphere_minimize(ModulusObjective(np.diag([1.0, -1.0])), small_opt)

    assert est.value <= 1e-12


def test_constant_objective(small_opt):
    est = sphere_maximize(QuadraticFormObjective(np.eye(3)), small_opt)

    assert_allclose(est.value, 1.0)
    assert_allclose(np.linalg.norm(est.certificate), 1.0)


def test_random_psd_form_matches_eigensolver(rng):
    B = gaussian(rng, 5, 5)
    G = np.conj(B.T) @ B
    cfg = OptConfig(starts=16, max_iter=3000, seed=11)
    w = np.linalg.eigvalsh(G)

    assert_allclose(sphere_minimize(QuadraticFormObjective(G), cfg).value, w[0], atol=1e-8 * w[-1])
    assert sphere_maximize(QuadraticFormObjective(G), cfg).value <= w[-1] * (1.0 + 1e-12)


@settings(max_examples=20, deadline=None, derandomize=True)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(2, 5), count=st.integers(1, 3))
def test_wirtinger_gradients_match_finite_differences(seed, dim, count):
    rng = np.random.default_rng(seed)
    mats = np.stack([gaussian(rng, dim, dim) for _ in range(count)])
    objectives = [ModulusObjective(mats), QuadraticFormObjective.gram(mats),
                  SumObjective([ModulusObjective(mats), QuadraticFormObjective.gram(mats)], [0.3, 0.7])]
    y = random_unit_vectors(rng, 1, dim)[0]
    h = 1e-6

    for obj in objectives:
        g = obj.wirtinger_grad(y)[0]
        for v in random_unit_vectors(rng, 8, dim):
            numeric = (obj(y + h * v) - obj(y - h * v)) / (2.0 * h)
            analytic = 2.0 * np.real(np.vdot(g, v))
            assert abs(numeric - analytic) <= 1e-5 * (1.0 + abs(analytic))


def test_tangent_gradient_is_tangent(rng):
    obj = ModulusObjective(np.stack([gaussian(rng, 4, 4) for _ in range(2)]))
    Y = random_unit_vectors(rng, 5, 4)

    G = tangent_gradient(obj, Y)

    assert_allclose(np.real(np.einsum('bi,bi->b', np.conj(Y), G)), 0.0, atol=1e-12)


def test_brute_force_trivial_objectives():
    lo, hi = brute_force_extremum(QuadraticFormObjective(2.0 * np.eye(3)), 500, seed=1)
    assert_allclose((lo, hi), (2.0, 2.0))

    lo, hi = brute_force_extremum(QuadraticFormObjective(np.eye(4)), 500, seed=1)
    assert_allclose((lo, hi), (1.0, 1.0))


def test_brute_force_is_deterministic_and_interior(rng):
    obj = ModulusObjective(np.stack([gaussian(rng, 3, 3) for _ in range(2)]))
    cfg = OptConfig(starts=4, max_iter=200, seed=5, brute_force_samples=2000)

    lo, hi = brute_force_extremum(obj, 2000, seed=cfg.seed + 7919)

    assert (lo, hi) == brute_force_extremum(obj, 2000, seed=cfg.seed + 7919)
    assert hi <= sphere_maximize(obj, cfg).value + 1e-12
    assert lo >= sphere_minimize(obj, cfg).value - 1e-12


def test_brute_force_returns_vectors(rng):
    obj = QuadraticFormObjective(random_hermitian(rng, 3))

    lo, hi, y_lo, y_hi = brute_force_extremum(obj, 100, seed=2, return_vectors=True)

    assert_allclose(obj(y_lo), lo)
    assert_allclose(obj(y_hi), hi)


def test_brute_force_needs_samples():
    with pytest.raises(InvalidParams):
        brute_force_extremum(QuadraticFormObjective(np.eye(2)), 0, seed=0)


def test_optimizer_is_deterministic(rng, small_opt):
    obj = ModulusObjective(np.stack([gaussian(rng, 4, 4) for _ in range(2)]))

    first = sphere_maximize(obj, small_opt)
    second = sphere_maximize(obj, small_opt)

    assert first.value == second.value
    assert_allclose(first.certificate, second.certificate)


def test_seed_vectors_must_match_dimension(small_opt):
    with pytest.raises(DimensionMismatch):
        sphere_maximize(QuadraticFormObjective(np.eye(3)), small_opt, seeds=np.ones((1, 2)))


@pytest.mark.parametrize('overrides', [{'starts': 0}, {'backtrack_factor': 1.0}, {'max_iter': 0}])
def test_invalid_budget(overrides):
    with pytest.raises(InvalidParams):
        OptConfig(**overrides)


def test_jordan_block_at_default_budget():
    assert_allclose(sphere_maximize(ModulusObjective(JORDAN), OptConfig()).value, 0.25, rtol=1e-10)


def test_cancellation_at_default_budget():
    assert sphere_minimize(ModulusObjective(np.diag([1.0, -1.0])), OptConfig()).value <= 1e-12


def test_minimizer_beats_dense_sampling():
    obj = ModulusObjective(np.diag([1.0, -1.0]))

    lo, _ = brute_force_extremum(obj, 200_000, seed=17)

    assert lo >= sphere_minimize(obj, OptConfig()).value - 1e-12


def test_long_ascent_keeps_accepting_steps():
    # a small spectral gap needs many accepted steps in a row
    obj = QuadraticFormObjective(np.diag([1.0, 1.001, 0.5]))
    start = np.array([1.0, 1e-3, 0.2])

    y, value = polish(obj, start, OptConfig())

    assert value >= 1.001 - 1e-12
    assert_allclose(abs(y[1]), 1.0, atol=1e-5)


def test_sampled_estimates_report_sampling(rng):
    obj = ModulusObjective(np.stack([gaussian(rng, 3, 3) for _ in range(2)]))

    hi = sampled_maximum(obj, 5000, seed=4)
    lo = sampled_minimum(obj, 5000, seed=4)

    assert hi.method == lo.method == Method.SAMPLING
    assert hi.direction == Direction.LOWER_BOUND
    assert lo.direction == Direction.UPPER_BOUND
    assert (lo.value, hi.value) == brute_force_extremum(obj, 5000, seed=4)
    assert_allclose(obj(hi.certificate), hi.value)
