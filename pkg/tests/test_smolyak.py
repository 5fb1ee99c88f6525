import numpy as np
import pytest

from mixholder.dyadic import cell_centers, estimate_mixed_holder_constant
from mixholder.embedding import embed_dot, enumerate_triples
from mixholder.exceptions import GuardError
from mixholder.smolyak import (CenterSamplePlan, best_linear_weights, binomial_identity,
                               phi_prime, smolyak_evaluate)
from mixholder.testfn import fbm_product

smooth = lambda X: np.sin(3 * X[:, 0]) * np.cos(2 * X[:, 1])


def sup_error(f, d, m, n=20_000):
    plan = CenterSamplePlan.build(d, m).fill(f)
    T = np.random.default_rng(0).random((n, d))
    return float(np.abs(smolyak_evaluate(T, plan) - f(T)).max())


def test_plan_layout():
    plan = CenterSamplePlan.build(2, 3)
    assert len(plan) == sum((1 << t) * (t + 1) for t in range(4))
    assert not plan.filled
    with pytest.raises(ValueError, match="not filled"):
        plan.get((1, 2))
    with pytest.raises(KeyError):
        plan.get((4, 0))
    plan.fill(smooth)
    assert plan.filled
    assert plan.get((1, 0)).shape == (2, 1)
    assert plan.get((1, 0))[1, 0] == pytest.approx(np.sin(2.25) * np.cos(1.0))


@pytest.mark.parametrize("c", [0.0, -2.5, 7.0])
@pytest.mark.parametrize("d,m", [(1, 3), (2, 4), (3, 3), (4, 2)])
def test_constant_reproduced(c, d, m):
    plan = CenterSamplePlan.build(d, m).fill(lambda X: np.full(len(X), c))
    X = np.random.default_rng(0).random((50, d))
    assert np.allclose(smolyak_evaluate(X, plan), c, atol=1e-12)
    assert smolyak_evaluate(X[0], plan) == pytest.approx(c, abs=1e-12)


def test_one_dimension_is_center_value():
    f = lambda X: X[:, 0] ** 2
    plan = CenterSamplePlan.build(1, 4).fill(f)
    x = np.array([[0.3], [1.0]])
    assert np.allclose(smolyak_evaluate(x, plan), [(4.5 / 16) ** 2, (15.5 / 16) ** 2])


def test_coarser_scale_and_range_checks():
    plan = CenterSamplePlan.build(2, 3).fill(smooth)
    x = np.array([0.2, 0.7])
    assert smolyak_evaluate(x, plan, 2) == pytest.approx(
        smolyak_evaluate(x, CenterSamplePlan.build(2, 2).fill(smooth)))
    with pytest.raises(KeyError):
        smolyak_evaluate(x, plan, 4)


def test_smooth_error_rate():
    ms = np.arange(3, 9)
    errs = [sup_error(smooth, 2, m) for m in ms]
    slope = np.polyfit(ms, np.log2(np.array(errs) / ms), 1)[0]
    assert -1.25 <= slope <= -0.8


def test_fbm_error_rate():
    ms = np.arange(4, 11)
    slopes = []
    for seed in range(4):
        errs = [sup_error(fbm_product(2, 0.8, seed=seed), 2, m) for m in ms]
        slopes.append(np.polyfit(ms, np.log2(np.array(errs) / ms), 1)[0])
    # at least the Hölder rate 0.79, minus sampling slack
    assert -1.1 <= np.median(slopes) <= -0.64


def test_binomial_identity():
    for d in range(1, 9):
        for m in range(1, 31):
            assert binomial_identity(d, m) == 1
    with pytest.raises(ValueError):
        binomial_identity(3, 0)


def test_phi_prime_constant_gives_ones():
    plan = CenterSamplePlan.build(3, 3).fill(lambda X: np.ones(len(X)))
    phi = phi_prime(plan)
    assert len(phi) == len(phi.vector) == 80
    assert np.allclose(phi.evaluate(np.random.default_rng(0).random((20, 3))), 1.0)


def test_phi_prime_one_dimension():
    f = lambda X: X[:, 0]
    plan = CenterSamplePlan.build(1, 3).fill(f)
    assert np.allclose(phi_prime(plan).vector, (np.arange(8) + 0.5) / 8)


@pytest.mark.parametrize("d,m", [(2, 3), (3, 2), (2, 6)])
def test_phi_prime_matches_smolyak_on_cells(d, m):
    plan = CenterSamplePlan.build(d, m).fill(smooth if d == 2 else lambda X: X.prod(1))
    C = cell_centers(d, m)
    assert np.allclose(phi_prime(plan).evaluate(C), smolyak_evaluate(C, plan), atol=1e-13)


@pytest.mark.parametrize("d,m", [(2, 1), (2, 4), (3, 3), (4, 2)])
def test_best_linear_weights_reproduce_smolyak(d, m):
    f = fbm_product(d, 0.8, levels=8, seed=d + m)
    plan = CenterSamplePlan.build(d, m).fill(f)
    w = best_linear_weights(None, d, m, plan)
    C = cell_centers(d, m)
    assert np.abs(embed_dot(C, w, enumerate_triples(d, m)) - smolyak_evaluate(C, plan)).max() <= 1e-12


def test_best_linear_weights_constant():
    w = best_linear_weights(lambda X: np.full(len(X), 2.0), 2, 3)
    assert np.allclose(w[:8], 2.0) and np.allclose(w[8:], 0.0, atol=1e-15)


def test_best_linear_weights_guard_and_inputs():
    with pytest.raises(GuardError):
        best_linear_weights(smooth, 5, 5)
    with pytest.raises(ValueError):
        best_linear_weights(None, 2, 2)


def test_fbm_bound_d3():
    d, m = 3, 4
    f = fbm_product(d, 0.8, seed=1)
    c = estimate_mixed_holder_constant(f, d, 0.79, trials=5000, seed=1)
    w = best_linear_weights(f, d, m)
    C = cell_centers(d, m)
    err = np.abs(embed_dot(C, w, enumerate_triples(d, m)) - f(C)).max()
    assert err <= 5 * c * 2.0 ** (-0.79 * m) * m ** (d - 1)
