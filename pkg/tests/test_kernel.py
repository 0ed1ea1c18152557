"""Kernel construction and count-propagation behavior.

The two limit cases (scales toward zero and toward infinity) pin the
propagation semantics: no transfer between distinct points, and full
transfer of everything except the point's own count.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from natafbeta.kernel import (
    DEFAULT_PRIOR_MEAN,
    LognormalFieldParams,
    as_scales,
    condition_lognormal_single,
    count_observations,
    cross_correlation,
    propagate_counts,
    rbf_correlation,
    unique_points,
)
from natafbeta.special import DomainError


class TestRbfCorrelation:
    def test_identical_points_give_one(self):
        r = rbf_correlation(np.array([[1.5, 2.0], [1.5, 2.0]]), [1.0, 1.0])
        assert r[0, 1] == 1.0 and r[1, 0] == 1.0

    def test_squared_distance_twice_scale(self):
        # 1-D, gap^2 = 2 l puts the exponent at exactly -1
        r = rbf_correlation(np.array([0.0, 2.0]), 2.0)
        assert_allclose(r[0, 1], math.exp(-1.0), rtol=1e-15)

    def test_anisotropic_hand_expansion(self):
        pts = np.array([[0.0, 0.0], [1.0, 2.0]])
        r = rbf_correlation(pts, [1.0, 4.0])
        assert_allclose(r[0, 1], math.exp(-0.5 * (1.0 + 1.0)), rtol=1e-15)

    def test_exact_symmetry_and_range(self):
        rng = np.random.default_rng(31)
        pts = rng.uniform(-3, 3, size=(20, 3))
        r = rbf_correlation(pts, rng.uniform(0.5, 4.0, size=3))
        assert np.array_equal(r, r.T)
        assert np.all(np.diag(r) == 1.0)
        assert np.all(r > 0) and np.all(r <= 1.0)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(DomainError):
            rbf_correlation(np.array([0.0, 1.0]), 0.0)
        with pytest.raises(DomainError):
            rbf_correlation(np.array([0.0, 1.0]), -2.0)


class TestCrossCorrelation:
    def test_equals_square_kernel_on_same_sets(self):
        rng = np.random.default_rng(37)
        pts = rng.uniform(0, 5, size=(8, 2))
        scales = [1.0, 3.0]
        assert_allclose(
            cross_correlation(pts, pts, scales), rbf_correlation(pts, scales), rtol=1e-15
        )

    def test_distant_pair_vanishes(self):
        k = cross_correlation(np.array([0.0]), np.array([1e6]), 1.0)
        assert k[0, 0] == 0.0

    def test_scalar_kernel_oracle(self):
        k = cross_correlation(np.array([0.0]), np.array([1.0, 2.0]), 2.0)
        assert_allclose(k[0], [math.exp(-0.25), math.exp(-1.0)], rtol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            cross_correlation(np.zeros((2, 2)), np.zeros((2, 3)), [1.0, 1.0])


class TestCountObservations:
    def test_three_at_one_point(self):
        x = np.array([[1.0], [1.0], [1.0]])
        a, b = count_observations((x, [1, 1, 1]), np.array([[1.0]]))
        assert list(a) == [3] and list(b) == [0]

    def test_empty_dataset(self):
        a, b = count_observations((np.empty((0, 1)), []), np.array([[0.0], [1.0]]))
        assert list(a) == [0, 0] and list(b) == [0, 0]

    def test_mixed_labels(self):
        x = np.array([[2.0], [2.0], [2.0]])
        a, b = count_observations((x, [1, 0, 1]), np.array([[2.0]]))
        assert (a[0], b[0]) == (2, 1)

    def test_totals_match_observation_count(self):
        rng = np.random.default_rng(41)
        query = rng.uniform(0, 1, size=(6, 2))
        rows = query[rng.integers(0, 6, size=30)]
        labels = rng.integers(0, 2, size=30)
        a, b = count_observations((rows, labels), query)
        assert a.sum() + b.sum() == 30

    def test_unmatched_observation_errors(self):
        with pytest.raises(DomainError, match="no matching query point"):
            count_observations((np.array([[3.0]]), [1]), np.array([[1.0]]))

    def test_accepts_dataset_object(self):
        from natafbeta.data import Dataset

        ds = Dataset(
            x=np.array([[1.0], [2.0]]),
            c=[1, 0],
            attribute_names=["x1"],
            class_names=["0", "1"],
        )
        a, b = count_observations(ds, np.array([[1.0], [2.0]]))
        assert list(a) == [1, 0] and list(b) == [0, 1]


class TestPropagateCounts:
    def test_zero_scale_limit_keeps_counts_local(self):
        rng = np.random.default_rng(43)
        for dim in (1, 3):
            pts = rng.uniform(0, 10, size=(7, dim))
            a_hat = rng.integers(0, 5, size=7).astype(float)
            b_hat = rng.integers(0, 5, size=7).astype(float)
            tiny = [1e-8] * dim
            cf = propagate_counts(a_hat, b_hat, pts, pts, tiny, tiny)
            assert_allclose(cf.a_post, a_hat + DEFAULT_PRIOR_MEAN, atol=1e-9)
            assert_allclose(cf.a_prior_prop, DEFAULT_PRIOR_MEAN, atol=1e-9)

    def test_infinite_scale_limit_transfers_everything(self):
        rng = np.random.default_rng(47)
        for dim in (1, 3):
            pts = rng.uniform(0, 10, size=(6, dim))
            a_hat = rng.integers(0, 5, size=6).astype(float)
            b_hat = rng.integers(0, 5, size=6).astype(float)
            huge = [1e15] * dim
            cf = propagate_counts(a_hat, b_hat, pts, pts, huge, huge)
            assert_allclose(cf.a_prior_prop, a_hat.sum() - a_hat, atol=1e-9)
            assert_allclose(cf.b_prior_prop, b_hat.sum() - b_hat, atol=1e-9)

    def test_scalar_kernel_oracle(self):
        cf = propagate_counts(
            [1.0], [0.0], np.array([[0.0]]), np.array([[1.0]]), 2.0, 2.0
        )
        assert_allclose(cf.a_post[0], math.exp(-0.25) + 1e-10, rtol=1e-14)

    def test_linear_in_counts(self):
        rng = np.random.default_rng(53)
        pts = rng.uniform(0, 4, size=(5, 2))
        query = rng.uniform(0, 4, size=(8, 2))
        a1 = rng.integers(0, 4, size=5).astype(float)
        a2 = rng.integers(0, 4, size=5).astype(float)
        zeros = np.zeros(5)
        scales = [1.5, 0.8]
        joint = propagate_counts(a1 + a2, zeros, pts, query, scales, scales)
        sep1 = propagate_counts(a1, zeros, pts, query, scales, scales)
        sep2 = propagate_counts(a2, zeros, pts, query, scales, scales)
        assert_allclose(
            joint.a_post, sep1.a_post + sep2.a_post - DEFAULT_PRIOR_MEAN, rtol=1e-13
        )

    def test_direct_counts_dominate_at_zero_scale(self):
        pts = np.array([[0.0], [1.0], [2.0]])
        a_hat = np.array([2.0, 0.0, 1.0])
        cf = propagate_counts(a_hat, a_hat * 0, pts, pts, 1e-9, 1e-9)
        assert np.all(cf.a_post - cf.a_hat <= DEFAULT_PRIOR_MEAN + 3e-12)

    def test_prior_prop_identity(self):
        rng = np.random.default_rng(59)
        pts = rng.uniform(0, 3, size=(6, 1))
        a_hat = rng.integers(0, 3, size=6).astype(float)
        b_hat = rng.integers(0, 3, size=6).astype(float)
        cf = propagate_counts(a_hat, b_hat, pts, pts, 1.0, 1.0)
        assert np.array_equal(cf.a_prior_prop, cf.a_post - cf.a_hat)
        assert np.array_equal(cf.b_prior_prop, cf.b_post - cf.b_hat)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(61)
        pts = rng.uniform(0, 3, size=(5, 2))
        query = rng.uniform(0, 3, size=(7, 2))
        a_hat = rng.integers(0, 4, size=5).astype(float)
        b_hat = rng.integers(0, 4, size=5).astype(float)
        perm = rng.permutation(7)
        direct = propagate_counts(a_hat, b_hat, pts, query[perm], 1.0, 1.0)
        base = propagate_counts(a_hat, b_hat, pts, query, 1.0, 1.0)
        for name in ("a_hat", "b_hat", "a_post", "b_post", "a_prior_prop", "b_prior_prop"):
            assert np.array_equal(getattr(direct, name), getattr(base, name)[perm])

    def test_matched_query_points_carry_direct_counts(self):
        pts = np.array([[0.0], [5.0]])
        query = np.array([[5.0], [2.5], [0.0]])
        cf = propagate_counts([3.0, 1.0], [0.0, 2.0], pts, query, 2.0, 2.0)
        assert list(cf.a_hat) == [1.0, 0.0, 3.0]
        assert list(cf.b_hat) == [2.0, 0.0, 0.0]

    def test_negative_inputs_rejected(self):
        pts = np.array([[0.0]])
        with pytest.raises(DomainError):
            propagate_counts([-1.0], [0.0], pts, pts, 1.0, 1.0)
        with pytest.raises(DomainError):
            propagate_counts([1.0], [0.0], pts, pts, 1.0, 1.0, prior_mean=-0.5)


class TestConditionLognormalSingle:
    def prior(self, rho=0.5):
        corr = np.array([[1.0, rho], [rho, 1.0]])
        return LognormalFieldParams(lam=[0.0, 0.0], zeta=[1.0, 1.0], correlation=corr)

    def test_conditioned_coordinate_collapses(self):
        post = condition_lognormal_single(self.prior(), 0, 5.0)
        assert post.zeta[0] == 0.0
        assert_allclose(post.lam[0], math.log(5.0), rtol=1e-15)

    def test_uncorrelated_coordinates_untouched(self):
        post = condition_lognormal_single(self.prior(rho=0.0), 0, 7.0)
        assert post.lam[1] == 0.0
        assert post.zeta[1] == 1.0

    def test_two_by_two_oracle(self):
        # hand conditioning: lam'' = lam + Sigma[:,0] * (ln e - 0) / 1
        post = condition_lognormal_single(self.prior(), 0, math.e)
        assert_allclose(post.lam, [1.0, 0.5], atol=1e-14)
        assert_allclose(post.zeta[1] ** 2, 0.75, atol=1e-14)

    def test_no_information_when_count_matches_prior_mean(self):
        prior = LognormalFieldParams(
            lam=[2.0, -1.0], zeta=[1.5, 2.0], correlation=np.eye(2)
        )
        post = condition_lognormal_single(prior, 0, math.exp(2.0))
        assert post.lam[1] == prior.lam[1]
        assert post.zeta[1] == prior.zeta[1]

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            condition_lognormal_single(self.prior(), 0, 0.0)
        with pytest.raises(DomainError):
            condition_lognormal_single(self.prior(), 5, 1.0)

    def test_params_validation(self):
        with pytest.raises(DomainError):
            LognormalFieldParams(lam=[0.0], zeta=[-1.0], correlation=np.eye(1))
        with pytest.raises(DomainError):
            LognormalFieldParams(lam=[0.0, 1.0], zeta=[1.0], correlation=np.eye(2))


class TestHelpers:
    def test_unique_points_first_occurrence(self):
        pts = np.array([[1.0], [2.0], [1.0], [3.0], [2.0]])
        uniq, inverse = unique_points(pts)
        assert_allclose(uniq[:, 0], [1.0, 2.0, 3.0])
        assert list(inverse) == [0, 1, 0, 2, 1]

    def test_as_scales_broadcast(self):
        assert_allclose(as_scales(2.0, 3), [2.0, 2.0, 2.0])
        with pytest.raises(DomainError):
            as_scales([1.0, 2.0], 3)
