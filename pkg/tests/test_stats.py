"""Tests for the Monte-Carlo post-processing estimators."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from adaleja import (cv_errors, extract_resonance, failure_probability,
                     kde_pdf, mc_moments, sobol_indices, uniform)
from adaleja.errors import ContractError

UNIT = [uniform(0.0, 1.0)]


class Evaluable:
    """Minimal surrogate stand-in exposing batch evaluation."""

    def __init__(self, fn):
        self.fn = fn

    def evaluate(self, points):
        return self.fn(np.atleast_2d(points))


class TestMoments:
    def test_uniform_identity_moments(self):
        summary = mc_moments(lambda pts: pts[:, 0], UNIT, 100_000, 7)
        assert summary.sample_count == 100_000
        assert abs(summary.mean - 0.5) < 0.01
        assert abs(summary.std - 1.0 / np.sqrt(12.0)) < 0.01

    def test_seed_freezes_result(self):
        a = mc_moments(lambda pts: pts[:, 0], UNIT, 10_000, 7)
        b = mc_moments(lambda pts: pts[:, 0], UNIT, 10_000, 7)
        c = mc_moments(lambda pts: pts[:, 0], UNIT, 10_000, 8)
        assert (a.mean, a.std) == (b.mean, b.std)
        assert a.mean != c.mean

    def test_modulus_of_complex_output(self):
        summary = mc_moments(lambda pts: -3.0j * np.ones(pts.shape[0]),
                             UNIT, 100, 0)
        assert_allclose(summary.mean, 3.0, rtol=1e-14)
        assert_allclose(summary.std, 0.0, atol=1e-14)

    def test_evaluate_method_is_preferred(self):
        target = Evaluable(lambda pts: pts[:, 0])
        direct = mc_moments(lambda pts: pts[:, 0], UNIT, 5_000, 3)
        wrapped = mc_moments(target, UNIT, 5_000, 3)
        assert (direct.mean, direct.std) == (wrapped.mean, wrapped.std)

    def test_needs_two_samples(self):
        with pytest.raises(ContractError):
            mc_moments(lambda pts: pts[:, 0], UNIT, 1, 0)

    def test_bad_output_shape(self):
        with pytest.raises(ContractError):
            mc_moments(lambda pts: pts, [uniform(0, 1)] * 2, 100, 0)


class TestFailureProbability:
    def test_uniform_tail_mass(self):
        p = failure_probability(lambda pts: pts[:, 0], UNIT, 0.1, 100_000, 7)
        assert isinstance(p, float)
        assert abs(p - 0.1) < 0.01

    def test_threshold_includes_equality(self):
        ones = lambda pts: np.ones(pts.shape[0])
        assert failure_probability(ones, UNIT, 0.5, 100, 0) == 1.0

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
    def test_alpha_bounds(self, alpha):
        with pytest.raises(ContractError):
            failure_probability(lambda pts: pts[:, 0], UNIT, alpha, 100, 0)


class TestKde:
    def test_single_sample_formula(self):
        # (1/h) 0.75 (1 - ((T - x)/h)^2) at T = 0.1, x = 0, h = 0.5
        assert_allclose(kde_pdf([0.0], 0.5, [0.1]), [1.44], rtol=1e-15)

    def test_peak_height_at_sample(self):
        h = 0.2
        assert_allclose(kde_pdf([0.75], h, [0.75]), [0.75 / h], rtol=1e-15)

    def test_compact_support(self):
        out = kde_pdf([0.0], 0.5, [0.51, -0.51, 10.0])
        assert np.all(out == 0.0)

    def test_density_integrates_to_one(self):
        rng = np.random.default_rng(21)
        samples = rng.normal(5.0, 1.0, 4_000)
        grid = np.linspace(0.0, 10.0, 20_001)
        pdf = kde_pdf(samples, 0.3, grid)
        assert abs(np.trapezoid(pdf, grid) - 1.0) < 1e-3
        assert np.all(pdf >= 0.0)

    def test_grid_shape_preserved(self):
        grid = np.linspace(-1, 1, 12).reshape(3, 4)
        assert kde_pdf([0.0, 0.2], 0.4, grid).shape == (3, 4)

    def test_rejects_empty_samples(self):
        with pytest.raises(ContractError):
            kde_pdf([], 0.5, [0.0])

    @pytest.mark.parametrize("h", [0.0, -1.0])
    def test_rejects_bad_bandwidth(self, h):
        with pytest.raises(ContractError):
            kde_pdf([0.0], h, [0.0])


class TestSobol:
    def test_additive_function(self):
        # f = y1 + 2 y2 on U(0,1)^2 has main effects 1/5 and 4/5 and no
        # interaction, so totals match the mains
        r = sobol_indices(lambda pts: pts[:, 0] + 2.0 * pts[:, 1],
                          [uniform(0, 1)] * 2, 100_000, 42)
        assert_allclose(r.main, [0.2, 0.8], atol=0.02)
        assert_allclose(r.total, [0.2, 0.8], atol=0.02)
        assert r.n_evaluations == 2 * (2 + 1) * 100_000

    def test_product_function_has_interaction(self):
        # f = y1 y2 on U(0,1)^2: main 3/7, total 4/7 per variable
        r = sobol_indices(lambda pts: pts[:, 0] * pts[:, 1],
                          [uniform(0, 1)] * 2, 100_000, 42)
        assert_allclose(r.main, [3.0 / 7.0] * 2, atol=0.02)
        assert_allclose(r.total, [4.0 / 7.0] * 2, atol=0.02)
        assert np.all(r.main < r.total)

    def test_zero_variance_output(self):
        r = sobol_indices(lambda pts: np.full(pts.shape[0], 2.5),
                          [uniform(0, 1)] * 2, 1_000, 1)
        assert np.all(r.main == 0.0)
        assert np.all(r.total == 0.0)
        assert r.n_evaluations == 6_000

    def test_complex_output_uses_modulus(self):
        # |i (y1 + 2 y2)| on positive inputs equals the additive case
        r = sobol_indices(lambda pts: 1j * (pts[:, 0] + 2.0 * pts[:, 1]),
                          [uniform(0, 1)] * 2, 50_000, 9)
        assert_allclose(r.main, [0.2, 0.8], atol=0.02)

    def test_seeded_determinism(self):
        f = lambda pts: pts[:, 0] + 2.0 * pts[:, 1]
        a = sobol_indices(f, [uniform(0, 1)] * 2, 2_000, 5)
        b = sobol_indices(f, [uniform(0, 1)] * 2, 2_000, 5)
        assert np.array_equal(a.main, b.main)
        assert np.array_equal(a.total, b.total)

    def test_rejects_bad_n_base(self):
        with pytest.raises(ContractError):
            sobol_indices(lambda pts: pts[:, 0], UNIT, 0, 0)


class TestResonance:
    def test_linear_dip(self):
        target = Evaluable(lambda pts: (pts[:, 0] - 0.9) + 0.3162j)
        f, v = extract_resonance(target, [], (0.5, 1.5), n_starts=5)
        assert abs(f - 0.9) < 1e-6
        assert_allclose(v, 0.3162, rtol=1e-9)

    def test_monotone_modulus_ends_on_boundary(self):
        target = Evaluable(lambda pts: pts[:, 0] + 0.25)
        f, v = extract_resonance(target, [], (0.5, 1.5))
        assert f == 0.5
        assert_allclose(v, 0.75, rtol=1e-12)

    def test_deeper_of_two_wells_wins(self):
        def wells(pts):
            f = pts[:, 0]
            return (1.0 - 0.6 * np.exp(-200.0 * (f - 0.3) ** 2)
                    - 0.9 * np.exp(-200.0 * (f - 0.75) ** 2))

        f, v = extract_resonance(Evaluable(wells), [], (0.0, 1.0), n_starts=8)
        grid = np.linspace(0.0, 1.0, 200_001)
        scan = wells(grid[:, None])
        assert abs(f - grid[np.argmin(scan)]) < 1e-4
        assert v <= scan.min() + 1e-9

    def test_remaining_parameters_are_fixed(self):
        target = Evaluable(lambda pts: pts[:, 0] - pts[:, 1])
        f, v = extract_resonance(target, [0.8], (0.5, 1.5))
        assert abs(f - 0.8) < 1e-6
        assert v < 1e-6

    def test_rejects_empty_range(self):
        with pytest.raises(ContractError):
            extract_resonance(Evaluable(lambda pts: pts[:, 0]), [], (1.0, 1.0))

    def test_rejects_bad_start_count(self):
        with pytest.raises(ContractError):
            extract_resonance(Evaluable(lambda pts: pts[:, 0]), [],
                              (0.0, 1.0), n_starts=0)


class TestCvErrors:
    def test_constant_offset(self):
        mean_err, max_err = cv_errors(lambda pts: pts[:, 0] + 0.01,
                                      lambda p: complex(p[0]),
                                      UNIT, 500, 3)
        assert_allclose(mean_err, 0.01, rtol=1e-12)
        assert_allclose(max_err, 0.01, rtol=1e-12)

    def test_exact_match_is_zero(self):
        mean_err, max_err = cv_errors(Evaluable(lambda pts: pts[:, 0]),
                                      lambda p: complex(p[0]),
                                      UNIT, 200, 4)
        assert mean_err == 0.0
        assert max_err == 0.0

    def test_rejects_empty_sample(self):
        with pytest.raises(ContractError):
            cv_errors(lambda pts: pts[:, 0], lambda p: 0.0, UNIT, 0, 0)
