import json
import math
from fractions import Fraction

import numpy as np
import pytest

from sphvar.counterexamples import (
    ChirpSpec,
    alpha1_origin_values_exact,
    chirp_bump,
    chirp_hat,
    chirp_l2_frequency_side,
    chirp_lp_norm,
    chirp_lp_norms,
    linfty_experiment,
    predicted_slope,
    scaling_experiment,
    stepfn_alpha1,
    stepfn_general,
    tn_prop42,
    tn_prop43,
)
from sphvar.means import mean_step_at_origin
from sphvar.special import ball_volume, gamma, sphere_area


class TestChirp:
    def test_bump_shape(self):
        r = np.linspace(0, 2, 2001)
        b = chirp_bump(r)
        assert np.all(b[(r <= 0.5) | (r >= 1.5)] == 0)
        assert np.all(b[(r >= 0.75) & (r <= 1.25)] == 1)
        assert np.all((b >= 0) & (b <= 1))

    def test_hat_support_and_plateau(self):
        s = ChirpSpec(100.0)
        assert chirp_hat(s, 49.9) == 0 and chirp_hat(s, 150.1) == 0
        assert abs(chirp_hat(s, 100.0) - np.exp(1j * np.pi * 100)) < 1e-12

    def test_hat_modulus(self):
        s = ChirpSpec(64.0, 0.5 + 2j)
        rho = np.linspace(0, 120, 999)
        assert np.allclose(np.abs(chirp_hat(s, rho)), chirp_bump(rho / 64.0), rtol=1e-14, atol=0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ChirpSpec(0.0)
        with pytest.raises(ValueError):
            ChirpSpec(64.0, d=1)

    def test_l2_plancherel_and_scaling(self):
        norms = chirp_lp_norms(ChirpSpec(64.0), [2, 4])
        assert abs(norms[2].value / chirp_l2_frequency_side(ChirpSpec(64.0)) - 1) < 1e-3
        n128 = chirp_lp_norm(ChirpSpec(128.0), 2).value
        assert abs(n128 / norms[2].value / 2 - 1) < 0.02
        assert norms[2].tail < 1e-6 * norms[2].value ** 2

    def test_lp_norm_d3_rejected(self):
        with pytest.raises(ValueError):
            chirp_lp_norm(ChirpSpec(64.0, d=3), 2)


class TestSequences:
    def test_origin_sequence(self):
        assert tn_prop42(100, 1) == math.sqrt(1.01)
        with pytest.raises(ValueError):
            tn_prop42(100, 2)
        with pytest.raises(ValueError):
            tn_prop42(1000, 0)

    @pytest.mark.parametrize("lam", [1e3, 1e4])
    def test_origin_phases_and_spacing(self, lam):
        ns = range(1, int(lam // 100) + 1)
        t = np.array([tn_prop42(lam, n) for n in ns])
        ph = np.exp(-1j * np.pi * lam * t ** 2)
        assert np.abs(np.abs(np.diff(ph)) - 2).max() <= 1e-12
        assert np.all(np.diff(t) <= 1 / lam)

    def test_offcenter_sequence(self):
        assert tn_prop43(1000, 3, 1) == 3 - math.sqrt(0.5635)
        with pytest.raises(ValueError):
            tn_prop43(1000, 2.5, 1)
        with pytest.raises(ValueError):
            tn_prop43(1000, 3, 2)

    @pytest.mark.parametrize("lam", [1e3, 1e4, 1e5])
    @pytest.mark.parametrize("x", [2.75, 2.9, 3.0])
    def test_offcenter_range(self, lam, x):
        for n in range(1, int(lam // 1000) + 1):
            assert 1.9 <= tn_prop43(lam, x, n) <= 2.25


class TestStepFunctions:
    def test_alpha1_sup_norm(self):
        assert math.isclose(stepfn_alpha1(8, 2).sup_norm(), 1 / math.pi, rel_tol=1e-15)

    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("n", [2, 5, 8, 13])
    def test_alpha1_exact_alternation(self, d, n):
        vals = alpha1_origin_values_exact(n, d)
        assert vals[0] == 1
        for j in range(1, n + 1):
            if j % 2:
                assert vals[j] == 0
            else:
                assert vals[j] >= Fraction(1, 2)
        f = stepfn_alpha1(n, d)
        for j, v in enumerate(vals):
            assert abs(mean_step_at_origin(f, 1, 2.0 ** j) - float(v)) < 1e-14

    def test_alpha1_coefficients(self):
        f = stepfn_alpha1(4, 2)
        B = ball_volume(2)
        expect = [1 / B, -1 / (3 * B), 1 / B, -1 / (4 * B), 1 / B]
        assert np.allclose(f.coeffs, expect, rtol=1e-15, atol=0)
        assert list(f.breakpoints) == [0, 1, 2, 4, 8, 16]

    def test_general_construction(self):
        f, t = stepfn_general(3, 2, 2.0)
        base = 2 * gamma(2.0) / (3 * sphere_area(2))
        assert list(f.breakpoints) == [1, 2, 16, 32, 256, 512]
        assert np.allclose(f.coeffs, [base * 2 ** 8, 0, -base, 0, base * 2 ** 8], rtol=1e-14)
        assert list(t) == [16, 256, 4096]

    def test_general_uses_alpha_distance(self):
        f, t = stepfn_general(2, 2, 3.0)
        assert list(t) == [32, 32 ** 2]
        assert f.breakpoints[2] == 32

    @pytest.mark.parametrize("alpha", [2.0, 3.0, 1.5, 0.5 + 0.5j])
    def test_general_bounds(self, alpha):
        f, times = stepfn_general(6, 2, alpha)
        vals = [abs(mean_step_at_origin(f, alpha, t)) for t in times]
        assert vals[0] >= 7 / 8
        for j, v in enumerate(vals, 1):
            if j % 2 == 0:
                assert v <= 2.0 ** -6
            elif j >= 3:
                assert v >= 7 / 8 - 2.0 ** -18

    def test_general_domain(self):
        with pytest.raises(ValueError):
            stepfn_general(3, 2, 1)
        with pytest.raises(ValueError):
            stepfn_general(3, 2, -0.5)


class TestExperiments:
    def test_predicted_slopes(self):
        assert math.isclose(predicted_slope("prop42", 2, 0.25, 3), 13 / 12)
        assert math.isclose(predicted_slope("prop43", 2, 0, 4), 0.75)
        with pytest.raises(ValueError):
            predicted_slope("prop44", 2, 0, 3)

    def test_origin_scaling_slope(self):
        rep = scaling_experiment("prop42", 2, 0, 3, [256, 512, 1024, 2048])
        assert abs(rep.fitted_slope - 4 / 3) <= 0.15
        assert list(rep.counts) == [2, 4, 8, 16]
        assert np.all(rep.variation >= rep.S - 1e-9 * rep.S)

    def test_origin_slope_orders_in_q(self):
        lam = [256, 512, 1024, 2048]
        a = scaling_experiment("prop42", 2, 0, 2.5, lam).fitted_slope
        b = scaling_experiment("prop42", 2, 0, 4, lam).fitted_slope
        assert a > b

    def test_report_outputs(self):
        rep = scaling_experiment("prop42", 2, 0, 3, [256, 512, 1024, 2048])
        lines = rep.to_csv().splitlines()
        assert lines[0] == "lambda,S,log_lambda,log_S"
        assert lines[1].startswith("256,")
        summary = json.loads(rep.summary_json(0.15))
        assert set(summary) == {"fitted_slope", "predicted_slope", "max_residual", "passed"}
        assert rep.to_csv() == scaling_experiment("prop42", 2, 0, 3, [256, 512, 1024, 2048]).to_csv()

    def test_needs_four_lambdas(self):
        with pytest.raises(ValueError):
            scaling_experiment("prop42", 2, 0, 3, [256, 512, 1024])

    def test_linfty_alpha1(self):
        rep = linfty_experiment(27, 2, 3, 1)
        assert rep.ratio >= 3 * math.pi / 4
        assert rep.passed
        assert rep.max_perturbation <= 1 / 8

    def test_linfty_grows(self):
        assert linfty_experiment(64, 2, 3).ratio > linfty_experiment(8, 2, 3).ratio

    def test_linfty_general(self):
        rep = linfty_experiment(9, 2, 3, 2)
        assert rep.variation >= 8 ** (1 / 3) / 4
        assert rep.passed
