import math
import random
import warnings
from fractions import Fraction

import numpy as np
import pytest

from cuspcoho.errors import AdmissibilityWarning, InputStructureError, PreconditionError
from cuspcoho.dbar import (
    FourierRadialForm,
    RadialGrid,
    ThetaModel,
    WeightedNormParams,
    admissible,
    bound_sweep,
    constant_form,
    expm_nilpotent,
    l2_adapted_check,
    matrix_to_complex,
    norm_form01,
    norm_section,
    obstruction_demo,
    obstruction_form,
    obstruction_norm_closed_form,
    residual,
    solve,
    theta_bound_check,
    untwist_check,
)
from cuspcoho.linalg import Matrix, block_diag, shift_matrix
from cuspcoho.monodromy import NilpotentEndomorphism

from _fixtures import random_nilpotent

A_HALF = 0.5


def grid(eps=1e-4, level=10, outer=A_HALF):
    return RadialGrid.build(eps, outer, level)


class TestGrid:
    def test_nodes_increasing_and_ends(self):
        g = grid(1e-3, 6)
        assert g.r[0] == pytest.approx(1e-3)
        assert g.r[-1] == pytest.approx(A_HALF)
        assert np.all(np.diff(g.r) > 0)
        assert np.all(g.trapezoid_weights() > 0)

    def test_refine_halves_spacing(self):
        g = grid(1e-3, 6)
        assert g.refine().h == pytest.approx(g.h / 2)

    def test_cumulative_consistency(self):
        g = grid(1e-2, 8)
        values = np.cos(g.x)
        inner = g.cum_from_inner(values)
        outer = g.cum_from_outer(values)
        assert inner[-1] == pytest.approx(g.integrate_dr(values))
        np.testing.assert_allclose(inner + outer, inner[-1], rtol=1e-12)

    def test_bad_params(self):
        with pytest.raises(InputStructureError):
            RadialGrid.build(0.9, 0.5, 8)
        with pytest.raises(InputStructureError):
            WeightedNormParams(1.5, 0)


class TestAdmissibility:
    @pytest.mark.parametrize("alpha,k,expected", [
        (0.0, 0, True), (0.0, 1, False), (0.0, -2, True),
        (0.25, 1, True), (0.5, 3, True),
    ])
    def test_predicate(self, alpha, k, expected):
        assert admissible(WeightedNormParams(alpha, k)) is expected

    def test_solve_warns_on_obstructed_pair(self):
        g = grid(1e-2, 6)
        with pytest.warns(AdmissibilityWarning):
            solve(constant_form(1, g), WeightedNormParams(0.0, 1), g)


class TestNorms:
    def test_single_mode_constant(self):
        # 4 pi int_eps^A r dr = 2 pi (A^2 - eps^2)
        g = grid(1e-2, 12)
        value = norm_form01(constant_form(1, g), WeightedNormParams(0.0, 0), g)
        assert value == pytest.approx(2 * math.pi * (A_HALF ** 2 - 1e-4), rel=1e-6)

    def test_zero_form(self):
        g = grid(1e-2, 6)
        f = FourierRadialForm("01", {1: np.zeros(g.size)})
        assert norm_form01(f, WeightedNormParams(0.0, 0), g) == 0.0

    def test_log_weight_closed_form(self):
        # f_1 = 1/(r x^2), k = 1: 4 pi int x^-3 dx = 2 pi (xA^-2 - xe^-2)
        for eps in (1e-2, 1e-4):
            g = RadialGrid.build(eps, A_HALF, 12)
            value = norm_form01(obstruction_form(g), WeightedNormParams(0.0, 1), g)
            xa, xe = math.log(1 / A_HALF), math.log(1 / eps)
            exact = 2 * math.pi * (xa ** -2 - xe ** -2)
            assert value == pytest.approx(exact, rel=1e-4)
        # epsilon -> 0 limit
        assert exact == pytest.approx(2 * math.pi / math.log(2) ** 2, rel=0.02)

    def test_section_norm_sqrt_weight(self):
        # u_0 = 1, alpha = 1/2, k = 2: 2 pi int r^(-1/2) dr = 4 pi (sqrt A - sqrt eps)
        g = RadialGrid.build(1e-4, A_HALF, 12)
        u = FourierRadialForm("0", {0: np.ones(g.size)})
        value = norm_section(u, WeightedNormParams(0.5, 2), g)
        exact = 4 * math.pi * (math.sqrt(A_HALF) - math.sqrt(1e-4))
        assert value == pytest.approx(exact, rel=1e-6)
        assert value == pytest.approx(2 * math.pi * math.sqrt(2), rel=0.03)

    def test_section_norm_log_divergence(self):
        # u_0 = 1, alpha = 0, k = 2: 2 pi int dr/r grows like 2 pi log(A/eps)
        values = []
        for eps in (1e-2, 1e-4, 1e-6):
            g = RadialGrid.build(eps, A_HALF, 10)
            u = FourierRadialForm("0", {0: np.ones(g.size)})
            values.append(norm_section(u, WeightedNormParams(0.0, 2), g))
        assert values[0] < values[1] < values[2]
        gap = 2 * math.pi * math.log(1e2)
        assert values[1] - values[0] == pytest.approx(gap, rel=1e-6)
        assert values[2] - values[1] == pytest.approx(gap, rel=1e-6)

    def test_degree_checks(self):
        g = grid(1e-2, 6)
        u = FourierRadialForm("0", {0: np.ones(g.size)})
        with pytest.raises(PreconditionError):
            norm_form01(u, WeightedNormParams(0.0, 0), g)
        with pytest.raises(PreconditionError):
            norm_section(constant_form(1, g), WeightedNormParams(0.0, 0), g)


class TestSolve:
    def test_mode1_constant(self):
        g = grid(1e-2, 12)
        u = solve(constant_form(1, g), WeightedNormParams(0.0, 0), g)
        expected = -2.0 * (A_HALF - g.r)
        assert np.max(np.abs(u.modes[0] - expected)) < 1e-6

    def test_mode0_constant(self):
        # truncated antiderivative of 2 r^-1 int_eps^r rho drho
        g = grid(1e-2, 12)
        u = solve(constant_form(0, g), WeightedNormParams(0.0, 0), g)
        expected = g.r - g.epsilon ** 2 / g.r
        assert np.max(np.abs(u.modes[-1] - expected)) < 5e-7
        # and the idealized closed form r is approached as eps -> 0
        assert np.max(np.abs(u.modes[-1] - g.r)) <= g.epsilon + 1e-7

    def test_mode2_constant(self):
        g = grid(1e-2, 12)
        u = solve(constant_form(2, g), WeightedNormParams(0.0, 0), g)
        expected = -2.0 * g.r * np.log(A_HALF / g.r)
        assert np.max(np.abs(u.modes[1] - expected)) < 1e-12

    def test_inner_anchoring_for_large_k(self):
        # alpha = 0, k = 2 anchors mode 0 at the inner end
        g = grid(1e-2, 10)
        u = solve(constant_form(1, g), WeightedNormParams(0.0, 2), g)
        expected = 2.0 * (g.r - g.epsilon)
        assert np.max(np.abs(u.modes[0] - expected)) < 1e-5

    def test_mode_decoupling_linearity(self):
        g = grid(1e-2, 8)
        rng = np.random.default_rng(3)
        profiles = {m: rng.normal(size=g.size) for m in (-2, 0, 1, 3)}
        multi = solve(FourierRadialForm("01", profiles), WeightedNormParams(0.0, 0), g)
        for m, samples in profiles.items():
            single = solve(
                FourierRadialForm("01", {m: samples}), WeightedNormParams(0.0, 0), g
            )
            np.testing.assert_array_equal(multi.modes[m - 1], single.modes[m - 1])

    def test_missing_drive_mode_gives_zero(self):
        g = grid(1e-2, 6)
        u = solve(constant_form(1, g), WeightedNormParams(0.0, 0), g)
        assert set(u.modes) == {0}


class TestResidual:
    @pytest.mark.parametrize("mode", [0, 1, 2])
    def test_fixtures_second_order(self, mode):
        p = WeightedNormParams(0.0, 0)
        res = []
        for level in (8, 9, 10):
            g = grid(1e-2, level)
            f = constant_form(mode, g)
            res.append(residual(solve(f, p, g), f, g))
        for coarse, fine in zip(res, res[1:]):
            assert coarse / fine == pytest.approx(4.0, rel=0.3)

    def test_perturbed_mode_detected(self):
        g = grid(1e-2, 8)
        p = WeightedNormParams(0.0, 0)
        f = constant_form(3, g)
        u = solve(f, p, g)
        u.modes[2] = u.modes[2] + 1.0  # constant error on a mode with n != 0
        # residual picks up the (n/r) term of the injected constant
        assert residual(u, f, g) >= 0.5 * 2 / A_HALF

    def test_zero_everything(self):
        g = grid(1e-2, 6)
        zero01 = FourierRadialForm("01", {1: np.zeros(g.size)})
        zero0 = FourierRadialForm("0", {0: np.zeros(g.size)})
        assert residual(zero0, zero01, g) == 0.0


class TestBoundSweep:
    def test_rejects_inadmissible(self):
        with pytest.raises(PreconditionError):
            bound_sweep([WeightedNormParams(0.0, 1)], sample_count=1)

    def test_small_sweep_stable(self):
        pairs = [
            WeightedNormParams(0.0, 0),
            WeightedNormParams(0.5, 3),
            WeightedNormParams(0.0, -2),
        ]
        report = bound_sweep(pairs, sample_count=4, level=9, seed=11)
        assert report.flagged_pairs == []
        finest = report.grid_levels[-1]
        for p in pairs:
            sups = [
                row["sup_ratio"]
                for row in report.sup_table
                if (row["alpha"], row["k"], row["grid_level"])
                == (p.alpha, p.k, finest)
            ]
            assert len(sups) == 3
            assert max(sups) / min(sups) < 1.5
            assert max(sups) < 25.0

    def test_deterministic_under_seed(self):
        pairs = [WeightedNormParams(0.0, 0)]
        a = bound_sweep(pairs, sample_count=2, level=7, seed=5)
        b = bound_sweep(pairs, sample_count=2, level=7, seed=5)
        assert [r.as_dict() for r in a.rows] == [r.as_dict() for r in b.rows]

    def test_rows_cover_ladder_and_levels(self):
        report = bound_sweep([WeightedNormParams(0.0, 0)], sample_count=2, level=7, seed=5)
        combos = {(r.epsilon, r.grid_level) for r in report.rows}
        assert combos == {(e, l) for e in (1e-2, 1e-4, 1e-6) for l in (7, 8)}


class TestObstruction:
    def test_growth_and_fit(self):
        report = obstruction_demo(level=10)
        assert report.monotone
        assert report.relative_deviation < 0.2
        assert report.f_drift < 1.05
        # quadrature matches the exact truncated integral
        for row in report.rows:
            assert row["norm_u"] == pytest.approx(row["norm_u_closed_form"], rel=1e-3)
            assert row["norm_u_closed_form"] == pytest.approx(
                obstruction_norm_closed_form(row["epsilon"], A_HALF)
            )

    def test_growth_increments_follow_loglog(self):
        report = obstruction_demo(level=10)
        ys = [row["norm_u"] for row in report.rows]
        ts = [math.log(math.log(1 / row["epsilon"])) for row in report.rows]
        slopes = [(y1 - y0) / (t1 - t0) for (y0, y1, t0, t1)
                  in zip(ys, ys[1:], ts, ts[1:])]
        c_sq = (2 / math.log(2)) ** 2
        for s in slopes:
            assert s == pytest.approx(2 * math.pi * c_sq, rel=0.25)

    def test_control_case_bounded(self):
        report = obstruction_demo(level=10)
        ratios = [row["ratio"] for row in report.control_ratios]
        assert max(ratios) < 3.0
        assert max(ratios) / min(ratios) < 1.5

    def test_zero_data_no_growth(self):
        g = grid(1e-2, 8)
        f = FourierRadialForm("01", {1: np.zeros(g.size)})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AdmissibilityWarning)
            u = solve(f, WeightedNormParams(0.0, 1), g)
        assert norm_section(u, WeightedNormParams(0.0, 1), g) == 0.0


class TestThetaBound:
    def test_zero_map(self):
        model = ThetaModel.from_nilpotent(
            NilpotentEndomorphism.from_matrix(Matrix.zeros(2, 2))
        )
        report = theta_bound_check(model, grid(1e-4, 8))
        assert report["ok"]
        assert all(e["image_zero"] for e in report["entries"])

    @pytest.mark.parametrize("size", [2, 3])
    def test_jordan_blocks(self, size):
        model = ThetaModel.from_nilpotent(
            NilpotentEndomorphism.from_matrix(shift_matrix(size))
        )
        report = theta_bound_check(model, grid(1e-4, 8))
        assert report["ok"]
        moved = [e for e in report["entries"] if not e["image_zero"]]
        assert len(moved) == size - 1
        for e in moved:
            assert e["exponent_ok"]
            assert e["image_exponent"] == e["exponent"] - 2
            assert e["drift"] < 1.5

    def test_mixed_blocks(self):
        model = ThetaModel.from_nilpotent(
            NilpotentEndomorphism.from_matrix(block_diag(shift_matrix(3), shift_matrix(2)))
        )
        report = theta_bound_check(model, grid(1e-6, 8))
        assert report["ok"]


class TestUntwist:
    def test_zero_monodromy(self):
        report = untwist_check(
            NilpotentEndomorphism.from_matrix(Matrix.zeros(2, 2)),
            (Fraction(1), Fraction(2)),
        )
        assert report["mismatch"] == 0.0

    def test_j2(self):
        report = untwist_check(
            NilpotentEndomorphism.from_matrix(shift_matrix(2)),
            (Fraction(0), Fraction(1)),
        )
        assert report["mismatch"] <= 1e-10

    def test_random_4x4(self):
        rng = random.Random(808)
        for _ in range(10):
            n = random_nilpotent(rng, 4)
            v = tuple(Fraction(rng.randint(-3, 3)) for _ in range(4))
            report = untwist_check(NilpotentEndomorphism.from_matrix(n), v)
            assert report["mismatch"] <= 1e-10

    def test_series_exponential_matches_oracle(self):
        n = matrix_to_complex(shift_matrix(3))
        e = expm_nilpotent(n)
        expected = np.eye(3) + n + n @ n / 2
        np.testing.assert_allclose(e, expected, atol=1e-15)


class TestAdaptedFrames:
    def test_single_vector(self):
        report = l2_adapted_check([0], WeightedNormParams(0.0, 0), 2)
        assert report["verdict"] == "adapted"

    def test_j2_frame_consistency(self):
        report = l2_adapted_check([-1, 1], WeightedNormParams(0.0, 0), 3)
        assert report["verdict"] == "adapted"
        constants = [c for c in report["cases"] if c["case"] == "constants"][0]
        assert constants["term_divergent"] == [False, True]
        assert constants["sum_divergent"]

    def test_adversarial_cancellation_attempt(self):
        # opposite-sign divergent coefficients still make the sum diverge
        report = l2_adapted_check([1, 1], WeightedNormParams(0.0, 0), 2)
        case = [c for c in report["cases"] if c["case"] == "alternating_constants"][0]
        assert case["term_divergent"] == [True, True]
        assert case["sum_divergent"]
        assert report["verdict"] == "adapted"

    def test_positive_alpha_all_convergent(self):
        report = l2_adapted_check([-2, 0, 2], WeightedNormParams(0.5, 0), 2)
        assert report["verdict"] == "adapted"
        for case in report["cases"]:
            assert not case["sum_divergent"]
