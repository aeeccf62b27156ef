"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
complete. Every tolerance is pinned here, not configurable.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cuspcoho.cohomology import global_dims, jstar_stalk, rank1_stalks
from cuspcoho.dbar import (
    RadialGrid,
    ThetaModel,
    WeightedNormParams,
    bound_sweep,
    constant_form,
    obstruction_demo,
    residual,
    solve,
    theta_bound_check,
    untwist_check,
)
from cuspcoho.linalg import Matrix, block_diag, shift_matrix, span_eq
from cuspcoho.monodromy import (
    NilpotentEndomorphism,
    nilpotent_log,
    unipotent_exp,
)
from cuspcoho.spectral import FilteredComplexModel, degeneration_certificate
from cuspcoho.weight_filtration import (
    build_weight_filtration,
    check_filtration_axioms,
    model_frame,
    weight_filtration_by_powers,
)

from _fixtures import (
    conjugate_rep,
    cusp_rep_from_unipotent,
    random_nilpotent,
    random_partition,
    random_scalar_sum_rep,
    random_unimodular,
    random_unipotent,
    trivial_rep,
)


def conclude(name: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}  {name}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


# criterion 1 -----------------------------------------------------------------

GOLDEN_STALKS = {
    -6: ("FULL_V", "DT_OVER_T_TENSOR_V", "ZERO"),
    -5: ("FULL_V", "DT_OVER_T_TENSOR_V", "ZERO"),
    -4: ("FULL_V", "DT_OVER_T_TENSOR_V", "ZERO"),
    -3: ("FULL_V", "DT_OVER_T_TENSOR_V", "ZERO"),
    -2: ("FULL_V", "DT_OVER_T_TENSOR_V", "ZERO"),
    -1: ("FULL_V", "ZERO", "M1_OBSTRUCTION"),
    0: ("FULL_V", "ZERO", "ZERO"),
    1: ("ZERO", "M1_OBSTRUCTION", "ZERO"),
    2: ("ZERO", "ZERO", "ZERO"),
    3: ("ZERO", "ZERO", "ZERO"),
    4: ("ZERO", "ZERO", "ZERO"),
    5: ("ZERO", "ZERO", "ZERO"),
    6: ("ZERO", "ZERO", "ZERO"),
}


def test_criterion_1_stalk_table():
    ok = True
    for k, expected in GOLDEN_STALKS.items():
        row = rank1_stalks(k)
        ok = ok and (row.h0.value, row.h1.value, row.h2.value) == expected
    conclude("1 stalk table golden rows, k in [-6, 6]", ok)


# criterion 2 -----------------------------------------------------------------


def test_criterion_2_exact_algebra():
    rng = random.Random(20_001)
    roundtrips = 0
    for _ in range(200):
        n = rng.randint(1, 8)
        u = random_unipotent(rng, n)
        log = nilpotent_log(u)
        if unipotent_exp(log) == u and nilpotent_log(unipotent_exp(log)).matrix == log.matrix:
            roundtrips += 1
    axioms = 0
    agreements = 0
    for _ in range(100):
        n = rng.randint(1, 8)
        ne = NilpotentEndomorphism.from_matrix(random_nilpotent(rng, n))
        wf = build_weight_filtration(ne)
        check_filtration_axioms(wf)
        axioms += 1
        independent = weight_filtration_by_powers(ne)
        if all(
            span_eq(wf.subspaces[l], independent[l])
            for l in range(-wf.weight, wf.weight + 1)
        ):
            agreements += 1
    ok = roundtrips == 200 and axioms == 100 and agreements == 100
    conclude(
        "2 exact algebra: 200 exp/log roundtrips, 100 filtration axiom sets,"
        " construction agreement",
        ok,
        f"roundtrips={roundtrips}/200 axioms={axioms}/100 agree={agreements}/100",
    )


# criterion 3 -----------------------------------------------------------------


def test_criterion_3_spectral_degeneration():
    rng = random.Random(30_001)
    cases = [shift_matrix(size) for size in range(1, 8)]
    for _ in range(50):
        cases.append(random_nilpotent(rng, rng.randint(1, 8)))
    ok = True
    for matrix in cases:
        n = matrix.nrows
        cert = degeneration_certificate(
            FilteredComplexModel.from_nilpotent(NilpotentEndomorphism.from_matrix(matrix))
        )
        kernel_dim = n - matrix.rank()
        ok = ok and (cert.stalk_h0, cert.stalk_h1, cert.stalk_h2) == (kernel_dim, 0, 0)
        ok = ok and all(p + q == 0 for p, q in cert.survivor_positions)
        rep = cusp_rep_from_unipotent(unipotent_exp(NilpotentEndomorphism.from_matrix(matrix)))
        ok = ok and jstar_stalk(rep, 0).ncols == cert.stalk_h0
    conclude(
        "3 spectral degeneration: blocks 1-7 and 50 random sums give"
        " (dim ker N, 0, 0), survivors in degree 0, stalk match",
        ok,
        f"cases={len(cases)}",
    )


# criterion 4 -----------------------------------------------------------------


def test_criterion_4_global_crosscheck():
    rng = random.Random(40_001)
    ok = True
    details = []
    for g in (0, 1, 2):
        for s in (1, 2, 3):
            dims = global_dims(trivial_rep(g, s, 1))
            expected = (1, 2 * g, 1)
            if (dims.h0, dims.h1, dims.h2) != expected or not dims.consistent:
                ok = False
                details.append(f"trivial g={g} s={s}: {dims.as_dict()}")
            ok = ok and dims.h0 - dims.h1 + dims.h2 == dims.euler
    a = Matrix([[Fraction(2), Fraction(0)], [Fraction(0), Fraction(1, 2)]])
    from cuspcoho.monodromy import PuncturedSurfaceRep

    diag = PuncturedSurfaceRep(1, 1, 2, (a, Matrix.identity(2)), (Matrix.identity(2),))
    dims = global_dims(diag)
    ok = ok and (dims.h0, dims.h1, dims.h2) == (0, 0, 0) and dims.consistent
    checked = 0
    for _ in range(30):
        g, s = rng.randint(0, 2), rng.randint(1, 3)
        rep = random_scalar_sum_rep(rng, g, s, rng.randint(1, 3))
        dims = global_dims(rep)
        euler_ok = dims.h0 - dims.h1 + dims.h2 == rep.rank * (2 - 2 * g - s) + sum(
            dims.per_cusp_kernel_dims
        )
        if not (dims.consistent and euler_ok):
            ok = False
            details.append(f"sum g={g} s={s}: {dims.as_dict()}")
        checked += 1
    conclude(
        "4 global cohomology: euler-route h1 = parabolic h1 on fixtures and"
        " 30 random sums, euler identity everywhere",
        ok,
        "; ".join(details) if details else f"fixtures=9+1 randomized={checked}",
    )


# criterion 5 -----------------------------------------------------------------


def test_criterion_5_solver_convergence():
    p = WeightedNormParams(0.0, 0, 0.5)
    epsilon = 1e-2
    fixtures = {
        1: lambda g: -2.0 * (0.5 - g.r),
        0: lambda g: g.r - g.epsilon ** 2 / g.r,
        2: lambda g: -2.0 * g.r * np.log(0.5 / g.r),
    }
    ok = True
    detail = []
    for mode, closed in fixtures.items():
        residuals = []
        for level in (9, 10, 11, 12, 13):
            grid = RadialGrid.build(epsilon, 0.5, level)
            f = constant_form(mode, grid)
            u = solve(f, p, grid)
            residuals.append(residual(u, f, grid))
            if level == 12:
                exact = closed(grid)
                rel = float(
                    np.max(np.abs(u.modes[mode - 1] - exact)) / np.max(np.abs(exact))
                )
                if rel > 1e-6:
                    ok = False
                detail.append(f"mode {mode}: rel={rel:.2e}")
        for coarse, fine in zip(residuals, residuals[1:]):
            ratio = coarse / fine
            if not (4.0 * 0.7 <= ratio <= 4.0 * 1.3):
                ok = False
                detail.append(f"mode {mode}: residual ratio {ratio:.2f}")
    conclude(
        "5 solver convergence: second-order residual decay and closed-form"
        " match at level 12 within 1e-6",
        ok,
        " ".join(detail),
    )


# criterion 6 -----------------------------------------------------------------


def test_criterion_6_bound_stability():
    pairs = [
        WeightedNormParams(alpha, k)
        for alpha in (0.0, 0.25, 0.5, 0.75)
        for k in range(-3, 4)
        if not (alpha == 0.0 and k == 1)
    ]
    report = bound_sweep(pairs, sample_count=20, level=12, refinements=2, seed=60_001)
    finest = report.grid_levels[-1]
    worst = 0.0
    ok = not report.flagged_pairs
    for p in pairs:
        sups = [
            row["sup_ratio"]
            for row in report.sup_table
            if (row["alpha"], row["k"], row["grid_level"]) == (p.alpha, p.k, finest)
        ]
        drift = max(sups) / min(sups)
        worst = max(worst, drift)
        if drift >= 1.5:
            ok = False
    conclude(
        "6 L2 bound stability: sup ratio drift < 1.5x across the epsilon"
        " ladder for all 27 admissible pairs, 20 samples each",
        ok,
        f"worst drift={worst:.3f}",
    )


# criterion 7 -----------------------------------------------------------------


def test_criterion_7_obstruction():
    report = obstruction_demo()
    values = [row["norm_u"] for row in report.rows]
    strictly_increasing = all(b > a for a, b in zip(values, values[1:]))
    ok = (
        strictly_increasing
        and report.relative_deviation <= 0.20
        and report.f_drift <= 1.05
    )
    conclude(
        "7 obstruction at (0, 1): strictly increasing norm, log-log fit"
        " within 20%, stable data norm within 5%",
        ok,
        f"fit dev={report.relative_deviation:.2%} f drift={report.f_drift:.4f}",
    )


# criterion 8 -----------------------------------------------------------------


def all_partitions(n: int):
    if n == 0:
        yield []
        return
    for first in range(n, 0, -1):
        for rest in all_partitions(n - first):
            if not rest or rest[0] <= first:
                yield [first] + rest


def test_criterion_8_theta_and_untwist():
    grid = RadialGrid.build(1e-6, 0.5, 10)
    ok = True
    frames = 0
    for n in range(1, 7):
        for parts in all_partitions(n):
            matrix = block_diag(*[shift_matrix(p) for p in parts])
            model = ThetaModel.from_nilpotent(NilpotentEndomorphism.from_matrix(matrix))
            report = theta_bound_check(model, grid)
            frames += 1
            if not report["ok"]:
                ok = False
            for entry in report["entries"]:
                if not entry["image_zero"] and entry["drift"] >= 1.5:
                    ok = False
    rng = random.Random(80_001)
    worst_mismatch = 0.0
    for _ in range(20):
        size = rng.randint(1, 4)
        matrix = random_nilpotent(rng, size)
        v = tuple(Fraction(rng.randint(-3, 3)) for _ in range(size))
        mismatch = untwist_check(NilpotentEndomorphism.from_matrix(matrix), v)["mismatch"]
        worst_mismatch = max(worst_mismatch, mismatch)
        if mismatch > 1e-10:
            ok = False
    conclude(
        "8 theta boundedness and untwisting: exponent identity exact on all"
        " Jordan frames n <= 6, ratio r-stable, untwist mismatch <= 1e-10",
        ok,
        f"frames={frames} worst mismatch={worst_mismatch:.2e}",
    )
