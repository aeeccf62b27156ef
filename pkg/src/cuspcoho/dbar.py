"""Radial Fourier solver for the dbar equation on the punctured disk.

Forms are expanded in angular Fourier modes with radial coefficient samples
on a grid that is uniform in x = log(1/r); the logarithmic substitution turns
the singular weights |log r|^k into polynomials in x and removes the r = 0
stiffness. All integrals are truncated at an inner cutoff epsilon and always
reported together with it; divergence is operationalized as monotone growth
across an epsilon ladder, never as an exact infinity.

Weighted norms (outer radius A < 1, weight parameters 0 <= alpha < 1, k):

    (0,1)-forms   ||phi||^2 = 4 pi sum_n int_0^A |f_n|^2 |log r|^k     r^(1+alpha) dr
    sections      ||u||^2   = 2 pi sum_n int_0^A |u_n|^2 |log r|^(k-2) r^(-1+alpha) dr

Mode by mode the equation reduces to (1/2)(u_n' - (n/r) u_n) = f_{n+1}, and
the solution operator integrates from the inner end for n < 0 and from the
outer end for n > 0. The n = 0 antiderivative is anchored at the outer end
for alpha = 0, k <= 1 (there the outer constant is square integrable, and an
inner anchoring need not exist for general data) and at the inner end
otherwise: mandatory for alpha = 0, k >= 2, and for alpha > 0 it is what
keeps the truncated norms epsilon-stable, since the outer-anchored candidate
carries a nonzero constant all the way to the puncture. The excluded pair
(alpha, k) = (0, 1) is exactly where no anchoring works; `obstruction_demo`
measures the resulting log log growth of the canonical outer candidate.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityWarning, InconsistencyError, InputStructureError, PreconditionError
from .linalg import GaussianRational, Matrix, solve_in_span
from .monodromy import NilpotentEndomorphism
from .weight_filtration import (
    ModelMetricFrame,
    WeightFiltration,
    build_weight_filtration,
    model_frame,
    vector_weight,
)

THREADS_ENV = "CUSP_COHO_THREADS"
DEFAULT_EPSILON_LADDER = (1e-2, 1e-4, 1e-6)
DEFAULT_GRID_LEVEL = 12
DEFAULT_N_MAX = 8
DEFAULT_OUTER_RADIUS = 0.5


def thread_count() -> int:
    """Worker cap for parameter sweeps, from the CUSP_COHO_THREADS env var."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class WeightedNormParams:
    alpha: float
    k: int
    A: float = DEFAULT_OUTER_RADIUS

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise InputStructureError("alpha must lie in [0, 1)")
        if not 0 < self.A < 1:
            raise InputStructureError("outer radius A must lie in (0, 1)")
        if not isinstance(self.k, int) or isinstance(self.k, bool):
            raise InputStructureError("k must be an integer")


def admissible(p: WeightedNormParams) -> bool:
    """Parameter pairs with a bounded solution operator: alpha = 0 with
    k != 1, or any alpha > 0."""
    return p.alpha > 0 or p.k != 1


@dataclass(frozen=True)
class RadialGrid:
    """Radii epsilon = r_0 < ... < r_M = A, uniform in x = log(1/r)."""

    epsilon: float
    outer: float
    level: int
    r: np.ndarray
    x: np.ndarray
    h: float

    @classmethod
    def build(cls, epsilon: float, outer: float = DEFAULT_OUTER_RADIUS,
              level: int = DEFAULT_GRID_LEVEL) -> "RadialGrid":
        if not 0 < epsilon < outer < 1:
            raise InputStructureError("need 0 < epsilon < A < 1")
        if level < 2:
            raise InputStructureError("grid level must be >= 2")
        m = 2 ** level
        x = np.linspace(math.log(1.0 / epsilon), math.log(1.0 / outer), m + 1)
        r = np.exp(-x)
        h = (x[0] - x[-1]) / m
        return cls(epsilon, outer, level, r, x, h)

    def refine(self) -> "RadialGrid":
        return RadialGrid.build(self.epsilon, self.outer, self.level + 1)

    @property
    def size(self) -> int:
        return self.r.size

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.size, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def integrate_dr(self, values: np.ndarray) -> float:
        """Trapezoid approximation of int_epsilon^A values(r) dr."""
        return float(np.real((self.trapezoid_weights() * values * self.r).sum()))

    def cum_from_inner(self, values: np.ndarray) -> np.ndarray:
        """I[i] = int_epsilon^{r_i} values dr, running trapezoid sums."""
        y = values * self.r
        steps = 0.5 * self.h * (y[:-1] + y[1:])
        return np.concatenate(([0.0], np.cumsum(steps)))

    def cum_from_outer(self, values: np.ndarray) -> np.ndarray:
        """J[i] = int_{r_i}^A values dr, running trapezoid sums."""
        inner = self.cum_from_inner(values)
        return inner[-1] - inner


@dataclass
class FourierRadialForm:
    """Angular-mode decomposition of a form: mode index -> radial samples.

    form_degree is "0" for sections, "01" for (0,1)-forms, and "10_dt_over_t"
    for (1,0)-forms written against dt/t.
    """

    form_degree: str
    modes: dict

    def __post_init__(self):
        if self.form_degree not in ("0", "01", "10_dt_over_t"):
            raise InputStructureError(f"unknown form degree {self.form_degree!r}")
        coerced = {}
        sizes = set()
        for n, samples in self.modes.items():
            arr = np.asarray(samples)
            if arr.ndim != 1:
                raise InputStructureError("mode samples must be one-dimensional")
            coerced[int(n)] = arr
            sizes.add(arr.size)
        if len(sizes) > 1:
            raise InputStructureError("all mode arrays must share the grid length")
        self.modes = coerced

    @property
    def mode_range(self):
        if not self.modes:
            return (0, 0)
        return (min(self.modes), max(self.modes))

    def mode(self, n: int, size: int) -> np.ndarray:
        return self.modes.get(n, np.zeros(size))


def _check_grid(form: FourierRadialForm, grid: RadialGrid):
    for arr in form.modes.values():
        if arr.size != grid.size:
            raise InputStructureError("form samples do not match the grid")
        break


def norm_form01(f: FourierRadialForm, p: WeightedNormParams, grid: RadialGrid) -> float:
    """Squared weighted norm of a (0,1)-form, truncated at grid.epsilon."""
    if f.form_degree != "01":
        raise PreconditionError("norm_form01 expects a (0,1)-form")
    _check_grid(f, grid)
    weight = grid.x ** p.k * grid.r ** (1.0 + p.alpha)
    total = 0.0
    for samples in f.modes.values():
        total += grid.integrate_dr(np.abs(samples) ** 2 * weight)
    return 4.0 * math.pi * total


def norm_section(u: FourierRadialForm, p: WeightedNormParams, grid: RadialGrid) -> float:
    """Squared weighted norm of a section, truncated at grid.epsilon."""
    if u.form_degree != "0":
        raise PreconditionError("norm_section expects a section")
    _check_grid(u, grid)
    weight = grid.x ** (p.k - 2) * grid.r ** (-1.0 + p.alpha)
    total = 0.0
    for samples in u.modes.values():
        total += grid.integrate_dr(np.abs(samples) ** 2 * weight)
    return 2.0 * math.pi * total


def solve(f: FourierRadialForm, p: WeightedNormParams, grid: RadialGrid) -> FourierRadialForm:
    """Mode-wise integral solution operator: the mode f_{n+1} drives u_n.

    Inadmissible parameters emit AdmissibilityWarning but still produce the
    outer-anchored candidate; the obstruction demonstration relies on that.
    """
    if f.form_degree != "01":
        raise PreconditionError("solve expects a (0,1)-form")
    _check_grid(f, grid)
    if not admissible(p):
        warnings.warn(
            f"(alpha, k) = ({p.alpha}, {p.k}) has no bounded solution operator",
            AdmissibilityWarning,
            stacklevel=2,
        )
    r = grid.r
    out = {}
    for m, samples in sorted(f.modes.items()):
        n = m - 1
        fv = samples.astype(complex)
        if n < 0:
            u = 2.0 * r ** n * grid.cum_from_inner(r ** (-n) * fv)
        elif n > 0:
            u = -2.0 * r ** n * grid.cum_from_outer(r ** (-n) * fv)
        elif p.alpha == 0 and p.k <= 1:
            u = -2.0 * grid.cum_from_outer(fv)
        else:
            u = 2.0 * grid.cum_from_inner(fv)
        out[n] = u
    return FourierRadialForm("0", out)


def residual(u: FourierRadialForm, f: FourierRadialForm, grid: RadialGrid) -> float:
    """Max norm of the mode-wise equation residual, with the radial derivative
    taken by centered differences in x = log(1/r) at interior nodes."""
    _check_grid(u, grid)
    _check_grid(f, grid)
    size = grid.size
    modes = set(u.modes) | {m - 1 for m in f.modes}
    worst = 0.0
    r_in = grid.r[1:-1]
    for n in sorted(modes):
        uv = u.mode(n, size).astype(complex)
        fv = f.mode(n + 1, size).astype(complex)
        dudx = (uv[2:] - uv[:-2]) / (-2.0 * grid.h)
        du_dr = -dudx / r_in
        res = 0.5 * (du_dr - n * uv[1:-1] / r_in) - fv[1:-1]
        if res.size:
            worst = max(worst, float(np.max(np.abs(res))))
    return worst


# -- band-limited random data -------------------------------------------------


def _draw_bumps(rng: np.random.Generator, x_lo: float):
    bumps = []
    for _ in range(3):
        amp = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        center = x_lo + rng.uniform(0.2, 2.0)
        width = rng.uniform(0.15, 0.6)
        bumps.append((amp, center, width))
    return tuple(bumps)


def _eval_bumps(bumps, x: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x, dtype=complex)
    for amp, center, width in bumps:
        total = total + amp * np.exp(-((x - center) ** 2) / (2.0 * width * width))
    return total


def draw_band_limited_profiles(rng: np.random.Generator, n_max: int, outer: float):
    """Grid-independent smooth random mode profiles for |mode| <= n_max.

    Profiles are sums of Gaussian bumps in x placed just inside the outer
    radius, so their mass is captured by every rung of the default epsilon
    ladder and norm ratios can be compared across rungs.
    """
    x_lo = math.log(1.0 / outer)
    return {m: _draw_bumps(rng, x_lo) for m in range(-n_max, n_max + 1)}

def realize_profiles(profiles, grid: RadialGrid) -> FourierRadialForm:
    return FourierRadialForm(
        "01", {m: _eval_bumps(bumps, grid.x) for m, bumps in profiles.items()}
    )


def constant_form(mode: int, grid: RadialGrid) -> FourierRadialForm:
    return FourierRadialForm("01", {mode: np.ones(grid.size)})


def obstruction_form(grid: RadialGrid) -> FourierRadialForm:
    """The designated profile f_1(rho) = 1 / (rho |log rho|^2), mode 1."""
    return FourierRadialForm("01", {1: 1.0 / (grid.r * grid.x ** 2)})


# -- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    k: int
    epsilon: float
    grid_level: int
    sample: int
    norm_f: float
    norm_u: float

    @property
    def ratio(self) -> float:
        return self.norm_u / self.norm_f if self.norm_f > 0 else 0.0

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "k": self.k,
            "epsilon": self.epsilon,
            "grid_level": self.grid_level,
            "sample": self.sample,
            "norm_f": self.norm_f,
            "norm_u": self.norm_u,
            "ratio": self.ratio,
        }


@dataclass
class SweepReport:
    rows: list
    sup_table: list           # per (pair, epsilon, level): sup ratio over samples
    flagged_pairs: list       # pairs whose sup ratio grows >= 2x per decade
    epsilon_ladder: tuple
    grid_levels: tuple
    sample_count: int
    n_max: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "epsilon_ladder": list(self.epsilon_ladder),
            "grid_levels": list(self.grid_levels),
            "sample_count": self.sample_count,
            "n_max": self.n_max,
            "seed": self.seed,
            "rows": [r.as_dict() for r in self.rows],
            "sup_table": self.sup_table,
            "flagged_pairs": self.flagged_pairs,
        }


def _sweep_one_pair(p: WeightedNormParams, profiles, eps_ladder, levels):
    rows = []
    for epsilon in eps_ladder:
        for level in levels:
            grid = RadialGrid.build(epsilon, p.A, level)
            for sample, prof in enumerate(profiles):
                f = realize_profiles(prof, grid)
                u = solve(f, p, grid)
                rows.append(
                    SweepRow(
                        p.alpha, p.k, epsilon, level, sample,
                        norm_form01(f, p, grid), norm_section(u, p, grid),
                    )
                )
    return rows


def bound_sweep(params_list, sample_count: int,
                eps_ladder=DEFAULT_EPSILON_LADDER,
                level: int = DEFAULT_GRID_LEVEL,
                refinements: int = 2,
                n_max: int = DEFAULT_N_MAX,
                seed: int = 0) -> SweepReport:
    """Empirical norm-ratio table over admissible weight parameters.

    For each pair, `sample_count` random band-limited forms are drawn once
    (grid-independent) and solved on every ladder rung and refinement level.
    The report flags any pair whose sup ratio grows monotonically by at least
    a factor 2 per epsilon decade: the bound-violation signal.
    """
    params_list = list(params_list)
    bad = [(p.alpha, p.k) for p in params_list if not admissible(p)]
    if bad:
        raise PreconditionError(f"inadmissible weight parameters in sweep: {bad}")
    if sample_count < 1:
        raise InputStructureError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    profiles = [
        [draw_band_limited_profiles(rng, n_max, p.A) for _ in range(sample_count)]
        for p in params_list
    ]
    levels = tuple(level + i for i in range(max(1, refinements)))
    eps_ladder = tuple(eps_ladder)

    workers = thread_count()
    if workers > 1 and len(params_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_pair = list(
                pool.map(
                    lambda item: _sweep_one_pair(item[0], item[1], eps_ladder, levels),
                    zip(params_list, profiles),
                )
            )
    else:
        per_pair = [
            _sweep_one_pair(p, prof, eps_ladder, levels)
            for p, prof in zip(params_list, profiles)
        ]

    rows = [row for chunk in per_pair for row in chunk]
    sup_table = []
    flagged = []
    finest = levels[-1]
    for p in params_list:
        sups_at_finest = []
        for epsilon in eps_ladder:
            for lvl in levels:
                sup = max(
                    row.ratio
                    for row in rows
                    if (row.alpha, row.k, row.epsilon, row.grid_level)
                    == (p.alpha, p.k, epsilon, lvl)
                )
                sup_table.append(
                    {
                        "alpha": p.alpha,
                        "k": p.k,
                        "epsilon": epsilon,
                        "grid_level": lvl,
                        "sup_ratio": sup,
                    }
                )
                if lvl == finest:
                    sups_at_finest.append((epsilon, sup))
        if _grows_per_decade(sups_at_finest, factor=2.0):
            flagged.append({"alpha": p.alpha, "k": p.k})
    return SweepReport(
        rows, sup_table, flagged, eps_ladder, levels, sample_count, n_max, seed
    )


def _grows_per_decade(eps_sups, factor: float) -> bool:
    if len(eps_sups) < 2:
        return False
    for (e0, s0), (e1, s1) in zip(eps_sups, eps_sups[1:]):
        if s1 <= s0:
            return False
        decades = math.log10(e0 / e1)
        if decades <= 0 or (s1 / s0) ** (1.0 / decades) < factor:
            return False
    return True


# -- the (0, 1) obstruction ---------------------------------------------------


@dataclass
class ObstructionReport:
    rows: list
    fitted_slope: float
    expected_slope: float
    relative_deviation: float
    monotone: bool
    f_drift: float
    control_ratios: list
    outer: float
    grid_level: int

    def as_dict(self) -> dict:
        return {
            "rows": self.rows,
            "fitted_slope": self.fitted_slope,
            "expected_slope": self.expected_slope,
            "relative_deviation": self.relative_deviation,
            "monotone": self.monotone,
            "f_drift": self.f_drift,
            "control_ratios": self.control_ratios,
            "outer": self.outer,
            "grid_level": self.grid_level,
        }


def obstruction_norm_closed_form(epsilon: float, outer: float) -> float:
    """Exact truncated squared norm of the canonical candidate solution for
    the designated profile at (alpha, k) = (0, 1): the integral of
    (c + 2/x)^2 / x over [log(1/A), log(1/eps)] with c = -2 / log(1/A)."""
    x_a = math.log(1.0 / outer)
    x_e = math.log(1.0 / epsilon)
    c = -2.0 / x_a

    def antiderivative(x: float) -> float:
        return c * c * math.log(x) - 4.0 * c / x - 2.0 / (x * x)

    return 2.0 * math.pi * (antiderivative(x_e) - antiderivative(x_a))


def obstruction_demo(eps_ladder=DEFAULT_EPSILON_LADDER,
                     outer: float = DEFAULT_OUTER_RADIUS,
                     level: int = DEFAULT_GRID_LEVEL) -> ObstructionReport:
    """Demonstrate unbounded growth at (alpha, k) = (0, 1).

    The designated profile has epsilon-stable finite norm, while the candidate
    solution tends to the nonzero constant c = -2/log(1/A) at the puncture, so
    its squared norm grows like c^2 log log(1/epsilon). The report fits the
    growth against log|log epsilon| and carries the k = 0 control ratios,
    which stay bounded.
    """
    p_obstructed = WeightedNormParams(0.0, 1, outer)
    p_control = WeightedNormParams(0.0, 0, outer)
    rows = []
    control = []
    for epsilon in eps_ladder:
        grid = RadialGrid.build(epsilon, outer, level)
        f = obstruction_form(grid)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AdmissibilityWarning)
            u = solve(f, p_obstructed, grid)
        rows.append(
            {
                "epsilon": epsilon,
                "norm_f": norm_form01(f, p_obstructed, grid),
                "norm_u": norm_section(u, p_obstructed, grid),
                "norm_u_closed_form": obstruction_norm_closed_form(epsilon, outer),
            }
        )
        u_control = solve(f, p_control, grid)
        nf0 = norm_form01(f, p_control, grid)
        control.append(
            {
                "epsilon": epsilon,
                "ratio": norm_section(u_control, p_control, grid) / nf0,
            }
        )
    ts = np.array([math.log(math.log(1.0 / row["epsilon"])) for row in rows])
    ys = np.array([row["norm_u"] for row in rows])
    slope = float(np.polyfit(ts, ys, 1)[0]) if len(rows) > 1 else 0.0
    x_a = math.log(1.0 / outer)
    expected = 2.0 * math.pi * (2.0 / x_a) ** 2
    monotone = bool(np.all(np.diff(ys) > 0))
    nf = [row["norm_f"] for row in rows]
    return ObstructionReport(
        rows,
        slope,
        expected,
        abs(slope - expected) / expected,
        monotone,
        max(nf) / min(nf),
        control,
        outer,
        level,
    )


# -- the Higgs-field model bound ----------------------------------------------


@dataclass(frozen=True)
class ThetaModel:
    """The operator v -> (dt/t) (x) N v against a filtration-adapted frame
    with model norm exponents."""

    nilpotent: NilpotentEndomorphism
    filtration: WeightFiltration
    frame: ModelMetricFrame

    @classmethod
    def from_nilpotent(cls, n_endo: NilpotentEndomorphism) -> "ThetaModel":
        wf = build_weight_filtration(n_endo)
        return cls(n_endo, wf, model_frame(wf))


def _abs_sq(scalar) -> float:
    if isinstance(scalar, GaussianRational):
        return float(scalar.real) ** 2 + float(scalar.imag) ** 2
    return float(scalar) ** 2


def theta_bound_check(model: ThetaModel, grid: RadialGrid) -> dict:
    """Exponent identity plus a grid sweep of the norm ratio
    ||(dt/t) (x) N e_i||^2 / ||e_i||^2 for every frame vector.

    Applying N must drop the exponent by exactly 2, the squared norm of dt/t
    contributes |log r|^2, so the pointwise ratio is bounded and r-stable.
    """
    frame_basis = Matrix.from_columns(
        model.frame.vectors, nrows=model.nilpotent.size
    )
    x = grid.x
    entries = []
    all_ok = True
    for i, (vec, w) in enumerate(zip(model.frame.vectors, model.frame.exponents)):
        image = model.nilpotent.matrix.apply(vec)
        if not any(image):
            entries.append(
                {
                    "index": i,
                    "exponent": w,
                    "image_zero": True,
                    "exponent_ok": True,
                    "ratio_min": 0.0,
                    "ratio_max": 0.0,
                    "drift": 1.0,
                    "ok": True,
                }
            )
            continue
        w_image = vector_weight(model.filtration, image)
        exponent_ok = w_image == w - 2
        coords = solve_in_span(frame_basis, image)
        if coords is None:
            raise InconsistencyError("frame does not span the image of N")
        norm_image_sq = np.zeros_like(x)
        for c, w_j in zip(coords, model.frame.exponents):
            if c:
                norm_image_sq = norm_image_sq + _abs_sq(c) * x ** w_j
        ratio = (x ** 2) * norm_image_sq / (x ** w)
        rmin, rmax = float(ratio.min()), float(ratio.max())
        drift = rmax / rmin if rmin > 0 else math.inf
        ok = exponent_ok and math.isfinite(rmax) and drift < 1.5
        all_ok = all_ok and ok
        entries.append(
            {
                "index": i,
                "exponent": w,
                "image_zero": False,
                "image_exponent": w_image,
                "exponent_ok": exponent_ok,
                "ratio_min": rmin,
                "ratio_max": rmax,
                "drift": drift,
                "ok": ok,
            }
        )
    return {"entries": entries, "ok": all_ok}


# -- untwisting ---------------------------------------------------------------


def matrix_to_complex(m: Matrix) -> np.ndarray:
    out = np.zeros((m.nrows, m.ncols), dtype=complex)
    for i in range(m.nrows):
        for j in range(m.ncols):
            e = m.rows[i][j]
            out[i, j] = complex(e) if isinstance(e, GaussianRational) else float(e)
    return out


def expm_nilpotent(m: np.ndarray) -> np.ndarray:
    """Finite exponential series; exact for nilpotent m up to roundoff."""
    n = m.shape[0]
    total = np.eye(n, dtype=complex)
    power = np.eye(n, dtype=complex)
    for i in range(1, n):
        power = power @ m / i
        total = total + power
    return total


def untwist_check(n_endo: NilpotentEndomorphism, v, r0: float = 0.05,
                  n_theta: int = 64) -> dict:
    """Single-valuedness of the untwisted section around the puncture.

    The section exp(N log t / (2 pi i)) v is evaluated along theta in
    [0, 2 pi] at radius r0; going once around must multiply the starting
    value by the monodromy exp(N)."""
    if not 0 < r0 < 1:
        raise InputStructureError("r0 must lie in (0, 1)")
    nf = matrix_to_complex(n_endo.matrix)
    v0 = np.array([complex(e) if isinstance(e, GaussianRational) else float(e) for e in v])
    thetas = np.linspace(0.0, 2.0 * math.pi, n_theta + 1)
    factor = 1.0 / (2.0 * math.pi * 1j)
    values = [
        expm_nilpotent(nf * (factor * (math.log(r0) + 1j * t))) @ v0 for t in thetas
    ]
    monodromy = expm_nilpotent(nf)
    mismatch = float(np.max(np.abs(values[-1] - monodromy @ values[0])))
    return {
        "mismatch": mismatch,
        "r0": r0,
        "angular_samples": n_theta + 1,
    }


# -- adapted frames -----------------------------------------------------------


def l2_adapted_check(exponents, p: WeightedNormParams, sample_count: int,
                     eps_ladder=DEFAULT_EPSILON_LADDER,
                     level: int = DEFAULT_GRID_LEVEL,
                     seed: int = 0) -> dict:
    """Contrapositive finiteness check for a diagonal-metric frame.

    A frame is adapted when finiteness of ||sum f_i e_i|| forces finiteness
    of every ||f_i e_i||; equivalently one divergent term must make the sum
    divergent. Terms and sums are classified by their growth across the
    epsilon ladder. Under a diagonal metric distinct frame vectors cannot
    cancel, so every case must come out consistent.
    """
    exponents = [int(w) for w in exponents]
    rng = np.random.default_rng(seed)
    x_lo = math.log(1.0 / p.A)

    cases = []
    for s in range(sample_count):
        cases.append(
            ("random_smooth", [_draw_bumps(rng, x_lo) for _ in exponents])
        )
    cases.append(("constants", ["const"] * len(exponents)))
    cases.append(
        ("alternating_constants", ["const" if i % 2 == 0 else "neg_const"
                                   for i in range(len(exponents))])
    )

    def coefficient(spec, grid):
        if spec == "const":
            return np.ones(grid.size, dtype=complex)
        if spec == "neg_const":
            return -np.ones(grid.size, dtype=complex)
        return _eval_bumps(spec, grid.x)

    def classify(values) -> bool:
        tail = values[-1] - values[-2]
        return values[-1] > 0 and tail / values[-1] > 0.05

    results = []
    all_consistent = True
    for tag, specs in cases:
        term_values = [[] for _ in exponents]
        sum_values = []
        for epsilon in eps_ladder:
            grid = RadialGrid.build(epsilon, p.A, level)
            density = np.zeros(grid.size)
            for i, (spec, w) in enumerate(zip(specs, exponents)):
                coeff = coefficient(spec, grid)
                term_density = np.abs(coeff) ** 2 * grid.x ** w
                density = density + term_density
                term_values[i].append(
                    2.0 * math.pi
                    * grid.integrate_dr(term_density * grid.x ** (-2)
                                        * grid.r ** (p.alpha - 1.0))
                )
            sum_values.append(
                2.0 * math.pi
                * grid.integrate_dr(density * grid.x ** (-2)
                                    * grid.r ** (p.alpha - 1.0))
            )
        term_divergent = [classify(v) for v in term_values]
        sum_divergent = classify(sum_values)
        consistent = sum_divergent or not any(term_divergent)
        all_consistent = all_consistent and consistent
        results.append(
            {
                "case": tag,
                "term_divergent": term_divergent,
                "sum_divergent": sum_divergent,
                "consistent": consistent,
            }
        )
    return {
        "verdict": "adapted" if all_consistent else "not_adapted",
        "exponents": exponents,
        "cases": results,
    }
