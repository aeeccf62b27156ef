"""Pydantic request/response models: the published wire schema."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

MatrixDoc = list[list[Union[int, str]]]


class RepresentationDoc(BaseModel):
    genus: int = Field(ge=0)
    punctures: int = Field(ge=1)
    rank: int = Field(ge=1)
    A: list[MatrixDoc]
    B: list[MatrixDoc]
    C: list[MatrixDoc]


class RepresentationRequest(BaseModel):
    representation: RepresentationDoc


class ValidationResponse(BaseModel):
    relation_ok: bool
    unipotency_ok: list[bool]
    invertibility_ok: bool
    ok: bool


class CuspLog(BaseModel):
    cusp: int
    nilpotency_index: int
    matrix: list[list[str]]


class LogResponse(BaseModel):
    cusps: list[CuspLog]


class FiltrationReport(BaseModel):
    cusp: int
    weight: int
    graded_dims: dict[str, int]
    strings: list[list[list[str]]]
    frame_exponents: list[int]


class FiltrationResponse(BaseModel):
    cusps: list[FiltrationReport]


class StalkRow(BaseModel):
    cusp: int
    kernel_dim: int
    stalk: list[int]


class StalksResponse(BaseModel):
    cusps: list[StalkRow]


class SpectralEntryModel(BaseModel):
    p: int
    q: int
    dim: int
    m1_slots: int
    descriptor: str


class SpectralDifferentialModel(BaseModel):
    source: list[int]
    target: list[int]
    rank: int
    iso: bool
    kind: str


class SpectralPageModel(BaseModel):
    r: int
    entries: list[SpectralEntryModel]
    differentials: list[SpectralDifferentialModel]


class CertificateModel(BaseModel):
    stalk_h0: int
    stalk_h1: int
    stalk_h2: int
    survivor_positions: list[list[int]]
    certified: bool


class D1Certificate(BaseModel):
    weight: int
    included_in: int
    ok: bool


class SpectralCuspReport(BaseModel):
    cusp: int
    weight: int
    graded_dims: dict[str, int]
    d1_certificates: list[D1Certificate]
    pages: list[SpectralPageModel]
    certificate: CertificateModel


class SpectralRequest(RepresentationRequest):
    render: bool = False


class SpectralResponse(BaseModel):
    cusps: list[SpectralCuspReport]
    text: Optional[str] = None


class CuspCohomology(BaseModel):
    cusp: int
    kernel_dim: int
    stalk: list[int]
    certificate: CertificateModel


class CohomologyResponse(BaseModel):
    h0: int
    h1: int
    h2: int
    euler: int
    h1_parabolic: int
    consistent: bool
    per_cusp_kernel_dims: list[int]
    cusps: list[CuspCohomology]


# -- dbar ---------------------------------------------------------------------


class DbarSolveRequest(BaseModel):
    alpha: float = Field(ge=0, lt=1)
    k: int
    A: float = Field(default=0.5, gt=0, lt=1)
    epsilon: float = Field(default=1e-6, gt=0)
    grid_level: int = Field(default=12, ge=2, le=22)
    profile: Literal["const", "obstruction", "random"] = "const"
    mode: int = 1
    n_max: int = Field(default=8, ge=0, le=64)
    seed: int = 0


class ModeSamples(BaseModel):
    f_re: Optional[list[float]] = None
    f_im: Optional[list[float]] = None
    u_re: Optional[list[float]] = None
    u_im: Optional[list[float]] = None


class DbarSolveResponse(BaseModel):
    alpha: float
    k: int
    A: float
    epsilon: float
    grid_level: int
    admissible: bool
    profile: str
    seed: int
    r: list[float]
    modes: dict[str, ModeSamples]
    norm_f: float
    norm_u: float
    residual: float


class DbarSweepRequest(BaseModel):
    alphas: list[float] = Field(default=[0.0, 0.25, 0.5, 0.75])
    ks: list[int] = Field(default=list(range(-3, 4)))
    A: float = Field(default=0.5, gt=0, lt=1)
    epsilon_ladder: list[float] = Field(default=[1e-2, 1e-4, 1e-6])
    grid_level: int = Field(default=12, ge=2, le=22)
    refinements: int = Field(default=2, ge=1, le=4)
    samples: int = Field(default=20, ge=1)
    n_max: int = Field(default=8, ge=0, le=64)
    seed: int = 0
    skip_inadmissible: bool = True


class SweepRowModel(BaseModel):
    alpha: float
    k: int
    epsilon: float
    grid_level: int
    sample: int
    norm_f: float
    norm_u: float
    ratio: float


class SupRowModel(BaseModel):
    alpha: float
    k: int
    epsilon: float
    grid_level: int
    sup_ratio: float


class DbarSweepResponse(BaseModel):
    alphas: list[float]
    ks: list[int]
    A: float
    epsilon_ladder: list[float]
    grid_levels: list[int]
    samples: int
    n_max: int
    seed: int
    rows: list[SweepRowModel]
    sup_table: list[SupRowModel]
    flagged_pairs: list[dict]


class DbarObstructionRequest(BaseModel):
    A: float = Field(default=0.5, gt=0, lt=1)
    epsilon_ladder: list[float] = Field(default=[1e-2, 1e-4, 1e-6])
    grid_level: int = Field(default=12, ge=2, le=22)


class ObstructionRow(BaseModel):
    epsilon: float
    norm_f: float
    norm_u: float
    norm_u_closed_form: float


class ControlRow(BaseModel):
    epsilon: float
    ratio: float


class DbarObstructionResponse(BaseModel):
    A: float
    epsilon_ladder: list[float]
    grid_level: int
    rows: list[ObstructionRow]
    fitted_slope: float
    expected_slope: float
    relative_deviation: float
    monotone: bool
    f_drift: float
    control_ratios: list[ControlRow]


class ErrorBody(BaseModel):
    kind: Literal["parse", "validation", "inconsistency", "internal"]
    message: str


class DefaultsResponse(BaseModel):
    A: float
    epsilon_ladder: list[float]
    grid_level: int
    n_max: int
    threads_env: str
