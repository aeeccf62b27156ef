"""FastAPI service wrapping the core analyses.

Every endpoint is stateless: representations and solver configurations come
in as JSON, reports go out as JSON matching the models in `models`. The CLI
drives this app in-process; `uvicorn cuspcoho.service.app:app` serves it to
remote clients.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..cohomology import global_dims, jstar_stalk
from ..dbar import (
    RadialGrid,
    WeightedNormParams,
    admissible,
    bound_sweep,
    constant_form,
    draw_band_limited_profiles,
    norm_form01,
    norm_section,
    obstruction_demo,
    obstruction_form,
    realize_profiles,
    residual,
    solve,
    DEFAULT_EPSILON_LADDER,
    DEFAULT_GRID_LEVEL,
    DEFAULT_N_MAX,
    DEFAULT_OUTER_RADIUS,
    THREADS_ENV,
)
from ..errors import (
    CertificationError,
    InconsistencyError,
    InputStructureError,
    PreconditionError,
)
from ..monodromy import (
    PuncturedSurfaceRep,
    cusp_logarithms,
    nilpotent_log,
    require_valid,
    validate,
)
from ..spectral import (
    FilteredComplexModel,
    degeneration_certificate,
    render_report,
    spectral_report,
)
from ..weight_filtration import build_weight_filtration
from . import models as m


def _rep(doc: m.RepresentationDoc) -> PuncturedSurfaceRep:
    return PuncturedSurfaceRep.from_document(doc.model_dump())


def create_app() -> FastAPI:
    app = FastAPI(title="cuspcoho", version=__version__)

    @app.exception_handler(InputStructureError)
    async def _parse_error(request: Request, exc: InputStructureError):
        return JSONResponse(status_code=400,
                            content={"kind": "parse", "message": str(exc)})

    @app.exception_handler(PreconditionError)
    async def _validation_error(request: Request, exc: PreconditionError):
        return JSONResponse(status_code=400,
                            content={"kind": "validation", "message": str(exc)})

    @app.exception_handler(InconsistencyError)
    async def _inconsistency_error(request: Request, exc: InconsistencyError):
        return JSONResponse(status_code=409,
                            content={"kind": "inconsistency", "message": str(exc)})

    @app.exception_handler(CertificationError)
    async def _certification_error(request: Request, exc: CertificationError):
        return JSONResponse(status_code=500,
                            content={"kind": "internal", "message": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.get("/defaults", response_model=m.DefaultsResponse)
    def defaults():
        return m.DefaultsResponse(
            A=DEFAULT_OUTER_RADIUS,
            epsilon_ladder=list(DEFAULT_EPSILON_LADDER),
            grid_level=DEFAULT_GRID_LEVEL,
            n_max=DEFAULT_N_MAX,
            threads_env=THREADS_ENV,
        )

    @app.post("/validate", response_model=m.ValidationResponse)
    def validate_endpoint(req: m.RepresentationRequest):
        report = validate(_rep(req.representation))
        return m.ValidationResponse(**report.as_dict())

    @app.post("/log", response_model=m.LogResponse)
    def log_endpoint(req: m.RepresentationRequest):
        rep = _rep(req.representation)
        cusps = [
            m.CuspLog(
                cusp=j,
                nilpotency_index=ne.nilpotency_index,
                matrix=ne.matrix.to_strings(),
            )
            for j, ne in enumerate(cusp_logarithms(rep))
        ]
        return m.LogResponse(cusps=cusps)

    @app.post("/filtration", response_model=m.FiltrationResponse)
    def filtration_endpoint(req: m.RepresentationRequest):
        rep = _rep(req.representation)
        out = []
        for j, ne in enumerate(cusp_logarithms(rep)):
            report = build_weight_filtration(ne).as_report()
            out.append(m.FiltrationReport(cusp=j, **report))
        return m.FiltrationResponse(cusps=out)

    @app.post("/stalks", response_model=m.StalksResponse)
    def stalks_endpoint(req: m.RepresentationRequest):
        from ..cohomology import stalk_report

        rows = stalk_report(_rep(req.representation))
        return m.StalksResponse(cusps=[m.StalkRow(**row) for row in rows])

    @app.post("/cohomology", response_model=m.CohomologyResponse)
    def cohomology_endpoint(req: m.RepresentationRequest):
        rep = _rep(req.representation)
        dims = global_dims(rep)
        cusps = []
        for j in range(rep.punctures):
            cert = degeneration_certificate(
                FilteredComplexModel.from_nilpotent(nilpotent_log(rep.cusp_matrices[j]))
            )
            cusps.append(
                m.CuspCohomology(
                    cusp=j,
                    kernel_dim=jstar_stalk(rep, j).ncols,
                    stalk=[cert.stalk_h0, cert.stalk_h1, cert.stalk_h2],
                    certificate=m.CertificateModel(**cert.as_dict()),
                )
            )
        return m.CohomologyResponse(
            h0=dims.h0,
            h1=dims.h1,
            h2=dims.h2,
            euler=dims.euler,
            h1_parabolic=dims.h1_parabolic,
            consistent=dims.consistent,
            per_cusp_kernel_dims=list(dims.per_cusp_kernel_dims),
            cusps=cusps,
        )

    @app.post("/spectral", response_model=m.SpectralResponse)
    def spectral_endpoint(req: m.SpectralRequest):
        rep = _rep(req.representation)
        require_valid(rep)
        cusps = []
        texts = []
        for j in range(rep.punctures):
            ne = nilpotent_log(rep.cusp_matrices[j])
            report = spectral_report(ne)
            cusps.append(m.SpectralCuspReport(cusp=j, **report))
            if req.render:
                texts.append(f"cusp {j}\n{render_report(ne)}")
        return m.SpectralResponse(
            cusps=cusps, text="\n\n".join(texts) if req.render else None
        )

    @app.post("/dbar/solve", response_model=m.DbarSolveResponse)
    def dbar_solve_endpoint(req: m.DbarSolveRequest):
        p = WeightedNormParams(req.alpha, req.k, req.A)
        if not admissible(p):
            raise PreconditionError(
                f"(alpha, k) = ({req.alpha}, {req.k}) is not admissible for solve"
            )
        grid = RadialGrid.build(req.epsilon, req.A, req.grid_level)
        if req.profile == "const":
            f = constant_form(req.mode, grid)
        elif req.profile == "obstruction":
            f = obstruction_form(grid)
        else:
            rng = np.random.default_rng(req.seed)
            f = realize_profiles(
                draw_band_limited_profiles(rng, req.n_max, req.A), grid
            )
        u = solve(f, p, grid)
        modes = {}
        for n in sorted(set(u.modes) | set(f.modes)):
            entry = m.ModeSamples()
            if n in f.modes:
                arr = np.asarray(f.modes[n], dtype=complex)
                entry.f_re = np.real(arr).tolist()
                entry.f_im = np.imag(arr).tolist()
            if n in u.modes:
                arr = np.asarray(u.modes[n], dtype=complex)
                entry.u_re = np.real(arr).tolist()
                entry.u_im = np.imag(arr).tolist()
            modes[str(n)] = entry
        return m.DbarSolveResponse(
            alpha=req.alpha,
            k=req.k,
            A=req.A,
            epsilon=req.epsilon,
            grid_level=req.grid_level,
            admissible=True,
            profile=req.profile,
            seed=req.seed,
            r=grid.r.tolist(),
            modes=modes,
            norm_f=norm_form01(f, p, grid),
            norm_u=norm_section(u, p, grid),
            residual=residual(u, f, grid),
        )

    @app.post("/dbar/sweep", response_model=m.DbarSweepResponse)
    def dbar_sweep_endpoint(req: m.DbarSweepRequest):
        pairs = []
        for alpha in req.alphas:
            for k in req.ks:
                p = WeightedNormParams(alpha, k, req.A)
                if not admissible(p):
                    if req.skip_inadmissible:
                        continue
                    raise PreconditionError(
                        f"inadmissible pair (alpha, k) = ({alpha}, {k}) in sweep"
                    )
                pairs.append(p)
        if not pairs:
            raise PreconditionError("sweep has no admissible pairs")
        report = bound_sweep(
            pairs,
            sample_count=req.samples,
            eps_ladder=tuple(req.epsilon_ladder),
            level=req.grid_level,
            refinements=req.refinements,
            n_max=req.n_max,
            seed=req.seed,
        )
        return m.DbarSweepResponse(
            alphas=req.alphas,
            ks=req.ks,
            A=req.A,
            epsilon_ladder=list(report.epsilon_ladder),
            grid_levels=list(report.grid_levels),
            samples=report.sample_count,
            n_max=report.n_max,
            seed=report.seed,
            rows=[m.SweepRowModel(**row.as_dict()) for row in report.rows],
            sup_table=[m.SupRowModel(**row) for row in report.sup_table],
            flagged_pairs=report.flagged_pairs,
        )

    @app.post("/dbar/obstruction", response_model=m.DbarObstructionResponse)
    def dbar_obstruction_endpoint(req: m.DbarObstructionRequest):
        report = obstruction_demo(
            eps_ladder=tuple(req.epsilon_ladder),
            outer=req.A,
            level=req.grid_level,
        )
        return m.DbarObstructionResponse(
            A=req.A,
            epsilon_ladder=req.epsilon_ladder,
            grid_level=req.grid_level,
            rows=[m.ObstructionRow(**row) for row in report.rows],
            fitted_slope=report.fitted_slope,
            expected_slope=report.expected_slope,
            relative_deviation=report.relative_deviation,
            monotone=report.monotone,
            f_drift=report.f_drift,
            control_ratios=[m.ControlRow(**row) for row in report.control_ratios],
        )

    return app


app = create_app()
