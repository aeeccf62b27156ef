"""cuspcoho: weight filtrations, cusp cohomology and a weighted dbar solver.

Core subpackages are pure and exact (monodromy, weight_filtration,
cohomology, spectral) or numpy-based (dbar). The FastAPI service in
`cuspcoho.service` wraps them with pydantic request/response models; the
command line in `cuspcoho.cli` is a thin client of that service.
"""

__version__ = "0.1.0"

from .linalg import GaussianRational, Matrix, format_scalar, parse_scalar
from .monodromy import (
    NilpotentEndomorphism,
    PuncturedSurfaceRep,
    ValidationReport,
    commutant_dimension,
    dual_rep,
    invariant_subspace,
    nilpotent_log,
    unipotent_exp,
    validate,
)
from .weight_filtration import (
    ModelMetricFrame,
    WeightFiltration,
    build_weight_filtration,
    graded_dimensions,
    model_frame,
    vector_weight,
)
from .cohomology import (
    GlobalCohomologyDims,
    StalkCohomologyRow,
    global_dims,
    jstar_stalk,
    parabolic_h1,
    rank1_stalks,
    stalk_report,
)
from .spectral import (
    DegenerationCertificate,
    FilteredComplexModel,
    SpectralPage,
    apply_d2,
    build_e1,
    check_d1_trivial,
    degeneration_certificate,
    spectral_report,
)
from .dbar import (
    FourierRadialForm,
    RadialGrid,
    ThetaModel,
    WeightedNormParams,
    admissible,
    bound_sweep,
    l2_adapted_check,
    norm_form01,
    norm_section,
    obstruction_demo,
    residual,
    solve,
    theta_bound_check,
    untwist_check,
)
