"""Weight-filtered spectral bookkeeping for the local complex at a cusp.

The filtration of the weighted two-step complex by the weight subspaces has
first page populated, weight piece by weight piece, from the rank-1 stalk
table (`cohomology.rank1_stalks` at exponent k = -p for the piece placed in
column p). The one-step differential vanishes because applying N lands two
filtration steps lower (`check_d1_trivial` certifies the inclusions), the
two-step differential acts through N on graded pieces (`apply_d2`, exact
rank arithmetic), and after it nothing is left outside total degree zero:
`degeneration_certificate` checks that and returns the surviving stalk
dimensions (dim ker N, 0, 0).

Pieces whose stalk entry is the symbolic M1 obstruction are tracked as
marker slots, never as numeric dimensions; a marker can only be cancelled
against its partner slot through an isomorphism on graded pieces.

Positions follow the step-two weight indexing: only nonempty weights are
stored, so a single block of weight m has its lone survivor at (m, -m).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohomology import H0Kind, H1Kind, H2Kind, rank1_stalks
from .errors import CertificationError
from .linalg import shift_matrix
from .monodromy import NilpotentEndomorphism
from .weight_filtration import (
    WeightFiltration,
    build_weight_filtration,
    graded_dimensions,
    induced_graded_map_rank,
    model_frame,
    vector_weight,
)


@dataclass(frozen=True)
class FilteredComplexModel:
    filtration: WeightFiltration
    piece_exponents: dict  # weight l -> model norm exponent (= l)
    graded_piece_dims: dict  # weight l -> dim Gr_l

    @classmethod
    def from_filtration(cls, wf: WeightFiltration) -> "FilteredComplexModel":
        dims = graded_dimensions(wf)
        return cls(wf, {l: l for l in dims}, dims)

    @classmethod
    def from_nilpotent(cls, n_endo: NilpotentEndomorphism) -> "FilteredComplexModel":
        return cls.from_filtration(build_weight_filtration(n_endo))


@dataclass
class PageEntry:
    dim: int = 0
    m1_slots: int = 0
    descriptor: str = ""

    def nonzero(self) -> bool:
        return self.dim > 0 or self.m1_slots > 0

    def as_dict(self, p: int, q: int) -> dict:
        return {
            "p": p,
            "q": q,
            "dim": self.dim,
            "m1_slots": self.m1_slots,
            "descriptor": self.descriptor,
        }


@dataclass
class Differential:
    source: tuple
    target: tuple
    rank: int
    iso: bool
    kind: str  # "dim" or "m1"

    def as_dict(self) -> dict:
        return {
            "source": list(self.source),
            "target": list(self.target),
            "rank": self.rank,
            "iso": self.iso,
            "kind": self.kind,
        }


@dataclass
class SpectralPage:
    page_index: int
    entries: dict  # (p, q) -> PageEntry
    differentials: list = field(default_factory=list)

    def entry(self, p: int, q: int) -> PageEntry:
        return self.entries.get((p, q), PageEntry())

    def total_degree_dims(self) -> dict:
        out: dict[int, int] = {}
        for (p, q), e in self.entries.items():
            if e.nonzero():
                out[p + q] = out.get(p + q, 0) + e.dim + e.m1_slots
        return out

    def as_dict(self) -> dict:
        return {
            "r": self.page_index,
            "entries": [
                e.as_dict(p, q)
                for (p, q), e in sorted(self.entries.items())
                if e.nonzero()
            ],
            "differentials": [d.as_dict() for d in self.differentials],
        }


def build_e1(model: FilteredComplexModel) -> SpectralPage:
    """First page: the rank-1 stalk table applied to every graded piece.

    The piece of weight w sits in column p = -w with norm exponent k = w;
    its stalk row lands at (p, -p), (p, 1-p), (p, 2-p) for degrees 0, 1, 2.
    """
    entries: dict[tuple, PageEntry] = {}
    for w, d in sorted(model.graded_piece_dims.items()):
        if d == 0:
            continue
        p = -w
        k = model.piece_exponents[w]
        row = rank1_stalks(k)
        if row.h0 is H0Kind.FULL_V:
            entries[(p, -p)] = PageEntry(dim=d, descriptor=H0Kind.FULL_V.value)
        if row.h1 is H1Kind.DT_OVER_T_TENSOR_V:
            entries[(p, 1 - p)] = PageEntry(
                dim=d, descriptor=H1Kind.DT_OVER_T_TENSOR_V.value
            )
        elif row.h1 is H1Kind.M1_OBSTRUCTION:
            entries[(p, 1 - p)] = PageEntry(
                m1_slots=d, descriptor=H1Kind.M1_OBSTRUCTION.value
            )
        if row.h2 is H2Kind.M1_OBSTRUCTION:
            entries[(p, 2 - p)] = PageEntry(
                m1_slots=d, descriptor=H2Kind.M1_OBSTRUCTION.value
            )
    return SpectralPage(1, entries)


def check_d1_trivial(model: FilteredComplexModel) -> list[dict]:
    """Certify N W_l <= W_{l-2} for every filtration step; these inclusions
    are what make the one-step induced map vanish identically."""
    from .linalg import Matrix, span_leq

    wf = model.filtration
    n = wf.source.matrix
    certificates = []
    for l in range(-wf.weight, wf.weight + 1):
        basis = wf.subspace(l)
        mapped = Matrix.from_columns(
            [n.apply(v) for v in basis.columns()], nrows=wf.size
        )
        if not span_leq(mapped, wf.subspace(l - 2)):
            raise CertificationError(f"inclusion N W_{l} <= W_{l - 2} fails")
        certificates.append({"weight": l, "included_in": l - 2, "ok": True})
    return certificates


def e2_page(e1: SpectralPage) -> SpectralPage:
    """Second page: identical entries, since the one-step map is trivial."""
    entries = {
        pos: PageEntry(e.dim, e.m1_slots, e.descriptor) for pos, e in e1.entries.items()
    }
    return SpectralPage(2, entries)


def apply_d2(page: SpectralPage, model: FilteredComplexModel) -> SpectralPage:
    """Run the two-step differential induced by N on graded pieces and return
    the third page. The arrows found (with exact ranks) are recorded on the
    passed second page."""
    if page.page_index != 2:
        raise CertificationError("apply_d2 expects the second page")
    wf = model.filtration
    arrows: list[Differential] = []
    out_rank: dict[tuple, int] = {}
    in_rank: dict[tuple, int] = {}
    out_m1: dict[tuple, int] = {}
    in_m1: dict[tuple, int] = {}

    for (p, q), src in sorted(page.entries.items()):
        if not src.nonzero():
            continue
        tpos = (p + 2, q - 1)
        tgt = page.entries.get(tpos)
        if tgt is None or not tgt.nonzero():
            continue
        w_src = -p
        rank = induced_graded_map_rank(wf, w_src)
        if src.dim > 0 and tgt.dim > 0:
            arrows.append(
                Differential(
                    (p, q), tpos, rank, rank == src.dim == tgt.dim, "dim"
                )
            )
            out_rank[(p, q)] = rank
            in_rank[tpos] = rank
        elif src.m1_slots > 0 and tgt.m1_slots > 0:
            killed = min(src.m1_slots, tgt.m1_slots, rank)
            arrows.append(
                Differential(
                    (p, q),
                    tpos,
                    killed,
                    killed == src.m1_slots == tgt.m1_slots,
                    "m1",
                )
            )
            out_m1[(p, q)] = killed
            in_m1[tpos] = killed

    page.differentials = arrows
    entries: dict[tuple, PageEntry] = {}
    for pos, e in page.entries.items():
        dim = e.dim - out_rank.get(pos, 0) - in_rank.get(pos, 0)
        m1 = e.m1_slots - out_m1.get(pos, 0) - in_m1.get(pos, 0)
        if dim < 0 or m1 < 0:
            raise CertificationError(f"negative subquotient at {pos}")
        if dim > 0 or m1 > 0:
            entries[pos] = PageEntry(dim, m1, e.descriptor)
    return SpectralPage(3, entries)


@dataclass(frozen=True)
class DegenerationCertificate:
    stalk_h0: int
    stalk_h1: int
    stalk_h2: int
    survivor_positions: tuple
    certified: bool

    def as_dict(self) -> dict:
        return {
            "stalk_h0": self.stalk_h0,
            "stalk_h1": self.stalk_h1,
            "stalk_h2": self.stalk_h2,
            "survivor_positions": [list(pos) for pos in self.survivor_positions],
            "certified": self.certified,
        }


def page_sequence(model: FilteredComplexModel):
    """E1, E2 (with the recorded two-step arrows) and E3 for one model."""
    e1 = build_e1(model)
    check_d1_trivial(model)
    e2 = e2_page(e1)
    e3 = apply_d2(e2, model)
    return e1, e2, e3


def _certificate_from_e3(e3: SpectralPage) -> DegenerationCertificate:
    by_degree = e3.total_degree_dims()
    survivors = tuple(sorted(pos for pos, e in e3.entries.items() if e.nonzero()))
    h0 = by_degree.get(0, 0)
    h1 = by_degree.get(1, 0)
    h2 = by_degree.get(2, 0)
    if h1 or h2 or any(p + q != 0 for p, q in survivors):
        raise CertificationError(
            f"third-page survivors outside total degree 0: {survivors}"
        )
    return DegenerationCertificate(h0, h1, h2, survivors, True)


def degeneration_certificate(model: FilteredComplexModel) -> DegenerationCertificate:
    """Run the page pipeline block by block and aggregate.

    Every quantity involved is additive over Jordan blocks, so the blocks of
    the filtration's strings are processed independently; survivors merge by
    position. Degree-0 survivors total dim ker N, degrees 1 and 2 are empty,
    and any violation raises CertificationError.
    """
    h0 = 0
    survivor_count: dict[tuple, int] = {}
    for string in model.filtration.strings:
        block = FilteredComplexModel.from_nilpotent(
            NilpotentEndomorphism.from_matrix(shift_matrix(len(string)))
        )
        _, _, e3 = page_sequence(block)
        cert = _certificate_from_e3(e3)
        h0 += cert.stalk_h0
        for pos in cert.survivor_positions:
            survivor_count[pos] = survivor_count.get(pos, 0) + 1
    survivors = tuple(sorted(survivor_count))
    return DegenerationCertificate(h0, 0, 0, survivors, True)


def degeneration_certificate_for(n_endo: NilpotentEndomorphism) -> DegenerationCertificate:
    return degeneration_certificate(FilteredComplexModel.from_nilpotent(n_endo))


def spectral_report(n_endo: NilpotentEndomorphism) -> dict:
    """Full three-page report for one nilpotent endomorphism, with the
    per-block degeneration certificate attached."""
    model = FilteredComplexModel.from_nilpotent(n_endo)
    e1, e2, e3 = page_sequence(model)
    cert = degeneration_certificate(model)
    return {
        "weight": model.filtration.weight,
        "graded_dims": {str(l): d for l, d in sorted(model.graded_piece_dims.items())},
        "d1_certificates": check_d1_trivial(model),
        "pages": [e1.as_dict(), e2.as_dict(), e3.as_dict()],
        "certificate": cert.as_dict(),
    }


def render_page(page: SpectralPage) -> str:
    """Plain-text grid of one page, rows by q (descending), columns by p."""
    live = [(pos, e) for pos, e in sorted(page.entries.items()) if e.nonzero()]
    if not live:
        return f"E_{page.page_index}: empty page"
    ps = sorted({p for (p, _), _ in live})
    qs = sorted({q for (_, q), _ in live}, reverse=True)

    def cell(p, q):
        e = page.entry(p, q)
        if not e.nonzero():
            return "."
        parts = []
        if e.dim:
            parts.append(str(e.dim))
        if e.m1_slots:
            parts.append(f"M1x{e.m1_slots}")
        return "+".join(parts)

    width = max(
        [len(cell(p, q)) for p in ps for q in qs] + [len(str(p)) for p in ps] + [2]
    )
    header = "q\\p".rjust(5) + " " + " ".join(str(p).rjust(width) for p in ps)
    lines = [f"E_{page.page_index}", header]
    for q in qs:
        lines.append(
            str(q).rjust(5) + " " + " ".join(cell(p, q).rjust(width) for p in ps)
        )
    return "\n".join(lines)


def render_report(n_endo: NilpotentEndomorphism) -> str:
    model = FilteredComplexModel.from_nilpotent(n_endo)
    e1, e2, e3 = page_sequence(model)
    cert = degeneration_certificate(model)
    blocks = [render_page(e1), render_page(e2), render_page(e3)]
    arrows = "\n".join(
        f"d2: {d.source} -> {d.target}  rank {d.rank}" + ("  (iso)" if d.iso else "")
        for d in e2.differentials
    )
    if arrows:
        blocks.insert(2, arrows)
    blocks.append(
        f"stalks: ({cert.stalk_h0}, {cert.stalk_h1}, {cert.stalk_h2})  "
        f"survivors: {list(cert.survivor_positions)}"
    )
    return "\n\n".join(blocks)


def check_model_consistency(model: FilteredComplexModel) -> None:
    """Exponent map agrees with vector weights on string representatives."""
    wf = model.filtration
    for string in wf.strings:
        m = len(string) - 1
        for a, vec in enumerate(string):
            w = m - 2 * a
            if model.piece_exponents[w] != vector_weight(wf, vec):
                raise CertificationError("piece exponent disagrees with vector weight")
