"""Monodromy data of a punctured-surface fundamental group.

A representation is recorded by the images of the standard generators: handle
pairs (A_1, B_1, ..., A_g, B_g) and one matrix C_j per puncture, subject to
the surface-group relation  prod [A_i, B_i] * prod C_j = Id.  Every C_j is
required to be unipotent, so it has a nilpotent logarithm given by a finite
series; that logarithm drives the weight filtration and everything downstream.

All values are immutable and all operations are pure functions, so they are
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputStructureError, PreconditionError, SingularMatrixError
from .linalg import (
    Matrix,
    column_space,
    format_scalar,
    hstack,
    inv_factorial,
    parse_scalar,
    span_eq,
    vstack,
)

REP_DOCUMENT_KEYS = ("genus", "punctures", "rank", "A", "B", "C")


@dataclass(frozen=True)
class PuncturedSurfaceRep:
    """Generator matrices of a rank-n representation of pi_1 of a genus-g
    surface with s >= 1 punctures."""

    genus: int
    punctures: int
    rank: int
    handle_pairs: tuple[Matrix, ...]  # A_1, B_1, ..., A_g, B_g
    cusp_matrices: tuple[Matrix, ...]  # C_1, ..., C_s

    def __post_init__(self):
        if self.genus < 0:
            raise InputStructureError("genus must be >= 0")
        if self.punctures < 1:
            raise InputStructureError("at least one puncture is required")
        if self.rank < 1:
            raise InputStructureError("rank must be >= 1")
        if len(self.handle_pairs) != 2 * self.genus:
            raise InputStructureError(
                f"expected {2 * self.genus} handle matrices, got {len(self.handle_pairs)}"
            )
        if len(self.cusp_matrices) != self.punctures:
            raise InputStructureError(
                f"expected {self.punctures} cusp matrices, got {len(self.cusp_matrices)}"
            )
        n = self.rank
        for label, m in self.named_generators():
            if m.shape != (n, n):
                raise InputStructureError(
                    f"generator {label} has shape {m.shape}, expected {(n, n)}"
                )

    def generators(self) -> tuple[Matrix, ...]:
        return self.handle_pairs + self.cusp_matrices

    def named_generators(self) -> list[tuple[str, Matrix]]:
        names = []
        for i in range(self.genus):
            names.append((f"A[{i}]", self.handle_pairs[2 * i]))
            names.append((f"B[{i}]", self.handle_pairs[2 * i + 1]))
        for j, c in enumerate(self.cusp_matrices):
            names.append((f"C[{j}]", c))
        return names

    @classmethod
    def from_document(cls, doc: dict) -> "PuncturedSurfaceRep":
        """Build a representation from the JSON document format.

        The document is {"genus": g, "punctures": s, "rank": n,
        "A": [...], "B": [...], "C": [...]} where each matrix is a row-major
        array of arrays of exact scalar strings ("p/q" or "p/q+r/s i";
        plain integers are also accepted).
        """
        if not isinstance(doc, dict):
            raise InputStructureError("representation document must be a JSON object")
        missing = [k for k in REP_DOCUMENT_KEYS if k not in doc]
        if missing:
            raise InputStructureError(f"missing keys in representation document: {missing}")
        for field in ("genus", "punctures", "rank"):
            if not isinstance(doc[field], int) or isinstance(doc[field], bool):
                raise InputStructureError(f"{field} must be an integer")
        g, s, n = doc["genus"], doc["punctures"], doc["rank"]
        a_list = _parse_matrix_list(doc["A"], n, "A")
        b_list = _parse_matrix_list(doc["B"], n, "B")
        c_list = _parse_matrix_list(doc["C"], n, "C")
        if len(a_list) != g or len(b_list) != g:
            raise InputStructureError(
                f"expected {g} matrices in each of A and B, got {len(a_list)} and {len(b_list)}"
            )
        if len(c_list) != s:
            raise InputStructureError(f"expected {s} matrices in C, got {len(c_list)}")
        handles = []
        for a, b in zip(a_list, b_list):
            handles.extend((a, b))
        return cls(g, s, n, tuple(handles), tuple(c_list))

    def to_document(self) -> dict:
        return {
            "genus": self.genus,
            "punctures": self.punctures,
            "rank": self.rank,
            "A": [self.handle_pairs[2 * i].to_strings() for i in range(self.genus)],
            "B": [self.handle_pairs[2 * i + 1].to_strings() for i in range(self.genus)],
            "C": [c.to_strings() for c in self.cusp_matrices],
        }


def _parse_matrix_list(raw, n: int, label: str) -> list[Matrix]:
    if not isinstance(raw, list):
        raise InputStructureError(f"{label} must be a list of matrices")
    out = []
    for idx, m in enumerate(raw):
        where = f"{label}[{idx}]"
        if not isinstance(m, list) or len(m) != n:
            raise InputStructureError(f"{where} must have {n} rows")
        rows = []
        for i, row in enumerate(m):
            if not isinstance(row, list) or len(row) != n:
                raise InputStructureError(f"{where} row {i} must have {n} entries")
            parsed = []
            for j, e in enumerate(row):
                try:
                    parsed.append(parse_scalar(e))
                except InputStructureError as exc:
                    raise InputStructureError(f"{where} row {i} col {j}: {exc}") from exc
            rows.append(parsed)
        out.append(Matrix(rows, ncols=n))
    return out


@dataclass(frozen=True)
class ValidationReport:
    relation_ok: bool
    unipotency_ok: tuple[bool, ...]
    invertibility_ok: bool

    @property
    def ok(self) -> bool:
        return self.relation_ok and self.invertibility_ok and all(self.unipotency_ok)

    def as_dict(self) -> dict:
        return {
            "relation_ok": self.relation_ok,
            "unipotency_ok": list(self.unipotency_ok),
            "invertibility_ok": self.invertibility_ok,
            "ok": self.ok,
        }


def is_unipotent(m: Matrix) -> bool:
    """(m - Id)^n = 0, checked exactly."""
    if not m.is_square():
        raise InputStructureError("unipotency is defined for square matrices")
    return ((m - Matrix.identity(m.nrows)) ** m.nrows).is_zero()


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a * b * a.inverse() * b.inverse()


def validate(rep: PuncturedSurfaceRep) -> ValidationReport:
    """Check the surface-group relation, invertibility of every generator and
    unipotency of every cusp matrix. Structural problems (wrong sizes) raise
    InputStructureError; mathematical failures are reported in the flags."""
    invertible = True
    for _, m in rep.named_generators():
        if m.rank() != rep.rank:
            invertible = False
            break
    relation_ok = False
    if invertible:
        prod = Matrix.identity(rep.rank)
        for i in range(rep.genus):
            prod = prod * commutator(rep.handle_pairs[2 * i], rep.handle_pairs[2 * i + 1])
        for c in rep.cusp_matrices:
            prod = prod * c
        relation_ok = prod == Matrix.identity(rep.rank)
    unipotency = tuple(is_unipotent(c) for c in rep.cusp_matrices)
    return ValidationReport(relation_ok, unipotency, invertible)


def require_valid(rep: PuncturedSurfaceRep) -> ValidationReport:
    report = validate(rep)
    if not report.ok:
        raise PreconditionError(f"representation fails validation: {report.as_dict()}")
    return report


@dataclass(frozen=True)
class NilpotentEndomorphism:
    """A nilpotent matrix together with its nilpotency index p: N^p = 0 and
    N^(p-1) != 0, with the convention N^0 = Id (so index 1 means N = 0)."""

    matrix: Matrix
    nilpotency_index: int

    @classmethod
    def from_matrix(cls, n: Matrix) -> "NilpotentEndomorphism":
        if not n.is_square():
            raise PreconditionError("a nilpotent endomorphism must be square")
        power = Matrix.identity(n.nrows)
        for p in range(n.nrows + 1):
            if power.is_zero():
                return cls(n, p)
            power = power * n
        raise PreconditionError(
            f"matrix is not nilpotent: its {n.nrows}-th power is nonzero"
        )

    @property
    def size(self) -> int:
        return self.matrix.nrows


def nilpotent_log(u: Matrix) -> NilpotentEndomorphism:
    """Logarithm of a unipotent matrix via the finite Mercator series
    sum_{i>=1} (-1)^(i+1) (U - Id)^i / i. Exact inverse of unipotent_exp."""
    if not u.is_square():
        raise PreconditionError("logarithm needs a square matrix")
    n = u.nrows
    d = u - Matrix.identity(n)
    if not (d ** n).is_zero():
        raise PreconditionError(
            f"matrix is not unipotent: (U - I)^{n} != 0"
        )
    total = Matrix.zeros(n, n)
    power = Matrix.identity(n)
    for i in range(1, n):
        power = power * d
        if power.is_zero():
            break
        term = power.scale(Fraction((-1) ** (i + 1), i))
        total = total + term
    return NilpotentEndomorphism.from_matrix(total)


def unipotent_exp(n) -> Matrix:
    """Exponential of a nilpotent matrix via the finite series
    sum_{i>=0} N^i / i!. Exact inverse of nilpotent_log."""
    m = n.matrix if isinstance(n, NilpotentEndomorphism) else n
    if not isinstance(n, NilpotentEndomorphism):
        NilpotentEndomorphism.from_matrix(m)  # raises if not nilpotent
    size = m.nrows
    total = Matrix.identity(size)
    power = Matrix.identity(size)
    for i in range(1, size):
        power = power * m
        if power.is_zero():
            break
        total = total + power.scale(inv_factorial(i))
    return total


def invariant_subspace(rep: PuncturedSurfaceRep) -> Matrix:
    """Canonical basis (columns) of the common fixed space of all generators,
    i.e. the null space of the stacked system {A_i - I, B_i - I, C_j - I}."""
    n = rep.rank
    ident = Matrix.identity(n)
    blocks = [m - ident for m in rep.generators()]
    if not blocks:
        return column_space(ident)
    return column_space(vstack(*blocks).nullspace())


def dual_rep(rep: PuncturedSurfaceRep) -> PuncturedSurfaceRep:
    """Replace every generator by its inverse-transpose. This is a group
    homomorphism, so the surface-group relation carries over verbatim, and
    inverse-transposition preserves unipotency."""
    def dual(m: Matrix) -> Matrix:
        try:
            return m.inverse().transpose()
        except SingularMatrixError as exc:
            raise PreconditionError("dual of a singular generator") from exc

    return PuncturedSurfaceRep(
        rep.genus,
        rep.punctures,
        rep.rank,
        tuple(dual(m) for m in rep.handle_pairs),
        tuple(dual(m) for m in rep.cusp_matrices),
    )


def commutant_dimension_of(matrices) -> int:
    """Dimension of {X : XM = MX for all M}, by exact elimination on the
    n^2-unknown linear system. Value 1 certifies irreducibility."""
    matrices = list(matrices)
    if not matrices:
        raise InputStructureError("commutant of an empty set is undefined")
    n = matrices[0].nrows
    rows = []
    for m in matrices:
        if m.shape != (n, n):
            raise InputStructureError("commutant generators must share one size")
        for i in range(n):
            for j in range(n):
                row = [Fraction(0)] * (n * n)
                for k in range(n):
                    row[k * n + j] += m.rows[i][k]   # (MX)_{ij}
                    row[i * n + k] -= m.rows[k][j]   # (XM)_{ij}
                rows.append(row)
    system = Matrix(rows, ncols=n * n)
    return n * n - system.rank()


def commutant_dimension(rep: PuncturedSurfaceRep) -> int:
    require_valid(rep)
    return commutant_dimension_of(rep.generators())


def cusp_logarithms(rep: PuncturedSurfaceRep) -> list[NilpotentEndomorphism]:
    """Nilpotent logarithm of every cusp matrix, in cusp order."""
    require_valid(rep)
    return [nilpotent_log(c) for c in rep.cusp_matrices]
