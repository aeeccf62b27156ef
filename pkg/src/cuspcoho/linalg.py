"""Exact linear algebra over the rationals and Gaussian rationals.

Everything downstream (unipotency, kernels, filtration membership, cocycle
ranks) is a rank question that must be answered tolerance-free, so all
arithmetic here is exact: entries are `fractions.Fraction` or
`GaussianRational`. Floating-point entries are rejected at construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Union

from .errors import InputStructureError, SingularMatrixError

_ALLOWED_CHARS = set("0123456789/+-i")


class GaussianRational:
    """A Gaussian rational a + b*i with exact rational a, b.

    Interoperates with int and Fraction through the reflected operators, so
    matrices may freely mix Fraction and GaussianRational entries.
    """

    __slots__ = ("real", "imag")

    def __init__(self, real, imag=0):
        object.__setattr__(self, "real", Fraction(real))
        object.__setattr__(self, "imag", Fraction(imag))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _coerce(value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real + o.real, self.imag + o.imag)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.real - o.real, self.imag - o.imag)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.real - self.real, o.imag - self.imag)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.real * o.real - self.imag * o.imag,
            self.real * o.imag + self.imag * o.real,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.real * o.real + o.imag * o.imag
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.real * o.real + self.imag * o.imag) / d,
            (self.imag * o.real - self.real * o.imag) / d,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.real == o.real and self.imag == o.imag

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def conjugate(self):
        return GaussianRational(self.real, -self.imag)

    @property
    def is_real(self):
        return self.imag == 0

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self.real!r}, {self.imag!r})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, GaussianRational]


def parse_scalar(value) -> Scalar:
    """Parse an exact scalar from an int or a string like "p/q" or "p/q+r/s i".

    Floating-point values and decimal notation are rejected: exactness is a
    hard requirement for every rank computation in this package.
    """
    if isinstance(value, bool):
        raise InputStructureError(f"boolean is not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise InputStructureError(
            f"floating-point entry {value!r} rejected; use exact strings like \"1/2\""
        )
    if not isinstance(value, str):
        raise InputStructureError(f"cannot parse scalar from {type(value).__name__}")
    s = value.replace(" ", "")
    if not s:
        raise InputStructureError("empty scalar string")
    if not set(s) <= _ALLOWED_CHARS:
        bad = sorted(set(s) - _ALLOWED_CHARS)
        raise InputStructureError(f"invalid characters {bad} in scalar {value!r}")

    def frac(text, *, default=None):
        if text in ("", "+") and default is not None:
            return Fraction(default)
        if text == "-" and default is not None:
            return -Fraction(default)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputStructureError(f"bad rational {text!r} in scalar {value!r}") from exc

    if s.endswith("i"):
        body = s[:-1]
        split = None
        for idx in range(1, len(body)):
            if body[idx] in "+-" and body[idx - 1] not in "+-/":
                split = idx
        if split is None:
            return _normalize(GaussianRational(0, frac(body, default=1)))
        return _normalize(
            GaussianRational(frac(body[:split]), frac(body[split:], default=1))
        )
    return frac(s)


def _normalize(z: GaussianRational) -> Scalar:
    return z.real if z.imag == 0 else z


def format_scalar(x) -> str:
    """Inverse of parse_scalar, producing canonical "p/q" / "p/q+r/s i" text."""
    if isinstance(x, GaussianRational):
        if x.imag == 0:
            return format_scalar(x.real)
        sign = "+" if x.imag >= 0 else "-"
        return f"{format_scalar(x.real)}{sign}{format_scalar(abs(x.imag))}i"
    if isinstance(x, int):
        x = Fraction(x)
    return str(x)


def _check_entry(e) -> Scalar:
    if isinstance(e, bool) or isinstance(e, float):
        raise InputStructureError(f"inexact matrix entry {e!r}")
    if isinstance(e, int):
        return Fraction(e)
    if isinstance(e, (Fraction, GaussianRational)):
        return e
    raise InputStructureError(f"unsupported matrix entry type {type(e).__name__}")


class Matrix:
    """Immutable dense matrix with exact entries.

    Supports matrices with zero rows or zero columns (empty bases, empty
    constraint systems); `ncols` must be passed explicitly when there are no
    rows to infer it from.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        r = tuple(tuple(_check_entry(e) for e in row) for row in rows)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "nrows", len(r))
        if r:
            widths = {len(row) for row in r}
            if len(widths) != 1:
                raise InputStructureError("ragged matrix rows")
            inferred = widths.pop()
            if ncols is not None and ncols != inferred:
                raise InputStructureError("ncols disagrees with row length")
            object.__setattr__(self, "ncols", inferred)
        else:
            if ncols is None:
                raise InputStructureError("matrix with no rows needs explicit ncols")
            object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(
            [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)],
            ncols=n,
        )

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls([[Fraction(0)] * ncols for _ in range(nrows)], ncols=ncols)

    @classmethod
    def column(cls, vec: Sequence) -> "Matrix":
        return cls([[e] for e in vec], ncols=1)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Matrix":
        cols = [tuple(c) for c in cols]
        if not cols:
            if nrows is None:
                raise InputStructureError("from_columns with no columns needs nrows")
            return cls([[] for _ in range(nrows)], ncols=0)
        n = len(cols[0])
        return cls([[c[i] for c in cols] for i in range(n)], ncols=len(cols))

    # -- basic structure ---------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(not e for row in self.rows for e in row)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(e) for e in row) for row in self.rows)
        return f"Matrix[{self.nrows}x{self.ncols}]({body})"

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            ncols=self.nrows,
        )

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(e) for e in row] for row in self.rows]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputStructureError(f"shape mismatch {self.shape} + {other.shape}")
        return Matrix(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputStructureError(f"shape mismatch {self.shape} - {other.shape}")
        return Matrix(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
            ncols=self.ncols,
        )

    def __neg__(self) -> "Matrix":
        return Matrix([[-e for e in row] for row in self.rows], ncols=self.ncols)

    def scale(self, factor) -> "Matrix":
        return Matrix([[factor * e for e in row] for row in self.rows], ncols=self.ncols)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise InputStructureError(
                    f"shape mismatch {self.shape} * {other.shape}"
                )
            cols = other.transpose().rows
            return Matrix(
                [[_dot(row, col) for col in cols] for row in self.rows],
                ncols=other.ncols,
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, exponent: int) -> "Matrix":
        if not self.is_square() or exponent < 0:
            raise InputStructureError("powers need a square matrix and exponent >= 0")
        result = Matrix.identity(self.nrows)
        for _ in range(exponent):
            result = result * self
        return result

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.ncols:
            raise InputStructureError("vector length mismatch")
        return tuple(_dot(row, vec) for row in self.rows)

    # -- elimination -------------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and pivot column indices (exact)."""
        m = [list(row) for row in self.rows]
        pivots: list[int] = []
        pr = 0
        for pc in range(self.ncols):
            pivot_row = None
            for i in range(pr, self.nrows):
                if m[i][pc]:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            m[pr], m[pivot_row] = m[pivot_row], m[pr]
            pv = m[pr][pc]
            m[pr] = [e / pv for e in m[pr]]
            for i in range(self.nrows):
                if i != pr and m[i][pc]:
                    f = m[i][pc]
                    m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
            pivots.append(pc)
            pr += 1
            if pr == self.nrows:
                break
        return Matrix(m, ncols=self.ncols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> "Matrix":
        """Canonical kernel basis, returned as the columns of a matrix."""
        red, pivots = self.rref()
        pivot_set = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivot_set]
        cols = []
        for j in free:
            v = [Fraction(0)] * self.ncols
            v[j] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -red.rows[r][j]
            cols.append(v)
        return Matrix.from_columns(cols, nrows=self.ncols)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise SingularMatrixError("only square matrices can be inverted")
        n = self.nrows
        aug = hstack(self, Matrix.identity(n))
        red, pivots = aug.rref()
        if tuple(range(n)) != pivots[:n] or len(pivots) != n:
            raise SingularMatrixError("matrix is singular")
        return Matrix([row[n:] for row in red.rows], ncols=n)


def _dot(a: Sequence, b: Sequence):
    total = Fraction(0)
    for x, y in zip(a, b):
        total = total + x * y
    return total


def hstack(*mats: Matrix) -> Matrix:
    mats = [m for m in mats if m is not None]
    if not mats:
        raise InputStructureError("hstack of nothing")
    nrows = mats[0].nrows
    if any(m.nrows != nrows for m in mats):
        raise InputStructureError("hstack row-count mismatch")
    return Matrix(
        [sum((list(m.rows[i]) for m in mats), []) for i in range(nrows)],
        ncols=sum(m.ncols for m in mats),
    )


def vstack(*mats: Matrix) -> Matrix:
    mats = [m for m in mats if m is not None]
    if not mats:
        raise InputStructureError("vstack of nothing")
    ncols = mats[0].ncols
    if any(m.ncols != ncols for m in mats):
        raise InputStructureError("vstack column-count mismatch")
    rows = [row for m in mats for row in m.rows]
    return Matrix(rows, ncols=ncols)


def block_diag(*mats: Matrix) -> Matrix:
    n = sum(m.nrows for m in mats)
    c = sum(m.ncols for m in mats)
    out = [[Fraction(0)] * c for _ in range(n)]
    i0 = j0 = 0
    for m in mats:
        for i in range(m.nrows):
            for j in range(m.ncols):
                out[i0 + i][j0 + j] = m.rows[i][j]
        i0 += m.nrows
        j0 += m.ncols
    return Matrix(out, ncols=c)


# -- subspaces, represented by canonical column bases ------------------------


def column_space(m: Matrix) -> Matrix:
    """Canonical basis of the column span (unique: rref of the transpose)."""
    red, _ = m.transpose().rref()
    cols = [row for row in red.rows if any(row)]
    return Matrix.from_columns(cols, nrows=m.nrows)


def span_leq(inner: Matrix, outer: Matrix) -> bool:
    """True iff the column span of `inner` is contained in that of `outer`."""
    if inner.ncols == 0:
        return True
    return hstack(outer, inner).rank() == outer.rank()


def span_eq(a: Matrix, b: Matrix) -> bool:
    return span_leq(a, b) and span_leq(b, a)


def span_contains(basis: Matrix, vec: Sequence) -> bool:
    return span_leq(Matrix.column(vec), basis)


def span_sum(a: Matrix, b: Matrix) -> Matrix:
    return column_space(hstack(a, b))


def span_intersect(a: Matrix, b: Matrix) -> Matrix:
    """Canonical basis of the intersection of two column spans."""
    if a.ncols == 0 or b.ncols == 0:
        return Matrix.from_columns([], nrows=a.nrows)
    kernel = hstack(a, -b).nullspace()
    cols = [a.apply(v[: a.ncols]) for v in kernel.columns()]
    return column_space(Matrix.from_columns(cols, nrows=a.nrows))


def quotient_rank(image_cols: Matrix, sub: Matrix) -> int:
    """dim of the image of `image_cols` in the quotient by span(`sub`)."""
    if image_cols.ncols == 0:
        return 0
    return hstack(image_cols, sub).rank() - sub.rank()


def solve_in_span(basis: Matrix, vec: Sequence):
    """Coordinates of `vec` in the columns of `basis`, or None."""
    if basis.ncols == 0:
        return () if not any(vec) else None
    aug = hstack(basis, Matrix.column(vec))
    red, pivots = aug.rref()
    if basis.ncols in pivots:
        return None
    coords = [Fraction(0)] * basis.ncols
    for r, pc in enumerate(pivots):
        coords[pc] = red.rows[r][basis.ncols]
    return tuple(coords)


def inv_factorial(k: int) -> Fraction:
    return Fraction(1, factorial(k))


def shift_matrix(n: int) -> Matrix:
    """Nilpotent single-block matrix: ones on the superdiagonal."""
    return Matrix(
        [[Fraction(1) if j == i + 1 else Fraction(0) for j in range(n)] for i in range(n)],
        ncols=n,
    )
