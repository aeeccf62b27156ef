"""The weight filtration of a nilpotent endomorphism.

For nilpotent N with nilpotency index p there is a unique chain of subspaces
W_{-k} <= ... <= W_k (k = p - 1) with N W_l <= W_{l-2} and with N^l inducing
an isomorphism W_l/W_{l-2} -> W_{-l}/W_{-l-2} for every l >= 0. Two
constructions are implemented:

* `build_weight_filtration` extracts Jordan strings (v, Nv, N^2 v, ...) by
  exact row reduction, giving the vector N^a v of a length-(m+1) string the
  weight m - 2a; W_l is spanned by the string vectors of weight <= l.
* `weight_filtration_by_powers` evaluates the closed kernel/image formula
  W_l = sum_a  ker N^(a+1)  intersect  im N^(a-l)
  and is kept as an independent cross-check.

Since N is nilpotent all eigenvalues vanish, so the strings live over the
entry field itself and no extension or numerical Jordan form is ever needed.

The filtration weight of a vector is also the growth exponent of the model
norm on the punctured disk: a weight-l flat section has squared norm growing
like |log r|^l toward the puncture. `model_frame` exports a basis tagged with
those exponents; the numerical side consumes it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CuspCohoError, PreconditionError
from .linalg import (
    Matrix,
    column_space,
    hstack,
    quotient_rank,
    span_contains,
    span_leq,
)
from .monodromy import NilpotentEndomorphism


@dataclass(frozen=True)
class WeightFiltration:
    source: NilpotentEndomorphism
    weight: int                       # largest weight k; the chain is W_{-k}..W_k
    subspaces: dict                   # l -> canonical column basis of W_l
    strings: tuple                    # Jordan strings, each (v, Nv, N^2 v, ...)

    @property
    def size(self) -> int:
        return self.source.size

    def subspace(self, l: int) -> Matrix:
        """W_l, extended by 0 below -k and by the full space above k."""
        if l < -self.weight:
            return Matrix.from_columns([], nrows=self.size)
        if l > self.weight:
            return self.subspaces[self.weight]
        return self.subspaces[l]

    def as_report(self) -> dict:
        from .linalg import format_scalar

        return {
            "weight": self.weight,
            "graded_dims": {str(l): d for l, d in sorted(graded_dimensions(self).items())},
            "strings": [
                [[format_scalar(e) for e in vec] for vec in string]
                for string in self.strings
            ],
            "frame_exponents": list(model_frame(self).exponents),
        }


def build_weight_filtration(n_endo: NilpotentEndomorphism) -> WeightFiltration:
    """Construct the filtration from Jordan strings.

    String tops are chosen in order of decreasing string length; within one
    length, candidates are taken from the canonical (reduced-echelon) kernel
    bases in pivot order, which makes the exported strings deterministic.
    """
    if isinstance(n_endo, Matrix):
        n_endo = NilpotentEndomorphism.from_matrix(n_endo)
    n = n_endo.matrix
    size = n_endo.size
    p = n_endo.nilpotency_index
    if p == 0:  # zero-dimensional space; nothing to do
        raise PreconditionError("empty endomorphism")

    kernels = [Matrix.from_columns([], nrows=size)]
    power = Matrix.identity(size)
    for _ in range(p):
        power = power * n
        kernels.append(column_space(power.nullspace()))

    strings: list[tuple] = []
    for length in range(p, 0, -1):
        carried = []
        for string in strings:
            if len(string) > length:
                # the string vector that lands in ker N^length
                carried.append(string[len(string) - length])
        base = kernels[length - 1]
        if carried:
            base = hstack(base, Matrix.from_columns(carried, nrows=size))
        base_rank = base.rank()
        for v in kernels[length].columns():
            candidate = hstack(base, Matrix.column(v))
            r = candidate.rank()
            if r > base_rank:
                chain = [v]
                for _ in range(length - 1):
                    chain.append(n.apply(chain[-1]))
                strings.append(tuple(chain))
                base, base_rank = candidate, r

    k = p - 1
    by_weight: dict[int, list] = {}
    for string in strings:
        m = len(string) - 1
        for a, vec in enumerate(string):
            by_weight.setdefault(m - 2 * a, []).append(vec)

    subspaces = {}
    acc: list = []
    for l in range(-k, k + 1):
        acc.extend(by_weight.get(l, []))
        subspaces[l] = column_space(Matrix.from_columns(acc, nrows=size))
    return WeightFiltration(n_endo, k, subspaces, tuple(strings))


def weight_filtration_by_powers(n_endo: NilpotentEndomorphism) -> dict:
    """Independent construction from kernels and images of powers of N:
    W_l = sum over a >= 0 of  ker N^(a+1) intersect im N^(a-l),
    with im N^j read as the full space for j <= 0. Returns {l: basis}."""
    from .linalg import span_intersect, span_sum

    if isinstance(n_endo, Matrix):
        n_endo = NilpotentEndomorphism.from_matrix(n_endo)
    n = n_endo.matrix
    size = n_endo.size
    p = n_endo.nilpotency_index
    k = p - 1

    powers = [Matrix.identity(size)]
    for _ in range(p + 1):
        powers.append(powers[-1] * n)

    def kernel(j: int) -> Matrix:
        j = min(j, p)
        return column_space(powers[j].nullspace())

    def image(j: int) -> Matrix:
        if j <= 0:
            return Matrix.identity(size)
        if j >= p:
            return Matrix.from_columns([], nrows=size)
        return column_space(powers[j])

    out = {}
    for l in range(-k, k + 1):
        total = Matrix.from_columns([], nrows=size)
        for a in range(p):
            piece = span_intersect(kernel(a + 1), image(a - l))
            if piece.ncols:
                total = span_sum(total, piece)
        out[l] = total
    return out


def vector_weight(wf: WeightFiltration, vec) -> int:
    """The minimal l with vec in W_l; the model norm exponent of the flat
    section vec. Undefined (raises) for the zero vector."""
    if not any(vec):
        raise PreconditionError("the zero vector has no weight")
    for l in range(-wf.weight, wf.weight + 1):
        if span_contains(wf.subspaces[l], vec):
            return l
    raise CuspCohoError("vector not contained in the top filtration step")


def graded_dimensions(wf: WeightFiltration) -> dict:
    """Dimensions of the graded pieces Gr_l = W_l / W_{l-2}, keyed by the
    weights where they are nonzero."""
    dims: dict[int, int] = {}
    for string in wf.strings:
        m = len(string) - 1
        for a in range(len(string)):
            l = m - 2 * a
            dims[l] = dims.get(l, 0) + 1
    return dims


def graded_rank_of_power(wf: WeightFiltration, l: int) -> int:
    """Rank of the map Gr_l -> Gr_{-l} induced by N^l (l >= 0).

    Graded pieces are the consecutive quotients Gr_a = W_a / W_{a-1}; N^l
    sends W_{l-1} into W_{-l-1}, so the induced map is well defined and its
    rank is dim((N^l W_l + W_{-l-1}) / W_{-l-1})."""
    if l < 0:
        raise PreconditionError("graded_rank_of_power expects l >= 0")
    n_pow = wf.source.matrix ** l
    basis = wf.subspace(l)
    image_cols = Matrix.from_columns(
        [n_pow.apply(v) for v in basis.columns()], nrows=wf.size
    )
    return quotient_rank(image_cols, wf.subspace(-l - 1))


def induced_graded_map_rank(wf: WeightFiltration, l: int) -> int:
    """Rank of N: Gr_l -> Gr_{l-2} (one application of N on graded pieces,
    consecutive-quotient convention as above)."""
    basis = wf.subspace(l)
    image_cols = Matrix.from_columns(
        [wf.source.matrix.apply(v) for v in basis.columns()], nrows=wf.size
    )
    return quotient_rank(image_cols, wf.subspace(l - 3))


def check_filtration_axioms(wf: WeightFiltration) -> None:
    """Raise unless the chain is monotone, N lowers it by two steps, and N^l
    induces isomorphisms Gr_l -> Gr_{-l}. Used by tests and certificates."""
    dims = graded_dimensions(wf)
    for l in range(-wf.weight, wf.weight):
        if not span_leq(wf.subspaces[l], wf.subspaces[l + 1]):
            raise CuspCohoError(f"W_{l} not contained in W_{l + 1}")
    if wf.subspaces[wf.weight].ncols != wf.size:
        raise CuspCohoError("top filtration step is not the full space")
    n = wf.source.matrix
    for l in range(-wf.weight, wf.weight + 1):
        mapped = Matrix.from_columns(
            [n.apply(v) for v in wf.subspace(l).columns()], nrows=wf.size
        )
        if not span_leq(mapped, wf.subspace(l - 2)):
            raise CuspCohoError(f"N W_{l} not contained in W_{l - 2}")
    for l in range(0, wf.weight + 1):
        if graded_rank_of_power(wf, l) != dims.get(l, 0):
            raise CuspCohoError(f"N^{l} is not an isomorphism Gr_{l} -> Gr_{-l}")


@dataclass(frozen=True)
class ModelMetricFrame:
    """A basis adapted to the filtration, with the integer exponent w_i such
    that the i-th vector has squared model norm |log r|^(w_i)."""

    vectors: tuple
    exponents: tuple


def model_frame(wf: WeightFiltration) -> ModelMetricFrame:
    """Frame assembled from the Jordan strings, each string listed bottom
    (lowest weight) first. The frame is L2-adapted for the diagonal model
    metric; `dbar.l2_adapted_check` exercises exactly that."""
    vectors = []
    exponents = []
    for string in wf.strings:
        m = len(string) - 1
        for a in range(len(string) - 1, -1, -1):
            vectors.append(string[a])
            exponents.append(m - 2 * a)
    return ModelMetricFrame(tuple(vectors), tuple(exponents))
