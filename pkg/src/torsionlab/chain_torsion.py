"""Torsion of finite chain complexes with preferred homology bases.

Chain spaces carry their standard coordinate basis c_q. Boundary matrices
follow the column convention: column j of ``boundary(q)`` is the image of the
j-th basis vector of C_q written in the basis of C_{q-1}. Scalars are sympy
expressions: exact rationals for cellular complexes, and rationals times
square roots (or 40-digit floats) for metric homology bases.
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy import ImmutableMatrix, Integer, Rational

from torsionlab.constants import SYMPY_DIGITS

logger = logging.getLogger(__name__)

ZERO_THRESHOLD = sympy.Float(10, SYMPY_DIGITS) ** (10 - SYMPY_DIGITS)


class ChainComplexError(Exception):
    pass


ScalarLike = Union[int, Fraction, str, float, Dict[str, Any], Any]


def exact_scalar(value: ScalarLike) -> Any:
    """Converts a rational-like value to a sympy Rational.

    Accepts ints, Fractions, "p/q" strings and sympy rationals. Floats are
    rejected: boundary matrices must be exact.
    """
    if isinstance(value, bool):
        raise ChainComplexError(f"Boolean {value!r} is not a chain scalar")
    if isinstance(value, int):
        return Integer(value)
    if isinstance(value, float) and value.is_integer():
        return Integer(int(value))
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Rational(value)
        except (TypeError, ValueError, sympy.SympifyError) as e:
            raise ChainComplexError(f"Cannot parse rational {value!r}") from e
    if isinstance(value, sympy.Basic) and value.is_Rational:
        return value
    raise ChainComplexError(f"Expected an exact rational, got {value!r}")


def scalar(value: ScalarLike) -> Any:
    """Converts a homology-basis scalar to a sympy expression.

    Besides the exact inputs of :func:`exact_scalar` this accepts floats
    (kept as 40-digit sympy Floats), arbitrary sympy expressions and the JSON
    form ``{"rat": "p/q", "sqrt": ["a/b", ...]}``.
    """
    if isinstance(value, dict):
        result = exact_scalar(value.get("rat", "1"))
        for radicand in value.get("sqrt", []):
            result = result * sympy.sqrt(exact_scalar(radicand))
        return result
    if isinstance(value, float):
        return sympy.Float(value, SYMPY_DIGITS)
    if isinstance(value, sympy.Basic):
        return value
    return exact_scalar(value)


def is_zero(value: Any) -> bool:
    """Zero test used for every pivot decision.

    Exact for rationals; other expressions are evaluated to 40 digits.
    """
    value = sympy.sympify(value)
    if value.is_Rational:
        return bool(value == 0)
    return bool(abs(sympy.N(value, SYMPY_DIGITS)) < ZERO_THRESHOLD)


def zeros(rows: int, cols: int) -> Any:
    return ImmutableMatrix(sympy.zeros(rows, cols))


def identity(n: int) -> Any:
    return ImmutableMatrix(sympy.eye(n)) if n > 0 else zeros(0, 0)


def hstack(rows: int, *blocks: Any) -> Any:
    result = zeros(rows, 0)
    for block in blocks:
        if block.cols == 0:
            continue
        result = block if result.cols == 0 else result.row_join(block)
    return ImmutableMatrix(result)


def vstack(cols: int, *blocks: Any) -> Any:
    result = zeros(0, cols)
    for block in blocks:
        if block.rows == 0:
            continue
        result = block if result.rows == 0 else result.col_join(block)
    return ImmutableMatrix(result)


def _is_rational_matrix(m: Any) -> bool:
    return all(sympy.sympify(x).is_Rational for x in m)


def matrix_rank(m: Any) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return int(m.rank(iszerofunc=is_zero))


def pivot_columns(m: Any) -> Tuple[int, ...]:
    """Pivot columns of the reduced row echelon form, lowest index first."""
    if m.rows == 0 or m.cols == 0:
        return ()
    _, pivots = m.rref(iszerofunc=is_zero)
    return tuple(pivots)


def determinant(m: Any) -> Any:
    if m.rows != m.cols:
        raise ChainComplexError(f"Determinant of non-square {m.rows}x{m.cols}")
    if m.rows == 0:
        return Integer(1)
    if _is_rational_matrix(m):
        return m.det(method="bareiss")
    return m.det(method="berkowitz")


def inverse(m: Any) -> Any:
    if m.rows == 0:
        return zeros(0, 0)
    if _is_rational_matrix(m):
        return ImmutableMatrix(m.inv(method="LU"))
    det = determinant(m)
    if is_zero(det):
        raise ChainComplexError("Matrix is singular")
    return ImmutableMatrix(m.adjugate(method="berkowitz") / det)


def magnitude(value: Any) -> Any:
    """|value| without leaving an unevaluated Abs around symbolic input."""
    value = sympy.sympify(value)
    if value.is_Rational:
        return abs(value)
    return value if sympy.N(value, SYMPY_DIGITS) > 0 else -value


@dataclass(frozen=True)
class ChainComplexData:
    """A finite chain complex C_m -> ... -> C_0 with boundary matrices.

    ``boundaries[q - 1]`` is ∂_q : C_q -> C_{q-1} for q = 1..m.
    """

    ranks: Tuple[int, ...]
    boundaries: Tuple[Any, ...]

    def __post_init__(self) -> None:
        if len(self.ranks) == 0:
            raise ChainComplexError("A chain complex needs at least C_0")
        if any(n < 0 for n in self.ranks):
            raise ChainComplexError(f"Negative rank in {self.ranks}")
        if len(self.boundaries) != len(self.ranks) - 1:
            raise ChainComplexError(
                f"Expected {len(self.ranks) - 1} boundary matrices, "
                f"got {len(self.boundaries)}"
            )
        for q, matrix in enumerate(self.boundaries, start=1):
            expected = (self.ranks[q - 1], self.ranks[q])
            if matrix.shape != expected:
                raise ChainComplexError(
                    f"∂_{q} has shape {matrix.shape}, expected {expected}"
                )

    @classmethod
    def from_matrices(
        cls, ranks: Sequence[int], matrices: Sequence[Any]
    ) -> "ChainComplexData":
        """Builds a complex from nested row lists of exact scalars."""
        boundaries = []
        for q, rows in enumerate(matrices, start=1):
            n_rows, n_cols = ranks[q - 1], ranks[q]
            if isinstance(rows, sympy.MatrixBase):
                entries = [
                    [rows[i, j] for j in range(rows.cols)] for i in range(rows.rows)
                ]
            else:
                entries = [list(row) for row in rows]
            if len(entries) != n_rows or any(len(row) != n_cols for row in entries):
                raise ChainComplexError(
                    f"∂_{q} must be {n_rows}x{n_cols} to match ranks {tuple(ranks)}"
                )
            boundaries.append(
                ImmutableMatrix(
                    n_rows,
                    n_cols,
                    [exact_scalar(x) for row in entries for x in row],
                )
                if n_rows and n_cols
                else zeros(n_rows, n_cols)
            )
        return cls(tuple(int(n) for n in ranks), tuple(boundaries))

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def rank(self, q: int) -> int:
        if 0 <= q <= self.length:
            return self.ranks[q]
        return 0

    def boundary(self, q: int) -> Any:
        """∂_q as an (n_{q-1} x n_q) matrix; zero outside 1..m."""
        if 1 <= q <= self.length:
            return self.boundaries[q - 1]
        return zeros(self.rank(q - 1), self.rank(q))


@dataclass(frozen=True)
class HomologyBasisData:
    """Cycles z_q (as matrix columns) representing a basis h_q of H_q."""

    cycles: Tuple[Any, ...]

    @classmethod
    def from_vectors(
        cls, c: ChainComplexData, vectors: Mapping[int, Sequence[Sequence[Any]]]
    ) -> "HomologyBasisData":
        cycles = []
        for q in range(c.length + 1):
            columns = [[scalar(x) for x in v] for v in vectors.get(q, [])]
            for v in columns:
                if len(v) != c.rank(q):
                    raise ChainComplexError(
                        f"Cycle of length {len(v)} in degree {q}, "
                        f"expected {c.rank(q)}"
                    )
            if columns:
                cycles.append(ImmutableMatrix(columns).T)
            else:
                cycles.append(zeros(c.rank(q), 0))
        return cls(tuple(cycles))

    @classmethod
    def empty(cls, c: ChainComplexData) -> "HomologyBasisData":
        return cls(tuple(zeros(c.rank(q), 0) for q in range(c.length + 1)))

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(z.cols for z in self.cycles)

    def cycle_matrix(self, q: int) -> Any:
        if 0 <= q < len(self.cycles):
            return self.cycles[q]
        return zeros(0, 0)

    def scaled(self, factors: Sequence[Any]) -> "HomologyBasisData":
        """Right-multiplies each z_q by the matrix factors[q]."""
        return HomologyBasisData(
            tuple(ImmutableMatrix(z * a) for z, a in zip(self.cycles, factors))
        )


@dataclass(frozen=True)
class LogTorsion:
    """A torsion carried by its magnitude |τ|; ``value`` is log |τ|.

    Addition composes multiplicatively and negation inverts, so additive
    identities between logs are checked exactly on magnitudes.
    """

    magnitude: Any

    @classmethod
    def unit(cls) -> "LogTorsion":
        return cls(Integer(1))

    @property
    def value(self) -> float:
        return float(sympy.log(sympy.N(self.magnitude, SYMPY_DIGITS)))

    def __add__(self, other: "LogTorsion") -> "LogTorsion":
        return LogTorsion(self.magnitude * other.magnitude)

    def __neg__(self) -> "LogTorsion":
        return LogTorsion(1 / self.magnitude)

    def __sub__(self, other: "LogTorsion") -> "LogTorsion":
        return self + (-other)

    def equals(self, other: "LogTorsion") -> bool:
        a = sympy.sympify(self.magnitude)
        b = sympy.sympify(other.magnitude)
        if a.is_Rational and b.is_Rational:
            return bool(a == b)
        return is_zero(a / b - 1)

    def is_close(self, other: "LogTorsion", tol: float) -> bool:
        return abs(self.value - other.value) <= tol


@dataclass(frozen=True)
class MappingCylinder:
    complex: ChainComplexData
    inclusion: Tuple[Any, ...]


@dataclass(frozen=True)
class ShortExactSequence:
    """0 -> A --i--> X --j--> X/A -> 0 with homology bases on each term."""

    sub: ChainComplexData
    sub_homology: HomologyBasisData
    total: ChainComplexData
    total_homology: HomologyBasisData
    quotient: ChainComplexData
    quotient_homology: HomologyBasisData
    inclusion: Tuple[Any, ...]
    projection: Tuple[Any, ...]


def first_violation(c: ChainComplexData) -> Optional[int]:
    """Lowest q with ∂_q ∘ ∂_{q+1} != 0, or None."""
    for q in range(1, c.length):
        product = c.boundary(q) * c.boundary(q + 1)
        if any(not is_zero(x) for x in product):
            return q
    return None


def validate_complex(c: ChainComplexData) -> bool:
    q = first_violation(c)
    if q is not None:
        logger.warning(f"Chain condition fails in degree {q}: ∂_{q}∂_{q + 1} != 0")
        return False
    return True


def _require_valid(c: ChainComplexData) -> None:
    q = first_violation(c)
    if q is not None:
        raise ChainComplexError(f"Not a chain complex: ∂_{q}∂_{q + 1} != 0")


def boundary_ranks(c: ChainComplexData) -> Tuple[int, ...]:
    """rank ∂_q for q = 0..m+1."""
    return tuple(matrix_rank(c.boundary(q)) for q in range(c.length + 2))


def betti_ranks(c: ChainComplexData) -> List[int]:
    _require_valid(c)
    s = boundary_ranks(c)
    return [c.rank(q) - s[q] - s[q + 1] for q in range(c.length + 1)]


def _null_space(m: Any, n: int) -> List[Any]:
    if m.rows == 0:
        return [identity(n)[:, j] for j in range(n)]
    return [ImmutableMatrix(v) for v in m.nullspace(iszerofunc=is_zero)]


@lru_cache(maxsize=256)
def _class_projection(c: ChainComplexData, q: int) -> Tuple[Any, Any]:
    """Rational data for reading homology classes in degree q.

    Returns (E, P): E completes a basis of B_q to one of Z_q, and P maps a
    cycle to the coordinates of its class against the columns of E.
    """
    n = c.rank(q)
    image = c.boundary(q + 1)
    b_basis = hstack(n, *[image[:, j] for j in pivot_columns(image)])
    extension: List[Any] = []
    current = b_basis
    for v in _null_space(c.boundary(q), n):
        candidate = hstack(n, current, v)
        if matrix_rank(candidate) > current.cols:
            extension.append(v)
            current = candidate
    e_basis = hstack(n, *extension)
    if current.cols == 0:
        return e_basis, zeros(0, n)
    left_inverse = inverse(ImmutableMatrix(current.T * current)) * current.T
    projection = ImmutableMatrix(left_inverse[b_basis.cols :, :])
    return e_basis, projection


def standard_homology_basis(c: ChainComplexData) -> HomologyBasisData:
    """A rational homology basis read off the null spaces of ∂."""
    _require_valid(c)
    return HomologyBasisData(
        tuple(_class_projection(c, q)[0] for q in range(c.length + 1))
    )


def homology_class_coordinates(
    c: ChainComplexData, q: int, h: HomologyBasisData, v: Any
) -> Any:
    """Coordinates of the class of the cycle(s) ``v`` in the basis h_q."""
    _, projection = _class_projection(c, q)
    basis = projection * h.cycle_matrix(q)
    return ImmutableMatrix(inverse(ImmutableMatrix(basis)) * (projection * v))


def validate_homology_basis(c: ChainComplexData, h: HomologyBasisData) -> None:
    if len(h.cycles) != c.length + 1:
        raise ChainComplexError(
            f"Homology basis has {len(h.cycles)} degrees, complex has "
            f"{c.length + 1}"
        )
    betti = betti_ranks(c)
    for q, z in enumerate(h.cycles):
        if z.rows != c.rank(q):
            raise ChainComplexError(
                f"Cycles in degree {q} have {z.rows} coordinates, expected "
                f"{c.rank(q)}"
            )
        if z.cols != betti[q]:
            raise ChainComplexError(
                f"Degree {q} needs {betti[q]} homology generators, got {z.cols}"
            )
        if any(not is_zero(x) for x in c.boundary(q) * z):
            raise ChainComplexError(f"A column of z_{q} is not a cycle")
        if z.cols:
            _, projection = _class_projection(c, q)
            if is_zero(determinant(ImmutableMatrix(projection * z))):
                raise ChainComplexError(
                    f"z_{q} is linearly dependent modulo boundaries"
                )


def default_b_sets(c: ChainComplexData) -> Tuple[Any, ...]:
    """b_q as the standard vectors at the pivot columns of ∂_q."""
    sets = []
    for q in range(c.length + 2):
        n = c.rank(q)
        pivots = pivot_columns(c.boundary(q))
        sets.append(hstack(n, *[identity(n)[:, j] for j in pivots]))
    return tuple(sets)


def _check_b_sets(c: ChainComplexData, b: Sequence[Any]) -> Tuple[Any, ...]:
    if len(b) not in (c.length + 1, c.length + 2):
        raise ChainComplexError(
            f"Expected b-sets for degrees 0..{c.length}, got {len(b)}"
        )
    sets = [
        ImmutableMatrix(x) if x.cols else zeros(c.rank(q), 0) for q, x in enumerate(b)
    ]
    if len(sets) == c.length + 1:
        sets.append(zeros(0, 0))
    ranks = boundary_ranks(c)
    for q, bq in enumerate(sets):
        if bq.cols != ranks[q] or matrix_rank(c.boundary(q) * bq) != ranks[q]:
            raise ChainComplexError(
                f"b_{q} must be {ranks[q]} vectors with independent boundaries"
            )
    return tuple(sets)


def _basis_matrices(
    c: ChainComplexData, h: HomologyBasisData, b: Optional[Sequence[Any]]
) -> List[Any]:
    _require_valid(c)
    validate_homology_basis(c, h)
    sets = default_b_sets(c) if b is None else _check_b_sets(c, b)
    matrices = []
    for q in range(c.length + 1):
        n = c.rank(q)
        image = ImmutableMatrix(c.boundary(q + 1) * sets[q + 1])
        m = hstack(n, image, h.cycle_matrix(q), sets[q])
        if m.shape != (n, n):
            raise ChainComplexError(
                f"(∂b_{q + 1}, z_{q}, b_{q}) has {m.cols} vectors in a space of "
                f"rank {n}"
            )
        matrices.append(m)
    return matrices


def torsion_determinants(
    c: ChainComplexData, h: HomologyBasisData, b: Optional[Sequence[Any]] = None
) -> List[Any]:
    """D_q = det(∂b_{q+1}, z_q, b_q / c_q) for q = 0..m."""
    dets = []
    for q, m in enumerate(_basis_matrices(c, h, b)):
        d = determinant(m)
        if is_zero(d):
            raise ChainComplexError(
                f"(∂b_{q + 1}, z_{q}, b_{q}) is not a basis of C_{q}"
            )
        dets.append(d)
    return dets


def alternating_product(dets: Sequence[Any], start: int = 0) -> LogTorsion:
    """∏ |D_q|^{(-1)^q} over the given degrees, q counted from ``start``."""
    result = Integer(1)
    for offset, d in enumerate(dets):
        factor = magnitude(d)
        result = result * (factor if (start + offset) % 2 == 0 else 1 / factor)
    return LogTorsion(result)


def torsion_log(
    c: ChainComplexData, h: HomologyBasisData, b: Optional[Sequence[Any]] = None
) -> LogTorsion:
    """Torsion of ``c`` with homology basis ``h``.

    Args:
        c (ChainComplexData): The complex, with ∂∂ = 0.
        h (HomologyBasisData): Cycles representing a basis of homology.
        b (Optional[Sequence[Matrix]]): b_q for q = 0..m; pivot columns of
            ∂_q when omitted.

    Returns:
        LogTorsion: log |∏ D_q^{(-1)^q}|; the sign class is discarded.
    """
    return alternating_product(torsion_determinants(c, h, b))


def direct_sum(c1: ChainComplexData, c2: ChainComplexData) -> ChainComplexData:
    length = max(c1.length, c2.length)
    ranks = tuple(c1.rank(q) + c2.rank(q) for q in range(length + 1))
    boundaries = []
    for q in range(1, length + 1):
        a, d = c1.boundary(q), c2.boundary(q)
        top = hstack(a.rows, a, zeros(a.rows, d.cols))
        bottom = hstack(d.rows, zeros(d.rows, a.cols), d)
        boundaries.append(vstack(a.cols + d.cols, top, bottom))
    return ChainComplexData(ranks, tuple(boundaries))


def direct_sum_homology(
    c1: ChainComplexData,
    h1: HomologyBasisData,
    c2: ChainComplexData,
    h2: HomologyBasisData,
) -> HomologyBasisData:
    length = max(c1.length, c2.length)
    cycles = []
    for q in range(length + 1):
        z1 = h1.cycle_matrix(q) if q <= c1.length else zeros(0, 0)
        z2 = h2.cycle_matrix(q) if q <= c2.length else zeros(0, 0)
        top = hstack(c1.rank(q), z1, zeros(c1.rank(q), z2.cols))
        bottom = hstack(c2.rank(q), zeros(c2.rank(q), z1.cols), z2)
        cycles.append(vstack(z1.cols + z2.cols, top, bottom))
    return HomologyBasisData(tuple(cycles))


def change_chain_basis(
    c: ChainComplexData, change: Sequence[Any], h: Optional[HomologyBasisData] = None
) -> Tuple[ChainComplexData, Optional[HomologyBasisData]]:
    """Rewrites ``c`` (and cycles of ``h``) in the basis c'_q = c_q P_q."""
    inverses = [inverse(ImmutableMatrix(p)) for p in change]
    boundaries = tuple(
        ImmutableMatrix(inverses[q - 1] * c.boundary(q) * change[q])
        for q in range(1, c.length + 1)
    )
    moved = ChainComplexData(c.ranks, boundaries)
    if h is None:
        return moved, None
    return moved, HomologyBasisData(
        tuple(ImmutableMatrix(inverses[q] * z) for q, z in enumerate(h.cycles))
    )


def mapping_cylinder(c: ChainComplexData) -> MappingCylinder:
    """Cylinder of the identity of ``c``.

    C_q(Cyl) = C_q ⊕ C_{q-1} ⊕ C_q with boundary
    [[∂, 1, 0], [0, -∂, 0], [0, -1, ∂]];
    the inclusion is the first summand.
    """
    _require_valid(c)
    length = c.length + 1

    def cyl_rank(q: int) -> int:
        return c.rank(q) + c.rank(q - 1) + c.rank(q)

    ranks = tuple(cyl_rank(q) for q in range(length + 1))
    boundaries = []
    for q in range(1, length + 1):
        n0, n1, n2 = c.rank(q), c.rank(q - 1), c.rank(q - 2)
        d, d_low = c.boundary(q), c.boundary(q - 1)
        one = identity(n1) if n1 else zeros(0, 0)
        cols = 2 * n0 + n1
        rows = [
            hstack(n1, d, one, zeros(n1, n0)),
            hstack(n2, zeros(n2, n0), ImmutableMatrix(-d_low), zeros(n2, n0)),
            hstack(n1, zeros(n1, n0), ImmutableMatrix(-one), d),
        ]
        boundaries.append(vstack(cols, *rows))
    cylinder = ChainComplexData(ranks, tuple(boundaries))
    inclusion = tuple(
        vstack(
            c.rank(q),
            identity(c.rank(q)),
            zeros(c.rank(q - 1) + c.rank(q), c.rank(q)),
        )
        for q in range(c.length + 1)
    )
    return MappingCylinder(cylinder, inclusion)


def induced_homology_log_det(
    chain_map: Sequence[Any],
    source: ChainComplexData,
    source_homology: HomologyBasisData,
    target: ChainComplexData,
    target_homology: HomologyBasisData,
) -> LogTorsion:
    """log ∏ |det f_{*,q}|^{(-1)^q} against the given homology bases."""
    dets = []
    for q in range(source.length + 1):
        image = ImmutableMatrix(chain_map[q] * source_homology.cycle_matrix(q))
        coords = homology_class_coordinates(target, q, target_homology, image)
        if coords.rows != coords.cols:
            raise ChainComplexError(f"f_* is not square in degree {q}")
        dets.append(determinant(coords))
    return alternating_product(dets)


def dual_complex(c: ChainComplexData) -> ChainComplexData:
    """C†_q = C_{m-q} with ∂†_q the transpose of ∂_{m-q+1}."""
    m = c.length
    ranks = tuple(reversed(c.ranks))
    boundaries = tuple(
        ImmutableMatrix(c.boundary(m - q + 1).T) for q in range(1, m + 1)
    )
    return ChainComplexData(ranks, boundaries)


def dual_bases(
    c: ChainComplexData, h: HomologyBasisData, b: Optional[Sequence[Any]] = None
) -> Tuple[HomologyBasisData, Tuple[Any, ...]]:
    """Bases of the dual complex transported through (M_q^{-1})^T.

    With these, the determinants of the dual satisfy D†_{m-q} = ±1/D_q.
    """
    m = c.length
    ranks = boundary_ranks(c)
    matrices = _basis_matrices(c, h, b)
    cycles: List[Any] = [zeros(0, 0)] * (m + 1)
    sets: List[Any] = [zeros(0, 0)] * (m + 1)
    for j, mj in enumerate(matrices):
        dual = ImmutableMatrix(inverse(mj).T)
        s_up, r = ranks[j + 1], h.cycle_matrix(j).cols
        cycles[m - j] = ImmutableMatrix(dual[:, s_up : s_up + r])
        sets[m - j] = ImmutableMatrix(dual[:, :s_up])
    return HomologyBasisData(tuple(cycles)), tuple(sets)


def _right_inverse(m: Any) -> Any:
    return ImmutableMatrix(m.T * inverse(ImmutableMatrix(m * m.T)))


def _left_inverse(m: Any) -> Any:
    return ImmutableMatrix(inverse(ImmutableMatrix(m.T * m)) * m.T)


def _check_sequence(seq: ShortExactSequence) -> None:
    for c in (seq.sub, seq.total, seq.quotient):
        _require_valid(c)
    length = seq.total.length
    for q in range(length + 1):
        i, j = seq.inclusion[q], seq.projection[q]
        if matrix_rank(i) != seq.sub.rank(q):
            raise ChainComplexError(f"i_{q} is not injective")
        if matrix_rank(j) != seq.quotient.rank(q):
            raise ChainComplexError(f"j_{q} is not surjective")
        if any(not is_zero(x) for x in j * i):
            raise ChainComplexError(f"j_{q} ∘ i_{q} != 0")
        if seq.sub.rank(q) + seq.quotient.rank(q) != seq.total.rank(q):
            raise ChainComplexError(f"Sequence is not exact at C_{q}(X)")
        if q >= 1:
            left = (
                seq.total.boundary(q) * i - seq.inclusion[q - 1] * seq.sub.boundary(q)
            )
            right = (
                seq.quotient.boundary(q) * j
                - seq.projection[q - 1] * seq.total.boundary(q)
            )
            if any(not is_zero(x) for x in left) or any(not is_zero(x) for x in right):
                raise ChainComplexError(f"i or j is not a chain map in degree {q}")


def _connecting_map(seq: ShortExactSequence, q: int) -> Any:
    """δ: H_q(X, A) -> H_{q-1}(A) in the given homology bases."""
    z = seq.quotient_homology.cycle_matrix(q)
    lifted = _right_inverse(seq.projection[q]) * z
    boundary = ImmutableMatrix(seq.total.boundary(q) * lifted)
    pulled = ImmutableMatrix(_left_inverse(seq.inclusion[q - 1]) * boundary)
    if any(not is_zero(x) for x in seq.inclusion[q - 1] * pulled - boundary):
        raise ChainComplexError(
            f"∂ of a lifted relative cycle misses A in degree {q - 1}"
        )
    return homology_class_coordinates(seq.sub, q - 1, seq.sub_homology, pulled)


def les_complex(seq: ShortExactSequence) -> ChainComplexData:
    """The long exact homology sequence as an acyclic complex T.

    T_{3q+2} = H_q(A), T_{3q+1} = H_q(X), T_{3q} = H_q(X, A), each with the
    given homology basis as its preferred basis.
    """
    _check_sequence(seq)
    for c, h in (
        (seq.sub, seq.sub_homology),
        (seq.total, seq.total_homology),
        (seq.quotient, seq.quotient_homology),
    ):
        validate_homology_basis(c, h)
    length = seq.total.length
    ranks: List[int] = []
    for q in range(length + 1):
        ranks.extend(
            [
                seq.quotient_homology.cycle_matrix(q).cols,
                seq.total_homology.cycle_matrix(q).cols,
                seq.sub_homology.cycle_matrix(q).cols,
            ]
        )
    boundaries: List[Any] = []
    for t in range(1, len(ranks)):
        q, slot = divmod(t, 3)
        if slot == 2:
            image = seq.inclusion[q] * seq.sub_homology.cycle_matrix(q)
            matrix = homology_class_coordinates(seq.total, q, seq.total_homology, image)
        elif slot == 1:
            image = seq.projection[q] * seq.total_homology.cycle_matrix(q)
            matrix = homology_class_coordinates(
                seq.quotient, q, seq.quotient_homology, image
            )
        else:
            matrix = _connecting_map(seq, q)
        boundaries.append(ImmutableMatrix(matrix))
    les = ChainComplexData(tuple(ranks), tuple(boundaries))
    if any(betti_ranks(les)):
        raise ChainComplexError("The homology sequence is not exact")
    return les


def pair_sequence_torsion_log(seq: ShortExactSequence) -> LogTorsion:
    """log τ(T) of the homology sequence of 0 -> A -> X -> X/A -> 0.

    With compatible preferred bases, log τ(X) = log τ(A) + log τ(X, A) +
    log τ(T).
    """
    les = les_complex(seq)
    return torsion_log(les, HomologyBasisData.empty(les))


def _scalar_to_json(value: Any) -> Any:
    value = sympy.sympify(value)
    if value.is_Rational:
        return str(value)
    coeff, factors = value.as_coeff_mul()
    radicands = []
    for factor in factors:
        if factor.is_Pow and factor.exp == Rational(1, 2) and factor.base.is_Rational:
            radicands.append(str(factor.base))
        else:
            raise ChainComplexError(f"Cannot serialise scalar {value}")
    return {"rat": str(coeff), "sqrt": radicands}


def complex_to_dict(
    c: ChainComplexData, h: Optional[HomologyBasisData] = None
) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "ranks": list(c.ranks),
        "boundaries": [
            [[str(m[i, j]) for j in range(m.cols)] for i in range(m.rows)]
            for m in c.boundaries
        ],
    }
    if h is not None:
        data["homology"] = {
            str(q): {
                "cycles": [
                    [_scalar_to_json(z[i, k]) for i in range(z.rows)]
                    for k in range(z.cols)
                ],
                "rank": z.cols,
            }
            for q, z in enumerate(h.cycles)
            if z.cols
        }
    return data


def complex_from_dict(
    data: Dict[str, Any]
) -> Tuple[ChainComplexData, Optional[HomologyBasisData]]:
    from torsionlab.schemas import SchemaError, validate_document

    try:
        validate_document("chain-complex", data)
    except SchemaError as e:
        raise ChainComplexError(f"Invalid chain complex document: {e}") from e
    c = ChainComplexData.from_matrices(data["ranks"], data["boundaries"])
    if "homology" not in data:
        return c, None
    vectors = {}
    for key, entry in data["homology"].items():
        cycles = entry["cycles"]
        if len(cycles) != entry["rank"]:
            raise ChainComplexError(
                f"Degree {key} lists {len(cycles)} cycles but rank {entry['rank']}"
            )
        vectors[int(key)] = cycles
    return c, HomologyBasisData.from_vectors(c, vectors)


def read_complex(path: str) -> Tuple[ChainComplexData, Optional[HomologyBasisData]]:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ChainComplexError(f"Cannot parse {path}: {e}") from e
    return complex_from_dict(data)
