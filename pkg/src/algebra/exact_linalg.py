"""Exact rational linear algebra on top of sympy's DomainMatrix"""

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from src.utils.exceptions import DimensionMismatch, ParseError
from src.utils.logger import get_logger

logger = get_logger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction, str]

X = sympy.Symbol("x")


def to_rational(value: Scalar) -> Fraction:
    """Coerce an int, Fraction or "num/den" string to a reduced Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"not a rational: {value!r}", position=0) from e
    if isinstance(value, sympy.Basic):
        r = sympy.Rational(value)
        return Fraction(int(r.p), int(r.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise ParseError(f"not a rational: {value!r}")


def rational_str(value: Fraction) -> str:
    """Render as "num/den", or "num" for integers"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _from_qq(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def _to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


@dataclass(frozen=True)
class RatPoly:
    """Polynomial over the rationals, ascending coefficients"""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [to_rational(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, value: Fraction) -> Fraction:
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coeffs)) or [0], X, domain=QQ)

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "RatPoly":
        return cls(tuple(to_rational(c) for c in reversed(poly.all_coeffs())))

    def __mul__(self, other: "RatPoly") -> "RatPoly":
        return RatPoly.from_sympy(self.to_sympy() * other.to_sympy())

    def __pow__(self, k: int) -> "RatPoly":
        return RatPoly.from_sympy(self.to_sympy() ** k)

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())

    def to_json(self) -> List[str]:
        return [rational_str(c) for c in self.coeffs]


@dataclass(frozen=True)
class RatMatrix:
    """Dense matrix of exact rationals"""

    rows: int
    cols: int
    entries: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(
                "entries do not match the declared shape", rows=self.rows, cols=self.cols
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]]) -> "RatMatrix":
        data = tuple(tuple(to_rational(v) for v in row) for row in rows)
        ncols = len(data[0]) if data else 0
        return cls(len(data), ncols, data)

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "RatMatrix":
        nrows, ncols = dm.shape
        data = dm.to_Matrix().tolist()
        return cls(nrows, ncols, tuple(tuple(to_rational(v) for v in row) for row in data))

    @cached_property
    def domain(self) -> DomainMatrix:
        return DomainMatrix(
            [[_to_qq(v) for v in row] for row in self.entries], (self.rows, self.cols), QQ
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    @property
    def T(self) -> "RatMatrix":
        if self.rows == 0:
            return zeros(self.cols, 0)
        return RatMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    def _check_same_shape(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch", left=self.shape, right=other.shape)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __neg__(self) -> "RatMatrix":
        return self.scale(Fraction(-1))

    def scale(self, c: Scalar) -> "RatMatrix":
        c = to_rational(c)
        return RatMatrix(self.rows, self.cols, tuple(tuple(c * v for v in r) for r in self.entries))

    def __rmul__(self, c: Scalar) -> "RatMatrix":
        return self.scale(c)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("inner dimensions differ", left=self.shape, right=other.shape)
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return zeros(self.rows, other.cols)
        return RatMatrix.from_domain(self.domain.matmul(other.domain))

    def __pow__(self, k: int) -> "RatMatrix":
        if not self.is_square:
            raise DimensionMismatch("power of a non-square matrix", shape=self.shape)
        if k < 0:
            return inverse(self) ** (-k)
        if k == 0 or self.rows == 0:
            return identity(self.rows)
        return RatMatrix.from_domain(self.domain ** k)

    def apply(self, vector: Sequence[Scalar]) -> Tuple[Fraction, ...]:
        """Matrix times column vector"""
        vec = [to_rational(v) for v in vector]
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length mismatch", cols=self.cols, length=len(vec))
        return tuple(sum((a * b for a, b in zip(r, vec)), Fraction(0)) for r in self.entries)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.entries for v in r)

    def is_integer(self) -> bool:
        return all(v.denominator == 1 for r in self.entries for v in r)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        return RatMatrix.from_rows([r[c0:c1] for r in self.entries[r0:r1]])

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries], dtype=float).reshape(
            self.rows, self.cols
        )

    def to_json(self) -> Dict[str, object]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[rational_str(v) for v in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, payload: Dict[str, object]) -> "RatMatrix":
        try:
            nrows = int(payload["rows"])  # type: ignore[arg-type]
            ncols = int(payload["cols"])  # type: ignore[arg-type]
            data = payload["entries"]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"malformed matrix payload: {e}") from e
        if nrows == 0 or ncols == 0:
            return zeros(nrows, ncols)
        try:
            matrix = cls.from_rows(data)  # type: ignore[arg-type]
        except DimensionMismatch as e:
            raise ParseError("ragged matrix entries") from e
        if matrix.shape != (nrows, ncols):
            raise ParseError("declared shape does not match entries", rows=nrows, cols=ncols)
        return matrix


def identity(n: int) -> RatMatrix:
    return RatMatrix.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)]) if n else zeros(0, 0)


def zeros(nrows: int, ncols: Optional[int] = None) -> RatMatrix:
    ncols = nrows if ncols is None else ncols
    return RatMatrix(nrows, ncols, tuple(tuple(Fraction(0) for _ in range(ncols)) for _ in range(nrows)))


def diag(values: Sequence[Scalar]) -> RatMatrix:
    n = len(values)
    return RatMatrix.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


def block_diag(*blocks: RatMatrix) -> RatMatrix:
    """Direct sum of matrices"""
    nrows = sum(b.rows for b in blocks)
    ncols = sum(b.cols for b in blocks)
    data = [[Fraction(0)] * ncols for _ in range(nrows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                data[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return RatMatrix(nrows, ncols, tuple(tuple(r) for r in data))


def direct_power(M: RatMatrix, k: int) -> RatMatrix:
    """M ⊕ M ⊕ ... (k copies)"""
    return block_diag(*([M] * k)) if k > 0 else zeros(0, 0)


def kron(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    return RatMatrix.from_rows(
        [
            [A[i, j] * B[k, l] for j in range(A.cols) for l in range(B.cols)]
            for i in range(A.rows)
            for k in range(B.rows)
        ]
    )


def hstack(*blocks: RatMatrix) -> RatMatrix:
    nrows = blocks[0].rows
    if any(b.rows != nrows for b in blocks):
        raise DimensionMismatch("hstack row counts differ")
    return RatMatrix.from_rows([sum((list(b.row(i)) for b in blocks), []) for i in range(nrows)])


def vstack(*blocks: RatMatrix) -> RatMatrix:
    ncols = blocks[0].cols
    if any(b.cols != ncols for b in blocks):
        raise DimensionMismatch("vstack column counts differ")
    return RatMatrix.from_rows([r for b in blocks for r in b.entries])


def column_matrix(vectors: Sequence[Sequence[Scalar]]) -> RatMatrix:
    """Matrix whose columns are the given vectors"""
    return RatMatrix.from_rows(zip(*vectors)) if vectors else zeros(0, 0)


def trace(M: RatMatrix) -> Fraction:
    return sum((M[i, i] for i in range(min(M.rows, M.cols))), Fraction(0))


def det(M: RatMatrix) -> Fraction:
    if not M.is_square:
        raise DimensionMismatch("determinant of a non-square matrix", shape=M.shape)
    if M.rows == 0:
        return Fraction(1)
    return _from_qq(M.domain.det())


def inverse(M: RatMatrix) -> RatMatrix:
    if det(M) == 0:
        raise DimensionMismatch("matrix is singular", shape=M.shape)
    return RatMatrix.from_domain(M.domain.inv())


def rank(M: RatMatrix) -> int:
    """Exact rank over the rationals"""
    if M.rows == 0 or M.cols == 0:
        return 0
    return int(M.domain.rank())


def kernel_dim_sequence(M: RatMatrix) -> List[int]:
    """[dim ker M, dim ker M^2, ...] until the sequence stabilizes"""
    if not M.is_square:
        raise DimensionMismatch("kernel sequence of a non-square matrix", shape=M.shape)
    d = M.rows
    current = d - rank(M)
    sequence = [current]
    power = M
    while current < d:
        power = power @ M
        nxt = d - rank(power)
        if nxt == current:
            break
        sequence.append(nxt)
        current = nxt
    return sequence


def char_poly(M: RatMatrix) -> RatPoly:
    """Monic det(xI - M), computed fraction-free"""
    if not M.is_square:
        raise DimensionMismatch("characteristic polynomial of a non-square matrix", shape=M.shape)
    if M.rows == 0:
        return RatPoly((Fraction(1),))
    descending = M.domain.charpoly()
    return RatPoly(tuple(_from_qq(c) for c in reversed(descending)))


def poly_eval_matrix(poly: Union[RatPoly, sympy.Poly], M: RatMatrix) -> RatMatrix:
    """Horner evaluation of a polynomial at a square matrix"""
    coeffs = poly.coeffs if isinstance(poly, RatPoly) else RatPoly.from_sympy(poly).coeffs
    result = zeros(M.rows)
    eye = identity(M.rows)
    for c in reversed(coeffs):
        result = result @ M + eye.scale(c)
    return result


def irreducible_factors(poly: RatPoly) -> List[Tuple[RatPoly, int]]:
    """Monic irreducible factors over QQ with multiplicities"""
    _, factors = poly.to_sympy().factor_list()
    result = []
    for f, e in factors:
        f = f.monic()
        result.append((RatPoly.from_sympy(f), e))
    return sorted(result, key=lambda fe: (fe[0].degree, fe[0].coeffs))


def jordan_signature(M: RatMatrix) -> Dict[Tuple[Fraction, ...], List[int]]:
    """Kernel-dimension sequences of f(M)^j for every irreducible factor f of the char poly"""
    signature = {}
    for f, multiplicity in irreducible_factors(char_poly(M)):
        fm = poly_eval_matrix(f, M)
        dims = []
        power = identity(M.rows)
        for _ in range(multiplicity):
            power = power @ fm
            dims.append(M.rows - rank(power))
            if len(dims) > 1 and dims[-1] == dims[-2]:
                break
        signature[f.coeffs] = dims
    return signature


def conjugate_test(M1: RatMatrix, M2: RatMatrix) -> bool:
    """Decide conjugacy over QQ via elementary divisors"""
    if M1.shape != M2.shape or not M1.is_square:
        return False
    if char_poly(M1) != char_poly(M2):
        return False
    for f, multiplicity in irreducible_factors(char_poly(M1)):
        f1, f2 = poly_eval_matrix(f, M1), poly_eval_matrix(f, M2)
        p1, p2 = identity(M1.rows), identity(M2.rows)
        for _ in range(multiplicity):
            p1, p2 = p1 @ f1, p2 @ f2
            if rank(p1) != rank(p2):
                logger.debug(f"conjugacy fails at factor {f}")
                return False
    return True


def _rref(M: RatMatrix) -> Tuple[RatMatrix, Tuple[int, ...]]:
    reduced, pivots = M.domain.rref()
    return RatMatrix.from_domain(reduced), tuple(pivots)


def solve_linear(M: RatMatrix, b: Sequence[Scalar]) -> Optional[Tuple[Fraction, ...]]:
    """One exact solution of Mx = b, or None when inconsistent"""
    rhs = [to_rational(v) for v in b]
    if len(rhs) != M.rows:
        raise DimensionMismatch("right-hand side length mismatch", rows=M.rows, length=len(rhs))
    if M.cols == 0:
        return () if all(v == 0 for v in rhs) else None
    if M.rows == 0:
        return tuple(Fraction(0) for _ in range(M.cols))
    augmented = RatMatrix.from_rows([list(r) + [v] for r, v in zip(M.entries, rhs)])
    reduced, pivots = _rref(augmented)
    if M.cols in pivots:
        return None
    solution = [Fraction(0)] * M.cols
    for i, p in enumerate(pivots):
        solution[p] = reduced[i, M.cols]
    return tuple(solution)


def nullspace(M: RatMatrix) -> List[Tuple[Fraction, ...]]:
    """Basis of the right kernel"""
    if M.rows == 0:
        return [tuple(Fraction(int(i == j)) for i in range(M.cols)) for j in range(M.cols)]
    reduced, pivots = _rref(M)
    free = [j for j in range(M.cols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i, f]
        basis.append(tuple(v))
    return basis


def in_span(vectors: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    if not vectors:
        return all(x == 0 for x in v)
    base = column_matrix(vectors)
    return rank(hstack(base, column_matrix([v]))) == rank(base)


def random_invertible(n: int, rng: random.Random, steps: Optional[int] = None) -> RatMatrix:
    """Random unimodular integer matrix built from elementary row operations"""
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(steps if steps is not None else 3 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return RatMatrix.from_rows(rows)
