"""Quaternionic matrices, the sigma correspondence and nilpotent Jordan invariants"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from src.algebra.exact_linalg import (
    RatMatrix,
    RatPoly,
    Scalar,
    char_poly,
    conjugate_test,
    identity,
    irreducible_factors,
    kernel_dim_sequence,
    kron,
    poly_eval_matrix,
    rank,
    rational_str,
    to_rational,
    zeros,
)
from src.utils.exceptions import (
    BlockPatternMismatch,
    DimensionMismatch,
    InvalidParams,
    NotNilpotent,
    NotQuaternionLinear,
    ParseError,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)


class Layout(Enum):
    """Coordinate orderings of R^{4q}"""
    # f_1, J1 f_1, J2 f_1, J3 f_1, f_2, ...
    INTERLEAVED = "interleaved"
    # four q x q blocks X, Y, Z, W
    GROUPED = "grouped"


@dataclass(frozen=True)
class Quaternion:
    """x + y i + z j + w k with rational components"""

    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)
    z: Fraction = Fraction(0)
    w: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("x", "y", "z", "w"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    @classmethod
    def real(cls, value: Scalar) -> "Quaternion":
        return cls(to_rational(value))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.x + other.x, self.y + other.y, self.z + other.z, self.w + other.w)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.x, -self.y, -self.z, -self.w)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return self + (-other)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        a1, b1, c1, d1 = self.x, self.y, self.z, self.w
        a2, b2, c2, d2 = other.x, other.y, other.z, other.w
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.x, -self.y, -self.z, -self.w)

    def norm_sq(self) -> Fraction:
        return self.x**2 + self.y**2 + self.z**2 + self.w**2

    def inverse(self) -> "Quaternion":
        n = self.norm_sq()
        if n == 0:
            raise InvalidParams("zero quaternion has no inverse")
        c = self.conjugate()
        return Quaternion(c.x / n, c.y / n, c.z / n, c.w / n)

    def is_zero(self) -> bool:
        return self.norm_sq() == 0

    def to_json(self) -> List[str]:
        return [rational_str(v) for v in (self.x, self.y, self.z, self.w)]

    @classmethod
    def from_json(cls, payload: Sequence[Scalar]) -> "Quaternion":
        if len(payload) != 4:
            raise ParseError("a quaternion needs four components")
        return cls(*(to_rational(v) for v in payload))


ZERO = Quaternion()
ONE = Quaternion(Fraction(1))


@dataclass(frozen=True)
class QuatMatrix:
    """q x q quaternionic matrix acting on a right H-vector space"""

    size: int
    entries: Tuple[Tuple[Quaternion, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.size or any(len(r) != self.size for r in self.entries):
            raise DimensionMismatch("quaternionic matrix must be square", size=self.size)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Quaternion]]) -> "QuatMatrix":
        return cls(len(rows), tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, q: int) -> "QuatMatrix":
        return cls.from_rows([[ONE if i == j else ZERO for j in range(q)] for i in range(q)])

    @classmethod
    def zero(cls, q: int) -> "QuatMatrix":
        return cls.from_rows([[ZERO] * q for _ in range(q)])

    @classmethod
    def jordan_block(cls, m: int, eigenvalue: Quaternion = ZERO) -> "QuatMatrix":
        """J_m(lambda): lambda on the diagonal, ones below it"""
        return cls.from_rows(
            [
                [eigenvalue if i == j else (ONE if i == j + 1 else ZERO) for j in range(m)]
                for i in range(m)
            ]
        )

    def __getitem__(self, index: Tuple[int, int]) -> Quaternion:
        i, j = index
        return self.entries[i][j]

    def __add__(self, other: "QuatMatrix") -> "QuatMatrix":
        return QuatMatrix.from_rows(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        )

    def __matmul__(self, other: "QuatMatrix") -> "QuatMatrix":
        if self.size != other.size:
            raise DimensionMismatch("size mismatch", left=self.size, right=other.size)
        q = self.size
        rows = []
        for i in range(q):
            row = []
            for j in range(q):
                acc = ZERO
                for k in range(q):
                    acc = acc + self[i, k] * other[k, j]
                row.append(acc)
            rows.append(row)
        return QuatMatrix.from_rows(rows)

    def __pow__(self, k: int) -> "QuatMatrix":
        result = QuatMatrix.identity(self.size)
        for _ in range(k):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def to_json(self) -> List[List[List[str]]]:
        return [[e.to_json() for e in r] for r in self.entries]

    @classmethod
    def from_json(cls, payload: Sequence[Sequence[Sequence[Scalar]]]) -> "QuatMatrix":
        return cls.from_rows([[Quaternion.from_json(e) for e in r] for r in payload])


def quat_block_diag(*blocks: QuatMatrix) -> QuatMatrix:
    q = sum(b.size for b in blocks)
    rows = [[ZERO] * q for _ in range(q)]
    offset = 0
    for b in blocks:
        for i in range(b.size):
            for j in range(b.size):
                rows[offset + i][offset + j] = b[i, j]
        offset += b.size
    return QuatMatrix.from_rows(rows)


@dataclass(frozen=True)
class SigmaTuple:
    """Sigma(B) = (r, m_1..m_r, p_1..p_r, s)"""

    r: int
    m: Tuple[int, ...]
    p: Tuple[int, ...]
    s: int

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(self.m))
        object.__setattr__(self, "p", tuple(self.p))
        if self.r != len(self.m) or self.r != len(self.p):
            raise InvalidParams("r must equal the number of block sizes", r=self.r)
        if any(a <= b for a, b in zip(self.m, self.m[1:])):
            raise InvalidParams("block sizes must be strictly decreasing", m=self.m)
        if any(mi < 2 for mi in self.m) or any(pi < 1 for pi in self.p) or self.s < 0:
            raise InvalidParams("need m_i >= 2, p_i >= 1 and s >= 0", m=self.m, p=self.p, s=self.s)

    @classmethod
    def from_blocks(cls, blocks: Dict[int, int], s: int) -> "SigmaTuple":
        sizes = sorted((m for m, c in blocks.items() if c > 0), reverse=True)
        return cls(len(sizes), tuple(sizes), tuple(blocks[m] for m in sizes), s)

    @property
    def quaternionic_dim(self) -> int:
        """n - 1 = sum m_i p_i + s"""
        return sum(mi * pi for mi, pi in zip(self.m, self.p)) + self.s

    @property
    def n(self) -> int:
        return self.quaternionic_dim + 1

    def to_dict(self) -> Dict[str, object]:
        return {"r": self.r, "m": list(self.m), "p": list(self.p), "s": self.s}

    def __str__(self) -> str:
        return f"({', '.join(str(v) for v in (self.r, *self.m, *self.p, self.s))})"


# Left multiplication by i, j, k on H = span{1, i, j, k}
L_I = RatMatrix.from_rows([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
L_J = RatMatrix.from_rows([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
L_K = RatMatrix.from_rows([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])


@dataclass(frozen=True)
class StandardJTriple:
    """J_1, J_2, J_3 on R^{4(n-1)} in the interleaved basis"""

    n: int
    J1: RatMatrix
    J2: RatMatrix
    J3: RatMatrix

    @property
    def operators(self) -> Tuple[RatMatrix, RatMatrix, RatMatrix]:
        return self.J1, self.J2, self.J3

    def apply_all(self, v: Sequence[Scalar]) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(J.apply(v) for J in self.operators)


def standard_triple(q: int) -> StandardJTriple:
    """Standard hypercomplex triple on H^q = R^{4q}"""
    eye = identity(q)
    return StandardJTriple(q + 1, kron(eye, L_I), kron(eye, L_J), kron(eye, L_K))


def elementary_jordan(m: int) -> RatMatrix:
    """j_m: ones on the subdiagonal"""
    return RatMatrix.from_rows([[1 if i == j + 1 else 0 for j in range(m)] for i in range(m)])


def quaternionic_jordan(m: int) -> RatMatrix:
    """The 4m x 4m block matrix j_m tensor I_4"""
    return kron(elementary_jordan(m), identity(4))


def u_insert() -> RatMatrix:
    """Columns J_1 e, J_2 e, J_3 e of the first quaternionic basis vector"""
    return RatMatrix.from_rows([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def commutes_with_triple(B: RatMatrix) -> bool:
    if not B.is_square or B.rows % 4:
        return False
    triple = standard_triple(B.rows // 4)
    return all((B @ J - J @ B).is_zero() for J in triple.operators)


def grouped_to_interleaved(B: RatMatrix) -> RatMatrix:
    """Reorder coordinates alpha*q + j into 4j + alpha"""
    q = B.rows // 4
    perm = [(k % 4) * q + k // 4 for k in range(4 * q)]
    return RatMatrix.from_rows([[B[perm[i], perm[j]] for j in range(4 * q)] for i in range(4 * q)])


def interleaved_to_grouped(B: RatMatrix) -> RatMatrix:
    q = B.rows // 4
    perm = [4 * (k % q) + k // q for k in range(4 * q)]
    return RatMatrix.from_rows([[B[perm[i], perm[j]] for j in range(4 * q)] for i in range(4 * q)])


def _right_mult_block(x: Fraction, y: Fraction, z: Fraction, w: Fraction) -> List[List[Fraction]]:
    return [[x, -y, -z, -w], [y, x, w, -z], [z, -w, x, y], [w, z, -y, x]]


def sigma(B: RatMatrix, layout: Layout = Layout.INTERLEAVED) -> QuatMatrix:
    """sigma(B) = X + iY - jZ + kW"""
    if not B.is_square or B.rows % 4:
        raise BlockPatternMismatch("matrix size must be a multiple of 4", shape=B.shape)
    if layout is Layout.GROUPED:
        B = grouped_to_interleaved(B)
    if not commutes_with_triple(B):
        raise BlockPatternMismatch("matrix does not commute with the standard triple")
    q = B.rows // 4
    rows = []
    for r in range(q):
        row = []
        for c in range(q):
            x, y, z, w = (B[4 * r + a, 4 * c] for a in range(4))
            row.append(Quaternion(x, y, -z, w))
        rows.append(row)
    return QuatMatrix.from_rows(rows)


def sigma_inv(Q: QuatMatrix, layout: Layout = Layout.INTERLEAVED) -> RatMatrix:
    """Real 4q x 4q block matrix of a quaternionic matrix"""
    q = Q.size
    data = [[Fraction(0)] * (4 * q) for _ in range(4 * q)]
    for r in range(q):
        for c in range(q):
            h = Q[r, c]
            block = _right_mult_block(h.x, h.y, -h.z, h.w)
            for a in range(4):
                for b in range(4):
                    data[4 * r + a][4 * c + b] = block[a][b]
    real = RatMatrix.from_rows(data) if q else zeros(0, 0)
    return interleaved_to_grouped(real) if layout is Layout.GROUPED else real


def sigma_from_kernel_sequence(seq: Sequence[int], dim: int) -> SigmaTuple:
    """Block sizes from a kernel-dimension staircase (already divided by 4)"""
    at_least = [b - a for a, b in zip([0, *seq], seq)] + [0]
    blocks = {size: at_least[size - 1] - at_least[size] for size in range(1, len(seq) + 1)}
    s = blocks.pop(1, 0)
    sigma_t = SigmaTuple.from_blocks(blocks, s)
    if sigma_t.quaternionic_dim != dim:
        raise NotNilpotent("kernel sequence does not exhaust the space", dim=dim)
    return sigma_t


def sigma_tuple_from_real(B: RatMatrix) -> SigmaTuple:
    """Sigma tuple of a nilpotent J-commuting real matrix"""
    if not commutes_with_triple(B):
        raise NotQuaternionLinear("matrix does not commute with J_1, J_2, J_3")
    seq = kernel_dim_sequence(B)
    if seq[-1] != B.rows:
        raise NotNilpotent("matrix is not nilpotent", kernel_sequence=seq)
    if any(k % 4 for k in seq):
        raise NotQuaternionLinear("kernel dimensions are not multiples of 4", kernel_sequence=seq)
    result = sigma_from_kernel_sequence([k // 4 for k in seq], B.rows // 4)
    logger.debug(f"kernel sequence {seq} gives Sigma {result}")
    return result


def jordan_form(sigma_t: SigmaTuple) -> QuatMatrix:
    """Block-diagonal J-form with blocks in decreasing size"""
    blocks = [QuatMatrix.jordan_block(m) for m, p in zip(sigma_t.m, sigma_t.p) for _ in range(p)]
    blocks += [QuatMatrix.zero(1)] * sigma_t.s
    return quat_block_diag(*blocks) if blocks else QuatMatrix.zero(0)


def quat_jordan_nilpotent(Q: QuatMatrix) -> SigmaTuple:
    """Sigma tuple of a nilpotent quaternionic matrix, certified by conjugacy of real forms"""
    if not (Q ** Q.size).is_zero():
        raise NotNilpotent("Q^q is not zero", size=Q.size)
    real = sigma_inv(Q)
    result = sigma_tuple_from_real(real)
    if not conjugate_test(sigma_inv(jordan_form(result)), real):
        raise NotNilpotent("reconstructed Jordan form is not conjugate to the input")
    return result


@dataclass(frozen=True)
class EigenBlocks:
    """Quaternionic Jordan blocks attached to one eigenvalue class"""
    factor: RatPoly
    root: str
    blocks: Dict[int, int]


def quat_jordan_structure(B: RatMatrix) -> List[EigenBlocks]:
    """Quaternionic Jordan block sizes per eigenvalue class of a J-commuting rational matrix.

    Supported spectra are those whose irreducible factors over Q have degree at most 2.
    """
    if not commutes_with_triple(B):
        raise NotQuaternionLinear("matrix does not commute with J_1, J_2, J_3")
    result = []
    for f, _ in irreducible_factors(char_poly(B)):
        if f.degree > 2:
            raise InvalidParams("irreducible factor of degree above 2 is not supported", factor=str(f))
        fm = poly_eval_matrix(f, B)
        dims, power = [], identity(B.rows)
        while True:
            power = power @ fm
            dims.append(B.rows - rank(power))
            if len(dims) > 1 and dims[-1] == dims[-2]:
                dims.pop()
                break
        if f.degree == 1:
            roots, divisor = [rational_str(-f.coeffs[0])], 4
        else:
            c0, c1 = f.coeffs[0], f.coeffs[1]
            disc = c1 * c1 - 4 * c0
            if disc < 0:
                roots, divisor = [f"({rational_str(-c1)} + sqrt({rational_str(disc)}))/2"], 4
            else:
                # Galois-conjugate real roots carry identical structure
                roots = [f"({rational_str(-c1)} {sign} sqrt({rational_str(disc)}))/2" for sign in "+-"]
                divisor = 8
        if any(k % divisor for k in dims):
            raise NotQuaternionLinear("eigenspace dimensions are incompatible with J", factor=str(f))
        seq = [k // divisor for k in dims]
        at_least = [b - a for a, b in zip([0, *seq], seq)] + [0]
        blocks = {size: at_least[size - 1] - at_least[size] for size in range(1, len(seq) + 1)}
        blocks = {size: count for size, count in blocks.items() if count}
        result.extend(EigenBlocks(f, root, blocks) for root in roots)
    return result
