"""Nilpotent almost abelian Lie algebras with hypercomplex or complex structures"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import partitions

from src.algebra.exact_linalg import (
    RatMatrix,
    Scalar,
    block_diag,
    column_matrix,
    direct_power,
    hstack,
    identity,
    in_span,
    kernel_dim_sequence,
    kron,
    solve_linear,
    to_rational,
    zeros,
)
from src.algebra.quaternion_core import (
    SigmaTuple,
    elementary_jordan,
    sigma_from_kernel_sequence,
    standard_triple,
    u_insert,
)
from src.utils.exceptions import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidParams,
    NotNilpotent,
    NotQuaternionLinear,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

COMPLEX_J = RatMatrix.from_rows([[0, -1], [1, 0]])


class StructureKind(Enum):
    """Hypercomplex (beta = 4) or complex (beta = 2)"""
    HYPERCOMPLEX = "Hypercomplex"
    COMPLEX = "Complex"

    @property
    def beta(self) -> int:
        return 4 if self is StructureKind.HYPERCOMPLEX else 2

    def structures(self, q: int) -> Tuple[RatMatrix, ...]:
        """The complex structures on R^{beta q} that B must commute with"""
        if self is StructureKind.HYPERCOMPLEX:
            return standard_triple(q).operators
        return (kron(identity(q), COMPLEX_J),)

    def block(self, m: int) -> RatMatrix:
        """j_m tensor I_beta"""
        return kron(elementary_jordan(m), identity(self.beta))

    def insert(self) -> RatMatrix:
        """beta x (beta - 1) column block linking e_1.. to the first slot"""
        if self is StructureKind.HYPERCOMPLEX:
            return u_insert()
        return RatMatrix.from_rows([[1], [0]])


class CanonicalKind(Enum):
    """Shapes of canonical nilpotent matrices"""
    N = "N"
    A_ELL = "A_ell"
    ABELIAN = "abelian"


class Condition(Enum):
    """Admissibility patterns"""
    COND_I = "CondI"
    COND_II = "CondII"
    COND_III = "CondIII"
    ABELIAN = "Abelian"


@dataclass(frozen=True)
class JordanData:
    """j_{n_1}^{q_1} + ... + j_{n_k}^{q_k} + 0_d"""

    parts: Tuple[Tuple[int, int], ...]
    d: int

    def __post_init__(self):
        parts = tuple((int(n), int(q)) for n, q in self.parts)
        object.__setattr__(self, "parts", parts)
        sizes = [n for n, _ in parts]
        if any(a <= b for a, b in zip(sizes, sizes[1:])):
            raise InvalidParams("block sizes must be strictly decreasing", parts=parts)
        if any(n < 2 for n in sizes) or any(q < 1 for _, q in parts) or self.d < 0:
            raise InvalidParams("need n_i >= 2, q_i >= 1 and d >= 0", parts=parts, d=self.d)

    @property
    def dimension(self) -> int:
        return sum(n * q for n, q in self.parts) + self.d

    def matrix(self) -> RatMatrix:
        blocks = [elementary_jordan(n) for n, q in self.parts for _ in range(q)]
        return block_diag(*blocks, zeros(self.d))

    def to_dict(self) -> Dict[str, object]:
        return {"parts": [list(p) for p in self.parts], "d": self.d}


def jordan_data_of(M: RatMatrix) -> JordanData:
    """Jordan type of a nilpotent rational matrix"""
    seq = kernel_dim_sequence(M)
    if seq[-1] != M.rows:
        raise NotNilpotent("matrix is not nilpotent", kernel_sequence=seq)
    at_least = [b - a for a, b in zip([0, *seq], seq)] + [0]
    counts = {size: at_least[size - 1] - at_least[size] for size in range(1, len(seq) + 1)}
    parts = tuple((size, counts[size]) for size in sorted(counts, reverse=True) if size >= 2 and counts[size])
    return JordanData(parts, counts.get(1, 0))


@dataclass
class CanonicalNilpotent:
    """A canonical matrix N(s), A_ell or the abelian zero matrix"""
    kind: CanonicalKind
    sigma: SigmaTuple
    ell: Optional[int]
    structure: StructureKind
    matrix: RatMatrix

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def label(self) -> str:
        if self.kind is CanonicalKind.A_ELL:
            return f"A_{self.ell}"
        if self.kind is CanonicalKind.N:
            return f"N({self.sigma.s})"
        return "abelian"

    @property
    def step(self) -> int:
        if self.kind is CanonicalKind.ABELIAN:
            return 1
        return len(kernel_dim_sequence(self.matrix))

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "label": self.label,
            "sigma": self.sigma.to_dict(),
            "ell": self.ell,
            "structure": self.structure.value,
            "n": self.n,
            "matrix": self.matrix.to_json(),
        }


@dataclass(frozen=True)
class HcxAAData:
    """(mu, v0, B) defining A of an almost abelian algebra with a structure"""

    n: int
    mu: Fraction
    v0: Tuple[Fraction, ...]
    B: RatMatrix
    kind: StructureKind = StructureKind.HYPERCOMPLEX

    def __post_init__(self):
        object.__setattr__(self, "mu", to_rational(self.mu))
        object.__setattr__(self, "v0", tuple(to_rational(v) for v in self.v0))
        size = self.kind.beta * (self.n - 1)
        if self.B.shape != (size, size) or len(self.v0) != size:
            raise DimensionMismatch(
                "B and v0 must live on R^{beta(n-1)}", n=self.n, B=self.B.shape, v0=len(self.v0)
            )

    @property
    def q(self) -> int:
        return self.n - 1

    def with_v0(self, v0: Sequence[Scalar]) -> "HcxAAData":
        return HcxAAData(self.n, self.mu, tuple(v0), self.B, self.kind)

    def columns(self) -> List[Tuple[Fraction, ...]]:
        """v_alpha = J_alpha v0 (hypercomplex) or v0 itself (complex)"""
        if self.kind is StructureKind.COMPLEX:
            return [self.v0]
        return [J.apply(self.v0) for J in self.kind.structures(self.q)]


def commutes_with_structures(B: RatMatrix, kind: StructureKind) -> bool:
    if not B.is_square or B.rows % kind.beta:
        return False
    return all((B @ J - J @ B).is_zero() for J in kind.structures(B.rows // kind.beta))


def assemble_A(data: HcxAAData, check: bool = True) -> RatMatrix:
    """[[mu I, 0], [v_1 v_2 v_3, B]]"""
    if check and not commutes_with_structures(data.B, data.kind):
        raise NotQuaternionLinear("B does not commute with the structure operators")
    k = data.kind.beta - 1
    top = hstack(identity(k).scale(data.mu), zeros(k, data.B.cols))
    if not data.B.rows:
        return top
    bottom = hstack(column_matrix(data.columns()), data.B)
    return RatMatrix.from_rows(list(top.entries) + list(bottom.entries))


def _linked_block(kind: StructureKind, core: RatMatrix) -> RatMatrix:
    """[[0_{beta-1}, 0], [insert; 0, core]]"""
    k = kind.beta - 1
    insert = kind.insert()
    link = RatMatrix.from_rows(
        [list(insert.row(i)) if i < kind.beta else [0] * k for i in range(core.rows)]
    )
    top = hstack(zeros(k), zeros(k, core.cols))
    return RatMatrix.from_rows(list(top.entries) + list(hstack(link, core).entries))


def _n_matrix(kind: StructureKind, s: int) -> RatMatrix:
    return _linked_block(kind, zeros(kind.beta * s))


def canonical_matrix(sigma: SigmaTuple, ell: Optional[int], kind: StructureKind) -> CanonicalNilpotent:
    """N(s) when r = 0, otherwise A_ell"""
    beta = kind.beta
    if sigma.r == 0:
        if sigma.s == 0:
            raise IndexOutOfRange("N(s) needs s > 0")
        return CanonicalNilpotent(CanonicalKind.N, sigma, None, kind, _n_matrix(kind, sigma.s))
    upper = sigma.r + 1 - (1 if sigma.s == 0 else 0)
    if ell is None or not 0 <= ell <= upper:
        raise IndexOutOfRange(f"ell must lie in [0, {upper}]", ell=ell, sigma=str(sigma))
    groups = [direct_power(kind.block(m), p) for m, p in zip(sigma.m, sigma.p)]
    zero_part = zeros(beta * sigma.s)
    if ell == 0:
        matrix = block_diag(zeros(beta - 1), *groups, zero_part)
    elif ell <= sigma.r:
        m, p = sigma.m[ell - 1], sigma.p[ell - 1]
        n_ell = block_diag(_linked_block(kind, kind.block(m)), direct_power(kind.block(m), p - 1))
        matrix = block_diag(*groups[: ell - 1], n_ell, *groups[ell:], zero_part)
    else:
        matrix = block_diag(*groups, _n_matrix(kind, sigma.s))
    return CanonicalNilpotent(CanonicalKind.A_ELL, sigma, ell, kind, matrix)


def canonical_data(sigma: SigmaTuple, ell: Optional[int], kind: StructureKind) -> HcxAAData:
    """(mu=0, v0, B) whose assembled matrix lies in the class of canonical_matrix(sigma, ell)"""
    canonical_matrix(sigma, ell, kind)
    beta = kind.beta
    B = block_diag(
        *[direct_power(kind.block(m), p) for m, p in zip(sigma.m, sigma.p)], zeros(beta * sigma.s)
    )
    v0 = [Fraction(0)] * B.rows
    if sigma.r == 0 or ell == sigma.r + 1:
        v0[beta * sum(m * p for m, p in zip(sigma.m, sigma.p))] = Fraction(1)
    elif ell:
        v0[beta * sum(m * p for m, p in zip(sigma.m[: ell - 1], sigma.p[: ell - 1]))] = Fraction(1)
    return HcxAAData(sigma.n, Fraction(0), tuple(v0), B, kind)


def sigma_of(B: RatMatrix, kind: StructureKind) -> SigmaTuple:
    """Sigma tuple of a nilpotent structure-commuting matrix"""
    if not commutes_with_structures(B, kind):
        raise NotQuaternionLinear("B does not commute with the structure operators")
    if B.rows == 0:
        return SigmaTuple(0, (), (), 0)
    seq = kernel_dim_sequence(B)
    if seq[-1] != B.rows:
        raise NotNilpotent("B is not nilpotent", kernel_sequence=seq)
    if any(k % kind.beta for k in seq):
        raise NotQuaternionLinear("kernel dimensions are not multiples of beta", kernel_sequence=seq)
    return sigma_from_kernel_sequence([k // kind.beta for k in seq], B.rows // kind.beta)


def kernel_formula(sigma: SigmaTuple, ell: Optional[int], kind: StructureKind) -> List[int]:
    """Closed-form dim ker A^j for the canonical class"""
    beta = kind.beta
    total = beta * sigma.quaternionic_dim + beta - 1

    def base(j: int) -> int:
        return sum(beta * p * min(j, m) for m, p in zip(sigma.m, sigma.p)) + beta * sigma.s

    def value(j: int) -> int:
        if sigma.r == 0 or ell == sigma.r + 1:
            return base(j) + (beta - 1) * (j >= 2)
        if ell == 0:
            return base(j) + beta - 1
        return base(j) + (beta - 1) * (j > sigma.m[ell - 1])

    seq = []
    j = 1
    while True:
        seq.append(value(j))
        if seq[-1] >= total:
            return seq
        j += 1


def identify_class(data: HcxAAData) -> CanonicalNilpotent:
    """The unique canonical class of a nilpotent algebra with mu = 0"""
    if data.mu != 0:
        raise InvalidParams("identify_class needs mu = 0", mu=data.mu)
    sigma = sigma_of(data.B, data.kind)
    if sigma.r == 0:
        if all(v == 0 for v in data.v0):
            size = data.kind.beta * data.n - 1
            return CanonicalNilpotent(CanonicalKind.ABELIAN, sigma, None, data.kind, zeros(size))
        return canonical_matrix(sigma, None, data.kind)
    seq = kernel_dim_sequence(assemble_A(data))
    upper = sigma.r + 1 - (1 if sigma.s == 0 else 0)
    for ell in range(upper + 1):
        if kernel_formula(sigma, ell, data.kind) == seq:
            logger.debug(f"Sigma {sigma} with kernel sequence {seq} is A_{ell}")
            return canonical_matrix(sigma, ell, data.kind)
    raise InvalidParams("kernel sequence matches no canonical form", kernel_sequence=seq)


def _structure_lines(kind: StructureKind, size: int) -> List[List[Tuple[Fraction, ...]]]:
    operators = kind.structures(size // kind.beta)
    lines = []
    for i in range(size):
        e = tuple(Fraction(int(i == j)) for j in range(size))
        lines.append([e] + [J.apply(e) for J in operators])
    return lines


def normalize_v0(data: HcxAAData) -> HcxAAData:
    """Replace v0 by 0 or by its component in a structure-invariant complement of Im(B - mu I)"""
    size = data.B.rows
    if size == 0:
        return data
    shifted = data.B - identity(size).scale(data.mu)
    if solve_linear(shifted, data.v0) is not None:
        return data.with_v0([0] * size)
    span = [shifted.column(j) for j in range(size)]
    complement: List[Tuple[Fraction, ...]] = []
    for line in _structure_lines(data.kind, size):
        if not in_span(span + complement, line[0]):
            complement.extend(line)
    system = hstack(shifted, column_matrix(complement))
    solution = solve_linear(system, data.v0)
    if solution is None:
        raise InvalidParams("complement does not span the quotient")
    coeffs = solution[size:]
    v0 = [sum((c * w[i] for c, w in zip(coeffs, complement)), Fraction(0)) for i in range(size)]
    return data.with_v0(v0)


@dataclass
class AdmissibilityVerdict:
    """Outcome of the congruence test on a nilpotent Jordan type"""
    admissible: bool
    condition: Optional[Condition] = None
    t: Optional[int] = None
    witness: Optional[CanonicalNilpotent] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "admissible": self.admissible,
            "condition": self.condition.value if self.condition else None,
            "t": self.t,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def _sigma_from_counts(counts: Dict[int, int], s: int) -> SigmaTuple:
    return SigmaTuple.from_blocks({m: p for m, p in counts.items() if p > 0}, s)


def admissible(jd: JordanData, kind: StructureKind) -> AdmissibilityVerdict:
    """Decide whether a nilpotent Jordan type carries the structure, with a canonical witness"""
    beta = kind.beta
    if jd.dimension % beta != beta - 1:
        raise DimensionMismatch(
            f"dimension {jd.dimension} is not {beta - 1} mod {beta}", dimension=jd.dimension
        )
    if not jd.parts:
        sigma = SigmaTuple(0, (), (), (jd.d - beta + 1) // beta)
        witness = CanonicalNilpotent(CanonicalKind.ABELIAN, sigma, None, kind, zeros(jd.dimension))
        return AdmissibilityVerdict(True, Condition.ABELIAN, None, witness)

    sizes = [n for n, _ in jd.parts]
    mults = [q for _, q in jd.parts]
    k = len(jd.parts)
    d = jd.d

    def others_zero(skip: Sequence[int]) -> bool:
        return all(mults[i] % beta == 0 for i in range(k) if i not in skip)

    verdict = AdmissibilityVerdict(False)
    if sizes[-1] == 2 and mults[-1] % beta == beta - 1 and d % beta == 1 and others_zero([k - 1]):
        counts = {n: q // beta for n, q in jd.parts}
        counts[2] = (mults[-1] - (beta - 1)) // beta
        sigma = _sigma_from_counts(counts, (d + beta - 1) // beta)
        witness = canonical_matrix(sigma, sigma.r + 1 if sigma.r else None, kind)
        verdict = AdmissibilityVerdict(True, Condition.COND_I, None, witness)
    elif d % beta == beta - 1 and others_zero([]):
        sigma = _sigma_from_counts({n: q // beta for n, q in jd.parts}, (d - beta + 1) // beta)
        verdict = AdmissibilityVerdict(True, Condition.COND_II, None, canonical_matrix(sigma, 0, kind))
    elif d % beta == 0:
        for t in range(1, k):
            if (
                sizes[t - 1] == sizes[t] + 1
                and mults[t - 1] % beta == beta - 1
                and mults[t] % beta == 1
                and others_zero([t - 1, t])
            ):
                counts = {n: q // beta for n, q in jd.parts}
                counts[sizes[t - 1]] = (mults[t - 1] - (beta - 1)) // beta
                counts[sizes[t]] = (mults[t] + beta - 1) // beta
                sigma = _sigma_from_counts(counts, d // beta)
                ell = sigma.m.index(sizes[t]) + 1
                # t is reported 1-based
                verdict = AdmissibilityVerdict(
                    True, Condition.COND_III, t + 1, canonical_matrix(sigma, ell, kind)
                )
                break
    if verdict.witness is not None and jordan_data_of(verdict.witness.matrix) != jd:
        raise InvalidParams("witness Jordan type differs from the input", witness=verdict.witness.label)
    logger.debug(f"admissibility of {jd.to_dict()} ({kind.value}): {verdict.condition}")
    return verdict


def sigma_tuples(n: int) -> List[SigmaTuple]:
    """Every Sigma with sum m_i p_i + s = n - 1"""
    if n < 2:
        raise InvalidParams("n must be at least 2", n=n)
    result = []
    for part in partitions(n - 1):
        blocks = dict(part)
        s = blocks.pop(1, 0)
        result.append(SigmaTuple.from_blocks(blocks, s))
    return result


def class_step(sigma: SigmaTuple, ell: Optional[int]) -> int:
    if sigma.r == 0:
        return 2
    return sigma.m[0] + 1 if ell == 1 else sigma.m[0]


@dataclass
class ClassCount:
    """Isomorphism classes of 2n- or 4n-dimensional nilpotent algebras"""
    n: int
    kind: StructureKind
    total: int
    breakdown: List[Tuple[SigmaTuple, List[Optional[int]]]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "structure": self.kind.value,
            "total": self.total,
            "breakdown": [
                {"sigma": sigma.to_dict(), "classes": ["N" if e is None else f"A_{e}" for e in ells]}
                for sigma, ells in self.breakdown
            ],
        }


def count_classes(n: int, kind: StructureKind, max_step: Optional[int] = None) -> ClassCount:
    """Count canonical classes, optionally only those of step at most max_step"""
    breakdown = []
    for sigma in sigma_tuples(n):
        if sigma.r == 0:
            ells: List[Optional[int]] = [None]
        else:
            ells = list(range(sigma.r + 2 - (1 if sigma.s == 0 else 0)))
        if max_step is not None:
            ells = [e for e in ells if class_step(sigma, e) <= max_step]
        if ells:
            breakdown.append((sigma, ells))
    total = sum(len(ells) for _, ells in breakdown)
    logger.info(f"{total} classes for n={n} ({kind.value}, max_step={max_step})")
    return ClassCount(n, kind, total, breakdown)
