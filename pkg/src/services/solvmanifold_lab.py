"""Hypercomplex and complex solvmanifolds built from polynomials in Delta_n"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.linalg import block_diag as numeric_block_diag

from src.algebra.exact_linalg import RatMatrix, block_diag, det, direct_power, identity
from src.algebra.poly_toolkit import (
    X,
    IntPoly,
    delta_check,
    reciprocal,
    require_member,
    resultant,
    root_logs,
)
from src.services.nilpotent_classifier import StructureKind
from src.utils.exceptions import CommonRoot, DimensionMismatch, InvalidParams
from src.utils.logger import get_logger

logger = get_logger(__name__)

LatticeElement = Tuple[int, Tuple[int, ...]]


def companion(p: IntPoly) -> RatMatrix:
    """Ones on the subdiagonal, last column -p_0, ..., -p_{n-1}"""
    n = p.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -p.coeffs[i]
    return RatMatrix.from_rows(rows)


@dataclass(frozen=True)
class LatticePresentation:
    """Z semidirect Z^d with (m, p)(n, q) = (m + n, p + E^m q)"""

    generator_matrix: RatMatrix

    def __post_init__(self):
        E = self.generator_matrix
        if not E.is_square or not E.is_integer() or det(E) != 1:
            raise InvalidParams("generator matrix must lie in SL(d, Z)")

    @property
    def rank(self) -> int:
        return self.generator_matrix.rows + 1

    def _check(self, element: LatticeElement) -> Tuple[int, Tuple[int, ...]]:
        m, p = element
        if len(p) != self.generator_matrix.rows:
            raise DimensionMismatch(
                "lattice element has the wrong length", expected=self.generator_matrix.rows, got=len(p)
            )
        return int(m), tuple(int(x) for x in p)

    def _act(self, m: int, p: Sequence[int]) -> Tuple[int, ...]:
        return tuple(int(x) for x in (self.generator_matrix**m).apply(p))

    def multiply(self, g: LatticeElement, h: LatticeElement) -> LatticeElement:
        m, p = self._check(g)
        n, q = self._check(h)
        moved = self._act(m, q)
        return m + n, tuple(a + b for a, b in zip(p, moved))

    def inverse(self, g: LatticeElement) -> LatticeElement:
        m, p = self._check(g)
        return -m, tuple(-x for x in self._act(-m, p))

    def identity_element(self) -> LatticeElement:
        return 0, (0,) * self.generator_matrix.rows

    def to_dict(self) -> Dict[str, object]:
        return {
            "rank": self.rank,
            "generator_matrix": self.generator_matrix.to_json(),
            "relation": "(m,p)(n,q) = (m+n, p + E^m q)",
        }


@dataclass
class SolvmanifoldDescriptor:
    """Matrix data of the solvmanifold attached to p"""
    p: IntPoly
    kind: StructureKind
    companion: RatMatrix
    holonomy: RatMatrix
    lattice: LatticePresentation
    xp_numeric: List[float]

    @property
    def n(self) -> int:
        return self.p.degree

    @property
    def dimension(self) -> int:
        return self.kind.beta * (self.n + 1)

    def to_dict(self) -> Dict[str, object]:
        return {
            "p": self.p.to_json(),
            "poly": str(self.p),
            "n": self.n,
            "kind": self.kind.value,
            "dimension": self.dimension,
            "companion": self.companion.to_json(),
            "holonomy": self.holonomy.to_json(),
            "lattice": self.lattice.to_dict(),
            "xp_numeric": self.xp_numeric,
        }


def build(
    p: IntPoly, kind: StructureKind = StructureKind.HYPERCOMPLEX, precision: Optional[float] = None
) -> SolvmanifoldDescriptor:
    """Companion, holonomy, lattice and log-roots of p in Delta_n"""
    require_member(p)
    C = companion(p)
    beta = kind.beta
    holonomy = block_diag(identity(beta - 1), direct_power(C, beta))
    xp = root_logs(p, precision)
    if len(xp) != p.degree:
        raise InvalidParams(f"expected {p.degree} positive roots of {p}, isolated {len(xp)}")
    if abs(math.fsum(xp)) > 1e-9:
        logger.warning(f"log-roots of {p} sum to {math.fsum(xp):.3e}")
    logger.debug(f"Built {kind.value} solvmanifold of {p}, dimension {beta * (p.degree + 1)}")
    return SolvmanifoldDescriptor(p, kind, C, holonomy, LatticePresentation(holonomy), xp)


def ad_matrix(descriptor: SolvmanifoldDescriptor) -> np.ndarray:
    """A_p = 0 (+) X_p^{(+)beta} with X_p = diag(log r_i)"""
    beta = descriptor.kind.beta
    X_p = np.diag(descriptor.xp_numeric)
    return numeric_block_diag(np.zeros((beta - 1, beta - 1)), *([X_p] * beta))


def diffeo_equiv(p: IntPoly, q: IntPoly) -> bool:
    """The solvmanifolds of p and q are diffeomorphic iff q = p or q = p*"""
    require_member(p)
    require_member(q)
    if p.degree != q.degree:
        return False
    return q == p or q == reciprocal(p)


@dataclass
class TorusSplit:
    """p = (x - 1) ptilde, the solvmanifold splits off a torus"""
    ptilde: IntPoly
    torus_dimension: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "ptilde": self.ptilde.to_json(),
            "poly": str(self.ptilde),
            "torus_dimension": self.torus_dimension,
            "note": f"diffeomorphic to the solvmanifold of {self.ptilde} times T^{self.torus_dimension}",
        }


def split_torus_factor(p: IntPoly, kind: StructureKind = StructureKind.HYPERCOMPLEX) -> Optional[TorusSplit]:
    require_member(p)
    if p(1) != 0:
        return None
    quotient, remainder = sympy.div(p.to_sympy(), sympy.Poly(X - 1, X))
    ptilde = IntPoly.from_sympy(quotient)
    if not remainder.is_zero or not delta_check(ptilde).in_delta_prime:
        raise InvalidParams(f"{p} has 1 as a repeated root")
    logger.info(f"{p} = (x - 1)({ptilde})")
    return TorusSplit(ptilde, kind.beta)


@dataclass
class ProductEmbedding:
    """Solvmanifold of pq inside the product of those of p and q"""
    descriptor: SolvmanifoldDescriptor
    factors: Tuple[IntPoly, IntPoly]
    ambient_dimension: int
    codimension: int
    ad_sum: np.ndarray

    @property
    def dimension(self) -> int:
        return self.descriptor.dimension

    def to_dict(self) -> Dict[str, object]:
        return {
            "descriptor": self.descriptor.to_dict(),
            "factors": [f.to_json() for f in self.factors],
            "dimension": self.dimension,
            "ambient_dimension": self.ambient_dimension,
            "codimension": self.codimension,
            "ad_sum": self.ad_sum.tolist(),
            "group_map": "(t,x,v,w) -> ((t,x,v),(t,x,w))",
        }


def product_embedding(
    p: IntPoly, q: IntPoly, kind: StructureKind = StructureKind.HYPERCOMPLEX
) -> ProductEmbedding:
    require_member(p)
    require_member(q)
    if resultant(p, q) == 0:
        logger.error(f"{p} and {q} share a root")
        raise CommonRoot(f"{p} and {q} have a common root")
    left, right = build(p, kind), build(q, kind)
    descriptor = build(p * q, kind)
    beta = kind.beta
    ad_sum = numeric_block_diag(
        np.zeros((beta - 1, beta - 1)),
        *([np.diag(left.xp_numeric)] * beta),
        *([np.diag(right.xp_numeric)] * beta),
    )
    ambient = left.dimension + right.dimension
    return ProductEmbedding(descriptor, (p, q), ambient, ambient - descriptor.dimension, ad_sum)
