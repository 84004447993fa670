"""Integer polynomial toolkit: Sturm counts, resultants and the Delta_n family"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import sympy
from pydantic import TypeAdapter, ValidationError
from sympy import ZZ
from sympy.polys.subresultants_qq_zz import sylvester

from src.algebra.exact_linalg import RatMatrix, det
from src.config import settings
from src.utils.exceptions import (
    InvalidParams,
    NonMonic,
    NonUnitConstantTerm,
    NotDeltaMember,
    ParseError,
    SignPatternViolation,
    ZeroPolynomial,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

X = sympy.Symbol("x")
INF = math.inf

Bound = Union[int, Fraction, float]


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, ascending coefficients"""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_descending(cls, coeffs: Sequence[int]) -> "IntPoly":
        return cls(tuple(reversed(coeffs)))

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "IntPoly":
        coeffs = [sympy.Rational(c) for c in reversed(poly.all_coeffs())]
        if any(c.q != 1 for c in coeffs):
            raise InvalidParams(f"non-integer coefficients in {poly}")
        return cls(tuple(int(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def constant(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, value: Union[int, Fraction]) -> Fraction:
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coeffs)) or [0], X, domain=ZZ)

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly.from_sympy(self.to_sympy() * other.to_sympy())

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def to_json(self) -> List[int]:
        return list(self.coeffs)

    def __str__(self) -> str:
        return render_poly(self)


class DeltaCondition(Enum):
    """Defining conditions of Delta_n"""
    DEGREE = "Degree"
    NOT_MONIC = "NotMonic"
    CONSTANT_TERM = "ConstantTerm"
    ROOTS = "RootsNotRealDistinctPositive"


@dataclass
class DeltaVerdict:
    """Result of a Delta_n membership test"""
    member: bool
    failed_condition: Optional[DeltaCondition]
    in_delta_prime: bool
    degree: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "member": self.member,
            "delta_prime": self.in_delta_prime,
            "failed_condition": self.failed_condition.value if self.failed_condition else None,
            "degree": self.degree,
        }


# ---------------------------------------------------------------- parsing

_INT_LIST = TypeAdapter(List[int])


def parse_poly(text: str) -> IntPoly:
    """Parse "x^3 - 6x^2 + 7x - 1" or an ascending JSON array"""
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            return IntPoly(tuple(_INT_LIST.validate_json(stripped)))
        except ValidationError as e:
            raise ParseError(f"invalid coefficient array: {e.errors()[0]['msg']}", position=None) from e
    return _PolyParser(text).parse()


class _PolyParser:
    """Recursive-descent parser for sums of c*x^k terms"""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _integer(self) -> Optional[int]:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos]) if self.pos > start else None

    def _error(self, message: str) -> ParseError:
        return ParseError(f"{message} at position {self.pos}", position=self.pos)

    def parse(self) -> IntPoly:
        terms: Dict[int, int] = {}
        sign = 1
        if self._peek() in "+-" and self._peek():
            sign = -1 if self._peek() == "-" else 1
            self.pos += 1
        while True:
            coeff, power = self._term()
            terms[power] = terms.get(power, 0) + sign * coeff
            nxt = self._peek()
            if not nxt:
                break
            if nxt not in "+-":
                raise self._error(f"unexpected character {nxt!r}")
            sign = -1 if nxt == "-" else 1
            self.pos += 1
        degree = max(terms) if terms else 0
        return IntPoly(tuple(terms.get(k, 0) for k in range(degree + 1)))

    def _term(self) -> Tuple[int, int]:
        coeff = self._integer()
        if self._peek() == "*":
            if coeff is None:
                raise self._error("expected a coefficient before '*'")
            self.pos += 1
            if self._peek() != "x":
                raise self._error("expected 'x' after '*'")
        if self._peek() == "x":
            self.pos += 1
            power = 1
            if self._peek() == "^":
                self.pos += 1
                power = self._integer()
                if power is None:
                    raise self._error("expected an exponent after '^'")
            return (1 if coeff is None else coeff), power
        if coeff is None:
            ch = self._peek()
            raise self._error(f"unexpected character {ch!r}" if ch else "unexpected end of input")
        return coeff, 0


def render_poly(p: IntPoly) -> str:
    """Text form accepted by parse_poly"""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        body = "" if (mag == 1 and k > 0) else str(mag)
        if k >= 1:
            body += "x" if k == 1 else f"x^{k}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


# ---------------------------------------------------------------- Sturm


def _sign_at(poly: sympy.Poly, point: Bound) -> int:
    if point == INF or point == -INF:
        lead = sympy.sign(poly.LC())
        if point == -INF and poly.degree() % 2:
            lead = -lead
        return int(lead)
    value = Fraction(point)
    return int(sympy.sign(poly.eval(sympy.Rational(value.numerator, value.denominator))))


def _variations(chain: List[sympy.Poly], point: Bound) -> int:
    signs = [s for s in (_sign_at(f, point) for f in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def squarefree_part(p: IntPoly) -> IntPoly:
    poly = p.to_sympy()
    g = sympy.gcd(poly, poly.diff(X))
    return IntPoly.from_sympy(poly.exquo(g).primitive()[1])


def sturm_count(p: IntPoly, lo: Bound = -INF, hi: Bound = INF) -> int:
    """Number of distinct real roots in (lo, hi]"""
    if p.is_zero():
        raise ZeroPolynomial("Sturm count of the zero polynomial")
    if p.degree == 0:
        return 0
    chain = squarefree_part(p).to_sympy().sturm()
    count = _variations(chain, lo) - _variations(chain, hi)
    logger.debug(f"sturm count of {p} on ({lo}, {hi}] = {count}")
    return count


def isolate_roots(p: IntPoly, precision: Optional[float] = None) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint rational intervals of width <= precision around each real root, ascending"""
    precision = settings.PRECISION if precision is None else precision
    eps = Fraction(precision)
    intervals = squarefree_part(p).to_sympy().intervals(eps=sympy.Rational(eps.numerator, eps.denominator))
    result = [(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))) for (a, b), _ in intervals]
    return sorted(result)


def root_logs(p: IntPoly, precision: Optional[float] = None) -> List[float]:
    """log r_i of the positive real roots, ascending"""
    roots = [(a + b) / 2 for a, b in isolate_roots(p, precision)]
    return [math.log(r) for r in roots if r > 0]


# ---------------------------------------------------------------- Delta_n


def delta_check(p: IntPoly) -> DeltaVerdict:
    """Membership in Delta_n and Delta_n'"""
    n = p.degree
    failed = None
    if n < 2:
        failed = DeltaCondition.DEGREE
    elif not p.is_monic():
        failed = DeltaCondition.NOT_MONIC
    elif p.constant != (-1) ** n:
        failed = DeltaCondition.CONSTANT_TERM
    elif squarefree_part(p).degree != n or sturm_count(p, 0, INF) != n:
        failed = DeltaCondition.ROOTS
    member = failed is None
    return DeltaVerdict(
        member=member,
        failed_condition=failed,
        in_delta_prime=member and p(1) != 0,
        degree=n,
    )


def require_member(p: IntPoly) -> DeltaVerdict:
    verdict = delta_check(p)
    if not verdict.member:
        raise NotDeltaMember(
            f"{p} is not in Delta_{p.degree}",
            failed_condition=verdict.failed_condition.value if verdict.failed_condition else None,
        )
    return verdict


def h_poly(m: int) -> IntPoly:
    """h_m = x^2 - m x + 1"""
    return IntPoly((1, -m, 1))


def f_poly(m: int, n: int) -> IntPoly:
    """f_{m,n} = x^3 - m x^2 + n x - 1"""
    return IntPoly((-1, n, -m, 1))


def cubic_discriminant(m: int, n: int) -> int:
    """Discriminant of f_{m,n}"""
    return m * m * n * n - 4 * m**3 - 4 * n**3 + 18 * m * n - 27


def resultant(p: IntPoly, q: IntPoly) -> int:
    """det of the Sylvester matrix"""
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("resultant with the zero polynomial")
    if p.degree == 0:
        return p.leading ** q.degree
    if q.degree == 0:
        return q.leading ** p.degree
    syl = sylvester(p.to_sympy().as_expr(), q.to_sympy().as_expr(), X, 1)
    value = det(RatMatrix.from_rows(syl.tolist()))
    return int(value)


def discriminant(p: IntPoly) -> int:
    """(-1)^{n(n-1)/2} Res(p, p') / lc(p)"""
    n = p.degree
    value = Fraction(resultant(p, p.derivative()), p.leading)
    return int(value) * (-1) ** (n * (n - 1) // 2)


def delta_product(p: IntPoly, q: IntPoly) -> Optional[IntPoly]:
    """pq when p, q in Delta have no common root"""
    require_member(p)
    require_member(q)
    if resultant(p, q) == 0:
        logger.info(f"{p} and {q} share a root")
        return None
    product = p * q
    if not delta_check(product).member:
        raise NotDeltaMember(f"product {product} left Delta")
    return product


def reciprocal(p: IntPoly) -> IntPoly:
    """p*(x) = (-1)^n x^n p(1/x)"""
    if abs(p.constant) != 1:
        raise NonUnitConstantTerm(f"p(0) = {p.constant} is not a unit", constant=p.constant)
    sign = (-1) ** p.degree
    return IntPoly(tuple(sign * c for c in reversed(p.coeffs)))


def _power_sums(elementary: List[Fraction], count: int) -> List[Fraction]:
    n = len(elementary) - 1
    sums = [Fraction(n)]
    for j in range(1, count + 1):
        total = Fraction(0)
        for i in range(1, min(j - 1, n) + 1):
            total += (-1) ** (i - 1) * elementary[i] * sums[j - i]
        if j <= n:
            total += (-1) ** (j - 1) * j * elementary[j]
        sums.append(total)
    return sums


def _elementary_from_sums(sums: List[Fraction], n: int) -> List[Fraction]:
    elementary = [Fraction(1)]
    for j in range(1, n + 1):
        total = sum(((-1) ** (i - 1) * elementary[j - i] * sums[i] for i in range(1, j + 1)), Fraction(0))
        elementary.append(total / j)
    return elementary


def power_poly(p: IntPoly, k: int) -> IntPoly:
    """Monic polynomial whose roots are the k-th powers of the roots of p"""
    if not p.is_monic():
        raise NonMonic(f"{p} is not monic")
    if k == 0:
        raise InvalidParams("k must be nonzero")
    if k < 0:
        return power_poly(reciprocal(p), -k)
    n = p.degree
    # p = x^n - e1 x^{n-1} + e2 x^{n-2} - ...
    elementary = [Fraction((-1) ** j * p.coeffs[n - j]) for j in range(n + 1)]
    sums = _power_sums(elementary, n * k)
    new_elementary = _elementary_from_sums([sums[0]] + [sums[j * k] for j in range(1, n + 1)], n)
    coeffs = [(-1) ** j * new_elementary[j] for j in range(n + 1)]
    if any(c.denominator != 1 for c in coeffs):
        raise InvalidParams("Newton identities produced a non-integer coefficient")
    return IntPoly.from_descending([int(c) for c in coeffs])


def _alternating_magnitudes(p: IntPoly) -> List[int]:
    """m_0..m_n for x^n - m_{n-1} x^{n-1} + ... + (-1)^n m_0"""
    if not p.is_monic():
        raise NonMonic(f"{p} is not monic")
    n = p.degree
    magnitudes = []
    for i, c in enumerate(p.coeffs):
        expected = (-1) ** (n - i)
        if c != 0 and (c > 0) != (expected > 0):
            raise SignPatternViolation(f"coefficient of x^{i} has the wrong sign", coefficient=c)
        magnitudes.append(abs(c))
    if magnitudes[0] != 1:
        raise SignPatternViolation("constant term must be (-1)^n", constant=p.constant)
    return magnitudes


def binom_necessary(p: IntPoly) -> bool:
    """m_j > C(n, j) for j = 1..n-1; False certifies p is not in Delta_n"""
    magnitudes = _alternating_magnitudes(p)
    n = p.degree
    return all(magnitudes[j] > math.comb(n, j) for j in range(1, n))


def kurtz_sufficient(p: IntPoly) -> bool:
    """m_j^2 - 4 m_{j-1} m_{j+1} > 0 for j = 1..n-1; True certifies membership"""
    magnitudes = _alternating_magnitudes(p)
    n = p.degree
    if any(magnitudes[j] <= 0 for j in range(n + 1)):
        raise SignPatternViolation("all coefficients must be nonzero", coeffs=p.coeffs)
    return all(
        magnitudes[j] ** 2 - 4 * magnitudes[j - 1] * magnitudes[j + 1] > 0 for j in range(1, n)
    )


def quartic(m: int, n: int, r: int) -> IntPoly:
    """x^4 - m x^3 + n x^2 - r x + 1"""
    return IntPoly((1, -r, n, -m, 1))


def quintic(m: int, n: int, r: int, s: int) -> IntPoly:
    """x^5 - m x^4 + n x^3 - r x^2 + s x - 1"""
    return IntPoly((-1, s, -r, n, -m, 1))


def quartic_window(m: int, n: int, r: int) -> bool:
    """2 sqrt(mr) < n < min(m^2, r^2) / 4"""
    return 4 * m * r < n * n and 4 * n < min(m * m, r * r)


def quintic_window(m: int, n: int, r: int, s: int) -> bool:
    return 4 * n < m * m and 4 * r < s * s and 4 * m * r < n * n and 4 * s * n < r * r


def odd_multiplicity_part(p: IntPoly) -> IntPoly:
    """Product of the squarefree factors occurring to odd multiplicity"""
    if not p.is_monic():
        raise NonMonic(f"{p} is not monic")
    if abs(p.constant) != 1:
        raise NonUnitConstantTerm(f"|p(0)| = {abs(p.constant)} is not 1", constant=p.constant)
    _, factors = p.to_sympy().sqf_list()
    result = sympy.Poly(1, X, domain=ZZ)
    for factor, multiplicity in factors:
        if multiplicity % 2:
            result = result * factor
    odd = IntPoly.from_sympy(result)
    return odd if odd.leading > 0 else IntPoly(tuple(-c for c in odd.coeffs))


def unit_root_check(odd_part: IntPoly) -> bool:
    """A lone odd root is +-1; a lone odd complex pair lies on the unit circle"""
    if odd_part.degree == 1:
        return odd_part.constant in (1, -1)
    if odd_part.degree == 2 and discriminant(odd_part) < 0:
        return odd_part.constant == 1
    return True


def build_delta_prime(n: int) -> IntPoly:
    """An explicit element of Delta_n'"""
    if n < 2:
        raise InvalidParams("n must be at least 2")
    if n % 2 == 0:
        factors = [h_poly(3 + j) for j in range(n // 2)]
    else:
        factors = [f_poly(6, 7)] + [h_poly(4 + j) for j in range((n - 3) // 2)]
    result = factors[0]
    for f in factors[1:]:
        result = result * f
    verdict = delta_check(result)
    if not verdict.in_delta_prime:
        raise NotDeltaMember(f"construction left Delta_{n}'", poly=str(result))
    logger.debug(f"Delta_{n}' element {result}")
    return result


def alternating_candidates(n: int, bound: int) -> Iterator[IntPoly]:
    """Monic alternating polynomials with constant (-1)^n passing the binomial bound"""
    ranges = [range(math.comb(n, j) + 1, bound + 1) for j in range(1, n)]
    for mags in itertools.product(*ranges):
        coeffs = [(-1) ** n] + [(-1) ** (n - j) * mags[j - 1] for j in range(1, n)] + [1]
        yield IntPoly(tuple(coeffs))


def enumerate_delta(n: int, bound: Optional[int] = None, jobs: int = 1) -> List[IntPoly]:
    """All members of Delta_n with coefficient magnitudes at most bound"""
    bound = settings.ENUMERATION_BOUND if bound is None else bound
    if jobs > 1:
        candidates = list(alternating_candidates(n, bound))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = pool.map(delta_check, candidates, chunksize=64)
            members = [p for p, v in zip(candidates, verdicts) if v.member]
    else:
        members = [p for p in alternating_candidates(n, bound) if delta_check(p).member]
    logger.info(f"found {len(members)} members of Delta_{n} with bound {bound}")
    return members
