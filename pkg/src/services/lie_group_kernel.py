"""Almost abelian Lie groups: exponential map, isomorphisms, lattice witnesses and structure checks"""

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from scipy.linalg import expm

from src.algebra.exact_linalg import (
    X,
    RatMatrix,
    char_poly,
    conjugate_test,
    det,
    identity,
    inverse,
    irreducible_factors,
    kernel_dim_sequence,
    kron,
    nullspace,
    poly_eval_matrix,
    rank,
    rational_str,
    to_rational,
    trace,
)
from src.algebra.poly_toolkit import INF, IntPoly, sturm_count
from src.algebra.quaternion_core import L_I, L_J, L_K
from src.config import settings
from src.services.nilpotent_classifier import COMPLEX_J, HcxAAData, StructureKind, assemble_A
from src.utils.exceptions import (
    HeisenbergExcluded,
    InvalidParams,
    NoAnticommutingL,
    NotConjugate,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

Real = Union[Fraction, float]


def is_nilpotent(A: RatMatrix) -> bool:
    return kernel_dim_sequence(A)[-1] == A.rows


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


@dataclass
class AlmostAbelianAlgebra:
    """R e_0 semidirect R^d with ad(e_0) = A on the ideal"""
    A: RatMatrix

    @property
    def d(self) -> int:
        return self.A.rows

    @property
    def dimension(self) -> int:
        return self.d + 1

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        """[(x0, xu), (y0, yu)] = (0, x0 A yu - y0 A xu)"""
        x0, y0 = x[0], y[0]
        result = [Fraction(0)] * (self.d + 1)
        if x0:
            for i, value in enumerate(self.A.apply(y[1:])):
                result[i + 1] += x0 * value
        if y0:
            for i, value in enumerate(self.A.apply(x[1:])):
                result[i + 1] -= y0 * value
        return tuple(result)


@dataclass(frozen=True)
class GroupElement:
    """(t, v) in R semidirect R^d"""
    t: Real
    v: Tuple[Real, ...]

    @property
    def exact(self) -> bool:
        return _is_exact(self.t) and all(_is_exact(x) for x in self.v)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(self.t)] + [float(x) for x in self.v])

    def to_dict(self) -> Dict[str, object]:
        render = (lambda x: rational_str(to_rational(x))) if self.exact else float
        return {"t": render(self.t), "v": [render(x) for x in self.v]}


@dataclass
class LatticeWitness:
    """t0 with e^{t0 A} conjugate to the integer matrix E"""
    t0: float
    E: RatMatrix
    conjugator: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if self.t0 == 0:
            raise InvalidParams("t0 must be nonzero")
        if not self.E.is_integer() or det(self.E) != 1:
            raise InvalidParams("E must lie in SL(d, Z)", label=self.label)

    def to_dict(self) -> Dict[str, object]:
        return {
            "label": self.label,
            "t0": self.t0,
            "E": self.E.to_json(),
            "conjugator": None if self.conjugator is None else self.conjugator.tolist(),
        }


# ---------------------------------------------------------------- Phi and exp


def phi_scalar(x: float) -> float:
    """(e^x - 1)/x with Phi(0) = 1"""
    if x == 0:
        return 1.0
    if abs(x) < 1e-8:
        return 1.0 + x / 2 + x * x / 6
    return math.expm1(x) / x


def _exact_series(M: RatMatrix, shift: int) -> RatMatrix:
    """sum_k M^k / (k + shift)! for nilpotent M"""
    result = identity(M.rows).scale(Fraction(1, math.factorial(shift)))
    power = identity(M.rows)
    k = 0
    while True:
        k += 1
        power = power @ M
        if power.is_zero():
            return result
        result = result + power.scale(Fraction(1, math.factorial(k + shift)))


def _augmented_phi(M: np.ndarray) -> np.ndarray:
    # exp([[M, I], [0, 0]]) has Phi(M) in its upper right block
    d = M.shape[0]
    big = np.zeros((2 * d, 2 * d))
    big[:d, :d] = M
    big[:d, d:] = np.eye(d)
    return expm(big)[:d, d:]


def phi_matrix(t: Real, A: RatMatrix) -> Union[RatMatrix, np.ndarray]:
    """Phi(tA), exact for nilpotent A and rational t"""
    if A.rows == 0:
        return identity(0) if _is_exact(t) else np.zeros((0, 0))
    if _is_exact(t) and is_nilpotent(A):
        return _exact_series(A.scale(to_rational(t)), 1)
    return _augmented_phi(float(t) * A.to_numpy())


def exp_matrix(t: Real, A: RatMatrix) -> Union[RatMatrix, np.ndarray]:
    """e^{tA}, exact for nilpotent A and rational t"""
    if _is_exact(t) and is_nilpotent(A):
        return _exact_series(A.scale(to_rational(t)), 0)
    return expm(float(t) * A.to_numpy())


def _apply(M: Union[RatMatrix, np.ndarray], v: Sequence[Real]):
    if isinstance(M, RatMatrix):
        return M.apply(v)
    return tuple(float(x) for x in M @ np.array([float(x) for x in v]))


def _exact_path(A: RatMatrix, *elements: GroupElement) -> bool:
    return all(g.exact for g in elements) and is_nilpotent(A)


def exp_group(t: Real, v: Sequence[Real], A: RatMatrix) -> GroupElement:
    """exp(t, v) = (t, Phi(tA) v)"""
    v = tuple(v)
    if len(v) != A.rows:
        raise InvalidParams("vector length differs from the ideal dimension", d=A.rows, length=len(v))
    if _is_exact(t) and all(_is_exact(x) for x in v) and is_nilpotent(A):
        return GroupElement(to_rational(t), _apply(phi_matrix(to_rational(t), A), v))
    return GroupElement(float(t), _apply(phi_matrix(float(t), A), v))


def group_mul(g: GroupElement, h: GroupElement, A: RatMatrix) -> GroupElement:
    """(t, v)(s, w) = (t + s, v + e^{tA} w)"""
    if _exact_path(A, g, h):
        moved = _apply(exp_matrix(to_rational(g.t), A), h.v)
        return GroupElement(to_rational(g.t) + to_rational(h.t), tuple(a + b for a, b in zip(g.v, moved)))
    moved = _apply(exp_matrix(float(g.t), A), h.v)
    return GroupElement(float(g.t) + float(h.t), tuple(float(a) + b for a, b in zip(g.v, moved)))


def phi_invertible_all_t(A: RatMatrix) -> bool:
    """True iff A has no nonzero purely imaginary eigenvalue"""
    p = char_poly(A).to_sympy()
    mirrored = p.compose(sympy.Poly(-X, X, domain=p.domain)) * (-1) ** A.rows
    g = sympy.gcd(p, mirrored)
    zero = sympy.Poly(X, X, domain=g.domain)
    while g.degree() > 0 and g.eval(0) == 0:
        g = g.exquo(zero)
    if g.degree() <= 0:
        return True
    ascending = list(reversed(g.all_coeffs()))
    even = [ascending[i] for i in range(0, len(ascending), 2)]
    _, integral = sympy.Poly(list(reversed(even)), X, domain=g.domain).clear_denoms(convert=True)
    count = sturm_count(IntPoly.from_sympy(integral), -INF, 0)
    logger.debug(f"{count} negative roots of the even part {integral.as_expr()}")
    return count == 0


def log_group(g: GroupElement, A: RatMatrix) -> Tuple[Real, Tuple[Real, ...]]:
    """exp^{-1}(t, w) = (t, Phi(tA)^{-1} w)"""
    if not phi_invertible_all_t(A):
        raise InvalidParams("exp is not a diffeomorphism: A has a purely imaginary eigenvalue")
    if _exact_path(A, g):
        return to_rational(g.t), inverse(phi_matrix(to_rational(g.t), A)).apply(g.v)
    phi = phi_matrix(float(g.t), A)
    solved = np.linalg.solve(phi, np.array([float(x) for x in g.v]))
    return float(g.t), tuple(float(x) for x in solved)


def monop_residual(A: RatMatrix, t0: Real, v0: Sequence[Real], t: Real, s: Real) -> Real:
    """Max deviation in exp((t+s)xi) = exp(t xi) exp(s xi) for xi = (t0, v0)"""

    def scaled(factor: Real) -> GroupElement:
        if _is_exact(factor) and _is_exact(t0):
            scale = to_rational(factor)
            return exp_group(scale * to_rational(t0), [scale * to_rational(x) for x in v0], A)
        return exp_group(float(factor) * float(t0), [float(factor) * float(x) for x in v0], A)

    total = t + s
    lhs = scaled(total)
    rhs = group_mul(scaled(t), scaled(s), A)
    diffs = [lhs.t - rhs.t] + [a - b for a, b in zip(lhs.v, rhs.v)]
    if lhs.exact and rhs.exact:
        return max((abs(to_rational(x)) for x in diffs), default=Fraction(0))
    return max((abs(float(x)) for x in diffs), default=0.0)


# ---------------------------------------------------------------- isomorphisms


def detect_heisenberg(A: RatMatrix) -> bool:
    """Jordan type j_2 + 0: the algebra is h_3 x R^{d-2}"""
    return rank(A) == 1 and (A @ A).is_zero()


def _rational_roots(value: Fraction, k: int) -> List[Fraction]:
    if value == 0:
        return [Fraction(0)]
    if value < 0 and k % 2 == 0:
        return []
    num, num_exact = sympy.integer_nthroot(abs(value.numerator), k)
    den, den_exact = sympy.integer_nthroot(value.denominator, k)
    if not (num_exact and den_exact):
        return []
    root = Fraction(int(num), int(den)) * (1 if value > 0 else -1)
    return [root, -root] if k % 2 == 0 else [root]


def _invertible_in_span(basis: List[Tuple[Fraction, ...]], d: int) -> Optional[RatMatrix]:
    """A random integer combination of the basis that is invertible"""
    if not basis:
        return None
    rng = random.Random(settings.RANDOM_SEED)
    for attempt in range(20):
        coeffs = [1] * len(basis) if attempt == 0 else [rng.randint(-3, 3) for _ in basis]
        flat = [sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(d * d)]
        candidate = RatMatrix.from_rows([flat[r * d:(r + 1) * d] for r in range(d)])
        if det(candidate) != 0:
            return candidate
    return None


def intertwiner(left: RatMatrix, right: RatMatrix, nu: Fraction = Fraction(1)) -> Optional[RatMatrix]:
    """An invertible T with left T = nu T right, if one exists"""
    d = left.rows
    eye = identity(d)
    system = kron(left, eye) - kron(eye, right.T).scale(nu)
    return _invertible_in_span(nullspace(system), d)


def ad_conjugate_iso(A1: RatMatrix, A2: RatMatrix) -> Optional[Tuple[Fraction, RatMatrix]]:
    """(c, P) with A1 = c P A2 P^{-1}, searching c among rational roots of coefficient ratios"""
    if A1.shape != A2.shape:
        return None
    nil1, nil2 = is_nilpotent(A1), is_nilpotent(A2)
    if nil1 or nil2:
        candidates = [Fraction(1)] if nil1 and nil2 else []
    else:
        p1 = list(reversed(char_poly(A1).coeffs))
        p2 = list(reversed(char_poly(A2).coeffs))
        k = next(i for i in range(1, len(p1)) if p1[i] != 0)
        candidates = [] if p2[k] == 0 else _rational_roots(p1[k] / p2[k], k)
        candidates = [
            c for c in candidates
            if c != 0 and all(p1[i] == p2[i] * c**i for i in range(1, len(p1)))
        ]
    logger.debug(f"candidate scalings {candidates}")
    for c in candidates:
        if conjugate_test(A1, A2.scale(c)):
            P = intertwiner(A1, A2, c)
            if P is not None:
                return c, P
    return None


@dataclass
class LieGroupIso:
    """F(t, v) = (mu t, L v + t Phi(mu t A2) v0) from G_1 to G_2"""
    A1: RatMatrix
    A2: RatMatrix
    mu: Fraction
    L: RatMatrix
    v0: Tuple[Fraction, ...]
    max_residual: float = 0.0

    def __call__(self, g: GroupElement) -> GroupElement:
        t = float(g.t)
        mu = float(self.mu)
        Lv = self.L.to_numpy() @ np.array([float(x) for x in g.v])
        shift = t * (_augmented_phi(mu * t * self.A2.to_numpy()) @ np.array([float(x) for x in self.v0]))
        return GroupElement(mu * t, tuple(Lv + shift))

    def algebra_map(self, t: float, v: Sequence[float]) -> Tuple[float, Tuple[float, ...]]:
        """f(t, v) = (mu t, L v + t v0)"""
        image = self.L.to_numpy() @ np.array(v, dtype=float) + t * np.array([float(x) for x in self.v0])
        return float(self.mu) * t, tuple(image)

    def to_dict(self) -> Dict[str, object]:
        return {
            "mu": rational_str(self.mu),
            "L": self.L.to_json(),
            "v0": [rational_str(x) for x in self.v0],
            "max_residual": self.max_residual,
        }


def lie_iso_build(
    A1: RatMatrix,
    A2: RatMatrix,
    c: Fraction,
    P: RatMatrix,
    sign: int = 1,
    v0: Optional[Sequence[Fraction]] = None,
    mu: Optional[Fraction] = None,
) -> LieGroupIso:
    """Group isomorphism G_1 -> G_2 integrating f(t, v) = (mu t, L v + t v0)"""
    c = to_rational(c)
    if c == 0 or det(P) == 0 or A1 != (P @ A2 @ inverse(P)).scale(c):
        raise NotConjugate("A1 is not c P A2 P^{-1}", c=rational_str(c))
    if detect_heisenberg(A1) or detect_heisenberg(A2):
        raise HeisenbergExcluded("Heisenberg-type algebras have extra isomorphisms")
    nilpotent = is_nilpotent(A1)
    if mu is None:
        if sign not in (1, -1):
            raise InvalidParams("sign must be +1 or -1", sign=sign)
        mu = sign * c
    mu = to_rational(mu)
    if mu == 0 or (not nilpotent and abs(mu) != abs(c)):
        raise InvalidParams("mu must be +-c for non-nilpotent algebras", mu=rational_str(mu))
    nu = mu / c
    # L P A2 = nu A2 L P
    T = identity(A1.rows) if nu == 1 else intertwiner(A2, A2, 1 / nu)
    if T is None:
        raise NoAnticommutingL(f"no invertible L with L P A2 = {rational_str(nu)} A2 L P")
    L = T @ inverse(P)
    vector = tuple(to_rational(x) for x in (v0 or [0] * A1.rows))
    iso = LieGroupIso(A1, A2, mu, L, vector)
    iso.max_residual = _homomorphism_residual(iso)
    if iso.max_residual > settings.HOMOMORPHISM_TOLERANCE:
        logger.error(f"Homomorphism check failed with residual {iso.max_residual}")
        raise NotConjugate("constructed map is not a homomorphism", residual=iso.max_residual)
    logger.info(f"Built isomorphism with mu={rational_str(mu)}")
    return iso


def _homomorphism_residual(iso: LieGroupIso, samples: Optional[int] = None) -> float:
    rng = np.random.default_rng(settings.RANDOM_SEED)
    d = iso.A1.rows
    worst = 0.0
    for _ in range(samples or settings.HOMOMORPHISM_SAMPLES):
        t, s = rng.uniform(-1, 1, size=2)
        g = GroupElement(float(t), tuple(rng.normal(size=d)))
        h = GroupElement(float(s), tuple(rng.normal(size=d)))
        lhs = iso(group_mul(g, h, iso.A1)).to_numpy()
        rhs = group_mul(iso(g), iso(h), iso.A2).to_numpy()
        worst = max(worst, float(np.max(np.abs(lhs - rhs), initial=0.0)))
    return worst


# ---------------------------------------------------------------- lattices


@dataclass
class BockReport:
    """Outcome of checking a lattice witness against e^{t0 A}"""
    accepted: bool
    char_poly_deviation: float
    rank_sequences: Dict[str, Dict[str, List[int]]] = field(default_factory=dict)
    conjugator_deviation: Optional[float] = None

    def __bool__(self) -> bool:
        return self.accepted

    def to_dict(self) -> Dict[str, object]:
        return {
            "accepted": self.accepted,
            "char_poly_deviation": self.char_poly_deviation,
            "rank_sequences": self.rank_sequences,
            "conjugator_deviation": self.conjugator_deviation,
        }


def _numeric_rank(M: np.ndarray, scale: float) -> int:
    if M.size == 0:
        return 0
    singular = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(singular > settings.RANK_TOLERANCE * scale))


def bock_verify(A: Union[RatMatrix, np.ndarray], witness: LatticeWitness, tol: Optional[float] = None) -> BockReport:
    """Check that e^{t0 A} has the char poly and Jordan structure of the integer matrix E"""
    tol = settings.BOCK_TOLERANCE if tol is None else tol
    A_num = A.to_numpy() if isinstance(A, RatMatrix) else np.asarray(A, dtype=float)
    if A_num.shape != witness.E.shape:
        return BockReport(False, math.inf)
    M = expm(witness.t0 * A_num)
    exact = list(reversed(char_poly(witness.E).coeffs))
    numeric = np.real(np.poly(M))
    deviation = max(
        abs(float(n) - float(e)) / max(1.0, abs(float(e))) for n, e in zip(numeric, exact)
    )
    accepted = deviation <= tol
    norm = max(1.0, float(np.linalg.norm(M, 2)))
    sequences = {}
    for f, multiplicity in irreducible_factors(char_poly(witness.E)):
        fE = poly_eval_matrix(f, witness.E)
        fM = sum(float(c) * np.linalg.matrix_power(M, i) for i, c in enumerate(f.coeffs))
        exact_ranks, numeric_ranks = [], []
        power_E, power_M = identity(witness.E.rows), np.eye(witness.E.rows)
        for j in range(1, multiplicity + 1):
            power_E, power_M = power_E @ fE, power_M @ fM
            exact_ranks.append(rank(power_E))
            numeric_ranks.append(_numeric_rank(power_M, norm ** (f.degree * j)))
            if j > 1 and exact_ranks[-1] == exact_ranks[-2]:
                break
        sequences[str(f)] = {"exact": exact_ranks, "numeric": numeric_ranks}
        accepted = accepted and exact_ranks == numeric_ranks
    conj_dev = None
    if witness.conjugator is not None:
        P = witness.conjugator
        conj_dev = float(np.max(np.abs(np.linalg.solve(P, M @ P) - witness.E.to_numpy())))
        accepted = accepted and conj_dev < tol
    if not accepted:
        logger.info(f"Witness {witness.label or witness.t0} rejected (char poly deviation {deviation:.3e})")
    return BockReport(accepted, deviation, sequences, conj_dev)


def lattice_necessary(mu: Fraction, B: RatMatrix) -> bool:
    """mu = 0 and tr B = 0 are necessary for a lattice"""
    return to_rational(mu) == 0 and trace(B) == 0


def unit_constant_obstruction(factors: Sequence[Tuple[Fraction, int]]) -> bool:
    """True when the minimal polynomial of e^{t0 A} cannot have constant term +-1 for t0 != 0.

    Each factor is (rate, degree): its roots have modulus e^{rate t0}, so |m(0)| = e^{t0 sum rate*degree}.
    """
    total = sum((to_rational(rate) * degree for rate, degree in factors), Fraction(0))
    return total != 0


# ---------------------------------------------------------------- structures


def extended_structures(data: HcxAAData) -> Tuple[RatMatrix, ...]:
    """J_alpha on the whole algebra, basis (e_0, e_1.., h)"""
    eye = identity(data.n)
    if data.kind is StructureKind.COMPLEX:
        return (kron(eye, COMPLEX_J),)
    return kron(eye, L_I), kron(eye, L_J), kron(eye, L_K)


def nijenhuis(algebra: AlmostAbelianAlgebra, J: RatMatrix, x, y) -> Tuple[Fraction, ...]:
    """N_J(X, Y) = [X,Y] + J([JX,Y] + [X,JY]) - [JX,JY]"""
    Jx, Jy = J.apply(x), J.apply(y)
    inner = [a + b for a, b in zip(algebra.bracket(Jx, y), algebra.bracket(x, Jy))]
    mixed = J.apply(inner) if any(inner) else inner
    first, last = algebra.bracket(x, y), algebra.bracket(Jx, Jy)
    return tuple(a + b - c for a, b, c in zip(first, mixed, last))


def verify_hypercomplex_structure(data: HcxAAData) -> bool:
    """Exact check of J_alpha^2 = -1, the quaternion relations and vanishing Nijenhuis tensors"""
    algebra = AlmostAbelianAlgebra(assemble_A(data, check=False))
    structures = extended_structures(data)
    size = algebra.dimension
    minus_one = identity(size).scale(-1)
    if any(J @ J != minus_one for J in structures):
        return False
    if len(structures) == 3:
        J1, J2, J3 = structures
        if J1 @ J2 != J3 or J2 @ J1 != J3.scale(-1):
            return False
    basis = [tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size)]
    for J in structures:
        for i in range(size):
            for j in range(i + 1, size):
                if any(nijenhuis(algebra, J, basis[i], basis[j])):
                    logger.debug(f"Nijenhuis tensor nonzero on (e_{i}, e_{j})")
                    return False
    return True
