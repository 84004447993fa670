"""Classification of 12-dimensional almost abelian Lie algebras with hypercomplex structures"""

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.algebra.exact_linalg import (
    RatMatrix,
    Scalar,
    block_diag,
    det,
    hstack,
    identity,
    kernel_dim_sequence,
    rational_str,
    to_rational,
    trace,
    vstack,
    zeros,
)
from src.services.lie_group_kernel import is_nilpotent, unit_constant_obstruction
from src.services.nilpotent_classifier import HcxAAData, assemble_A
from src.utils.exceptions import InvalidParams
from src.utils.logger import get_logger

logger = get_logger(__name__)


class BCase(Enum):
    """Normal form of B in gl(2, H)"""
    B1 = "B1"
    B2 = "B2"


class V0Status(Enum):
    """Position of v0 relative to Im(B - mu I)"""
    ZERO = "zero"
    IN_IMAGE = "in-image"
    NOT_IN_IMAGE = "not-in-image"


class LatticeTag(Enum):
    """Lattice existence verdicts"""
    YES = "Yes"
    NO = "No"
    PARTIAL_YES = "PartialYes"
    UNKNOWN = "Unknown"


FAMILY_PARAMS: Dict[str, Tuple[str, ...]] = {
    "s1": ("a", "c", "d"),
    "s2": ("a", "c"),
    "s3": ("a", "b", "c", "d"),
    "s4": ("a", "b", "c"),
    "s5": ("a", "c"),
    "s6": ("c",),
    "s7": ("a", "c", "d"),
    "s8": ("c", "d"),
    "s9": ("c",),
    "s10": ("c",),
    "s11": ("a", "c"),
    "s12": ("c",),
    "s13": ("a",),
    "s14": ("a", "b"),
    "s15": (),
    "s16": ("s",),
    "s17": ("a",),
    "s18": (),
}

MU_NONZERO_FAMILIES = frozenset({"s3", "s4", "s7", "s8", "s11", "s12", "s14", "s17", "s18"})

# d = k_b / k_d with rotation orders k_b > k_d in {1, 2, 3, 4, 6}
S1_ROTATION_RATIOS = frozenset(
    Fraction(kb, kd) for kb in (1, 2, 3, 4, 6) for kd in (1, 2, 3, 4, 6) if kb > kd
)


def pair_block(a: Scalar, b: Scalar) -> RatMatrix:
    """Real 4x4 form of right multiplication by a + ib on H"""
    return RatMatrix.from_rows([[a, -b, 0, 0], [b, a, 0, 0], [0, 0, a, b], [0, 0, -b, a]])


def b1_matrix(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> RatMatrix:
    return block_diag(pair_block(a, b), pair_block(c, d))


def b2_matrix(a: Scalar, b: Scalar) -> RatMatrix:
    lam = pair_block(a, b)
    return vstack(hstack(lam, zeros(4)), hstack(identity(4), lam))


@dataclass(frozen=True)
class Dim12Input:
    """(mu, case, a, b, c, d, v0 status) describing A on R^11"""

    mu: Fraction
    bcase: BCase
    a: Fraction
    b: Fraction
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)
    v0_status: V0Status = V0Status.ZERO

    def __post_init__(self):
        for name in ("mu", "a", "b", "c", "d"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if self.bcase is BCase.B2:
            object.__setattr__(self, "c", Fraction(0))
            object.__setattr__(self, "d", Fraction(0))
        if self.b < 0 or self.d < 0:
            raise InvalidParams("b and d must be nonnegative", b=rational_str(self.b), d=rational_str(self.d))
        if self.v0_status is V0Status.NOT_IN_IMAGE and det(self.shifted()) != 0:
            raise InvalidParams("B - mu I is invertible, every v0 lies in its image")

    def B(self) -> RatMatrix:
        if self.bcase is BCase.B1:
            return b1_matrix(self.a, self.b, self.c, self.d)
        return b2_matrix(self.a, self.b)

    def shifted(self) -> RatMatrix:
        return self.B() - identity(8).scale(self.mu)

    @property
    def v0_trivial(self) -> bool:
        """v0 = 0 or v0 in the image give the same algebra"""
        return self.v0_status is not V0Status.NOT_IN_IMAGE

    def v0_vector(self) -> Tuple[Fraction, ...]:
        v0 = [Fraction(0)] * 8
        if self.v0_trivial:
            return tuple(v0)
        # B1 with only the second quaternionic block singular
        if self.bcase is BCase.B1 and not (self.b == 0 and self.a == self.mu):
            v0[4] = Fraction(1)
        else:
            v0[0] = Fraction(1)
        return tuple(v0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "mu": rational_str(self.mu),
            "case": self.bcase.value,
            "a": rational_str(self.a),
            "b": rational_str(self.b),
            "c": rational_str(self.c),
            "d": rational_str(self.d),
            "v0": self.v0_status.value,
        }


@dataclass
class Flags:
    """Algebraic properties of a family member"""
    unimodular: bool
    completely_solvable: bool
    nilpotent_step: Optional[int]
    hkt: bool
    hyper_kahler: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            "unimodular": self.unimodular,
            "completely_solvable": self.completely_solvable,
            "nilpotent": self.nilpotent_step is not None,
            "nilpotent_step": self.nilpotent_step,
            "hkt": self.hkt,
            "hyper_kahler": self.hyper_kahler,
        }


@dataclass
class LatticeVerdict:
    """Lattice existence for the simply connected group of a family member"""
    tag: LatticeTag
    reason: Optional[str] = None
    witnesses: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {"tag": self.tag.value, "reason": self.reason, "witnesses": list(self.witnesses)}


@dataclass
class FamilyLabel:
    """A family s1..s18 with its normalized parameters"""
    family: str
    params: Dict[str, Fraction] = field(default_factory=dict)
    flags: Optional[Flags] = None
    lattice: Optional[LatticeVerdict] = None

    def __post_init__(self):
        names = FAMILY_PARAMS.get(self.family)
        if names is None:
            raise InvalidParams(f"unknown family {self.family}")
        if set(self.params) != set(names):
            raise InvalidParams(f"{self.family} takes parameters {names}", given=sorted(self.params))
        self.params = {name: to_rational(self.params[name]) for name in names}

    @property
    def name(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}^{{{','.join(rational_str(v) for v in self.params.values())}}}"

    def key(self) -> Tuple[str, Tuple[Fraction, ...]]:
        return self.family, tuple(self.params.values())

    def to_dict(self) -> Dict[str, object]:
        return {
            "family": self.family,
            "name": self.name,
            "params": {k: rational_str(v) for k, v in self.params.items()},
            "flags": None if self.flags is None else self.flags.to_dict(),
            "lattice": None if self.lattice is None else self.lattice.to_dict(),
        }


def _label(family: str, *values: Fraction) -> FamilyLabel:
    return FamilyLabel(family, dict(zip(FAMILY_PARAMS[family], values)))


def _s2_params(a: Fraction, c: Fraction) -> Tuple[Fraction, Fraction]:
    """(0 <= a <= c) or (a < 0 < c, |a| <= |c|)"""
    low, high = sorted((abs(a), abs(c)))
    if a * c >= 0:
        return low, high
    return -low, high


class Dim12Classifier:
    """Normalizes (mu, B, v0) data to one of the families s1..s18"""

    def classify(self, data: Dim12Input) -> FamilyLabel:
        if data.bcase is BCase.B1:
            label = self._classify_b1(data)
        else:
            label = self._classify_b2(data)
        logger.debug(f"{data.to_dict()} -> {label.name}")
        return label

    def _classify_b1(self, data: Dim12Input) -> FamilyLabel:
        mu, a, b, c, d = data.mu, data.a, data.b, data.c, data.d
        trivial = data.v0_trivial
        if b > d:
            a, b, c, d = c, d, a, b
        if b > 0:
            if mu == 0:
                a, c, d = a / b, c / b, d / b
                if d > 1:
                    return _label("s1", a, c, d)
                return _label("s2", *_s2_params(a, c))
            a, c, b, d = a / mu, c / mu, b / abs(mu), d / abs(mu)
            if b < d:
                return _label("s3", a, b, c, d)
            return _label("s4", min(a, c), b, max(a, c))
        if d > 0:
            if mu == 0:
                a, c = a / d, c / d
                if trivial:
                    return _label("s5", a, abs(c) if a == 0 else c)
                return _label("s6", abs(c))
            a, c, d = a / mu, c / mu, d / abs(mu)
            if trivial:
                return _label("s7", a, c, d)
            return _label("s8", c, d)
        if mu == 0:
            if trivial:
                if a == 0 and c == 0:
                    raise InvalidParams("A = 0 gives the abelian algebra, which carries no such family")
                if abs(a) >= abs(c):
                    return _label("s9", c / a)
                return _label("s9", a / c)
            if a != 0:
                a, c = c, a
            return _label("s10", Fraction(0) if c == 0 else Fraction(1))
        a, c = a / mu, c / mu
        if trivial:
            return _label("s11", min(a, c), max(a, c))
        if a != 1:
            a, c = c, a
        return _label("s12", c)

    def _classify_b2(self, data: Dim12Input) -> FamilyLabel:
        mu, a, b = data.mu, data.a, data.b
        if b > 0:
            if mu == 0:
                return _label("s13", abs(a / b))
            return _label("s14", a / mu, b / abs(mu))
        if mu == 0:
            if a != 0:
                return _label("s15")
            return _label("s16", Fraction(0) if data.v0_trivial else Fraction(1))
        a = a / mu
        if a != 1 or data.v0_trivial:
            return _label("s17", a)
        return _label("s18")

    def representative(self, label: FamilyLabel) -> Dim12Input:
        """Canonical input whose classification is the label itself"""
        p = label.params
        zero, one = Fraction(0), Fraction(1)
        missing = V0Status.NOT_IN_IMAGE
        table = {
            "s1": lambda: Dim12Input(zero, BCase.B1, p.get("a"), one, p.get("c"), p.get("d")),
            "s2": lambda: Dim12Input(zero, BCase.B1, p.get("a"), one, p.get("c"), one),
            "s3": lambda: Dim12Input(one, BCase.B1, p.get("a"), p.get("b"), p.get("c"), p.get("d")),
            "s4": lambda: Dim12Input(one, BCase.B1, p.get("a"), p.get("b"), p.get("c"), p.get("b")),
            "s5": lambda: Dim12Input(zero, BCase.B1, p.get("a"), zero, p.get("c"), one),
            "s6": lambda: Dim12Input(zero, BCase.B1, zero, zero, p.get("c"), one, missing),
            "s7": lambda: Dim12Input(one, BCase.B1, p.get("a"), zero, p.get("c"), p.get("d")),
            "s8": lambda: Dim12Input(one, BCase.B1, one, zero, p.get("c"), p.get("d"), missing),
            "s9": lambda: Dim12Input(zero, BCase.B1, one, zero, p.get("c"), zero),
            "s10": lambda: Dim12Input(zero, BCase.B1, zero, zero, p.get("c"), zero, missing),
            "s11": lambda: Dim12Input(one, BCase.B1, p.get("a"), zero, p.get("c"), zero),
            "s12": lambda: Dim12Input(one, BCase.B1, one, zero, p.get("c"), zero, missing),
            "s13": lambda: Dim12Input(zero, BCase.B2, p.get("a"), one),
            "s14": lambda: Dim12Input(one, BCase.B2, p.get("a"), p.get("b")),
            "s15": lambda: Dim12Input(zero, BCase.B2, one, zero),
            "s16": lambda: Dim12Input(
                zero, BCase.B2, zero, zero, v0_status=missing if p.get("s") else V0Status.ZERO
            ),
            "s17": lambda: Dim12Input(one, BCase.B2, p.get("a"), zero),
            "s18": lambda: Dim12Input(one, BCase.B2, one, zero, v0_status=missing),
        }
        return table[label.family]()

    def assemble(self, data: Dim12Input) -> HcxAAData:
        return HcxAAData(3, data.mu, data.v0_vector(), data.B())

    def flags(self, label: FamilyLabel) -> FamilyLabel:
        data = self.representative(label)
        A = assemble_A(self.assemble(data))
        if data.bcase is BCase.B1:
            solvable = data.b == 0 and data.d == 0
            hkt = data.a == 0 and data.c == 0 and data.v0_trivial
        else:
            solvable = data.b == 0
            hkt = False
        step = len(kernel_dim_sequence(A)) if is_nilpotent(A) else None
        flags = Flags(
            unimodular=trace(A) == 0,
            completely_solvable=solvable,
            nilpotent_step=step,
            hkt=hkt,
            hyper_kahler=hkt and data.mu == 0,
        )
        return replace(label, flags=flags)

    def lattice_verdict(self, label: FamilyLabel) -> LatticeVerdict:
        if label.flags is None:
            label = self.flags(label)
        family, p = label.family, label.params
        if not label.flags.unimodular:
            return LatticeVerdict(LatticeTag.NO, "NotUnimodular")
        if family in MU_NONZERO_FAMILIES:
            return LatticeVerdict(LatticeTag.NO, "MuNonzero")
        if label.flags.nilpotent_step is not None:
            return LatticeVerdict(LatticeTag.YES, witnesses=[f"witness_nilpotent({label.name})"])
        if family == "s6" and p["c"] == 0:
            return LatticeVerdict(LatticeTag.YES, witnesses=["witness_s6(k), k in {1,2,3,4,6}"])
        if family == "s9" and p["c"] == -1:
            return LatticeVerdict(
                LatticeTag.YES, witnesses=["witness_s9(m), t_m = log((m + sqrt(m^2 - 4))/2), m >= 3"]
            )
        if family == "s13" and p["a"] == 0:
            return LatticeVerdict(LatticeTag.YES, witnesses=["witness_s13(k), k in {1,2,3,4,6}"])
        if family == "s5":
            if p["a"] == 0:
                return LatticeVerdict(LatticeTag.YES, witnesses=["witness_s5_rotation(k), k in {1,2,3,4,6}"])
            # moduli of the minimal polynomial roots of e^{t0 A}: 1, e^{a t0}, a pair of modulus e^{c t0}
            if unit_constant_obstruction([(0, 1), (p["a"], 1), (p["c"], 2)]):
                return LatticeVerdict(LatticeTag.NO, "UnitConstantObstruction")
        if family == "s2":
            if p["a"] == 0:
                return LatticeVerdict(LatticeTag.YES, witnesses=["witness_s2_rotation(k), k in {1,2,3,4,6}"])
            return LatticeVerdict(LatticeTag.PARTIAL_YES, witnesses=["witness_p_family(k), k in {3,4,5}"])
        if family == "s1":
            if p["a"] == 0 and p["d"] in S1_ROTATION_RATIOS:
                return LatticeVerdict(
                    LatticeTag.YES, witnesses=["witness_s1_rotation(k_b, k_d), d = k_b/k_d"]
                )
            return LatticeVerdict(
                LatticeTag.PARTIAL_YES, witnesses=["witness_s1_rotation(k_b, k_d) for d = k_b/k_d"]
            )
        return LatticeVerdict(LatticeTag.UNKNOWN)

    def all_families(self) -> List[FamilyLabel]:
        """One member per family, parameters inside the stated ranges"""
        half, two = Fraction(1, 2), Fraction(2)
        return [
            _label("s1", half, -half, two),
            _label("s2", Fraction(0), Fraction(0)),
            _label("s3", half, half, -1, two),
            _label("s4", -1, Fraction(1), Fraction(1, 4)),
            _label("s5", half, -half),
            _label("s6", Fraction(0)),
            _label("s7", half, -1, two),
            _label("s8", Fraction(-7, 4), two),
            _label("s9", Fraction(-1)),
            _label("s10", Fraction(0)),
            _label("s11", Fraction(-1), half),
            _label("s12", Fraction(-7, 4)),
            _label("s13", Fraction(0)),
            _label("s14", Fraction(-3, 8), Fraction(1)),
            _label("s15"),
            _label("s16", Fraction(1)),
            _label("s17", Fraction(-3, 8)),
            _label("s18"),
        ]


classifier = Dim12Classifier()


def classify12(data: Dim12Input) -> FamilyLabel:
    """Family label with flags and lattice verdict populated"""
    label = classifier.flags(classifier.classify(data))
    label.lattice = classifier.lattice_verdict(label)
    logger.info(f"Classified as {label.name} (lattice {label.lattice.tag.value})")
    return label


def flags(label: FamilyLabel) -> FamilyLabel:
    return classifier.flags(label)


def lattice_verdict(label: FamilyLabel) -> LatticeVerdict:
    return classifier.lattice_verdict(label)


def representative(label: FamilyLabel) -> Dim12Input:
    return classifier.representative(label)


def assemble(data: Dim12Input) -> HcxAAData:
    return classifier.assemble(data)


def all_families() -> List[FamilyLabel]:
    return classifier.all_families()
