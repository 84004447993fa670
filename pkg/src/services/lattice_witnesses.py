"""Lattice witnesses (t0, E) for the unimodular 12-dimensional families"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Union

import numpy as np
from scipy.linalg import block_diag as numeric_block_diag

from src.algebra.exact_linalg import (
    RatMatrix,
    block_diag,
    direct_power,
    hstack,
    identity,
    kernel_dim_sequence,
    vstack,
    zeros,
)
from src.algebra.poly_toolkit import IntPoly
from src.algebra.quaternion_core import u_insert
from src.services.dim12_classifier import FamilyLabel, assemble, representative
from src.services.lie_group_kernel import (
    BockReport,
    LatticeWitness,
    bock_verify,
    exp_matrix,
    is_nilpotent,
)
from src.services.nilpotent_classifier import assemble_A
from src.services.solvmanifold_lab import companion
from src.utils.exceptions import InvalidParams, NotNilpotent
from src.utils.logger import get_logger

logger = get_logger(__name__)

ROTATION_ORDERS = (1, 2, 3, 4, 6)

_ROTATIONS = {
    1: [[1, 0], [0, 1]],
    2: [[-1, 0], [0, -1]],
    3: [[0, -1], [1, -1]],
    4: [[0, -1], [1, 0]],
    6: [[0, -1], [1, 1]],
}

# integer blocks conjugate to e^{(2 pi / k) B2(0, 1)} on R^8
_S13_BLOCKS = {
    1: ([[1, 0], [1, 1]], 4),
    2: ([[-1, 0], [1, -1]], 4),
    3: ([[0, 0, 0, -1], [1, 0, 0, -2], [0, 1, 0, -3], [0, 0, 1, -2]], 2),
    4: ([[0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, -2], [0, 0, 1, 0]], 2),
    6: ([[0, 0, 0, -1], [1, 0, 0, 2], [0, 1, 0, -3], [0, 0, 1, 2]], 2),
}


@dataclass
class WitnessCase:
    """The ad-matrix A of a family member together with a lattice witness"""
    family: str
    params: Dict[str, object]
    A: Union[RatMatrix, np.ndarray]
    witness: LatticeWitness
    notes: List[str] = field(default_factory=list)

    def verify(self, tol: Optional[float] = None) -> BockReport:
        return bock_verify(self.A, self.witness, tol)

    def to_dict(self) -> Dict[str, object]:
        if isinstance(self.A, RatMatrix):
            A = self.A.to_json()
        else:
            A = {"rows": self.A.shape[0], "cols": self.A.shape[1], "entries": self.A.tolist()}
        return {
            "family": self.family,
            "params": self.params,
            "A": A,
            "witness": self.witness.to_dict(),
            "notes": list(self.notes),
        }


def rotation_integer(k: int) -> RatMatrix:
    """Integer matrix conjugate to the rotation by 2 pi / k"""
    if k not in _ROTATIONS:
        raise InvalidParams(f"no integer rotation of order {k}", allowed=list(ROTATION_ORDERS))
    return RatMatrix.from_rows(_ROTATIONS[k])


def _family_A(family: str, **params) -> RatMatrix:
    return assemble_A(assemble(representative(FamilyLabel(family, params))))


def witness_s9(m: int) -> WitnessCase:
    """S9^{-1}: t_m = log((m + sqrt(m^2 - 4))/2)"""
    if m < 3:
        raise InvalidParams("m must be at least 3", m=m)
    t0 = math.log((m + math.sqrt(m * m - 4)) / 2)
    block = RatMatrix.from_rows([[0, -1], [1, m]])
    E = block_diag(identity(3), direct_power(block, 4))
    return WitnessCase("s9", {"c": "-1", "m": m}, _family_A("s9", c=-1), LatticeWitness(t0, E, label=f"s9 m={m}"))


def witness_s6(k: int) -> WitnessCase:
    """S6^0: t0 = 2 pi / k"""
    R = rotation_integer(k)
    U = u_insert()
    unipotent = vstack(hstack(identity(3), zeros(3, 4)), hstack(U, identity(4)))
    E = block_diag(unipotent, R, R)
    return WitnessCase(
        "s6", {"c": "0", "k": k}, _family_A("s6", c=0), LatticeWitness(2 * math.pi / k, E, label=f"s6 k={k}")
    )


def witness_s13(k: int) -> WitnessCase:
    """S13^0: t0 = 2 pi / k"""
    rotation_integer(k)
    rows, copies = _S13_BLOCKS[k]
    E = block_diag(identity(3), direct_power(RatMatrix.from_rows(rows), copies))
    return WitnessCase(
        "s13", {"a": "0", "k": k}, _family_A("s13", a=0), LatticeWitness(2 * math.pi / k, E, label=f"s13 k={k}")
    )


def witness_s2_rotation(k: int) -> WitnessCase:
    """S2^{0,0}: both quaternionic blocks rotate by 2 pi / k"""
    E = block_diag(identity(3), direct_power(rotation_integer(k), 4))
    return WitnessCase(
        "s2", {"a": "0", "c": "0", "k": k}, _family_A("s2", a=0, c=0),
        LatticeWitness(2 * math.pi / k, E, label=f"s2 k={k}"),
    )


def witness_s1_rotation(kb: int, kd: int) -> WitnessCase:
    """S1^{0,0,d} with d = kb / kd > 1"""
    if kb <= kd:
        raise InvalidParams("d = kb/kd must exceed 1", kb=kb, kd=kd)
    Rb, Rd = rotation_integer(kb), rotation_integer(kd)
    d = Fraction(kb, kd)
    E = block_diag(identity(3), Rb, Rb, Rd, Rd)
    return WitnessCase(
        "s1", {"a": "0", "c": "0", "d": str(d), "kb": kb, "kd": kd}, _family_A("s1", a=0, c=0, d=d),
        LatticeWitness(2 * math.pi / kb, E, label=f"s1 kb={kb} kd={kd}"),
    )


def witness_s5_rotation(k: int) -> WitnessCase:
    """S5^{0,0}: the second quaternionic block rotates by 2 pi / k"""
    R = rotation_integer(k)
    E = block_diag(identity(7), R, R)
    return WitnessCase(
        "s5", {"a": "0", "c": "0", "k": k}, _family_A("s5", a=0, c=0),
        LatticeWitness(2 * math.pi / k, E, label=f"s5 k={k}"),
    )


def p_family_poly(k: int) -> IntPoly:
    """p_k = x^4 - x^3 + k x^2 - x + 1"""
    return IntPoly.from_descending([1, -1, k, -1, 1])


def _numeric_pair_block(a: float, b: float) -> np.ndarray:
    return np.array([[a, -b, 0, 0], [b, a, 0, 0], [0, 0, a, b], [0, 0, -b, a]], dtype=float)


def witness_p_family(k: int) -> WitnessCase:
    """S2 members with irrational parameters from the roots of p_k, k in {3, 4, 5}"""
    if k not in (3, 4, 5):
        raise InvalidParams("k must be 3, 4 or 5", k=k)
    p = p_family_poly(k)
    upper = sorted((r for r in np.roots([1, -1, k, -1, 1]) if r.imag > 0), key=abs, reverse=True)
    if len(upper) != 2:
        raise InvalidParams(f"{p} does not have two pairs of complex roots")
    alpha, beta = upper
    rho, theta = abs(alpha), float(np.angle(alpha))
    phi = float(np.angle(beta))
    A = numeric_block_diag(
        np.zeros((3, 3)),
        _numeric_pair_block(math.log(rho), theta),
        _numeric_pair_block(math.log(abs(beta)), phi),
    )
    C = companion(p)
    E = block_diag(identity(3), C, C)
    notes = [f"rho={rho:.12g}", f"theta={theta:.12g}", f"phi={phi:.12g}"]
    logger.debug(f"p_{k}: {', '.join(notes)}")
    return WitnessCase("s2", {"k": k, "poly": str(p)}, A, LatticeWitness(1.0, E, label=f"p_{k}"), notes)


def witness_nilpotent(A: RatMatrix, label: str = "") -> LatticeWitness:
    """t0 = L (s - 1)! makes e^{t0 A} an integer unipotent matrix"""
    if not is_nilpotent(A):
        raise NotNilpotent("witness_nilpotent needs a nilpotent matrix", label=label)
    common = math.lcm(*(v.denominator for r in A.entries for v in r)) if A.rows else 1
    step = len(kernel_dim_sequence(A))
    t0 = common * math.factorial(step - 1)
    E = exp_matrix(Fraction(t0), A)
    return LatticeWitness(float(t0), E, label=label or f"nilpotent t0={t0}")


def witness_s10() -> WitnessCase:
    A = _family_A("s10", c=0)
    return WitnessCase("s10", {"c": "0"}, A, witness_nilpotent(A, "s10^{0}"))


def witness_s16(s: int) -> WitnessCase:
    if s not in (0, 1):
        raise InvalidParams("s must be 0 or 1", s=s)
    A = _family_A("s16", s=s)
    return WitnessCase("s16", {"s": str(s)}, A, witness_nilpotent(A, f"s16^{{{s}}}"))


def catalogue() -> List[Dict[str, object]]:
    orders = "k in {1,2,3,4,6}"
    return [
        {"family": "s9", "generator": "witness_s9", "parameters": {"m": "integer >= 3"}},
        {"family": "s6", "generator": "witness_s6", "parameters": {"k": orders}},
        {"family": "s13", "generator": "witness_s13", "parameters": {"k": orders}},
        {"family": "s2", "generator": "witness_s2_rotation", "parameters": {"k": orders}},
        {"family": "s1", "generator": "witness_s1_rotation", "parameters": {"kb": orders, "kd": "kd < kb"}},
        {"family": "s5", "generator": "witness_s5_rotation", "parameters": {"k": orders}},
        {"family": "p", "generator": "witness_p_family", "parameters": {"k": "k in {3,4,5}"}},
        {"family": "s10", "generator": "witness_nilpotent", "parameters": {}},
        {"family": "s16", "generator": "witness_nilpotent", "parameters": {"s": "0 or 1"}},
    ]


def _need(name: str, value: Optional[int]) -> int:
    if value is None:
        raise InvalidParams(f"--{name} is required for this family")
    return value


def build_witness(
    family: str,
    k: Optional[int] = None,
    m: Optional[int] = None,
    kd: Optional[int] = None,
    s: Optional[int] = None,
) -> WitnessCase:
    """Dispatch on the family name used by the command line"""
    builders = {
        "s9": lambda: witness_s9(_need("m", m)),
        "s6": lambda: witness_s6(_need("k", k)),
        "s13": lambda: witness_s13(_need("k", k)),
        "s2": lambda: witness_s2_rotation(_need("k", k)),
        "s1": lambda: witness_s1_rotation(_need("k", k), _need("kd", kd)),
        "s5": lambda: witness_s5_rotation(_need("k", k)),
        "p": lambda: witness_p_family(_need("k", k)),
        "s10": witness_s10,
        "s16": lambda: witness_s16(_need("s", s)),
    }
    if family not in builders:
        raise InvalidParams(f"unknown witness family {family}", allowed=sorted(builders))
    return builders[family]()
