"""Tests for the lattice witnesses of the 12-dimensional families"""

from fractions import Fraction

import pytest

from src.algebra.exact_linalg import RatMatrix, char_poly, det, identity
from src.algebra.quaternion_core import elementary_jordan
from src.services.lattice_witnesses import (
    ROTATION_ORDERS,
    build_witness,
    catalogue,
    p_family_poly,
    rotation_integer,
    witness_nilpotent,
    witness_p_family,
    witness_s1_rotation,
    witness_s2_rotation,
    witness_s5_rotation,
    witness_s6,
    witness_s9,
    witness_s10,
    witness_s13,
    witness_s16,
)
from src.utils.exceptions import InvalidParams, NotNilpotent


@pytest.mark.parametrize("k", ROTATION_ORDERS)
def test_rotation_integers_have_order_k(k):
    R = rotation_integer(k)
    assert det(R) == 1
    assert R**k == identity(2)
    assert all(R**j != identity(2) for j in range(1, k))


def test_rotation_order_five_is_not_integral():
    with pytest.raises(InvalidParams):
        rotation_integer(5)


class TestAcceptedWitnesses:
    @pytest.mark.parametrize("m", range(3, 11))
    def test_s9(self, m):
        case = witness_s9(m)
        assert case.A.shape == (11, 11)
        assert case.verify().accepted

    @pytest.mark.parametrize("k", ROTATION_ORDERS)
    def test_s6(self, k):
        assert witness_s6(k).verify().accepted

    @pytest.mark.parametrize("k", ROTATION_ORDERS)
    def test_s13(self, k):
        case = witness_s13(k)
        assert case.witness.E.shape == (11, 11)
        assert case.verify().accepted

    @pytest.mark.parametrize("k", ROTATION_ORDERS)
    def test_s2(self, k):
        assert witness_s2_rotation(k).verify().accepted

    @pytest.mark.parametrize("k", ROTATION_ORDERS)
    def test_s5(self, k):
        assert witness_s5_rotation(k).verify().accepted

    @pytest.mark.parametrize("kb,kd", [(2, 1), (3, 1), (4, 2), (6, 4), (6, 1)])
    def test_s1(self, kb, kd):
        case = witness_s1_rotation(kb, kd)
        assert case.params["d"] == str(Fraction(kb, kd))
        assert case.verify().accepted

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_p_family(self, k):
        case = witness_p_family(k)
        assert len(case.notes) == 3
        assert case.verify().accepted

    def test_s10(self):
        case = witness_s10()
        assert case.witness.E.is_integer()
        assert case.verify().accepted

    @pytest.mark.parametrize("s", [0, 1])
    def test_s16(self, s):
        assert witness_s16(s).verify().accepted


class TestRejectedWitnesses:
    def test_wrong_time_for_s9(self):
        case = witness_s9(3)
        case.witness.t0 = 1.0
        assert not case.verify().accepted

    def test_s9_needs_m_at_least_three(self):
        with pytest.raises(InvalidParams):
            witness_s9(2)

    def test_s1_needs_ratio_above_one(self):
        with pytest.raises(InvalidParams):
            witness_s1_rotation(2, 3)

    def test_p_family_range(self):
        with pytest.raises(InvalidParams):
            witness_p_family(6)

    def test_s16_range(self):
        with pytest.raises(InvalidParams):
            witness_s16(2)


class TestNilpotentWitness:
    def test_integer_entries(self, heisenberg):
        witness = witness_nilpotent(heisenberg)
        assert witness.t0 == 1.0
        assert witness.E == RatMatrix.from_rows([[1, 0], [1, 1]])

    def test_clears_denominators(self):
        witness = witness_nilpotent(RatMatrix.from_rows([[0, 0], ["1/2", 0]]))
        assert witness.t0 == 2.0
        assert witness.E == RatMatrix.from_rows([[1, 0], [1, 1]])

    def test_three_step(self):
        witness = witness_nilpotent(elementary_jordan(3))
        assert witness.t0 == 2.0
        assert witness.E.is_integer()
        assert char_poly(witness.E).coeffs == (-1, 3, -3, 1)

    def test_rejects_non_nilpotent(self):
        with pytest.raises(NotNilpotent):
            witness_nilpotent(identity(2))


class TestDispatch:
    def test_build_witness(self):
        assert build_witness("s13", k=4).family == "s13"
        assert build_witness("s1", k=6, kd=2).params["d"] == "3"
        assert build_witness("s10").family == "s10"

    def test_missing_parameter(self):
        with pytest.raises(InvalidParams):
            build_witness("s6")

    def test_unknown_family(self):
        with pytest.raises(InvalidParams):
            build_witness("s7", k=1)

    def test_catalogue_covers_dispatch(self):
        families = [entry["family"] for entry in catalogue()]
        assert families == ["s9", "s6", "s13", "s2", "s1", "s5", "p", "s10", "s16"]


def test_p_family_poly():
    assert str(p_family_poly(4)) == "x^4 - x^3 + 4x^2 - x + 1"


def test_to_dict_of_numeric_case():
    payload = witness_p_family(3).to_dict()
    assert payload["A"]["rows"] == 11
    assert payload["witness"]["label"] == "p_3"
    assert payload["params"]["k"] == 3
