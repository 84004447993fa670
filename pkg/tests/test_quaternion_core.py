"""Tests for quaternionic matrices and the sigma correspondence"""

from fractions import Fraction

import pytest

from src.algebra.exact_linalg import RatMatrix, block_diag, conjugate_test, identity, zeros
from src.algebra.quaternion_core import (
    L_I,
    L_J,
    L_K,
    ONE,
    ZERO,
    Layout,
    QuatMatrix,
    Quaternion,
    SigmaTuple,
    commutes_with_triple,
    grouped_to_interleaved,
    interleaved_to_grouped,
    jordan_form,
    quat_jordan_nilpotent,
    quat_jordan_structure,
    quaternionic_jordan,
    sigma,
    sigma_inv,
    sigma_tuple_from_real,
    standard_triple,
)
from src.services.dim12_classifier import b2_matrix, pair_block
from src.utils.exceptions import BlockPatternMismatch, InvalidParams, NotNilpotent, NotQuaternionLinear

I = Quaternion(0, 1)
J = Quaternion(0, 0, 1)
K = Quaternion(0, 0, 0, 1)


@pytest.fixture
def sample() -> QuatMatrix:
    return QuatMatrix.from_rows(
        [
            [Quaternion(1, 2, 0, "1/2"), Quaternion(0, -1, 3, 0)],
            [Quaternion("1/3", 0, 0, 1), Quaternion(2, 0, -1, 1)],
        ]
    )


class TestQuaternion:
    def test_hamilton_relations(self):
        assert I * J == K
        assert J * K == I
        assert K * I == J
        assert I * I == Quaternion(-1)
        assert J * I == Quaternion(0, 0, 0, -1)

    def test_inverse(self):
        q = Quaternion(1, 2, -1, 3)
        assert q * q.inverse() == ONE
        with pytest.raises(InvalidParams):
            ZERO.inverse()

    def test_json(self):
        q = Quaternion("1/2", -1, 0, 3)
        assert q.to_json() == ["1/2", "-1", "0", "3"]
        assert Quaternion.from_json(q.to_json()) == q


def test_standard_triple_relations():
    triple = standard_triple(2)
    J1, J2, J3 = triple.operators
    minus = identity(8).scale(-1)
    assert J1 @ J1 == minus and J2 @ J2 == minus and J3 @ J3 == minus
    assert J1 @ J2 == J3
    assert triple.n == 3


def test_left_multiplication_blocks():
    assert L_I @ L_J == L_K


class TestSigma:
    def test_round_trip(self, sample):
        real = sigma_inv(sample)
        assert commutes_with_triple(real)
        assert sigma(real) == sample

    def test_homomorphism(self, sample):
        other = QuatMatrix.from_rows([[J, ONE], [ZERO, Quaternion(1, 1, 1, 1)]])
        assert sigma_inv(sample @ other) == sigma_inv(sample) @ sigma_inv(other)

    def test_grouped_layout(self, sample):
        grouped = sigma_inv(sample, Layout.GROUPED)
        assert grouped == interleaved_to_grouped(sigma_inv(sample))
        assert grouped_to_interleaved(grouped) == sigma_inv(sample)
        assert sigma(grouped, Layout.GROUPED) == sample

    def test_pair_block_is_complex_scalar(self):
        assert sigma_inv(QuatMatrix.from_rows([[Quaternion(2, 3)]])) == pair_block(2, 3)

    def test_rejects_non_commuting(self):
        with pytest.raises(BlockPatternMismatch):
            sigma(RatMatrix.from_rows([[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
        with pytest.raises(BlockPatternMismatch):
            sigma(identity(3))


class TestSigmaTuple:
    def test_from_blocks(self):
        t = SigmaTuple.from_blocks({2: 1, 3: 2}, 1)
        assert (t.r, t.m, t.p, t.s) == (2, (3, 2), (2, 1), 1)
        assert t.quaternionic_dim == 9
        assert t.n == 10
        assert str(t) == "(2, 3, 2, 2, 1, 1)"

    @pytest.mark.parametrize(
        "args", [(1, (2,), (1, 1), 0), (2, (2, 3), (1, 1), 0), (1, (1,), (1,), 0), (0, (), (), -1)]
    )
    def test_invalid(self, args):
        with pytest.raises(InvalidParams):
            SigmaTuple(*args)

    def test_from_real_nilpotent(self):
        B = block_diag(quaternionic_jordan(3), quaternionic_jordan(2), zeros(4))
        assert sigma_tuple_from_real(B) == SigmaTuple(2, (3, 2), (1, 1), 1)

    def test_from_real_rejects(self):
        with pytest.raises(NotNilpotent):
            sigma_tuple_from_real(identity(4))
        with pytest.raises(NotQuaternionLinear):
            sigma_tuple_from_real(block_diag(RatMatrix.from_rows([[0, 0], [1, 0]]), zeros(2)))


class TestJordan:
    def test_jordan_form_of_single_block(self):
        Q = QuatMatrix.jordan_block(2)
        result = quat_jordan_nilpotent(Q)
        assert result == SigmaTuple(1, (2,), (1,), 0)
        assert jordan_form(result) == Q

    def test_conjugated_block(self):
        P = QuatMatrix.from_rows([[ONE, I], [ZERO, J]])
        P_inv = QuatMatrix.from_rows([[ONE, K], [ZERO, Quaternion(0, 0, -1)]])
        assert P @ P_inv == QuatMatrix.identity(2)
        Q = P @ QuatMatrix.jordan_block(2) @ P_inv
        assert quat_jordan_nilpotent(Q) == SigmaTuple(1, (2,), (1,), 0)
        assert conjugate_test(sigma_inv(Q), sigma_inv(QuatMatrix.jordan_block(2)))

    def test_not_nilpotent(self):
        with pytest.raises(NotNilpotent):
            quat_jordan_nilpotent(QuatMatrix.identity(2))

    def test_structure_of_complex_eigenvalue(self):
        blocks = quat_jordan_structure(pair_block(0, 1))
        assert len(blocks) == 1
        assert blocks[0].blocks == {1: 1}

    def test_structure_of_jordan_pair(self):
        blocks = quat_jordan_structure(b2_matrix(0, 1))
        assert [b.blocks for b in blocks] == [{2: 1}]

    def test_structure_of_real_eigenvalues(self):
        B = block_diag(pair_block(1, 0), quaternionic_jordan(2))
        structure = {b.root: b.blocks for b in quat_jordan_structure(B)}
        assert structure == {"0": {2: 1}, "1": {1: 1}}
