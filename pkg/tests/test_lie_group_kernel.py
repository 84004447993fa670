"""Tests for the almost abelian Lie group kernel"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from src.algebra.exact_linalg import RatMatrix, block_diag, diag, identity, inverse, random_invertible, zeros
from src.algebra.quaternion_core import quaternionic_jordan
from src.config import settings
from src.services.lie_group_kernel import (
    AlmostAbelianAlgebra,
    GroupElement,
    LatticeWitness,
    ad_conjugate_iso,
    bock_verify,
    detect_heisenberg,
    exp_group,
    exp_matrix,
    group_mul,
    lattice_necessary,
    lie_iso_build,
    log_group,
    monop_residual,
    phi_invertible_all_t,
    phi_matrix,
    phi_scalar,
    unit_constant_obstruction,
    verify_hypercomplex_structure,
)
from src.services.nilpotent_classifier import HcxAAData, StructureKind, canonical_data, sigma_tuples
from src.utils.exceptions import HeisenbergExcluded, InvalidParams, NotConjugate

ROTATION = RatMatrix.from_rows([[0, -1], [1, 0]])
HYPERBOLIC = diag([1, -1])
GOLDEN_T0 = math.log((3 + math.sqrt(5)) / 2)
CAT_MAP = RatMatrix.from_rows([[0, -1], [1, 3]])


def _random_matrix(rng: random.Random, n: int, low: int = -3, high: int = 3) -> RatMatrix:
    return RatMatrix.from_rows([[rng.randint(low, high) for _ in range(n)] for _ in range(n)])


def _numeric_phi_invertible(A: RatMatrix) -> bool:
    # clusters of size ~1e-8 around 0 come from defective zero eigenvalues
    M = A.to_numpy()
    scale = max(1.0, float(np.linalg.norm(M, 2)))
    return not any(abs(z.real) <= 1e-9 * scale and abs(z.imag) > 1e-6 for z in np.linalg.eigvals(M))


class TestPhi:
    def test_scalar(self):
        assert phi_scalar(0) == 1.0
        assert phi_scalar(1e-12) == pytest.approx(1.0)
        assert phi_scalar(1.0) == pytest.approx(math.e - 1)

    def test_exact_for_nilpotent(self, heisenberg):
        phi = phi_matrix(Fraction(2), heisenberg)
        assert phi == RatMatrix.from_rows([[1, 0], [1, 1]])

    def test_numeric_matches_diagonal_formula(self):
        phi = phi_matrix(0.5, HYPERBOLIC)
        assert phi[0, 0] == pytest.approx(math.expm1(0.5) / 0.5)
        assert phi[1, 1] == pytest.approx(math.expm1(-0.5) / -0.5)
        assert phi[0, 1] == pytest.approx(0.0)

    def test_exp_matrix_exact(self, heisenberg):
        assert exp_matrix(Fraction(3), heisenberg) == RatMatrix.from_rows([[1, 0], [3, 1]])


class TestGroup:
    def test_exp_exact(self, heisenberg):
        g = exp_group(Fraction(1, 2), [1, 0], heisenberg)
        assert g.exact
        assert g == GroupElement(Fraction(1, 2), (Fraction(1), Fraction(1, 4)))
        assert g.to_dict() == {"t": "1/2", "v": ["1", "1/4"]}

    def test_exp_numeric(self):
        g = exp_group(1.0, [1.0, 1.0], HYPERBOLIC)
        assert not g.exact
        assert g.v[0] == pytest.approx(math.e - 1)
        assert g.v[1] == pytest.approx(1 - math.exp(-1))

    def test_exp_length_mismatch(self, heisenberg):
        with pytest.raises(InvalidParams):
            exp_group(1, [1, 0, 0], heisenberg)

    def test_multiplication(self, heisenberg):
        g = GroupElement(Fraction(1), (Fraction(0), Fraction(0)))
        h = GroupElement(Fraction(0), (Fraction(1), Fraction(0)))
        assert group_mul(g, h, heisenberg) == GroupElement(Fraction(1), (Fraction(1), Fraction(1)))

    def test_log_inverts_exp_exactly(self, heisenberg):
        g = exp_group(Fraction(1, 2), [1, 0], heisenberg)
        assert log_group(g, heisenberg) == (Fraction(1, 2), (Fraction(1), Fraction(0)))

    def test_log_inverts_exp_numerically(self):
        t, v = log_group(exp_group(0.7, [1.0, 2.0], HYPERBOLIC), HYPERBOLIC)
        assert t == pytest.approx(0.7)
        assert v == pytest.approx((1.0, 2.0))

    def test_log_needs_diffeomorphic_exp(self):
        with pytest.raises(InvalidParams):
            log_group(GroupElement(1.0, (0.0, 0.0)), ROTATION)

    def test_bracket(self, heisenberg):
        algebra = AlmostAbelianAlgebra(heisenberg)
        assert algebra.dimension == 3
        e0, e1, e2 = [tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)]
        assert algebra.bracket(e0, e1) == e2
        assert algebra.bracket(e1, e0) == tuple(-x for x in e2)
        assert algebra.bracket(e1, e2) == (Fraction(0),) * 3


class TestPhiInvertibility:
    @pytest.mark.parametrize(
        "A,expected",
        [
            (ROTATION, False),
            (HYPERBOLIC, True),
            (RatMatrix.from_rows([[0, 0], [1, 0]]), True),
            (zeros(2), True),
        ],
    )
    def test_cases(self, A, expected):
        assert phi_invertible_all_t(A) is expected

    def test_rotation_inside_larger_matrix(self):
        assert not phi_invertible_all_t(block_diag(HYPERBOLIC, ROTATION.scale(3)))

    def test_agrees_with_numeric_spectrum(self):
        rng = random.Random(settings.RANDOM_SEED)
        for _ in range(500):
            n = rng.randint(1, 6)
            if n >= 2 and rng.random() < 0.3:
                a, b = rng.randint(1, 3), rng.randint(1, 3)
                blocks = [RatMatrix.from_rows([[0, -a], [b, 0]])]
                if n > 2:
                    blocks.insert(0, _random_matrix(rng, n - 2))
                P = random_invertible(n, rng, steps=n)
                A = P @ block_diag(*blocks) @ inverse(P)
            else:
                A = _random_matrix(rng, n)
            assert phi_invertible_all_t(A) is _numeric_phi_invertible(A), A.to_json()


class TestMonop:
    def test_exact_nilpotent(self, heisenberg):
        assert monop_residual(heisenberg, Fraction(1), [1, 0], Fraction(1, 3), Fraction(1, 2)) == 0

    def test_numeric(self):
        residual = monop_residual(HYPERBOLIC, 0.8, [0.3, -1.2], 0.4, -0.9)
        assert residual <= 1e-10


class TestIsomorphisms:
    def test_heisenberg_detection(self, heisenberg):
        assert detect_heisenberg(heisenberg)
        assert not detect_heisenberg(quaternionic_jordan(2))
        assert not detect_heisenberg(HYPERBOLIC)

    def test_ad_conjugate(self):
        A1 = diag([2, -2])
        found = ad_conjugate_iso(A1, HYPERBOLIC)
        assert found is not None
        c, P = found
        assert c in (2, -2)
        assert A1 == (P @ HYPERBOLIC @ inverse(P)).scale(c)

    def test_ad_conjugate_with_nontrivial_conjugator(self):
        P = RatMatrix.from_rows([[1, 1], [0, 1]])
        A2 = diag([1, 2])
        A1 = (P @ A2 @ inverse(P)).scale(Fraction(1, 2))
        c, Q = ad_conjugate_iso(A1, A2)
        assert c == Fraction(1, 2)
        assert A1 == (Q @ A2 @ inverse(Q)).scale(c)

    def test_not_conjugate(self):
        assert ad_conjugate_iso(diag([1, 2]), diag([1, 3])) is None
        assert ad_conjugate_iso(diag([1, 2]), identity(3)) is None

    def test_build(self):
        iso = lie_iso_build(diag([2, -2]), HYPERBOLIC, 2, identity(2), v0=[1, -1])
        assert iso.mu == 2
        assert iso.max_residual <= 1e-9
        image = iso(GroupElement(0.0, (1.0, 2.0)))
        assert image.t == 0.0
        assert image.v == pytest.approx((1.0, 2.0))
        assert iso.to_dict()["mu"] == "2"

    def test_build_with_negative_sign(self):
        iso = lie_iso_build(diag([2, -2]), HYPERBOLIC, 2, identity(2), sign=-1)
        assert iso.mu == -2
        assert iso.L[0, 0] == 0 and iso.L[1, 1] == 0

    def test_algebra_map(self):
        iso = lie_iso_build(diag([2, -2]), HYPERBOLIC, 2, identity(2), v0=[1, 0])
        t, v = iso.algebra_map(1.0, [0.0, 3.0])
        assert t == 2.0
        assert v == pytest.approx((1.0, 3.0))

    def test_intertwines_exponentials(self):
        rng = random.Random(settings.RANDOM_SEED)
        built = 0
        for _ in range(30):
            n = rng.randint(2, 3)
            A2 = _random_matrix(rng, n, -1, 1)
            if detect_heisenberg(A2):
                continue
            c = rng.choice([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(-1), Fraction(-3, 2)])
            P = random_invertible(n, rng, steps=n)
            A1 = (P @ A2 @ inverse(P)).scale(c)
            v0 = [Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(n)]
            iso = lie_iso_build(A1, A2, c, P, v0=v0)
            for _ in range(20):
                t = rng.uniform(-1, 1)
                v = [rng.uniform(-1, 1) for _ in range(n)]
                lhs = iso(exp_group(t, v, A1)).to_numpy()
                rhs = exp_group(*iso.algebra_map(t, v), A2).to_numpy()
                assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)
            built += 1
        assert built >= 10

    def test_rejects_non_conjugate(self):
        with pytest.raises(NotConjugate):
            lie_iso_build(diag([1, 2]), diag([1, 3]), 1, identity(2))

    def test_rejects_heisenberg(self, heisenberg):
        with pytest.raises(HeisenbergExcluded):
            lie_iso_build(heisenberg, heisenberg, 1, identity(2))

    def test_mu_must_match_c_off_nilpotent(self):
        with pytest.raises(InvalidParams):
            lie_iso_build(diag([2, -2]), HYPERBOLIC, 2, identity(2), mu=Fraction(1))


class TestLattices:
    def test_witness_validation(self):
        with pytest.raises(InvalidParams):
            LatticeWitness(1.0, diag([2, 1]))
        with pytest.raises(InvalidParams):
            LatticeWitness(0.0, CAT_MAP)

    def test_bock_accepts(self):
        report = bock_verify(HYPERBOLIC, LatticeWitness(GOLDEN_T0, CAT_MAP))
        assert report.accepted
        assert report.char_poly_deviation < 1e-10
        assert report.to_dict()["accepted"] is True

    def test_bock_rejects_wrong_time(self):
        report = bock_verify(HYPERBOLIC, LatticeWitness(1.0, CAT_MAP))
        assert not report
        assert report.char_poly_deviation > 1e-3

    def test_bock_rejects_shape_mismatch(self):
        assert not bock_verify(identity(3), LatticeWitness(GOLDEN_T0, CAT_MAP)).accepted

    def test_bock_accepts_numpy_input(self):
        assert bock_verify(np.diag([1.0, -1.0]), LatticeWitness(GOLDEN_T0, CAT_MAP)).accepted

    def test_conjugator_is_checked(self):
        bad = LatticeWitness(GOLDEN_T0, CAT_MAP, conjugator=np.eye(2))
        report = bock_verify(HYPERBOLIC, bad)
        assert report.conjugator_deviation > 1e-3
        assert not report.accepted

    def test_necessary_conditions(self):
        assert lattice_necessary(Fraction(0), HYPERBOLIC)
        assert not lattice_necessary(Fraction(1), HYPERBOLIC)
        assert not lattice_necessary(Fraction(0), identity(2))

    def test_unit_constant_obstruction(self):
        assert unit_constant_obstruction([(0, 1), (1, 1), (-1, 2)])
        assert not unit_constant_obstruction([(1, 2), (-1, 2)])


class TestStructureVerification:
    @pytest.mark.parametrize("kind", [StructureKind.HYPERCOMPLEX, StructureKind.COMPLEX])
    def test_canonical_data_is_integrable(self, kind):
        for sigma in sigma_tuples(3):
            ell = None if sigma.r == 0 else 0
            assert verify_hypercomplex_structure(canonical_data(sigma, ell, kind))

    def test_mu_and_v0_do_not_matter(self):
        v0 = (Fraction(1), Fraction(2), Fraction(0), Fraction(-1))
        assert verify_hypercomplex_structure(HcxAAData(2, Fraction(3, 2), v0, zeros(4)))

    @pytest.mark.parametrize("i,j", [(0, 1), (0, 0), (2, 3), (3, 0)])
    def test_non_commuting_b_fails(self, i, j):
        rows = [[0] * 4 for _ in range(4)]
        rows[i][j] = 1
        data = HcxAAData(2, 0, (0,) * 4, RatMatrix.from_rows(rows))
        assert not verify_hypercomplex_structure(data)
