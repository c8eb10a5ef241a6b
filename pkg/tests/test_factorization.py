"""Explicit factorizations of the extension symbols and the resolvent."""

from types import SimpleNamespace

import numpy as np
import pytest

from dualband import (EigenvalueEncounteredError, InnerFunction,
                      LaurentSymbol, NoAdcError, build_dualband,
                      canonical_factors, dualband_matrix, hminus_split,
                      l2_factors, l2_factors_tilde, meromorphic_factors,
                      resolvent_apply, verify_factorization)

Z = LaurentSymbol.monomial


def nilpotent_space():
    return build_dualband(InnerFunction.monomial(2), phi=Z(0), psi=Z(3))


def twist_space():
    psi = Z(2).conj() * LaurentSymbol.rational([-0.5, 0, 0, 0, 1],
                                               [1, 0, 0, 0, -0.5])
    return build_dualband(InnerFunction.monomial(2), phi=Z(0), psi=psi)


def two_sided_space():
    return build_dualband(InnerFunction.blaschke([-0.4]),
                          aplus=LaurentSymbol.from_coeffs({0: 2.5}),
                          aminus=LaurentSymbol.from_coeffs({0: 2.5}))


def decoupled_space():
    zero = LaurentSymbol.from_coeffs({0: 0.0})
    return build_dualband(InnerFunction.blaschke([0.5]),
                          aplus=zero, aminus=zero)


class TestCanonical:
    def test_generic_interior(self):
        res = canonical_factors(twist_space(), 0.3)
        assert res.kind == "canonical-generic"
        assert res.det_expected == pytest.approx(-0.3831, abs=1e-12)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-10
        assert out["reconstruction_residual"] < 1e-9
        assert out["plus_tail"] < 1e-9
        assert out["minus_tail"] < 1e-9
        assert out["det_minus_dev"] < 1e-9
        assert out["det_plus_inverse_dev"] < 1e-9

    def test_degenerate_branch(self):
        sp = two_sided_space()
        res = canonical_factors(sp, 0.2)
        assert "degenerate" in res.kind
        assert res.det_expected == pytest.approx(25.0 / 18.0, abs=1e-10)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-9
        assert out["det_minus_dev"] < 1e-9

    def test_exterior(self):
        res = canonical_factors(twist_space(), 2.0)
        assert res.extras["region"] == "outside"
        assert res.det_expected == pytest.approx(-1.0234375, abs=1e-12)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-9
        assert out["det_minus_dev"] < 1e-9

    def test_decoupled_triangular(self):
        res = canonical_factors(decoupled_space(), 0.0)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-12
        assert res.det_expected == pytest.approx(-0.25, abs=1e-12)

    def test_boundary_with_derivative(self):
        res = canonical_factors(twist_space(), 1.0)
        assert res.det_expected == pytest.approx(-1.375, abs=1e-12)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-9

    def test_eigenvalue_rejected(self):
        lam = 0.375 ** 0.25 * np.exp(1j * np.pi / 4)
        with pytest.raises(EigenvalueEncounteredError):
            canonical_factors(twist_space(), lam)
        with pytest.raises(EigenvalueEncounteredError):
            canonical_factors(nilpotent_space(), 0.0)

    def test_corruption_is_flagged(self):
        res = canonical_factors(twist_space(), 0.3)
        res.minus.values[2, 0] = res.minus.values[2, 0] + 1e-3
        out = verify_factorization(res)
        assert 1e-4 < out["identity_residual"] < 1e-2


class TestMeromorphic:
    def test_linear_shift(self):
        sp = nilpotent_space()
        R = LaurentSymbol.from_coeffs({0: -0.3, 1: 1.0})
        res = meromorphic_factors(sp, R)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-10
        assert out["det_minus_dev"] < 1e-10
        assert out["det_plus_inverse_dev"] < 1e-10

    def test_constant_one(self):
        sp = nilpotent_space()
        res = meromorphic_factors(sp, LaurentSymbol.from_coeffs({0: 1.0}))
        P = res.plus_inverse.values
        assert np.max(np.abs(P[2, 2] + 1.0)) < 1e-14
        assert np.max(np.abs(P[3, 3] + 1.0)) < 1e-14
        assert np.max(np.abs(P[2, 3])) < 1e-14
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-12

    def test_quadratic(self):
        sp = twist_space()
        R = LaurentSymbol.from_coeffs({0: 1.0, 1: -2.5, 2: 1.0})
        res = meromorphic_factors(sp, R)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-10
        assert out["minus_tail"] < 1e-9


class TestHminusSplit:
    def test_nilpotent_linear(self):
        sp = nilpotent_space()
        H, tilde, residual = hminus_split(sp, Z(1))
        assert residual < 1e-12
        d = H.det_values()
        assert np.max(np.abs(d - 1.0)) < 1e-12

    def test_decoupled_lower_left(self):
        sp = decoupled_space()
        R = LaurentSymbol.from_coeffs({0: -0.3, 1: 1.0})
        H, tilde, residual = hminus_split(sp, R)
        assert residual < 1e-10
        rv = R.sample(H.grid)
        assert np.max(np.abs(H.values[2, 0] - rv)) < 1e-14
        assert np.max(np.abs(H.values[3, 1] - rv)) < 1e-14
        assert np.max(np.abs(H.values[2, 1])) < 1e-14
        assert np.max(np.abs(H.values[3, 0])) < 1e-14

    def test_determinant_one_any_data(self):
        sp = twist_space()
        for R in (Z(1), LaurentSymbol.from_coeffs({0: 1.0, 1: -2.5, 2: 1.0})):
            H, _, residual = hminus_split(sp, R)
            assert residual < 1e-10
            assert np.max(np.abs(H.det_values() - 1.0)) < 1e-12


class TestL2:
    def test_generic_boundary_point(self):
        sp = nilpotent_space()
        res = l2_factors(sp, 1.0)
        assert res.kind == "l2-generic"
        assert res.diag_powers == (0, 0, 0, 0)
        assert res.det_expected == pytest.approx(-4.0, abs=1e-12)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-9
        assert out["plus_tail"] < 1e-8
        assert out["minus_tail"] < 1e-8

    def test_exceptional_boundary_point(self):
        sp = nilpotent_space()
        res = l2_factors(sp, 1j)
        assert res.kind == "l2-exceptional"
        assert res.diag_powers == (-1, -1, 1, 1)
        assert sum(res.diag_powers) == 0
        assert res.det_expected == pytest.approx(1.0, abs=1e-12)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-8

    def test_alias(self):
        assert l2_factors_tilde is l2_factors

    def test_interior_point(self):
        sp = nilpotent_space()
        res = l2_factors(sp, 0.4)
        out = verify_factorization(res)
        assert out["identity_residual"] < 1e-9

    def test_no_derivative_rejected(self):
        stub = SimpleNamespace(theta=InnerFunction.atomic([(1.0, 1.0)]))
        with pytest.raises(NoAdcError):
            l2_factors(stub, 1.0)

    def test_outside_rejected(self):
        with pytest.raises(ValueError):
            l2_factors(nilpotent_space(), 2.0)


class TestResolvent:
    def direct(self, sp, lam, h):
        g = LaurentSymbol.from_coeffs({0: -lam, 1: 1.0})
        T = dualband_matrix(sp, g).entries
        return np.linalg.solve(T, h)

    def test_twist_interior(self):
        sp = twist_space()
        h = np.array([1.0, 0, 0, 0], dtype=complex)
        coords, diag = resolvent_apply(sp, 0.0, h)
        want = self.direct(sp, 0.0, h)
        assert np.linalg.norm(coords - want) < 1e-6 * np.linalg.norm(want)
        assert diag["residual"] < 1e-6

    def test_nilpotent_interior(self):
        sp = nilpotent_space()
        rng = np.random.default_rng(7)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        coords, diag = resolvent_apply(sp, 0.5, h)
        want = self.direct(sp, 0.5, h)
        assert np.linalg.norm(coords - want) < 1e-6 * np.linalg.norm(want)

    def test_exterior(self):
        sp = twist_space()
        h = np.array([0.2, -0.4, 1.0, 0.3j])
        coords, diag = resolvent_apply(sp, 2.0, h)
        want = self.direct(sp, 2.0, h)
        assert diag["region"] == "outside"
        assert np.linalg.norm(coords - want) < 1e-6 * np.linalg.norm(want)

    def test_degenerate_branch(self):
        sp = two_sided_space()
        h = np.array([0.8, -0.5j])
        coords, diag = resolvent_apply(sp, 0.2, h)
        want = self.direct(sp, 0.2, h)
        assert np.linalg.norm(coords - want) < 1e-6 * np.linalg.norm(want)

    def test_neumann_leading_term(self):
        sp = twist_space()
        h = np.array([0.5, 1.0, -0.3, 0.9], dtype=complex)
        coords, _ = resolvent_apply(sp, 10.0, h)
        lead = -h / 10.0
        assert np.linalg.norm(coords - lead) <= 0.15 * np.linalg.norm(lead)

    def test_eigenvalue_rejected(self):
        with pytest.raises(EigenvalueEncounteredError):
            resolvent_apply(nilpotent_space(), 0.0, [1, 0, 0, 0])
