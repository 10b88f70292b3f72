"""Tests for the seven relations, their oracles and their invariants."""

import numpy as np
import pytest

from varbound.bounds import (
    IncompleteBasis,
    InvalidPairing,
    OrthonormalBasis,
    eq1_product_bound,
    eq2_product_bound,
    eq3_product_bound,
    eq4_sum_bound,
    eq5_sum_bound,
    eq6_sum_bound,
    eq7_reverse_bound,
    evaluate_all,
)
from varbound.hermitian import (
    builtin_spin1,
    family_state,
    haar_random_state,
    make_observable,
    moments,
)

LX, LY, LZ, LP = builtin_spin1()
COMP = OrthonormalBasis.computational(3)
SWEEP_THETAS = [j * np.pi / 10 for j in range(11)]


class TestEq1:
    def test_theta_zero_equality(self):
        # <Lz> = 1, <Lp> = 0: rhs = 1/4 = (1/2)(1/2) = lhs
        r = eq1_product_bound(family_state(0.0), LX, LY)
        assert r.lhs == pytest.approx(0.25, abs=1e-12)
        assert r.rhs == pytest.approx(0.25, abs=1e-12)
        assert abs(r.slack) < 1e-9

    def test_theta_half_pi(self):
        r = eq1_product_bound(family_state(np.pi / 2), LX, LY)
        assert r.lhs == pytest.approx(1.0, abs=1e-12)
        assert r.rhs == pytest.approx(0.0, abs=1e-12)

    def test_equal_observables_collapse(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq1_product_bound(s, LX, LX)
            var = moments(s, LX).variance
            assert r.lhs == pytest.approx(var**2, abs=1e-10)
            assert r.rhs == pytest.approx(var**2, abs=1e-10)

    def test_rewritten_route_on_family(self):
        # rhs must equal |<Lz>/2|^2 + |<Lp>/2 - <Lx><Ly>|^2
        for theta in SWEEP_THETAS:
            s = family_state(theta)
            r = eq1_product_bound(s, LX, LY)
            mz = moments(s, LZ).mean
            mp = moments(s, LP).mean
            mx, my = moments(s, LX).mean, moments(s, LY).mean
            assert r.rhs == pytest.approx((mz / 2) ** 2 + (mp / 2 - mx * my) ** 2, abs=1e-10)


class TestEq2:
    def test_theta_zero_tight(self):
        r = eq2_product_bound(family_state(0.0), LX, LY, COMP)
        assert r.rhs == pytest.approx(0.25, abs=1e-12)
        assert abs(r.slack) < 1e-9

    def test_theta_half_pi_tight(self):
        r = eq2_product_bound(family_state(np.pi / 2), LX, LY, COMP)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)
        assert abs(r.slack) < 1e-9

    def test_equal_observables_own_eigenbasis(self):
        basis = OrthonormalBasis.from_matrix(LX.eigenvector_matrix())
        rng = np.random.default_rng(1)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq2_product_bound(s, LX, LX, basis)
            var = moments(s, LX).variance
            assert r.rhs == pytest.approx(var**2, abs=1e-10)

    def test_incomplete_basis_rejected(self):
        with pytest.raises(IncompleteBasis):
            eq2_product_bound(family_state(0.2), LX, LY, OrthonormalBasis.computational(4))


class TestEq3:
    def test_theta_zero(self):
        # fidelities (1/4, 1/4, 1/2) per observable
        r = eq3_product_bound(family_state(0.0), LX, LY)
        assert r.rhs == pytest.approx(0.25, abs=1e-12)
        assert np.allclose(r.intermediates.fid_a, [0.25, 0.25, 0.5], atol=1e-12)
        assert np.allclose(r.intermediates.fid_b, [0.25, 0.25, 0.5], atol=1e-12)

    def test_theta_half_pi(self):
        r = eq3_product_bound(family_state(np.pi / 2), LX, LY)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(r.intermediates.fid_a, [0.5, 0.5, 0.0], atol=1e-12)

    def test_equal_observables_identity_pairing(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq3_product_bound(s, LX, LX)
            var = moments(s, LX).variance
            assert r.rhs == pytest.approx(var**2, abs=1e-10)

    def test_invalid_pairing(self):
        with pytest.raises(InvalidPairing):
            eq3_product_bound(family_state(0.0), LX, LY, pairing=(0, 0, 1))

    def test_paper_pairing_satisfied_on_sweep(self):
        for theta in SWEEP_THETAS:
            r = eq3_product_bound(family_state(theta), LX, LY, pairing=(0, 1, 2))
            assert r.satisfied, theta


class TestEq4:
    def test_family_anchors(self):
        r = eq4_sum_bound(family_state(0.0), LX, LY)
        assert (r.lhs, r.rhs) == (pytest.approx(1.0, abs=1e-12), pytest.approx(0.5, abs=1e-12))
        r = eq4_sum_bound(family_state(np.pi / 2), LX, LY)
        assert (r.lhs, r.rhs) == (pytest.approx(2.0, abs=1e-12), pytest.approx(1.0, abs=1e-12))

    def test_equal_observables_equality(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq4_sum_bound(s, LX, LX)
            var = moments(s, LX).variance
            assert r.lhs == pytest.approx(2 * var, abs=1e-10)
            assert r.rhs == pytest.approx(2 * var, abs=1e-10)


class TestEq5:
    def test_theta_zero_tight(self):
        # single surviving term n=2: (sqrt(1/2) + sqrt(1/2))^2 / 2 = 1
        r = eq5_sum_bound(family_state(0.0), LX, LY, COMP)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)
        assert abs(r.slack) < 1e-9

    def test_theta_half_pi_tight(self):
        r = eq5_sum_bound(family_state(np.pi / 2), LX, LY, COMP)
        assert r.rhs == pytest.approx(2.0, abs=1e-12)
        assert abs(r.slack) < 1e-9

    def test_equal_observables_own_eigenbasis(self):
        basis = OrthonormalBasis.from_matrix(LX.eigenvector_matrix())
        rng = np.random.default_rng(4)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq5_sum_bound(s, LX, LX, basis)
            var = moments(s, LX).variance
            assert r.rhs == pytest.approx(2 * var, abs=1e-10)


class TestEq6:
    def test_family_anchors(self):
        r = eq6_sum_bound(family_state(0.0), LX, LY)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)
        r = eq6_sum_bound(family_state(np.pi / 2), LX, LY)
        assert r.rhs == pytest.approx(2.0, abs=1e-12)

    def test_equal_observables(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            s = haar_random_state(3, rng)
            r = eq6_sum_bound(s, LX, LX)
            var = moments(s, LX).variance
            assert r.rhs == pytest.approx(2 * var, abs=1e-10)

    def test_paper_pairing_satisfied_on_sweep(self):
        for theta in SWEEP_THETAS:
            assert eq6_sum_bound(family_state(theta), LX, LY).satisfied, theta


class TestEq7:
    def test_theta_zero_equality(self):
        # Cov = 0, Delta(Lx-Ly)^2 = 1, DeltaLx DeltaLy = 1/2
        r = eq7_reverse_bound(family_state(0.0), LX, LY)
        assert r.direction == "upper"
        assert r.lhs == pytest.approx(1.0, abs=1e-12)
        assert r.rhs == pytest.approx(1.0, abs=1e-12)

    def test_theta_half_pi_equality(self):
        r = eq7_reverse_bound(family_state(np.pi / 2), LX, LY)
        assert r.lhs == pytest.approx(2.0, abs=1e-12)
        assert r.rhs == pytest.approx(2.0, abs=1e-12)

    def test_degenerate_variance_undefined(self):
        r = eq7_reverse_bound(family_state(0.0), LZ, LX)
        assert not r.defined
        assert r.rhs is None
        assert "variance" in r.reason

    def test_rewritten_route_on_family(self):
        for theta in SWEEP_THETAS:
            s = family_state(theta)
            r = eq7_reverse_bound(s, LX, LY)
            if not r.defined:
                continue
            mx, my = moments(s, LX), moments(s, LY)
            mp = moments(s, LP).mean
            cov = 0.5 * mp - mx.mean * my.mean
            var_diff = mx.second_moment + my.second_moment - mp - (mx.mean - my.mean) ** 2
            expected = 2 * var_diff / (1 - cov / (mx.std * my.std)) - 2 * mx.std * my.std
            assert r.rhs == pytest.approx(expected, abs=1e-10)


class TestEvaluateAll:
    def test_theta_zero_all_tight_but_eq4(self):
        rep = evaluate_all(family_state(0.0), LX, LY)
        for rid in ("eq1", "eq2", "eq3", "eq5", "eq6", "eq7"):
            assert abs(rep.results[rid].slack) < 1e-9, rid
        assert rep.results["eq4"].satisfied

    def test_theta_half_pi_eq1_slack(self):
        rep = evaluate_all(family_state(np.pi / 2), LX, LY)
        assert all(r.satisfied for r in rep.results.values())
        assert rep.results["eq1"].slack == pytest.approx(1.0, abs=1e-12)

    def test_validity_on_random_states(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            rep = evaluate_all(haar_random_state(3, rng), LX, LY)
            for rid, r in rep.results.items():
                if r.defined:
                    assert r.satisfied, (rid, r)

    def test_scale_invariance_of_satisfaction(self):
        rng = np.random.default_rng(6)
        for c in (0.5, 2.0, 7.3):
            scaled = make_observable(c * LX.matrix, eigenvalue_order=tuple(c * v for v in (-1, 1, 0)))
            for _ in range(50):
                s = haar_random_state(3, rng)
                base = evaluate_all(s, LX, LY)
                mod = evaluate_all(s, scaled, LY)
                assert mod.var_a == pytest.approx(c**2 * base.var_a, rel=1e-9)
                assert mod.results["eq1"].rhs == pytest.approx(
                    c**2 * base.results["eq1"].rhs, rel=1e-9, abs=1e-12
                )
                for rid in base.results:
                    if base.results[rid].defined and mod.results[rid].defined:
                        assert base.results[rid].satisfied == mod.results[rid].satisfied
