import math

import pytest
from hypothesis import given, settings, strategies as st

from aesq import primes as pt
from aesq.decomposition import (
    DecompParams,
    buchstab_identity_check,
    decomp_value,
    gamma_eval,
    lambda_eval,
    verify_interval,
)
from aesq.errors import DomainError

SYNTH = DecompParams(z=3, U=10, V=30, sqrt_x1=50)


class TestParams:
    def test_ordering_enforced(self):
        with pytest.raises(DomainError):
            DecompParams(z=10, U=3, V=30, sqrt_x1=50)

    def test_from_exponents(self):
        p = DecompParams.from_exponents(0.9, 1e5)
        assert 2 < p.z < p.U < p.V < p.sqrt_x1**2
        # V = U * z up to float rounding
        assert p.V == pytest.approx(p.U * p.z, rel=1e-9)

    def test_interval_convention(self):
        p = DecompParams.from_exponents(0.9, 1e5)
        lo, hi = p.interval()
        half = 1e5**0.9
        assert lo == math.floor(1e5 - half)
        assert hi == math.floor(1e5 + half)

    def test_interval_needs_scale(self):
        with pytest.raises(DomainError):
            SYNTH.interval()

    def test_starred_identity_condition(self):
        # U/z <= sqrt(V) exactly at theta = 8/9, holds above
        assert DecompParams.from_exponents(8 / 9, 1e5).check_e_applicable()
        assert DecompParams.from_exponents(0.95, 1e5).check_e_applicable()


class TestBuchstabIdentity:
    @given(st.integers(min_value=2, max_value=10**5))
    @settings(max_examples=200, deadline=None)
    def test_pointwise(self, m):
        lhs, rhs = buchstab_identity_check(m, 30, 3)
        assert lhs == rhs

    def test_prime_case(self):
        lhs, rhs = buchstab_identity_check(97, 50, 2)
        assert lhs == rhs == 1


class TestPieces:
    def test_varpi_is_rough_indicator(self):
        for m in (51, 53, 97, 2809, 121, 2500, 2021):
            v = decomp_value(m, SYNTH)
            assert v.varpi == pt.psi(m, SYNTH.sqrt_x1)

    def test_prime_only_hits_gamma1(self):
        # a prime above all cutoffs survives every sieve piece except the
        # all-small term
        v = decomp_value(4999, SYNTH)
        assert v.gamma[0] == 1
        assert v.varpi == 1
        assert sum(v.gamma[1:]) == 0

    def test_single_prime_factor_classification(self):
        # m = 7 * 1009: the factor 7 lies in [z, U), the cofactor is rough
        m = 7 * 1009
        assert gamma_eval(2, m, SYNTH) == 1
        assert gamma_eval(3, m, SYNTH) == 0
        assert gamma_eval(4, m, SYNTH) == 0

    def test_lambda_definitions_match(self):
        for m in range(51, 400):
            v = decomp_value(m, SYNTH)
            assert lambda_eval(1, m, SYNTH) == v.lambda1
            assert lambda_eval(2, m, SYNTH) == v.lambda2
            assert lambda_eval(3, m, SYNTH) == v.lambda3

    def test_gamma_index_validation(self):
        with pytest.raises(DomainError):
            gamma_eval(12, 100, SYNTH)
        with pytest.raises(DomainError):
            gamma_eval(4, 100, SYNTH, star=True)


class TestIdentities:
    @given(st.integers(min_value=51, max_value=5000))
    @settings(max_examples=300, deadline=None)
    def test_telescoping_and_sandwich(self, m):
        v = decomp_value(m, SYNTH)
        g = v.gamma
        assert v.varpi == v.lambda1 - v.lambda2 + g[7]
        assert v.lambda1 - v.lambda2 <= v.varpi <= v.lambda3
        assert v.lambda2 >= 0

    def test_starred_expansion(self):
        for m in range(51, 2000):
            v = decomp_value(m, SYNTH)
            g, gs = v.gamma, v.gamma_star
            assert v.varpi == g[0] - g[2] - g[3] - gs[0] - gs[1] + gs[2] - gs[3]


class TestVerifyInterval:
    def test_synthetic_window_clean(self):
        rep = verify_interval(SYNTH, 50, 2000)
        assert rep.ok
        assert rep.checked == 1950
        assert set(rep.checks_run) == {"a", "b", "c", "d"}

    def test_thread_determinism(self):
        one = verify_interval(SYNTH, 50, 3000, threads=1)
        two = verify_interval(SYNTH, 50, 3000, threads=2)
        assert one.checked == two.checked
        assert one.failures == two.failures

    def test_forced_e_on_synthetic_params_reports_violations(self):
        # U/z = 10/3 < sqrt(30): the starred identity is forced here too
        assert SYNTH.check_e_applicable()
        rep = verify_interval(SYNTH, 50, 2000, run_e=True)
        assert rep.check_e_run
        assert rep.ok

    def test_scale_derived_small(self):
        p = DecompParams.from_exponents(0.9, 2e4)
        lo, hi = p.interval()
        rep = verify_interval(p, lo, lo + 2000)
        assert rep.ok

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            verify_interval(SYNTH, 100, 50)
