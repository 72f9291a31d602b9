"""Bessel kernel tests against closed forms and an extended-precision oracle."""

import math

import mpmath as mp
import pytest

from calogero_ss.errors import (AccuracyLossError, AsymptoticRangeError,
                                DomainError)
from calogero_ss.specialfn import (REL_TARGET, _asymptotic_value,
                                   _series_value, asymptotic_threshold,
                                   bessel_asymptotic, bessel_eval, bessel_j,
                                   bessel_j_prime, gamma, switchover)

mp.mp.dps = 30


def envelope(x):
    return min(1.0, math.sqrt(2.0 / (math.pi * x))) if x > 0 else 1.0


def oracle_j(order, x):
    return float(mp.besselj(mp.mpf(repr(order)), mp.mpf(repr(x))))


# Frozen values.  J_1(2) from a 40-term ascending series at 40 digits
# (matches mpmath to all shown places); the rest are elementary closed forms.
J1_OF_2 = 0.5767248077568734


class TestBesselJ:
    def test_half_integer_closed_form_point(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x  ->  2/pi at x = pi/2
        assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_x_zero(self):
        assert bessel_j(0.0, 0.0) == 1.0
        assert bessel_j(2.0, 0.0) == 0.0

    def test_series_oracle_point(self):
        assert bessel_j(1.0, 2.0) == pytest.approx(J1_OF_2, rel=1e-12)

    @pytest.mark.parametrize("order", [0.0, 0.5, 1.0, 2.0, 3.7, 5.0, 10.0,
                                       17.9, 25.0, 50.0])
    @pytest.mark.parametrize("x", [0.05, 0.7, 2.0, 7.3, 19.0, 21.5, 50.0,
                                   123.0, 384.5, 1000.0])
    def test_accuracy_grid(self, order, x):
        # Envelope-relative 1e-10 over the documented domain; the
        # series/asymptotic gap corner raises instead of degrading.
        try:
            got = bessel_j(order, x)
        except AccuracyLossError as err:
            assert order >= 10.0 and x > switchover(order)
            assert err.achieved_error > REL_TARGET
            return
        ref = oracle_j(order, x)
        assert abs(got - ref) <= 1e-10 * max(abs(ref), envelope(x))

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.7, 4.0, 9.3, 17.0, 26.0, 50.0])
    def test_half_integer_elementary(self, x):
        j_half = math.sqrt(2 / (math.pi * x)) * math.sin(x)
        j_3half = math.sqrt(2 / (math.pi * x)) * (math.sin(x) / x - math.cos(x))
        assert abs(bessel_j(0.5, x) - j_half) < 1e-12 * max(1.0, abs(j_half))
        assert abs(bessel_j(1.5, x) - j_3half) < 1e-12 * max(1.0, abs(j_3half))

    @pytest.mark.parametrize("order", [0.5, 1.0, 1.7, 2.5, 5.0])
    @pytest.mark.parametrize("x", [0.5, 2.0, 8.0, 25.0, 60.0])
    def test_three_term_recurrence(self, order, x):
        a = bessel_j(order - 1.0, x) if order >= 1.0 else oracle_j(order - 1.0, x)
        b = bessel_j(order, x)
        c = bessel_j(order + 1.0, x)
        resid = abs(a + c - (2 * order / x) * b)
        assert resid < 1e-10 * max(abs(a), abs(b), abs(c), 1e-30)

    @pytest.mark.parametrize("order", [0.0, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0])
    def test_switchover_band_agreement(self, order):
        # Both regimes evaluated in a +-10% band around x*; must agree to 1e-9.
        xs = switchover(order)
        for x in [0.9 * xs, 0.95 * xs, xs, 1.05 * xs, 1.1 * xs]:
            s = _series_value(order, x)
            a, est = _asymptotic_value(order, x)
            assert est < 1e-12
            assert abs(s - a) < 1e-9 * max(1.0, abs(s))

    @pytest.mark.parametrize("order,x", [(0.7, 3.0), (1.3, 6.5), (2.0, 9.1),
                                         (4.2, 8.0), (0.0, 5.5)])
    def test_ode_residual(self, order, x):
        # x^2 J'' + x J' + (x^2 - nu^2) J = 0, with J'' from finite
        # differences of the (identity-based) first derivative.
        h = 5e-6
        jpp = (bessel_j_prime(order, x + h) - bessel_j_prime(order, x - h)) / (2 * h)
        j = bessel_j(order, x)
        jp = bessel_j_prime(order, x)
        resid = abs(x * x * jpp + x * jp + (x * x - order * order) * j)
        assert resid / max(1.0, abs(j)) < 1e-8

    def test_gap_raises_accuracy_loss(self):
        with pytest.raises(AccuracyLossError) as exc:
            bessel_j(50.0, 600.0)
        assert exc.value.achieved_error > REL_TARGET

    def test_negative_integer_reflection(self):
        assert bessel_j(-1.0, 2.0) == pytest.approx(-J1_OF_2, rel=1e-12)
        assert bessel_j(-2.0, 3.7) == pytest.approx(bessel_j(2.0, 3.7),
                                                    rel=1e-12)

    @pytest.mark.parametrize("x", [0.3, 1.1, 4.0, 30.0])
    def test_negative_half_order_closed_form(self, x):
        # J_(-1/2)(x) = sqrt(2/(pi x)) cos x
        expected = math.sqrt(2 / (math.pi * x)) * math.cos(x)
        assert bessel_j(-0.5, x) == pytest.approx(expected, rel=1e-11,
                                                  abs=1e-13)

    @pytest.mark.parametrize("order", [-0.5, -0.9, -1.0, -1.5])
    @pytest.mark.parametrize("x", [0.5, 2.0, 25.0, 300.0])
    def test_negative_order_vs_oracle(self, order, x):
        ref = oracle_j(order, x)
        assert abs(bessel_j(order, x) - ref) <= 1e-10 * max(abs(ref),
                                                            envelope(x))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            bessel_j(1.0, -2.0)
        with pytest.raises(DomainError):
            bessel_j(math.nan, 2.0)
        with pytest.raises(DomainError):
            bessel_j(1.0, math.inf)
        with pytest.raises(DomainError):
            bessel_j(-0.5, 0.0)


class TestBesselJPrime:
    def test_j0_prime_is_minus_j1(self):
        assert bessel_j_prime(0.0, 2.0) == pytest.approx(-J1_OF_2, rel=1e-12)

    def test_half_order_closed_form(self):
        # d/dx sqrt(2/(pi x)) sin x at pi/2 = -2/pi^2
        got = bessel_j_prime(0.5, math.pi / 2)
        assert got == pytest.approx(-2 / math.pi**2, rel=1e-12)

    def test_j1_prime_small_x_limit(self):
        assert bessel_j_prime(1.0, 1e-8) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("order,x", [(0.3, 1.2), (1.0, 7.7), (2.5, 30.0),
                                         (6.0, 14.0), (0.0, 55.5)])
    def test_vs_oracle(self, order, x):
        ref = float(mp.diff(lambda t: mp.besselj(mp.mpf(repr(order)), t),
                            mp.mpf(repr(x))))
        assert abs(bessel_j_prime(order, x) - ref) <= 1e-9 * max(abs(ref),
                                                                 envelope(x))


class TestBesselAsymptotic:
    def test_amplitude_order_independent(self):
        for order in [0.5, 1.0, 2.0, 7.0]:
            amp, _ = bessel_asymptotic(order, 1e9, max_rel_error=1e-6)
            assert amp == pytest.approx(math.sqrt(2 / (math.pi * 1e9)), rel=1e-14)

    def test_phase_convention(self):
        _, phase = bessel_asymptotic(1.5, 1e9, max_rel_error=1e-6)
        assert phase == pytest.approx(-1.5 * math.pi / 2 - math.pi / 4, rel=1e-14)

    def test_exact_for_half_order(self):
        # order 1/2 has vanishing corrections: valid at any x, matches J.
        amp, phase = bessel_asymptotic(0.5, 100.0)
        assert amp * math.cos(100.0 + phase) == pytest.approx(
            bessel_j(0.5, 100.0), rel=1e-4)

    def test_below_threshold_range_error(self):
        # Threshold for order 2 at 1e-6 is |4*4-1|/8e-6 = 1.875e6.
        assert asymptotic_threshold(2.0, 1e-6) == pytest.approx(1.875e6)
        with pytest.raises(AsymptoticRangeError):
            bessel_asymptotic(2.0, 50.0)

    def test_leading_term_deviation_measured(self):
        # Oracle-measured: at (2, 50) the leading decomposition deviates by
        # ~6.1e-2, so that point only passes at a matching loose tolerance.
        amp, phase = bessel_asymptotic(2.0, 50.0, max_rel_error=0.1)
        ref = oracle_j(2.0, 50.0)
        dev = abs(amp * math.cos(50.0 + phase) - ref) / abs(ref)
        assert 0.05 < dev < 0.08

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_asymptotic(1.0, 0.0)


class TestGamma:
    @pytest.mark.parametrize("z", [0.5, 1.0, 1.5, 2.0, 3.25, 7.5, 12.0,
                                   25.5, 41.0, 60.0])
    def test_vs_stdlib(self, z):
        assert gamma(z) == pytest.approx(math.gamma(z), rel=1e-12)

    def test_reflection_region(self):
        assert gamma(0.2) == pytest.approx(math.gamma(0.2), rel=1e-12)

    def test_pole(self):
        with pytest.raises(DomainError):
            gamma(0.0)


def test_bessel_eval_record():
    ev = bessel_eval(1.0, 2.0)
    assert ev.order == 1.0 and ev.argument == 2.0
    assert ev.value == pytest.approx(J1_OF_2, rel=1e-12)
    assert ev.derivative == pytest.approx(
        bessel_j(0.0, 2.0) - J1_OF_2 / 2.0, rel=1e-12)
