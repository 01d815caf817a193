from fractions import Fraction

import mpmath
import pytest

from kmeis.errors import DomainError
from kmeis.special import (
    PrecisionContext,
    c_infinity,
    gamma_r,
    precision,
    rank1_constant,
    rank1_sum_bound,
    xi_ratio,
    xi_ratio_threshold,
    zeta,
    zeta_with_bound,
)


def _mp(value):
    """Move a value from a private context into the global mpmath context."""
    return mpmath.mp.make_mpf(value._mpf_)


def _close(value, expected, tol):
    with mpmath.workdps(60):
        return abs(_mp(value) - expected) <= mpmath.mpf(tol)


def test_precision_context(ctx):
    assert ctx.digits == 30
    assert ctx.guaranteed_digits == 25
    assert ctx.mp.dps == 40
    assert _close(ctx.tolerance, mpmath.mpf(10) ** -25, "1e-40")
    assert ctx.mpf("1/4") == ctx.mp.mpf("0.25")
    assert ctx.mpf(Fraction(1, 4)) == ctx.mp.mpf("0.25")
    assert precision(30) is precision(30)


def test_precision_context_rejects_low_digits():
    with pytest.raises(ValueError):
        PrecisionContext(digits=5)


def test_contexts_are_independent():
    low, high = PrecisionContext(digits=10), PrecisionContext(digits=50)
    assert low.mp.dps == 20
    assert high.mp.dps == 60
    assert mpmath.mp.dps == 15


def test_gamma_r_examples(ctx):
    with mpmath.workdps(60):
        assert _close(gamma_r(1, ctx), mpmath.mpf(1), "1e-25")
        assert _close(gamma_r(2, ctx), 1 / mpmath.pi, "1e-25")
        expected = mpmath.pi ** mpmath.mpf(-5.5) * mpmath.mpf(945) / 32 * mpmath.sqrt(mpmath.pi)
        assert _close(gamma_r(11, ctx), expected, "1e-25")


@pytest.mark.parametrize("s", [1, 2, 3, Fraction(11, 2)])
def test_gamma_r_functional_equation(ctx, s):
    lhs = gamma_r(s + 2, ctx)
    rhs = gamma_r(s, ctx) * ctx.mpf(s) / (2 * ctx.mp.pi)
    assert abs(lhs - rhs) <= ctx.tolerance


def test_gamma_r_domain(ctx):
    with pytest.raises(DomainError):
        gamma_r(0, ctx)


def test_zeta_fixtures(ctx):
    with mpmath.workdps(60):
        assert _close(zeta(2, ctx), mpmath.pi ** 2 / 6, "1e-25")
        assert _close(zeta(4, ctx), mpmath.pi ** 4 / 90, "1e-25")
        assert _close(zeta(3, ctx), mpmath.zeta(3), "1e-25")
        assert _close(zeta(Fraction(3, 2), ctx), mpmath.zeta(mpmath.mpf(3) / 2), "1e-25")


def test_zeta_bound_is_reported(ctx):
    value, bound = zeta_with_bound(2, ctx)
    assert bound >= 0
    assert bound < ctx.tolerance * value


@pytest.mark.parametrize("s", [1, Fraction(1, 2), 0, -3])
def test_zeta_domain(ctx, s):
    with pytest.raises(DomainError):
        zeta(s, ctx)


def test_c_infinity_examples(ctx):
    with mpmath.workdps(60):
        assert _close(c_infinity(1, ctx), mpmath.pi, "1e-25")
        assert _close(c_infinity(2, ctx), mpmath.mpf(2), "1e-25")
    values = [c_infinity(s, ctx) for s in (1, 2, 5, 10, 50, 100, 1000)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < ctx.mp.mpf("0.1")


def test_c_infinity_domain(ctx):
    with pytest.raises(DomainError):
        c_infinity(0, ctx)


def test_rank1_constant(ctx):
    assert rank1_constant(1, ctx) == c_infinity(1, ctx)
    assert rank1_constant(10, ctx) == 2


def test_xi_ratio_closed_form(ctx):
    with mpmath.workdps(60):
        expected = mpmath.pi ** 2 / (3 * mpmath.zeta(3))
        assert _close(xi_ratio(2, ctx), expected, "1e-20")


def test_xi_ratio_values(ctx):
    assert ctx.mp.mpf("0.3") < xi_ratio(50, ctx) < ctx.mp.mpf("0.4")
    assert xi_ratio(100, ctx) < xi_ratio(50, ctx) < xi_ratio(20, ctx) < 1


@pytest.mark.slow
def test_xi_ratio_decreasing_on_integers(ctx):
    values = [xi_ratio(s, ctx) for s in range(10, 101)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert all(v < 1 for v in values[10:])


def test_xi_ratio_domain(ctx):
    with pytest.raises(DomainError):
        xi_ratio(1, ctx)


@pytest.mark.parametrize("s", [2, Fraction(5, 2), 7, 40])
def test_doubling_precision_stays_within_bound(s):
    low, high = PrecisionContext(digits=30), PrecisionContext(digits=60)
    with mpmath.workdps(80):
        diff = abs(_mp(xi_ratio(s, low)) - _mp(xi_ratio(s, high)))
        assert diff <= mpmath.mpf(10) ** -low.guaranteed_digits


@pytest.mark.slow
def test_xi_ratio_threshold(ctx):
    report = xi_ratio_threshold(ctx)
    assert 6 < report.threshold < 7
    assert abs(xi_ratio(report.threshold, ctx) - 1) < ctx.mp.mpf(10) ** -15
    assert report.holds_on_sweep
    assert report.sweep_max <= 1


def test_xi_ratio_threshold_needs_sign_change(ctx):
    with pytest.raises(DomainError):
        xi_ratio_threshold(ctx, lo=20, hi=40)


def test_rank1_closed_forms(ctx):
    with mpmath.workdps(60):
        at_zero = rank1_sum_bound(1, 1, 0, ctx)
        assert _close(at_zero.lhs, mpmath.pi * mpmath.coth(mpmath.pi), "1e-10")
        assert _close(at_zero.rhs, 2 + mpmath.pi, "1e-25")
        assert at_zero.holds
        assert at_zero.lhs <= at_zero.lhs_upper

        at_half = rank1_sum_bound(1, 1, Fraction(1, 2), ctx)
        assert _close(at_half.lhs, mpmath.pi * mpmath.tanh(mpmath.pi), "1e-10")
        assert at_half.holds


@pytest.mark.slow
@pytest.mark.parametrize("s", [Fraction(1, 10), Fraction(1, 2), 1, 2, 5])
@pytest.mark.parametrize("a", [Fraction(1, 10), 1, 10])
@pytest.mark.parametrize("x0", [0, Fraction(1, 4), Fraction(1, 2)])
def test_rank1_grid(ctx, s, a, x0):
    bound = rank1_sum_bound(s, a, x0, ctx)
    assert bound.holds
    assert bound.lhs <= bound.lhs_upper <= bound.rhs


def test_rank1_large_a_approaches_integral(ctx):
    a = 20
    bound = rank1_sum_bound(1, a, 0, ctx)
    assert abs(bound.lhs / a - ctx.mp.pi) < ctx.mp.mpf("0.05")
    assert bound.holds


def test_rank1_domain(ctx):
    with pytest.raises(DomainError):
        rank1_sum_bound(0, 1, 0, ctx)
    with pytest.raises(DomainError):
        rank1_sum_bound(1, 0, 0, ctx)
