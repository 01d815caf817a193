from fractions import Fraction

import mpmath
import pytest

from kmeis.errors import InvalidArgument, NotDominant, NotGodement, NotInTitsCone, OutOfRange, PrecisionExhausted
from kmeis.eisenstein import (
    EisensteinEvaluator,
    SpectralParameter,
    c_lambda_w,
    constant_term,
    dominating_series,
    godement_majorant,
    looijenga_count,
    rank1_sum_bound,
)
from kmeis.lattice import WeightVector
from kmeis.special import PrecisionContext, xi_ratio
from kmeis.weyl import WeylGroup

LAMBDA = (2, 2)
POINT = (1, 1)


def _mp(value):
    return mpmath.mp.make_mpf(value._mpf_)


def test_spectral_parameter():
    assert SpectralParameter((2, Fraction(3, 2))).godement
    assert not SpectralParameter((1, 2)).godement
    assert SpectralParameter((1, 2)).in_open_chamber
    assert not SpectralParameter((0, 2)).in_open_chamber
    assert isinstance(SpectralParameter([2, 2]).weight, WeightVector)


def test_c_lambda_w_examples(hyperbolic, ctx):
    weyl = WeylGroup(hyperbolic)
    assert c_lambda_w(hyperbolic, LAMBDA, weyl.identity(), ctx) == 1
    for i in (1, 2):
        assert c_lambda_w(hyperbolic, LAMBDA, weyl.from_word([i]), ctx) == xi_ratio(2, ctx)
    # Phi_{w1 w2} = {alpha_2, alpha_1 + 3 alpha_2} with pairings 2 and 8
    value = c_lambda_w(hyperbolic, LAMBDA, weyl.from_word([1, 2]), ctx)
    assert abs(value - xi_ratio(2, ctx) * xi_ratio(8, ctx)) <= ctx.tolerance


def test_c_lambda_w_out_of_range(hyperbolic, ctx):
    weyl = WeylGroup(hyperbolic)
    with pytest.raises(OutOfRange) as info:
        c_lambda_w(hyperbolic, (1, 2), weyl.from_word([1]), ctx)
    assert info.value.root == (1, 0)


def test_constant_term_first_shell(hyperbolic, ctx):
    table = constant_term(hyperbolic, LAMBDA, POINT, 3, ctx)
    # lambda + rho = -3 alpha_1 - 3 alpha_2, so T_0 = e^-6
    assert abs(table.shell_sum(0) - ctx.mp.exp(-6)) <= ctx.tolerance * table.shell_sum(0)
    expected = 2 * xi_ratio(2, ctx) * ctx.mp.exp(-8)
    assert abs(table.shell_sum(1) - expected) <= ctx.tolerance * expected
    assert [row.count for row in table.rows] == [1, 2, 2, 2]
    assert table.rows[0].ratio is None


def test_constant_term_decays(hyperbolic, ctx):
    table = constant_term(hyperbolic, LAMBDA, POINT, 15, ctx)
    sums = [row.shell_abs_sum for row in table.rows]
    assert all(a > b for a, b in zip(sums, sums[1:]))
    assert sums[15] / sums[0] < ctx.mp.mpf("1e-10")
    assert table.total == table.rows[-1].partial_sum
    assert "tits=interior" in table.comments


def test_constant_term_preconditions(hyperbolic, ctx):
    with pytest.raises(NotGodement):
        constant_term(hyperbolic, (1, 2), POINT, 3, ctx)
    evaluator = EisensteinEvaluator(hyperbolic, ctx, tits_cap=50)
    lam = SpectralParameter(LAMBDA)
    with pytest.raises(NotInTitsCone):
        evaluator.constant_term(lam, (-1, -1), 2)


def test_constant_term_force_outside_tits_cone(hyperbolic, ctx, caplog):
    evaluator = EisensteinEvaluator(hyperbolic, ctx, tits_cap=50)
    with caplog.at_level("WARNING"):
        table = evaluator.constant_term(SpectralParameter(LAMBDA), (-1, -1), 2, force=True)
    assert any(c.startswith("WARNING: point is outside_presumed") for c in table.comments)
    assert "force was requested" in caplog.text
    assert len(table.rows) == 3


def test_exp_rational(hyperbolic, ctx):
    evaluator = EisensteinEvaluator(hyperbolic, ctx)
    value = evaluator.exp_rational(Fraction(-7, 2))
    assert abs(value - ctx.mp.exp(ctx.mp.mpf(-7) / 2)) <= ctx.tolerance * value
    with pytest.raises(PrecisionExhausted):
        evaluator.exp_rational(Fraction(10) ** 30)


def test_exponents_are_exact_pairings(hyperbolic):
    # <w lambda, H> = <lambda, w^-1 H> holds exactly in the rationals
    evaluator = EisensteinEvaluator(hyperbolic)
    weyl = evaluator.weyl
    lam = WeightVector([Fraction(5, 2), 3])
    point = (Fraction(2, 3), Fraction(5, 7))
    for w in weyl.elements(8):
        exponent = evaluator.exponent(weyl.act_on_weight(w, lam), point)
        assert isinstance(exponent, Fraction)
        inverse_point = weyl.act_on_point(tuple(reversed(w.word)), point)
        assert exponent == evaluator.exponent(lam, inverse_point)


@pytest.mark.slow
def test_partial_sums_stable_under_doubled_precision(hyperbolic):
    low = constant_term(hyperbolic, LAMBDA, POINT, 20, PrecisionContext(digits=30))
    high = constant_term(hyperbolic, LAMBDA, POINT, 20, PrecisionContext(digits=60))
    with mpmath.workdps(80):
        for a, b in zip(low.rows, high.rows):
            diff = abs(_mp(a.partial_sum) - _mp(b.partial_sum))
            assert diff <= mpmath.mpf(10) ** -20 * abs(_mp(b.partial_sum))


def test_threaded_table_matches_serial(rank3, ctx):
    serial = constant_term(rank3, (2, 2, 2), (1, 1, 1), 4, ctx)
    threaded = constant_term(rank3, (2, 2, 2), (1, 1, 1), 4, ctx, threads=2)
    assert serial.csv_rows() == threaded.csv_rows()


def test_dominating_series_single_term(hyperbolic, ctx):
    table = dominating_series(hyperbolic, LAMBDA, POINT, 4, 0, ctx)
    assert len(table.rows) == 1
    assert abs(table.total - ctx.mp.exp(-4)) <= ctx.tolerance * table.total
    assert "M=4" in table.comments


def test_dominating_series_tails(hyperbolic, ctx):
    table = dominating_series(hyperbolic, LAMBDA, POINT, 4, 12, ctx)
    sums = [row.shell_abs_sum for row in table.rows]
    # exponents -4, -6, -14, -36, -94, ... outrun 4^l from the second shell on
    assert all(a > b for a, b in zip(sums[1:], sums[2:]))
    assert sums[8] < ctx.tolerance * table.total


@pytest.mark.parametrize("m", [1, 2, 4])
def test_dominating_series_at_rho_is_cauchy(hyperbolic, ctx, m):
    table = dominating_series(hyperbolic, (1, 1), POINT, m, 12, ctx)
    tail = ctx.mp.fsum(row.shell_abs_sum for row in table.rows[9:])
    assert 0 < tail < ctx.mp.mpf("1e-10") * table.total


def test_dominating_series_preconditions(hyperbolic, ctx):
    with pytest.raises(NotDominant):
        dominating_series(hyperbolic, (0, 2), POINT, 4, 3, ctx)
    with pytest.raises(NotDominant):
        dominating_series(hyperbolic, LAMBDA, POINT, 0, 3, ctx)


def test_godement_majorant_dominates_constant_term(hyperbolic, ctx):
    majorant = godement_majorant(hyperbolic, LAMBDA, POINT, 8, ctx)
    series = constant_term(hyperbolic, LAMBDA, POINT, 8, ctx)
    assert any(c.startswith("M=2.0") for c in majorant.comments)
    for length in range(9):
        assert majorant.shell_sum(length) >= series.shell_sum(length)
    with pytest.raises(NotGodement):
        godement_majorant(hyperbolic, (2, 1), POINT, 3, ctx)


def test_admissible_term_bound(hyperbolic, ctx):
    evaluator = EisensteinEvaluator(hyperbolic, ctx)
    value = evaluator.admissible_term_bound(SpectralParameter(LAMBDA), POINT, [1], 2)
    # w1 (lambda + rho) lowers <., H> by 3 x_1
    with mpmath.workdps(60):
        expected = 2 * mpmath.exp(-9) * (1 + mpmath.e)
        assert abs(_mp(value) - expected) <= mpmath.mpf("1e-25")


def test_c_bound_scan(hyperbolic, ctx):
    scan = EisensteinEvaluator(hyperbolic, ctx).c_bound_scan(SpectralParameter(LAMBDA), 8)
    assert scan.max_c == xi_ratio(2, ctx)
    assert scan.argmax_word == (1,)
    assert scan.weight_base == 2
    assert scan.max_weighted < 16


@pytest.mark.slow
def test_c_bound_scan_at_two_rho(test_system, ctx):
    # non-simple coroots have height >= 3, so every factor past alpha_i is at most xi(6)/xi(7)
    two_rho = (2,) * test_system.rank
    scan = EisensteinEvaluator(test_system, ctx).c_bound_scan(SpectralParameter(two_rho), 12)
    assert xi_ratio(2, ctx) <= scan.max_c < xi_ratio(2, ctx) ** 2
    assert 1 <= len(scan.argmax_word) <= 2
    assert scan.weight_base == 2
    assert scan.max_weighted < 64


def test_shell_table_formatting(hyperbolic, ctx):
    table = constant_term(hyperbolic, LAMBDA, POINT, 2, ctx)
    rows = table.csv_rows()
    assert rows[0][:2] == ["0", "1"]
    assert rows[0][4] == ""
    assert rows[0][2].endswith("e-3")
    data = table.to_dict()
    assert data["kind"] == "constant_term"
    assert data["precision_digits"] == 30
    assert set(data["rows"][1]) == {"length", "count", "shell_abs_sum", "partial_sum", "ratio"}
    assert data["comments"][0] == "kind=constant_term"


def test_looijenga_finite_group(a2):
    result = looijenga_count(a2, (1, 1), [POINT], 10)
    assert result.count == 6
    assert result.exhausted
    assert result.max_length_reached == 3


def test_looijenga_matches_brute_force(hyperbolic):
    weyl = WeylGroup(hyperbolic)
    mu = WeightVector([1, 1])
    for n_bound, cap in ((200, 8), (10 ** 6, 4)):
        brute = sum(
            1 for w in weyl.elements(cap)
            if weyl.roots.weight_at(weyl.act_on_weight(w, mu), POINT) >= -n_bound
        )
        assert looijenga_count(hyperbolic, mu, [POINT], n_bound, cap_length=cap).count == brute
    capped = looijenga_count(hyperbolic, mu, [POINT], 10 ** 6, cap_length=4)
    assert capped.count == 9
    assert not capped.exhausted
    assert capped.max_length_reached == 4


def test_looijenga_grows_logarithmically(hyperbolic):
    small = looijenga_count(hyperbolic, (1, 1), [POINT], 10 ** 3)
    large = looijenga_count(hyperbolic, (1, 1), [POINT], 10 ** 6)
    assert small.exhausted and large.exhausted
    assert small.count < large.count <= 8 * small.count


def test_looijenga_reduces_single_point(hyperbolic):
    # w1 (-1, 5) = (1, 2)
    moved = looijenga_count(hyperbolic, (1, 1), [(-1, 5)], 500)
    direct = looijenga_count(hyperbolic, (1, 1), [(1, 2)], 500)
    assert moved == direct


def test_looijenga_point_reduced_onto_a_wall(hyperbolic):
    # w1 (-1, 3) = (1, 0): dominant, on the alpha_2 wall, and interior since w2 alone is finite
    weyl = WeylGroup(hyperbolic)
    mu = WeightVector([1, 1])
    brute = sum(
        1 for w in weyl.elements(8)
        if weyl.roots.weight_at(weyl.act_on_weight(w, mu), (1, 0)) >= -200
    )
    capped = looijenga_count(hyperbolic, mu, [(-1, 3)], 200, cap_length=8)
    assert capped.count == brute
    moved = looijenga_count(hyperbolic, mu, [(-1, 3)], 200)
    assert moved.exhausted
    assert moved == looijenga_count(hyperbolic, mu, [(1, 0)], 200)


def test_looijenga_several_points(hyperbolic):
    both = looijenga_count(hyperbolic, (1, 1), [(1, 1), (1, 2)], 500).count
    for point in ((1, 1), (1, 2)):
        assert both >= looijenga_count(hyperbolic, (1, 1), [point], 500).count


def test_looijenga_preconditions(hyperbolic):
    with pytest.raises(NotDominant):
        looijenga_count(hyperbolic, (-1, 1), [POINT], 10)
    with pytest.raises(NotDominant):
        looijenga_count(hyperbolic, (Fraction(1, 2), 1), [POINT], 10)
    with pytest.raises(NotDominant):
        looijenga_count(hyperbolic, (1, 1), [(1, 1), (0, 1)], 10)
    with pytest.raises(InvalidArgument):
        looijenga_count(hyperbolic, (1, 1), [POINT], 0)


def test_rank1_bound_is_exported(ctx):
    assert rank1_sum_bound(2, 1, 0, ctx).holds
