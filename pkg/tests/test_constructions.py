import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import optimize

from segprice.constructions import (ConstructionParams, build, dirac_worst_case, select_kappa,
                                    solve_exp_ratio, staircase, tight_pair, triangular_regular,
                                    trunc_exp_mhr, unbounded_flat)
from segprice.errors import ConstructionError
from segprice.market import diagnose_shape
from segprice.pricing import analyze

from .oracles import harmonic


def test_exp_ratio_root_matches_brentq():
    ref = optimize.brentq(lambda x: -math.expm1(-x) / x - 0.5, 1e-9, 10, xtol=1e-15)
    assert float(solve_exp_ratio(0.5)) == pytest.approx(ref, rel=1e-13)
    assert ref / 2 == pytest.approx(0.7968, abs=1e-4)
    assert tight_pair(2.0, 0.1).metadata["lambda1"] == pytest.approx(ref / 2, rel=1e-13)


@pytest.mark.parametrize("y", [0.0, 1.0, -0.5, 2.0])
def test_exp_ratio_domain(y):
    with pytest.raises(ValueError):
        solve_exp_ratio(y)


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_tight_pair_ratio_within_bound(eps):
    m = tight_pair(2.0, eps)
    r = analyze(m)
    assert 0.5 <= r.ratio <= 0.5 + eps * 3 / 2 + 1e-6
    assert r.ratio <= m.metadata["bound"] + 1e-6


def test_tight_pair_segments_are_concave():
    for eps in (1e-1, 1e-2, 1e-3):
        assert diagnose_shape(tight_pair(2.0, eps)).all_concave


def test_tight_pair_ratio_decreases_toward_half():
    ratios = [analyze(tight_pair(2.0, eps)).ratio for eps in (1e-1, 1e-2, 1e-3)]
    assert ratios[0] > ratios[1] > ratios[2] > 0.5


def test_tight_pair_small_a_reaches_1e4():
    ratios = []
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        m = tight_pair(1.1, eps)
        ratios.append(analyze(m).ratio)
        assert 0.5 <= ratios[-1] <= 0.5 + eps * 2.1 / 2 + 1e-6
    assert ratios == sorted(ratios, reverse=True)
    assert m.metadata["extended_precision"]


def test_tight_pair_unrepresentable_raises_with_condition():
    with pytest.raises(ConstructionError) as info:
        tight_pair(2.0, 1e-4)
    assert info.value.condition == "M-representable"


def test_bad_kappa_reports_condition():
    with pytest.raises(ConstructionError) as info:
        tight_pair(2.0, 0.1, kappa=0.9)
    assert info.value.condition == "kappa-concavity"


def test_selected_kappa_is_valid_and_deterministic():
    k = select_kappa(2.0, 0.01)
    assert 0 < k <= 0.5 and k == select_kappa(2.0, 0.01)
    assert tight_pair(2.0, 0.01, kappa=k).metadata["M"] == tight_pair(2.0, 0.01).metadata["M"]


@pytest.mark.parametrize("K", [2, 5, 10, 100])
def test_staircase_ratio_is_inverse_harmonic(K):
    r = analyze(staircase(K))
    assert r.ratio == pytest.approx(float(1 / harmonic(K)), abs=1e-9)


def test_staircase_five():
    r = analyze(staircase(5))
    assert r.ratio == pytest.approx(60 / 137, abs=1e-12)
    assert r.uniform_price == pytest.approx(0.2)


def _triangular_oracle(K):
    pu = Fraction(1, K) * sum(Fraction(1, K + n) for n in range(1, K + 1))
    ps = harmonic(K) / (2 * K)
    return pu, ps


def test_triangular_two():
    r = analyze(triangular_regular(2))
    assert r.pi_uniform == pytest.approx(7 / 24, abs=1e-12)
    assert r.pi_star == pytest.approx(3 / 8, abs=1e-12)
    assert r.ratio == pytest.approx(7 / 9, abs=1e-12)


@pytest.mark.parametrize("K", [3, 7, 32, 256])
def test_triangular_closed_forms(K):
    pu, ps = _triangular_oracle(K)
    r = analyze(triangular_regular(K))
    assert r.pi_uniform == pytest.approx(float(pu), abs=1e-12)
    assert r.pi_star == pytest.approx(float(ps), abs=1e-12)


def test_triangular_ratio_decreases_in_K():
    ratios = [analyze(triangular_regular(K)).ratio for K in (2, 4, 8, 16, 64, 256)]
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


def test_triangular_segments_are_regular_not_concave():
    d = diagnose_shape(triangular_regular(4))
    assert all(d.regular) and not any(d.concave_profit)


def test_trunc_exp_family():
    m = trunc_exp_mhr(5, 10.0)
    r = analyze(m)
    assert 0.13 <= r.pi_uniform <= 0.15
    assert r.pi_uniform <= 1 / 5 + 1e-9
    assert all(diagnose_shape(m).mhr)


@pytest.mark.parametrize("K", [2, 10, 100])
@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_dirac_ratio_exact(K, eps):
    r = analyze(dirac_worst_case(K, eps))
    assert abs(r.ratio - (1 + eps) / K) <= 1e-12


def test_unbounded_flat_has_ratio_one():
    for peaks in ([1.0], [1.0, 2.0, 3.0], [0.5, 4.0, 9.0, 100.0]):
        m = unbounded_flat(peaks)
        assert m.theta_bar is None
        assert analyze(m).ratio == pytest.approx(1.0, abs=1e-9)
    assert all(diagnose_shape(unbounded_flat([1.0, 2.0])).concave_profit)


@pytest.mark.parametrize("kwargs", [
    dict(family="nope", K=3),
    dict(family="tight_pair", a=1.0, epsilon=0.1),
    dict(family="tight_pair", a=2.0, epsilon=1.5),
    dict(family="staircase", K=1),
    dict(family="trunc_exp_mhr", K=3, L=0.5),
    dict(family="dirac_worst_case", K=3, epsilon=0.0),
    dict(family="unbounded_flat"),
])
def test_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        ConstructionParams(**kwargs)


def test_build_dispatch_is_deterministic():
    p = ConstructionParams("staircase", K=4)
    a, b = build(p), build(p)
    x = np.linspace(0, 1.2, 101)
    for (wa, da), (wb, db) in zip(a.segments, b.segments):
        assert wa == wb and np.array_equal(da.survival(x), db.survival(x))


@pytest.mark.parametrize("make", [staircase, triangular_regular, lambda K: trunc_exp_mhr(K, 10.0)],
                         ids=["staircase", "triangular", "trunc_exp"])
def test_ratio_nonincreasing_over_powers_of_two(make):
    ratios = [analyze(make(2 ** j)).ratio for j in range(1, 11)]
    assert all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 0.5


def test_unbounded_flat_concave_on_twice_the_last_peak():
    m = unbounded_flat([1.0, 2.0, 4.0])
    assert all(diagnose_shape(m, domain_hi=8.0).concave_profit)
