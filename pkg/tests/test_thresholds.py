import random
from fractions import Fraction

import mpmath
import pytest

from ledakem import params
from ledakem.thresholds import (MODELS, build_threshold_table, check_probabilities,
                                clamp_after_minimum, lookup_threshold, odd_check_probability)

from oracles import clamp_oracle, exact_row, flip_condition, odd_exact, p_ci_exact, p_ic_exact


def compare_with_oracle(ps, model, rows=None):
    """Check every (or the selected) table entry against exact rationals.

    Returns the largest absolute deviation of the expected syndrome weight.
    """
    table = build_threshold_table(ps, model=model)
    n = ps.n0 * ps.p
    max_rho = ps.m * ps.dv
    worst = 0.0
    for j in (range(ps.t + 1) if rows is None else rows):
        weight, (q_ci, q_ic) = exact_row(ps.n0, ps.p, ps.dv, ps.m, j, model)
        worst = max(worst, abs(float(weight) - table.weights[j]))
        b = table.raw_thresholds[j]
        if j == 0:
            assert b == max_rho
            continue
        cond = lambda rho: flip_condition(n, j, q_ci, q_ic, rho, max_rho, ps.delta)
        if q_ic > q_ci:
            # the likelihood ratio grows with rho, so checking b and b - 1 pins the minimum
            assert b == max_rho or cond(b)
            assert b == 0 or not cond(b - 1)
        else:
            expected = next((r for r in range(max_rho + 1) if cond(r)), max_rho)
            assert b == expected
    if rows is None:
        assert list(table.thresholds) == clamp_oracle(table.raw_thresholds)
    return worst


@pytest.mark.parametrize("model", MODELS)
def test_toy_table_full_scan(toy, model):
    table = build_threshold_table(toy, model=model)
    n, max_rho = toy.n, toy.m * toy.dv
    for j in range(1, toy.t + 1):
        _, (q_ci, q_ic) = exact_row(toy.n0, toy.p, toy.dv, toy.m, j, model)
        expected = next((r for r in range(max_rho + 1)
                         if flip_condition(n, j, q_ci, q_ic, r, max_rho, toy.delta)), max_rho)
        assert table.raw_thresholds[j] == expected
    assert compare_with_oracle(toy, model) < 0.5


def test_toy_table_values(toy):
    table = build_threshold_table(toy)
    assert table.raw_thresholds == (9, 7, 8)
    assert table.thresholds == (7, 7, 8)
    assert table.weights[1] == pytest.approx(float(29 * odd_exact(58, 6, 3)), abs=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_cat1_table_sampled_rows(cat1n2, model):
    rows = [1, 2, 3, 10, 50, 100, 150, 200, 224]
    assert compare_with_oracle(cat1n2, model, rows) < 0.5


def close(value, exact: Fraction, rel=1e-25):
    with mpmath.workdps(40):
        ref = mpmath.mpf(exact.numerator) / exact.denominator
        return abs(mpmath.mpf(value) - ref) <= rel * abs(ref)


def test_probabilities_match_exact():
    for n, w, t in ((58, 6, 3), (58, 6, 6), (55558, 34, 1568), (1000, 10, 1)):
        with mpmath.workdps(30):
            p_ci, p_ic = check_probabilities(n, w, t)
            odd = odd_check_probability(n, w, t)
        assert close(p_ci, p_ci_exact(n, w, t)) or p_ci == p_ci_exact(n, w, t) == 0
        assert close(p_ic, p_ic_exact(n, w, t))
        assert close(odd, odd_exact(n, w, t))
    assert check_probabilities(58, 6, 0) == (0, 0)
    # a single error: a correct bit's check fails iff the error is among its 5 other positions
    with mpmath.workdps(30):
        p_ci, p_ic = check_probabilities(58, 6, 1)
    assert close(p_ci, Fraction(5, 57)) and p_ic == 1


def test_cat1_table_shape(cat1n2):
    table = build_threshold_table(cat1n2)
    raw, b = table.raw_thresholds, table.thresholds
    assert table.min_index > 0
    # raw thresholds decrease to the minimum, then the clamp flattens everything before it
    tail = raw[table.min_index:]
    assert all(x <= y for x, y in zip(tail, tail[1:]))
    assert set(b[:table.min_index + 1]) == {min(raw)}
    assert all(w1 < w2 for w1, w2 in zip(table.weights, table.weights[1:]))


def test_printed_model_weights_saturate(cat1n2):
    table = build_threshold_table(cat1n2, model="printed")
    # p * (p_ic + p_ci) is close to p for every j > 0, above any reachable syndrome weight
    assert min(table.weights[1:]) > 0.9 * cat1n2.p


def test_clamp():
    assert clamp_after_minimum((9, 7, 5, 6, 5, 8)) == ((5, 5, 5, 5, 5, 8), 4)
    assert clamp_after_minimum((3,)) == ((3,), 0)
    for _ in range(200):
        raw = [random.randrange(10) for _ in range(random.randrange(1, 10))]
        assert list(clamp_after_minimum(raw)[0]) == clamp_oracle(raw)


def test_lookup_against_linear_scan(cat1n2, toy):
    for ps in (toy, cat1n2):
        table = build_threshold_table(ps)
        r = random.Random(5)
        for w in [0, 1, ps.p] + [r.randrange(ps.p) for _ in range(300)]:
            below = [j for j in range(len(table)) if table.weights[j] < w]
            if below:
                j = max(below, key=lambda k: table.weights[k])
            else:
                j = min(range(len(table)), key=lambda k: table.weights[k])
            assert lookup_threshold(table, w) == table.thresholds[j] == table.lookup(w)


def test_delta_raises_thresholds(toy):
    loose = build_threshold_table(toy, delta=0.0)
    strict = build_threshold_table(toy, delta=1000.0)
    assert all(a <= b for a, b in zip(loose.raw_thresholds, strict.raw_thresholds))
    with pytest.raises(ValueError):
        build_threshold_table(toy, model="nope")


def test_rows_listing(toy):
    rows = build_threshold_table(toy).rows()
    assert rows[2][:2] == (2, 6)
