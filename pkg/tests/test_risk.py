import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igtrisk.risk import (
    RiskMeasureSpec,
    VectorRiskSpec,
    evaluate,
    evaluate_values,
    evaluate_vector,
    is_acceptable_vector,
)
from igtrisk.scenario import RandomVariable, RandomVector, ScenarioSpace

from oracles import es_variational, var_scan

ALL_SPECS = [
    RiskMeasureSpec.var(0.05),
    RiskMeasureSpec.es(0.1),
    RiskMeasureSpec.entropic(1.0),
    RiskMeasureSpec.negexp(),
]


def rv(values, probs=None):
    values = np.asarray(values, dtype=float)
    space = (
        ScenarioSpace.equiprobable(values.size)
        if probs is None
        else ScenarioSpace(probs)
    )
    return RandomVariable(space, values)


# ---------------------------------------------------------------------------
# frozen examples
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_constant_position_cash_invariance(spec):
    assert evaluate(spec, rv([5.0, 5.0, 5.0])) == pytest.approx(-5.0, abs=1e-12)


def test_var_small_loss_event_is_acceptable():
    # a loss of 1 on probability 0.075 < alpha = 0.1 leaves the quantile at 0
    eta = rv([-1.0, 0.0], probs=[0.075, 0.925])
    assert evaluate(RiskMeasureSpec.var(0.1), eta) == 0.0


def test_es_tail_average_with_atom_split():
    eta = rv([-10.0, -2.0, 0.0], probs=[0.005, 0.005, 0.99])
    # worst 1% mass: 0.005 at -10 plus 0.005 at -2 -> (0.05 + 0.01) / 0.01
    assert evaluate(RiskMeasureSpec.es(0.01), eta) == pytest.approx(6.0, abs=1e-12)


def test_var_equiprobable_hundred():
    eta = rv(np.arange(1.0, 101.0))
    assert evaluate(RiskMeasureSpec.var(0.05), eta) == -5.0
    assert var_scan(eta.values, eta.space.probabilities, 0.05) == -5.0


def test_var_matches_rational_scan_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 12))
        vals = np.round(rng.normal(size=n) * 4, 3)
        alpha = float(rng.uniform(0.05, 0.95))
        got = evaluate_values(RiskMeasureSpec.var(alpha), vals, np.full(n, 1.0 / n))
        assert got == pytest.approx(var_scan(vals, np.full(n, 1.0 / n), alpha), abs=1e-12)


def test_es_matches_variational_oracle():
    rng = np.random.default_rng(12)
    for _ in range(40):
        n = int(rng.integers(1, 12))
        vals = rng.normal(size=n) * 3
        p = rng.uniform(0.2, 1.0, size=n)
        p /= p.sum()
        alpha = float(rng.uniform(0.05, 0.95))
        got = evaluate_values(RiskMeasureSpec.es(alpha), vals, p)
        assert got == pytest.approx(es_variational(vals, p, alpha), abs=1e-9)


# ---------------------------------------------------------------------------
# vector measure
# ---------------------------------------------------------------------------


def test_vector_constant_rows():
    sp = ScenarioSpace.equiprobable(3)
    C = RandomVector(sp, np.tile([1.0, 2.0], (3, 1)))
    spec = VectorRiskSpec.identical(RiskMeasureSpec.es(0.3), 2)
    assert np.allclose(evaluate_vector(spec, C), [-1.0, -2.0])


def test_vector_symmetry_under_column_swap():
    rng = np.random.default_rng(2)
    sp = ScenarioSpace.equiprobable(30)
    vals = rng.normal(size=(30, 2))
    spec = VectorRiskSpec.identical(RiskMeasureSpec.es(0.2), 2)
    a = evaluate_vector(spec, RandomVector(sp, vals))
    b = evaluate_vector(spec, RandomVector(sp, vals[:, ::-1]))
    assert np.allclose(a, b[::-1])


def test_vector_matches_percolumn_loop():
    rng = np.random.default_rng(4)
    sp = ScenarioSpace.equiprobable(25)
    vals = rng.normal(size=(25, 3))
    C = RandomVector(sp, vals)
    spec = VectorRiskSpec(
        (RiskMeasureSpec.var(0.2), RiskMeasureSpec.es(0.3), RiskMeasureSpec.negexp())
    )
    got = evaluate_vector(spec, C)
    want = [evaluate(spec.components[i], C.column(i)) for i in range(3)]
    assert np.allclose(got, want)


def test_acceptability():
    sp = ScenarioSpace.equiprobable(4)
    spec = VectorRiskSpec.identical(RiskMeasureSpec.es(0.25), 2)
    assert is_acceptable_vector(spec, RandomVector(sp, np.zeros((4, 2))))
    bad = np.zeros((4, 2))
    bad[:, 0] = -1.0
    assert not is_acceptable_vector(spec, RandomVector(sp, bad))
    rng = np.random.default_rng(8)
    vals = rng.normal(size=(4, 2))
    C = RandomVector(sp, vals)
    assert is_acceptable_vector(spec, C) == bool(
        np.all(evaluate_vector(spec, C) <= 1e-9)
    )


# ---------------------------------------------------------------------------
# axioms (property suite)
# ---------------------------------------------------------------------------

values_strategy = st.lists(
    st.floats(min_value=-40.0, max_value=40.0, allow_nan=False), min_size=1, max_size=12
)


@settings(max_examples=150, deadline=None)
@given(values_strategy, st.floats(min_value=-20.0, max_value=20.0))
def test_cash_invariance_all_kinds(values, m):
    eta = np.asarray(values)
    p = np.full(eta.size, 1.0 / eta.size)
    for spec in ALL_SPECS:
        base = evaluate_values(spec, eta, p)
        shifted = evaluate_values(spec, eta + m, p)
        assert shifted == pytest.approx(base - m, abs=1e-10)


@settings(max_examples=150, deadline=None)
@given(values_strategy, st.lists(st.floats(min_value=0.0, max_value=5.0), min_size=1, max_size=12))
def test_monotonicity_all_kinds(values, bumps):
    eta = np.asarray(values)
    inc = np.resize(np.asarray(bumps), eta.size)
    p = np.full(eta.size, 1.0 / eta.size)
    for spec in ALL_SPECS:
        lower = evaluate_values(spec, eta, p)
        higher = evaluate_values(spec, eta + inc, p)
        assert higher <= lower + 1e-10


def test_es_negexp_coherence_on_random_pairs():
    rng = np.random.default_rng(21)
    for spec in (RiskMeasureSpec.es(0.1), RiskMeasureSpec.negexp()):
        for _ in range(300):
            n = int(rng.integers(2, 14))
            p = rng.uniform(0.1, 1.0, size=n)
            p /= p.sum()
            a = rng.normal(size=n) * 5
            b = rng.normal(size=n) * 5
            t = float(rng.uniform(0.1, 4.0))
            ra, rb = evaluate_values(spec, a, p), evaluate_values(spec, b, p)
            assert evaluate_values(spec, a + b, p) <= ra + rb + 1e-9
            assert evaluate_values(spec, t * a, p) == pytest.approx(t * ra, abs=1e-9)


def test_entropic_convexity():
    rng = np.random.default_rng(22)
    spec = RiskMeasureSpec.entropic(1.5)
    for _ in range(200):
        n = int(rng.integers(2, 12))
        p = rng.uniform(0.1, 1.0, size=n)
        p /= p.sum()
        a, b = rng.normal(size=n) * 3, rng.normal(size=n) * 3
        lam = float(rng.uniform())
        mix = evaluate_values(spec, lam * a + (1 - lam) * b, p)
        assert mix <= lam * evaluate_values(spec, a, p) + (1 - lam) * evaluate_values(
            spec, b, p
        ) + 1e-9


def test_es_dominates_var():
    rng = np.random.default_rng(23)
    for _ in range(200):
        n = int(rng.integers(1, 15))
        p = rng.uniform(0.1, 1.0, size=n)
        p /= p.sum()
        vals = rng.normal(size=n) * 4
        alpha = float(rng.uniform(0.05, 0.95))
        es = evaluate_values(RiskMeasureSpec.es(alpha), vals, p)
        var = evaluate_values(RiskMeasureSpec.var(alpha), vals, p)
        assert es >= var - 1e-12


def test_var_positive_homogeneity():
    rng = np.random.default_rng(24)
    for _ in range(100):
        n = int(rng.integers(1, 10))
        vals = rng.normal(size=n)
        p = np.full(n, 1.0 / n)
        t = float(rng.uniform(0.1, 7.0))
        spec = RiskMeasureSpec.var(0.3)
        assert evaluate_values(spec, t * vals, p) == pytest.approx(
            t * evaluate_values(spec, vals, p), abs=1e-10
        )


def test_spec_validation():
    with pytest.raises(ValueError):
        RiskMeasureSpec.var(1.5)
    with pytest.raises(ValueError):
        RiskMeasureSpec.es(0.0)
    with pytest.raises(ValueError):
        RiskMeasureSpec.entropic(-1.0)
    with pytest.raises(ValueError):
        RiskMeasureSpec("quantile", alpha=0.5)
    with pytest.raises(ValueError):
        VectorRiskSpec(())
    with pytest.raises(ValueError):
        evaluate_values(RiskMeasureSpec.negexp(), [], [])
