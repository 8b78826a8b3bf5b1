"""Paired t-test: frozen oracle values, antisymmetry, degenerate guards.

The reference triple below comes from tests/oracles/ttest_constants.py
(mpmath at 50 digits, p via the regularized incomplete beta function).
"""

import numpy as np
import pytest

from demoselect import ValidationError, paired_t_test

ORACLE_T = 3.4641016151377544
ORACLE_P = 0.07417990022744854


def mpmath_paired_t(a, b):
    from mpmath import betainc, mpf, sqrt

    d = [mpf(repr(x)) - mpf(repr(y)) for x, y in zip(a, b)]
    n = len(d)
    mean = sum(d) / n
    var = sum((x - mean) ** 2 for x in d) / (n - 1)
    t = mean / sqrt(var / n)
    df = n - 1
    x = df / (df + t * t)
    p = betainc(mpf(df) / 2, mpf(1) / 2, 0, x, regularized=True)
    return float(t), float(p)


def test_oracle_triple():
    result = paired_t_test([0.80, 0.82, 0.81], [0.78, 0.79, 0.80])
    assert result.t_statistic == pytest.approx(ORACLE_T, abs=1e-12)
    assert result.p_value == pytest.approx(ORACLE_P, abs=1e-12)
    assert result.df == 2


def test_antisymmetry_exact():
    a = [0.81, 0.84, 0.79, 0.88]
    b = [0.80, 0.80, 0.80, 0.81]
    fwd = paired_t_test(a, b)
    rev = paired_t_test(b, a)
    assert rev.t_statistic == -fwd.t_statistic
    assert rev.p_value == fwd.p_value
    assert rev.df == fwd.df


def test_constant_shift_rejected():
    a = [0.80, 0.82, 0.81]
    b = [x - 0.05 for x in a]
    with pytest.raises(ValidationError, match="zero variance"):
        paired_t_test(a, b)


def test_identical_series_rejected():
    with pytest.raises(ValidationError):
        paired_t_test([0.5, 0.6], [0.5, 0.6])


def test_length_mismatch_rejected():
    with pytest.raises(ValidationError):
        paired_t_test([0.5, 0.6], [0.5])


def test_too_short_rejected():
    with pytest.raises(ValidationError):
        paired_t_test([0.5], [0.4])


def test_matches_mpmath_oracle_on_random_samples():
    rng = np.random.default_rng(31)
    for _ in range(50):
        n = int(rng.integers(3, 15))
        a = [float(x) for x in np.round(rng.uniform(0.3, 0.95, n), 6)]
        b = [float(x) for x in np.round(rng.uniform(0.3, 0.95, n), 6)]
        result = paired_t_test(a, b)
        t_ref, p_ref = mpmath_paired_t(a, b)
        assert result.t_statistic == pytest.approx(t_ref, abs=1e-6)
        assert result.p_value == pytest.approx(p_ref, abs=1e-6)


def test_matches_scipy_ttest_rel():
    from scipy import stats

    rng = np.random.default_rng(5)
    a = rng.uniform(0.5, 0.9, 10)
    b = rng.uniform(0.5, 0.9, 10)
    result = paired_t_test(a, b)
    t_ref, p_ref = stats.ttest_rel(a, b)
    assert result.t_statistic == pytest.approx(float(t_ref), abs=1e-10)
    assert result.p_value == pytest.approx(float(p_ref), abs=1e-10)
