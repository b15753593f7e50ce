import math

import numpy as np
import pytest

from gaugequad import aitken_sweep, series_limit, shanks_limit, window_oscillation

from oracles import BASEL, LN_2


def test_aitken_sweep_accelerates_geometric_error():
    n = np.arange(12, dtype=float)
    s = 1.0 + 0.5**n
    out = aitken_sweep(s)
    assert out.size == s.size - 2
    # One sweep should land far closer to the limit than the raw tail.
    assert abs(out[-1] - 1.0) < 1e-3 * abs(s[-1] - 1.0)


def test_aitken_sweep_is_exact_on_pure_geometric():
    s = (1 - 0.7 ** np.arange(1, 10)) / 0.3  # partial sums of 0.7^k
    out = aitken_sweep(s)
    assert np.allclose(out, 1.0 / 0.3, rtol=1e-10)


def test_shanks_limit_geometric():
    s = np.cumsum(0.8 ** np.arange(30))
    val, err = shanks_limit(s)
    assert val == pytest.approx(5.0, abs=1e-9)
    assert err < 1e-6


def test_shanks_limit_alternating_harmonic():
    n = np.arange(1, 40, dtype=float)
    s = np.cumsum((-1.0) ** (n + 1) / n)
    val, err = shanks_limit(s)
    assert val == pytest.approx(LN_2, abs=1e-8)
    assert err < 1e-5


def test_window_oscillation_flags_nondecaying_swings():
    flat = window_oscillation([1.0] * 20)
    assert max(flat) == 0.0
    swinging = window_oscillation([(-1.0) ** k for k in range(20)])
    assert min(swinging) > 1.0


def run_series(term, xs, tol=1e-8, n_cap=1 << 20):
    est, err, resolved = series_limit(term, np.asarray(xs, dtype=float), tol, n_cap)
    return est, err, resolved


def test_series_limit_geometric():
    term = lambda n, x: x**n
    xs = [0.1, 0.5, 0.9, -0.5]
    est, err, resolved = run_series(term, xs)
    want = [x / (1 - x) for x in xs]
    assert resolved.all()
    assert np.allclose(est, want, atol=1e-7)
    assert np.all(err < np.inf)


def test_series_limit_exponential_terms():
    # x^n/n! in log space; the hump near n ~ x must not fool the gate.
    def term(n, x):
        with np.errstate(all="ignore"):
            out = np.where(
                x > 0, np.exp(n * np.log(np.abs(x) + (x <= 0)) - math.lgamma(n + 1)), 0.0
            )
        return np.where(x == 0.0, 0.0, out)

    xs = np.array([0.5, 1.0, 20.0])
    est, err, resolved = run_series(term, xs, tol=1e-9)
    assert resolved.all()
    assert np.allclose(est, np.expm1(xs), rtol=1e-8)


def test_series_limit_alternating():
    term = lambda n, x: (-1.0) ** (n + 1) * x / n
    est, err, resolved = run_series(term, [1.0], tol=1e-9)
    assert resolved.all()
    assert est[0] == pytest.approx(LN_2, abs=1e-8)


def test_series_limit_slow_monotone_tail():
    # 1/n^2 gains barely three digits per octave raw; acceptance within a
    # practical cap demonstrates the anchored acceleration path.
    term = lambda n, x: x / n**2
    est, err, resolved = run_series(term, [1.0], tol=1e-6)
    assert resolved.all()
    assert est[0] == pytest.approx(BASEL, abs=1e-4)


def test_series_limit_telescoping_collapse():
    # Partial sums n*x*exp(-n*x^2) tend to 0 pointwise on (0, 1].
    def term(n, x):
        def partial(k):
            with np.errstate(all="ignore"):
                return np.where(x == 0.0, 0.0, k * x * np.exp(-k * x * x))

        return partial(n) - partial(n - 1)

    xs = [0.05, 0.3, 1.0]
    est, err, resolved = run_series(term, xs, tol=1e-7)
    assert resolved.all()
    assert np.allclose(est, 0.0, atol=1e-6)


def test_series_limit_reports_unresolved_honestly():
    term = lambda n, x: x / n  # divergent harmonic tail
    est, err, resolved = run_series(term, [1.0], tol=1e-8, n_cap=4096)
    assert not resolved.any()
    assert math.isinf(err[0])


def test_series_limit_mixed_columns():
    # One resolvable point and one divergent point in the same batch.
    def term(n, x):
        return np.where(x < 0.75, x**n, 1.0 / n)

    est, err, resolved = run_series(term, [0.5, 1.0], tol=1e-8, n_cap=4096)
    assert resolved[0] and not resolved[1]
    assert est[0] == pytest.approx(1.0, abs=1e-7)
    assert math.isinf(err[1])


def test_series_limit_vector_shapes():
    term = lambda n, x: x**n
    est, err, resolved = run_series(term, np.linspace(0.0, 0.5, 7))
    assert est.shape == err.shape == resolved.shape == (7,)
