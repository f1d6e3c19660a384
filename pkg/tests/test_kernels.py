import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from volterra_lrd import kernels as K
from volterra_lrd.exceptions import DomainError

C = K.TimeMode.CONTINUOUS
D = K.TimeMode.DISCRETE


# eval_kernel

def test_powerlaw_at_zero():
    assert K.eval_kernel(K.KernelSpec(K.PowerLaw(0.3), 0.0), 0.0) == 1.0


def test_powerlaw_at_one():
    assert K.eval_kernel(K.KernelSpec(K.PowerLaw(1.5), 0.0), 1.0) == pytest.approx(2 ** -2.5, rel=1e-15)
    assert K.eval_kernel(K.KernelSpec(K.PowerLaw(1.5), 0.0), 1.0) == pytest.approx(0.176777, abs=1e-6)


def test_tabulated_lookup():
    spec = K.KernelSpec(K.Tabulated(0.5, [1.0, 0.5]), 0.0)
    assert K.eval_kernel(spec, 0.5) == 0.5
    assert K.eval_kernel(spec, 0.25) == pytest.approx(0.75)


def test_tabulated_out_of_range_without_tail():
    spec = K.KernelSpec(K.Tabulated(0.5, [1.0, 0.5]), 0.0)
    with pytest.raises(DomainError):
        K.eval_kernel(spec, 2.0)


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        K.eval_kernel(K.KernelSpec(K.PowerLaw(0.3), 0.0), -1.0)


def test_powertail_is_discrete_only():
    with pytest.raises(DomainError):
        K.KernelSpec(K.PowerTail(0.3), -1.0, C)
    with pytest.raises(DomainError):
        K.eval_kernel(K.KernelSpec(K.PowerTail(0.3), -1.0, D), 0)


# tail_integral and moments

def test_tail_integral_closed_forms():
    assert K.tail_integral(K.KernelSpec(K.PowerLaw(0.3), 0.0), 0.0) == pytest.approx(1 / 0.3, rel=1e-15)
    assert K.tail_integral(K.KernelSpec(K.PowerLaw(0.5), 0.0), 3.0) == pytest.approx(1.0, rel=1e-15)


def test_telescoping_discrete_tail():
    spec = K.KernelSpec(K.PowerTail(1.3), 0.0, D)
    assert K.tail_integral(spec, 1) == 1.0
    n = np.arange(1, 50)
    k = K.eval_kernel(spec, n)
    np.testing.assert_allclose(k, n ** -1.3 - (n + 1.0) ** -1.3, rtol=1e-14)
    # lam_n = sum_{j>=n} k_j, checked against a long explicit sum plus its exact remainder
    lam5 = k[4:].sum() + 50.0 ** -1.3
    assert K.tail_integral(spec, 5) == pytest.approx(lam5, rel=1e-13)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.5])
def test_powerlaw_tail_matches_quadrature(alpha):
    spec = K.KernelSpec(K.PowerLaw(alpha), 0.0)
    for t in np.linspace(0, 100, 11):
        q, _ = integrate.quad(lambda s: K.eval_kernel(spec, s), t, np.inf, epsabs=0, epsrel=1e-12, limit=200)
        assert K.tail_integral(spec, t) == pytest.approx(q, rel=1e-8)


def test_powerlaw_total_mass():
    for alpha, scale in [(0.3, 1.0), (1.5, 2.0)]:
        assert K.total_mass(K.KernelSpec(K.PowerLaw(alpha, scale), 0.0)) == pytest.approx(scale / alpha, rel=1e-15)


def test_first_moment():
    assert math.isinf(K.first_moment(K.KernelSpec(K.PowerLaw(0.3), 0.0)))
    assert K.first_moment(K.KernelSpec(K.PowerLaw(1.5), 0.0)) == pytest.approx(4.0 / 3.0, rel=1e-14)
    box = K.Tabulated(0.01, np.ones(101))
    assert K.first_moment(K.KernelSpec(box, 0.0)) == pytest.approx(0.5, rel=1e-12)


def test_first_moment_matches_quadrature_for_alpha_15():
    q, _ = integrate.quad(lambda s: s * (1 + s) ** -2.5, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert q == pytest.approx(4.0 / 3.0, rel=1e-9)


def test_tabulated_tail_extrapolation_powerlaw():
    # k = min(1, t^-1.3): exact power law on the fitting decade, total mass 1 + 1/0.3
    t = np.arange(0, 100.001, 0.01)
    k = np.minimum(1.0, np.maximum(t, 1.0) ** -1.3)
    spec = K.KernelSpec(K.Tabulated(0.01, k, tail_exponent=-1.3), 0.0)
    assert K.tail_integral(spec, 0.0) == pytest.approx(1 + 1 / 0.3, rel=1e-5)
    assert K.tail_integral(spec, 100.0) == pytest.approx(100 ** -0.3 / 0.3, rel=1e-10)
    assert K.eval_kernel(spec, 1000.0) == pytest.approx(1000 ** -1.3, rel=1e-10)
    with pytest.raises(DomainError):
        K.tail_integral(K.KernelSpec(K.Tabulated(0.01, k, tail_exponent=-0.5), 0.0), 0.0)


# regimes

def test_classify_regime_examples():
    crit = K.classify_regime(K.KernelSpec(K.PowerLaw(0.3), -10.0 / 3.0))
    assert crit.regime is K.Regime.CRITICAL
    sub = K.classify_regime(K.KernelSpec(K.PowerLaw(1.5), -2.0))
    assert sub.regime is K.Regime.SUBEXPONENTIAL
    assert sub.mass_gap == pytest.approx(-4.0 / 3.0, rel=1e-14)
    assert K.classify_regime(K.KernelSpec(K.PowerLaw(1.5), 1.0)).regime is K.Regime.UNSTABLE


def test_classification_tolerance_is_relative():
    fam = K.PowerLaw(0.3)
    assert K.classify_regime(K.KernelSpec(fam, -10 / 3 + 1e-12)).regime is K.Regime.CRITICAL
    assert K.classify_regime(K.KernelSpec(fam, -10 / 3 + 1e-6)).regime is K.Regime.UNSTABLE


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.05, 3.0), scale=st.floats(0.1, 10.0))
def test_critical_constructor_is_critical(alpha, scale):
    spec = K.KernelSpec.critical(K.PowerLaw(alpha, scale))
    assert K.classify_regime(spec).regime is K.Regime.CRITICAL


# structural checks

def test_log_convexity_examples():
    spec = K.KernelSpec(K.PowerLaw(0.3), 0.0)
    assert K.check_log_convexity(spec, np.arange(0, 101.0)).passed
    assert K.check_log_convexity([1, 0.5, 0.4]).passed
    bad = K.check_log_convexity([1, 0.5, 0.1])
    assert not bad.passed
    assert bad.worst_violation == pytest.approx(0.15, rel=1e-12)


def test_log_convexity_requires_uniform_grid():
    with pytest.raises(DomainError):
        K.check_log_convexity(K.KernelSpec(K.PowerLaw(0.3), 0.0), [0.0, 1.0, 3.0])


def test_kaluza_examples():
    n = np.arange(1, 1001.0)
    assert K.check_kaluza(n ** -0.3).passed
    geo = K.check_kaluza([Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
    assert geo.passed and geo.equality
    assert not K.check_kaluza([1, 0.5, 0]).passed


def test_kaluza_geometric_float_equality():
    rep = K.check_kaluza(0.5 ** np.arange(60))
    assert rep.passed
    assert rep.worst_violation <= 1e-12


def test_power_tail_with_unit_head_is_not_kaluza():
    # prefixing lam_0 = 1 to n^-0.3 breaks the inequality at n = 1
    seq = np.concatenate([[1.0], np.arange(1, 20.0) ** -0.3])
    rep = K.check_kaluza(seq)
    assert not rep.passed
    assert rep.worst_index == 1


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.05, 2.0), t0=st.floats(0.0, 50.0), step=st.floats(0.01, 5.0))
def test_powerlaw_tail_is_positive_nonincreasing(alpha, t0, step):
    spec = K.KernelSpec(K.PowerLaw(alpha), 0.0)
    lam = K.tail_integral(spec, t0 + step * np.arange(20))
    assert np.all(lam > 0)
    assert np.all(np.diff(lam) <= 0)


# slow variation

def test_powerlaw_slow_variation_limit():
    spec = K.KernelSpec(K.PowerLaw(0.3, 2.0), 0.0)
    L = K.powerlaw_slow_variation(spec)
    assert L(1e12) == pytest.approx(2.0 / 0.3, rel=1e-10)
    t = np.array([1.0, 10.0, 100.0])
    np.testing.assert_allclose(L(t) * t ** -0.3, K.tail_integral(spec, t), rtol=1e-14)


def test_target_decay_inverse_log():
    L = K.kernel_from_target_decay(t_min=2.0, **K.inverse_log_target())
    for t in (10.0, 1e3, 1e8):
        assert L(t) == pytest.approx(math.log(t), rel=1e-12)
    # int_t^inf ds / (s log^2 s) = 1 / log t
    t = 50.0
    q, _ = integrate.quad(lambda u: 1.0 / u ** 2, math.log(t), np.inf, epsabs=0, epsrel=1e-12)
    assert q == pytest.approx(1.0 / math.log(t), rel=1e-10)


def test_target_decay_inverse_loglog():
    rec = K.inverse_loglog_target()
    L = K.kernel_from_target_decay(t_min=20.0, **rec)
    t = 1e6
    expect = math.sqrt(math.log(t) * math.log(math.log(t)) ** 2)
    assert L(t) == pytest.approx(expect, rel=1e-12)
    # gamma(t) = int_t^inf ds / (s L(s)^2); with v = log log s the integrand is 1/v^2,
    # integrated numerically to v = 300 plus the exact remainder 1/300
    g = lambda v: math.exp(v) / L.at_log(math.exp(v)) ** 2
    q, _ = integrate.quad(g, math.log(math.log(t)), 300.0, epsabs=0, epsrel=1e-12, limit=400)
    assert q + 1.0 / 300.0 == pytest.approx(rec["gamma"](t), rel=1e-9)


def test_target_decay_rejects_increasing_gamma():
    with pytest.raises(DomainError):
        K.kernel_from_target_decay(lambda t: math.log(t), lambda t: 1.0 / t, t_min=2.0)
    with pytest.raises(DomainError):
        # derivative vanishes at t = 10
        K.kernel_from_target_decay(lambda t: 0.0, lambda t: -(t - 10.0) ** 2, t_min=1.0, t_max=100.0, samples=91)


# serialization

def test_block_round_trip():
    spec = K.KernelSpec(K.PowerLaw(0.3, 2.0), -1.25)
    assert K.spec_from_block(K.spec_to_block(spec)) == spec
    crit = K.spec_from_block({"family": "powertail", "alpha": "0.3", "a": "critical", "mode": "discrete"})
    assert crit.a == -1.0 and crit.discrete


def test_tabulated_csv(tmp_path):
    p = tmp_path / "k.csv"
    p.write_text("t,k\n0,1\n0.5,0.5\n1.0,0.25\n")
    tab = K.load_tabulated_csv(p)
    assert tab.step == 0.5 and list(tab.values) == [1.0, 0.5, 0.25]
    p.write_text("0,1\n0.5,0.5\n2.0,0.25\n")
    with pytest.raises(DomainError):
        K.load_tabulated_csv(p)
