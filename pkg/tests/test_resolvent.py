import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_lrd import kernels as K
from volterra_lrd import resolvent as R
from volterra_lrd.exceptions import DomainError, RegimeError


def exp_spec(a=-1.0):
    return K.KernelSpec(K.Custom(lambda t: 0.0, tail=lambda t: 0.0, alpha=None), a)


# grid

def test_grid_from_horizon():
    g = R.Grid.from_horizon(0.01, 100.0)
    assert g.n_points == 10001 and g.t_max == pytest.approx(100.0)
    assert g.index(50.0) == 5000
    with pytest.raises(DomainError):
        R.Grid.from_horizon(0.03, 1.0)
    with pytest.raises(DomainError):
        R.Grid(0.1, 1)


# renewal scheme

@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(0.1, 2.0), h=st.sampled_from([0.01, 0.05, 0.1]))
def test_initial_value_is_one(alpha, h):
    spec = K.KernelSpec.critical(K.PowerLaw(alpha))
    assert R.solve_resolvent_renewal(spec, R.Grid.from_horizon(h, 5.0)).r[0] == 1.0
    assert R.solve_resolvent_ode(spec, R.Grid.from_horizon(h, 5.0)).r[0] == 1.0


def test_renewal_monotone_in_unit_interval(renewal03):
    r = renewal03.r
    assert np.all(r >= -1e-9) and np.all(r <= 1 + 1e-9)
    assert np.all(np.diff(r) <= 1e-9)
    assert renewal03.log_convex


def test_renewal_rho_is_backward_difference(renewal03, spec03):
    assert renewal03.rho[0] == K.tail_integral(spec03, 0.0)
    np.testing.assert_allclose(renewal03.rho[1:], -np.diff(renewal03.r) / 0.01, rtol=1e-12)
    # 0 <= rho <= lam
    lam = K.tail_integral(spec03, renewal03.times)
    assert np.all(renewal03.rho >= -1e-9)
    assert np.all(renewal03.rho[1:] <= lam[:-1] + 1e-9)


def test_renewal_residual_small(renewal03, spec03):
    assert R.renewal_residual(renewal03, spec03).max_abs <= 1e-4


def test_renewal_second_order(spec03):
    res = [R.renewal_residual(R.solve_resolvent_renewal(spec03, R.Grid.from_horizon(h, 20.0)), spec03).max_abs
           for h in (0.04, 0.02, 0.01)]
    for coarse, fine in zip(res, res[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_renewal_refuses_non_critical(subexp15):
    with pytest.raises(RegimeError):
        R.solve_resolvent_renewal(subexp15, R.Grid.from_horizon(0.1, 1.0))
    with pytest.raises(RegimeError):
        R.solve_resolvent_renewal(K.KernelSpec(K.PowerLaw(1.5), 1.0), R.Grid.from_horizon(0.1, 1.0))


def test_renewal_fft_matches_direct(spec03):
    g = R.Grid.from_horizon(0.01, 100.0)
    a = R.solve_resolvent_renewal(spec03, g, fft=True, block=512).r
    b = R.solve_resolvent_renewal(spec03, g, fft=False).r
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


# integro-ODE scheme

def test_ode_exponential():
    res = R.solve_resolvent_ode(exp_spec(-1.0), R.Grid.from_horizon(0.01, 1.0))
    assert res.at(1.0) == pytest.approx(math.exp(-1.0), abs=1e-5)
    assert res.at(1.0) == pytest.approx(0.367879, abs=1e-5)


def test_cross_scheme(spec03):
    g = R.Grid.from_horizon(0.01, 20.0)
    a = R.solve_resolvent_renewal(spec03, g).r
    b = R.solve_resolvent_ode(spec03, g).r
    assert np.max(np.abs(a - b)) <= 1e-3


def test_ode_residual_on_critical(spec03):
    res = R.solve_resolvent_ode(spec03, R.Grid.from_horizon(0.01, 20.0))
    assert R.renewal_residual(res, spec03).max_abs <= 1e-3


def test_ode_rho_is_minus_rhs():
    res = R.solve_resolvent_ode(exp_spec(-2.0), R.Grid.from_horizon(0.01, 1.0))
    np.testing.assert_allclose(res.rho, 2.0 * res.r, rtol=1e-14)


def test_unstable_growth():
    spec = K.KernelSpec(K.PowerLaw(1.5), 1.0)
    r10 = R.solve_resolvent_ode(spec, R.Grid.from_horizon(0.01, 10.0)).at(10.0)
    assert r10 > 100
    # h = 0.01, 0.005 oracle runs extrapolate to 424950.5; the h = 0.01 value is frozen
    assert r10 == pytest.approx(425140.02446694486, rel=1e-9)
    assert r10 == pytest.approx(424950.5, rel=1e-3)


def test_ode_fft_matches_direct(subexp15):
    g = R.Grid.from_horizon(0.05, 300.0)
    a = R.solve_resolvent_ode(subexp15, g, fft=True, block=256).r
    b = R.solve_resolvent_ode(subexp15, g, fft=False).r
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


# discrete recurrence

def test_discrete_hand_example():
    r = R.solve_resolvent_discrete([0.5], -0.5, 4)
    np.testing.assert_array_equal(r[:3], [1.0, 0.5, 0.75])


def test_discrete_geometric():
    r = R.solve_resolvent_discrete(np.zeros(10), -0.5, 30)
    np.testing.assert_allclose(r, 0.5 ** np.arange(30), rtol=1e-15)


def test_discrete_fft_matches_direct(discrete03):
    k, _ = K.discrete_sequences(discrete03, 20000)
    a = R.solve_resolvent_discrete(k, -1.0, 20000, fft=True, block=1024)
    b = R.solve_resolvent_discrete(k, -1.0, 20000, fft=False)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_discrete_monotone_under_kaluza_with_unit_head():
    # lam_n = 0.8 n^-0.3: (1, lam_1, lam_2, ...) is Kaluza, so r is non-increasing
    spec = K.KernelSpec(K.PowerTail(0.3, 0.8), -0.8, K.TimeMode.DISCRETE)
    n = 100_000
    k, lam = K.discrete_sequences(spec, n)
    assert K.check_kaluza(np.concatenate([[1.0], lam[:1000]])).passed
    r = R.solve_resolvent_discrete(k, spec.a, n)
    assert np.all(np.diff(r) <= 1e-14)


def test_discrete_literal_power_tail_is_not_monotone(discrete_r03):
    # with a = -lam_1 = -1, r_1 = 1 + a = 0 and r_2 = k_1 = 1 - 2^-0.3 > r_1
    r, k, lam = discrete_r03
    assert r[1] == 0.0
    assert r[2] == pytest.approx(1 - 2 ** -0.3, rel=1e-15)
    assert r[2] > r[1]
    # beyond the head the sequence decreases
    assert np.all(np.diff(r[4:]) <= 1e-14)


def test_discrete_renewal_identity(discrete_r03):
    r, k, lam = discrete_r03
    an = R.discrete_renewal_identity(r, lam)
    assert np.max(np.abs(an - 1.0)) <= 1e-12


def test_discrete_renewal_identity_needs_corrected_index(discrete_r03):
    # the shifted tail index lam_{n+1-j} does not give a constant sequence
    r, k, lam = discrete_r03
    n = 50
    shifted = r[n] + sum(r[j] * lam[n - j] for j in range(n))  # lam[i] = lam_{i+1}
    assert abs(shifted - 1.0) > 1e-3


# Delta recurrence

def test_delta_geometric_nonnegative():
    lam = 0.5 ** np.arange(1, 200)
    k = lam[:-1] - lam[1:]
    rep = R.delta_recurrence_check(k, -lam[0], 150)
    assert rep.all_nonnegative
    assert rep.max_disagreement <= 1e-12
    assert rep.kaluza_with_unit_head


def test_delta_non_kaluza_agreement_only():
    rep = R.delta_recurrence_check([0.5, 0.5], -1.0, 40, lam_seq=[1.0, 0.5] + [0.0] * 40)
    assert rep.max_disagreement <= 1e-12
    assert not rep.all_nonnegative


def test_delta_power_tail_first_terms(discrete03):
    k, lam = K.discrete_sequences(discrete03, 1000)
    rep = R.delta_recurrence_check(k, -1.0, 1000)
    assert rep.max_disagreement <= 1e-12
    assert rep.delta_recurrence[0] == 1.0                          # Delta_1 = lam_1
    assert rep.delta_recurrence[1] == pytest.approx(2 ** -0.3 - 1)  # Delta_2 = lam_2 - lam_1^2
    assert rep.first_negative == 2
    assert not rep.kaluza_with_unit_head


# limiting value

def test_limiting_value(spec03, spec15):
    assert R.limiting_value(spec15) == pytest.approx(3.0 / 7.0, rel=1e-14)
    with pytest.raises(DomainError):
        R.limiting_value(spec03)


def test_limiting_value_without_memory_is_one():
    # boundary case: a = 0, no kernel, r == 1
    assert R.limiting_value(K.KernelSpec(K.Custom(lambda t: 0.0, tail=lambda t: 0.0), 0.0)) == 1.0


def test_corollary_limit_trend(spec15):
    res = R.solve_resolvent_renewal(spec15, R.Grid.from_horizon(0.05, 1000.0))
    errs = [abs(res.at(T) - 3.0 / 7.0) for T in (100.0, 300.0, 1000.0)]
    assert errs[0] > errs[1] > errs[2]


# output

def test_csv_formats(tmp_path, renewal03):
    p = tmp_path / "r.csv"
    R.write_csv(p, renewal03)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,r,rho"
    assert lines[1].split(",")[1] == "1"
    q = tmp_path / "d.csv"
    d = R.resolvent_for(K.KernelSpec(K.PowerTail(0.3), -1.0, K.TimeMode.DISCRETE), 10)
    R.write_csv(q, d)
    lines = q.read_text().splitlines()
    assert lines[0] == "n,r" and len(lines) == 11


def test_results_are_read_only(renewal03):
    with pytest.raises(ValueError):
        renewal03.r[0] = 2.0
