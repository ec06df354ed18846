import math

import numpy as np
import pytest

from friedrichs import (UNBOUNDED, ModelParams, ZenoLimitKind, anti_zeno_minimum,
                        builtin, compute_timescales, n_epsilon, protocol_curve,
                        repeated_measurement_survival, short_time_expansion,
                        survival_probability, zeno_limit_class)
from friedrichs.amplitude import ShortTimeExpansion
from friedrichs.presets import preset


@pytest.fixture(scope="module")
def qdot():
    return preset("quantum-dot")


@pytest.fixture(scope="module")
def qdot_scales(qdot):
    return compute_timescales(*qdot)


def test_single_measurement_is_plain_survival(qdot):
    params, ff = qdot
    T = 1e-10
    p1 = repeated_measurement_survival(params, ff, T, 1)
    assert p1 == pytest.approx(survival_probability(params, ff, T), rel=1e-10)


def test_zero_coupling_protocol_trivial():
    params = ModelParams(1e10, 2e4, 0.0)
    ff = builtin("phi2")
    for n in (1, 5, 1000):
        assert repeated_measurement_survival(params, ff, 1e-6, n) == \
            pytest.approx(1.0, abs=1e-12)


def test_exponential_survival_is_protocol_fixed_point(qdot):
    params, ff = qdot
    rate = 3.7e8
    exact = lambda tau: -rate * tau
    T = 1e-8
    want = math.exp(-rate * T)
    for n in (1, 7, 1000, 10 ** 9):
        got = repeated_measurement_survival(params, ff, T, n, _logp=exact)
        assert abs(got - want) < 1e-12 * want


def test_log_space_matches_direct_powering(qdot, qdot_scales):
    params, ff = qdot
    T = 1e-2 * qdot_scales.t_d
    for n in (3, 10, 40):
        direct = survival_probability(params, ff, T / n) ** n
        log_space = repeated_measurement_survival(params, ff, T, n)
        assert log_space == pytest.approx(direct, rel=1e-12)


def test_protocol_argument_validation(qdot):
    params, ff = qdot
    with pytest.raises(ValueError):
        repeated_measurement_survival(params, ff, 1e-9, 0)
    with pytest.raises(ValueError):
        repeated_measurement_survival(params, ff, -1e-9, 3)
    with pytest.raises(ValueError):
        n_epsilon(params, ff, 1e-9, 1.5)
    with pytest.raises(ValueError):
        anti_zeno_minimum(params, ff, 0.0)


def test_zeno_limit_classification():
    mk = lambda s: ShortTimeExpansion(s, 2.5e-9, None, None, None, 1e-10)
    assert zeno_limit_class(mk(2.0)).kind is ZenoLimitKind.FREEZE
    assert zeno_limit_class(mk(1.5)).kind is ZenoLimitKind.FREEZE
    lim = zeno_limit_class(mk(1.0))
    assert lim.kind is ZenoLimitKind.EXPONENTIAL
    assert lim.rate == pytest.approx(1 / 2.5e-9)
    assert zeno_limit_class(mk(0.5)).kind is ZenoLimitKind.VANISH


@pytest.mark.parametrize("name", ["photodetachment", "quantum-dot", "hydrogen"])
def test_zeno_freeze_below_balance_time(name):
    # observation window inside the frozen-decay era, where repeated
    # projection at intervals far below the balance time beats leaving
    # the system alone
    params, ff = preset(name)
    ts = compute_timescales(params, ff)
    T = 10.0 * ts.t_z
    from friedrichs import survival_deficit
    p1 = 1.0 - survival_deficit(params, ff, T)
    taus = ts.t_z * np.array([1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5, 1e-3])
    ps = [repeated_measurement_survival(params, ff, T, max(1, round(T / tau)))
          for tau in taus]
    assert ps[2] > p1            # interval 1e-2 t_Z already freezes
    assert np.all(np.diff(ps) > 0)  # and keeps freezing as tau shrinks


def test_anti_zeno_minimum_quantum_dot(qdot, qdot_scales):
    params, ff = qdot
    ts = qdot_scales
    T = 1e-2 * ts.t_d
    m = anti_zeno_minimum(params, ff, T)
    assert not m.degenerate
    assert m.probability < math.exp(-T / ts.t_d)
    # the minimum sits a small factor above the balance time
    assert 1.0 < m.tau / ts.t_z < 6.0
    assert m.n_measurements == max(1, round(T / m.tau))


def test_anti_zeno_minimum_hydrogen_near_balance_time():
    # for the steep-tail weight the minimum sits essentially at the
    # balance time itself
    params, ff = preset("hydrogen")
    ts = compute_timescales(params, ff)
    m = anti_zeno_minimum(params, ff, 1e-2 * ts.t_d)
    assert 1.0 / 3.0 < m.tau / ts.t_z < 3.0
    assert m.probability < math.exp(-1e-2)


def test_anti_zeno_deepens_with_observation_time(qdot, qdot_scales):
    params, ff = qdot
    ts = qdot_scales
    rel = []
    for frac in (1e-4, 1e-1):
        T = frac * ts.t_d
        m = anti_zeno_minimum(params, ff, T)
        rel.append(m.probability / math.exp(-T / ts.t_d))
    assert rel[1] < rel[0]


def test_n_epsilon_exact_boundary(qdot, qdot_scales):
    params, ff = qdot
    T = 1e-2 * qdot_scales.t_d
    eps = 3e-3
    n = n_epsilon(params, ff, T, eps)
    assert isinstance(n, int)
    threshold = (1 - eps) * repeated_measurement_survival(params, ff, T, 1)
    assert repeated_measurement_survival(params, ff, T, n) >= threshold
    assert repeated_measurement_survival(params, ff, T, n + 1) < threshold


def test_n_epsilon_unbounded_for_loose_accuracy(qdot, qdot_scales):
    params, ff = qdot
    T = 1e-2 * qdot_scales.t_d
    assert n_epsilon(params, ff, T, 0.999999, cap=10 ** 5) is UNBOUNDED


def test_n_epsilon_decreases_with_accuracy(qdot, qdot_scales):
    params, ff = qdot
    T = 1e-2 * qdot_scales.t_d
    ns = [n_epsilon(params, ff, T, eps) for eps in (1e-2, 3e-3, 1e-3)]
    assert ns[0] > ns[1] > ns[2]


def test_protocol_curve_structure(qdot, qdot_scales):
    params, ff = qdot
    ts = qdot_scales
    T = 1e-3 * ts.t_d
    res = protocol_curve(params, ff, T, n_tau=120, decay_time=ts.t_d)
    assert res.T == T
    assert np.all(np.diff(res.n_values) < 0)      # unique, descending N
    assert res.n_values[-1] == 1                  # tau = T endpoint
    assert np.all((res.probabilities >= 0) & (res.probabilities <= 1))
    assert res.reference_exponential == pytest.approx(math.exp(-T / ts.t_d))
    assert res.minimum.probability <= res.probabilities.min() + 1e-12
