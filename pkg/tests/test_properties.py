import json

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from resdecay import single_particle as sp
from resdecay import two_particle as tp
from resdecay.config import loads
from resdecay.delta_shell import ShellPotential, find_poles, normalization_residual, normalize
from resdecay.resonant_basis import InitialState, ResonantBasis, coefficients
from resdecay.specfun import faddeyeva_w, moshinsky_m, origin_factors
from resdecay.tables import format_rows

finite = dict(allow_nan=False, allow_infinity=False)
slow = settings(max_examples=25, deadline=None,
                suppress_health_check=[HealthCheck.function_scoped_fixture])


@given(st.floats(-20, 20, **finite), st.floats(-20, 20, **finite))
def test_w_reflection(x, y):
    z = complex(x, y)
    assume(abs(z) <= 20 and (-z * z).real < 700)
    g = 2 * np.exp(-z * z)
    assert abs(faddeyeva_w(z) + faddeyeva_w(-z) - g) <= 1e-10 * (1 + abs(g))


@given(st.floats(-15, 15, **finite), st.floats(0, 15, **finite))
def test_w_conjugate_symmetry(x, y):
    z = complex(x, y)
    assert abs(faddeyeva_w(-z.conjugate()) - np.conj(faddeyeva_w(z))) <= 1e-15 * (1 + abs(faddeyeva_w(z)))


@given(st.floats(0.05, 60, **finite), st.floats(0.001, 8, **finite),
       st.floats(-2, 4, **finite))
def test_moshinsky_origin_identity(re, im, logt):
    kappa, t = complex(re, -im), 10.0 ** logt
    pole, out, _ = origin_factors(kappa, t)
    assume(abs(pole) < 1e300)
    m = moshinsky_m(0.0, kappa, t)
    assert abs(m + out - pole) <= 1e-10 * (1 + abs(pole))


@slow
@given(st.floats(0.3, 1e4, **finite), st.floats(0.2, 5, **finite), st.integers(1, 25))
def test_poles_satisfy_invariants(lam, a, n):
    p = ShellPotential(lam, a)
    poles = find_poles(p, n)
    k = poles.kappa
    assert np.all(k.real > 0) and np.all(k.imag < 0)
    assert np.all(np.diff(k.real) > 0)
    assert np.all(poles.residuals() <= 1e-10 * np.maximum(lam, 2 * np.abs(k)))
    for pole in list(poles)[:: max(1, n // 4)]:
        assert normalization_residual(normalize(pole, p)) <= 1e-10


@slow
@given(st.floats(2, 50, **finite), st.integers(1, 3))
def test_strength_sum_converges(lam, alpha):
    basis = ResonantBasis.build(ShellPotential(lam), 200)
    cum = coefficients(basis, InitialState.box(alpha)).cumulative_strength
    assert abs(1 - cum[-1]) < 1e-3
    assert abs(1 - cum[-1]) < abs(1 - cum[9])


@slow
@given(st.floats(0, 0.99, **finite), st.floats(0, 0.99, **finite), st.floats(-2, 3, **finite))
def test_exchange_symmetry(basis50, r1, r2, logt):
    t = 10.0 ** logt
    for sign in (1, -1):
        state = tp.TwoBodyState.entangled(basis50, 1, 3, sign)
        a = tp.evolve_two(state, r1, r2, t)
        b = tp.evolve_two(state, r2, r1, t)
        assert a == sign * b


@slow
@given(st.floats(0, 0.999, **finite), st.floats(-3, 4, **finite))
def test_split_identity(basis50, r, logt):
    ex = sp.Expansion.build(basis50, InitialState.box(2))
    t = 10.0 ** logt
    e, n = sp.evolve_split(ex, r, t)
    assert abs(e + n - sp.evolve(ex, r, t)) <= 1e-12 * (abs(e) + abs(n) + 1e-300)


@given(st.floats(-12, -0.5, **finite), st.floats(1e-3, 1e3, **finite), st.floats(-2, 2, **finite))
def test_tail_fit_recovers_power(power, amp, log_lo):
    t = np.geomspace(10.0 ** log_lo, 10.0 ** (log_lo + 1.5), 30)
    slope, err = tp.tail_fit(t, amp * t ** power, (t[0], t[-1]))
    assert abs(slope - power) < 1e-9
    assert err < 1e-9


@given(st.lists(st.floats(-1e300, 1e300, **finite), min_size=1, max_size=20))
def test_csv_round_trip_keeps_fifteen_digits(values):
    text = format_rows({"x": np.array(values)})
    back = [float(v) for v in text.splitlines()[1:]]
    for orig, got in zip(values, back):
        assert abs(got - orig) <= 5e-15 * abs(orig)


@given(st.floats(0.1, 100, **finite), st.floats(0.1, 10, **finite), st.integers(1, 9),
       st.integers(2, 1000), st.sampled_from(["box", "factorized", "entangled"]))
def test_config_round_trip(lam, a, alpha, points, kind):
    data = {"potential": {"lambda": lam, "a": a},
            "initial": {"kind": kind, "alpha": alpha, "beta": alpha + 1, "sign": 1},
            "time_grid": {"points": points},
            "tailfit": {"r": [0.1 * a, 0.5 * a]}}
    cfg = loads(json.dumps(data))
    assert cfg.potential.lam == lam and cfg.initial.kind == kind
    assert loads(json.dumps({k: v for k, v in cfg.to_dict().items()
                             if k != "potential"} | {"potential": {"lambda": lam, "a": a}})) == cfg
