import numpy as np
import pytest

from resdecay import single_particle as sp
from resdecay.errors import DomainError
from resdecay.reference_oracle import spectral_amplitude
from resdecay.resonant_basis import InitialState
from resdecay.two_particle import tail_fit

GAMMA_1 = 1.54921925773113


def test_returns_initial_state_at_zero(ground):
    r = np.linspace(0, 0.9, 7)
    assert np.array_equal(sp.evolve(ground, r, 0.0), InitialState.box(1)(r))
    assert sp.survival_amplitude(ground, 0.0) == 1
    assert sp.nonescape_probability(ground, 0.0) == pytest.approx(1.0, abs=1e-8)


def test_small_time_recovery(ground):
    val = sp.evolve(ground, 0.5, 1e-6)
    assert abs(val - InitialState.box(1)(0.5)) <= 1e-3


def test_shapes(ground):
    assert np.ndim(sp.evolve(ground, 0.3, 1.0)) == 0
    assert sp.evolve(ground, [0.1, 0.2, 0.3], 1.0).shape == (3,)
    assert sp.evolve(ground, 0.1, [1.0, 2.0]).shape == (2,)
    assert sp.evolve(ground, [0.1, 0.2, 0.3], [0.0, 1.0]).shape == (2, 3)


def test_domain_checks(ground):
    with pytest.raises(DomainError):
        sp.evolve(ground, 1.0, 1.0)
    with pytest.raises(DomainError):
        sp.evolve(ground, -0.1, 1.0)
    with pytest.raises(DomainError):
        sp.evolve(ground, 0.5, -1.0)
    with pytest.raises(DomainError):
        sp.evolve_split(ground, 0.5, 0.0)


def test_split_identity(ground, rng, tau1):
    r = rng.uniform(0, 1, 200)
    t = tau1 * np.exp(rng.uniform(np.log(1e-3), np.log(1e4), 200))
    for ri, ti in zip(r, t):
        e, n = sp.evolve_split(ground, ri, ti)
        full = sp.evolve(ground, ri, ti)
        assert abs(e + n - full) <= 1e-12 * (abs(e) + abs(n))


def test_exponential_part_is_plain_pole_sum(ground, tau1):
    t = 2 * tau1
    e, _ = sp.evolve_split(ground, 0.4, t)
    u = ground.basis.u(0.4)
    direct = np.sum(ground.coeffs.c * u * np.exp(-1j * ground.basis.kappa ** 2 * t))
    assert abs(e - direct) < 1e-14


def test_nonexponential_part_small_at_two_lifetimes(ground, tau1):
    e, n = sp.evolve_split(ground, 0.5, 2 * tau1)
    assert abs(n) / abs(e) < 1e-2


def test_nonexponential_part_wins_at_long_times(ground, tau1):
    e, n = sp.evolve_split(ground, 0.5, 100 * tau1)
    assert abs(e) < abs(n)


def test_amplitude_routes_agree(ground, rng, tau1):
    t = tau1 * np.exp(rng.uniform(np.log(1e-2), np.log(1e3), 12))
    a1 = sp.survival_amplitude(ground, t)
    a2 = sp.survival_amplitude(ground, t, method="quadrature")
    assert np.max(np.abs(a1 - a2)) <= 1e-8
    with pytest.raises(ValueError):
        sp.survival_amplitude(ground, t, method="magic")


def test_amplitude_parts_add_up(ground, tau1):
    t = np.geomspace(0.1, 100, 9) * tau1
    e, n = sp.amplitude_parts(ground, t)
    assert np.allclose(e + n, sp.survival_amplitude(ground, t), rtol=1e-12, atol=0)


def test_matches_spectral_oracle_at_lifetime(ground, tau1):
    a_res = sp.survival_amplitude(ground, tau1)
    a_spec = spectral_amplitude(InitialState.box(1), ground.basis.potential, tau1, check=True)
    assert abs(a_res - a_spec) <= 1e-4
    # far tighter in practice
    assert abs(a_res - a_spec) <= 1e-12


def test_exponential_era_slope(ground, tau1):
    t = np.linspace(tau1, 5 * tau1, 60)
    s = sp.survival_probability(ground, t)
    slope = np.polyfit(t, np.log(s), 1)[0]
    assert slope == pytest.approx(-GAMMA_1, rel=0.02)


def test_survival_and_nonescape_close_in_exponential_era(ground, tau1):
    t = np.linspace(2 * tau1, 5 * tau1, 20)
    s = sp.survival_probability(ground, t)
    p = sp.nonescape_probability(ground, t)
    assert np.all(np.abs(p - s) / p < 0.05)
    assert np.all(p >= s)


def test_long_time_slopes(ground, tau1):
    t = np.geomspace(1e3, 1e4, 40) * tau1
    s = sp.survival_probability(ground, t)
    p = sp.nonescape_probability(ground, t)
    psi = np.abs(sp.evolve(ground, 0.5, t))
    assert tail_fit(t, s, (t[0], t[-1]))[0] == pytest.approx(-3, abs=0.15)
    assert tail_fit(t, p, (t[0], t[-1]))[0] == pytest.approx(-3, abs=0.15)
    assert tail_fit(t, psi, (t[0], t[-1]))[0] == pytest.approx(-1.5, abs=0.02)


def test_without_subtraction_tail_is_polluted(basis200, tau1):
    # the truncated sum leaves a t^-1/2 remainder in Psi
    raw = sp.Expansion.build(basis200, InitialState.box(1), subtract_leading=False)
    t = np.geomspace(1e4, 1e5, 20) * tau1
    psi = np.abs(sp.evolve(raw, 0.5, t))
    assert tail_fit(t, psi, (t[0], t[-1]))[0] > -1.2
    fixed = np.abs(sp.evolve(sp.Expansion.build(basis200, InitialState.box(1)), 0.5, t))
    assert tail_fit(t, fixed, (t[0], t[-1]))[0] == pytest.approx(-1.5, abs=1e-6)


def test_curves_are_bounded(ground):
    curves = sp.decay_curves(ground, sp.default_time_grid(ground, points=120))
    assert np.all(curves.S >= 0) and np.all(curves.S <= 1 + 1e-6)
    assert np.all(curves.P >= 0) and np.all(curves.P <= 1 + 1e-6)
    assert np.allclose(curves.S, np.abs(curves.A) ** 2)


def test_frames(ground, tau1):
    fr = sp.frames(ground, [0.0, tau1], np.linspace(0, 0.95, 5))
    assert len(fr) == 2
    assert fr[0].t == 0.0
    assert np.allclose(fr[0].psi, InitialState.box(1)(fr[0].r))
    assert np.all(np.isfinite(fr[1].psi))


def test_deterministic_across_blocking(ground, tau1):
    t = np.geomspace(0.01, 100, 50) * tau1
    whole = sp.survival_amplitude(ground, t)
    pieces = np.concatenate([sp.survival_amplitude(ground, t[i:i + 16]) for i in range(0, 50, 16)])
    assert np.array_equal(whole, pieces)
