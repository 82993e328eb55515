import numpy as np
import pytest

from resdecay import single_particle as sp
from resdecay import two_particle as tp
from resdecay.errors import DegenerateState, WindowTooShort
from resdecay.resonant_basis import InitialState
from resdecay.specfun import moshinsky_m


@pytest.fixture(scope="module")
def states(basis200):
    return {
        "fac": tp.TwoBodyState.factorized(basis200, 1),
        "sym": tp.TwoBodyState.entangled(basis200, 1, 2, +1),
        "anti": tp.TwoBodyState.entangled(basis200, 1, 2, -1),
    }


def test_degenerate_entangled_state(basis50):
    with pytest.raises(DegenerateState):
        tp.TwoBodyState.entangled(basis50, 2, 2, -1)
    with pytest.raises(ValueError):
        tp.TwoBodyState.entangled(basis50, 1, 2, 0)


def test_labels(states):
    assert states["fac"].label() == "factorized(box(1))"
    assert states["anti"].label() == "entangled-antisymmetric(box(1),box(2))"
    assert states["sym"].exchange_sign == 1 and states["anti"].exchange_sign == -1


def test_factorized_is_product(states, ground, rng, tau1):
    r1, r2 = rng.uniform(0, 1, 30), rng.uniform(0, 1, 30)
    t = 3.7 * tau1
    two = tp.evolve_two(states["fac"], r1, r2, t)
    one = sp.evolve(ground, r1, t) * sp.evolve(ground, r2, t)
    assert np.max(np.abs(two - one)) <= 1e-12 * np.max(np.abs(one))


def _literal_double_sum(basis, alpha, beta, sign, r1, r2, t):
    # sum over p, q in +-1..+-N of the symmetrized coefficient products
    cs = {s: sp.Expansion.build(basis, InitialState.box(s), subtract_leading=False).coeffs
          for s in (alpha, beta)}
    kap = np.concatenate([basis.kappa, -np.conj(basis.kappa)])
    u1 = np.concatenate([basis.u(r1), np.conj(basis.u(r1))])
    u2 = np.concatenate([basis.u(r2), np.conj(basis.u(r2))])
    c = {s: np.concatenate([cs[s].c, cs[s].mirror_c]) for s in cs}
    m = moshinsky_m(0.0, kap, t)
    total = 0
    for p in range(len(kap)):
        for q in range(len(kap)):
            coef = c[alpha][p] * c[beta][q] + sign * c[beta][p] * c[alpha][q]
            total += coef * u1[p] * u2[q] * m[p] * m[q]
    return total / np.sqrt(2)


@pytest.mark.parametrize("sign", [1, -1])
def test_entangled_matches_literal_double_sum(shell, sign):
    from resdecay.resonant_basis import ResonantBasis
    basis = ResonantBasis.build(shell, 8)
    state = tp.TwoBodyState.entangled(basis, 1, 2, sign, subtract_leading=False)
    for t in (0.2, 1.3, 9.0):
        lit = _literal_double_sum(basis, 1, 2, sign, 0.3, 0.7, t)
        eng = tp.evolve_two(state, 0.3, 0.7, t)
        assert abs(eng - lit) <= 1e-12 * max(1.0, abs(lit))


def test_exchange_symmetry_in_frames(states, tau1):
    r = np.linspace(0, 0.95, 9)
    for name, sign in (("fac", 1), ("sym", 1), ("anti", -1)):
        for fr in tp.frames_two(states[name], np.array([0.5, 2.0, 50.0]) * tau1, r):
            assert np.max(np.abs(fr.psi - sign * fr.psi.T)) <= 1e-12 * np.max(np.abs(fr.psi))


def test_antisymmetric_node(states, tau1):
    r = np.linspace(0.05, 0.95, 10)
    vals = tp.evolve_two(states["anti"], r, r, 2 * tau1)
    assert np.max(np.abs(vals)) <= 1e-12


def test_initial_normalization(states):
    for st in states.values():
        amp, s = tp.survival_two(st, 0.0)
        assert amp == pytest.approx(1.0, abs=1e-12)
        assert tp.nonescape_two(st, 0.0) == pytest.approx(1.0, abs=1e-8)


def test_factorization_identities(states, ground, tau1):
    t = np.geomspace(0.01, 1e3, 30) * tau1
    a2, s2 = tp.survival_two(states["fac"], t)
    a1 = sp.survival_amplitude(ground, t)
    assert np.max(np.abs(a2 - a1 ** 2)) <= 1e-10
    assert np.max(np.abs(s2 - np.abs(a1) ** 4)) <= 1e-10
    p2 = tp.nonescape_two(states["fac"], t)
    p1 = sp.nonescape_probability(ground, t, order=96)
    assert np.max(np.abs(p2 - p1 ** 2)) <= 1e-10


def test_survival_routes_agree(states, tau1):
    t = np.array([0.3, 1.0, 4.0]) * tau1
    for name in ("sym", "anti"):
        amp, _ = tp.survival_two(states[name], t)
        quad = tp.survival_two_quadrature(states[name], t)
        assert np.max(np.abs(amp - quad)) <= 1e-8


def test_cross_amplitude_for_complex_state(basis200, tau1):
    r = np.linspace(0, 1, 801)
    psi = InitialState.tabulated(r, np.sin(np.pi * r) * np.exp(1.5j * r))
    ex = sp.Expansion.build(basis200, psi)
    other = sp.Expansion.build(basis200, InitialState.box(2))
    from resdecay.quadrature import gauss_legendre
    x, w = gauss_legendre(128, 0, 1.0)
    t = 1.7 * tau1
    for ex_s, ex_u in ((ex, ex), (ex, other), (other, ex)):
        quad = np.sum(w * np.conj(ex_u.psi(x)) * sp.evolve(ex_s, x, t))
        assert abs(tp.cross_amplitude(ex_s, ex_u, t) - quad) <= 1e-8


def test_split_reconstructs(states, tau1):
    t = np.geomspace(0.1, 1e3, 25) * tau1
    for st in states.values():
        e, n = tp.evolve_two_split(st, 0.3, 0.6, t)
        full = tp.evolve_two(st, 0.3, 0.6, t)
        # the antisymmetric tail is a near-cancellation of two products, so
        # rounding is measured against the size of those products
        fa = [sp.evolve(st.alpha, r, t) for r in (0.3, 0.6)]
        fb = [sp.evolve(st.beta or st.alpha, r, t) for r in (0.3, 0.6)]
        scale = np.abs(fa[0] * fb[1]) + np.abs(fa[1] * fb[0])
        assert np.all(np.abs(e + n - full) <= 1e-12 * scale)


def test_onset_detection(states, tau1):
    t = np.geomspace(1, 1e3, 80) * tau1
    e, _ = tp.evolve_two_split(states["anti"], 0.3, 0.6, t)
    total = tp.evolve_two(states["anti"], 0.3, 0.6, t)
    onset = tp.post_exponential_onset(t, e, total)
    assert 20 * tau1 < onset < 100 * tau1
    assert tp.post_exponential_onset(t, total, total) == np.inf


def test_tail_slopes(states, tau1):
    t = np.geomspace(100, 1000, 40) * tau1
    win = (t[0], t[-1])
    sym = np.abs(tp.evolve_two(states["sym"], 0.3, 0.6, t))
    anti = np.abs(tp.evolve_two(states["anti"], 0.3, 0.6, t))
    assert tp.tail_fit(t, sym, win)[0] == pytest.approx(-3, abs=0.15)
    assert tp.tail_fit(t, anti, win)[0] == pytest.approx(-5, abs=0.2)
    assert tp.tail_fit(t, tp.survival_two(states["sym"], t)[1], win)[0] == pytest.approx(-6, abs=0.3)
    assert tp.tail_fit(t, tp.survival_two(states["anti"], t)[1], win)[0] == pytest.approx(-10, abs=0.5)


def test_tails_separate_by_two_decades(states, tau1):
    t = 1e4 * tau1
    assert tp.nonescape_two(states["sym"], t) > 100 * tp.nonescape_two(states["anti"], t)


def test_tail_fit_self_test():
    t = np.geomspace(1, 1e3, 50)
    slope, err = tp.tail_fit(t, 7 * t ** -3.0, (1, 1e3))
    assert slope == pytest.approx(-3, abs=1e-6)
    assert err < 1e-6


def test_tail_fit_window_checks():
    t = np.geomspace(1, 1e3, 50)
    with pytest.raises(WindowTooShort):
        tp.tail_fit(t, t ** -3.0, (10, 50))
    with pytest.raises(WindowTooShort):
        tp.tail_fit(t[:2], t[:2] ** -3.0, (1, 10))
    with pytest.raises(ValueError):
        tp.tail_fit(t, t ** -3.0, (1, 100), onset=5.0)
