import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from declab import dicke, qcore
from declab.errors import CutoffTooSmall, DimensionTooLarge, FitFailed, ValidationError

P = dicke.DickeParams(omega=1.0, g=0.2, n_atoms=4, fock_cutoff=32)
PERIOD = 2 * math.pi


def test_params_validation():
    with pytest.raises(ValidationError, match="g must be positive"):
        dicke.DickeParams(omega=1, g=-0.1, n_atoms=2)
    with pytest.raises(ValidationError):
        dicke.DickeParams(omega=0, g=0.1, n_atoms=2)
    with pytest.raises(ValidationError):
        dicke.DickeParams(omega=1, g=0.1, n_atoms=2, delta=-1)


def test_radiation_state_normalization():
    with pytest.raises(ValidationError):
        dicke.RadiationState(np.array([1.0, 1.0]))
    st_ = dicke.RadiationState.coherent(1.5, 40)
    assert np.sum(np.abs(st_.coefficients) ** 2) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("s, ok", [(4, True), (2, True), (-4, True), (3, False), (6, False)])
def test_sector(s, ok):
    if ok:
        assert dicke.check_sector(s, 4) == s
    else:
        with pytest.raises(ValidationError):
            dicke.check_sector(s, 4)


def test_hamiltonian_hermitian_and_hf_identity():
    p = P.with_(delta=0.7, fock_cutoff=6)
    h = dicke.build_dicke_hamiltonian(p)
    assert np.max(np.abs(h - h.conj().T)) < 1e-12
    np.testing.assert_array_equal(dicke.build_hf_hamiltonian(p), dicke.build_dicke_hamiltonian(p.with_(delta=0.0)))


def test_hamiltonian_dimension_guard():
    with pytest.raises(DimensionTooLarge):
        dicke.build_dicke_hamiltonian(dicke.DickeParams(1, 0.1, 64, fock_cutoff=512))


def test_rabi_splitting_at_resonance():
    p = dicke.DickeParams(omega=1.0, g=0.01, n_atoms=1, delta=1.0, fock_cutoff=4)
    e = np.linalg.eigvalsh(dicke.build_dicke_hamiltonian(p))
    # one excitation: states |1,down> and |0,up> at energy 1/2 split by 2g
    pair = np.sort(e[np.abs(e - 0.5) < 0.1])
    assert pair[1] - pair[0] == pytest.approx(2 * p.g, rel=1e-3)


def test_hf_commutes_with_collective_sigma1():
    p = P.with_(fock_cutoff=8)
    jx, _ = qcore.collective_spin(qcore.CollectiveSpinSpace(p.n_atoms))
    s1 = qcore.tensor(np.eye(p.fock_cutoff + 1), 2 * jx)
    h = dicke.build_hf_hamiltonian(p)
    assert np.max(np.abs(h @ s1 - s1 @ h)) < 1e-12


def test_hf_spectrum_displaced_oscillator():
    p = dicke.DickeParams(omega=1.3, g=0.2, n_atoms=2, fock_cutoff=60)
    e = np.linalg.eigvalsh(dicke.build_hf_hamiltonian(p))
    for s in (2, 0, -2):
        shift = s**2 * p.g**2 / p.omega
        for n in range(5):
            target = n * p.omega - shift
            assert np.min(np.abs(e - target)) < 1e-9


def test_xi_values():
    assert dicke.xi(0.0, 4, P) == 0
    assert dicke.xi(PERIOD, 4, P) == pytest.approx((4 * 0.2) ** 2 * PERIOD, rel=1e-14)
    t = np.linspace(0, 7, 11)
    np.testing.assert_allclose(dicke.xi(t, 4, P), 4 * dicke.xi(t, 2, P), rtol=1e-14)


def test_alpha_values():
    assert dicke.alpha(0.0, 4, P) == 0
    assert dicke.alpha(math.pi, 4, P) == pytest.approx(2 * 4 * 0.2, abs=1e-14)
    t = np.linspace(0, 7, 50)
    np.testing.assert_allclose(np.abs(dicke.alpha(t, 4, P)) ** 2, 2 * (4 * 0.2) ** 2 * (1 - np.cos(t)), atol=1e-14)


def test_displacement_matrix_is_unitary_block():
    d = dicke.displacement_matrix(0.4 - 0.3j, 80)
    np.testing.assert_allclose((d.conj().T @ d)[:20, :20], np.eye(20), atol=1e-12)


def test_displacement_matrix_matches_expm():
    from scipy.linalg import expm

    a, ad = qcore.fock_ladder(qcore.TruncatedFockSpace(120))
    al = 0.7 + 0.2j
    ref = expm(al * ad - np.conj(al) * a)[:10, :10]
    np.testing.assert_allclose(dicke.displacement_matrix(al, 10), ref, atol=1e-12)


def test_vacuum_modulus_equals_envelope():
    t = np.linspace(0, 2 * PERIOD, 97)
    amp = dicke.analytic_expectation(t, dicke.RadiationState.vacuum(32), P)
    np.testing.assert_allclose(np.abs(amp), dicke.envelope(t, P), atol=1e-12)


def test_periodic_modulus():
    t = np.linspace(0, PERIOD, 31)
    state = dicke.RadiationState.coherent(0.8, 40)
    a = dicke.analytic_expectation(t, state, P)
    b = dicke.analytic_expectation(t + PERIOD, state, P)
    np.testing.assert_allclose(np.abs(a), np.abs(b), atol=1e-12)


def test_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        dicke.analytic_expectation(1.0, dicke.RadiationState.number(31, 32), P)


def test_oracle_one_photon():
    t = np.linspace(0, PERIOD, 50)
    state = dicke.RadiationState.number(1, 32)
    exact = dicke.exact_expectation(t, state, P)
    assert not exact.truncation_suspect
    assert np.max(np.abs(dicke.analytic_expectation(t, state, P) - exact.amplitudes)) < 1e-8


@pytest.mark.parametrize("s", [2, 0, -4])
def test_oracle_other_sectors(s):
    t = np.linspace(0, PERIOD, 20)
    state = dicke.RadiationState.coherent(0.5, 32)
    exact = dicke.exact_expectation(t, state, P, s=s)
    assert np.max(np.abs(dicke.analytic_expectation(t, state, P, s=s) - exact.amplitudes)) < 1e-8


def test_truncation_flag_and_growth():
    p = dicke.DickeParams(omega=1, g=0.3, n_atoms=12, fock_cutoff=64)
    t = np.linspace(0, PERIOD, 9)
    state = dicke.RadiationState.vacuum(64)
    assert dicke.exact_expectation(t, state, p).truncation_suspect
    grown = dicke.exact_expectation(t, state, p, grow_cutoff=True)
    assert not grown.truncation_suspect and grown.propagation_cutoff == 128
    assert np.max(np.abs(grown.amplitudes - dicke.analytic_expectation(t, state, p))) < 1e-8


def test_envelope_values():
    assert dicke.envelope(0.0, P) == 1
    p = dicke.DickeParams(omega=1, g=0.1, n_atoms=2)
    assert dicke.envelope(math.pi, p) == pytest.approx(math.exp(-0.08), rel=1e-14)
    t = 1e-3
    assert dicke.envelope(t, p) == pytest.approx(math.exp(-((2 * 0.1) ** 2) / 2 * t**2), rel=1e-9)


def test_short_time_gaussian():
    p = dicke.DickeParams(omega=1, g=0.1, n_atoms=10)
    t = 1e-3 / (p.n_atoms * p.g)
    f = abs(dicke.analytic_expectation(t, dicke.RadiationState.vacuum(16), p)) ** 2
    assert -math.log(f) / t**2 == pytest.approx((p.n_atoms * p.g) ** 2, rel=1e-3)


def test_recurrence_width():
    assert dicke.recurrence_width(dicke.DickeParams(1, 0.1, 10)) == pytest.approx(1.0)
    assert dicke.recurrence_width(dicke.DickeParams(1, 0.1, 20)) == pytest.approx(0.5)


@pytest.mark.parametrize("n", [50, 100, 400])
def test_fwhm_closed_form_large_ng(n):
    p = dicke.DickeParams(omega=1, g=0.1, n_atoms=n)
    assert dicke.revival_fwhm(p) == pytest.approx(dicke.FWHM_PER_SIGMA / (n * p.g), rel=0.01)


def test_fwhm_needs_collapse():
    with pytest.raises(FitFailed):
        dicke.revival_fwhm(dicke.DickeParams(1, 0.1, 4))


def test_collapse_study():
    table = dicke.collapse_study([4, 8, 16, 32], g=0.3)
    assert -1.05 <= table.meta["exponent"] <= -0.95
    w = table.column("fitted_width")
    assert np.all(np.diff(w) < 0)
    with pytest.raises(FitFailed):
        dicke.collapse_study([8], g=0.3)


def test_delta_robustness():
    t = np.array([0.0, 1.0, PERIOD])
    p = dicke.DickeParams(omega=1, g=0.3, n_atoms=6, fock_cutoff=64)
    zero = dicke.delta_robustness(p, t)
    assert np.max(zero.column("abs_deviation")) < 1e-10
    p = p.with_(delta=0.1)
    # first collapse sits near t = pi, first revival at 2 pi
    dev = dicke.delta_robustness(p, np.array([0.0, math.pi, PERIOD])).column("abs_deviation")
    assert dev[0] == pytest.approx(0, abs=1e-14)
    assert dev[1] < dev[2]


@given(n=st.integers(1, 40), g=st.floats(0.01, 0.5), t=st.floats(0, 20))
def test_vacuum_bounded_by_one(n, g, t):
    p = dicke.DickeParams(omega=1, g=g, n_atoms=n)
    amp = dicke.analytic_expectation(t, dicke.RadiationState.vacuum(8), p)
    assert abs(amp) <= 1 + 1e-12


@given(beta=st.complex_numbers(max_magnitude=1.5), t=st.floats(0, 7))
def test_coherent_bounded_by_one(beta, t):
    amp = dicke.analytic_expectation(t, dicke.RadiationState.coherent(beta, 40), P)
    assert abs(amp) <= 1 + 1e-10


def test_weak_coupling_has_no_half_maximum():
    # N g / w < 1 keeps the whole envelope above 1/2 for small N
    with pytest.raises(FitFailed):
        dicke.collapse_study([4, 8, 16, 32], g=0.1)
