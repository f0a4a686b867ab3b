import math

import numpy as np
import pytest

from ngtmst import oracle as O
from ngtmst.errors import DomainError, NegligibleProbability, TailTooLarge
from ngtmst.gaussian import tmst_state
from ngtmst.interferometer import parity_expectation_tmst

SMALL = 14


@pytest.fixture(scope="module")
def tmst_1():
    return O.tmst_sectors(1.0, 0.5, O.DEFAULT_CUTOFF)


def test_thermal_density():
    assert np.allclose(O.thermal_density(0, 5).data, np.diag([1, 0, 0, 0, 0]))
    rho = O.thermal_density(0.5, 40).data.diagonal().real
    assert rho[0] == pytest.approx(2 / 3) and rho[1] == pytest.approx(2 / 9)
    assert np.allclose(rho[1:] / rho[:-1], 1 / 3)
    assert np.arange(40) @ rho == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(TailTooLarge):
        O.thermal_density(2.0, 10)
    with pytest.raises(DomainError):
        O.thermal_density(-1, 10)


def test_squeezer_identity_and_schmidt():
    assert np.allclose(O.two_mode_squeeze_unitary(0.0, 6).data, np.eye(36))
    U = O.two_mode_squeeze_unitary(1.0, 24, pad=16)
    lam = math.tanh(1.0)
    for k in range(8):
        assert U.amplitude((k, k), (0, 0)).real == pytest.approx(math.sqrt(1 - lam**2) * lam**k, abs=1e-12)
    # off-diagonal Schmidt terms vanish
    assert abs(U.amplitude((2, 1), (0, 0))) < 1e-14


def test_squeezer_unitary_on_low_subspace():
    N = 24
    U = O.two_mode_squeeze_unitary(0.3, N, pad=12).data
    n = np.add.outer(np.arange(N), np.arange(N)).ravel()
    low = n <= 4
    G = (U.conj().T @ U)[np.ix_(low, low)]
    assert np.abs(G - np.eye(low.sum())).max() < 1e-10


def _quadratures(cutoff):
    a = O.annihilation(cutoff)
    eye = np.eye(cutoff)
    q = (a + a.T) / math.sqrt(2)
    p = (a - a.T) / (1j * math.sqrt(2))
    return [np.kron(q, eye), np.kron(p, eye), np.kron(eye, q), np.kron(eye, p)]


def test_tmst_covariance_from_moments():
    N = 30
    st = O.tmst_sectors(0.5, 0.2, N)
    rho = st.to_dense().data
    xs = _quadratures(N)
    V = np.array([[0.5 * np.trace(rho @ (xi @ xj + xj @ xi)).real for xj in xs] for xi in xs])
    assert np.allclose(V, tmst_state(0.5, 0.2).V, atol=1e-8)


def test_sector_state_matches_dense_construction():
    r, n_th = 0.4, 0.3
    U = O.two_mode_squeeze_unitary(r, SMALL).data
    th = O._thermal_weights(n_th, SMALL)
    rho0 = np.kron(np.diag(th), np.diag(th))
    dense = U @ rho0 @ U.conj().T
    sectors = O.tmst_sectors(r, n_th, SMALL, check=False).to_dense().data
    # compare on the low-number corner where the truncated dense path is exact
    n = np.add.outer(np.arange(SMALL), np.arange(SMALL)).ravel()
    low = n <= 6
    assert np.abs(dense[np.ix_(low, low)] - sectors[np.ix_(low, low)]).max() < 1e-6


def test_density_invariants(tmst_1):
    assert tmst_1.tail < O.TAIL_EPS
    assert 1 - tmst_1.tail == pytest.approx(tmst_1.trace(), abs=1e-15)
    for B in tmst_1.blocks.values():
        assert np.allclose(B, B.T)
        assert np.linalg.eigvalsh(B).min() >= -1e-10


def test_tail_diagnosis():
    with pytest.raises(TailTooLarge):
        O.tmst_sectors(1.0, 0.5, 40)
    st = O.tmst_sectors(1.0, 0.5, 40, check=False)
    assert st.tail > 1e-6


def test_beamsplitter_unitary():
    assert np.allclose(O.beamsplitter_unitary(1.0, 5).data, np.eye(25))
    U = O.beamsplitter_unitary(0.5, 6)
    amps = [U.amplitude((1, 0), (1, 0)), U.amplitude((0, 1), (1, 0))]
    assert np.allclose(np.abs(amps), 1 / math.sqrt(2))
    Ntot = np.diag(np.add.outer(np.arange(6), np.arange(6)).ravel()).astype(complex)
    assert np.abs(U.data @ Ntot - Ntot @ U.data).max() < 1e-10
    low = np.add.outer(np.arange(6), np.arange(6)).ravel() <= 5
    G = (U.data.conj().T @ U.data)[np.ix_(low, low)]
    assert np.abs(G - np.eye(low.sum())).max() < 1e-12
    with pytest.raises(DomainError):
        O.beamsplitter_unitary(1.2, 4)


def test_beamsplitter_block_against_generator():
    # the block construction equals expm of the full truncated generator
    from scipy.linalg import expm

    N, tau = 8, 0.3
    theta = math.acos(math.sqrt(tau))
    a = O.annihilation(N)
    eye = np.eye(N)
    A, B = np.kron(a, eye), np.kron(eye, a)
    full = expm(theta * (A.T @ B - A @ B.T))
    low = np.add.outer(np.arange(N), np.arange(N)).ravel() < N
    assert np.allclose(full[np.ix_(low, low)], O.beamsplitter_unitary(tau, N).data[np.ix_(low, low)], atol=1e-12)


def test_herald_limits(tmst_1):
    st, prob = O.herald(tmst_1, 1.0, 2, 2)
    assert prob == pytest.approx(tmst_1.trace(), abs=1e-14)
    assert np.allclose(st.number_distribution(), tmst_1.normalized().number_distribution())
    with pytest.raises(NegligibleProbability):
        O.herald(tmst_1, 1.0, 0, 1)


def test_herald_probability_agrees(tmst_1):
    for m, n, tau in [(1, 1, 0.8), (0, 2, 0.5), (2, 0, 0.95)]:
        assert O.herald_probability(tmst_1, tau, m, n) == pytest.approx(O.herald(tmst_1, tau, m, n)[1], abs=1e-15)


def test_herald_dense_three_mode():
    # small-cutoff check of the sector heralding against an explicit 3-mode product
    N, tau, m, n = 10, 0.7, 1, 2
    st = O.tmst_sectors(0.3, 0.1, N, check=False)
    rho = st.to_dense().data.reshape(N, N, N, N)
    U = O.beamsplitter_unitary(tau, N).data.reshape(N, N, N, N)  # (mode 2, ancilla)
    # K[b', b] = <b', n| U |b, m>
    K = U[:, n, :, m]
    out = np.einsum("xb,abcd,yd->axcy", K, rho, K.conj())
    prob = np.einsum("abab->", out).real
    _, p_sec = O.herald(st, tau, m, n)
    assert p_sec == pytest.approx(prob, rel=1e-10)


def test_parity_after_mzi(tmst_1):
    vac = O.tmst_sectors(0.0, 0.0, 10)
    assert O.parity_after_mzi(vac, 0.77) == pytest.approx(1.0, abs=1e-14)
    for phi in (0.3, 1.1):
        got = O.parity_after_mzi(tmst_1, phi + math.pi / 2)
        assert got == pytest.approx(parity_expectation_tmst(math.tanh(1.0), 1.0, phi), abs=1e-9)
    st, _ = O.herald(tmst_1, 1.0, 1, 1)
    # agreement is limited by the truncation tail of the input
    assert O.parity_after_mzi(st, 1.9) == pytest.approx(O.parity_after_mzi(tmst_1, 1.9), abs=10 * tmst_1.tail)


def test_parity_dense_cross_check():
    # weak squeezing keeps the mass above total number N - 1 negligible, where
    # the cropped dense interferometer stops being unitary
    N = 12
    st = O.tmst_sectors(0.2, 0.02, N, check=False).normalized()
    rho = st.to_dense().data
    U = O.mzi_unitary(0.9, N).data
    par = np.kron(np.eye(N), np.diag((-1.0) ** np.arange(N)))
    want = np.trace(U @ rho @ U.conj().T @ par).real
    n = np.add.outer(np.arange(N), np.arange(N))
    cropped = st.number_distribution()[n >= N].sum()
    assert O.parity_after_mzi(st, 0.9) == pytest.approx(want, abs=2 * cropped + 1e-14)


def test_wigner_point_examples():
    vac = O.tmst_sectors(0.0, 0.0, 10)
    assert O.wigner_point(vac, np.zeros(4)) == pytest.approx(1 / math.pi**2)
    # |1>|0> at the origin: (-1/pi)(1/pi)
    one = O.SectorState(10, {1: _single(1, 0, 10)})
    assert O.wigner_point(one, np.zeros(4)) == pytest.approx(-1 / math.pi**2)


def _single(n1, n2, cutoff):
    d = n1 - n2
    B = np.zeros((cutoff - abs(d),) * 2)
    B[min(n1, n2), min(n1, n2)] = 1.0
    return B


def test_wigner_point_matches_gaussian(tmst_1):
    from ngtmst.gaussian import wigner_gaussian

    xi = np.array([0.2, -0.4, 0.5, 0.1])
    assert O.wigner_point(tmst_1, xi) == pytest.approx(wigner_gaussian(tmst_state(1.0, 0.5), xi), abs=1e-10)


def test_heralding_completeness(tmst_1):
    total = sum(O.herald_probability(tmst_1, 0.8, 1, n) for n in range(O.DEFAULT_CUTOFF))
    assert total >= 1 - 1e-8
