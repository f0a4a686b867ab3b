import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ngtmst import oracle
from ngtmst.errors import DomainError, NegligibleProbability, NoMinimumInRange
from ngtmst.interferometer import (PhaseSensitivityRecord, find_optimal_squeezing,
                                   merit_thermal, merit_vacuum, parity_expectation,
                                   parity_expectation_tmst, parity_slope, phase_uncertainty,
                                   phase_uncertainty_tmst, sensitivity_record)
from ngtmst.ngstate import NGParams

# oracle parity (cutoff 100) on the heralded r=1, n_th=0.5, tau=0.9, m=n=1 state at phi=0.3
ORACLE_PARITY_11 = 0.5576354898352461

params = st.builds(NGParams, lam=st.floats(0, 0.9), kappa=st.floats(0.5, 2.0),
                   tau=st.floats(0.05, 1.0), m=st.integers(0, 2), n=st.integers(0, 2))


def test_parity_examples():
    assert parity_expectation(NGParams(math.tanh(1), 1.0, 1.0), 0.0) == pytest.approx(0.5, abs=1e-14)
    for phi in (0.0, 0.4, 2.0):
        assert parity_expectation(NGParams(0.0, 0.5, 1.0), phi) == pytest.approx(1.0, abs=1e-14)
    p = NGParams.from_physical(1.0, 0.5, 0.9, 1, 1)
    assert parity_expectation(p, 0.3) == pytest.approx(ORACLE_PARITY_11, abs=1e-9)


def test_parity_tmst_examples():
    assert parity_expectation_tmst(0.7, 0.5, 0.0) == pytest.approx(1.0)
    assert parity_expectation_tmst(math.tanh(1), 1.0, 0.0) == pytest.approx(0.5)
    assert parity_expectation_tmst(0.6, 1.0, 0.7) == pytest.approx(
        parity_expectation(NGParams(0.6, 1.0, 1.0), 0.7), abs=1e-12)
    with pytest.raises(DomainError):
        parity_expectation_tmst(1.0, 1.0, 0.1)


@given(params, st.floats(-4, 4))
def test_parity_bounded(p, phi):
    try:
        f = parity_expectation(p, phi)
    except NegligibleProbability:
        return
    assert abs(f) <= 1 + 1e-9


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0])
def test_general_path_reduces_to_tmst_parity(kappa):
    for lam in (0.1, 0.5, 0.9):
        for phi in np.linspace(0.05, 1.5, 7):
            got = parity_expectation(NGParams(lam, kappa, 1.0), phi)
            assert got == pytest.approx(parity_expectation_tmst(lam, kappa, phi), abs=1e-10)


@pytest.mark.parametrize("lam", [0.3, 0.6, math.tanh(1)])
def test_general_uncertainty_matches_closed_form(lam):
    for phi in np.linspace(0.001, 1.5, 12):
        got = phase_uncertainty(NGParams(lam, 1.0, 1.0), phi)
        want = phase_uncertainty_tmst(lam, 1.0, phi)
        assert got == pytest.approx(want, rel=1e-6)


def test_closed_form_uncertainty_is_error_propagation():
    lam, kappa, phi, h = 0.55, 1.2, 0.4, 1e-5
    f = lambda x: parity_expectation_tmst(lam, kappa, x)  # noqa: E731
    df = (f(phi + h) - f(phi - h)) / (2 * h)
    want = math.sqrt(1 - f(phi) ** 2) / abs(df)
    assert phase_uncertainty_tmst(lam, kappa, phi) == pytest.approx(want, rel=1e-8)


@given(st.floats(0.01, 0.95), st.floats(0.5, 2), st.floats(-3, 3))
def test_tmst_uncertainty_period_pi(lam, kappa, phi):
    assume(abs(math.sin(2 * phi)) > 1e-3)
    a = phase_uncertainty_tmst(lam, kappa, phi)
    b = phase_uncertainty_tmst(lam, kappa, phi + math.pi)
    assert a == pytest.approx(b, rel=1e-9)


def test_tmst_uncertainty_divergence_points():
    assert phase_uncertainty_tmst(0.5, 1.0, 0.0) == math.inf
    assert math.isinf(phase_uncertainty_tmst(0.0, 1.0, 0.3))


def test_uncertainty_infinite_where_flat():
    # at tau = 1 and lam = 0 the parity does not depend on phi
    assert phase_uncertainty(NGParams(0.0, 1.0, 1.0), 0.3) == math.inf


def test_slope_richardson_is_consistent():
    p = NGParams(0.5, 1.0, 0.8, 0, 1)
    a = parity_slope(p, 0.2, h=1e-4)
    b = parity_slope(p, 0.2, h=5e-4)
    assert a == pytest.approx(b, rel=1e-9)


@given(params, st.floats(0.01, 1.5))
def test_record_invariants(p, phi):
    try:
        rec = sensitivity_record(p, phi)
    except NegligibleProbability:
        return
    rec.validate()
    assert rec.delta_phi >= 0


def test_record_validate_rejects():
    p = NGParams(0.5, 1, 1)
    with pytest.raises(ArithmeticError):
        PhaseSensitivityRecord(p, 0.1, 1.5, 0.1, 1.0, 0.5).validate()
    with pytest.raises(ArithmeticError):
        PhaseSensitivityRecord(p, 0.1, 0.5, 0.1, 1.0, 0.0).validate()


def test_uncertainty_against_oracle():
    p = NGParams.from_physical(1.0, 0.5, 0.8, 0, 2)
    base = oracle.tmst_sectors(1.0, 0.5, oracle.DEFAULT_CUTOFF)
    state, _ = oracle.herald(base, 0.8, 0, 2)
    f = lambda x: oracle.parity_after_mzi(state, x + math.pi / 2)  # noqa: E731
    phi, h = 0.2, 1e-4
    d1 = (f(phi + h) - f(phi - h)) / (2 * h)
    d2 = (f(phi + h / 2) - f(phi - h / 2)) / h
    df = (4 * d2 - d1) / 3
    want = math.sqrt(1 - f(phi) ** 2) / abs(df)
    assert phase_uncertainty(p, phi) == pytest.approx(want, rel=1e-7)


def test_merit_thermal_zero_for_tmst():
    assert merit_thermal(NGParams(0.6, 1.0, 1.0, 1, 1), 0.3) == pytest.approx(0, abs=1e-6)
    assert merit_thermal(NGParams.from_physical(1.0, 0.5, 0.9, 0, 1), 0.01) > 0


def test_merit_vacuum():
    assert merit_vacuum(NGParams(0.6, 0.5, 1.0, 2, 2), 0.3) == pytest.approx(0, abs=1e-6)
    with pytest.raises(DomainError):
        merit_vacuum(NGParams(0.6, 1.0, 1.0), 0.3)
    # photon addition on TMSV in the high-transmissivity region
    assert merit_vacuum(NGParams.from_physical(0.5, 0.0, 0.95, 1, 0), 0.01) > 0


def test_merit_cross_checked_with_oracle():
    p = NGParams.from_physical(0.5, 0.5, 0.8, 1, 0)
    phi, h = 0.05, 1e-4
    base = oracle.tmst_sectors(0.5, 0.5, oracle.DEFAULT_CUTOFF)
    state, _ = oracle.herald(base, 0.8, 1, 0)
    f = lambda x: oracle.parity_after_mzi(state, x + math.pi / 2)  # noqa: E731
    g = lambda x: oracle.parity_after_mzi(base, x + math.pi / 2)  # noqa: E731

    def dphi(fun):
        d1 = (fun(phi + h) - fun(phi - h)) / (2 * h)
        d2 = (fun(phi + h / 2) - fun(phi - h / 2)) / h
        return math.sqrt(1 - fun(phi) ** 2) / abs((4 * d2 - d1) / 3)

    assert merit_thermal(p, phi) == pytest.approx(dphi(g) - dphi(f), rel=1e-6)


def test_all_operations_beat_tmst_at_working_point():
    base = phase_uncertainty_tmst(math.tanh(1), 1.0, 0.01)
    for m, n in [(0, 1), (0, 2), (1, 0), (2, 0), (1, 1), (2, 2)]:
        assert phase_uncertainty(NGParams.from_physical(1.0, 0.5, 0.9, m, n), 0.01) < base


def test_catalysis_beats_tmst_below_r_1_3():
    for r in (0.5, 1.0, 1.2):
        base = phase_uncertainty_tmst(math.tanh(r), 1.0, 0.01)
        for m in (1, 2):
            assert phase_uncertainty(NGParams.from_physical(r, 0.5, 0.9, m, m), 0.01) < base


def test_tmst_worse_than_tmsv():
    for lam in np.linspace(0.05, 0.9, 10):
        for phi in np.linspace(0.01, 0.5, 10):
            assert phase_uncertainty_tmst(lam, 1.0, phi) > phase_uncertainty_tmst(lam, 0.5, phi)


def test_pc_crossover_phase_is_reported():
    # phase where 1-PC stops beating TMST at r=1, tau=0.9; reported, not pinned
    phis = np.linspace(0.01, 1.5, 150)
    p = NGParams.from_physical(1.0, 0.5, 0.9, 1, 1)
    gain = [merit_thermal(p, x) for x in phis]
    assert gain[0] > 0
    assert any(np.isfinite(gain))


def test_find_optimal_squeezing_closed_form():
    r, d = find_optimal_squeezing(None, 0.01, kappa=0.5)
    assert r == pytest.approx(2.65, abs=0.05)
    assert d == pytest.approx(phase_uncertainty_tmst(math.tanh(r), 0.5, 0.01))
    r, _ = find_optimal_squeezing(None, 0.01, kappa=1.0)
    assert r == pytest.approx(2.80, abs=0.05)


def test_find_optimal_squeezing_template_path():
    r, _ = find_optimal_squeezing(NGParams(0.1, 0.5, 1.0), 0.01, grid=60)
    assert r == pytest.approx(2.65, abs=0.05)


def test_find_optimal_squeezing_edges():
    r, d = find_optimal_squeezing(None, 0.01, (1.0, 1.0), kappa=1.0)
    assert r == 1.0 and d == phase_uncertainty_tmst(math.tanh(1.0), 1.0, 0.01)
    with pytest.raises(NoMinimumInRange):
        find_optimal_squeezing(None, 0.01, (0.5, 1.5), kappa=1.0)
    with pytest.raises(DomainError):
        find_optimal_squeezing(None, 0.01, (0.0, 1.0), kappa=1.0)
    with pytest.raises(DomainError):
        find_optimal_squeezing(None, 0.01, (1.0, 5.0), kappa=1.0)


# oracle (cutoff 100) phase uncertainty of the one-photon catalysed r=1, n_th=0.5 state
# at tau=0.9999, phi=0.01, with the same difference stencil as the library
ORACLE_DPHI_PC1_NEAR_UNIT = 13.166061902100235


def test_catalysis_near_unit_transmissivity_against_oracle():
    p = NGParams.from_physical(1.0, 0.5, 0.9999, 1, 1)
    assert phase_uncertainty(p, 0.01) == pytest.approx(ORACLE_DPHI_PC1_NEAR_UNIT, rel=1e-8)


def test_catalysis_merit_vanishes_linearly():
    assert merit_thermal(NGParams.from_physical(1.0, 0.5, 1.0, 1, 1), 0.01) == pytest.approx(0, abs=1e-8)
    ratios = [merit_thermal(NGParams.from_physical(1.0, 0.5, 1 - t, 1, 1), 0.01) / t
              for t in (1e-4, 1e-5, 1e-6)]
    # D_T / (1 - tau) settles to a constant near 311
    assert ratios[1] == pytest.approx(ratios[2], rel=1e-3)
    assert ratios[0] == pytest.approx(ratios[2], rel=1e-2)
    assert 300 < ratios[2] < 320
