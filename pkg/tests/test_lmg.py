import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helpers
from schursim import blocks, dense, evolve, lmg
from schursim.evolve import SchurState
from schursim.lmg import LmgParams, ScheduleParams


@pytest.mark.parametrize("n", [4, 6])
def test_hamiltonian_matches_dense(n):
    params = LmgParams(j=1.3, gamma=0.4, hz=0.8)
    op = lmg.lmg_operator(params, n)
    ref = helpers.dense_lmg(n, 1.3, 0.4, 0.8)
    for m, blk in op.blocks.items():
        np.testing.assert_allclose(blk, dense.project_block(ref, n, m), atol=1e-12)


def test_transverse_field_matches_dense():
    n = 5
    op = lmg.transverse_field_operator(n)
    ref = -sum(helpers.one_site("X", n, i) for i in range(n))
    for m, blk in op.blocks.items():
        np.testing.assert_allclose(blk, dense.project_block(ref, n, m), atol=1e-12)


def test_default_schedule():
    sched = ScheduleParams.default_for(12)
    assert sched.total_time == 120.0
    assert sched.steps == 48


def test_digitized_sweep_matches_dense_staircase():
    """The block sweep and an explicit dense staircase agree step for step."""
    n = 6
    params = LmgParams(j=1.0, gamma=0.5, hz=0.7)
    sched = ScheduleParams(total_time=12.0, steps=16)

    h0 = -sum(helpers.one_site("X", n, i) for i in range(n))
    h1 = helpers.dense_lmg(n, 1.0, 0.5, 0.7)
    dt = sched.total_time / sched.steps
    psi = dense.all_plus_state(n)
    for j in range(1, sched.steps + 1):
        s = j / sched.steps
        psi = dense.dense_evolve([(1 - s) * h0 + s * h1], [dt], psi)

    state = lmg.aqc_run(params, sched, n)
    for kind in ("sum_z", "sum_zz", "sum_xx"):
        ref = float(np.vdot(psi, helpers.dense_collective(kind, n) @ psi).real)
        got = evolve.expectation(state, blocks.generator(kind, n))
        assert abs(got - ref) < 1e-8, kind


def test_slow_sweep_reaches_ground_energy_n8():
    n = 8
    params = LmgParams(j=1.0, gamma=0.5, hz=2.0)
    ref = helpers.dense_lmg(n, 1.0, 0.5, 2.0)
    basis = dense.schur_basis_matrix(n, 0)
    ground = float(np.linalg.eigvalsh(basis.conj().T @ ref @ basis)[0])
    assert abs(ground - -16.019048204677677) < 1e-9

    state = lmg.aqc_run(params, ScheduleParams(total_time=160.0, steps=1280), n)
    energy = evolve.expectation(state, lmg.lmg_operator(params, n, sectors=[0]))
    assert abs(energy - ground) < 1e-3


def test_order_parameter_reference_states():
    # fully polarized: (sum Z)^2 saturates, no transverse structure
    assert abs(lmg.order_parameter(SchurState.all_zero(6))) < 1e-12
    # product |+>^n: only the diagonal n survives in (sum Z)^2
    assert abs(lmg.order_parameter(SchurState.all_plus(8)) - (1 - 1 / 8)) < 1e-12


def test_order_parameter_limit():
    assert lmg.order_parameter_limit(0.0) == 1.0
    assert abs(lmg.order_parameter_limit(0.6) - 0.64) < 1e-15
    assert lmg.order_parameter_limit(1.0) == 0.0
    assert lmg.order_parameter_limit(2.5) == 0.0


def test_pair_correlations_match_dense_partial_trace():
    n = 6
    state = lmg.aqc_run(LmgParams(1.0, 0.5, 0.6), ScheduleParams(10.0, 12), n)

    h0 = -sum(helpers.one_site("X", n, i) for i in range(n))
    h1 = helpers.dense_lmg(n, 1.0, 0.5, 0.6)
    psi = dense.all_plus_state(n)
    for j in range(1, 13):
        s = j / 12
        psi = dense.dense_evolve([(1 - s) * h0 + s * h1], [10.0 / 12], psi)
    rdm_dense = dense.partial_trace_two(np.outer(psi, psi.conj()), n)

    np.testing.assert_allclose(lmg.two_qubit_rdm(state), rdm_dense, atol=1e-8)

    corr = lmg.pair_correlations(state)
    np.testing.assert_allclose(corr, corr.T, atol=1e-12)
    assert corr[0, 0] == 1.0


def test_two_qubit_rdm_of_product_states():
    rdm = lmg.two_qubit_rdm(SchurState.all_zero(5))
    expect = np.zeros((4, 4))
    expect[0, 0] = 1.0
    np.testing.assert_allclose(rdm, expect, atol=1e-10)

    rdm = lmg.two_qubit_rdm(SchurState.all_plus(5))
    plus2 = np.full(4, 0.5)
    np.testing.assert_allclose(rdm, np.outer(plus2, plus2), atol=1e-10)


def test_concurrence_reference_values():
    singlet = dense.singlet_vector()
    assert abs(lmg.concurrence(np.outer(singlet, singlet)) - 1.0) < 1e-12

    product = np.zeros((4, 4))
    product[0, 0] = 1.0
    assert lmg.concurrence(product) == 0.0

    # Werner state: concurrence max(0, (3p - 1) / 2)
    for p in (0.2, 0.5, 0.9):
        rho = p * np.outer(singlet, singlet) + (1 - p) * np.eye(4) / 4
        assert abs(lmg.concurrence(rho) - max(0.0, (3 * p - 1) / 2)) < 1e-12


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=40, deadline=None)
def test_concurrence_bounded_on_random_states(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    c = lmg.concurrence(rho)
    assert 0.0 <= c <= 1.0 + 1e-12


def test_rescaled_concurrence_limit_branches():
    # low field: 1 - sqrt((1 - gamma) / (1 - hz^2))
    assert abs(lmg.rescaled_concurrence_limit(0.5, 0.5) - (1 - math.sqrt(0.5 / 0.75))) < 1e-15
    # high field: same closed form as the criterion's 1 - sqrt(1 / 1.5) spot value
    assert abs(lmg.rescaled_concurrence_limit(0.5, 2.0) - (1 - math.sqrt(1.0 / 1.5))) < 1e-15
    assert lmg.rescaled_concurrence_limit(0.5, 1.0) == 1.0
    # the branches meet continuously at sqrt(gamma) and at 1; the square-root
    # cusp there means the two-sided gap closes like sqrt(eps)
    for gamma, edge in [(0.5, math.sqrt(0.5)), (0.5, 1.0), (0.8, math.sqrt(0.8))]:
        lo = lmg.rescaled_concurrence_limit(gamma, edge - 1e-9)
        hi = lmg.rescaled_concurrence_limit(gamma, edge + 1e-9)
        assert abs(lo - hi) < 1e-4, (gamma, edge)


def test_rescaled_concurrence_tracks_limit_at_moderate_size():
    state = lmg.aqc_run(LmgParams(1.0, 0.5, 2.0), ScheduleParams.default_for(64), 64)
    got = lmg.rescaled_concurrence(state)
    assert abs(got - lmg.rescaled_concurrence_limit(0.5, 2.0)) < 0.05


def test_order_parameter_gamma_independence():
    """Away from the critical point the order parameter forgets gamma."""
    n = 256
    for hz in (0.5, 1.5):
        vals = []
        for gamma in (0.2, 0.8):
            state = lmg.aqc_run(LmgParams(1.0, gamma, hz), ScheduleParams.default_for(n), n)
            vals.append(lmg.order_parameter(state))
        assert abs(vals[0] - vals[1]) <= 0.02, hz
