"""Collective-spin ferromagnet experiments on the sector-block backend.

The model is the anisotropic all-to-all ferromagnet

    H = -(J/n) sum_{i<j} (X_i X_j + gamma Y_i Y_j) + h_z sum_i Z_i,

prepared through a digitized adiabatic sweep from the transverse-field ground
state |+>^n:  H(t) = (1-s) H_0 + s H_1 with H_0 = -sum_i X_i, a linear ramp
s = t/T, and L equal steps each applied as an exact block exponential.  The
diagnostics are the ferromagnetic order parameter 1 - 4<(sum Z)^2>/n^2 and
the rescaled two-qubit concurrence (n-1) C, both with known closed-form
values in the n -> infinity limit for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import blocks
from .blocks import BlockOperator
from .evolve import CircuitLayer, SchurState, expectation, schrodinger_evolve

PAULI_LETTERS = ("I", "X", "Y", "Z")


@dataclass(frozen=True)
class LmgParams:
    j: float = 1.0
    gamma: float = 0.5
    hz: float = 0.0


@dataclass(frozen=True)
class ScheduleParams:
    """Digitized ramp: total time T split into L equal exact-exponential steps."""

    total_time: float
    steps: int

    @classmethod
    def default_for(cls, n: int) -> "ScheduleParams":
        return cls(total_time=10.0 * n, steps=4 * n)


def lmg_operator(params: LmgParams, n: int, sectors: list[int] | None = None) -> BlockOperator:
    """The model Hamiltonian as sector blocks.

    sum_{i<j} X_i X_j = n(n-1)/2 * sum_xx and sum_i Z_i = n * sum_z, so the
    normalized generators enter with coefficients -J(n-1)/2, -J gamma (n-1)/2
    and h_z n.
    """
    ms = sectors if sectors is not None else list(range(n // 2 + 1))
    blk = {}
    for m in ms:
        blk[m] = (
            -params.j * (n - 1) / 2.0 * blocks.generator_block("sum_xx", n, m)
            - params.j * params.gamma * (n - 1) / 2.0 * blocks.generator_block("sum_yy", n, m)
            + params.hz * n * blocks.generator_block("sum_z", n, m)
        )
    return BlockOperator(n, blk, name="lmg")


def transverse_field_operator(n: int, sectors: list[int] | None = None) -> BlockOperator:
    """H_0 = -sum_i X_i, whose ground state is |+>^n."""
    ms = sectors if sectors is not None else list(range(n // 2 + 1))
    return BlockOperator(
        n,
        {m: -float(n) * blocks.generator_block("sum_x", n, m) for m in ms},
        name="transverse_field",
    )


def aqc_layers(
    params: LmgParams,
    sched: ScheduleParams,
    n: int,
    sectors: list[int] | None = None,
):
    """Yield the L digitized-ramp layers, first-applied first.

    Step j (1-based) evolves under H(t_j) = (1-s_j) H_0 + s_j H_1 with
    s_j = j/L for time dt = T/L.
    """
    ms = sectors if sectors is not None else list(range(n // 2 + 1))
    h0 = transverse_field_operator(n, ms)
    h1 = lmg_operator(params, n, ms)
    dt = sched.total_time / sched.steps
    for j in range(1, sched.steps + 1):
        s = j / sched.steps
        ham = blocks.compose([(1.0 - s, h0), (s, h1)], name=f"ramp[{j}]")
        yield CircuitLayer(ham, dt, bandwidth=2)


def aqc_run(params: LmgParams, sched: ScheduleParams, n: int) -> SchurState:
    """Digitized adiabatic sweep from |+>^n; stays in the symmetric sector."""
    state = SchurState.all_plus(n)
    layers = aqc_layers(params, sched, n, sectors=[0])
    return schrodinger_evolve(list(layers), state)


# ---------------------------------------------------------------------------
# diagnostics


def order_parameter(state: SchurState) -> float:
    """Ferromagnetic order parameter 1 - (4/n^2) <(sum_i S^z_i)^2>.

    The collective magnetization is measured in spin-1/2 units (S^z = Z/2),
    so the fully polarized state gives 0 and the broken-symmetry ground state
    approaches 1 - hz^2 as n grows.  In Pauli terms
    (sum Z)^2 = n + n(n-1) sum_zz, of which this takes one quarter.
    """
    n = state.n
    sectors = [0] if state.is_pure_symmetric else sorted(state.tau)
    zz = BlockOperator(
        n, {m: blocks.generator_block("sum_zz", n, m) for m in sectors}
    )
    total_zz = n + n * (n - 1) * expectation(state, zz)
    return 1.0 - total_zz / (n * n)


def order_parameter_limit(hz: float) -> float:
    """Thermodynamic-limit order parameter max(0, 1 - hz^2) (gamma < 1, J=1)."""
    return max(0.0, 1.0 - hz * hz)


def pair_correlations(state: SchurState) -> np.ndarray:
    """4x4 table of <P_1 Q_2> over P,Q in (I,X,Y,Z) for a symmetric state."""
    n = state.n
    out = np.zeros((4, 4))
    for a, p in enumerate(PAULI_LETTERS):
        for b, q in enumerate(PAULI_LETTERS):
            if b < a:
                out[a, b] = out[b, a]  # twirl is symmetric under letter swap
            elif p == "I" and q == "I":
                out[a, b] = 1.0
            else:
                out[a, b] = expectation(state, blocks.two_local(p, q, n))
    return out


def two_qubit_rdm(state: SchurState) -> np.ndarray:
    """Reduced state of one qubit pair, rebuilt from pair correlations.

    Tiny negative eigenvalues from floating-point noise (above -1e-9) are
    clipped to zero and the state renormalized; anything below -1e-6 aborts.
    """
    corr = pair_correlations(state)
    paulis = [np.eye(2, dtype=complex)]
    paulis.append(np.array([[0, 1], [1, 0]], dtype=complex))
    paulis.append(np.array([[0, -1j], [1j, 0]], dtype=complex))
    paulis.append(np.array([[1, 0], [0, -1]], dtype=complex))
    rho = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        for b in range(4):
            rho += corr[a, b] * np.kron(paulis[a], paulis[b])
    rho /= 4.0
    rho = (rho + rho.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() < -1e-6:
        raise ValueError(f"reduced state has eigenvalue {vals.min()}, beyond noise")
    vals = np.clip(vals, 0.0, None)
    rho = (vecs * vals) @ vecs.conj().T
    return rho / np.trace(rho).real


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4) of a density matrix.

    l_i are the decreasing square roots of the eigenvalues of
    rho (Y ox Y) rho^* (Y ox Y).
    """
    yy = np.array(
        [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
    )
    r = rho @ yy @ rho.conj() @ yy
    vals = np.linalg.eigvals(r).real
    vals = np.sqrt(np.clip(vals, 0.0, None))
    vals.sort()
    return max(0.0, float(vals[3] - vals[2] - vals[1] - vals[0]))


def rescaled_concurrence(state: SchurState) -> float:
    """(n-1) times the pair concurrence; order-one for collective states."""
    return (state.n - 1) * concurrence(two_qubit_rdm(state))


def rescaled_concurrence_limit(gamma: float, hz: float) -> float:
    """Thermodynamic-limit rescaled concurrence (J=1, 0 <= gamma < 1, hz >= 0).

    Three branches meet continuously at hz = sqrt(gamma) and hz = 1; each
    boundary point is evaluated with its upper branch.
    """
    if hz >= 1.0:
        return 1.0 - math.sqrt((hz - 1.0) / (hz - gamma))
    if hz >= math.sqrt(gamma):
        return 1.0 - math.sqrt((1.0 - hz * hz) / (1.0 - gamma))
    return 1.0 - math.sqrt((1.0 - gamma) / (1.0 - hz * hz))
