"""Cross-check suite pitting the sector-block engine against dense brute force.

Every check compares an n-qubit quantity computed through the block machinery
with an independent construction on the full 2^n-dimensional space (or an
exact combinatorial identity) and reports a residual with its tolerance.
Everything here stays at n <= 8 where the dense side is tractable.

The suite powers the `verify` CLI command and the structural-invariants
acceptance test.  `fault` deliberately corrupts one computation so callers
can confirm the suite actually fails when the engine is wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dense
from .blocks import (
    GENERATOR_KINDS,
    BlockOperator,
    generator,
    twirl_block,
    two_local,
)
from .evolve import (
    CircuitLayer,
    SchurState,
    eigendecompose,
    expectation,
    heisenberg_evolve,
    schrodinger_evolve,
    unitary_block,
)
from .irreps import (
    IrrepLabel,
    WeightVector,
    commutant_dim,
    enumerate_irreps,
    enumerate_weight_vectors,
    total_dimension,
)
from .shadows import (
    EulerAngles,
    SymmetrizedSnapshot,
    channel_matrix,
    measurement_vector,
    rotated_hamming_distribution,
    rotation_block,
    word_norm_factor,
)

FAULT_MODES = ("global-y-sign",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
        }


def _random_equivariant(n: int, rng: np.random.Generator) -> BlockOperator:
    terms = {}
    for lam in enumerate_irreps(n):
        d = lam.block_dim
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        terms[lam.m] = (g + g.conj().T) / 2.0
    return BlockOperator(n, terms, name="random")


def _random_circuit(n: int, rng: np.random.Generator, layers: int = 3):
    """Matched pair: block-level circuit and its dense counterpart."""
    block_layers = []
    dense_hams = []
    times = []
    for _ in range(layers):
        kinds = rng.choice(GENERATOR_KINDS, size=2, replace=False)
        coeffs = rng.uniform(-1.0, 1.0, size=2)
        op_blocks = {}
        ham_dense = np.zeros((2**n, 2**n), dtype=complex)
        for kind, c in zip(kinds, coeffs):
            op = generator(str(kind), n)
            for m in op.sectors:
                op_blocks[m] = op_blocks.get(m, 0) + c * op.block(m)
            ham_dense = ham_dense + c * _dense_generator(str(kind), n)
        t = float(rng.uniform(-2.0, 2.0))
        block_layers.append(CircuitLayer(BlockOperator(n, op_blocks), t))
        dense_hams.append(ham_dense)
        times.append(t)
    return block_layers, dense_hams, times


def _dense_generator(kind: str, n: int) -> np.ndarray:
    """Dense counterpart of a mean collective generator."""
    letters = {
        "sum_x": "X", "sum_y": "Y", "sum_z": "Z",
        "sum_xx": "XX", "sum_yy": "YY", "sum_zz": "ZZ",
        "global_x": "X" * n, "global_y": "Y" * n, "global_z": "Z" * n,
    }[kind]
    if kind.startswith("global"):
        return dense.pauli_string_dense(letters)
    if len(letters) == 1:
        out = sum(
            dense.pauli_string_dense("I" * i + letters + "I" * (n - 1 - i))
            for i in range(n)
        )
        return out / n
    out = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            word = ["I"] * n
            word[i], word[j] = letters[0], letters[1]
            out = out + dense.pauli_string_dense("".join(word))
    return out / (n * (n - 1))


def _block_err(op: BlockOperator, dense_mat: np.ndarray, n: int) -> float:
    worst = 0.0
    for m in op.sectors:
        ref = dense.project_block(dense_mat, n, m)
        worst = max(worst, float(np.max(np.abs(op.block(m) - ref))))
    return worst


# -- individual checks --------------------------------------------------------


def check_dimension_sums(n_max: int = 64) -> CheckResult:
    worst = 0
    for n in range(1, n_max + 1):
        worst = max(worst, abs(total_dimension(n) - 2**n))
        count = len(enumerate_weight_vectors(n))
        worst = max(worst, abs(count - commutant_dim(n)))
    return CheckResult("dimension-sums", float(worst), 0.0)


def check_generator_blocks(n: int, fault: str | None = None) -> CheckResult:
    worst = 0.0
    for kind in GENERATOR_KINDS:
        op = generator(kind, n)
        if fault == "global-y-sign" and kind == "global_y":
            op = BlockOperator(n, {m: -op.block(m) for m in op.sectors})
        worst = max(worst, _block_err(op, _dense_generator(kind, n), n))
    return CheckResult(f"generator-blocks-dense-n{n}", worst, 1e-10)


def check_two_local(n: int) -> CheckResult:
    worst = 0.0
    for p, q in (("X", "X"), ("X", "Z"), ("Z", "Y")):
        op = two_local(p, q, n)
        ref = np.zeros((2**n, 2**n), dtype=complex)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                word = ["I"] * n
                word[i], word[j] = p, q
                ref = ref + dense.pauli_string_dense("".join(word))
        worst = max(worst, _block_err(op, ref / (n * (n - 1)), n))
    return CheckResult(f"two-local-dense-n{n}", worst, 1e-10)


def check_twirl_blocks(n: int, rng: np.random.Generator) -> CheckResult:
    kvecs = [kv for kv in enumerate_weight_vectors(n) if kv.k <= 3]
    worst = 0.0
    for kv in kvecs:
        ref = dense.twirl(dense.symmetrized_pauli_dense(n, kv), n)
        for m in range(n // 2 + 1):
            blk = twirl_block(n, kv, m)
            worst = max(
                worst, float(np.max(np.abs(blk - dense.project_block(ref, n, m))))
            )
    return CheckResult(f"twirl-blocks-dense-n{n}", worst, 1e-10)


def check_twirl_idempotence(n: int, rng: np.random.Generator) -> CheckResult:
    g = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
    once = dense.twirl(g, n)
    twice = dense.twirl(once, n)
    return CheckResult(
        f"twirl-idempotence-n{n}", float(np.max(np.abs(twice - once))), 1e-12
    )


def check_schur_orthonormality(n: int) -> CheckResult:
    cols = []
    for m in range(n // 2 + 1):
        cols.append(dense.schur_basis_matrix(n, m))
    basis = np.hstack(cols)
    gram = basis.conj().T @ basis
    return CheckResult(
        f"schur-orthonormality-n{n}",
        float(np.max(np.abs(gram - np.eye(gram.shape[0])))),
        1e-12,
    )


def check_unitarity(n: int, rng: np.random.Generator) -> CheckResult:
    op = _random_equivariant(n, rng)
    worst = 0.0
    for m in op.sectors:
        u = unitary_block(eigendecompose(op.block(m)), t=0.7)
        d = u.shape[0]
        worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(d)))))
    return CheckResult(f"unitary-blocks-n{n}", worst, 1e-12)


def check_evolution_preservation(n: int, rng: np.random.Generator) -> CheckResult:
    layers, _, _ = _random_circuit(n, rng)
    psi0 = SchurState.all_plus(n)
    psi1 = schrodinger_evolve(layers, psi0)
    worst = abs(float(np.linalg.norm(psi1.psi)) - 1.0)

    tau0 = {}
    for lam in enumerate_irreps(n):
        d = lam.block_dim
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        tau0[lam.m] = g @ g.conj().T
    total = sum(np.trace(b).real for b in tau0.values())
    tau0 = {m: b / total for m, b in tau0.items()}
    mixed0 = SchurState.block_mixed(n, tau0)
    mixed1 = schrodinger_evolve(layers, mixed0)
    trace1 = sum(np.trace(b).real for b in mixed1.tau.values())
    worst = max(worst, abs(trace1 - 1.0))
    return CheckResult(f"evolution-preservation-n{n}", worst, 1e-12)


def check_heisenberg_spectrum(n: int, rng: np.random.Generator) -> CheckResult:
    layers, _, _ = _random_circuit(n, rng)
    obs = _random_equivariant(n, rng)
    evolved = heisenberg_evolve(layers, obs)
    worst = 0.0
    for m in obs.sectors:
        before = np.sort(np.linalg.eigvalsh(obs.block(m)))
        after = np.sort(np.linalg.eigvalsh(evolved.block(m)))
        worst = max(worst, float(np.max(np.abs(before - after))))
    return CheckResult(f"heisenberg-spectrum-n{n}", worst, 1e-10)


def check_hamming_distribution(n: int, rng: np.random.Generator) -> CheckResult:
    import scipy.linalg as sla

    psi = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    psi /= np.linalg.norm(psi)
    state = SchurState.pure_symmetric(n, psi)
    angles = EulerAngles(
        rng.uniform(0, 2 * math.pi),
        math.acos(1 - 2 * rng.random()),
        rng.uniform(0, 2 * math.pi),
    )
    probs = rotated_hamming_distribution(state, angles)

    tz = n * _dense_generator("sum_z", n)
    ty = n * _dense_generator("sum_y", n)
    w = (
        sla.expm(-0.5j * angles.theta3 * tz)
        @ sla.expm(-0.5j * angles.theta2 * ty)
        @ sla.expm(-0.5j * angles.theta1 * tz)
    )
    vec = sum(psi[q] * dense.dicke_vector(n, q) for q in range(n + 1))
    amp = w @ vec
    pops = np.array([bin(i).count("1") for i in range(2**n)])
    ref = np.array([np.sum(np.abs(amp[pops == h]) ** 2) for h in range(n + 1)])
    return CheckResult(
        f"hamming-distribution-dense-n{n}", float(np.max(np.abs(probs - ref))), 1e-9
    )


def check_measurement_vector(n: int, rng: np.random.Generator) -> CheckResult:
    angles = EulerAngles(
        rng.uniform(0, 2 * math.pi),
        math.acos(1 - 2 * rng.random()),
        rng.uniform(0, 2 * math.pi),
    )
    kvecs = enumerate_weight_vectors(n)
    worst = 0.0
    for h in range(n + 1):
        closed = measurement_vector(n, SymmetrizedSnapshot(angles, h))
        direct = np.zeros(len(kvecs))
        for i, kv in enumerate(kvecs):
            acc = 0.0 + 0.0j
            for m in range(n // 2 + 1):
                q0 = h - m
                d = n - 2 * m + 1
                if not 0 <= q0 < d:
                    continue
                w = rotation_block(n, m, angles)
                basis = word_norm_factor(n, kv) * twirl_block(n, kv, m)
                val = w[q0, :] @ basis @ w[q0, :].conj()
                acc += IrrepLabel(n, m).multiplicity * val
            direct[i] = acc.real
        worst = max(worst, float(np.max(np.abs(closed - direct))))
    return CheckResult(f"measurement-vector-direct-n{n}", worst, 1e-10)


def check_channel_parity(n: int) -> CheckResult:
    chan = channel_matrix(n)
    worst = 0.0
    for i, kv in enumerate(chan.kvecs):
        for j, kw in enumerate(chan.kvecs):
            if any((a + b) % 2 for a, b in zip(kv.as_tuple(), kw.as_tuple())):
                worst = max(worst, abs(float(chan.matrix[i, j])))
    expected_classes = 8 if n >= 3 else 7 if n == 2 else 4
    classes = {(kv.kx % 2, kv.ky % 2, kv.kz % 2) for kv in chan.kvecs}
    worst = max(worst, float(abs(len(classes) - expected_classes)))
    return CheckResult(f"channel-parity-n{n}", worst, 0.0)


def check_channel_quadrature(n: int) -> CheckResult:
    """Closed-form channel vs exact quadrature of its defining average.

    The average over collective rotations of sum_h v v^T is a trig polynomial
    in theta1 and, once odd terms integrate away, a polynomial in cos(theta2),
    so a uniform grid times Gauss-Legendre nodes integrates it exactly.
    """
    kvecs = enumerate_weight_vectors(n)
    dim = len(kvecs)
    grid1 = 4 * n + 9
    t1s = 2.0 * np.pi * np.arange(grid1) / grid1
    us, wts = np.polynomial.legendre.leggauss(2 * n + 5)
    acc = np.zeros((dim, dim))
    for u, wt in zip(us, wts):
        t2 = math.acos(float(u))
        for t1 in t1s:
            ang = EulerAngles(float(t1), t2, 0.0)
            rows = np.stack(
                [
                    measurement_vector(n, SymmetrizedSnapshot(ang, h))
                    for h in range(n + 1)
                ]
            )
            acc += (wt / 2.0) / grid1 * (rows.T @ rows)
    ref = channel_matrix(n).matrix
    return CheckResult(
        f"channel-quadrature-n{n}", float(np.max(np.abs(acc - ref))), 1e-12
    )


def check_expectation_dense(n: int, rng: np.random.Generator) -> CheckResult:
    layers, hams, times = _random_circuit(n, rng)
    obs = generator("sum_zz", n)
    worst = 0.0

    psi0 = SchurState.all_plus(n)
    val = expectation(schrodinger_evolve(layers, psi0), obs)
    plus = dense.all_plus_state(n)
    ref = dense.dense_expectation(
        hams, times, np.outer(plus, plus.conj()), _dense_generator("sum_zz", n)
    )
    worst = max(worst, abs(val - ref))

    val_h = expectation(psi0, heisenberg_evolve(layers, obs))
    worst = max(worst, abs(val_h - ref))
    return CheckResult(f"circuit-dense-n{n}", worst, 1e-8)


def run_suite(
    ns: tuple[int, ...] = (2, 3, 4, 5, 6),
    seed: int = 7,
    fault: str | None = None,
) -> list[CheckResult]:
    """Run every cross-check; returns one result per (check, n) pair."""
    if fault is not None and fault not in FAULT_MODES:
        raise ValueError(f"unknown fault mode {fault!r}, know {FAULT_MODES}")
    if max(ns) > dense.MAX_DENSE_QUBITS:
        raise ValueError(f"dense cross-checks capped at n={dense.MAX_DENSE_QUBITS}")
    rng = np.random.default_rng(seed)
    results = [check_dimension_sums()]
    for n in ns:
        results.append(check_generator_blocks(n, fault=fault))
        results.append(check_two_local(n))
        results.append(check_twirl_blocks(n, rng))
        results.append(check_twirl_idempotence(n, rng))
        results.append(check_schur_orthonormality(n))
        results.append(check_unitarity(n, rng))
        results.append(check_evolution_preservation(n, rng))
        results.append(check_heisenberg_spectrum(n, rng))
        results.append(check_expectation_dense(n, rng))
        if n <= 4:
            results.append(check_hamming_distribution(n, rng))
            results.append(check_measurement_vector(n, rng))
            results.append(check_channel_parity(n))
        if n <= 3:
            results.append(check_channel_quadrature(n))
    return results


def report(results: list[CheckResult]) -> dict:
    """JSON-ready summary of a suite run."""
    return {
        "passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
