"""Brute-force dense reference implementations on the full 2^n space.

Everything here is deliberately simple and exponentially sized; it exists so
that the block-level fast path has an independent ground truth to be checked
against.  Qubit 1 is the leftmost tensor factor (most significant bit).
Calls are refused above MAX_DENSE_QUBITS unless unsafe=True is passed.
"""

from __future__ import annotations

import itertools
import math
from functools import cache

import numpy as np
import scipy.linalg as sla

from .irreps import WeightVector

MAX_DENSE_QUBITS = 8

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n: int, unsafe: bool = False) -> None:
    if n > MAX_DENSE_QUBITS and not unsafe:
        raise ValueError(
            f"dense path refuses n={n} > {MAX_DENSE_QUBITS}; pass unsafe=True to override"
        )


def _bit(idx: np.ndarray, n: int, pos: int) -> np.ndarray:
    # bit of qubit `pos` (0-based from the left) for each basis index
    return (idx >> (n - 1 - pos)) & 1


def pauli_string_dense(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli word given as a string over I, X, Y, Z."""
    n = len(letters)
    _check_size(n)
    dim = 1 << n
    idx = np.arange(dim)
    flip = 0
    phase = np.ones(dim, dtype=complex)
    for pos, letter in enumerate(letters):
        b = _bit(idx, n, pos)
        if letter == "X":
            flip |= 1 << (n - 1 - pos)
        elif letter == "Y":
            flip |= 1 << (n - 1 - pos)
            phase = phase * (1j * (1 - 2 * b))
        elif letter == "Z":
            phase = phase * (1 - 2 * b)
        elif letter != "I":
            raise ValueError(f"unknown Pauli letter {letter!r}")
    out = np.zeros((dim, dim), dtype=complex)
    out[idx ^ flip, idx] = phase
    return out


def permutation_index_map(n: int, sigma: tuple[int, ...]) -> np.ndarray:
    """Index permutation of R(sigma): entry b gives the image index of |b>.

    R(sigma)|i_1 ... i_n> = |i_{sigma^-1(1)} ... i_{sigma^-1(n)}>, with sigma
    given 0-based (sigma[i] is the image of position i).
    """
    _check_size(n, unsafe=True)  # cheap, allow large for index-only uses
    inv = [0] * n
    for i, s in enumerate(sigma):
        inv[s] = i
    idx = np.arange(1 << n)
    out = np.zeros_like(idx)
    for pos in range(n):
        out |= _bit(idx, n, inv[pos]) << (n - 1 - pos)
    return out


def permutation_matrix(n: int, sigma: tuple[int, ...]) -> np.ndarray:
    _check_size(n)
    dim = 1 << n
    perm = permutation_index_map(n, sigma)
    out = np.zeros((dim, dim))
    out[perm, np.arange(dim)] = 1.0
    return out


@cache
def _all_permutation_maps(n: int) -> np.ndarray:
    _check_size(n)
    return np.stack(
        [permutation_index_map(n, sigma) for sigma in itertools.permutations(range(n))]
    )


def twirl(a: np.ndarray, n: int) -> np.ndarray:
    """Average of R(sigma) A R(sigma)^dag over all n! permutations."""
    _check_size(n)
    maps = _all_permutation_maps(n)
    out = np.zeros_like(a, dtype=complex)
    for perm in maps:
        # R A R^dag permutes rows and columns by the inverse index map;
        # gathering at perm applies it directly since each R is real orthogonal
        inv = np.empty_like(perm)
        inv[perm] = np.arange(perm.size)
        out += a[np.ix_(inv, inv)]
    return out / maps.shape[0]


def symmetrized_pauli_dense(n: int, kvec: WeightVector) -> np.ndarray:
    """twirl(P) for a Pauli word of weight kvec, via the distinct-word average.

    Much faster than the permutation average: the twirl of a Pauli word is the
    mean of the n! / (kx! ky! kz! (n-k)!) distinct letter placements.
    """
    _check_size(n)
    if kvec.k > n:
        raise ValueError(f"weight {kvec.k} exceeds n={n}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    count = 0
    positions = range(n)
    for xs in itertools.combinations(positions, kvec.kx):
        rest = [p for p in positions if p not in xs]
        for ys in itertools.combinations(rest, kvec.ky):
            rest2 = [p for p in rest if p not in ys]
            for zs in itertools.combinations(rest2, kvec.kz):
                letters = ["I"] * n
                for p in xs:
                    letters[p] = "X"
                for p in ys:
                    letters[p] = "Y"
                for p in zs:
                    letters[p] = "Z"
                out += pauli_string_dense("".join(letters))
                count += 1
    return out / count


# ---------------------------------------------------------------------------
# canonical sector basis vectors


def dicke_vector(n: int, w: int) -> np.ndarray:
    """Normalized uniform superposition of n-bit states of Hamming weight w."""
    if n == 0:
        if w != 0:
            raise ValueError("weight on empty register")
        return np.ones(1)
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} outside 0..{n}")
    idx = np.arange(1 << n)
    pop = np.array([bin(i).count("1") for i in idx])
    vec = (pop == w).astype(float)
    return vec / math.sqrt(math.comb(n, w))


def singlet_vector() -> np.ndarray:
    return np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)


def canonical_schur_vector(n: int, m: int, q: int) -> np.ndarray:
    """|lambda, p0, q>: m singlet pairs on the first 2m qubits, then Dicke q."""
    _check_size(n)
    vec = np.ones(1)
    for _ in range(m):
        vec = np.kron(vec, singlet_vector())
    return np.kron(vec, dicke_vector(n - 2 * m, q))


def schur_basis_matrix(n: int, m: int) -> np.ndarray:
    """Columns are the canonical sector vectors q = 0 .. n-2m."""
    d = n - 2 * m + 1
    return np.column_stack([canonical_schur_vector(n, m, q) for q in range(d)])


def project_block(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """Matrix of A restricted to the canonical sector copy: V^dag A V."""
    v = schur_basis_matrix(n, m)
    return v.conj().T @ a @ v


def blocks_of_dense(a: np.ndarray, n: int) -> dict[int, np.ndarray]:
    return {m: project_block(a, n, m) for m in range(n // 2 + 1)}


def tau_blocks_from_dense(rho: np.ndarray, n: int) -> dict[int, np.ndarray]:
    """Multiplicity-summed sector blocks of a permutation-symmetric density matrix.

    Symmetric rho acts identically on every copy of a sector, so the summed
    block is the canonical-copy block times the multiplicity.  The input must
    already be symmetric (e.g. produced by :func:`twirl`); the returned traces
    then add up to tr(rho).
    """
    from .irreps import IrrepLabel

    return {
        m: IrrepLabel(n, m).multiplicity * project_block(rho, n, m)
        for m in range(n // 2 + 1)
    }


# ---------------------------------------------------------------------------
# dense states and evolution


def all_zero_state(n: int) -> np.ndarray:
    _check_size(n)
    vec = np.zeros(1 << n, dtype=complex)
    vec[0] = 1.0
    return vec


def all_plus_state(n: int) -> np.ndarray:
    _check_size(n)
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)


def dense_evolve(hams: list[np.ndarray], times: list[float], psi: np.ndarray) -> np.ndarray:
    """Apply exp(-i t_L H_L) ... exp(-i t_1 H_1), layer 1 acting first."""
    out = psi.astype(complex)
    for h, t in zip(hams, times):
        w, v = sla.eigh(h)
        out = v @ (np.exp(-1j * t * w) * (v.conj().T @ out))
    return out


def dense_expectation(
    hams: list[np.ndarray],
    times: list[float],
    rho0: np.ndarray,
    obs: np.ndarray,
) -> float:
    """tr(U rho U^dag O) for the layered evolution above, rho a density matrix."""
    u = np.eye(rho0.shape[0], dtype=complex)
    for h, t in zip(hams, times):
        w, v = sla.eigh(h)
        u = (v @ (np.exp(-1j * t * w)[:, None] * v.conj().T)) @ u
    val = np.trace(u @ rho0 @ u.conj().T @ obs)
    assert abs(val.imag) < 1e-9 * max(1.0, abs(val.real)), val
    return float(val.real)


def partial_trace_two(rho: np.ndarray, n: int) -> np.ndarray:
    """Reduced density matrix of qubits 1 and 2 (the leftmost pair)."""
    _check_size(n)
    if n < 2:
        raise ValueError("need at least two qubits")
    rest = 1 << (n - 2)
    return np.einsum("aibi->ab", rho.reshape(4, rest, 4, rest))
