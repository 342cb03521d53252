"""Dense oracles shared by the test modules.

Everything here is deliberately pedestrian: explicit Kronecker products and
explicit sums over sites, so that agreement with the block backend is a real
cross-check and not two copies of the same formula.
"""

from __future__ import annotations

import numpy as np

from schursim import dense

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_kron(letters: str) -> np.ndarray:
    """Kronecker chain for a Pauli word, site 0 as the leftmost factor."""
    out = np.ones((1, 1), dtype=complex)
    for letter in letters:
        out = np.kron(out, PAULI[letter])
    return out


def one_site(letter: str, n: int, i: int) -> np.ndarray:
    word = ["I"] * n
    word[i] = letter
    return pauli_kron("".join(word))


def mean_one(letter: str, n: int) -> np.ndarray:
    """(1/n) sum_i P_i."""
    return sum(one_site(letter, n, i) for i in range(n)) / n


def mean_two(p: str, q: str, n: int) -> np.ndarray:
    """Mean of P_i Q_j over ordered pairs i != j."""
    acc = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            word = ["I"] * n
            word[i] = p
            word[j] = q
            acc += pauli_kron("".join(word))
    return acc / (n * (n - 1))


def dense_collective(kind: str, n: int) -> np.ndarray:
    """Dense counterpart of each named generator, built site by site."""
    if kind.startswith("sum_") and len(kind) == 5:
        return mean_one(kind[-1].upper(), n)
    if kind.startswith("sum_") and len(kind) == 6:
        return mean_two(kind[-2].upper(), kind[-1].upper(), n)
    if kind.startswith("global_"):
        return pauli_kron(kind[-1].upper() * n)
    raise ValueError(kind)


def dense_lmg(n: int, j: float, gamma: float, hz: float) -> np.ndarray:
    """-(J/n) sum_{i<j} (X_i X_j + gamma Y_i Y_j) + hz sum_i Z_i."""
    h = np.zeros((2**n, 2**n), dtype=complex)
    for a in range(n):
        for b in range(a + 1, n):
            xx = ["I"] * n
            xx[a] = xx[b] = "X"
            yy = ["I"] * n
            yy[a] = yy[b] = "Y"
            h -= (j / n) * (pauli_kron("".join(xx)) + gamma * pauli_kron("".join(yy)))
    for a in range(n):
        h += hz * one_site("Z", n, a)
    return h


def random_symmetric_mixed(n: int, rng: np.random.Generator):
    """Twirled random density matrix, returned both dense and as tau blocks."""
    a = rng.standard_normal((2**n, 2**n)) + 1j * rng.standard_normal((2**n, 2**n))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    rho = dense.twirl(rho, n)
    return rho, dense.tau_blocks_from_dense(rho, n)
