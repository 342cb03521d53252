"""Time evolution and expectation values, one sector block at a time.

A circuit of permutation-symmetric layers exp(-i t_l H_l) acts independently
inside each sector, so states, unitaries and observables are all propagated
as (n-2m+1)-dimensional objects.  Exponentials are exact: each block is
eigendecomposed (banded solver when the block is banded, which all the named
generators are) and the phases are applied in the eigenbasis.

Layer order convention: layers[0] acts first on states, i.e. the circuit
unitary is U = exp(-i t_L H_L) ... exp(-i t_1 H_1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .blocks import BlockOperator

HERMITICITY_RTOL = 1e-10
_BAND_LIMIT = 4  # widest band worth routing to the banded solver


@dataclass
class EigenFactorization:
    """H = Q diag(w) Q^dag with real w ascending and unitary Q."""

    eigenvalues: np.ndarray
    vectors: np.ndarray


def _bandwidth(mat: np.ndarray) -> int:
    rows, cols = np.nonzero(mat)
    if rows.size == 0:
        return 0
    return int(np.max(np.abs(rows - cols)))


def eigendecompose(mat: np.ndarray, bandwidth: int | None = None) -> EigenFactorization:
    """Spectral factorization of a Hermitian block; rejects non-Hermitian input.

    bandwidth, if given, skips the structure scan (callers that assembled the
    block from banded generators already know it).
    """
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    if scale and float(np.max(np.abs(mat - mat.conj().T))) > HERMITICITY_RTOL * scale:
        raise ValueError("block is not Hermitian")
    d = mat.shape[0]
    b = _bandwidth(mat) if bandwidth is None else bandwidth
    if 0 < b <= _BAND_LIMIT and d > 2 * (_BAND_LIMIT + 1):
        band = np.zeros((b + 1, d), dtype=mat.dtype)
        for i in range(b + 1):
            band[i, : d - i] = np.diagonal(mat, -i)
        w, v = sla.eig_banded(band, lower=True)
    else:
        w, v = sla.eigh(mat)
    return EigenFactorization(w, v)


def unitary_block(fact: EigenFactorization, t: float = 1.0) -> np.ndarray:
    """exp(-i t H) from the factorization of H."""
    return (fact.vectors * np.exp(-1j * t * fact.eigenvalues)) @ fact.vectors.conj().T


@dataclass
class CircuitLayer:
    """One layer exp(-i time * H).

    key, if set, caches eigendecompositions across layers and circuits;
    bandwidth, if set, tells the eigensolver the block band structure upfront.
    """

    hamiltonian: BlockOperator
    time: float
    key: str | None = None
    bandwidth: int | None = None


def _matvec(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    # real matrix times complex vector without promoting the matrix
    if np.iscomplexobj(mat) or not np.iscomplexobj(vec):
        return mat @ vec
    return (mat @ vec.real) + 1j * (mat @ vec.imag)


@dataclass
class SchurState:
    """State data in the sector basis.

    Exactly one of psi / tau is set.  psi holds symmetric-sector (m=0)
    amplitudes of a permutation-invariant pure state.  tau maps each sector m
    to its multiplicity-summed density block, so the traces of all tau blocks
    add up to one.
    """

    n: int
    psi: np.ndarray | None = None
    tau: dict[int, np.ndarray] | None = None

    def __post_init__(self) -> None:
        if (self.psi is None) == (self.tau is None):
            raise ValueError("exactly one of psi / tau must be given")
        if self.psi is not None:
            if self.psi.shape != (self.n + 1,):
                raise ValueError(f"psi must have length n+1={self.n + 1}")
            norm = float(np.linalg.norm(self.psi))
            if abs(norm - 1.0) > 1e-9:
                raise ValueError(f"psi not normalized: |psi|={norm}")
        else:
            total = 0.0
            for m, blk in self.tau.items():
                d = self.n - 2 * m + 1
                if blk.shape != (d, d):
                    raise ValueError(f"tau[{m}] must be {d}x{d}")
                herm = float(np.max(np.abs(blk - blk.conj().T)))
                if herm > 1e-9 * max(1.0, float(np.max(np.abs(blk)))):
                    raise ValueError(f"tau[{m}] not Hermitian")
                total += float(np.trace(blk).real)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"tau traces sum to {total}, expected 1")

    @property
    def is_pure_symmetric(self) -> bool:
        return self.psi is not None

    def sector_weights(self) -> dict[int, float]:
        """Probability weight tr(tau_m) carried by each sector."""
        if self.psi is not None:
            return {0: 1.0}
        return {m: float(np.trace(blk).real) for m, blk in self.tau.items()}

    def as_tau(self) -> dict[int, np.ndarray]:
        if self.psi is not None:
            return {0: np.outer(self.psi, self.psi.conj())}
        return self.tau

    # -- constructors ------------------------------------------------------

    @classmethod
    def pure_symmetric(cls, n: int, psi: np.ndarray) -> "SchurState":
        return cls(n, psi=np.asarray(psi, dtype=complex))

    @classmethod
    def block_mixed(cls, n: int, tau: dict[int, np.ndarray]) -> "SchurState":
        return cls(n, tau={m: np.asarray(b, dtype=complex) for m, b in tau.items()})

    @classmethod
    def all_zero(cls, n: int) -> "SchurState":
        """|0...0>, the q=0 vector of the symmetric sector."""
        psi = np.zeros(n + 1, dtype=complex)
        psi[0] = 1.0
        return cls(n, psi=psi)

    @classmethod
    def dicke(cls, n: int, w: int) -> "SchurState":
        """Uniform Hamming-weight-w state, the q=w vector of the symmetric sector."""
        if not 0 <= w <= n:
            raise ValueError(f"weight {w} outside 0..{n}")
        psi = np.zeros(n + 1, dtype=complex)
        psi[w] = 1.0
        return cls(n, psi=psi)

    @classmethod
    def all_plus(cls, n: int) -> "SchurState":
        """|+>^n: amplitudes sqrt(binom(n,q)/2^n), exact bignum ratio per entry."""
        psi = np.array(
            [math.sqrt(Fraction(math.comb(n, q), 1 << n)) for q in range(n + 1)],
            dtype=complex,
        )
        return cls(n, psi=psi)


def _layer_factorization(
    layer: CircuitLayer, m: int, cache: dict | None
) -> EigenFactorization:
    block = layer.hamiltonian.blocks[m]
    if cache is None or layer.key is None:
        return eigendecompose(block, layer.bandwidth)
    fact = cache.get((layer.key, m))
    if fact is None:
        fact = eigendecompose(block, layer.bandwidth)
        cache[(layer.key, m)] = fact
    return fact


def _sector_unitaries(
    layers: list[CircuitLayer],
    sectors: list[int],
    cache: dict | None,
) -> dict[int, np.ndarray]:
    out = {}
    for m in sectors:
        u = None
        for layer in layers:
            step = unitary_block(_layer_factorization(layer, m, cache), layer.time)
            u = step if u is None else step @ u
        out[m] = u
    return out


def heisenberg_evolve(
    layers: list[CircuitLayer],
    obs: BlockOperator,
    cache: dict | None = None,
) -> BlockOperator:
    """U^dag O U on every sector the observable and all layers cover."""
    if not layers:
        return obs
    sectors = set(obs.blocks)
    for layer in layers:
        sectors &= set(layer.hamiltonian.blocks)
    us = _sector_unitaries(layers, sorted(sectors), cache)
    blocks = {}
    for m in sorted(sectors):
        u = us[m]
        blocks[m] = u.conj().T @ obs.blocks[m] @ u
    return BlockOperator(obs.n, blocks, name=f"heisenberg({obs.name})")


def schrodinger_evolve(
    layers: list[CircuitLayer],
    state: SchurState,
    cache: dict | None = None,
) -> SchurState:
    """Apply the circuit to the state, layer 0 first."""
    if not layers:
        return state
    if state.is_pure_symmetric:
        psi = state.psi
        for layer in layers:
            fact = _layer_factorization(layer, 0, cache)
            coeffs = _matvec(fact.vectors.conj().T, psi)
            coeffs *= np.exp(-1j * layer.time * fact.eigenvalues)
            psi = _matvec(fact.vectors, coeffs)
        return SchurState.pure_symmetric(state.n, psi)
    sectors = set(state.tau)
    for layer in layers:
        sectors &= set(layer.hamiltonian.blocks)
    us = _sector_unitaries(layers, sorted(sectors), cache)
    tau = {m: us[m] @ state.tau[m] @ us[m].conj().T for m in sorted(sectors)}
    return SchurState.block_mixed(state.n, tau)


def expectation(state: SchurState, obs: BlockOperator) -> float:
    """tr(rho O) evaluated sector-wise; the imaginary residue must vanish."""
    if state.is_pure_symmetric:
        val = complex(state.psi.conj() @ (obs.blocks[0] @ state.psi))
    else:
        val = 0j
        for m, blk in state.tau.items():
            val += np.trace(blk @ obs.blocks[m])
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary residue {val.imag}")
    return float(val.real)
