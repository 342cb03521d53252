"""Bookkeeping for the symmetric-group sectors of an n-qubit register.

Under the joint action of SU(2)^{x n} permutations, the n-qubit Hilbert space
splits into sectors labelled by two-row partitions lambda = (n-m, m) with
m = 0..floor(n/2).  Every permutation-symmetric operator is block diagonal in
this basis, with one block of dimension n-2m+1 per sector, repeated with a
purely combinatorial multiplicity.  This module provides the labels, counts
and index arithmetic; the numerical blocks live in :mod:`schursim.blocks`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache


@dataclass(frozen=True, order=True)
class IrrepLabel:
    """Two-row sector label (n-m, m) for an n-qubit register.

    Attributes:
        n: number of qubits, n >= 1.
        m: length of the second row, 0 <= m <= n // 2.
    """

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if not 0 <= self.m <= self.n // 2:
            raise ValueError(f"m={self.m} outside 0..{self.n // 2} for n={self.n}")

    @property
    def block_dim(self) -> int:
        """Dimension n - 2m + 1 of the matrix block carried by this sector."""
        return self.n - 2 * self.m + 1

    @property
    def spin(self) -> Fraction:
        """Collective spin s = (n - 2m)/2 of the sector, a half-integer."""
        return Fraction(self.n - 2 * self.m, 2)

    @property
    def multiplicity(self) -> int:
        """Number of copies of the block, n!(n-2m+1)! / ((n-m+1)! m! (n-2m)!)."""
        return _multiplicity(self.n, self.m)

    @property
    def rows(self) -> tuple[int, int]:
        """The partition as (first row, second row)."""
        return (self.n - self.m, self.m)


@cache
def _multiplicity(n: int, m: int) -> int:
    num = math.factorial(n) * math.factorial(n - 2 * m + 1)
    den = math.factorial(n - m + 1) * math.factorial(m) * math.factorial(n - 2 * m)
    mult, rem = divmod(num, den)
    assert rem == 0, (n, m)
    return mult


def enumerate_irreps(n: int) -> list[IrrepLabel]:
    """All sector labels for n qubits, ordered by increasing m."""
    return [IrrepLabel(n, m) for m in range(n // 2 + 1)]


def total_dimension(n: int) -> int:
    """Sum of block_dim * multiplicity over all sectors; equals 2**n."""
    return sum(lam.block_dim * lam.multiplicity for lam in enumerate_irreps(n))


def commutant_dim(n: int) -> int:
    """Dimension binom(n+3, 3) of the algebra of permutation-symmetric operators.

    Counts symmetrized Pauli words, i.e. occupation triples (kx, ky, kz) with
    kx + ky + kz <= n, one slot per letter plus the identity padding.
    """
    return math.comb(n + 3, 3)


@dataclass(frozen=True, order=True)
class WeightVector:
    """Letter counts (kx, ky, kz) of a Pauli word, identities excluded."""

    kx: int
    ky: int
    kz: int

    def __post_init__(self) -> None:
        if min(self.kx, self.ky, self.kz) < 0:
            raise ValueError(f"negative letter count in {self}")

    @property
    def k(self) -> int:
        """Total number of non-identity letters."""
        return self.kx + self.ky + self.kz

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.kx, self.ky, self.kz)


def num_weight_vectors(k: int) -> int:
    """Number binom(k+2, 2) of weight vectors with exactly k letters."""
    return math.comb(k + 2, 2)


def enumerate_weight_vectors(n: int, k_max: int | None = None) -> list[WeightVector]:
    """Weight vectors with k <= min(n, k_max), ordered by (k, kx, ky).

    With the default k_max the list has commutant_dim(n) entries and indexes
    a basis of the permutation-symmetric operator algebra.
    """
    limit = n if k_max is None else min(n, k_max)
    out = []
    for k in range(limit + 1):
        for kx, ky in itertools.product(range(k + 1), repeat=2):
            if kx + ky <= k:
                out.append(WeightVector(kx, ky, k - kx - ky))
    return out


@dataclass(frozen=True)
class SchurIndex:
    """Position of one canonical basis vector inside a sector block.

    q counts raised Dicke excitations on the symmetric tail, so the Hamming
    weight of the underlying computational states is q + m (each singlet pair
    contributes exactly one 1).
    """

    irrep: IrrepLabel
    q: int

    def __post_init__(self) -> None:
        if not 0 <= self.q < self.irrep.block_dim:
            raise ValueError(f"q={self.q} outside block of dim {self.irrep.block_dim}")

    @property
    def hamming(self) -> int:
        return self.q + self.irrep.m
