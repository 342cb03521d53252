"""Per-sector matrix blocks of permutation-symmetric n-qubit operators.

A permutation-symmetric operator never mixes the sectors of
:mod:`schursim.irreps` and acts identically on every copy of a sector, so it
is fully described by one (n-2m+1) x (n-2m+1) block per m.  This module
builds those blocks directly from closed forms for the standard collective
generators and, for arbitrary symmetrized Pauli words, from a column-recursion
over letter placements that runs in polynomial time and memory.

Normalization of the named generator kinds:

* ``sum_x/y/z``   : (1/n) * sum_i P_i
* ``sum_xx/yy/zz``: (2/(n(n-1))) * sum_{i<j} P_i P_j
* ``global_x/y/z``: P_1 P_2 ... P_n (no prefactor)

These coincide with the uniform permutation average (twirl) of a single Pauli
word of the matching letter counts, e.g. sum_xx equals twirl of X X I..I, so
the same blocks are reachable through :func:`twirl_block`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .irreps import IrrepLabel, WeightVector

GENERATOR_KINDS = (
    "sum_x",
    "sum_y",
    "sum_z",
    "sum_xx",
    "sum_yy",
    "sum_zz",
    "global_x",
    "global_y",
    "global_z",
)

_TWO_BODY = {"sum_xx", "sum_yy", "sum_zz"}


@dataclass
class BlockOperator:
    """A symmetric operator as a map m -> sector block.

    Generator constructors always populate every sector; callers doing
    symmetric-subspace work may hold only m=0 (covers_all is then False).
    """

    n: int
    blocks: dict[int, np.ndarray]
    name: str = ""

    def __post_init__(self) -> None:
        for m, mat in self.blocks.items():
            d = self.n - 2 * m + 1
            if mat.shape != (d, d):
                raise ValueError(
                    f"sector m={m} of n={self.n} needs shape {(d, d)}, got {mat.shape}"
                )

    @property
    def sectors(self) -> list[int]:
        return sorted(self.blocks)

    @property
    def covers_all(self) -> bool:
        return self.sectors == list(range(self.n // 2 + 1))

    def block(self, m: int) -> np.ndarray:
        return self.blocks[m]


def _alphas(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    # ladder factors alpha-(q) = sqrt(q(n-2m-q+1)), alpha+(q) = sqrt((q+1)(n-2m-q))
    r = n - 2 * m
    q = np.arange(r + 1, dtype=float)
    return np.sqrt(q * (r - q + 1)), np.sqrt((q + 1) * (r - q))


def generator_block(kind: str, n: int, m: int) -> np.ndarray:
    """Closed-form sector block of a named generator kind."""
    if kind in _TWO_BODY and n < 2:
        raise ValueError(f"{kind} needs n >= 2")
    r = n - 2 * m
    d = r + 1
    q = np.arange(d, dtype=float)
    h = q + m  # Hamming weight of the underlying basis states
    lo, hi = _alphas(n, m)

    if kind == "sum_z":
        return np.diag(1.0 - 2.0 * h / n)
    if kind == "sum_zz":
        return np.diag((n * n - n - 4.0 * n * h + 4.0 * h * h) / (n * (n - 1)))
    if kind == "global_z":
        return np.diag(np.where(h.astype(int) % 2 == 0, 1.0, -1.0))
    if kind == "sum_x":
        return (np.diag(lo[1:], -1) + np.diag(hi[:-1], 1)) / n
    if kind == "sum_y":
        # A[q, q-1] = i alpha-(q)/n and A[q, q+1] = -i alpha+(q)/n
        return (1j * np.diag(lo[1:], -1) - 1j * np.diag(hi[:-1], 1)) / n
    if kind in ("sum_xx", "sum_yy"):
        out = np.diag(2.0 * (q * (r - q) - m) / (n * (n - 1)))
        if d > 2:
            band2 = lo[2:] * lo[1:-1] / (n * (n - 1))
            sign = 1.0 if kind == "sum_xx" else -1.0
            out += sign * (np.diag(band2, -2) + np.diag(band2, 2))
        return out
    if kind == "global_x":
        return (-1.0) ** m * np.fliplr(np.eye(d))
    if kind == "global_y":
        # column q' holds i^n (-1)^q' on the antidiagonal row q = r - q';
        # reduces to the familiar (-1)^(q + n/2) phases when n is even and
        # stays Hermitian for odd n
        col_phase = (1j**n) * (-1.0) ** np.arange(d)
        out = np.flipud(np.diag(col_phase))
        return out if n % 2 else np.real(out).copy()
    raise ValueError(f"unknown generator kind {kind!r}")


def generator(kind: str, n: int) -> BlockOperator:
    """Named generator as a BlockOperator covering every sector."""
    return BlockOperator(
        n, {m: generator_block(kind, n, m) for m in range(n // 2 + 1)}, name=kind
    )


# ---------------------------------------------------------------------------
# symmetrized Pauli words of arbitrary weight


_LOGFACT = np.zeros(1)


def _logfact(limit: int) -> np.ndarray:
    """Table of log(k!) for k = 0..limit, grown on demand."""
    global _LOGFACT
    if _LOGFACT.size <= limit:
        new = np.zeros(limit + 1)
        np.cumsum(np.log(np.arange(1, limit + 1)), out=new[1:])
        _LOGFACT = new
    return _LOGFACT


def _placements(kvec: WeightVector, m: int) -> Iterable[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    # pair placements a (on singlet pairs) and single placements s (on the tail)
    for ax in range(kvec.kx // 2 + 1):
        for ay in range(kvec.ky // 2 + 1):
            for az in range(kvec.kz // 2 + 1):
                if ax + ay + az > m:
                    continue
                for sx in range(kvec.kx - 2 * ax + 1):
                    for sy in range(kvec.ky - 2 * ay + 1):
                        for sz in range(kvec.kz - 2 * az + 1):
                            yield (ax, ay, az), (sx, sy, sz)


def twirl_diagonals(n: int, kvec: WeightVector, m: int) -> dict[int, np.ndarray]:
    """Nonzero diagonals of the sector-m block of twirl(P_kvec).

    Returns a map from row-minus-column offset o to a length n-2m+1 array v
    with v[q] the entry at (row q+o, column q); positions falling outside the
    block are zero.  Only offsets with |o| <= kx+ky and o = kx+ky (mod 2)
    occur.  All factorial ratios are evaluated in log space, so this stays
    well-scaled for n in the thousands.
    """
    if kvec.k > n:
        raise ValueError(f"weight {kvec.k} exceeds n={n}")
    r = n - 2 * m
    d = r + 1
    k = kvec.k
    kx, ky, kz = kvec.as_tuple()
    lf = _logfact(n + 1)
    logpre = lf[kx] + lf[ky] + lf[kz] + lf[n - k] - lf[n]
    qs = np.arange(d)
    diags: dict[int, np.ndarray] = {}
    for (ax, ay, az), (sx, sy, sz) in _placements(kvec, m):
        amag = ax + ay + az
        smag = sx + sy + sz
        o = kx + ky - 2 * (ax + ay + sx + sy)
        qp = qs + o
        tail = r - qs - k + 2 * amag + smag  # identities left on the tail
        valid = (qs >= smag) & (tail >= 0) & (qp >= 0) & (qp <= r)
        q_v = np.where(valid, qs, 0)
        qp_v = np.where(valid, qp, 0)
        tail_v = np.where(valid, tail, 0)
        log_pairs = lf[m] - lf[ax] - lf[ay] - lf[az] - lf[m - amag]
        log_single = lf[q_v] - lf[sx] - lf[sy] - lf[sz] - lf[q_v - smag * valid]
        log_tail = (
            lf[r - q_v]
            - lf[kx - 2 * ax - sx]
            - lf[ky - 2 * ay - sy]
            - lf[kz - 2 * az - sz]
            - lf[tail_v]
        )
        log_norm = 0.5 * (lf[qp_v] + lf[r - qp_v] - lf[q_v] - lf[r - q_v])
        log_amp = logpre + log_pairs + log_single + log_tail + log_norm
        phase = (1j**ky) * (-1.0) ** (ax + az + sy + sz)
        amp = phase * np.exp(np.where(valid, log_amp, -np.inf))
        vec = diags.setdefault(o, np.zeros(d, dtype=complex))
        vec[valid] += amp[valid]
    if ky % 2 == 0:
        diags = {o: v.real.copy() for o, v in diags.items()}
    return diags


def action_column(n: int, kvec: WeightVector, m: int, q: int) -> dict[int, complex]:
    """Column q of the sector-m block of twirl(P_kvec): map q' -> amplitude.

    Scalar reference for :func:`twirl_diagonals`; same enumeration, one q.
    """
    r = n - 2 * m
    if not 0 <= q <= r:
        raise ValueError(f"q={q} outside sector of dim {r + 1}")
    k = kvec.k
    kx, ky, kz = kvec.as_tuple()
    lf = _logfact(n + 1)
    logpre = lf[kx] + lf[ky] + lf[kz] + lf[n - k] - lf[n]
    out: dict[int, complex] = {}
    for (ax, ay, az), (sx, sy, sz) in _placements(kvec, m):
        amag, smag = ax + ay + az, sx + sy + sz
        if q < smag:
            continue
        tail = r - q - k + 2 * amag + smag
        qp = q + kx + ky - 2 * (ax + ay + sx + sy)
        if tail < 0 or not 0 <= qp <= r:
            continue
        logw = (
            lf[m] - lf[ax] - lf[ay] - lf[az] - lf[m - amag]
            + lf[q] - lf[sx] - lf[sy] - lf[sz] - lf[q - smag]
            + lf[r - q]
            - lf[kx - 2 * ax - sx] - lf[ky - 2 * ay - sy] - lf[kz - 2 * az - sz]
            - lf[tail]
        )
        log_norm = 0.5 * (lf[qp] + lf[r - qp] - lf[q] - lf[r - q])
        phase = (1j**ky) * (-1.0) ** (ax + az + sy + sz)
        amp = phase * math.exp(logpre + logw + log_norm)
        out[qp] = out.get(qp, 0.0) + amp
    return {qp: amp for qp, amp in out.items() if amp != 0}


def twirl_block(n: int, kvec: WeightVector, m: int) -> np.ndarray:
    """Dense sector-m block of twirl(P_kvec)."""
    d = n - 2 * m + 1
    diags = twirl_diagonals(n, kvec, m)
    dtype = float if kvec.ky % 2 == 0 else complex
    out = np.zeros((d, d), dtype=dtype)
    qs = np.arange(d)
    for o, vec in diags.items():
        mask = (qs + o >= 0) & (qs + o < d)
        out[qs[mask] + o, qs[mask]] = vec[mask]
    return out


def twirl_operator(n: int, kvec: WeightVector) -> BlockOperator:
    """twirl(P_kvec) as a BlockOperator covering every sector."""
    return BlockOperator(
        n,
        {m: twirl_block(n, kvec, m) for m in range(n // 2 + 1)},
        name=f"twirl{kvec.as_tuple()}",
    )


def two_local(p: str, q: str, n: int) -> BlockOperator:
    """twirl(P ox Q ox I..I) for single-qubit Pauli letters P, Q.

    For any permutation-symmetric state this has the same expectation value as
    P on qubit 1 times Q on qubit 2, which is what reduced two-qubit states
    are built from.
    """
    if n < 2:
        raise ValueError("two_local needs n >= 2")
    counts = {"X": 0, "Y": 0, "Z": 0}
    for letter in (p.upper(), q.upper()):
        if letter in counts:
            counts[letter] += 1
        elif letter != "I":
            raise ValueError(f"unknown Pauli letter {letter!r}")
    kvec = WeightVector(counts["X"], counts["Y"], counts["Z"])
    op = twirl_operator(n, kvec)
    op.name = f"two_local({p}{q})"
    return op


def compose(terms: list[tuple[float, BlockOperator]], name: str = "") -> BlockOperator:
    """Real linear combination of BlockOperators on the shared sectors."""
    if not terms:
        raise ValueError("empty combination")
    n = terms[0][1].n
    if any(op.n != n for _, op in terms):
        raise ValueError("mixed register sizes")
    sectors = set(terms[0][1].blocks)
    for _, op in terms[1:]:
        sectors &= set(op.blocks)
    if not sectors:
        raise ValueError("no common sectors")
    blocks = {}
    for m in sorted(sectors):
        acc = None
        for coeff, op in terms:
            contrib = coeff * op.blocks[m]
            acc = contrib if acc is None else acc + contrib
        blocks[m] = acc
    return BlockOperator(n, blocks, name=name)


# ---------------------------------------------------------------------------
# operator norms, computed sector-wise


def frobenius_norm_squared(op: BlockOperator) -> float:
    """||A||_F^2 of the full 2^n operator, i.e. sum_m mult * ||A_m||_F^2."""
    total = 0.0
    for m, mat in op.blocks.items():
        mult = IrrepLabel(op.n, m).multiplicity
        total += mult * float(np.sum(np.abs(mat) ** 2))
    return total


def spectral_norm(op: BlockOperator) -> float:
    """Largest singular value of the full operator (max over sector blocks)."""
    return max(float(np.linalg.norm(mat, 2)) for mat in op.blocks.values())
