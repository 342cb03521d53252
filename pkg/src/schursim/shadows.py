"""Permutation-invariant classical shadows in the sector-block representation.

Two acquisition protocols for equivariant states:

* Symmetrized shadows.  One Haar-random SU(2) rotation is applied to every
  qubit at once and the total Hamming weight of the computational-basis
  outcome is recorded.  A snapshot is just three Euler angles plus an
  integer.  Post-processing expands observables in the orthonormal
  symmetrized Pauli basis (one coordinate per weight vector, C(n+3,3) in
  total), inverts the measurement channel there, and contracts with a
  closed-form measurement vector.

* Register shadows ("deep" protocol).  The sector label m is sampled first
  with probability tr(tau_m), then an ordinary state shadow is taken on the
  (n-2m+1)-dimensional register: Haar unitary, basis measurement, inverse
  depolarizing map (d+1)X - tr(X).  No division by the sector probability
  is needed; sampling m already supplies the weight.

Both estimators are unbiased for expectation values of equivariant
observables.  Snapshots are reproducible: collection uses one counter-based
substream per snapshot, and a deep snapshot stores the key that regenerates
its Haar unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .blocks import (
    BlockOperator,
    frobenius_norm_squared,
    generator_block,
    spectral_norm,
    twirl_block,
)
from .evolve import SchurState
from .irreps import IrrepLabel, WeightVector, enumerate_weight_vectors

TWO_PI = 2.0 * math.pi

# Tolerances for probability sanity checks on computed distributions.
NEG_PROB_TOL = -1e-10
PROB_SUM_TOL = 1e-10


@dataclass(frozen=True)
class EulerAngles:
    """One collective SU(2) rotation, W = Rz(theta3) Ry(theta2) Rz(theta1)."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta1 <= TWO_PI and 0.0 <= self.theta3 <= TWO_PI):
            raise ValueError("theta1/theta3 outside [0, 2pi]")
        if not 0.0 <= self.theta2 <= math.pi:
            raise ValueError("theta2 outside [0, pi]")


@dataclass(frozen=True)
class SymmetrizedSnapshot:
    angles: EulerAngles
    hamming: int


@dataclass(frozen=True)
class DeepSnapshot:
    """Sector label, Haar-unitary stream key, and register outcome.

    The unitary itself is not stored; `register_row` regenerates it from
    `register_seed`, so snapshots stay three numbers wide regardless of n.
    """

    irrep_m: int
    register_seed: tuple[int, int]
    outcome: int


def sample_euler(rng: np.random.Generator) -> EulerAngles:
    """Draw Euler angles of a Haar-random SU(2) element.

    theta1 and theta3 are uniform on [0, 2pi); theta2 has density
    sin(theta)/2 and is drawn by inverse CDF, theta2 = arccos(1 - 2u).
    """
    theta1 = rng.uniform(0.0, TWO_PI)
    theta2 = math.acos(1.0 - 2.0 * rng.random())
    theta3 = rng.uniform(0.0, TWO_PI)
    return EulerAngles(theta1, theta2, theta3)


@lru_cache(maxsize=None)
def _y_eigensystem(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the total-Y block (n times the mean-Y block)."""
    evals, evecs = np.linalg.eigh(n * generator_block("sum_y", n, m))
    return evals, evecs


def _z_diagonal(n: int, m: int) -> np.ndarray:
    d = n - 2 * m + 1
    return n - 2.0 * (np.arange(d) + m)


def rotation_block(n: int, m: int, angles: EulerAngles) -> np.ndarray:
    """Sector-m block of W^(x n) for the collective rotation `angles`.

    W^(x n) = exp(-i th3/2 SumZ) exp(-i th2/2 SumY) exp(-i th1/2 SumZ), so
    the block is assembled from the diagonal total-Z block and the cached
    eigensystem of the total-Y block.
    """
    zdiag = _z_diagonal(n, m)
    evals, evecs = _y_eigensystem(n, m)
    mid = (evecs * np.exp(-0.5j * angles.theta2 * evals)) @ evecs.conj().T
    out = mid * np.exp(-0.5j * angles.theta1 * zdiag)[np.newaxis, :]
    out *= np.exp(-0.5j * angles.theta3 * zdiag)[:, np.newaxis]
    return out


def rotated_hamming_distribution(state: SchurState, angles: EulerAngles) -> np.ndarray:
    """Hamming-weight outcome probabilities after rotating every qubit.

    p(h) sums the diagonal of W tau_m W^dag over all sectors, at register
    positions q with q + m = h.  Aborts on probabilities below -1e-10 and on
    totals off from one by more than 1e-10.
    """
    n = state.n
    probs = np.zeros(n + 1)
    if state.psi is not None:
        rotated = rotation_block(n, 0, angles) @ state.psi
        probs += np.abs(rotated) ** 2
    else:
        for m, blk in state.tau.items():
            w = rotation_block(n, m, angles)
            diag = np.einsum("qi,ij,qj->q", w, blk, w.conj()).real
            probs[m : n - m + 1] += diag
    if probs.min() < NEG_PROB_TOL:
        raise ValueError(f"negative outcome probability {probs.min():.3e}")
    if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"outcome probabilities sum to {probs.sum()!r}")
    return np.clip(probs, 0.0, None)


def _sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    edges = np.cumsum(probs)
    idx = int(np.searchsorted(edges, rng.random() * edges[-1]))
    return min(idx, len(probs) - 1)


def _substream(seed: int, index: int) -> np.random.Generator:
    """Counter-keyed generator: snapshot i is reproducible in isolation."""
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def collect_symmetrized(state: SchurState, count: int, seed: int) -> list[SymmetrizedSnapshot]:
    """Simulate `count` symmetrized-shadow snapshots of `state`."""
    snapshots = []
    for idx in range(count):
        rng = _substream(seed, idx)
        angles = sample_euler(rng)
        probs = rotated_hamming_distribution(state, angles)
        h = _sample_index(probs, rng)
        snapshots.append(SymmetrizedSnapshot(angles, h))
    return snapshots


# -- symmetrized Pauli coordinates ------------------------------------------


def a_coeff(h: int, k: int, n: int) -> int:
    """Alternating placement count sum_l C(k,l) C(n-k,h-l) (-1)^l, exact.

    This is the trace pairing between a weight-h computational projector and
    any Pauli-Z word of weight k; only the parity of ones under the word's
    support enters, hence a single alternating sum.
    """
    if not (0 <= h <= n and 0 <= k <= n):
        raise ValueError(f"need 0 <= h,k <= n, got h={h} k={k} n={n}")
    total = 0
    for l in range(max(0, h - (n - k)), min(h, k) + 1):
        total += (-1) ** l * math.comb(k, l) * math.comb(n - k, h - l)
    return total


def alpha_coeff(h: int, k: int, n: int) -> float:
    """Coordinate of the weight-h projector on the orthonormal Z-word basis.

    alpha(h,k) = sqrt(C(n,k) / 2^n) * a(h,k), evaluated in log space so that
    large n does not overflow the intermediate binomials.
    """
    a = a_coeff(h, k, n)
    if a == 0:
        return 0.0
    lg = 0.5 * (_log_comb(n, k) - n * math.log(2.0)) + math.log(abs(a))
    return math.copysign(math.exp(lg), a)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def word_norm_factor(n: int, kvec: WeightVector) -> float:
    """Scale turning a twirled Pauli string into a unit-Frobenius basis element.

    The orthonormal symmetrized word is B_k = word_norm_factor * T(P_k):
    sqrt(n! / (2^n kx! ky! kz! (n-k)!)).
    """
    lg = (
        math.lgamma(n + 1)
        - n * math.log(2.0)
        - math.lgamma(n - kvec.k + 1)
        - math.lgamma(kvec.kx + 1)
        - math.lgamma(kvec.ky + 1)
        - math.lgamma(kvec.kz + 1)
    )
    return math.exp(0.5 * lg)


def observable_coords(obs: BlockOperator) -> np.ndarray:
    """Coordinates tr[B_k O] of an equivariant observable, one per weight vector."""
    if not obs.covers_all:
        raise ValueError("observable must define every sector block")
    n = obs.n
    out = np.zeros(len(enumerate_weight_vectors(n)))
    for i, kv in enumerate(enumerate_weight_vectors(n)):
        acc = 0.0 + 0.0j
        for m in obs.sectors:
            basis = twirl_block(n, kv, m)
            acc += IrrepLabel(n, m).multiplicity * np.trace(
                basis.conj().T @ obs.block(m)
            )
        if abs(acc.imag) > 1e-9 * max(1.0, abs(acc.real)):
            raise ValueError(f"non-real coordinate {acc} at {kv}")
        out[i] = word_norm_factor(n, kv) * acc.real
    return out


def measurement_matrix(n: int, snapshots: list[SymmetrizedSnapshot]) -> np.ndarray:
    """Stack of measurement vectors, one row per snapshot.

    Row entries are tr[B_k W^dag Pi_h W] in closed form:
    wnf(k) * a(h,k) * (-cos t1)^kx (sin t1)^ky (sin t2)^(kx+ky) (cos t2)^kz.
    """
    kvecs = enumerate_weight_vectors(n)
    kx = np.array([kv.kx for kv in kvecs])
    ky = np.array([kv.ky for kv in kvecs])
    kz = np.array([kv.kz for kv in kvecs])
    pref = np.array([word_norm_factor(n, kv) for kv in kvecs])
    a_table = np.array(
        [[a_coeff(h, k, n) for k in range(n + 1)] for h in range(n + 1)], dtype=float
    )

    t1 = np.array([s.angles.theta1 for s in snapshots])
    t2 = np.array([s.angles.theta2 for s in snapshots])
    hs = np.array([s.hamming for s in snapshots])
    out = (
        (-np.cos(t1))[:, None] ** kx[None, :]
        * np.sin(t1)[:, None] ** ky[None, :]
        * np.sin(t2)[:, None] ** (kx + ky)[None, :]
        * np.cos(t2)[:, None] ** kz[None, :]
    )
    out *= pref[None, :]
    out *= a_table[hs][:, kx + ky + kz]
    return out


def measurement_vector(n: int, snapshot: SymmetrizedSnapshot) -> np.ndarray:
    return measurement_matrix(n, [snapshot])[0]


# -- measurement channel -----------------------------------------------------


def _channel_entry(n: int, kv: WeightVector, kw: WeightVector) -> float:
    pairs = list(zip(kv.as_tuple(), kw.as_tuple()))
    if any((a + b) % 2 for a, b in pairs):
        return 0.0
    k, kp = kv.k, kw.k
    sign = -1.0 if (sum(abs(a - b) for a, b in pairs) // 2) % 2 else 1.0
    lg = -n * math.log(2.0) - math.log(k + kp + 1)
    for a, b in pairs:
        lg += math.lgamma(a + b + 1) - math.lgamma((a + b) // 2 + 1)
        lg -= 0.5 * (math.lgamma(a + 1) + math.lgamma(b + 1))
    lg += math.lgamma(2 * n - k - kp + 1) - math.lgamma(n - (k + kp) // 2 + 1)
    lg -= 0.5 * (math.lgamma(n - k + 1) + math.lgamma(n - kp + 1))
    return sign * math.exp(lg)


@dataclass
class ChannelMatrix:
    """Second moment of the measurement vectors, with per-parity-class solves.

    Entries couple only weight vectors whose components agree in parity, so
    the matrix splits into (at most) eight diagonal blocks once indices are
    grouped by (kx, ky, kz) mod 2.  Each block is LU-factored on build.
    """

    n: int
    kvecs: list[WeightVector]
    matrix: np.ndarray
    _blocks: list[tuple[np.ndarray, tuple]]

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def solve(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec, dtype=float)
        for idx, lu in self._blocks:
            out[idx] = lu_solve(lu, vec[idx])
        return out


def channel_matrix(n: int) -> ChannelMatrix:
    kvecs = enumerate_weight_vectors(n)
    dim = len(kvecs)
    mat = np.zeros((dim, dim))
    for i, kv in enumerate(kvecs):
        for j in range(i, dim):
            val = _channel_entry(n, kv, kvecs[j])
            mat[i, j] = val
            mat[j, i] = val

    classes: dict[tuple[int, int, int], list[int]] = {}
    for i, kv in enumerate(kvecs):
        classes.setdefault((kv.kx % 2, kv.ky % 2, kv.kz % 2), []).append(i)
    blocks = []
    for parity in sorted(classes):
        idx = np.array(classes[parity])
        sub = mat[np.ix_(idx, idx)]
        lu = lu_factor(sub)
        pivots = np.abs(np.diagonal(lu[0]))
        if pivots.min() < 1e-12 * max(pivots.max(), 1e-300):
            raise ValueError(f"near-singular channel block, parity {parity}")
        blocks.append((idx, lu))
    return ChannelMatrix(n, kvecs, mat, blocks)


# -- symmetrized estimator ---------------------------------------------------


def estimate_symmetrized(
    snapshots: list[SymmetrizedSnapshot], obs: BlockOperator, chan: ChannelMatrix
) -> np.ndarray:
    """Per-snapshot unbiased estimates of tr[rho O], as one vector."""
    if obs.n != chan.n:
        raise ValueError("observable and channel sizes differ")
    solved = chan.solve(observable_coords(obs))
    return measurement_matrix(obs.n, snapshots) @ solved


def estimator_symmetrized(
    snapshot: SymmetrizedSnapshot, obs: BlockOperator, chan: ChannelMatrix
) -> float:
    return float(estimate_symmetrized([snapshot], obs, chan)[0])


# -- register ("deep") protocol ----------------------------------------------


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary: QR of a complex Ginibre matrix with
    the R diagonal's phases folded back into Q."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases[np.newaxis, :]


_REGISTER_KEY_BOUND = 1 << 63


def sample_deep(state: SchurState, rng: np.random.Generator) -> DeepSnapshot:
    """One register-shadow snapshot: sector draw, Haar rotation, measurement."""
    n = state.n
    weights = state.sector_weights()
    sectors = sorted(weights)
    wvec = np.array([weights[m] for m in sectors])
    if wvec.min() < NEG_PROB_TOL:
        raise ValueError(f"negative sector weight {wvec.min():.3e}")
    wvec = np.clip(wvec, 0.0, None)
    m = sectors[_sample_index(wvec, rng)]

    key = (int(rng.integers(_REGISTER_KEY_BOUND)), int(rng.integers(_REGISTER_KEY_BOUND)))
    d = n - 2 * m + 1
    v = haar_unitary(d, np.random.Generator(np.random.Philox(key=key)))
    if state.psi is not None:
        probs = np.abs(v @ state.psi) ** 2
    else:
        blk = state.tau[m] / np.trace(state.tau[m]).real
        probs = np.einsum("qi,ij,qj->q", v, blk, v.conj()).real
    q = _sample_index(np.clip(probs, 0.0, None), rng)
    return DeepSnapshot(irrep_m=m, register_seed=key, outcome=q)


def collect_deep(state: SchurState, count: int, seed: int) -> list[DeepSnapshot]:
    """Simulate `count` register-shadow snapshots of `state`."""
    return [sample_deep(state, _substream(seed, idx)) for idx in range(count)]


def register_row(snapshot: DeepSnapshot, n: int) -> np.ndarray:
    """Rebuild V^dag |q> for a deep snapshot from its stored stream key."""
    d = n - 2 * snapshot.irrep_m + 1
    v = haar_unitary(
        d, np.random.Generator(np.random.Philox(key=list(snapshot.register_seed)))
    )
    return v[snapshot.outcome, :].conj()


def estimate_deep(
    snapshots: list[DeepSnapshot],
    obs: BlockOperator,
    rows: list[np.ndarray] | None = None,
) -> np.ndarray:
    """Per-snapshot estimates via the inverse register depolarizing map.

    Each estimate is (d+1) <u|O_m|u> - tr O_m with u = V^dag|q>.  Pass the
    precomputed `rows` ([register_row(s, n) for s in snapshots]) when
    evaluating several observables on the same snapshots.
    """
    if not obs.covers_all:
        raise ValueError("observable must define every sector block")
    n = obs.n
    if rows is None:
        rows = [register_row(s, n) for s in snapshots]
    traces = {m: float(np.trace(obs.block(m)).real) for m in obs.sectors}
    out = np.empty(len(snapshots))
    for i, (snap, u) in enumerate(zip(snapshots, rows)):
        m = snap.irrep_m
        d = n - 2 * m + 1
        val = np.vdot(u, obs.block(m) @ u).real
        out[i] = (d + 1) * val - traces[m]
    return out


def estimator_deep(snapshot: DeepSnapshot, obs: BlockOperator) -> float:
    return float(estimate_deep([snapshot], obs)[0])


# -- aggregation and variance references --------------------------------------


def aggregate_mean(estimates) -> tuple[float, float]:
    """(mean, standard error).  SE is zero for a single estimate."""
    arr = np.asarray(estimates, dtype=float)
    if arr.size == 0:
        raise ValueError("no estimates to aggregate")
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def aggregate_median_of_means(estimates, batches: int) -> tuple[float, float]:
    """Median of `batches` contiguous batch means, with a batch-spread SE.

    One batch reduces to the plain mean.  The quoted error is the standard
    error of the batch means, a scale for the median's fluctuation rather
    than a calibrated confidence radius.
    """
    arr = np.asarray(estimates, dtype=float)
    if arr.size == 0:
        raise ValueError("no estimates to aggregate")
    if not 1 <= batches <= arr.size:
        raise ValueError(f"batches must be in 1..{arr.size}")
    if batches == 1:
        return aggregate_mean(arr)
    means = np.array([chunk.mean() for chunk in np.array_split(arr, batches)])
    se = float(means.std(ddof=1) / math.sqrt(batches))
    return float(np.median(means)), se


def variance_bound_symmetrized(n: int, obs: BlockOperator) -> float:
    """Worst-case single-snapshot variance, (2n+1) * Frobenius norm squared."""
    return (2 * n + 1) * frobenius_norm_squared(obs)


def variance_bound_deep(n: int, obs: BlockOperator) -> float:
    """Worst-case single-snapshot variance, 3(n^2 + 2n + 2) * spectral norm squared."""
    return 3.0 * (n * n + 2 * n + 2) * spectral_norm(obs) ** 2
