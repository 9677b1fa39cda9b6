"""Transfer matrices over words and levels, Lyapunov estimates, solution
propagation, local norms, Gordon residuals, and solution growth exponents.

Matrices are plain 2x2 float numpy arrays; products apply the matrix of the
FIRST symbol of a word first (rightmost factor in the product).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from .errors import DegenerateFit, OutOfRange, ZeroInitialCondition
from .tracemap import TraceTriple
from .words import ModelSpec, Word, level_words_prime, qs_prefix


def local_matrix(E: float, v: float) -> np.ndarray:
    """Single-site matrix [[E-v, -1], [1, 0]]; det = 1 exactly."""
    return np.array([[E - v, -1.0], [1.0, 0.0]])


def word_matrix(E: float, w: Word, f) -> np.ndarray:
    """Ordered product of single-site matrices over w, first symbol rightmost.

    f is a mapping from alphabet labels to potential values (a dict or a
    ModelSpec potential).
    """
    values = [f[s] for s in w]
    m11, m12, m21, m22 = 1.0, 0.0, 0.0, 1.0
    for v in values:
        d = E - v
        m11, m12, m21, m22 = d * m11 - m21, d * m12 - m22, m11, m12
    return np.array([[m11, m12], [m21, m22]])


def _matrix_power(M: np.ndarray, k: int) -> np.ndarray:
    result = np.eye(2)
    base = M
    while k:
        if k & 1:
            result = base @ result
        base = base @ base
        k >>= 1
    return result


def level_matrices(spec: ModelSpec, E: float, n_max: int) -> List[np.ndarray]:
    """M(n) for n = -1..n_max (list index i holds M(i-1)).

    M(-1), M(0), M(1) come from the words S(a), S(b), S(s_1); higher levels
    use M(n) = M(n-2) M(n-1)^{a_n}.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    primes = level_words_prime(spec, 1)
    f = spec.potential
    mats = [word_matrix(E, primes[0], f), word_matrix(E, primes[1], f), word_matrix(E, primes[2], f)]
    for n in range(2, n_max + 1):
        a_n = spec.cf.coefficient(n)
        mats.append(mats[n - 1] @ _matrix_power(mats[n], a_n))
    return mats


def initial_triple(spec: ModelSpec, E: float) -> TraceTriple:
    """(x_E(1), y_E(1), z_E(1)) = (tr M(0), tr M(1), tr(M(1) M(0))) / 2."""
    mats = level_matrices(spec, E, 1)
    m0, m1 = mats[1], mats[2]
    return TraceTriple(
        0.5 * (m0[0, 0] + m0[1, 1]),
        0.5 * (m1[0, 0] + m1[1, 1]),
        0.5 * float(np.trace(m1 @ m0)),
    )


def _word_matrix_stack(energies: np.ndarray, w: Word, f) -> np.ndarray:
    """word_matrix vectorized over an energy array; shape (K, 2, 2)."""
    K = len(energies)
    m11 = np.ones(K)
    m12 = np.zeros(K)
    m21 = np.zeros(K)
    m22 = np.ones(K)
    for s in w:
        d = energies - f[s]
        m11, m12, m21, m22 = d * m11 - m21, d * m12 - m22, m11, m12
    out = np.empty((K, 2, 2))
    out[:, 0, 0] = m11
    out[:, 0, 1] = m12
    out[:, 1, 0] = m21
    out[:, 1, 1] = m22
    return out


def _stack_power(M: np.ndarray, k: int) -> np.ndarray:
    result = np.broadcast_to(np.eye(2), M.shape).copy()
    base = M
    while k:
        if k & 1:
            result = base @ result
        base = base @ base
        k >>= 1
    return result


def level_matrices_many(spec: ModelSpec, energies: np.ndarray, n_max: int) -> List[np.ndarray]:
    """level_matrices over an energy array; each entry has shape (K, 2, 2)."""
    energies = np.asarray(energies, dtype=float)
    primes = level_words_prime(spec, 1)
    f = spec.potential
    mats = [
        _word_matrix_stack(energies, primes[0], f),
        _word_matrix_stack(energies, primes[1], f),
        _word_matrix_stack(energies, primes[2], f),
    ]
    for n in range(2, n_max + 1):
        a_n = spec.cf.coefficient(n)
        mats.append(mats[n - 1] @ _stack_power(mats[n], a_n))
    return mats


def initial_triple_many(spec: ModelSpec, energies: np.ndarray
                        ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mats = level_matrices_many(spec, energies, 1)
    m0, m1 = mats[1], mats[2]
    x = 0.5 * (m0[:, 0, 0] + m0[:, 1, 1])
    y = 0.5 * (m1[:, 0, 0] + m1[:, 1, 1])
    prod = m1 @ m0
    z = 0.5 * (prod[:, 0, 0] + prod[:, 1, 1])
    return x, y, z


def half_traces_many(spec: ModelSpec, energies: np.ndarray, n: int) -> np.ndarray:
    """y_E(n) = tr(M_E(n)) / 2 over an energy array."""
    mats = level_matrices_many(spec, energies, max(n, 1))
    M = mats[n + 1]
    return 0.5 * (M[:, 0, 0] + M[:, 1, 1])


# ---------------------------------------------------------------------------
# Lyapunov exponents

_RENORM_EVERY = 64


def _spectral_norms(m11, m12, m21, m22):
    """Largest singular value of each 2x2 in entrywise representation."""
    t = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22
    det = m11 * m22 - m12 * m21
    disc = np.maximum(t * t - 4.0 * det * det, 0.0)
    return np.sqrt(np.maximum(0.5 * (t + np.sqrt(disc)), 0.0))


def lyapunov_many(spec: ModelSpec, energies: np.ndarray, L: int, shift: int = 0) -> np.ndarray:
    """(1/L) ln ||M_E(L)|| (spectral norm) over an energy array, renormalizing
    by the largest entry every 64 steps to avoid overflow.
    """
    if L < 1000:
        raise ValueError("lyapunov requires L >= 1000")
    energies = np.asarray(energies, dtype=float)
    v = spec.potential_values(qs_prefix(spec, L, shift=shift))
    K = len(energies)
    m11 = np.ones(K)
    m12 = np.zeros(K)
    m21 = np.zeros(K)
    m22 = np.ones(K)
    logsum = np.zeros(K)
    for i in range(L):
        d = energies - v[i]
        m11, m12, m21, m22 = d * m11 - m21, d * m12 - m22, m11, m12
        if (i + 1) % _RENORM_EVERY == 0:
            scale = np.maximum.reduce([np.abs(m11), np.abs(m12), np.abs(m21), np.abs(m22)])
            scale = np.where(scale > 0, scale, 1.0)
            m11 /= scale
            m12 /= scale
            m21 /= scale
            m22 /= scale
            logsum += np.log(scale)
    logsum += np.log(_spectral_norms(m11, m12, m21, m22))
    return logsum / L


def lyapunov(spec: ModelSpec, E: float, L: int, shift: int = 0) -> float:
    """Finite-length Lyapunov estimate at a single energy."""
    return float(lyapunov_many(spec, np.array([E]), L, shift=shift)[0])


# ---------------------------------------------------------------------------
# Solutions of the difference equation

@dataclass(frozen=True)
class SolutionSegment:
    """phi(0..L+1) solving phi(n+1) + phi(n-1) + V(n) phi(n) = E phi(n)."""

    values: np.ndarray
    energy: float
    shift: int
    normalized: bool


def solve(spec: ModelSpec, E: float, shift: int, phi0: float, phi1: float, L: int) -> SolutionSegment:
    """Forward three-term recursion with V(n) = f(u(shift + n - 1)), n = 1..L."""
    if phi0 == 0.0 and phi1 == 0.0:
        raise ZeroInitialCondition("initial condition must be nonzero")
    v = spec.potential_values(qs_prefix(spec, L, shift=shift))
    phi = np.empty(L + 2)
    phi[0] = phi0
    phi[1] = phi1
    for n in range(1, L + 1):
        phi[n + 1] = (E - v[n - 1]) * phi[n] - phi[n - 1]
    normalized = abs(phi0 * phi0 + phi1 * phi1 - 1.0) < 1e-12
    return SolutionSegment(phi, E, shift, normalized)


def local_norm(seg: SolutionSegment, L: float) -> float:
    """sqrt( sum_{n<=floor(L)} phi(n)^2 + (L - floor(L)) phi(floor(L)+1)^2 )."""
    phi = seg.values
    if L < 0 or L > len(phi) - 2:
        raise OutOfRange(f"L = {L} outside [0, {len(phi) - 2}]")
    k = int(np.floor(L))
    total = float(np.sum(phi[: k + 1] ** 2)) + (L - k) * float(phi[k + 1] ** 2)
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# Gordon two-block residual

class GordonResult(NamedTuple):
    residual: float
    trace: float


def gordon_residual(spec: ModelSpec, E: float, square: Tuple[int, int, str], shift: int = 0) -> GordonResult:
    """Cayley-Hamilton residual max over canonical initial vectors of
    ||(M^2 - tr(M) M + I) Phi|| for the block word M of a located square,
    alongside the block trace. Unimodularity makes the residual vanish up
    to rounding; the operation validates the square-location pipeline.
    """
    m, n, kind = square
    primes = level_words_prime(spec, n + 1)
    ell = len(primes[n + 1]) + (len(primes[n]) if kind == "composite" else 0)
    block = qs_prefix(spec, ell, shift=shift + m)
    M = word_matrix(E, block, spec.potential)
    tr = float(np.trace(M))
    R = M @ M - tr * M + np.eye(2)
    residual = max(
        float(np.linalg.norm(R @ np.array([1.0, 0.0]))),
        float(np.linalg.norm(R @ np.array([0.0, 1.0]))),
    )
    return GordonResult(residual, tr)


# ---------------------------------------------------------------------------
# Solution growth exponents and the alpha estimate

_N_ANGLES = 32
_ESCAPE_MAGNITUDE = 1e100


@dataclass(frozen=True)
class GrowthExponents:
    gamma1: float
    gamma2: float
    alpha: float
    escaped: bool = False


def growth_exponents(spec: ModelSpec, E: float, shift: int, L_max: int) -> GrowthExponents:
    """Power-law exponents of ||phi||_L over normalized initial conditions.

    Propagates 32 initial-condition angles, fits ln||phi||_L against ln L on
    a dyadic grid, and reports the extreme slopes gamma1 <= gamma2 and
    alpha = 2 gamma1 / (gamma1 + gamma2). Solutions that blow past float
    comfort are flagged as escaped (exponential regime, E off spectrum).
    """
    if L_max < 1000:
        raise ValueError("growth_exponents requires L_max >= 1000")
    angles = np.pi * np.arange(_N_ANGLES) / _N_ANGLES
    phi_prev = np.cos(angles)
    phi_cur = np.sin(angles)
    v = spec.potential_values(qs_prefix(spec, L_max + 1, shift=shift))
    sq_sum = phi_prev**2  # sum over n <= 0
    dyadic = [2**j for j in range(3, int(np.log2(L_max)) + 1)]
    if dyadic[-1] != L_max:
        dyadic.append(L_max)
    norms = np.empty((len(dyadic), _N_ANGLES))
    idx = 0
    escaped = False
    for n in range(1, L_max + 1):
        sq_sum = sq_sum + phi_cur**2
        if idx < len(dyadic) and n == dyadic[idx]:
            norms[idx] = np.sqrt(sq_sum)
            idx += 1
        nxt = (E - v[n - 1]) * phi_cur - phi_prev
        phi_prev, phi_cur = phi_cur, nxt
        if np.max(np.abs(phi_cur)) > _ESCAPE_MAGNITUDE:
            escaped = True
            norms = norms[:idx]
            dyadic = dyadic[:idx]
            break
    if len(dyadic) < 4:
        raise DegenerateFit("not enough dyadic scales before blow-up")
    lnL = np.log(np.asarray(dyadic, dtype=float))
    slopes = np.polyfit(lnL, np.log(norms), 1)[0]
    gamma1 = float(np.min(slopes))
    gamma2 = float(np.max(slopes))
    if gamma1 + gamma2 <= 0.0 or not np.isfinite(gamma1 + gamma2):
        raise DegenerateFit(f"non-positive slope span: gamma1={gamma1}, gamma2={gamma2}")
    alpha = 2.0 * gamma1 / (gamma1 + gamma2)
    return GrowthExponents(gamma1, gamma2, alpha, escaped)
