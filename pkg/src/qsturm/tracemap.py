"""The quasi-Sturmian trace map: Chebyshev-form step, group generators,
elementary-block orbits, conserved invariant, and escape classification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .words import ModelSpec


class TraceTriple(NamedTuple):
    """Half-trace triple (x, y, z)."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class OrbitVerdict:
    """Outcome of orbit classification.

    kind is "bounded" or "escaped"; escape_step is the trace-map level at
    which the orbit entered the escape set. sup_norm is the largest
    Euclidean norm seen on the orbit. overflow marks orbits that exceeded
    float range before formally entering the escape set (classified escaped).
    """

    kind: str
    steps_checked: int
    escape_step: Optional[int]
    sup_norm: float
    invariant: float
    overflow: bool = False


def chebyshev(m: int, x: float) -> float:
    """Second-kind Chebyshev value U_m(x): U_{-1}=0, U_0=1, upward recursion."""
    if m < -1:
        raise ValueError("chebyshev requires m >= -1")
    if m == -1:
        return 0.0 * x
    prev, cur = 0.0 * x, 1.0 + 0.0 * x
    for _ in range(m):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def step(a_next: int, t: TraceTriple) -> TraceTriple:
    """One trace-map level: (x,y,z) -> (y, z U_{a-1}(y) - x U_{a-2}(y), z U_a(y) - x U_{a-1}(y))."""
    if a_next < 1:
        raise ValueError("coefficient must be >= 1")
    x, y, z = t
    u_m2 = chebyshev(a_next - 2, y)
    u_m1 = chebyshev(a_next - 1, y)
    u_0 = 2.0 * y * u_m1 - u_m2  # U_a
    return TraceTriple(y, z * u_m1 - x * u_m2, z * u_0 - x * u_m1)


def generators(name: str, t: TraceTriple) -> TraceTriple:
    """Apply one generator of the invariant-preserving group: p, u, v, q, q_inv."""
    x, y, z = t
    if name == "p":
        return TraceTriple(y, x, z)
    if name == "u":
        return TraceTriple(z, y, 2.0 * y * z - x)
    if name == "v":
        return TraceTriple(y, x, 2.0 * x * y - z)
    if name == "q":
        return TraceTriple(y, z, x)
    if name == "q_inv":
        return TraceTriple(z, x, y)
    raise ValueError(f"unknown generator {name!r}")


def invariant(t: TraceTriple) -> float:
    """Fricke-Vogt invariant x^2 + y^2 + z^2 - 2xyz - 1."""
    x, y, z = t
    return x * x + y * y + z * z - 2.0 * x * y * z - 1.0


def in_escape(t: TraceTriple) -> bool:
    """Membership in the absorbing region {|y|>1, |z|>1, |yz|>|x|} (strict)."""
    x, y, z = t
    return abs(y) > 1.0 and abs(z) > 1.0 and abs(y * z) > abs(x)


# Elementary blocks of the orientation-preserving rewriting: vq equals u,
# vq^{-1} fixes x and maps (x,y,z) -> (x, z, 2xz - y).

def _block_vq(x, y, z):
    return z, y, 2.0 * y * z - x


def _block_vq_inv(x, y, z):
    return x, z, 2.0 * x * z - y


OVERFLOW_THRESHOLD = 1e150


def _block_plan(spec: ModelSpec, n_levels: int):
    """Yield (coefficient index j, block function, multiplicity a_j).

    Coefficient a_j (j even -> vq blocks, j odd -> vq^{-1} blocks) completes
    trace-map level j when all its blocks have been applied.
    """
    for j in range(2, n_levels + 1):
        a = spec.cf.coefficient(j)
        yield j, (_block_vq if j % 2 == 0 else _block_vq_inv), a


def classify_orbit(spec: ModelSpec, E: float, n_levels: int) -> OrbitVerdict:
    """Drive the initial half-trace triple through the trace-map orbit,
    testing the escape predicate after every completed level.

    The escape set is absorbing for completed-level triples (each map is
    p composed with powers of u, and u maps the set into itself), so the
    first hit settles the verdict; otherwise the orbit is bounded over
    n_levels levels with the recorded sup norm. Intermediate half-block
    states may graze the set spuriously and are not tested.
    """
    from .transfer import initial_triple

    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    t = initial_triple(spec, E)
    inv = invariant(t)
    x, y, z = t
    sup = float(np.sqrt(x * x + y * y + z * z))
    for n in range(2, n_levels + 1):
        x, y, z = step(spec.cf.coefficient(n), TraceTriple(x, y, z))
        biggest = max(abs(x), abs(y), abs(z))
        if not np.isfinite(biggest) or biggest > OVERFLOW_THRESHOLD:
            return OrbitVerdict("escaped", n, n, sup, inv, overflow=True)
        if abs(y) > 1.0 and abs(z) > 1.0 and abs(y * z) > abs(x):
            return OrbitVerdict("escaped", n, n, sup, inv)
        sup = max(sup, float(np.sqrt(x * x + y * y + z * z)))
    return OrbitVerdict("bounded", n_levels, None, sup, inv)


def classify_many(spec: ModelSpec, energies: np.ndarray, n_levels: int
                  ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized classification over an energy grid.

    Returns (escaped mask, escape step or -1, sup norm, invariant) arrays.
    Escaped entries freeze at their escape-time state, so the sweep is
    independent of grid partitioning.
    """
    from .transfer import initial_triple_many

    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    x, y, z = initial_triple_many(spec, np.asarray(energies, dtype=float))
    inv = x * x + y * y + z * z - 2.0 * x * y * z - 1.0
    sup = np.sqrt(x * x + y * y + z * z)
    escaped = np.zeros(x.shape, dtype=bool)
    escape_step = np.full(x.shape, -1, dtype=np.int64)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(2, n_levels + 1):
            if escaped.all():
                return escaped, escape_step, sup, inv
            nx, ny, nz = step(spec.cf.coefficient(n), TraceTriple(x, y, z))
            live = ~escaped
            x = np.where(live, nx, x)
            y = np.where(live, ny, y)
            z = np.where(live, nz, z)
            biggest = np.maximum(np.abs(x), np.maximum(np.abs(y), np.abs(z)))
            blown = live & (~np.isfinite(biggest) | (biggest > OVERFLOW_THRESHOLD))
            hit = live & (np.abs(y) > 1.0) & (np.abs(z) > 1.0) & (np.abs(y * z) > np.abs(x))
            new = blown | hit
            escape_step[new] = n
            escaped |= new
            live = ~escaped
            norm = np.sqrt(x * x + y * y + z * z)
            sup = np.where(live & (norm > sup), norm, sup)
    return escaped, escape_step, sup, inv


def orbit_trace(spec: ModelSpec, E: float, n_levels: int) -> List[TraceTriple]:
    """Per-level triples (x_E(n), y_E(n), z_E(n)) for n = 1..n_levels."""
    from .transfer import initial_triple

    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    t = initial_triple(spec, E)
    out = [t]
    for n in range(1, n_levels):
        t = step(spec.cf.coefficient(n + 1), t)
        out.append(t)
    return out
