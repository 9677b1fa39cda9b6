"""Rauzy graphs, special factors, quasi-Sturmian recognition, and extraction
of (prefix w, substitution S, Sturmian base, rotation number) from a raw word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .contfrac import ContinuedFraction, approximants, expand, value
from .errors import (
    BasePrefixTooShort,
    InconclusiveWindow,
    NoBispecialFound,
    RegenerationMismatch,
    WindowTooLarge,
)
from .words import Word, Substitution, complexity, safe_window, substitute


@dataclass(frozen=True)
class RauzyGraph:
    """G(n): vertices are the length-n factors, edges the length-(n+1) factors.

    Edge axb runs from ax to xb.
    """

    n: int
    vertices: Tuple[Word, ...]
    edges: Tuple[Word, ...]

    def edge_endpoints(self, edge: Word) -> Tuple[Word, Word]:
        return edge[:-1], edge[1:]

    def out_degrees(self) -> Dict[Word, int]:
        deg = {v: 0 for v in self.vertices}
        for e in self.edges:
            deg[e[:-1]] += 1
        return deg

    def in_degrees(self) -> Dict[Word, int]:
        deg = {v: 0 for v in self.vertices}
        for e in self.edges:
            deg[e[1:]] += 1
        return deg


def _distinct_windows(w: Word, n: int) -> List[Word]:
    """Distinct length-n factors of w, in order of first occurrence."""
    if n == 0:
        return [w[:0]]
    wb = w.to_bytes()
    seen = {}
    for i in range(len(w) - n + 1):
        key = wb[i:i + n]
        if key not in seen:
            seen[key] = i
    return [w[i:i + n] for i in sorted(seen.values())]


def rauzy_graph(w: Word, n: int) -> RauzyGraph:
    """Rauzy graph of the factors of w at length n."""
    if n > safe_window(w):
        raise WindowTooLarge(f"n={n} beyond the safe window {safe_window(w)} of |w|={len(w)}")
    return RauzyGraph(
        n=n,
        vertices=tuple(_distinct_windows(w, n)),
        edges=tuple(_distinct_windows(w, n + 1)),
    )


def special_factors(g: RauzyGraph) -> Dict[str, List[Word]]:
    """Right-special (out-degree >= 2), left-special (in-degree >= 2), bispecial."""
    out_deg = g.out_degrees()
    in_deg = g.in_degrees()
    right = [v for v in g.vertices if out_deg[v] >= 2]
    left = [v for v in g.vertices if in_deg[v] >= 2]
    bis = [v for v in right if in_deg[v] >= 2]
    return {"right_special": right, "left_special": left, "bispecial": bis}


@dataclass(frozen=True)
class Classification:
    kind: str  # periodic | sturmian | quasi_sturmian | other
    k: int
    n0: int


_MIN_DETECT_LENGTH = 64


def detect_qs(w: Word, n_max: Optional[int] = None) -> Classification:
    """Classify w by its complexity profile on the safe window.

    For quasi_sturmian, k is the plateau constant in p(n) = n + k and n0 the
    plateau onset. Raises InconclusiveWindow if the profile has not
    stabilized within the window.
    """
    if len(w) < _MIN_DETECT_LENGTH:
        raise InconclusiveWindow(f"word of length {len(w)} too short to classify")
    window = safe_window(w)
    if n_max is None:
        n_max = min(window, 400)
    n_max = min(n_max, window)
    p = complexity(w, n_max)
    # Eventually periodic: complexity bounded, i.e. flat at the tail.
    if p[-1] == p[-2] == p[max(0, n_max // 2)]:
        return Classification("periodic", k=0, n0=0)
    excess = [p[i] - (i + 1) for i in range(n_max)]  # p(n) - n
    k = excess[-1]
    tail_start = None
    for i in range(n_max - 1, -1, -1):
        if excess[i] != k:
            tail_start = i + 1
            break
    else:
        tail_start = 0
    # Require the plateau to fill at least the last quarter of the window.
    if k < 1 or n_max - tail_start < max(4, n_max // 4):
        raise InconclusiveWindow("complexity profile not stabilized; enlarge input")
    n0 = tail_start + 1  # first factor length on the plateau
    if k == 1:
        return Classification("sturmian", k=1, n0=n0)
    return Classification("quasi_sturmian", k=k, n0=n0)


@dataclass(frozen=True)
class Decomposition:
    """Cassaigne decomposition of a quasi-Sturmian window.

    The analyzed window (the first window_length symbols of the input) is
    exactly prefix_w . subst(base_prefix).
    """

    prefix_w: Word
    subst: Substitution
    base_prefix: Word
    theta_estimate: float
    bispecial_length: int
    window_length: int


def _bytes_occurrences(hay: bytes, needle: bytes, stride: int = 1) -> List[int]:
    out = []
    start = 0
    while True:
        i = hay.find(needle, start)
        if i < 0:
            return out
        out.append(i)
        start = i + 1


def cassaigne_decompose(w: Word) -> Decomposition:
    """Extract (prefix, substitution, Sturmian base) via the shortest bispecial
    factor whose two return words generate the window.

    The base letter sequence records which of the two return paths is taken
    at each passage through the bispecial factor; the path extending it by
    the lexicographically smaller symbol is labelled 'a'.
    """
    cls = detect_qs(w)
    if cls.kind not in ("sturmian", "quasi_sturmian"):
        raise NoBispecialFound(f"input classified as {cls.kind}; nothing to decompose")

    wb = w.to_bytes()
    start_n = cls.n0 - 1 if cls.kind == "sturmian" else cls.n0
    start_n = max(0, start_n)
    stop_n = min(safe_window(w), start_n + _MAX_BISPECIAL_SCAN)
    for n in range(start_n, stop_n):
        occ, returns, ext_codes = _return_structure(w, wb, n)
        if occ is None:
            continue
        base_codes = _choice_sequence(wb, occ, returns, ext_codes, n)
        if base_codes is None:
            continue
        base = Word(base_codes, ("a", "b"))
        if not _looks_sturmian(base):
            continue
        lo = sorted(returns)
        subst = Substitution({
            "a": Word(np.frombuffer(returns[lo[0]], dtype=np.uint8).astype(np.int32), w.alphabet),
            "b": Word(np.frombuffer(returns[lo[1]], dtype=np.uint8).astype(np.int32), w.alphabet),
        })
        prefix_w = w[:occ[0]]
        window_length = occ[-1]
        regenerated = prefix_w + substitute(subst, base)
        if regenerated != w[:window_length]:
            raise RegenerationMismatch("internal error: decomposition does not regenerate the window")
        theta = base.count("a") / len(base)
        return Decomposition(
            prefix_w=prefix_w,
            subst=subst,
            base_prefix=base,
            theta_estimate=theta,
            bispecial_length=n,
            window_length=window_length,
        )
    raise NoBispecialFound("no bispecial factor with two Sturmian return paths found; scan more lengths")


_MAX_BISPECIAL_SCAN = 512
_MIN_TAIL_RETURNS = 8


def _recurrent_bispecial(wb: bytes, n: int):
    """The unique bispecial length-n factor among recurrent factors, or None.

    Factors seen only once (transient head, junction artifacts) are ignored:
    they are not factors of the underlying two-sided hull.
    """
    counts: Dict[bytes, int] = {}
    for i in range(len(wb) - n):
        key = wb[i:i + n + 1]
        counts[key] = counts.get(key, 0) + 1
    out_deg: Dict[bytes, int] = {}
    in_deg: Dict[bytes, int] = {}
    for key, c in counts.items():
        if c < 2:
            continue
        out_deg[key[:-1]] = out_deg.get(key[:-1], 0) + 1
        in_deg[key[1:]] = in_deg.get(key[1:], 0) + 1
    right = [v for v, d in out_deg.items() if d >= 2]
    left = [v for v, d in in_deg.items() if d >= 2]
    if len(right) != 1 or len(left) != 1 or right[0] != left[0]:
        return None
    return right[0]


def _return_structure(w: Word, wb: bytes, n: int):
    """Bispecial factor at length n together with its two return words.

    Returns (occurrences, {extension_code: return_bytes}, extension codes) or
    (None, None, None) if length n does not work. Leading occurrences whose
    return word is anomalous (a finite transient before the recurrent
    two-path regime) are dropped.
    """
    if n == 0:
        if len(w.alphabet) < 2:
            return None, None, None
        occ = list(range(len(w)))
    else:
        bis = _recurrent_bispecial(wb, n)
        if bis is None:
            return None, None, None
        occ = _bytes_occurrences(wb, bis)
    if len(occ) < _MIN_TAIL_RETURNS:
        return None, None, None
    pairs = []  # (extension symbol code, return word) per passage
    for j in range(len(occ) - 1):
        ext_pos = occ[j] + n
        if ext_pos >= len(wb):
            break
        pairs.append((wb[ext_pos], wb[occ[j]:occ[j + 1]]))
    # Longest consistent tail: exactly two extensions, each with one return word.
    returns: Dict[int, bytes] = {}
    j0 = 0
    for j in range(len(pairs) - 1, -1, -1):
        ext, r = pairs[j]
        if ext in returns:
            if returns[ext] != r:
                j0 = j + 1
                break
        elif len(returns) == 2:
            j0 = j + 1
            break
        else:
            returns[ext] = r
    if len(returns) != 2 or len(pairs) - j0 < _MIN_TAIL_RETURNS:
        return None, None, None
    return occ[j0:], returns, sorted(returns)


def _choice_sequence(wb: bytes, occ, returns, ext_codes, n):
    """Letter codes (0='a', 1='b') of the path choices, ordered by occurrence."""
    code_of = {ext_codes[0]: 0, ext_codes[1]: 1}
    out = np.empty(len(occ) - 1, dtype=np.int32)
    for j in range(len(occ) - 1):
        ext_pos = occ[j] + n
        if ext_pos >= len(wb):
            return None
        ext = wb[ext_pos]
        if ext not in code_of:
            return None
        if wb[occ[j]:occ[j + 1]] != returns[ext]:
            return None
        out[j] = code_of[ext]
    return out


def _looks_sturmian(base: Word) -> bool:
    """Cheap Sturmian check: p(n) = n + 1 on a short window."""
    if len(base) < _MIN_DETECT_LENGTH:
        return False
    n_max = min(24, safe_window(base))
    if n_max < 2:
        return False
    p = complexity(base, n_max)
    return all(p[i] == i + 2 for i in range(n_max))


def rotation_number(d: Decomposition, refine: int = 20) -> float:
    """Canonical rotation number: empirical frequency of 'a' in the base,
    refined by truncating its continued fraction at `refine` coefficients.
    """
    if len(d.base_prefix) < _MIN_DETECT_LENGTH:
        raise BasePrefixTooShort(f"base prefix of length {len(d.base_prefix)} too short")
    freq = d.base_prefix.count("a") / len(d.base_prefix)
    if not 0.0 < freq < 1.0:
        raise BasePrefixTooShort("degenerate base: single-letter frequency 0 or 1")
    cf, _terminated = expand(freq, refine)
    # Truncate where the convergent resolution exceeds the empirical one:
    # q_n^2 beyond the base length reads noise in the frequency.
    n = len(cf.coeffs)
    while n > 1:
        _, q = approximants(cf, n)
        if q * q <= 4 * len(d.base_prefix):
            break
        n -= 1
    return value(cf, n)


def decomposition_to_json(d: Decomposition) -> dict:
    return {
        "prefix": d.prefix_w.to_str(),
        "substitution": d.subst.to_json(),
        "base_prefix": d.base_prefix.to_str(),
        "theta_estimate": d.theta_estimate,
        "bispecial_length": d.bispecial_length,
        "window_length": d.window_length,
    }
