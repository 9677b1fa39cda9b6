"""Sturmian and quasi-Sturmian words: level words, substitutions, complexity,
palindromes, reflection, square search.

Words are stored as integer-coded numpy arrays together with a label table,
so quasi-Sturmian alphabets of any size work; labels are opaque strings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .contfrac import ContinuedFraction, approximants
from .errors import (
    LengthBudgetExceeded,
    NoCommonSite,
    NotPalindromicDecomposition,
    SymbolOutsideDomain,
    WindowTooLarge,
)

DEFAULT_LENGTH_BUDGET = 50_000_000


class Word:
    """Immutable finite word over a labelled alphabet."""

    __slots__ = ("codes", "alphabet")

    def __init__(self, codes, alphabet: Sequence[str]):
        arr = np.asarray(codes, dtype=np.int32)
        arr.setflags(write=False)
        self.codes = arr
        self.alphabet = tuple(alphabet)
        if len(self.alphabet) > 255:
            raise ValueError("alphabets larger than 255 symbols are not supported")

    @classmethod
    def from_labels(cls, labels: Sequence[str], alphabet: Optional[Sequence[str]] = None) -> "Word":
        if alphabet is None:
            alphabet = sorted(set(labels))
        idx = {s: i for i, s in enumerate(alphabet)}
        try:
            codes = [idx[s] for s in labels]
        except KeyError as e:
            raise SymbolOutsideDomain(f"symbol {e.args[0]!r} not in alphabet {alphabet}") from None
        return cls(codes, alphabet)

    @classmethod
    def from_str(cls, s: str, alphabet: Optional[Sequence[str]] = None) -> "Word":
        return cls.from_labels(list(s), alphabet)

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        for c in self.codes:
            yield self.alphabet[c]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.codes[i], self.alphabet)
        return self.alphabet[self.codes[i]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        if self.alphabet == other.alphabet:
            return np.array_equal(self.codes, other.codes)
        return list(self) == list(other)

    def __hash__(self) -> int:
        return hash((self.alphabet, self.codes.tobytes()))

    def __add__(self, other: "Word") -> "Word":
        if self.alphabet == other.alphabet:
            return Word(np.concatenate([self.codes, other.codes]), self.alphabet)
        alphabet = tuple(sorted(set(self.alphabet) | set(other.alphabet)))
        return Word(
            np.concatenate([self.recode(alphabet).codes, other.recode(alphabet).codes]),
            alphabet,
        )

    def __mul__(self, k: int) -> "Word":
        return Word(np.tile(self.codes, k) if k > 0 else np.empty(0, dtype=np.int32), self.alphabet)

    def __repr__(self) -> str:
        body = self.to_str() if all(len(s) == 1 for s in self.alphabet) and len(self) <= 40 else f"<{len(self)} symbols>"
        return f"Word({body!r})"

    def recode(self, alphabet: Sequence[str]) -> "Word":
        """Same word expressed over a (super)alphabet."""
        alphabet = tuple(alphabet)
        if alphabet == self.alphabet:
            return self
        idx = {s: i for i, s in enumerate(alphabet)}
        try:
            table = np.array([idx[s] for s in self.alphabet], dtype=np.int32)
        except KeyError as e:
            raise SymbolOutsideDomain(f"symbol {e.args[0]!r} not in alphabet {alphabet}") from None
        return Word(table[self.codes] if len(self.codes) else self.codes, alphabet)

    def to_str(self) -> str:
        return "".join(self.alphabet[c] for c in self.codes)

    def to_bytes(self) -> bytes:
        return self.codes.astype(np.uint8).tobytes()

    def count(self, label: str) -> int:
        if label not in self.alphabet:
            return 0
        return int(np.count_nonzero(self.codes == self.alphabet.index(label)))

    def reverse(self) -> "Word":
        return Word(self.codes[::-1].copy(), self.alphabet)


def reflect(w: Word) -> Word:
    """w^R: reverse the symbol order."""
    return w.reverse()


@dataclass(frozen=True)
class Substitution:
    """Letter-to-word morphism, extended to words by concatenation."""

    images: Mapping[str, Word]

    def __post_init__(self):
        object.__setattr__(self, "images", dict(self.images))
        for letter, img in self.images.items():
            if len(img) == 0:
                raise ValueError(f"substitution image of {letter!r} must be nonempty")

    @classmethod
    def from_strings(cls, images: Mapping[str, str]) -> "Substitution":
        alphabet = tuple(sorted({c for img in images.values() for c in img}))
        return cls({k: Word.from_str(v, alphabet) for k, v in images.items()})

    @classmethod
    def identity(cls, alphabet: Sequence[str] = ("a", "b")) -> "Substitution":
        alphabet = tuple(alphabet)
        return cls({s: Word.from_labels([s], alphabet) for s in alphabet})

    @property
    def domain(self) -> Tuple[str, ...]:
        return tuple(sorted(self.images))

    @property
    def target_alphabet(self) -> Tuple[str, ...]:
        return tuple(sorted({s for img in self.images.values() for s in img.alphabet}))

    def is_aperiodic(self) -> bool:
        """S(ab) != S(ba) on a two-letter domain."""
        dom = self.domain
        if len(dom) != 2:
            raise ValueError("aperiodicity test requires a two-letter domain")
        a, b = dom
        return self.images[a] + self.images[b] != self.images[b] + self.images[a]

    def to_json(self) -> dict:
        return {k: v.to_str() for k, v in sorted(self.images.items())}


def substitute(s: Substitution, w: Word) -> Word:
    """Morphic image S(w); |S(w)| = sum of image lengths."""
    alphabet = s.target_alphabet
    pieces = []
    for letter in w.alphabet:
        if letter in s.images:
            pieces.append(s.images[letter].recode(alphabet).codes)
        else:
            pieces.append(None)
    out = []
    for c in w.codes:
        img = pieces[c]
        if img is None:
            raise SymbolOutsideDomain(f"symbol {w.alphabet[c]!r} outside substitution domain")
        out.append(img)
    if not out:
        return Word(np.empty(0, dtype=np.int32), alphabet)
    return Word(np.concatenate(out), alphabet)


def reflect_subst(s: Substitution) -> Substitution:
    """S^R: reverse each image."""
    return Substitution({k: v.reverse() for k, v in s.images.items()})


@dataclass(frozen=True)
class ModelSpec:
    """Quasi-Sturmian model u = prefix . S(c_theta) with a potential map f."""

    cf: ContinuedFraction
    subst: Substitution
    prefix: Word
    potential: Mapping[str, float]
    allow_non_injective: bool = False

    def __post_init__(self):
        object.__setattr__(self, "potential", dict(self.potential))
        values = list(self.potential.values())
        if not self.allow_non_injective and len(set(values)) != len(values):
            raise ValueError("potential map must be injective (or set allow_non_injective)")
        for s in self.subst.target_alphabet:
            if s not in self.potential:
                raise ValueError(f"potential undefined for alphabet symbol {s!r}")

    def potential_values(self, w: Word) -> np.ndarray:
        """f applied symbol-wise; energy units."""
        try:
            table = np.array([self.potential[s] for s in w.alphabet], dtype=float)
        except KeyError as e:
            raise SymbolOutsideDomain(f"symbol {e.args[0]!r} outside potential domain") from None
        return table[w.codes]

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "cf": self.cf.to_json(),
            "substitution": self.subst.to_json(),
            "prefix": self.prefix.to_str(),
            "potential": {k: float(v) for k, v in sorted(self.potential.items())},
            "allow_non_injective": self.allow_non_injective,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ModelSpec":
        subst = Substitution.from_strings(d["substitution"])
        alphabet = subst.target_alphabet
        prefix = Word.from_str(d.get("prefix", ""), alphabet)
        return cls(
            cf=ContinuedFraction.from_json(d["cf"]),
            subst=subst,
            prefix=prefix,
            potential={k: float(v) for k, v in d["potential"].items()},
            allow_non_injective=bool(d.get("allow_non_injective", False)),
        )


AB = ("a", "b")


def sturmian_levels(cf: ContinuedFraction, n_max: int,
                    max_length: int = DEFAULT_LENGTH_BUDGET) -> List[Word]:
    """Level words s_{-1}..s_{n_max}; returned list index i holds s_{i-1}.

    s_{-1} = a, s_0 = b, s_1 = b^{a_1 - 1} a, s_n = s_{n-1}^{a_n} s_{n-2}.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _, q = approximants(cf, n_max)
    if q > max_length:
        raise LengthBudgetExceeded(f"|s_{n_max}| = {q} exceeds budget {max_length}")
    a_word = Word.from_str("a", AB)
    b_word = Word.from_str("b", AB)
    levels = [a_word, b_word]
    a1 = cf.coefficient(1)
    levels.append(b_word * (a1 - 1) + a_word)
    for n in range(2, n_max + 1):
        a_n = cf.coefficient(n)
        levels.append(levels[-1] * a_n + levels[-2])
    return levels


def characteristic_prefix(cf: ContinuedFraction, length: int,
                          max_length: int = DEFAULT_LENGTH_BUDGET) -> Word:
    """First `length` symbols of c_theta = lim s_n."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if length > max_length:
        raise LengthBudgetExceeded(f"requested length {length} exceeds budget {max_length}")
    n = 1
    while True:
        _, q = approximants(cf, n)
        if q >= length:
            break
        n += 1
    return sturmian_levels(cf, n, max_length=max(max_length, q))[n + 1][:length]


def level_words_prime(spec: ModelSpec, n_max: int,
                      max_length: int = DEFAULT_LENGTH_BUDGET) -> List[Word]:
    """s'_n = S(s_n) for n = -1..n_max; list index i holds s'_{i-1}."""
    ell = max(len(img) for img in spec.subst.images.values())
    levels = sturmian_levels(spec.cf, n_max, max_length=max(1, max_length // ell))
    return [substitute(spec.subst, s) for s in levels]


def qs_prefix(spec: ModelSpec, length: int, shift: int = 0,
              max_length: int = DEFAULT_LENGTH_BUDGET) -> Word:
    """Symbols shift..shift+length-1 of u = prefix . S(c_theta)."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if shift < 0:
        raise ValueError("shift must be >= 0")
    need = shift + length
    if need > max_length:
        raise LengthBudgetExceeded(f"window end {need} exceeds budget {max_length}")
    ell_min = min(len(img) for img in spec.subst.images.values())
    base_need = max(1, -(-max(1, need - len(spec.prefix)) // ell_min))
    base = characteristic_prefix(spec.cf, base_need, max_length=max_length)
    u = spec.prefix.recode(spec.subst.target_alphabet) + substitute(spec.subst, base)
    while len(u) < need:
        base_need *= 2
        base = characteristic_prefix(spec.cf, base_need, max_length=max_length)
        u = spec.prefix.recode(spec.subst.target_alphabet) + substitute(spec.subst, base)
    return u[shift:need]


# ---------------------------------------------------------------------------
# factor complexity via suffix array (exact counts on the finite word)

def _suffix_array(codes: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling with numpy sorts; O(n log^2 n)."""
    n = len(codes)
    rank = np.asarray(codes, dtype=np.int64)
    sa = np.argsort(rank, kind="stable")
    k = 1
    while k < n:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:]
        order = np.lexsort((key2, rank))
        pair = np.stack([rank[order], key2[order]])
        new_rank = np.empty(n, dtype=np.int64)
        changed = np.ones(n, dtype=bool)
        changed[1:] = (pair[:, 1:] != pair[:, :-1]).any(axis=0)
        new_rank[order] = np.cumsum(changed) - 1
        rank = new_rank
        sa = order
        if rank[order[-1]] == n - 1:
            break
        k *= 2
    return sa


def _lcp_array(codes: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai: lcp[i] = lcp(suffix sa[i], suffix sa[i+1])."""
    n = len(codes)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(max(n - 1, 0), dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and codes[i + h] == codes[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp


def complexity(w: Word, n_max: int) -> List[int]:
    """Exact factor counts p(1..n_max) of the finite word w.

    Counts undercount the infinite word near the edge; trust n <= |w|/4
    when inferring properties of an infinite sequence.
    """
    N = len(w)
    if n_max >= N:
        raise WindowTooLarge(f"n_max {n_max} must be < |w| = {N}")
    if n_max < 1:
        return []
    sa = _suffix_array(w.codes)
    lcp = np.sort(_lcp_array(w.codes, sa))
    ns = np.arange(1, n_max + 1)
    # distinct length-n factors = windows (N-n+1) minus repeats (lcp >= n)
    repeats = len(lcp) - np.searchsorted(lcp, ns, side="left")
    return [int(x) for x in (N - ns + 1) - repeats]


SAFE_WINDOW_DIVISOR = 4


def safe_window(w: Word) -> int:
    """Largest factor length whose count is trusted as the infinite word's."""
    return len(w) // SAFE_WINDOW_DIVISOR


# ---------------------------------------------------------------------------

def palindrome_split(s_n: Word, n: int, strict_parity: bool = False) -> Tuple[Word, Word]:
    """Split a level word s_n (n >= 2) as palindrome . two-symbol tail.

    Returns (pi_n, tail) with s_n = pi_n tail, tail two distinct symbols and
    pi_n = pi_n^R. With strict_parity, the tail must also match the parity
    labelling (even n: 'ab', odd n: 'ba' under the a,b alphabet).
    """
    if n < 2:
        raise ValueError("palindrome_split requires n >= 2")
    if len(s_n) < 2:
        raise NotPalindromicDecomposition("word too short for a two-symbol tail")
    pi, tail = s_n[:-2], s_n[-2:]
    if len(tail) == 2 and tail[0] == tail[1]:
        raise NotPalindromicDecomposition("tail symbols are equal; not a level word")
    if pi != pi.reverse():
        raise NotPalindromicDecomposition("core is not a palindrome; not a level word")
    if strict_parity:
        expected = ("a", "b") if n % 2 == 0 else ("b", "a")
        if (tail[0], tail[1]) != expected:
            raise NotPalindromicDecomposition(
                f"tail {tail.to_str()!r} violates parity convention for n={n}"
            )
    return pi, tail


# ---------------------------------------------------------------------------
# Gordon square search

def _rotations(wb: bytes) -> set:
    ell = len(wb)
    doubled = wb + wb
    return {doubled[i:i + ell] for i in range(ell)}


def find_squares(spec: ModelSpec, shift: int, n_max: int,
                 max_length: int = DEFAULT_LENGTH_BUDGET) -> List[Tuple[int, int, str]]:
    """Squares ww with w a cyclic conjugate of s'_n (single) or s'_n s'_{n-1}
    (composite), one per level n = 2..n_max, all starting at a common site m.

    Positions are indices into the shifted sequence. Raises NoCommonSite if
    the bounded scan window holds no site shared by all levels.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    primes = level_words_prime(spec, n_max, max_length=max_length)
    ell_max = len(primes[n_max + 1]) + len(primes[n_max])
    window = 4 * len(primes[n_max + 1])
    scan_len = window + 2 * ell_max + 1
    u = qs_prefix(spec, scan_len, shift=shift, max_length=max_length)
    ub = u.to_bytes()

    per_level: List[Dict[int, str]] = []
    for n in range(2, n_max + 1):
        sn = primes[n + 1]
        found: Dict[int, str] = {}
        for kind, block in (("single", sn), ("composite", sn + primes[n])):
            ell = len(block)
            rots = _rotations(block.recode(u.alphabet).to_bytes())
            for m in range(window):
                if m in found:
                    continue
                cand = ub[m:m + ell]
                if cand == ub[m + ell:m + 2 * ell] and cand in rots:
                    found[m] = kind
        per_level.append(found)

    common = set(per_level[0])
    for found in per_level[1:]:
        common &= set(found)
    if not common:
        raise NoCommonSite(
            f"no common square site for levels 2..{n_max} within window {window}; enlarge and retry"
        )
    m = min(common)
    return [(m, n, per_level[n - 2][m]) for n in range(2, n_max + 1)]
