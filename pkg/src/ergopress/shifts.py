"""Shift spaces, words, cylinders and locally constant potentials.

A subshift of finite type is described by a 0/1 adjacency matrix over a
finite alphabet.  Points are one- or two-sided symbol sequences whose
consecutive pairs are allowed by the matrix.  The metric is the standard
one: d(x, y) = 2**(-j) where j is the first index at which x and y differ
(for two-sided sequences, the smallest |index|).  Cylinder sets are then
balls of dyadic diameter, which is what makes cover refinement exact.

Potentials are locally constant of finite depth r: the value at a point
depends only on its first r coordinates, so Birkhoff sums over cylinders
have exact suprema (plain table sums once the word is long enough).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

ONE_SIDED = "one-sided"
TWO_SIDED = "two-sided"


class ShiftSystem:
    """Finite-alphabet subshift of finite type.

    Parameters
    ----------
    adjacency : array-like of 0/1, square
        adjacency[a, b] == 1 iff the symbol b may follow a.
    sidedness : "one-sided" or "two-sided"
    """

    def __init__(self, adjacency, sidedness: str = ONE_SIDED):
        A = np.asarray(adjacency, dtype=np.int64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.isin(A, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        k = A.shape[0]
        if k < 2:
            raise ValueError("invalid-system: alphabet size must be >= 2")
        if (A.sum(axis=1) == 0).any() or (A.sum(axis=0) == 0).any():
            raise ValueError("invalid-system: adjacency has a dead symbol "
                             "(zero row or column)")
        if sidedness not in (ONE_SIDED, TWO_SIDED):
            raise ValueError(f"unknown sidedness {sidedness!r}")
        self.adjacency = A
        self.adjacency.setflags(write=False)
        self.alphabet_size = k
        self.sidedness = sidedness
        self.irreducible = _is_irreducible(A)

    @property
    def is_full_shift(self) -> bool:
        return bool((self.adjacency == 1).all())

    def allows(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a, b])

    def is_admissible(self, symbols) -> bool:
        """True iff every consecutive pair of symbols is adjacency-allowed."""
        s = tuple(symbols)
        if any(not (0 <= a < self.alphabet_size) for a in s):
            return False
        A = self.adjacency
        return all(A[s[i], s[i + 1]] for i in range(len(s) - 1))

    def word_count(self, n: int) -> int:
        """Number of admissible words of length n (sum of entries of A^(n-1))."""
        if n < 1:
            raise ValueError("n must be >= 1")
        power = np.linalg.matrix_power(self.adjacency.astype(object), n - 1)
        return int(power.sum())

    def __repr__(self):
        return (f"ShiftSystem(k={self.alphabet_size}, {self.sidedness}, "
                f"irreducible={self.irreducible})")


def _is_irreducible(A: np.ndarray) -> bool:
    # every state reaches every state: (I + A)^(k-1) has no zero entry
    k = A.shape[0]
    reach = np.eye(k, dtype=bool) | A.astype(bool)
    power = np.linalg.matrix_power(reach.astype(np.int64), k)
    return bool((power > 0).all())


def make_full_shift(k: int, sidedness: str = ONE_SIDED) -> ShiftSystem:
    """Full shift on k >= 2 symbols (all transitions allowed)."""
    if k < 2:
        raise ValueError("invalid-system: full shift needs k >= 2")
    return ShiftSystem(np.ones((k, k), dtype=np.int64), sidedness)


def golden_mean_shift(sidedness: str = ONE_SIDED) -> ShiftSystem:
    """Two symbols, the word 11 forbidden."""
    return ShiftSystem([[1, 1], [1, 0]], sidedness)


@dataclass(frozen=True)
class Word:
    """Admissible finite word of a shift system."""

    symbols: tuple
    system: ShiftSystem = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(a) for a in self.symbols))
        if len(self.symbols) == 0:
            raise ValueError("words must be nonempty")
        if not self.system.is_admissible(self.symbols):
            raise ValueError(f"word {self.symbols} is not admissible")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True)
class CylinderSet:
    """Set of sequences matching base_word starting at start_index.

    One-sided systems only use start_index 0.  The cylinder is nonempty by
    construction because Word validates admissibility.
    """

    base_word: Word
    start_index: int = 0

    def __post_init__(self):
        if self.base_word.system.sidedness == ONE_SIDED and self.start_index != 0:
            raise ValueError("one-sided cylinders start at index 0")

    @property
    def depth(self) -> int:
        return len(self.base_word)

    def diameter(self) -> float:
        """Diameter under d(x,y) = 2**(-first disagreement).

        Two-sided: 2**(-k) with k the smallest |index| outside the
        constrained window (two points in the cylinder can disagree
        anywhere outside it).
        """
        m = len(self.base_word)
        i = self.start_index
        if self.base_word.system.sidedness == ONE_SIDED:
            return 2.0 ** (-m)
        lo, hi = i, i + m - 1
        if lo > 0 or hi < 0:
            return 1.0
        return 2.0 ** (-min(abs(lo - 1), abs(hi + 1)))


def admissible_words(system: ShiftSystem, n: int) -> list[Word]:
    """All admissible words of length n, lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [Word(s, system) for s in iter_admissible_tuples(system.adjacency, n)]


def iter_admissible_tuples(adjacency: np.ndarray, n: int) -> Iterable[tuple]:
    """Yield raw symbol tuples of length n admissible for the 0/1 matrix."""
    k = adjacency.shape[0]
    follow = [tuple(np.flatnonzero(adjacency[a]).tolist()) for a in range(k)]

    def extend(prefix):
        if len(prefix) == n:
            yield prefix
            return
        for b in follow[prefix[-1]]:
            yield from extend(prefix + (b,))

    for a in range(k):
        yield from extend((a,))


def admissible_word_array(system: ShiftSystem, n: int,
                          max_words: int = 5_000_000) -> np.ndarray:
    """All admissible words of length n as one integer array (rows in
    lexicographic order), grown level by level; raises when the count
    would exceed ``max_words``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if system.word_count(n) > max_words:
        raise ValueError(f"more than {max_words} admissible words at depth {n}")
    k = system.alphabet_size
    dtype = np.int8 if k < 128 else np.int16
    words = np.arange(k, dtype=dtype)[:, None]
    for _ in range(n - 1):
        pieces = []
        for b in range(k):
            allowed = system.adjacency[:, b].astype(bool)
            rows = words[allowed[words[:, -1]]]
            pieces.append(np.hstack([rows,
                                     np.full((len(rows), 1), b, dtype=dtype)]))
        words = np.concatenate(pieces)
        order = np.lexsort(words.T[::-1])
        words = words[order]
    return words


class Potential:
    """Locally constant potential of depth r >= 1.

    ``table`` maps every admissible r-word (tuple of symbols) to a real
    value; evaluation at a point only reads coordinates 0..r-1.
    """

    def __init__(self, system: ShiftSystem, depth: int,
                 table: Mapping[tuple, float], name: str = ""):
        if depth < 1:
            raise ValueError("potential depth must be >= 1")
        self.system = system
        self.depth = int(depth)
        self.name = name
        tab = {}
        for key, val in table.items():
            key = tuple(int(a) for a in key)
            if len(key) != depth:
                raise ValueError(f"table key {key} has wrong length")
            if not system.is_admissible(key):
                raise ValueError(f"table key {key} is not admissible")
            val = float(val)
            if not np.isfinite(val):
                raise ValueError("potential values must be finite")
            tab[key] = val
        for s in iter_admissible_tuples(system.adjacency, depth):
            if s not in tab:
                raise ValueError(f"table misses admissible word {s}")
        self.table = tab

    @classmethod
    def zero(cls, system: ShiftSystem) -> "Potential":
        return cls.depth_one(system, [0.0] * system.alphabet_size, name="zero")

    @classmethod
    def constant(cls, system: ShiftSystem, c: float) -> "Potential":
        return cls.depth_one(system, [c] * system.alphabet_size,
                             name=f"const({c})")

    @classmethod
    def depth_one(cls, system: ShiftSystem, values, name: str = "") -> "Potential":
        values = list(values)
        if len(values) != system.alphabet_size:
            raise ValueError("need one value per symbol")
        return cls(system, 1, {(a,): v for a, v in enumerate(values)}, name)

    def value(self, block) -> float:
        return self.table[tuple(block)]

    def sup_norm(self) -> float:
        return max(abs(v) for v in self.table.values())

    def sup_minus(self, other: "Potential") -> float:
        """sup |self - other| over the space (tables must share the system)."""
        if other.system is not self.system and \
                not np.array_equal(other.system.adjacency, self.system.adjacency):
            raise ValueError("potentials live on different systems")
        r = max(self.depth, other.depth)
        best = 0.0
        for s in iter_admissible_tuples(self.system.adjacency, r):
            best = max(best, abs(self.value(s[:self.depth])
                                 - other.value(s[:other.depth])))
        return best

    def scaled(self, q: float) -> "Potential":
        return Potential(self.system, self.depth,
                         {k: q * v for k, v in self.table.items()},
                         name=f"{q}*{self.name}" if self.name else "")

    def word_sum(self, symbols, n: int) -> float:
        """Sum of the first n depth-r windows of ``symbols`` (needs len >= n+r-1)."""
        s = tuple(symbols)
        r = self.depth
        if len(s) < n + r - 1:
            raise ValueError("word too short for an exact Birkhoff sum")
        return sum(self.table[s[j:j + r]] for j in range(n))

    def oscillation(self, cover_depth: int) -> float:
        """Largest variation of the potential over a depth-t cylinder.

        Zero as soon as cover_depth >= depth; otherwise group table rows by
        their length-t prefix and take the worst max-min spread.
        """
        t = cover_depth
        if t >= self.depth:
            return 0.0
        spread: dict[tuple, list] = {}
        for key, val in self.table.items():
            spread.setdefault(key[:t], []).append(val)
        return max(max(vs) - min(vs) for vs in spread.values())


def birkhoff_sup(potential: Potential, word: Word, n: int) -> float:
    """Exact sup over the cylinder of ``word`` of the n-term Birkhoff sum.

    With len(word) >= n + depth - 1 every summand is determined and the
    value is a plain table sum.  Shorter words leave some summands free
    and the supremum runs over all admissible extensions (finitely many,
    enumerated exactly), which keeps the value well defined for any
    nonempty word.
    """
    r = potential.depth
    s = tuple(word)
    if n < 1:
        raise ValueError("n must be >= 1")
    need = n + r - 1
    if len(s) >= need:
        return potential.word_sum(s, n)
    A = word.system.adjacency
    missing = need - len(s)
    best = -np.inf
    for tail in iter_admissible_tuples(A, missing + 1):
        if tail[0] != s[-1]:
            continue
        best = max(best, potential.word_sum(s + tail[1:], n))
    if best == -np.inf:  # dead-symbol-free systems always extend
        raise RuntimeError("no admissible extension found")
    return best


class SubsetSpec:
    """Subset of the shift space: everything, a sub-SFT, or a cylinder union.

    Sub-SFT specs are reduced at construction: symbols whose rows or
    columns die out are stripped until every surviving symbol has a
    successor and a predecessor, so that a word meets the subset exactly
    when it is admissible for the reduced matrix.  Cylinder unions are
    reduced to an antichain (no listed word extends another).
    """

    WHOLE = "whole-space"
    SUB_SFT = "sub-SFT"
    CYLINDERS = "cylinder-union"

    def __init__(self, kind: str, system: ShiftSystem, *,
                 sub_adjacency=None, words=None):
        self.kind = kind
        self.system = system
        self.sub_adjacency = None
        self.words: tuple = ()
        if kind == self.WHOLE:
            pass
        elif kind == self.SUB_SFT:
            B = np.asarray(sub_adjacency, dtype=np.int64)
            if B.shape != system.adjacency.shape:
                raise ValueError("sub-adjacency shape mismatch")
            if (B > system.adjacency).any():
                raise ValueError("sub-adjacency must be entrywise <= parent")
            self.sub_adjacency = _reduce_to_live(B)
        elif kind == self.CYLINDERS:
            ws = [tuple(int(a) for a in w) for w in (words or [])]
            for w in ws:
                if not system.is_admissible(w):
                    raise ValueError(f"cylinder word {w} not admissible in parent")
            self.words = _prefix_antichain(ws)
        else:
            raise ValueError(f"unknown subset kind {kind!r}")

    @classmethod
    def whole(cls, system: ShiftSystem) -> "SubsetSpec":
        return cls(cls.WHOLE, system)

    @classmethod
    def sub_sft(cls, system: ShiftSystem, sub_adjacency) -> "SubsetSpec":
        return cls(cls.SUB_SFT, system, sub_adjacency=sub_adjacency)

    @classmethod
    def cylinders(cls, system: ShiftSystem, words) -> "SubsetSpec":
        return cls(cls.CYLINDERS, system, words=words)

    @classmethod
    def fixed_point(cls, system: ShiftSystem, symbol: int) -> "SubsetSpec":
        """The single periodic point symbol^infinity, as an invariant sub-SFT."""
        if not system.allows(symbol, symbol):
            raise ValueError(f"symbol {symbol} has no self-loop")
        B = np.zeros_like(system.adjacency)
        B[symbol, symbol] = 1
        return cls.sub_sft(system, B)

    @property
    def is_empty(self) -> bool:
        if self.kind == self.SUB_SFT:
            return not self.sub_adjacency.any()
        if self.kind == self.CYLINDERS:
            return len(self.words) == 0
        return False

    def meets_word(self, symbols) -> bool:
        """Does the cylinder of ``symbols`` intersect the subset?

        Exact for all three kinds: whole-space cylinders always meet;
        a sub-SFT is met iff the word is admissible for the reduced
        sub-adjacency; a cylinder union is met iff the word extends or is
        a prefix of a listed word.
        """
        s = tuple(symbols)
        if self.kind == self.WHOLE:
            return self.system.is_admissible(s)
        if self.kind == self.SUB_SFT:
            B = self.sub_adjacency
            return all(B[s[i], s[i + 1]] for i in range(len(s) - 1)) and \
                all(B[a].any() for a in s)
        return any(w[:len(s)] == s or s[:len(w)] == w for w in self.words)

    def __repr__(self):
        if self.kind == self.CYLINDERS:
            return f"SubsetSpec(cylinders x{len(self.words)})"
        return f"SubsetSpec({self.kind})"


def _reduce_to_live(B: np.ndarray) -> np.ndarray:
    """Drop transitions into symbols that cannot continue forever.

    One-sided semantics: a word meets the sub-SFT iff its transitions are
    allowed and its last symbol still has an infinite continuation; a
    missing predecessor does not matter at position 0.
    """
    B = B.copy()
    while True:
        live = B.sum(axis=1) > 0
        trimmed = B * live[None, :]
        if (trimmed == B).all():
            B.setflags(write=False)
            return B
        B = trimmed


def _prefix_antichain(words: list[tuple]) -> tuple:
    """Drop words that extend a shorter listed word (their cylinders are
    contained in the shorter word's cylinder)."""
    keep = []
    kept_by_len: dict[int, set] = {}
    for w in sorted(set(words), key=len):
        if any(w[:length] in kept for length, kept in kept_by_len.items()):
            continue
        keep.append(w)
        kept_by_len.setdefault(len(w), set()).add(w)
    return tuple(keep)


def two_sided_cylinder_trace(cylinder: CylinderSet) -> SubsetSpec:
    """Future trace of a two-sided cylinder, as a one-sided subset spec.

    A two-sided cylinder fixing coordinates i..i+m-1 projects, on the
    future coordinates 0,1,..., onto a finite union of one-sided
    cylinders; pressures only read the future, so this reduction is
    exact.  Shifting the cylinder (the image under the shift map
    decrements i) permutes the covering strings bijectively, which is
    what makes pressure invariant under the shift homeomorphism.
    """
    word = cylinder.base_word
    system = word.system
    if system.sidedness != TWO_SIDED:
        raise ValueError("trace reduction applies to two-sided cylinders")
    one_sided = ShiftSystem(system.adjacency, ONE_SIDED)
    i, w = cylinder.start_index, word.symbols
    if i + len(w) <= 0:
        return SubsetSpec.whole(one_sided)
    if i < 0:
        return SubsetSpec.cylinders(one_sided, [w[-i:]])
    if i == 0:
        return SubsetSpec.cylinders(one_sided, [w])
    prefixes = [p for p in iter_admissible_tuples(system.adjacency, i)
                if system.adjacency[p[-1], w[0]]]
    return SubsetSpec.cylinders(one_sided, [p + w for p in prefixes])
