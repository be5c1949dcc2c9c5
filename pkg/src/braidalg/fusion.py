"""The free fusion ring on an integer charge and a two-letter free monoid.

Irreducibles are pairs (x, w) with x an integer and w a word over {a, b}.
The involution negates the charge and bar-reverses the word (a <-> b,
reversed).  The product decomposes by matching a suffix g of the left word
against the bar of a prefix of the right word:

    (x, w) . (y, v) = sum over w = a g, v = bar(g) b of (x + y, a b).

Dimensions are the unique multiplicative extension with the two-letter
generators n-dimensional.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .simplify import VerificationReport

__all__ = [
    "Word",
    "Irrep",
    "FusionResult",
    "word_bar",
    "fuse",
    "conjugate_irrep",
    "dimension",
    "check_fusion_ring",
    "parse_irrep",
    "all_words",
]

_SWAP = {"a": "b", "b": "a"}


@dataclass(frozen=True, order=True)
class Word:
    """A word in the free monoid on two letters; the empty word is the unit."""

    letters: str = ""

    def __post_init__(self):
        if any(ch not in "ab" for ch in self.letters):
            raise ValueError(f"word letters must be 'a' or 'b', got {self.letters!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __str__(self) -> str:
        return self.letters or "e"


@dataclass(frozen=True, order=True)
class Irrep:
    """(integer charge, word); the trivial class is (0, e)."""

    x: int
    w: Word

    def __str__(self) -> str:
        return f"({self.x}; {self.w})"


class FusionResult:
    """Multiset of irreducibles with positive integer multiplicities."""

    __slots__ = ("_counts",)

    def __init__(self, items=()):
        self._counts = Counter()
        for item in items:
            if isinstance(item, tuple):
                irrep, mult = item
                self._counts[irrep] += mult
            else:
                self._counts[item] += 1
        if any(m < 1 for m in self._counts.values()):
            raise ValueError("multiplicities must be positive")

    def items(self):
        return sorted(self._counts.items())

    def multiplicity(self, irrep: Irrep) -> int:
        return self._counts.get(irrep, 0)

    def total_dimension(self, n: int) -> int:
        return sum(m * dimension(r.w, n) for r, m in self._counts.items())

    def __iter__(self):
        return iter(sorted(self._counts.elements()))

    def __len__(self) -> int:
        return sum(self._counts.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, FusionResult) and self._counts == other._counts

    def __hash__(self):
        return hash(frozenset(self._counts.items()))

    def __str__(self) -> str:
        return "\n".join(f"{m} x {r}" for r, m in self.items())

    def __repr__(self) -> str:
        return f"FusionResult({dict(self._counts)})"


def word_bar(w: Word) -> Word:
    """Reverse the word and swap the two letters; an antimultiplicative involution.

    >>> str(word_bar(Word("")))
    'e'
    >>> str(word_bar(Word("a")))
    'b'
    >>> str(word_bar(Word("ab")))
    'ab'
    """
    return Word("".join(_SWAP[ch] for ch in reversed(w.letters)))


def fuse(r: Irrep, s: Irrep) -> FusionResult:
    """Decompose the product: for each suffix g of r.w whose bar is a prefix
    of s.w, emit (r.x + s.x, prefix-of-r times suffix-of-s).

    >>> print(fuse(Irrep(0, Word("a")), Irrep(0, Word("b"))))
    1 x (0; e)
    1 x (0; ab)
    >>> print(fuse(Irrep(1, Word("aa")), Irrep(2, Word("bb"))))
    1 x (3; e)
    1 x (3; aabb)
    1 x (3; ab)
    """
    out = []
    w, v = r.w.letters, s.w.letters
    for cut in range(len(w) + 1):
        a, g = w[:cut], w[cut:]
        gbar = word_bar(Word(g)).letters
        if v.startswith(gbar):
            b = v[len(gbar):]
            out.append(Irrep(r.x + s.x, Word(a + b)))
    return FusionResult(out)


def fuse_results(left: FusionResult, right: FusionResult) -> FusionResult:
    items: list = []
    for r, mr in left.items():
        for s, ms in right.items():
            for t, mt in fuse(r, s).items():
                items.append((t, mr * ms * mt))
    return FusionResult(items)


def conjugate_irrep(r: Irrep) -> Irrep:
    return Irrep(-r.x, word_bar(r.w))


@lru_cache(maxsize=None)
def _dim(letters: str, n: int) -> int:
    if not letters:
        return 1
    head, last = letters[:-1], letters[-1]
    value = n * _dim(head, n)
    if head and head[-1] == _SWAP[last]:
        value -= _dim(head[:-1], n)
    return value


def dimension(w: Word, n: int) -> int:
    """dim(e) = 1, dim(w a) = n dim(w) - [w ends in b] dim(w minus last), mirrored.

    Nondegenerate for n >= 2; at n = 1 every class is one-dimensional.
    """
    if n < 1:
        raise ValueError("dimension parameter must be >= 1")
    if n == 1:
        return 1
    return _dim(w.letters, n)


def all_words(max_len: int):
    yield Word("")
    frontier = [""]
    for _ in range(max_len):
        frontier = [w + ch for w in frontier for ch in "ab"]
        for w in frontier:
            yield Word(w)


def check_fusion_ring(n: int, max_len: int) -> VerificationReport:
    """Associativity, dimension multiplicativity, the conjugation
    anti-homomorphism, and the single trivial summand in r x conj(r),
    exhaustively over words up to the length bound."""
    words = list(all_words(max_len))
    irreps = [Irrep(0, w) for w in words]
    checks: list[tuple[str, str]] = []
    ok = True

    def record(name: str, good: bool):
        nonlocal ok
        ok = ok and good
        if not good:
            checks.append((name, "Unverified"))

    for r in irreps:
        for s in irreps:
            rs = fuse(r, s)
            record(
                f"dim({r},{s})",
                rs.total_dimension(n) == dimension(r.w, n) * dimension(s.w, n),
            )
            conj = FusionResult([(conjugate_irrep(t), m) for t, m in rs.items()])
            record(
                f"conj({r},{s})",
                conj == fuse(conjugate_irrep(s), conjugate_irrep(r)),
            )
            for t in irreps:
                left = fuse_results(rs, FusionResult([t]))
                right = fuse_results(FusionResult([r]), fuse(s, t))
                record(f"assoc({r},{s},{t})", left == right)
        record(
            f"frobenius({r})",
            fuse(r, conjugate_irrep(r)).multiplicity(Irrep(0, Word(""))) == 1,
        )
    checks.insert(0, (f"exhaustive over {len(words)} words, n={n}", "Verified" if ok else "Unverified"))
    return VerificationReport(
        "fusion-ring", "Verified" if ok else "Unverified", None, [], checks
    )


def parse_irrep(text: str) -> Irrep:
    """Parse '(x; word)' with word over a, b, or e for the empty word."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"irrep must look like '(x; word)', got {text!r}")
    parts = body[1:-1].split(";")
    if len(parts) != 2:
        raise ValueError(f"irrep must look like '(x; word)', got {text!r}")
    x = int(parts[0].strip())
    w = parts[1].strip()
    return Irrep(x, Word("" if w == "e" else w))
