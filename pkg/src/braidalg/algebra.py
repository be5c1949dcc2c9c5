"""Graded letters, noncommutative polynomials and matrix helpers.

A :class:`Letter` is a generator symbol with an integer degree and a star
flag; starring toggles the flag and negates the degree.  A
:class:`GradedPoly` is a finite linear combination of words of letters with
:class:`~braidalg.scalars.Scalar` coefficients.  Words multiply by
concatenation; the star is antimultiplicative and conjugates coefficients.

Matrices of polynomials are plain lists of lists, composed with ordinary
matrix algebra over the polynomial ring.  ``conjugate_matrix`` builds the
phase-dressed entrywise adjoint used for braided conjugate representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalars import ONE, ZERO, Scalar, zeta

__all__ = [
    "Letter",
    "GradedPoly",
    "NOT_HOMOGENEOUS",
    "DegreeMismatch",
    "SingularMatrix",
    "poly_star",
    "degree_of",
    "conjugate_matrix",
    "mat_mul",
    "mat_identity",
    "scalar_mat_mul",
    "scalar_mat_inverse",
    "Presentation",
    "UnitaryMatrixRel",
    "CuntzFamilyRel",
    "PhaseCommutationRel",
    "ExplicitPolyRel",
    "parse_poly",
]


class DegreeMismatch(Exception):
    """A matrix entry failed its homogeneity precondition."""


class SingularMatrix(Exception):
    """Matrix inversion failed over the scalar ring."""


class _NotHomogeneous:
    __slots__ = ()

    def __repr__(self):
        return "NotHomogeneous"

    def __bool__(self):
        return False


NOT_HOMOGENEOUS = _NotHomogeneous()


@dataclass(frozen=True)
class Letter:
    """A generator symbol: family name, optional index pair, degree, star flag."""

    name: str
    index: tuple[int, ...]
    degree: int
    starred: bool = False

    def star(self) -> "Letter":
        return Letter(self.name, self.index, -self.degree, not self.starred)

    @property
    def sort_key(self):
        # Total order by (family, index, star flag); degree is determined by these.
        return (self.name, self.index, self.starred)

    def __str__(self) -> str:
        star = "*" if self.starred else ""
        if self.index:
            return f"{self.name}{star}[{','.join(map(str, self.index))}]"
        return f"{self.name}{star}"


Word = tuple[Letter, ...]


def word_key(word: Word):
    return (len(word), tuple(l.sort_key for l in word))


def word_degree(word: Word) -> int:
    return sum(l.degree for l in word)


def word_str(word: Word) -> str:
    return "*".join(str(l) for l in word) if word else "1"


class GradedPoly:
    """Noncommutative polynomial: finite map from words to nonzero scalars."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Word, Scalar] | None = None):
        cleaned: dict[Word, Scalar] = {}
        if terms:
            for w, c in terms.items():
                c = _as_scalar(c)
                if not c.is_zero():
                    prev = cleaned.get(w)
                    c = c if prev is None else prev + c
                    if c.is_zero():
                        cleaned.pop(w, None)
                    else:
                        cleaned[w] = c
        self._terms = cleaned

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls) -> "GradedPoly":
        return cls()

    @classmethod
    def one(cls) -> "GradedPoly":
        return cls({(): ONE})

    @classmethod
    def from_letter(cls, letter: Letter) -> "GradedPoly":
        return cls({(letter,): ONE})

    @classmethod
    def from_scalar(cls, c) -> "GradedPoly":
        return cls({(): _as_scalar(c)})

    @classmethod
    def from_word(cls, word: Word, coeff=ONE) -> "GradedPoly":
        return cls({tuple(word): _as_scalar(coeff)})

    # -- structure --------------------------------------------------------

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: word_key(kv[0]))

    def coefficient(self, word: Word) -> Scalar:
        return self._terms.get(tuple(word), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self):
        """The common degree if homogeneous, else the NOT_HOMOGENEOUS marker."""
        degs = {word_degree(w) for w in self._terms}
        if not degs:
            return 0
        if len(degs) > 1:
            return NOT_HOMOGENEOUS
        return degs.pop()

    # -- algebra ------------------------------------------------------------

    def __add__(self, other) -> "GradedPoly":
        other = _as_poly(other)
        terms = dict(self._terms)
        for w, c in other._terms.items():
            new = terms.get(w, ZERO) + c
            if new.is_zero():
                terms.pop(w, None)
            else:
                terms[w] = new
        out = GradedPoly.__new__(GradedPoly)
        out._terms = terms
        return out

    __radd__ = __add__

    def __neg__(self) -> "GradedPoly":
        out = GradedPoly.__new__(GradedPoly)
        out._terms = {w: -c for w, c in self._terms.items()}
        return out

    def __sub__(self, other) -> "GradedPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "GradedPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, (Scalar, int, Fraction)):
            c = _as_scalar(other)
            return GradedPoly({w: cc * c for w, cc in self._terms.items()})
        other = _as_poly(other)
        terms: dict[Word, Scalar] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                new = terms.get(w, ZERO) + c1 * c2
                if new.is_zero():
                    terms.pop(w, None)
                else:
                    terms[w] = new
        out = GradedPoly.__new__(GradedPoly)
        out._terms = terms
        return out

    def __rmul__(self, other) -> "GradedPoly":
        if isinstance(other, (Scalar, int, Fraction)):
            return self * other
        return _as_poly(other) * self

    def star(self) -> "GradedPoly":
        """Antimultiplicative star: words reversed, letters and scalars conjugated."""
        return GradedPoly(
            {tuple(l.star() for l in reversed(w)): c.star() for w, c in self._terms.items()}
        )

    def specialize(self, spec) -> "GradedPoly":
        return GradedPoly({w: c.specialize(spec) for w, c in self._terms.items()})

    # -- comparison / rendering -------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            other = _as_poly(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.items():
            parts.append(_term_str(w, c))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"GradedPoly({self})"


def _term_str(word, coeff) -> str:
    body = word_str(word)
    if coeff.is_one():
        return body
    c = f"{coeff}"
    if not (coeff.is_single_term() and "z" not in c and "sqrt" not in c):
        c = f"({c})"
    return c if not word else f"{c}*{body}"


def _as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return Scalar.from_fraction(value)


def _as_poly(value) -> GradedPoly:
    if isinstance(value, GradedPoly):
        return value
    if isinstance(value, Letter):
        return GradedPoly.from_letter(value)
    if isinstance(value, (Scalar, int, Fraction)):
        return GradedPoly.from_scalar(value)
    raise TypeError(f"cannot interpret {value!r} as a polynomial")


def poly_star(p: GradedPoly) -> GradedPoly:
    """Antimultiplicative star: (ab)* = b* a*, scalars conjugated."""
    return p.star()


def degree_of(p: GradedPoly):
    """The common degree if homogeneous, the NOT_HOMOGENEOUS marker otherwise."""
    return p.degree()


# -- matrices over the polynomial ring ---------------------------------------

Matrix = list  # list[list[GradedPoly]]


def mat_identity(n: int) -> Matrix:
    return [[GradedPoly.one() if i == j else GradedPoly.zero() for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    assert all(len(row) == m for row in a)
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = GradedPoly.zero()
            for k in range(m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def conjugate_matrix(u: Matrix, d: list[int]) -> Matrix:
    """Entry (i,j) of the result is z^{d_i (d_j - d_i)} * u[i][j]^*.

    Requires entry (i,j) homogeneous of degree d_j - d_i; raises
    DegreeMismatch otherwise.
    """
    n = len(d)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            entry = u[i][j]
            deg = entry.degree()
            if not entry.is_zero() and deg != d[j] - d[i]:
                raise DegreeMismatch(
                    f"entry ({i + 1},{j + 1}) has degree {deg}, expected {d[j] - d[i]}"
                )
            row.append(entry.star() * zeta(d[i] * (d[j] - d[i])))
        out.append(row)
    return out


# -- matrices over the scalar ring --------------------------------------------


def scalar_mat_mul(a: list[list[Scalar]], b: list[list[Scalar]]) -> list[list[Scalar]]:
    n, m, p = len(a), len(b), len(b[0])
    return [
        [sum((a[i][k] * b[k][j] for k in range(m)), ZERO) for j in range(p)]
        for i in range(n)
    ]


def scalar_mat_inverse(mat: list[list[Scalar]]) -> list[list[Scalar]]:
    """Gauss-Jordan over the scalar ring; pivots must be single-term units."""
    n = len(mat)
    work = [list(row) for row in mat]
    inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if work[r][col].is_single_term():
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularMatrix(f"no invertible pivot in column {col + 1}")
        work[col], work[pivot_row] = work[pivot_row], work[col]
        inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
        p = work[col][col]
        work[col] = [c / p for c in work[col]]
        inv[col] = [c / p for c in inv[col]]
        for r in range(n):
            if r == col or work[r][col].is_zero():
                continue
            f = work[r][col]
            work[r] = [c - f * pc for c, pc in zip(work[r], work[col])]
            inv[r] = [c - f * pc for c, pc in zip(inv[r], inv[col])]
    for i in range(n):
        for j in range(n):
            expect = ONE if i == j else ZERO
            if work[i][j] != expect:
                raise SingularMatrix("matrix is not invertible over the scalar ring")
    return inv


# -- relation declarations (presentation data) --------------------------------


@dataclass(frozen=True)
class UnitaryMatrixRel:
    name: str
    matrix: tuple  # tuple of tuples of GradedPoly

    def entries(self):
        return self.matrix


@dataclass(frozen=True)
class CuntzFamilyRel:
    letters: tuple[Letter, ...]  # unstarred edge isometries


@dataclass(frozen=True)
class PhaseCommutationRel:
    # (a, b, phase) reads a*b = phase * b*a
    pairs: tuple[tuple[Letter, Letter, Scalar], ...]


@dataclass(frozen=True)
class ExplicitPolyRel:
    poly: GradedPoly  # declared equal to zero


@dataclass
class Presentation:
    """Generator/relation data of a graded *-algebra, dumpable as text."""

    generators: list[Letter] = field(default_factory=list)
    degree_tuples: dict[str, tuple[int, ...] | int] = field(default_factory=dict)
    relations: list = field(default_factory=list)

    def dump(self) -> str:
        lines = ["[generators]"]
        for g in self.generators:
            lines.append(f"{g} deg {g.degree}")
        lines.append("")
        lines.append("[degrees]")
        for name, value in sorted(self.degree_tuples.items()):
            if isinstance(value, tuple):
                lines.append(f"{name} = ({','.join(map(str, value))})")
            else:
                lines.append(f"{name} = {value}")
        lines.append("")
        lines.append("[relations]")
        for rel in self.relations:
            if isinstance(rel, UnitaryMatrixRel):
                lines.append(f"unitary {rel.name}:")
                for row in rel.matrix:
                    lines.append("  [ " + " , ".join(str(p) for p in row) + " ]")
            elif isinstance(rel, CuntzFamilyRel):
                fam = ", ".join(str(l) for l in rel.letters)
                lines.append(f"cuntz family ({fam}): S*[i]S[j] = delta, sum S[i]S*[i] = 1")
            elif isinstance(rel, PhaseCommutationRel):
                for a, b, phase in rel.pairs:
                    lines.append(f"commutation {a}*{b} = ({phase})*{b}*{a}")
            elif isinstance(rel, ExplicitPolyRel):
                lines.append(f"relation {rel.poly} = 0")
            else:
                lines.append(f"relation {rel}")
        return "\n".join(lines) + "\n"


# -- expression parsing --------------------------------------------------------

import re as _re

_LETTER_RE = _re.compile(
    r"\s*(?P<name>[A-Za-z][A-Za-z0-9_]*)(?P<star>\*(?=$|[\[\^\*\s]))?"
    r"(\[(?P<index>-?\d+(\s*,\s*-?\d+)*)\])?(\^(?P<pow>\d+))?\s*"
)
_RATIONAL_RE = _re.compile(r"\s*(?P<num>-?\d+)(\s*/\s*(?P<den>\d+))?\s*")


def parse_poly(text: str, alphabet: dict[tuple[str, tuple[int, ...]], Letter]) -> GradedPoly:
    """Parse the CLI expression grammar over a known alphabet.

    Factors are separated by '*'; a factor is a rational, a parenthesized
    scalar (phase z allowed inside), or a letter like u[1,2], u*[1,2], S[3],
    z, z*, optionally with a positive power ^k.
    """
    from .scalars import parse_scalar

    total = GradedPoly.zero()
    for sign, body in _split_terms(text):
        term = GradedPoly.from_scalar(sign)
        for factor in _split_factors(body):
            if factor.startswith("("):
                term = term * GradedPoly.from_scalar(parse_scalar(factor[1:-1]))
                continue
            m = _LETTER_RE.fullmatch(factor)
            if m and m.group("name") is not None and not factor.lstrip()[0].isdigit():
                name = m.group("name")
                index = tuple(int(t) for t in m.group("index").split(",")) if m.group("index") else ()
                key = (name, index)
                if key not in alphabet:
                    raise ValueError(f"unknown generator {factor.strip()!r}")
                letter = alphabet[key]
                if m.group("star"):
                    letter = letter.star()
                power = int(m.group("pow")) if m.group("pow") else 1
                for _ in range(power):
                    term = term * letter
                continue
            m = _RATIONAL_RE.fullmatch(factor)
            if m:
                den = m.group("den")
                term = term * GradedPoly.from_scalar(
                    Fraction(int(m.group("num")), int(den) if den else 1)
                )
                continue
            raise ValueError(f"cannot parse factor {factor!r}")
        total = total + term
    return total


def _split_terms(text: str) -> list[tuple[int, str]]:
    out = []
    depth = 0
    sign = 1
    start = 0
    i = 0
    text = text.strip()
    if text.startswith("-"):
        sign, start, i = -1, 1, 1
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and text[i - 1] == " " and i + 1 < len(text) and text[i + 1] == " ":
            out.append((sign, text[start:i].strip()))
            sign = 1 if ch == "+" else -1
            start = i + 1
        i += 1
    out.append((sign, text[start:].strip()))
    return [(s, b) for s, b in out if b]


def _split_factors(body: str) -> list[str]:
    factors = []
    depth = 0
    start = 0
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            # star marker only when glued to a letter and followed by [, ^, * or end
            prev = body[i - 1] if i else ""
            nxt = body[i + 1] if i + 1 < len(body) else ""
            is_marker = prev.isalnum() and (nxt in "[^*" or i + 1 == len(body))
            if is_marker and not (prev.isdigit() and nxt == ""):
                i += 1
                continue
            factors.append(body[start:i].strip())
            start = i + 1
        i += 1
    factors.append(body[start:].strip())
    return [f for f in factors if f]
