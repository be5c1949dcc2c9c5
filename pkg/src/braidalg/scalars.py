"""Exact coefficient arithmetic for the phase-braided setting.

A :class:`Scalar` is an element of the Laurent ring in a formal unit-modulus
phase ``z`` over the rationals, extended by formal square roots of positive
rationals.  Internally it is a finite sum of terms

    c * sqrt(r) * z^k

indexed by ``(k, r)`` with ``k`` an integer, ``r`` a square-free positive
integer (``r == 1`` is the rational part) and ``c`` a nonzero ``Fraction``.

Since the phase lives on the unit circle, complex conjugation (``star``)
sends ``z^k`` to ``z^-k`` and fixes rationals and radicals.

The phase can optionally be specialized to a primitive N-th root of unity,
in which case elements are reduced modulo the N-th cyclotomic polynomial so
zero-testing stays exact.  Radicals are treated as formally independent of
the phase (coincidences like sqrt(2) = z + z^-1 at N = 8 are not folded);
reduction is still a ring homomorphism, so identities proved formally stay
zero under every specialization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "Scalar",
    "ZetaSpec",
    "FORMAL",
    "ZERO",
    "ONE",
    "zeta",
    "sqrt",
    "rational",
    "scalar_mul",
    "scalar_star",
    "specialize",
    "cyclotomic",
    "parse_scalar",
]


def _square_free(n: int) -> tuple[int, int]:
    """Split a positive integer as g**2 * s with s square-free; returns (g, s)."""
    g, s, d = 1, 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            g *= d
            n //= d * d
        if n % d == 0:
            s *= d
            n //= d
        d += 1
    return g, s * n


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients (constant first) of the n-th cyclotomic polynomial."""
    if n <= 0:
        raise ValueError("cyclotomic index must be positive")
    # x^n - 1 divided by the cyclotomic polynomials of all proper divisors.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _int_poly_div(poly, list(cyclotomic(d)))
    return tuple(poly)


def _int_poly_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        c, rem = divmod(num[i + len(den) - 1], den[-1])
        assert rem == 0
        quot[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert all(c == 0 for c in num)
    return quot


@dataclass(frozen=True)
class ZetaSpec:
    """Interpretation of the formal phase: fully formal, or an N-th root of unity."""

    order: int | None = None  # None = formal

    @classmethod
    def formal(cls) -> "ZetaSpec":
        return cls(None)

    @classmethod
    def root_of_unity(cls, n: int) -> "ZetaSpec":
        if n < 1:
            raise ValueError("root-of-unity order must be >= 1")
        return cls(n)

    @property
    def is_formal(self) -> bool:
        return self.order is None

    def __str__(self) -> str:
        return "formal" if self.order is None else f"root:{self.order}"


FORMAL = ZetaSpec.formal()


class Scalar:
    """An exact sum of terms c * sqrt(r) * z^k, immutable after construction.

    >>> zeta(2) * zeta(3)
    Scalar(z^5)
    >>> (zeta(1) + 1) * (zeta(-1) + 1)
    Scalar(z^-1 + 2 + z)
    >>> sqrt(2) * sqrt(6)
    Scalar(2*sqrt(3))
    >>> zeta(3).star()
    Scalar(z^-3)
    >>> (1 + zeta(1) + zeta(2)).specialize(ZetaSpec.root_of_unity(3))
    Scalar(0)
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[tuple[int, int], Fraction] | None = None):
        cleaned: dict[tuple[int, int], Fraction] = {}
        if terms:
            for (k, r), c in terms.items():
                if c == 0:
                    continue
                if r < 1:
                    raise ValueError(f"radical key must be positive, got {r}")
                g, s = _square_free(r)
                key = (k, s)
                new = cleaned.get(key, Fraction(0)) + c * g
                if new == 0:
                    cleaned.pop(key, None)
                else:
                    cleaned[key] = new
        object.__setattr__(self, "_terms", cleaned)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_fraction(cls, c) -> "Scalar":
        return cls({(0, 1): Fraction(c)})

    @classmethod
    def zeta_power(cls, k: int) -> "Scalar":
        return cls({(k, 1): Fraction(1)})

    @classmethod
    def sqrt_of(cls, value) -> "Scalar":
        """sqrt of a positive rational: sqrt(p/q) = sqrt(p*q) / q."""
        v = Fraction(value)
        if v <= 0:
            raise ValueError("radicand must be positive")
        return cls({(0, v.numerator * v.denominator): Fraction(1, v.denominator)})

    # -- structure --------------------------------------------------------

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {(0, 1): Fraction(1)}

    def is_single_term(self) -> bool:
        return len(self._terms) == 1

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {(0, 1)}:
            return self._terms[(0, 1)]
        raise ValueError(f"not a plain rational: {self}")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for key, c in other._terms.items():
            new = terms.get(key, Fraction(0)) + c
            if new == 0:
                terms.pop(key, None)
            else:
                terms[key] = new
        out = Scalar.__new__(Scalar)
        object.__setattr__(out, "_terms", terms)
        return out

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        out = Scalar.__new__(Scalar)
        object.__setattr__(out, "_terms", {k: -c for k, c in self._terms.items()})
        return out

    def __sub__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Scalar":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "Scalar":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict[tuple[int, int], Fraction] = {}
        for (k1, r1), c1 in self._terms.items():
            for (k2, r2), c2 in other._terms.items():
                # sqrt(r1) * sqrt(r2) = g * sqrt(s) with r1*r2 = g^2 * s
                from math import gcd

                g = gcd(r1, r2)
                key = (k1 + k2, (r1 // g) * (r2 // g))
                new = terms.get(key, Fraction(0)) + c1 * c2 * g
                if new == 0:
                    terms.pop(key, None)
                else:
                    terms[key] = new
        out = Scalar.__new__(Scalar)
        object.__setattr__(out, "_terms", terms)
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        """Division by a single-term scalar (these are the units we need)."""
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if len(other._terms) != 1:
            raise ValueError(f"can only divide by a single-term scalar, got {other}")
        ((k, r), c), = other._terms.items()
        # 1 / (c sqrt(r) z^k) = (1/(c r)) sqrt(r) z^-k
        return self * Scalar({(-k, r): Fraction(1, 1) / (c * r)})

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for single-term scalars")
            return ONE / self ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def star(self) -> "Scalar":
        """Complex conjugation: z^k -> z^-k, rationals and radicals fixed."""
        out = Scalar.__new__(Scalar)
        object.__setattr__(out, "_terms", {(-k, r): c for (k, r), c in self._terms.items()})
        return out

    def specialize(self, spec: ZetaSpec) -> "Scalar":
        """Canonical residue modulo the cyclotomic polynomial of spec.order."""
        if spec.is_formal:
            return self
        n = spec.order
        phi = cyclotomic(n)
        deg = len(phi) - 1
        by_radical: dict[int, list[Fraction]] = {}
        for (k, r), c in self._terms.items():
            coeffs = by_radical.setdefault(r, [Fraction(0)] * n)
            coeffs[k % n] += c
        terms: dict[tuple[int, int], Fraction] = {}
        for r, coeffs in by_radical.items():
            # reduce mod phi_n (monic), then collect
            coeffs = list(coeffs)
            for i in range(len(coeffs) - 1, deg - 1, -1):
                c = coeffs[i]
                if c == 0:
                    continue
                for j, pj in enumerate(phi):
                    coeffs[i - deg + j] -= c * pj
            for k, c in enumerate(coeffs[:deg]):
                if c != 0:
                    terms[(k, r)] = c
        return Scalar(terms)

    # -- comparison / rendering -------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for (k, r), c in self.items():
            factors = []
            if r != 1:
                factors.append(f"sqrt({r})")
            if k != 0:
                factors.append("z" if k == 1 else f"z^{k}")
            mag = abs(c)
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            body = "*".join(factors)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f" + {body}" if c > 0 else f" - {body}")
        return "".join(parts)


def _coerce(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar.from_fraction(value)
    return NotImplemented


ZERO = Scalar()
ONE = Scalar.from_fraction(1)


def zeta(k: int = 1) -> Scalar:
    return Scalar.zeta_power(k)


def scalar_mul(a: Scalar, b: Scalar, spec: ZetaSpec = FORMAL) -> Scalar:
    """Exact product, reduced modulo the cyclotomic polynomial in root mode."""
    return (a * b).specialize(spec)


def scalar_star(a: Scalar) -> Scalar:
    return a.star()


def specialize(a: Scalar, spec: ZetaSpec) -> Scalar:
    return a.specialize(spec)


def sqrt(value) -> Scalar:
    return Scalar.sqrt_of(value)


def rational(value) -> Scalar:
    return Scalar.from_fraction(value)


# -- parsing ----------------------------------------------------------------

_TERM_TOKEN = re.compile(
    r"""\s*(
        sqrt\(\s*(?P<rad>\d+)\s*\)
      | z(\^(?P<exp>-?\d+))?
      | \(\s*(?P<pnum>-?\d+)\s*(/\s*(?P<pden>\d+))?\s*\)
      | (?P<num>-?\d+)\s*(/\s*(?P<den>\d+))?
    )\s*""",
    re.X,
)


def parse_scalar(text: str) -> Scalar:
    """Parse the canonical rendering back into a Scalar (lossless round-trip)."""
    text = text.strip()
    if text == "0":
        return ZERO
    total = ZERO
    for signed in _split_sum(text):
        sign, body = signed
        term = Scalar.from_fraction(sign)
        pos = 0
        first = True
        while pos < len(body):
            if not first:
                if body[pos] != "*":
                    raise ValueError(f"expected '*' in scalar term {body!r} at {pos}")
                pos += 1
            m = _TERM_TOKEN.match(body, pos)
            if not m or m.start() != pos:
                raise ValueError(f"bad scalar factor in {body!r} at {pos}")
            if m.group("rad") is not None:
                rad = int(m.group("rad"))
                if rad < 1:
                    raise ValueError(f"radicand must be positive in {body!r}")
                term = term * Scalar({(0, rad): Fraction(1)})
            elif m.group(1).lstrip().startswith("z"):
                exp = m.group("exp")
                term = term * Scalar.zeta_power(int(exp) if exp is not None else 1)
            else:
                num = m.group("pnum") if m.group("pnum") is not None else m.group("num")
                den = m.group("pden") if m.group("pnum") is not None else m.group("den")
                if den is not None and int(den) == 0:
                    raise ValueError(f"zero denominator in {body!r}")
                term = term * Scalar.from_fraction(
                    Fraction(int(num), int(den) if den else 1)
                )
            pos = m.end()
            first = False
        total = total + term
    return total


def _split_sum(text: str) -> list[tuple[int, str]]:
    """Split 'a + b - c' into [(+1,'a'), (+1,'b'), (-1,'c')], paren-aware."""
    out: list[tuple[int, str]] = []
    depth = 0
    sign = 1
    start = 0
    i = 0
    if text.startswith("-"):
        sign = -1
        start = i = 1
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and i > start and text[i - 1] == " " and i + 1 < len(text) and text[i + 1] == " ":
            out.append((sign, text[start:i].strip()))
            sign = 1 if ch == "+" else -1
            i += 1
            start = i + 1
        i += 1
    out.append((sign, text[start:].strip()))
    return [(s, b) for s, b in out if b]
