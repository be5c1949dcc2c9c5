"""Relation-driven reduction and the identity-verification engine.

The verification strategy is expansion + structural normal form +
complete-contraction detection, not ideal membership.  Three rule kinds are
compiled out of a :class:`RelationSet`:

* local pair rules: ``S*[i] S[j] -> delta_ij`` for a Cuntz family, and
  ``x x* -> 1``, ``x* x -> 1`` for any declared 1x1 unitary;
* directed phase commutations ``a b -> phase * b a``;
* complete contraction families ``sum_k c_k A_k B_k = r``, derived from the
  rows and columns of declared unitary matrices with monomial entries and
  from the full Cuntz sum ``sum_i S[i] S*[i] = 1``.

A contraction fires on a group of monomials that are identical except at one
adjacent same-leg letter pair, where the pair runs over a complete family
and the coefficients are proportional to the family's.  Reduction iterates
to a fixpoint; a zero residual means Verified, anything else is Unverified
(which is not a refutation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    CuntzFamilyRel,
    GradedPoly,
    Letter,
    PhaseCommutationRel,
    UnitaryMatrixRel,
)
from .braided import LWord, LeggedPoly, from_graded, lword_key, lword_str, to_graded
from .scalars import FORMAL, ONE, ZERO, Scalar, ZetaSpec

__all__ = [
    "RelationSet",
    "PairFamily",
    "VerificationReport",
    "cuntz_reduce",
    "contract_sums",
    "verify_identity",
    "reduce_poly",
]


@dataclass(frozen=True)
class PairFamily:
    """A complete contraction: sum_k coeff_k * left_k * right_k = rhs."""

    name: str
    members: tuple[tuple[Letter, Letter, Scalar], ...]
    rhs: Scalar


class RelationSet:
    """Declared relations, compiled into local rules and contraction families."""

    def __init__(self, cuntz_families=(), unitary_matrices=(), commutation_pairs=()):
        self.cuntz_families = list(cuntz_families)
        self.unitary_matrices = list(unitary_matrices)
        self.commutation_pairs = list(commutation_pairs)

        self.local_rules: dict[tuple[Letter, Letter], Scalar] = {}
        self.swap_rules: dict[tuple[Letter, Letter], Scalar] = {}
        self.families: list[PairFamily] = []

        for rel in self.cuntz_families:
            letters = tuple(rel.letters) if isinstance(rel, CuntzFamilyRel) else tuple(rel)
            for a in letters:
                for b in letters:
                    self.local_rules[(a.star(), b)] = ONE if a == b else ZERO
            self.families.append(
                PairFamily(
                    name=f"cuntz-sum({letters[0].name})",
                    members=tuple((a, a.star(), ONE) for a in letters),
                    rhs=ONE,
                )
            )

        for rel in self.unitary_matrices:
            name, matrix = (rel.name, rel.matrix) if isinstance(rel, UnitaryMatrixRel) else rel
            self._compile_unitary(name, matrix)

        for rel in self.commutation_pairs:
            pairs = rel.pairs if isinstance(rel, PhaseCommutationRel) else rel
            for a, b, phase in pairs:
                self.swap_rules[(a, b)] = phase

        # fast lookup: (left letter, right letter) -> [(family index, member index)]
        self.pair_index: dict[tuple[Letter, Letter], list[tuple[int, int]]] = {}
        for fi, fam in enumerate(self.families):
            for mi, (a, b, _) in enumerate(fam.members):
                self.pair_index.setdefault((a, b), []).append((fi, mi))

    def _compile_unitary(self, name: str, matrix) -> None:
        n = len(matrix)
        entries: list[list[tuple[Scalar, Letter]]] = []
        for row in matrix:
            out_row = []
            for poly in row:
                items = list(poly.items()) if isinstance(poly, GradedPoly) else [((poly,), ONE)]
                if len(items) != 1 or len(items[0][0]) != 1:
                    raise ValueError(
                        f"unitary matrix {name!r} must have monomial entries to be "
                        f"usable for reduction; entry {poly} is not"
                    )
                word, coeff = items[0]
                out_row.append((coeff, word[0]))
            entries.append(out_row)

        if n == 1:
            c, l = entries[0][0]
            # x x* -> 1 / (c c*), x* x -> same: a unitary single letter
            inv = ONE / (c * c.star())
            self.local_rules[(l, l.star())] = inv
            self.local_rules[(l.star(), l)] = inv
            return

        for i in range(n):
            for j in range(n):
                rhs = ONE if i == j else ZERO
                col = tuple(
                    (entries[k][i][1].star(), entries[k][j][1], entries[k][i][0].star() * entries[k][j][0])
                    for k in range(n)
                )
                self.families.append(PairFamily(f"{name}.col[{i + 1},{j + 1}]", col, rhs))
                row = tuple(
                    (entries[i][k][1], entries[j][k][1].star(), entries[i][k][0] * entries[j][k][0].star())
                    for k in range(n)
                )
                self.families.append(PairFamily(f"{name}.row[{i + 1},{j + 1}]", row, rhs))


# -- reduction passes -----------------------------------------------------------


def _local_pass(terms: dict[LWord, Scalar], rels: RelationSet, trace: list[str]) -> tuple[dict, bool]:
    """Exhaustively apply local pair rules and directed swaps, per monomial."""
    changed = False
    out: dict[LWord, Scalar] = {}
    for word in sorted(terms, key=lword_key):
        coeff = terms[word]
        word = list(word)
        rewriting = True
        while rewriting:
            rewriting = False
            for t in range(len(word) - 1):
                a, b = word[t], word[t + 1]
                if a.leg != b.leg:
                    continue
                rule = rels.local_rules.get((a.letter, b.letter))
                if rule is not None:
                    trace.append(
                        f"rule local {a.letter}{b.letter}->({rule}) at {lword_str(tuple(word))}"
                    )
                    coeff = coeff * rule
                    del word[t : t + 2]
                    changed = rewriting = True
                    break
                swap = rels.swap_rules.get((a.letter, b.letter))
                if swap is not None:
                    trace.append(
                        f"rule swap {a.letter}{b.letter}->({swap})*{b.letter}{a.letter} at {lword_str(tuple(word))}"
                    )
                    coeff = coeff * swap
                    word[t], word[t + 1] = b, a
                    changed = rewriting = True
                    break
            if coeff.is_zero():
                break
        if coeff.is_zero():
            changed = True
            continue
        key = tuple(word)
        new = out.get(key, ZERO) + coeff
        if new.is_zero():
            out.pop(key, None)
            changed = True
        else:
            out[key] = new
    return out, changed


def _contraction_step(terms: dict[LWord, Scalar], rels: RelationSet, trace: list[str]) -> tuple[dict, bool]:
    """Find and apply one complete contraction; deterministic candidate order."""
    buckets: dict[tuple[LWord, LWord, int], dict[int, tuple[LWord, Scalar]]] = {}
    for word, coeff in terms.items():
        for t in range(len(word) - 1):
            a, b = word[t], word[t + 1]
            if a.leg != b.leg:
                continue
            for fi, mi in rels.pair_index.get((a.letter, b.letter), ()):
                c_mem = rels.families[fi].members[mi][2]
                key = (word[:t], word[t + 2 :], fi)
                buckets.setdefault(key, {})[mi] = (word, coeff / c_mem)

    candidates = []
    for (prefix, suffix, fi), found in buckets.items():
        fam = rels.families[fi]
        if len(found) != len(fam.members):
            continue
        ratios = [found[mi][1] for mi in range(len(fam.members))]
        if any(r != ratios[0] for r in ratios[1:]):
            continue
        candidates.append((-len(fam.members), fi, lword_key(prefix), lword_key(suffix), prefix, suffix))

    if not candidates:
        return terms, False
    candidates.sort(key=lambda c: c[:4])
    _, fi, _, _, prefix, suffix = candidates[0]
    fam = rels.families[fi]
    found = buckets[(prefix, suffix, fi)]
    ratio = found[0][1]

    out = dict(terms)
    for mi in range(len(fam.members)):
        word, _ = found[mi]
        del out[word]
    collapsed = prefix + suffix
    trace.append(
        f"rule contract {fam.name} at {lword_str(prefix)}|...|{lword_str(suffix)} -> ({fam.rhs})"
    )
    add = ratio * fam.rhs
    if not add.is_zero():
        new = out.get(collapsed, ZERO) + add
        if new.is_zero():
            out.pop(collapsed, None)
        else:
            out[collapsed] = new
    return out, True


def reduce_poly(p, rels: RelationSet):
    """Alternate local rewriting and contraction to a fixpoint.

    Accepts a GradedPoly or LeggedPoly; returns (reduced poly of the same
    kind, trace lines).
    """
    graded = isinstance(p, GradedPoly)
    lp = from_graded(p) if graded else p
    trace: list[str] = []
    terms = dict(lp._terms)
    while True:
        terms, ch1 = _local_pass(terms, rels, trace)
        terms, ch2 = _contraction_step(terms, rels, trace)
        if not (ch1 or ch2):
            break
    out = LeggedPoly(lp.num_legs, terms, normalized=True)
    return (to_graded(out) if graded else out), trace


def cuntz_reduce(p, families=None, rels: RelationSet | None = None):
    """Rewrite S*[i]S[j] -> delta_ij exhaustively (per leg for legged input)."""
    if rels is None:
        rels = RelationSet(cuntz_families=[CuntzFamilyRel(tuple(f)) for f in (families or [])])
    graded = isinstance(p, GradedPoly)
    lp = from_graded(p) if graded else p
    trace: list[str] = []
    # only the local rules, no contractions
    local_only = RelationSet.__new__(RelationSet)
    local_only.local_rules = rels.local_rules
    local_only.swap_rules = {}
    local_only.families = []
    local_only.pair_index = {}
    terms, _ = _local_pass(dict(lp._terms), local_only, trace)
    out = LeggedPoly(lp.num_legs, terms, normalized=True)
    return to_graded(out) if graded else out


def contract_sums(p, rels: RelationSet):
    """Apply complete-contraction detection (plus local rules) to a fixpoint."""
    reduced, _ = reduce_poly(p, rels)
    return reduced


# -- verification reports ---------------------------------------------------


@dataclass
class VerificationReport:
    name: str
    verdict: str  # "Verified" | "Unverified"
    residual: object | None = None
    trace: list[str] = field(default_factory=list)
    checks: list[tuple[str, str]] = field(default_factory=list)  # (check name, verdict)

    @property
    def verified(self) -> bool:
        return self.verdict == "Verified"

    @classmethod
    def merge(cls, name: str, reports: list["VerificationReport"]) -> "VerificationReport":
        verdict = "Verified" if all(r.verified for r in reports) else "Unverified"
        residual = next((r.residual for r in reports if not r.verified), None)
        trace: list[str] = []
        checks: list[tuple[str, str]] = []
        for r in reports:
            checks.append((r.name, r.verdict))
            checks.extend((f"{r.name}: {n}", v) for n, v in r.checks)
            trace.extend(f"[{r.name}] {line}" for line in r.trace)
        return cls(name, verdict, residual, trace, checks)

    def lines(self, with_trace: bool = False) -> list[str]:
        out = [f"{self.name}: {self.verdict}"]
        for check, verdict in self.checks:
            out.append(f"  {check}: {verdict}")
        if not self.verified and self.residual is not None:
            out.append(f"  residual: {self.residual}")
        if with_trace:
            out.extend(f"  step {k}: {line}" for k, line in enumerate(self.trace, 1))
        return out

    def render(self, with_trace: bool = False) -> str:
        return "\n".join(self.lines(with_trace)) + "\n"


def verify_identity(lhs, rhs, rels: RelationSet, spec: ZetaSpec = FORMAL, name: str = "identity") -> VerificationReport:
    """Reduce lhs - rhs; Verified iff the residual vanishes (exactly, or after
    specializing the phase when spec names a root of unity).

    Unverified is not a refutation; the trace and residual are returned so a
    human can extend the rule set.
    """
    if isinstance(lhs, GradedPoly) != isinstance(rhs, GradedPoly):
        raise TypeError("lhs and rhs must be the same kind of polynomial")
    diff = lhs - rhs
    residual, trace = reduce_poly(diff, rels)
    if isinstance(residual, GradedPoly):
        ok = residual.specialize(spec).is_zero() if not spec.is_formal else residual.is_zero()
    else:
        ok = residual.is_zero_under(spec) if not spec.is_formal else residual.is_zero()
    return VerificationReport(name, "Verified" if ok else "Unverified", residual, trace)
