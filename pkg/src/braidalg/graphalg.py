"""Finite directed graphs, the vertex matrix, and the critical-temperature state.

The vertex matrix D counts edges between vertices; the state of interest
exists iff the spectral radius of D is an eigenvalue with a nonnegative
eigenvector (always the case for a nonnegative matrix, but checked
honestly).  The state on a span element indexed by two paths is
``delta(alpha, beta) * rho^-|alpha| * weight(range of alpha)``.

The spectral radius is found by power iteration and then certified exactly
when possible: each small rational candidate near the float value is tested
by an exact kernel solve, and on success every downstream value is an exact
rational.  Graphs whose radius cannot be certified fall back to float mode;
symbolic consumers reject those.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Letter
from .scalars import Scalar
from .simplify import VerificationReport

__all__ = [
    "GraphData",
    "KmsData",
    "NOT_SATISFIED",
    "InvalidPath",
    "ZeroVertexWeight",
    "IrrationalData",
    "vertex_matrix",
    "check_dagger",
    "kms_eval",
    "check_gauge_equivariance",
    "normalized_ftilde",
    "cuntz_graph",
    "cycle_graph",
    "parse_graph",
    "edge_letters",
    "kms_state",
]


class InvalidPath(Exception):
    """Edges do not compose into a path."""


class ZeroVertexWeight(Exception):
    """An edge ranges at a weight-zero vertex; normalization is undefined."""


class IrrationalData(Exception):
    """The graph's spectral data does not live in the radical scalar ring."""


class _NotSatisfied:
    __slots__ = ()

    def __repr__(self):
        return "NotSatisfied"

    def __bool__(self):
        return False


NOT_SATISFIED = _NotSatisfied()


@dataclass(frozen=True)
class GraphData:
    """Finite directed graph without sinks; vertices and edges are 0-based."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]  # (source, range)
    gauge_degrees: tuple[int, ...]

    def __post_init__(self):
        if self.num_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        if len(self.gauge_degrees) != len(self.edges):
            raise ValueError("one gauge degree per edge required")
        out_degree = [0] * self.num_vertices
        for s, r in self.edges:
            if not (0 <= s < self.num_vertices and 0 <= r < self.num_vertices):
                raise ValueError(f"edge ({s},{r}) outside vertex range")
            out_degree[s] += 1
        sinks = [v for v, d in enumerate(out_degree) if d == 0]
        if sinks:
            raise ValueError(f"graph has sinks (no outgoing edge) at vertices {sinks}")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def source(self, e: int) -> int:
        return self.edges[e][0]

    def range(self, e: int) -> int:
        return self.edges[e][1]

    def is_path(self, path: tuple[int, ...]) -> bool:
        return all(
            self.range(path[i]) == self.source(path[i + 1]) for i in range(len(path) - 1)
        ) and all(0 <= e < self.num_edges for e in path)

    def paths(self, length: int):
        """All paths of exactly the given length, lexicographic in edge ids."""
        if length == 0:
            yield ()
            return
        def extend(prefix):
            if len(prefix) == length:
                yield prefix
                return
            last = prefix[-1]
            for e in range(self.num_edges):
                if self.source(e) == self.range(last):
                    yield from extend(prefix + (e,))
        for e in range(self.num_edges):
            yield from extend((e,))

    def path_degree(self, path: tuple[int, ...]) -> int:
        return sum(self.gauge_degrees[e] for e in path)


@dataclass(frozen=True)
class KmsData:
    """Spectral radius and normalized vertex weights; exact when certified."""

    rho: object  # Fraction (exact) or float
    vertex_weights: tuple  # Fractions or floats, entrywise >= 0, sum 1
    exact: bool


def cuntz_graph(n: int, degrees: tuple[int, ...] | None = None) -> GraphData:
    """One vertex with n loops."""
    return GraphData(1, tuple((0, 0) for _ in range(n)), tuple(degrees or (1,) * n))


def cycle_graph(n: int, degrees: tuple[int, ...] | None = None) -> GraphData:
    """Directed n-cycle: one edge from each vertex to the next."""
    return GraphData(
        n, tuple((i, (i + 1) % n) for i in range(n)), tuple(degrees or (1,) * n)
    )


def vertex_matrix(g: GraphData) -> list[list[int]]:
    mat = [[0] * g.num_vertices for _ in range(g.num_vertices)]
    for s, r in g.edges:
        mat[s][r] += 1
    return mat


# -- spectral radius -----------------------------------------------------------


def _power_iteration(mat: list[list[int]], iterations: int = 600) -> tuple[float, list[float]]:
    n = len(mat)
    x = [1.0 / n] * n
    lam = 0.0
    for _ in range(iterations):
        y = [sum(mat[i][j] * x[j] for j in range(n)) + x[i] for i in range(n)]  # (D + I) x
        norm = sum(y)
        if norm == 0.0:
            return 0.0, x
        y = [v / norm for v in y]
        if abs(norm - lam) < 1e-16 and max(abs(a - b) for a, b in zip(x, y)) < 1e-16:
            return norm - 1.0, y
        x, lam = y, norm
    return lam - 1.0, x


def _char_poly(mat: list[list[int]]) -> list[Fraction]:
    """Monic characteristic polynomial, ascending coefficients (Faddeev-LeVerrier)."""
    n = len(mat)
    A = [[Fraction(v) for v in row] for row in mat]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        AM = [
            [sum(A[i][t] * M[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        if k < n:
            M = [[AM[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


def _poly_eval(p: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_normalize(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) >= len(b) and _poly_normalize(a):
        a = _poly_normalize(a)
        if len(a) < len(b):
            break
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = a[:-1]
    return _poly_normalize(a)


def _poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a, b = _poly_normalize(list(a)), _poly_normalize(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
    return a


def _poly_div_exact(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = _poly_normalize(list(a))
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        q[len(a) - len(b)] = f
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] -= f * c
        a = _poly_normalize(a[:-1])
    return q


def _count_real_roots_above(p: list[Fraction], bound: Fraction, upper: Fraction) -> int:
    """Distinct real roots of p in (bound, upper], by a Sturm chain on the
    squarefree part."""
    p = _poly_normalize(list(p))
    deriv = _poly_normalize([i * c for i, c in enumerate(p)][1:])
    if not deriv:
        return 0
    g = _poly_gcd(p, deriv)
    if len(g) > 1:
        p = _poly_div_exact(p, g)
    chain = [p, _poly_normalize([i * c for i, c in enumerate(p)][1:])]
    while chain[-1]:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])

    def variations(x: Fraction) -> int:
        signs = []
        for q in chain:
            v = _poly_eval(q, x)
            if v != 0:
                signs.append(1 if v > 0 else -1)
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    return variations(bound) - variations(upper)


def _rref_kernel(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Kernel basis of a square matrix over the rationals (free variables set to 1)."""
    n = len(mat)
    work = [row[:] for row in mat]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, n) if work[r][col] != 0), None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        pv = work[row][col]
        work[row] = [c / pv for c in work[row]]
        for r in range(n):
            if r != row and work[r][col] != 0:
                f = work[r][col]
                work[r] = [c - f * pc for c, pc in zip(work[r], work[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -work[r][fc]
        basis.append(vec)
    return basis


def _nonnegative_kernel_vector(basis: list[list[Fraction]]) -> list[Fraction] | None:
    def usable(vec):
        if all(c >= 0 for c in vec) and any(c > 0 for c in vec):
            return vec
        if all(c <= 0 for c in vec) and any(c < 0 for c in vec):
            return [-c for c in vec]
        return None

    for vec in basis:
        got = usable(vec)
        if got:
            return got
    # small 0/1 combinations of basis vectors
    for mask in range(1, 1 << min(len(basis), 12)):
        combo = [sum(basis[b][i] for b in range(len(basis)) if mask >> b & 1) for i in range(len(basis[0]))]
        got = usable(combo)
        if got:
            return got
    return None


def check_dagger(g: GraphData):
    """Spectral radius, eigenvalue test, nonnegative weights; exact when certifiable.

    The radius of a nonnegative integer matrix is its largest real eigenvalue,
    and a rational root of a monic integer polynomial is an integer.  So
    certification is fully exact: scan the integer roots of the characteristic
    polynomial up to the max row sum, take the largest, and confirm by a Sturm
    count that no real root lies above it.  Otherwise the radius is irrational
    and float mode applies.
    """
    mat = vertex_matrix(g)
    n = g.num_vertices
    chi = _char_poly(mat)
    row_bound = max(sum(row) for row in mat)

    integer_roots = [c for c in range(row_bound + 1) if _poly_eval(chi, Fraction(c)) == 0]
    if integer_roots:
        cand = Fraction(max(integer_roots))
        if _count_real_roots_above(chi, cand, Fraction(row_bound + 1)) == 0:
            shifted = [
                [Fraction(mat[i][j]) - (cand if i == j else 0) for j in range(n)]
                for i in range(n)
            ]
            basis = _rref_kernel(shifted)
            weights = _nonnegative_kernel_vector(basis)
            if weights is None:
                return NOT_SATISFIED
            total = sum(weights)
            weights = [w / total for w in weights]
            return KmsData(cand, tuple(weights), True)

    # irrational radius: float fallback
    rho_f, x_f = _power_iteration(mat)
    total = sum(x_f)
    weights = [v / total for v in x_f]
    residual = max(
        abs(sum(mat[i][j] * weights[j] for j in range(n)) - rho_f * weights[i]) for i in range(n)
    )
    if residual >= 1e-12 or any(w < -1e-12 for w in weights):
        return NOT_SATISFIED
    return KmsData(rho_f, tuple(max(w, 0.0) for w in weights), False)


# -- state evaluation -----------------------------------------------------------


def kms_eval(g: GraphData, k: KmsData, alpha: tuple[int, ...], beta: tuple[int, ...]):
    """delta(alpha,beta) * rho^-|alpha| * weight(range(alpha)); exact in exact mode."""
    for path, label in ((alpha, "alpha"), (beta, "beta")):
        if not g.is_path(tuple(path)):
            raise InvalidPath(f"{label} = {path} is not a composable edge sequence")
    alpha, beta = tuple(alpha), tuple(beta)
    if alpha != beta:
        return Fraction(0) if k.exact else 0.0
    if not alpha:
        return Fraction(1) if k.exact else 1.0
    w = k.vertex_weights[g.range(alpha[-1])]
    if k.exact:
        return w / k.rho ** len(alpha)
    return w / k.rho ** len(alpha)


def check_gauge_equivariance(g: GraphData, k: KmsData, max_len: int = 2) -> VerificationReport:
    """The state is invariant under the generalized gauge action, identically in z.

    For each sampled path pair the z-exponent of the rescaled element is
    d(alpha) - d(beta); invariance holds because either the paths coincide
    (exponent 0) or the value vanishes.
    """
    checks = []
    ok = True
    for la in range(max_len + 1):
        for lb in range(max_len + 1):
            for alpha in g.paths(la):
                for beta in g.paths(lb):
                    value = kms_eval(g, k, alpha, beta)
                    exponent = g.path_degree(alpha) - g.path_degree(beta)
                    invariant = exponent == 0 or value == 0
                    ok = ok and invariant
                    checks.append(
                        (
                            f"alpha={list(alpha)} beta={list(beta)} z-exp={exponent}",
                            "Verified" if invariant else "Unverified",
                        )
                    )
    return VerificationReport(
        "gauge-equivariance", "Verified" if ok else "Unverified", None, [], checks
    )


def normalized_ftilde(g: GraphData, k: KmsData) -> list[Fraction]:
    """Diagonal of the state's sesquilinear matrix on the edge isometries.

    The (i,i) entry is the weight of the range vertex of edge i; for the
    one-vertex graph with n loops this is the identity.  Requires every such
    weight positive, since the per-edge normalizer is sqrt(rho / weight).
    """
    if not k.exact:
        raise IrrationalData("normalization requires exact spectral data")
    diag = []
    for e in range(g.num_edges):
        w = k.vertex_weights[g.range(e)]
        if w == 0:
            raise ZeroVertexWeight(
                f"edge {e + 1} ranges at a zero-weight vertex; normalization undefined"
            )
        diag.append(w)
    # consistency of the normalizers: each normalized diagonal product equals rho
    for e, w in enumerate(diag):
        assert (k.rho / w) * w == k.rho
    return diag


def edge_normalizers(g: GraphData, k: KmsData) -> list[Scalar]:
    """sqrt(rho / weight(range(e))) in the radical scalar ring."""
    diag = normalized_ftilde(g, k)
    if not isinstance(k.rho, Fraction):
        raise IrrationalData("normalizers need a rational spectral radius")
    return [Scalar.sqrt_of(k.rho / w) for w in diag]


# -- interface with the symbolic engine ----------------------------------------


def edge_letters(g: GraphData, name: str = "S") -> list[Letter]:
    return [Letter(name, (e + 1,), g.gauge_degrees[e]) for e in range(g.num_edges)]


def kms_state(g: GraphData, k: KmsData, name: str = "S"):
    """The state as a word functional for the reduction engine.

    Accepts any word in the edge letters; contracts star-unstar pairs to the
    spanning form first, then applies the path formula.  Exact mode only.
    """
    if not k.exact:
        raise IrrationalData("symbolic evaluation requires exact spectral data")

    def evaluate(word) -> Scalar:
        letters = list(word)
        coeff = Fraction(1)
        changed = True
        while changed:
            changed = False
            for t in range(len(letters) - 1):
                a, b = letters[t], letters[t + 1]
                if a.starred and not b.starred:
                    if a.name != name or b.name != name:
                        raise ValueError(f"foreign letter in state argument: {a} {b}")
                    ea, eb = a.index[0] - 1, b.index[0] - 1
                    if ea != eb:
                        return Scalar.from_fraction(0)
                    if g.num_vertices > 1:
                        # S*_e S_e leaves a range projection behind; tracking it
                        # is only implemented for the one-vertex case
                        raise ValueError(
                            "inner contractions need a one-vertex graph; "
                            "supply spanning-form words instead"
                        )
                    del letters[t : t + 2]
                    changed = True
                    break
        gamma = []
        i = 0
        while i < len(letters) and not letters[i].starred:
            gamma.append(letters[i].index[0] - 1)
            i += 1
        delta = []
        while i < len(letters) and letters[i].starred:
            delta.append(letters[i].index[0] - 1)
            i += 1
        if i != len(letters):
            raise ValueError(f"word not in spanning form after contraction: {word}")
        delta.reverse()
        gamma_t, delta_t = tuple(gamma), tuple(delta)
        if not g.is_path(gamma_t) or not g.is_path(delta_t):
            return Scalar.from_fraction(0)
        if gamma_t != delta_t:
            return Scalar.from_fraction(0)
        if not gamma_t:
            return Scalar.from_fraction(coeff)
        value = coeff * k.vertex_weights[g.range(gamma_t[-1])] / k.rho ** len(gamma_t)
        return Scalar.from_fraction(value)

    return evaluate


# -- file formats ---------------------------------------------------------------


def parse_graph(text: str) -> GraphData:
    """Parse the line-oriented graph format (or its JSON equivalent)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        edges = sorted(data["edges"], key=lambda e: e["id"])
        return GraphData(
            int(data["vertices"]),
            tuple((int(e["src"]) - 1, int(e["dst"]) - 1) for e in edges),
            tuple(int(e.get("deg", 1)) for e in edges),
        )
    num_vertices = None
    rows: list[tuple[int, int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertices" and len(parts) == 2:
            num_vertices = int(parts[1])
        elif parts[0] == "edge" and len(parts) == 6 and parts[4] == "deg":
            rows.append((int(parts[1]), int(parts[2]), int(parts[3]), int(parts[5])))
        else:
            raise ValueError(f"bad graph line {lineno}: {raw!r}")
    if num_vertices is None:
        raise ValueError("graph file missing 'vertices m' line")
    rows.sort()
    return GraphData(
        num_vertices,
        tuple((src - 1, dst - 1) for _, src, dst, _ in rows),
        tuple(deg for *_, deg in rows),
    )


def render_graph(g: GraphData) -> str:
    lines = [f"vertices {g.num_vertices}"]
    for e, (s, r) in enumerate(g.edges):
        lines.append(f"edge {e + 1} {s + 1} {r + 1} deg {g.gauge_degrees[e]}")
    return "\n".join(lines) + "\n"


def kms_table(g: GraphData, k: KmsData, max_len: int) -> str:
    """TSV: path, path, state value, for all path pairs up to the length bound."""
    def fmt_path(p):
        return ".".join(str(e + 1) for e in p) if p else "-"

    def fmt_value(v):
        return str(v) if isinstance(v, Fraction) else repr(v)

    lines = ["alpha\tbeta\tvalue"]
    for la in range(max_len + 1):
        for lb in range(max_len + 1):
            for alpha in g.paths(la):
                for beta in g.paths(lb):
                    value = kms_eval(g, k, alpha, beta)
                    lines.append(f"{fmt_path(alpha)}\t{fmt_path(beta)}\t{fmt_value(value)}")
    return "\n".join(lines) + "\n"
