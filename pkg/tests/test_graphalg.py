"""Graphs, spectral data, the equilibrium state and its properties."""

import random
from fractions import Fraction

import pytest

from braidalg.algebra import Letter
from braidalg.graphalg import (
    NOT_SATISFIED,
    GraphData,
    InvalidPath,
    IrrationalData,
    ZeroVertexWeight,
    check_dagger,
    check_gauge_equivariance,
    cuntz_graph,
    cycle_graph,
    edge_letters,
    edge_normalizers,
    kms_eval,
    kms_state,
    kms_table,
    normalized_ftilde,
    parse_graph,
    render_graph,
    vertex_matrix,
)
from braidalg.scalars import Scalar, sqrt


def test_no_sinks_enforced():
    with pytest.raises(ValueError):
        GraphData(2, ((0, 1),), (1,))  # vertex 1 has no outgoing edge
    with pytest.raises(ValueError):
        GraphData(1, (), ())  # empty edge set rejected


def test_vertex_matrix_cuntz():
    for n in (2, 3, 5):
        assert vertex_matrix(cuntz_graph(n)) == [[n]]


def test_vertex_matrix_two_cycle():
    assert vertex_matrix(cycle_graph(2)) == [[0, 1], [1, 0]]


def test_dagger_cuntz():
    for n in (2, 3):
        k = check_dagger(cuntz_graph(n))
        assert k.exact and k.rho == n
        assert k.vertex_weights == (Fraction(1),)


def test_dagger_two_cycle():
    # eigenpair of [[0,1],[1,0]] by direct solve: rho = 1, w = (1/2, 1/2)
    k = check_dagger(cycle_graph(2))
    assert k.exact and k.rho == 1
    assert k.vertex_weights == (Fraction(1, 2), Fraction(1, 2))
    D = vertex_matrix(cycle_graph(2))
    for i in range(2):
        assert sum(D[i][j] * k.vertex_weights[j] for j in range(2)) == k.rho * k.vertex_weights[i]


def test_dagger_two_loops_and_one_loop():
    # D = diag(2, 1): rho = 2, the only nonnegative eigenvector is (1, 0)
    g = GraphData(2, ((0, 0), (0, 0), (1, 1)), (1, 1, 1))
    k = check_dagger(g)
    assert k.exact and k.rho == 2
    assert k.vertex_weights == (Fraction(1), Fraction(0))


def test_float_fallback_irrational_radius():
    # D = [[1,1],[1,0]]: Perron root is the golden ratio
    g = GraphData(2, ((0, 0), (0, 1), (1, 0)), (1, 1, 1))
    k = check_dagger(g)
    assert not k.exact
    assert abs(k.rho - (1 + 5 ** 0.5) / 2) < 1e-12
    D = vertex_matrix(g)
    residual = max(
        abs(sum(D[i][j] * k.vertex_weights[j] for j in range(2)) - k.rho * k.vertex_weights[i])
        for i in range(2)
    )
    assert residual < 1e-12


def test_kms_eval_cuntz():
    g = cuntz_graph(2)
    k = check_dagger(g)
    assert kms_eval(g, k, (0,), (0,)) == Fraction(1, 2)
    assert kms_eval(g, k, (0, 1), (0, 0)) == 0
    assert kms_eval(g, k, (), ()) == 1


def test_kms_eval_two_cycle():
    g = cycle_graph(2)
    k = check_dagger(g)
    assert kms_eval(g, k, (0,), (0,)) == Fraction(1, 2)


def test_kms_eval_invalid_path():
    g = cycle_graph(2)
    k = check_dagger(g)
    with pytest.raises(InvalidPath):
        kms_eval(g, k, (0, 0), (0, 0))  # edge 0 does not compose with itself


def test_state_normalization_by_length():
    # sum over length-L paths of tau(S_a S*_a) = 1 for L <= 3
    for g in (cuntz_graph(2), cuntz_graph(3), cycle_graph(2)):
        k = check_dagger(g)
        for L in range(4):
            total = sum(kms_eval(g, k, a, a) for a in g.paths(L))
            assert total == 1, (g, L)


def test_gauge_equivariance_cases():
    g = cuntz_graph(2, (0, 1))
    k = check_dagger(g)
    report = check_gauge_equivariance(g, k, 2)
    assert report.verified
    # alpha = beta: exponent 0; alpha != beta same length: value 0; mixed: value 0
    assert kms_eval(g, k, (0,), (1,)) == 0
    assert kms_eval(g, k, (0,), (0, 1)) == 0


def test_normalized_ftilde_cuntz_is_identity():
    for n in (2, 3):
        g = cuntz_graph(n)
        k = check_dagger(g)
        assert normalized_ftilde(g, k) == [Fraction(1)] * n


def test_normalized_ftilde_two_cycle():
    g = cycle_graph(2)
    k = check_dagger(g)
    diag = normalized_ftilde(g, k)
    assert diag == [Fraction(1, 2), Fraction(1, 2)]
    assert all(w > 0 for w in diag)
    # normalizers sqrt(rho / w) land in the radical ring
    norms = edge_normalizers(g, k)
    assert norms[0] == sqrt(2)


def test_normalized_ftilde_zero_weight_errors():
    g = GraphData(2, ((0, 0), (0, 0), (1, 1)), (1, 1, 1))
    k = check_dagger(g)
    with pytest.raises(ZeroVertexWeight):
        normalized_ftilde(g, k)


def test_float_mode_rejected_for_symbolic_work():
    g = GraphData(2, ((0, 0), (0, 1), (1, 0)), (1, 1, 1))
    k = check_dagger(g)
    with pytest.raises(IrrationalData):
        normalized_ftilde(g, k)
    with pytest.raises(IrrationalData):
        kms_state(g, k)


def test_kms_state_on_words():
    g = cuntz_graph(2)
    k = check_dagger(g)
    tau = kms_state(g, k)
    S = edge_letters(g)
    assert tau(()) == Scalar.from_fraction(1)
    assert tau((S[0], S[0].star())) == Scalar.from_fraction(Fraction(1, 2))
    assert tau((S[0], S[1].star())) == Scalar.from_fraction(0)
    assert tau((S[0].star(), S[0])) == Scalar.from_fraction(1)
    # inner contraction: S1 S*2 S2 S*1 -> S1 S*1
    word = (S[0], S[1].star(), S[1], S[0].star())
    assert tau(word) == Scalar.from_fraction(Fraction(1, 2))


def test_cuntz_kms_lemma_random_triples():
    """tau(S_alpha x S*_beta) = delta(alpha,beta) n^-|alpha| tau(x), |alpha| = |beta|."""
    rng = random.Random(11)
    for n in (2, 3):
        g = cuntz_graph(n)
        k = check_dagger(g)
        tau = kms_state(g, k)
        S = edge_letters(g)
        for _ in range(100):
            length = rng.randint(1, 3)
            alpha = [rng.randrange(n) for _ in range(length)]
            beta = [rng.randrange(n) for _ in range(length)]
            x = tuple(
                S[rng.randrange(n)] if rng.random() < 0.5 else S[rng.randrange(n)].star()
                for _ in range(rng.randint(0, 4))
            )
            word = tuple(S[a] for a in alpha) + x + tuple(S[b].star() for b in reversed(beta))
            lhs = tau(word)
            expected = (
                Scalar.from_fraction(Fraction(1, n ** length)) * tau(x)
                if alpha == beta
                else Scalar.from_fraction(0)
            )
            assert lhs == expected, (n, alpha, x, beta)


def test_graph_file_roundtrip():
    g = GraphData(2, ((0, 1), (1, 0)), (0, 1))
    text = render_graph(g)
    assert parse_graph(text) == g


def test_graph_json_format():
    text = '{"vertices": 1, "edges": [{"id": 1, "src": 1, "dst": 1, "deg": 1}, {"id": 2, "src": 1, "dst": 1, "deg": 2}]}'
    g = parse_graph(text)
    assert g == GraphData(1, ((0, 0), (0, 0)), (1, 2))


def test_kms_table_contains_header_and_values():
    g = cuntz_graph(2)
    k = check_dagger(g)
    table = kms_table(g, k, 1)
    lines = table.splitlines()
    assert lines[0] == "alpha\tbeta\tvalue"
    assert "1\t1\t1/2" in lines


def test_dagger_not_satisfied_is_falsy():
    assert not NOT_SATISFIED


def test_dagger_defective_radius_is_still_exact():
    # D = [[1,1],[0,1]]: radius 1 with a Jordan block; power iteration alone
    # converges too slowly, but the polynomial certification is exact
    g = GraphData(2, ((0, 0), (0, 1), (1, 1)), (1, 1, 1))
    k = check_dagger(g)
    assert k.exact and k.rho == 1
    assert k.vertex_weights == (Fraction(1), Fraction(0))


def test_dagger_integer_eigenvalue_below_irrational_radius():
    # D = diag([2], [[1,2],[1,1]]): 2 is an eigenvalue but the radius is
    # 1 + sqrt(2); certification must refuse the integer candidate
    g = GraphData(
        3, ((0, 0), (0, 0), (1, 1), (1, 2), (1, 2), (2, 1), (2, 2)), (1,) * 7
    )
    k = check_dagger(g)
    assert not k.exact
    assert abs(k.rho - (1 + 2 ** 0.5)) < 1e-10


def test_dagger_battery_of_integer_radius_graphs():
    # larger loop bouquets: radius n, weight 1
    for n in (4, 5, 7):
        k = check_dagger(cuntz_graph(n))
        assert k.exact and k.rho == n
    # longer cycles: radius 1, uniform weights
    for n in (3, 4):
        k = check_dagger(cycle_graph(n))
        assert k.exact and k.rho == 1
        assert k.vertex_weights == tuple(Fraction(1, n) for _ in range(n))
    # 3-vertex regular graph, one edge to each other vertex: radius 2
    edges = tuple((i, j) for i in range(3) for j in range(3) if i != j)
    g = GraphData(3, edges, (1,) * 6)
    k = check_dagger(g)
    assert k.exact and k.rho == 2
    assert k.vertex_weights == (Fraction(1, 3),) * 3
    # unequal positive weights with integer radius: D = [[1,2],[1,0]]
    g = GraphData(2, ((0, 0), (0, 1), (0, 1), (1, 0)), (1, 1, 1, 1))
    k = check_dagger(g)
    assert k.exact and k.rho == 2
    assert k.vertex_weights == (Fraction(2, 3), Fraction(1, 3))
