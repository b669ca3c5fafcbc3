import json

import pytest

from latereg.arith import Polynomial, RingContext, big_binomial, monomials_of_degree, parse_polynomial
from latereg.freemod import (
    Complex,
    GradedFreeModule,
    GradedMatrix,
    ModuleElement,
    compose_is_zero,
    dualize,
)
from latereg.rendering import render_betti, render_side_by_side
from latereg.resolution import (
    BettiTable,
    NonMinimalError,
    ResolutionError,
    betti_numerator,
    betti_table,
    complete_intersection,
    free_resolution,
    hilbert_check,
    hilbert_numerator,
    ideal_table,
    koszul_complex,
    minimize,
    power_ideal_betti,
    regularity,
    resolve,
    tensor_complexes,
)


def row(texts, ring):
    return GradedMatrix.row(ring, [parse_polynomial(t, ring) for t in texts])


def maximal_ideal(ring):
    return GradedMatrix.row(ring, [Polynomial.monomial(ring, ring.x(i)) for i in range(ring.n + 1)])


@pytest.fixture
def R() -> RingContext:
    return RingContext(1)


@pytest.fixture
def m_squared(R):
    return row(["x0^2", "x0*x1", "x1^2"], R)


def test_resolution_of_residue_field(R):
    c = free_resolution(maximal_ideal(R))
    assert c.ranks() == [1, 2, 1]
    assert compose_is_zero(c)


def test_resolution_of_square_monomials():
    T = RingContext(0, 2)
    c = resolve(row(["y1^2", "y1*y2", "y2^2"], T))
    assert c.ranks() == [1, 3, 2]


def test_zero_presentation_resolves_to_free_module(R):
    F = GradedFreeModule(R, (0,))
    c = resolve(GradedMatrix.zero(GradedFreeModule(R, ()), F))
    assert c.ranks() == [1]
    assert betti_table(c) == BettiTable({(0, 0): 1})


def test_minimize_keeps_minimal_koszul(R):
    k = koszul_complex([parse_polynomial("x0", R), parse_polynomial("x1", R)])
    assert minimize(k) == k


def test_minimize_removes_identity_padding():
    R = RingContext(0)
    F0 = GradedFreeModule(R, (0, 2))
    F1 = GradedFreeModule(R, (1, 2))
    cols = [
        ModuleElement(F0, {(0, (1,)): 1}),
        ModuleElement(F0, {(1, (0,)): 1}),
    ]
    padded = Complex([GradedMatrix(F1, F0, cols)])
    with pytest.raises(NonMinimalError):
        betti_table(padded)
    c = minimize(padded)
    assert c.ranks() == [1, 1]
    assert betti_table(c) == BettiTable({(0, 0): 1, (1, 1): 1})


def test_square_of_maximal_ideal(R, m_squared):
    schreyer = free_resolution(m_squared)
    c = minimize(schreyer)
    table = betti_table(c)
    assert c.ranks() == [1, 3, 2]
    assert table == BettiTable({(0, 0): 1, (1, 2): 3, (2, 3): 2})
    assert regularity(table) == 1
    assert table.max_degree_sequence() == (0, 2, 3)
    assert minimize(c) == c


def test_both_strategies_give_the_same_table(m_squared):
    degree = betti_table(resolve(m_squared, strategy="degree"))
    fifo = betti_table(resolve(m_squared, strategy="fifo"))
    assert degree == fifo


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_koszul_resolution_of_residue_field(n):
    ring = RingContext(n)
    table = betti_table(resolve(maximal_ideal(ring)))
    nvars = n + 1
    assert table == BettiTable({(i, i): big_binomial(nvars, i) for i in range(nvars + 1)})
    assert regularity(table) == 0


def test_resolution_length_is_bounded(R):
    with pytest.raises(ResolutionError):
        free_resolution(maximal_ideal(R), max_length=1)


def test_betti_table_of_empty_complex(R):
    c = Complex([], base=GradedFreeModule(R, ()))
    table = betti_table(c)
    assert not table
    with pytest.raises(ValueError):
        regularity(table)


def test_koszul_betti_on_two_elements():
    T = RingContext(0, 2)
    k = koszul_complex([parse_polynomial("y1", T), parse_polynomial("y2", T)])
    assert betti_table(k) == BettiTable({(0, 0): 1, (1, 1): 2, (2, 2): 1})


@pytest.mark.parametrize("q,ranks", [(1, [1, 1]), (2, [1, 2, 1]), (3, [1, 3, 3, 1])])
def test_koszul_ranks(q, ranks):
    T = RingContext(0, q)
    k = koszul_complex([Polynomial.monomial(T, T.y(i)) for i in range(1, q + 1)])
    assert k.ranks() == ranks
    assert compose_is_zero(k)


def test_degree_sequences_of_pure_tables():
    ring = RingContext(2)
    table = betti_table(resolve(maximal_ideal(ring)))
    assert table.max_degree_sequence() == (0, 1, 2, 3)
    assert table.min_degree_sequence() == (0, 1, 2, 3)
    assert table.is_pure()


def test_tensor_with_unit_complex(R):
    a = koszul_complex([parse_polynomial("x0", R), parse_polynomial("x1", R)])
    unit = Complex([], base=GradedFreeModule(R, (0,)))
    assert tensor_complexes(a, unit) == a


def test_tensor_of_koszul_complexes(R):
    a = koszul_complex([parse_polynomial("x0", R)])
    b = koszul_complex([parse_polynomial("x1", R)])
    t = tensor_complexes(a, b)
    assert compose_is_zero(t)
    both = koszul_complex([parse_polynomial("x0", R), parse_polynomial("x1", R)])
    assert betti_table(t) == betti_table(both)


def test_tensor_of_resolution_with_koszul_on_new_variables():
    S = RingContext(1, 2)
    m2 = row(["x0^2", "x0*x1", "x1^2"], S)
    g = resolve(m2)
    k = koszul_complex([Polynomial.monomial(S, S.y(1)), Polynomial.monomial(S, S.y(2))])
    t = tensor_complexes(g, k)
    assert compose_is_zero(t)
    expected: dict[tuple[int, int], int] = {}
    for (i, j), b in betti_table(g).entries.items():
        for q in range(3):
            expected[(i + q, j + q)] = expected.get((i + q, j + q), 0) + big_binomial(2, q) * b
    assert betti_table(t) == BettiTable(expected)


@pytest.mark.parametrize(
    "q,a,betti",
    [(2, 1, [2, 1]), (2, 2, [3, 2]), (3, 2, [6, 8, 3])],
)
def test_power_ideal_betti_values(q, a, betti):
    table = power_ideal_betti(q, a)
    assert table.totals() == betti
    assert all(j == a + i for i, j in table)


@pytest.mark.slow
@pytest.mark.parametrize("q", [1, 2, 3, 4])
@pytest.mark.parametrize("a", [1, 2, 3, 4])
def test_power_ideal_betti_matches_engine(q, a):
    T = RingContext(0, q)
    gens = [Polynomial.monomial(T, T.y_monomial(al)) for al in monomials_of_degree(q, a)]
    presentation = GradedMatrix.row(T, gens)
    quotient = betti_table(resolve(presentation))
    assert ideal_table(quotient) == power_ideal_betti(q, a)
    assert hilbert_check(presentation, quotient)


def test_hilbert_numerators(R, m_squared):
    assert hilbert_numerator(maximal_ideal(R)) == {0: 1, 1: -2, 2: 1}
    table = betti_table(resolve(m_squared))
    assert betti_numerator(table) == {0: 1, 2: -3, 3: 2}
    assert hilbert_check(m_squared, table)
    assert not hilbert_check(m_squared, BettiTable({(0, 0): 1}))


def test_dual_of_finite_length_resolution(R, m_squared):
    c = resolve(m_squared)
    dual = dualize(c)
    assert compose_is_zero(dual)
    table = betti_table(dual)
    assert table == betti_table(c).dual()
    assert table.totals() == [2, 3, 1]
    assert hilbert_check(dual.maps[0], table)
    assert table.shifted(3).max_degree_sequence() == (0, 1, 3)


@pytest.mark.parametrize("c", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_complete_intersection_regularity(c, k):
    ring = RingContext(3)
    forms = [parse_polynomial(f"x{i}^{k} + x3^{k}", ring) for i in range(c)]
    ci = complete_intersection(forms)
    assert ci.agree
    assert ci.ideal_regularity == c * (k - 1) + 1


def test_two_quadrics_in_four_variables():
    ring = RingContext(3)
    ci = complete_intersection([parse_polynomial("x0^2", ring), parse_polynomial("x1^2", ring)])
    assert regularity(ci.computed) == 2
    assert ci.ideal_regularity == 3


def test_ideal_table_drops_quotient_column():
    quotient = BettiTable({(0, 0): 1, (1, 2): 3, (2, 3): 2})
    assert ideal_table(quotient) == BettiTable({(0, 2): 3, (1, 3): 2})


def test_betti_json_schema():
    table = BettiTable({(0, 2): 3, (1, 3): 2})
    data = json.loads(table.to_json())
    assert data == {
        "entries": [{"i": 0, "j": 2, "beta": 3}, {"i": 1, "j": 3, "beta": 2}],
        "pd": 1,
        "reg": 2,
    }
    assert BettiTable.from_json(table.to_json()) == table


def test_betti_table_arithmetic():
    a = BettiTable({(0, 2): 1})
    b = BettiTable({(0, 2): 2, (1, 3): 1})
    assert (a + b)[(0, 2)] == 3
    assert a.difference(b) == {(0, 2): (1, 2), (1, 3): (0, 1)}
    with pytest.raises(ValueError):
        BettiTable({(0, 0): -1})


def test_render_betti_layout():
    table = BettiTable({(0, 0): 1, (1, 2): 3, (2, 3): 2})
    assert render_betti(table).splitlines() == [
        "       0 1 2",
        "total: 1 3 2",
        "    0: 1 . .",
        "    1: . 3 2",
    ]


def test_render_side_by_side_marks_differences():
    predicted = BettiTable({(0, 2): 3, (1, 3): 2})
    computed = BettiTable({(0, 2): 3, (1, 3): 1})
    plain = render_side_by_side(predicted, computed)
    assert plain.splitlines()[0].startswith("predicted")
    assert "computed" in plain.splitlines()[0]
    marked = render_side_by_side(predicted, computed, use_rich=True)
    assert "[red]" in marked
