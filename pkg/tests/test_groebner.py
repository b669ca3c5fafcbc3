import time

import pytest

from latereg.arith import Polynomial, RingContext, monomials_of_degree, parse_polynomial
from latereg.freemod import GradedFreeModule, ModuleElement
from latereg.groebner import (
    BudgetExceeded,
    GroebnerBasis,
    GroebnerError,
    ModuleOrder,
    buchberger,
    ideal_basis,
    normal_form,
    reduce_polynomial,
    schreyer_basis,
    schreyer_syzygies,
)


def polys(texts, ring):
    return [parse_polynomial(t, ring) for t in texts]


@pytest.fixture
def S() -> RingContext:
    return RingContext(1, 2)


@pytest.fixture
def worked_j(S):
    return ideal_basis(polys(["y1^2", "y1*y2", "y2^2", "x0*y1", "x1*y1"], S))


TWISTED_CUBIC = ["x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"]


def test_linear_generators_are_their_own_basis():
    R = RingContext(1)
    gb = ideal_basis(polys(["x0", "x1"], R))
    assert [e.entry(0) for e in gb] == polys(["x0", "x1"], R)
    assert gb.leads == [(0, (1, 0)), (0, (0, 1))]


def test_monomial_ideal_is_self_groebner(S):
    gens = [Polynomial.monomial(S, S.y_monomial(a)) for a in monomials_of_degree(2, 3)]
    gb = ideal_basis(gens)
    assert {e.entry(0) for e in gb} == set(gens)


def test_normal_form_of_multiple_is_zero(S, worked_j):
    assert reduce_polynomial(parse_polynomial("y1^3", S), worked_j).is_zero()


def test_normal_form_witnesses_non_membership(S, worked_j):
    f = parse_polynomial("x0*y2", S)
    assert reduce_polynomial(f, worked_j) == f


def test_normal_form_against_empty_basis(S):
    F = GradedFreeModule(S, (0,))
    empty = buchberger([], module=F)
    v = ModuleElement.from_entries(F, {0: parse_polynomial("x0*y1", S)})
    assert normal_form(v, empty) == v


def test_normal_form_rejects_other_module(S, worked_j):
    v = ModuleElement.basis(GradedFreeModule(S, (0, 0)), 1)
    with pytest.raises(GroebnerError):
        normal_form(v, worked_j)


def test_generators_reduce_to_zero():
    R = RingContext(3)
    gens = polys(TWISTED_CUBIC, R)
    gb = ideal_basis(gens)
    assert all(reduce_polynomial(g, gb).is_zero() for g in gens)
    assert len(gb) == 3


@pytest.mark.parametrize("strategy", ["degree", "fifo"])
def test_strategies_agree_on_reduced_basis(strategy):
    R = RingContext(3)
    gens = polys(TWISTED_CUBIC + ["x0^2*x3 - x1^3"], R)
    reference = ideal_basis(gens, strategy="degree")
    gb = ideal_basis(gens, strategy=strategy)
    assert gb.lead_terms() == reference.lead_terms()
    assert gb.elements == reference.elements


def test_basis_of_basis_is_stable():
    R = RingContext(3)
    gb = ideal_basis(polys(TWISTED_CUBIC, R))
    again = buchberger(gb.elements, module=gb.module)
    assert again.lead_terms() == gb.lead_terms()


def test_submodule_of_rank_two():
    R = RingContext(1)
    F = GradedFreeModule(R, (0, 0))
    v1 = ModuleElement.from_entries(F, {0: parse_polynomial("x0", R), 1: parse_polynomial("x1", R)})
    v2 = ModuleElement.from_entries(F, {0: parse_polynomial("x1", R), 1: parse_polynomial("x0", R)})
    gb = buchberger([v1, v2])
    combo = v1.mul_polynomial(parse_polynomial("x1", R)) - v2.mul_polynomial(parse_polynomial("x0", R))
    assert gb.contains(v1) and gb.contains(v2)
    assert gb.contains(combo)
    assert not gb.contains(ModuleElement.basis(F, 1).mul_monomial(R.x(0)))
    fifo = buchberger([v1, v2], strategy="fifo")
    assert fifo.lead_terms() == gb.lead_terms()


def test_unknown_strategy():
    R = RingContext(1)
    with pytest.raises(ValueError):
        ideal_basis(polys(["x0"], R), strategy="random")


def test_deadline_in_the_past():
    R = RingContext(3)
    with pytest.raises(BudgetExceeded):
        ideal_basis(polys(TWISTED_CUBIC, R), deadline=time.monotonic() - 1)


def test_koszul_syzygy_of_two_variables():
    R = RingContext(1)
    syz = schreyer_syzygies(ideal_basis(polys(["x0", "x1"], R)))
    assert syz.source.twists == (2,)
    assert syz.entry(0, 0) == parse_polynomial("x1", R)
    assert syz.entry(1, 0) == parse_polynomial("-x0", R)


def test_three_variables_have_three_koszul_syzygies():
    T = RingContext(0, 3)
    syz = schreyer_syzygies(ideal_basis(polys(["y1", "y2", "y3"], T)))
    assert syz.source.twists == (2, 2, 2)


def test_square_of_two_variables_has_two_linear_syzygies():
    T = RingContext(0, 2)
    syz = schreyer_syzygies(ideal_basis(polys(["y1^2", "y1*y2", "y2^2"], T)))
    assert syz.source.twists == (3, 3)


def test_syzygies_compose_to_zero():
    R = RingContext(3)
    gb = ideal_basis(polys(TWISTED_CUBIC, R))
    syz = schreyer_basis(gb)
    assert gb.matrix().compose(syz.matrix()).is_zero()
    assert syz.order.is_schreyer
    assert syz.degrees == (3, 3)


def test_schreyer_rejects_non_basis():
    R = RingContext(1)
    F = GradedFreeModule(R, (0,))
    gens = [ModuleElement.from_entries(F, {0: f}) for f in polys(["x0^2 + x1^2", "x0*x1"], R)]
    order = ModuleOrder.position_over_term(F)
    fake = GroebnerBasis(
        module=F,
        order=order,
        elements=gens,
        leads=[order.leading(dict(g.term_map)) for g in gens],
        provenance=[0, 1],
    )
    with pytest.raises(GroebnerError):
        schreyer_basis(fake)


def test_induced_order_breaks_ties_by_index():
    R = RingContext(1)
    F = GradedFreeModule(R, (0,))
    pot = ModuleOrder.position_over_term(F)
    induced = pot.induced([(0, (1, 0)), (0, (1, 0))])
    assert induced.key((0, (0, 1))) > induced.key((1, (0, 1)))
