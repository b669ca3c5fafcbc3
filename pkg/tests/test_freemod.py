import pytest

from latereg.arith import HomogeneityError, RingContext, parse_polynomial
from latereg.freemod import (
    Complex,
    GradedFreeModule,
    GradedMapError,
    GradedMatrix,
    ModuleElement,
    apply,
    compose_is_zero,
    dualize,
    format_matrix,
    infer_ring_shape,
    parse_matrix,
    twist_complex,
)
from latereg.resolution import koszul_complex, resolve


@pytest.fixture
def S() -> RingContext:
    return RingContext(1, 2)


def p(text, ring):
    return parse_polynomial(text, ring)


def test_identity_fixes_basis_vector(S):
    F = GradedFreeModule(S, (1,))
    e = ModuleElement.basis(F, 0)
    assert apply(GradedMatrix.identity(F), e) == e


def test_koszul_map_is_linear(S):
    d = GradedMatrix.row(S, [p("y1", S), p("y2", S)])
    v = ModuleElement.basis(d.source, 0) - ModuleElement.basis(d.source, 1)
    image = apply(d, v)
    assert image.degree == 1
    assert image.entry(0) == p("y1 - y2", S)


def test_zero_matrix_kills_everything(S):
    F = GradedFreeModule(S, (1, 1))
    G = GradedFreeModule(S, (0,))
    v = ModuleElement.from_entries(F, {0: p("x0", S), 1: p("y1", S)})
    assert apply(GradedMatrix.zero(F, G), v).is_zero()


def test_apply_rejects_foreign_vector(S):
    d = GradedMatrix.row(S, [p("y1", S)])
    with pytest.raises(GradedMapError):
        apply(d, ModuleElement.basis(GradedFreeModule(S, (2,)), 0))


def test_column_degree_is_validated(S):
    source = GradedFreeModule(S, (1,))
    target = GradedFreeModule(S, (0,))
    col = ModuleElement.from_entries(target, {0: p("x0^2", S)})
    with pytest.raises(GradedMapError):
        GradedMatrix(source, target, [col])


def test_element_rejects_mixed_degrees(S):
    F = GradedFreeModule(S, (0, 1))
    with pytest.raises(HomogeneityError):
        ModuleElement.from_entries(F, {0: p("x0", S), 1: p("x0", S)})


def test_koszul_complex_composes_to_zero(S):
    assert compose_is_zero(koszul_complex([p("y1", S), p("y2", S)]))


def test_identity_chain_is_not_a_complex(S):
    F = GradedFreeModule(S, (0,))
    check = compose_is_zero(Complex([GradedMatrix.identity(F), GradedMatrix.identity(F)]))
    assert not check
    assert check.position == 1
    assert check.reason == "nonzero"


def test_noncomposable_chain_is_reported(S):
    d1 = GradedMatrix.row(S, [p("x0", S)])
    d2 = GradedMatrix.identity(GradedFreeModule(S, (0,)))
    check = compose_is_zero(Complex([d1, d2]))
    assert check.reason == "noncomposable"


def test_resolution_of_square_of_maximal_ideal_is_a_complex():
    R = RingContext(1)
    gens = [p(t, R) for t in ("x0^2", "x0*x1", "x1^2")]
    assert compose_is_zero(resolve(GradedMatrix.row(R, gens)))


def test_dualize_single_map(S):
    c = Complex([GradedMatrix.row(S, [p("x0", S)])])
    dual = dualize(c)
    assert dual.module(0).twists == (-1,)
    assert dual.module(1).twists == (0,)
    assert dual.maps[0].entry(0, 0) == p("x0", S)


def test_dualize_twice_is_identity(S):
    c = koszul_complex([p("x0", S), p("y1", S), p("y2", S)])
    assert dualize(dualize(c)) == c


def test_dual_koszul_is_koszul_up_to_twist(S):
    c = koszul_complex([p("x0", S), p("x1", S)])
    dual = twist_complex(dualize(c), 2)
    assert dual.ranks() == [1, 2, 1]
    assert [m.twists for m in dual.modules] == [(0,), (1, 1), (2,)]
    assert compose_is_zero(dual)


def test_twist_by_zero_is_identity(S):
    c = koszul_complex([p("y1", S), p("y2", S)])
    assert twist_complex(c, 0) == c


def test_twist_free_module(S):
    c = Complex([], base=GradedFreeModule(S, (1,)))
    assert twist_complex(c, -1).module(0).twists == (0,)


def test_transpose_and_compose(S):
    d = GradedMatrix.row(S, [p("x0", S), p("x1", S)])
    t = d.transpose()
    assert t.shape == (2, 1)
    assert t.source.twists == (0,)
    assert t.target.twists == (-1, -1)
    square = d.twisted(0).compose(GradedMatrix.identity(d.source))
    assert square == d


def test_hstack_concatenates_sources(S):
    a = GradedMatrix.row(S, [p("x0", S)])
    b = GradedMatrix.row(S, [p("y1^2", S)])
    m = GradedMatrix.hstack([a, b])
    assert m.source.twists == (1, 2)
    assert m.entry(0, 1) == p("y1^2", S)


def test_lift_to_larger_ring():
    R = RingContext(1)
    S = RingContext(1, 2)
    m = GradedMatrix.row(R, [p("x0*x1", R)]).lift_to(S)
    assert m.ring == S
    assert m.entry(0, 0) == p("x0*x1", S)


def test_matrix_text_round_trip():
    R = RingContext(1)
    m = GradedMatrix.row(R, [p("x0", R), p("x1^2 - 3*x0*x1", R)])
    text = format_matrix(m)
    assert text.splitlines()[0] == "matrix 0 <- 1 2"
    assert parse_matrix(text, R) == m


def test_matrix_text_with_zero_column_and_ring_line():
    text = "ring n=1 N=0\n# a comment\nmatrix 0 1 <- 1\n0: x0; 1: 0\n"
    assert infer_ring_shape(text) == (1, 0)
    m = parse_matrix(text, RingContext(1))
    assert m.columns[0].entries().keys() == {0}


def test_infer_ring_shape_from_variables():
    assert infer_ring_shape("matrix 0 <- 2\n0: x2*y3 - x0*y1\n") == (2, 3)


def test_parse_matrix_rejects_bad_header(S):
    with pytest.raises(GradedMapError):
        parse_matrix("mat 0 <- 1\n0: x0\n", S)


def test_parse_matrix_rejects_column_count(S):
    with pytest.raises(GradedMapError):
        parse_matrix("matrix 0 <- 1 1\n0: x0\n", S)
