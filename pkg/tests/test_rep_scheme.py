import pytest
import sympy

from repscheme.errors import ValidationError
from repscheme.fields import Q, adjoin_sqrt
from repscheme.instances import finite_instances, instance_names, load_instance
from repscheme.matrix_groups import SL2Element, SO3Element, rotation_pi
from repscheme.presentations import (GroupHom, Presentation, Word,
                                     build_extended_coxeter, free_product_with_free, parse_presentation,
                                     quotient_by_normal_closure)
from repscheme.rep_scheme import (GroupRingElement, apply_rows, check_representation,
                                  coboundary_rank, coboundary_vectors, fox_derivative, fox_rows,
                                  pullback_representation, representation_from_json,
                                  scheme_equations, tangent_report)

KLEIN = parse_presentation("gen a\ngen b\nrel a^2\nrel b^2\nrel a*b*a^-1*b^-1\n")
VON_DYCK = parse_presentation("gen a\ngen b\ngen c\nrel a^3\nrel b^3\nrel a*b*c\n")


def test_check_representation_examples():
    check_representation(KLEIN, {"a": rotation_pi((1, 0, 0)), "b": rotation_pi((0, 1, 0))})
    with pytest.raises(ValidationError) as e:
        check_representation(KLEIN, {"a": rotation_pi((1, 0, 0)), "b": rotation_pi((1, 1, 0))})
    assert e.value.obj == "a*b*a^-1*b^-1"
    _, s = adjoin_sqrt(Q, -3)
    w = (-1 + s) / 2
    d = SL2Element([[w, 0], [0, w * w]])
    rho = check_representation(VON_DYCK, {"a": d, "b": d, "c": d})
    assert rho.target == "SL2"


def test_check_representation_arity_errors():
    with pytest.raises(ValidationError):
        check_representation(KLEIN, {"a": rotation_pi((1, 0, 0))})
    with pytest.raises(ValidationError):
        check_representation(KLEIN, {"a": SL2Element.identity(), "b": SO3Element.identity()})


def test_scheme_equation_counts():
    s2 = parse_presentation("gen s\nrel s^2\n")
    sys = scheme_equations(s2, "SL2")
    assert (len(sys.variables), len(sys.polynomials)) == (4, 5)
    free = Presentation(("s",), ())
    sys = scheme_equations(free, "SO3")
    assert len(sys.variables) == 9 and all(lab[0] == "member" for lab in sys.labels)
    sys = scheme_equations(VON_DYCK, "SL2")
    assert (len(sys.variables), len(sys.polynomials)) == (12, 15)


RATIONAL = [n for n in instance_names() if load_instance(n).rho.tower().degree == 1]


@pytest.mark.parametrize("name", RATIONAL)
def test_z1_equals_zariski_tangent_of_scheme(name):
    # independent route to Z1: corank of the Jacobian of the scheme equations,
    # rank taken by sympy
    rho = load_instance(name).rho
    system = scheme_equations(rho.presentation, rho.target, base=rho)
    assert system.is_solution(system.base_point)
    J = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                      for row in system.jacobian_at(system.base_point)])
    assert tangent_report(rho).dim_Z1 == len(system.variables) - J.rank()


def test_fox_examples():
    s = Word.gen("s")
    assert str(fox_derivative(s ** 3, "s")) == "1 + s + s*s"
    assert str(fox_derivative(s, "s")) == "1"
    assert fox_derivative(s.inverse(), "s") == GroupRingElement.word(s.inverse(), -1)
    comm = Word.parse("g*z*g^-1*z^-1")
    expected = GroupRingElement.word(Word.gen("g")) - GroupRingElement.word(comm)
    assert fox_derivative(comm, "z") == expected


def test_fox_product_rule():
    u, v = Word.parse("a*b^-1*a"), Word.parse("b*a^-1*b*b")
    for g in "ab":
        lhs = fox_derivative(u * v, g)
        rhs = fox_derivative(u, g) + fox_derivative(v, g).left_mul(u)
        assert lhs == rhs


def test_tangent_examples():
    P = SO3Element([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    rho = check_representation(parse_presentation("gen s\nrel s^3\n"), {"s": P})
    tr = tangent_report(rho)
    assert (tr.dim_Z1, tr.dim_B1, tr.dim_H1) == (2, 2, 0)
    for m in (2, 3, 4):
        pres = parse_presentation(f"gen s\nrel s^{m}\n")
        tr = tangent_report(check_representation(pres, {"s": SO3Element.identity()}))
        assert (tr.dim_Z1, tr.dim_B1, tr.dim_H1) == (0, 0, 0)


def test_finite_instances_have_no_h1():
    names = [i.name for i in finite_instances()]
    assert len(names) >= 10
    for inst in finite_instances():
        assert tangent_report(inst.rho).dim_H1 == 0, inst.name


@pytest.mark.parametrize("name", instance_names())
def test_coboundaries_are_cocycles_and_b1_cross_check(name):
    rho = load_instance(name).rho
    rows, ncols = fox_rows(rho.presentation, rho)
    for v in coboundary_vectors(rho):
        assert not any(apply_rows(rows, ncols, v))
    tr = tangent_report(rho)
    assert coboundary_rank(rho) == tr.dim_B1
    assert tr.dim_H1 >= 0


def test_product_decomposition_of_equations():
    for inst in finite_instances():
        big, _ = free_product_with_free(inst.presentation, 2)
        small = scheme_equations(inst.presentation, inst.rho.target)
        large = scheme_equations(big, inst.rho.target)
        extra = [p for p, lab in zip(large.polynomials, large.labels)
                 if lab[0] == "member" and lab[1] not in inst.presentation.generators]
        assert sorted(map(str, large.polynomials)) == sorted(map(str, small.polynomials + extra))


def test_pullback_examples():
    graph_rho = load_instance("klein_so3_faithful").rho
    ext, phi = build_extended_coxeter(graph_rho.presentation.graph)
    lifted = pullback_representation(phi, graph_rho)
    assert lifted.images["z"].is_identity()

    vd = load_instance("von_dyck").rho
    big, psi = free_product_with_free(vd.presentation, 2)
    ext_point = pullback_representation(psi, vd)
    assert ext_point.images["t1"].is_identity() and ext_point.images["t2"].is_identity()

    pi = load_instance("seifert").presentation
    _, proj = quotient_by_normal_closure(pi, [Word.gen("z")])
    back = pullback_representation(proj, vd)
    assert back.images["z"].is_identity()
    assert all(back.images[g] == vd.images[g] for g in "abc")


def test_pullback_rejects_non_homomorphism():
    # s -> s is not a homomorphism Z2 -> Z3; an order-3 image exposes it
    z2 = parse_presentation("gen s\nrel s^2\n")
    z3 = parse_presentation("gen s\nrel s^3\n")
    bad = GroupHom(z2, z3, {"s": Word.gen("s")})
    rho = check_representation(z3, {"s": SO3Element([[0, 0, 1], [1, 0, 0], [0, 1, 0]])})
    with pytest.raises(ValidationError):
        pullback_representation(bad, rho)


def test_point_json_round_trip():
    for name in ("q8_sl2_faithful", "seifert", "i24_so3_faithful"):
        rho = load_instance(name).rho
        again = representation_from_json(rho.presentation, rho.to_json())
        assert again.images == rho.images
