import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from repscheme.errors import AnisotropyError, ValidationError
from repscheme.fields import Q, adjoin_sqrt, imaginary_unit, inverse
from repscheme.lifting import sign_law
from repscheme.matrices import Matrix
from repscheme.matrix_groups import (DensityCertificate, ExceedsCap, FiniteGroup, SL2Element,
                                     SO3Element, adjoint, centralizer_dimension, dot,
                                     density_certificate, group_closure, lie_centralizer,
                                     rotation_pi, spin_lift)
from repscheme.universality import random_rotation

_, I = imaginary_unit(Q)
DIAG = SO3Element([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])


def test_rotation_pi_examples():
    assert rotation_pi((0, 0, 1)) == DIAG
    assert rotation_pi((1, 1, 0)).matrix == Matrix([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
    with pytest.raises(AnisotropyError):
        rotation_pi((1, I, 0))
    with pytest.raises(ValueError):
        rotation_pi((0, 0, 0))


def test_rotation_pi_is_projective():
    a = (1, -2, 3)
    assert rotation_pi(a) == rotation_pi(tuple(Fraction(-5, 7) * x for x in a))


def test_invalid_elements_rejected():
    with pytest.raises(ValidationError):
        SO3Element([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValidationError):
        SL2Element([[2, 0], [0, 1]])


def test_spin_lift_examples():
    ident = SO3Element.identity()
    u, v, _ = spin_lift(ident)
    assert {u, v} == {SL2Element.identity(), -SL2Element.identity()}

    u, v, _ = spin_lift(rotation_pi((1, 0, 0)))
    expected = SL2Element([[0, I], [I, 0]])
    assert {u, v} == {expected, -expected}

    u, v, tower = spin_lift(rotation_pi((1, 1, 0)))
    _, r2 = adjoin_sqrt(tower, 2)
    k = I * inverse(r2)
    expected = SL2Element([[0, k * (1 - I)], [k * (1 + I), 0]])
    assert {u, v} == {expected, -expected}
    assert u.trace() == 0 and (u * u) == -SL2Element.identity()


def test_adjoint_examples():
    assert adjoint(SL2Element.identity()).is_identity()
    assert adjoint(-SL2Element.identity()).is_identity()
    assert adjoint(SL2Element([[I, 0], [0, -I]])) == DIAG
    assert adjoint(SL2Element([[0, I], [I, 0]])) == rotation_pi((1, 0, 0))


def test_adjoint_of_spin_lift_round_trips():
    rng = random.Random(3)
    for _ in range(10):
        g = random_rotation(rng)
        u, v, _ = spin_lift(g)
        assert adjoint(u) == g and adjoint(v) == g


def _sl2_samples(seed, n):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        a, b, c = (Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3))
        if a != 0:
            out.append(SL2Element([[a, b], [c, (1 + b * c) / a]]))
    return out


def test_adjoint_is_a_homomorphism():
    xs = _sl2_samples(1, 8)
    for g, h in zip(xs, xs[1:]):
        assert adjoint(g * h) == adjoint(g) * adjoint(h)
        assert adjoint(-g) == adjoint(g)


def test_ad_matrices_agree_with_sympy_oracle():
    # Ad(g) on (e, h, f): conjugate each basis matrix and read off coordinates
    e = sympy.Matrix([[0, 1], [0, 0]])
    h = sympy.Matrix([[1, 0], [0, -1]])
    f = sympy.Matrix([[0, 0], [1, 0]])
    for g in _sl2_samples(2, 5):
        G = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                          for row in g.matrix.rows])
        cols = []
        for X in (e, h, f):
            Y = G * X * G.inv()
            cols.append([Y[0, 1], Y[0, 0], Y[1, 0]])
        oracle = sympy.Matrix(cols).T
        ours = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                             for row in g.ad().rows])
        assert ours == oracle


def test_centralizer_examples():
    assert lie_centralizer([DIAG])[0] == 1
    klein = [rotation_pi((1, 0, 0)), rotation_pi((0, 1, 0))]
    rep = centralizer_dimension(klein)
    assert rep.lie_dim == 0 and rep.certified == "group"
    rep = centralizer_dimension([SO3Element.identity()])
    assert rep.lie_dim == 3 and not rep.is_center_only


def test_centralizer_infinite_image_is_lie_certified():
    rng = random.Random(5)
    gens = [random_rotation(rng) for _ in range(2)]
    rep = centralizer_dimension(gens)
    assert rep.lie_dim == 0 and rep.is_center_only and rep.certified == "lie-algebra"


@pytest.mark.parametrize("axes, order", [
    (((1, 0, 0), (0, 1, 0)), 4),
    (((1, 0, 0), (1, 1, 0)), 8),
    (((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)), 24),
])
def test_closure_orders(axes, order):
    grp = group_closure([rotation_pi(a) for a in axes], 100)
    assert isinstance(grp, FiniteGroup) and grp.order == order
    table = grp.multiplication_table()
    ident = grp.index(SO3Element.identity())
    for row in table:
        assert sorted(row) == list(range(order))
        assert ident in row


def test_closure_cap():
    g = SO3Element([[Fraction(3, 5), Fraction(-4, 5), 0], [Fraction(4, 5), Fraction(3, 5), 0],
                    [0, 0, 1]])
    res = group_closure([g], 50)
    assert isinstance(res, ExceedsCap) and res.count == 50
    with pytest.raises(ValueError):
        group_closure([g], 0)


def test_density_examples():
    klein = [rotation_pi((1, 0, 0)), rotation_pi((0, 1, 0))]
    assert density_certificate(klein) == DensityCertificate("Finite", order=4,
                                                            reason="closure enumeration terminated")
    g = SO3Element([[Fraction(3, 5), Fraction(-4, 5), 0], [Fraction(4, 5), Fraction(3, 5), 0],
                    [0, 0, 1]])
    assert density_certificate([g], cap=50).kind == "Undetermined"
    rng = random.Random(9)
    assert density_certificate([random_rotation(rng) for _ in range(2)]).kind == "Dense"
    with pytest.raises(ValidationError):
        density_certificate([SO3Element([[1, 0, 0], [0, 0, -I], [0, I, 0]], check=False)])


axes = st.tuples(*[st.integers(-4, 4)] * 3).filter(any)


@given(axes, axes)
@settings(max_examples=50, deadline=None)
def test_orthogonal_axes_commute(a, b):
    ra, rb = rotation_pi(a), rotation_pi(b)
    cr = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    if any(cr):  # parallel axes commute trivially
        assert (ra * rb == rb * ra) == (dot(a, b) == 0)


def test_label4_pair_and_sign_law():
    a, b = rotation_pi((1, 0, 0)), rotation_pi((1, 1, 0))
    p = a * b
    assert not (p ** 2).is_identity() and (p ** 4).is_identity()
    ua, _, tower = spin_lift(a)
    ub, _, _ = spin_lift(b, tower)
    for x in (ua, -ua):
        for y in (ub, -ub):
            assert sign_law(x, y, 2) == -1
