"""SL(2) and SO(3) over exact field towers, and the adjoint covering between them."""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AnisotropyError, TowerHeightError, ValidationError
from .fields import adjoin_sqrt, as_scalar, imaginary_unit, inverse, is_real, tower_of
from .matrices import Matrix, kernel, vstack

DEFAULT_CAP = 10000


def default_cap():
    env = os.environ.get("REPSCHEME_CAP")
    return int(env) if env else DEFAULT_CAP


class GroupElement:
    """Base for matrix group elements; subclasses fix the group and validate."""

    group = None
    lie_dim = 3
    __slots__ = ("matrix",)

    def __init__(self, matrix, check=True):
        if not isinstance(matrix, Matrix):
            matrix = Matrix(matrix)
        self.matrix = matrix
        if check:
            self.validate()

    def validate(self):
        raise NotImplementedError

    def __mul__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.matrix * other.matrix, check=False)

    def __eq__(self, other):
        return type(other) is type(self) and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.group, self.matrix))

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"{type(self).__name__}({self.matrix!r})"

    def is_identity(self):
        return self.matrix.is_identity()

    def conjugate_by(self, g):
        """g self g^-1."""
        return g * self * g.inverse()

    def trace(self):
        return self.matrix.trace()


class SO3Element(GroupElement):
    group = "SO3"
    __slots__ = ()

    def validate(self):
        m = self.matrix
        if m.shape != (3, 3):
            raise ValidationError("SO3 elements are 3x3 matrices")
        if not (m.T * m).is_identity():
            raise ValidationError(f"matrix is not orthogonal: {m!r}")
        if m.det() != 1:
            raise ValidationError(f"matrix has determinant {m.det()}, expected 1")

    @classmethod
    def identity(cls):
        return cls(Matrix.identity(3), check=False)

    def inverse(self):
        return SO3Element(self.matrix.T, check=False)

    def ad(self):
        """Adjoint action on so(3) = Q^3 (cross-product coordinates) is the matrix itself."""
        return self.matrix

    def is_real(self):
        return all(is_real(x) for x in self.matrix.entries())


class SL2Element(GroupElement):
    group = "SL2"
    __slots__ = ()

    def validate(self):
        m = self.matrix
        if m.shape != (2, 2):
            raise ValidationError("SL2 elements are 2x2 matrices")
        if m.det() != 1:
            raise ValidationError(f"matrix has determinant {m.det()}, expected 1")

    @classmethod
    def identity(cls):
        return cls(Matrix.identity(2), check=False)

    def inverse(self):
        return SL2Element(self.matrix.adjugate2(), check=False)

    def __neg__(self):
        return SL2Element(-self.matrix, check=False)

    def ad(self):
        """Adjoint action on sl(2) in the basis (e, h, f); entries are polynomial in g."""
        (a, b), (c, d) = self.matrix.rows
        return Matrix._raw((
            (a * a, -2 * a * b, -(b * b)),
            (-(a * c), a * d + b * c, b * d),
            (-(c * c), 2 * c * d, d * d),
        ))


def element_class(target):
    try:
        return {"SO3": SO3Element, "SL2": SL2Element}[target]
    except KeyError:
        raise ValueError(f"unknown target group {target!r}; expected SO3 or SL2") from None


def dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def rotation_pi(axis):
    """The involution 2aa^T/(a.a) - I: rotation by pi about ``axis``."""
    a = tuple(as_scalar(x) for x in axis)
    if len(a) != 3 or all(x == 0 for x in a):
        raise ValueError("axis must be a nonzero 3-vector")
    n = dot(a, a)
    if n == 0:
        raise AnisotropyError(f"axis {tuple(str(x) for x in a)} is isotropic (a.a = 0)",
                              obj=tuple(str(x) for x in a))
    k = 2 * inverse(n)
    rows = [[k * a[i] * a[j] - (1 if i == j else 0) for j in range(3)] for i in range(3)]
    return SO3Element(Matrix(rows), check=False)


def rotation_axis(g):
    """An axis vector of an involution in SO3 (first nonzero column of g + I)."""
    m = g.matrix + Matrix.identity(3)
    for j in range(3):
        col = m.column(j)
        if any(x != 0 for x in col):
            return col
    raise ValidationError("element is -I, which is not in SO3")


def _pauli(i):
    sx = Matrix([[0, 1], [1, 0]])
    sy = Matrix([[0, -i], [i, 0]])
    sz = Matrix([[1, 0], [0, -1]])
    return sx, sy, sz


def adjoint(g):
    """Image of g in SO3 under the covering SL2 -> SO3 (Pauli-matrix basis)."""
    tower, i = imaginary_unit(g.matrix.tower())
    basis = _pauli(i)
    ginv = g.inverse().matrix
    rows = []
    conj = [g.matrix * s * ginv for s in basis]
    for k in range(3):
        rows.append([(basis[k] * conj[j]).trace() / 2 for j in range(3)])
    return SO3Element(Matrix(rows), check=False)


def spin_lift(g, tower=None):
    """The two preimages ``(U, -U)`` of ``g`` in SL2, extending the tower as needed.

    Returns ``(U, -U, tower')``; the first lift is the canonical one built from
    the adjoined square-root witness.
    """
    R = g.matrix.rows
    tower = tower_of(*g.matrix.entries(), default=tower)
    tower, i = imaginary_unit(tower)
    r = lambda a, b: R[a - 1][b - 1]
    squares = [
        1 + r(1, 1) + r(2, 2) + r(3, 3),
        1 + r(1, 1) - r(2, 2) - r(3, 3),
        1 - r(1, 1) + r(2, 2) - r(3, 3),
        1 - r(1, 1) - r(2, 2) + r(3, 3),
    ]
    k = next(j for j, s in enumerate(squares) if s != 0)
    tower, root = adjoin_sqrt(tower, squares[k])
    qk = root / 2
    inv4 = inverse(4 * qk)
    q = [None] * 4
    q[k] = qk
    off = {
        0: ((1, r(3, 2) - r(2, 3)), (2, r(1, 3) - r(3, 1)), (3, r(2, 1) - r(1, 2))),
        1: ((0, r(3, 2) - r(2, 3)), (2, r(1, 2) + r(2, 1)), (3, r(1, 3) + r(3, 1))),
        2: ((0, r(1, 3) - r(3, 1)), (1, r(1, 2) + r(2, 1)), (3, r(2, 3) + r(3, 2))),
        3: ((0, r(2, 1) - r(1, 2)), (1, r(1, 3) + r(3, 1)), (2, r(2, 3) + r(3, 2))),
    }[k]
    for j, v in off:
        q[j] = v * inv4
    q0, q1, q2, q3 = q
    U = SL2Element(Matrix([[q0 - i * q3, -(i * q1) - q2], [q2 - i * q1, q0 + i * q3]]))
    return U, -U, tower


# -- centralizers and irreducibility ------------------------------------------

def lie_centralizer(elements):
    """Dimension and basis of {X : Ad(g) X = X for all g}."""
    elements = list(elements)
    if not elements:
        raise ValueError("need at least one element")
    blocks = [g.ad() - Matrix.identity(3) for g in elements]
    return kernel(vstack(blocks))


def _eigenvalues(g, tower):
    """Eigenvalues of g (in a tower extended as needed); returns (values, tower)."""
    t = g.trace()
    if g.group == "SL2":
        s = t
        base = []
    else:
        s = t - 1
        base = [Fraction(1)]
    disc = s * s - 4
    if disc == 0:
        return base + [s / 2], tower
    tower, root = adjoin_sqrt(tower, disc)
    return base + [(s + root) / 2, (s - root) / 2], tower


def _intersect(space, matrix):
    """Intersection of span(space) with ker(matrix)."""
    n = len(space)
    cols = [tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0))
                  for row in matrix.rows) for v in space]
    nrows = matrix.shape[0]
    dim, coeffs = kernel(Matrix([[cols[k][i] for k in range(n)] for i in range(nrows)]))
    out = []
    for c in coeffs:
        out.append(tuple(sum((c[k] * space[k][j] for k in range(n)), Fraction(0))
                         for j in range(len(space[0]))))
    return out


def common_eigenspaces(elements, real_only=False, tower=None):
    """Nonzero common eigenspaces of a list of matrix group elements.

    With ``real_only`` only the eigenvalues +-1 are used, which for real
    rotations finds exactly the common invariant real lines.  Otherwise the
    eigenvalues are computed in an extended tower (the Borel/irreducibility
    test); may raise TowerHeightError for very mixed generators.
    """
    elements = [g for g in elements if not g.is_identity()]
    n = 3 if not elements or elements[0].group == "SO3" else 2
    ident = Matrix.identity(n)
    spaces = [[tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]]
    tower = tower_of(*(x for g in elements for x in g.matrix.entries()), default=tower)
    for g in elements:
        if real_only:
            values = [Fraction(1), Fraction(-1)]
        else:
            values, tower = _eigenvalues(g, tower)
        new = []
        for space in spaces:
            for lam in values:
                sub = _intersect(space, g.matrix - ident * lam)
                if sub:
                    new.append(sub)
        spaces = new
        if not spaces:
            break
    return spaces


@dataclass
class CentralizerReport:
    lie_dim: int
    is_center_only: bool
    certified: str
    basis: list = field(default_factory=list, repr=False)


def centralizer_dimension(elements, cap=None):
    """Lie-algebra centralizer dimension plus a center-only verdict.

    ``certified`` is ``"group"`` when the closure was enumerated and the
    group-level centralizer checked, ``"lie-algebra"`` when the closure is
    infinite (or exceeds ``cap``) and the verdict rests on lie_dim = 0 plus the
    absence of a common eigenvector.
    """
    elements = list(elements)
    if not elements:
        raise ValueError("centralizer of an empty list")
    dim, basis = lie_centralizer(elements)
    if dim > 0:
        return CentralizerReport(dim, False, "lie-algebra", basis)
    cap = default_cap() if cap is None else cap
    witness = infinite_order_witness(elements)
    closure = None if witness is not None else group_closure(elements, cap)
    if isinstance(closure, FiniteGroup):
        center = closure.center_elements(elements)
        ident = type(elements[0]).identity()
        allowed = {ident}
        if elements[0].group == "SL2":
            allowed.add(-ident)
        return CentralizerReport(0, set(center) <= allowed, "group", basis)
    try:
        irreducible = not common_eigenspaces(elements)
    except TowerHeightError:
        irreducible = False
    return CentralizerReport(0, irreducible, "lie-algebra", basis)


# -- closure ----------------------------------------------------------------

@dataclass
class FiniteGroup:
    elements: list
    generators: list

    @property
    def order(self):
        return len(self.elements)

    def index(self, g):
        if not hasattr(self, "_index"):
            self._index = {e: k for k, e in enumerate(self.elements)}
        return self._index[g]

    def multiplication_table(self):
        return [[self.index(a * b) for b in self.elements] for a in self.elements]

    def center_elements(self, gens=None):
        """Elements of the closure commuting with every generator."""
        gens = self.generators if gens is None else gens
        return [e for e in self.elements if all(e * g == g * e for g in gens)]

    def contains(self, g):
        try:
            self.index(g)
            return True
        except KeyError:
            return False


@dataclass
class ExceedsCap:
    count: int
    cap: int


def group_closure(generators, cap=None):
    """Breadth-first closure under right multiplication by the generators."""
    cap = default_cap() if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be at least 1")
    generators = list(generators)
    ident = type(generators[0]).identity()
    elements = [ident]
    seen = {ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = g * s
            if h not in seen:
                if len(elements) >= cap:
                    return ExceedsCap(len(elements), cap)
                seen.add(h)
                elements.append(h)
                queue.append(h)
    return FiniteGroup(elements, generators)


# -- density ----------------------------------------------------------------

_FINITE_COSINES = {Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)}


def _ad_trace(g):
    if g.group == "SL2":
        t = g.trace()
        return t * t - 1
    return g.trace()


def infinite_order_witness(generators, max_length=3):
    """A word (tuple of generator indices) whose image has infinite order, or None.

    Uses the rational-cosine test: a rotation whose trace t is rational with
    (t - 1)/2 outside {0, +-1/2, +-1} has infinite order.
    """
    generators = list(generators)
    for length in range(1, max_length + 1):
        for word in itertools.product(range(len(generators)), repeat=length):
            if length > 1 and any(a == b for a, b in zip(word, word[1:])):
                continue
            if length > 1 and word[0] > word[-1]:
                continue
            g = generators[word[0]]
            for k in word[1:]:
                g = g * generators[k]
            t = _ad_trace(g)
            if isinstance(t, Fraction) and (t - 1) / 2 not in _FINITE_COSINES:
                return word
    return None


@dataclass
class DensityCertificate:
    kind: str  # "Dense", "Finite" or "Undetermined"
    order: int | None = None
    witness: tuple | None = None
    reason: str = ""

    def to_json(self):
        out = {"kind": self.kind}
        if self.order is not None:
            out["order"] = self.order
        if self.witness is not None:
            out["witness_word"] = list(self.witness)
        if self.reason:
            out["reason"] = self.reason
        return out


def density_certificate(generators, cap=None, max_word_length=3):
    """Decide Dense / Finite / Undetermined for a subgroup of SO(3, R)."""
    generators = list(generators)
    for g in generators:
        if not isinstance(g, SO3Element):
            raise ValidationError("density certificates need SO3 generators")
        if not g.is_real():
            raise ValidationError("density certificate needs real entries", obj=repr(g))
    witness = infinite_order_witness(generators, max_word_length)
    if witness is None:
        closure = group_closure(generators, cap)
        if isinstance(closure, FiniteGroup):
            return DensityCertificate("Finite", order=closure.order,
                                      reason="closure enumeration terminated")
        return DensityCertificate("Undetermined",
                                  reason=f"closure exceeds cap {closure.cap} and no "
                                         "rational-trace infinite-order witness was found")
    if common_eigenspaces(generators, real_only=True):
        return DensityCertificate("Undetermined", witness=witness,
                                  reason="infinite, but a common invariant axis exists")
    return DensityCertificate("Dense", witness=witness,
                              reason="irreducible and contains an infinite-order element")
