"""Representation schemes: relator checks, scheme equations, Fox calculus and tangent data."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ValidationError
from .fields import format_scalar, parse_tower, tower_of, tower_header
from .matrices import Matrix, kernel, rank
from .matrix_groups import (GroupElement, SL2Element, SO3Element, element_class,
                            lie_centralizer)
from .polynomials import Polynomial, PolynomialSystem
from .presentations import Presentation, Word


def evaluate_word(word, images):
    """Multiply out a word; inverses come from the group element's inverse."""
    letters = list(word)
    if not letters:
        raise ValueError("cannot infer the group of an empty word; pass a nonempty word")
    out = None
    for g, e in letters:
        x = images[g] if e == 1 else images[g].inverse()
        out = x if out is None else out * x
    return out


def _evaluate(word, images, identity):
    out = identity
    for g, e in word:
        out = out * (images[g] if e == 1 else images[g].inverse())
    return out


@dataclass
class RepresentationPoint:
    presentation: Presentation
    target: str
    images: dict

    def image(self, word):
        return _evaluate(word, self.images, element_class(self.target).identity())

    def elements(self):
        return [self.images[g] for g in self.presentation.generators]

    def tower(self):
        return tower_of(*(x for g in self.elements() for x in g.matrix.entries()))

    def to_json(self):
        tower = self.tower()
        names = tower.names()
        return {
            "target": self.target,
            "radicals": tower_header(tower),
            "images": {g: self.images[g].matrix.to_strings(names)
                       for g in self.presentation.generators},
        }


def _coerce_images(pres, images, target):
    missing = [g for g in pres.generators if g not in images]
    if missing:
        raise ValidationError(f"no image for generator {missing[0]}", obj=missing[0])
    extra = [g for g in images if g not in pres.generators]
    if extra:
        raise ValidationError(f"image given for unknown generator {extra[0]}", obj=extra[0])
    out = {}
    for g in pres.generators:
        x = images[g]
        if isinstance(x, GroupElement):
            if target is None:
                target = x.group
            elif x.group != target:
                raise ValidationError(f"generator {g} maps into {x.group}, expected {target}", obj=g)
            out[g] = x
        else:
            if target is None:
                target = "SL2" if Matrix(x).shape == (2, 2) else "SO3"
            cls = element_class(target)
            try:
                out[g] = cls(x)
            except ValidationError as e:
                raise ValidationError(f"image of {g}: {e}", obj=g) from None
    return out, target


def check_representation(pres, images, target=None):
    """Validate that ``images`` satisfies every relator; return the RepresentationPoint."""
    images, target = _coerce_images(pres, images, target)
    ident = element_class(target).identity()
    for r in pres.relators:
        if not _evaluate(r, images, ident).is_identity():
            raise ValidationError(f"relator {r} does not evaluate to the identity", obj=str(r))
    return RepresentationPoint(pres, target, images)


def representation_from_json(pres, data, source=None):
    from .errors import ParseError
    target = data.get("target")
    if target not in ("SL2", "SO3"):
        raise ParseError(f"target must be SL2 or SO3, got {target!r}", source=source)
    tower = parse_tower(data.get("radicals", []))
    images = {}
    for g, rows in data.get("images", {}).items():
        try:
            images[g] = Matrix.from_strings(rows, tower)
        except ParseError as e:
            raise ParseError(f"image of {g}: {e.message}", e.line, e.column, source) from None
    return check_representation(pres, images, target)


# -- scheme equations ---------------------------------------------------------

def _poly_matmul(a, b):
    n, m, k = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(m)), Polynomial()) for j in range(k)]
            for i in range(n)]


def _poly_det(m):
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def generic_matrix(name, n):
    return [[Polynomial.var(f"{name}_{i + 1}{j + 1}") for j in range(n)] for i in range(n)]


def membership_equations(name, target):
    n = 2 if target == "SL2" else 3
    m = generic_matrix(name, n)
    eqs = []
    if target == "SO3":
        mtm = _poly_matmul([list(col) for col in zip(*m)], m)
        for i in range(3):
            for j in range(i, 3):
                eqs.append(mtm[i][j] - (1 if i == j else 0))
    eqs.append(_poly_det(m) - 1)
    return eqs


def scheme_equations(pres, target, base=None):
    """Polynomial system cutting out hom(pres, target) inside a product of matrix spaces.

    Membership equations come first, generator by generator; then the entries
    of r(g) - I for each relator r (zero polynomials are kept so the count is
    always entries x relators).  Inverse letters use the adjugate (SL2) or the
    transpose (SO3), so no division ever occurs.
    """
    element_class(target)
    n = 2 if target == "SL2" else 3
    variables, polys, labels = [], [], []
    mats, invs = {}, {}
    for g in pres.generators:
        m = generic_matrix(g, n)
        mats[g] = m
        if target == "SL2":
            invs[g] = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
        else:
            invs[g] = [list(col) for col in zip(*m)]
        variables.extend(f"{g}_{i + 1}{j + 1}" for i in range(n) for j in range(n))
        for k, p in enumerate(membership_equations(g, target)):
            polys.append(p)
            labels.append(("member", g, k))
    ident = [[Polynomial.const(int(i == j)) for j in range(n)] for i in range(n)]
    for idx, r in enumerate(pres.relators):
        acc = ident
        for g, e in r:
            acc = _poly_matmul(acc, mats[g] if e == 1 else invs[g])
        for i in range(n):
            for j in range(n):
                polys.append(acc[i][j] - (1 if i == j else 0))
                labels.append(("relator", idx, i, j))
    point = None
    if base is not None:
        point = {}
        for g in pres.generators:
            for i in range(n):
                for j in range(n):
                    x = base.images[g].matrix[i, j]
                    if not isinstance(x, Fraction):
                        point = None
                        break
                    point[f"{g}_{i + 1}{j + 1}"] = x
                if point is None:
                    break
            if point is None:
                break
    system = PolynomialSystem(variables, polys, point)
    system.labels = labels
    return system


# -- Fox calculus ---------------------------------------------------------------

class GroupRingElement:
    """Integer combination of freely reduced words."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = Counter()
        for w, c in (terms or {}).items():
            w = w.reduce()
            self.terms[w] += c
        self.terms = Counter({w: c for w, c in self.terms.items() if c})

    @classmethod
    def word(cls, w, coeff=1):
        return cls({w: coeff})

    def __add__(self, other):
        out = Counter(self.terms)
        for w, c in other.terms.items():
            out[w] += c
        return GroupRingElement(out)

    def __sub__(self, other):
        return self + GroupRingElement({w: -c for w, c in other.terms.items()})

    def left_mul(self, w):
        return GroupRingElement({(w * u): c for u, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def evaluate(self, rep_fn, dim):
        """Sum of coeff * rep_fn(word) as a dim x dim Matrix."""
        acc = Matrix.zeros(dim)
        for w, c in self.terms.items():
            acc = acc + rep_fn(w) * c
        return acc

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda wc: (len(wc[0]), str(wc[0]))):
            body = str(w)
            if c == 1:
                s = body
            elif c == -1:
                s = "-" + body
            else:
                s = f"{c}*{body}"
            parts.append(s)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"GroupRingElement({str(self)!r})"


def fox_derivative(r, s):
    """Free derivative of the word r with respect to generator s."""
    out = Counter()
    prefix = []
    for g, e in r:
        if g == s:
            if e == 1:
                out[Word(tuple(prefix)).reduce()] += 1
            else:
                out[Word(tuple(prefix + [(g, -1)])).reduce()] -= 1
        prefix.append((g, e))
    return GroupRingElement(out)


def fox_rows(pres, rho, words=None):
    """Sparse rows of the stacked Fox matrix evaluated in Ad o rho.

    One 3x3 block per (word, generator); the word list defaults to the relators.
    Computed by a single left-to-right scan of each word keeping the prefix
    image, which is the same as summing Ad over the Fox derivative terms.
    """
    words = pres.relators if words is None else words
    col = {g: 3 * k for k, g in enumerate(pres.generators)}
    ident = element_class(rho.target).identity()
    rows = []
    for w in words:
        block = [dict() for _ in range(3)]
        prefix = ident
        for g, e in w:
            x = rho.images[g]
            if e == 1:
                ad, sign = prefix.ad(), 1
                prefix = prefix * x
            else:
                prefix = prefix * x.inverse()
                ad, sign = prefix.ad(), -1
            c0 = col[g]
            for i in range(3):
                row = block[i]
                for j in range(3):
                    v = ad.rows[i][j]
                    if v:
                        key = c0 + j
                        nv = row.get(key, 0) + (v if sign == 1 else -v)
                        if nv:
                            row[key] = nv
                        else:
                            row.pop(key, None)
        rows.extend(block)
    return rows, 3 * len(pres.generators)


@dataclass
class TangentReport:
    dim_Z1: int
    dim_B1: int
    dim_H1: int
    lie_centralizer_dim: int
    z1_basis: list = field(default_factory=list, repr=False)

    def to_json(self, names=None):
        return {"dim_Z1": self.dim_Z1, "dim_B1": self.dim_B1, "dim_H1": self.dim_H1,
                "centralizer_lie_dim": self.lie_centralizer_dim}


def z1_dimension(rho, words=None):
    rows, ncols = fox_rows(rho.presentation, rho, words)
    return kernel((rows, ncols))


def tangent_report(rho):
    dim_z1, basis = z1_dimension(rho)
    elements = rho.elements()
    cdim = lie_centralizer(elements)[0] if elements else 3
    dim_b1 = 3 - cdim
    return TangentReport(dim_z1, dim_b1, dim_z1 - dim_b1, cdim, basis)


def coboundary_vectors(rho):
    """For each basis vector X of the Lie algebra, the cocycle (X - Ad(rho(s)) X)_s."""
    vecs = []
    ads = [g.ad() for g in rho.elements()]
    for k in range(3):
        v = []
        for ad in ads:
            col = ad.column(k)
            v.extend((1 if i == k else 0) - col[i] for i in range(3))
        vecs.append(tuple(Fraction(0) + x for x in v))
    return vecs


def coboundary_rank(rho):
    if not rho.presentation.generators:
        return 0
    return rank(Matrix(coboundary_vectors(rho)))


def apply_rows(rows, ncols, v):
    return [sum((c * v[j] for j, c in r.items()), Fraction(0)) for r in rows]


def pullback_representation(phi, rho):
    """rho o phi, validated against the source relators."""
    images = {g: _evaluate(phi.images[g], rho.images, element_class(rho.target).identity())
              for g in phi.source.generators}
    try:
        return check_representation(phi.source, images, rho.target)
    except ValidationError as e:
        raise ValidationError(f"pullback is not a representation ({e}); the map is not a "
                              f"homomorphism into {rho.target}", obj=e.obj) from None


def restrict(rho, pres):
    """Restriction to a presentation whose generators are a subset (e.g. Gamma inside Gamma * F_k)."""
    return check_representation(pres, {g: rho.images[g] for g in pres.generators}, rho.target)


def format_matrix(el, names=None):
    return [[format_scalar(x, names) for x in row] for row in el.matrix.rows]


__all__ = [
    "RepresentationPoint", "check_representation", "representation_from_json",
    "scheme_equations", "membership_equations", "GroupRingElement", "fox_derivative",
    "fox_rows", "TangentReport", "tangent_report", "z1_dimension", "coboundary_vectors",
    "coboundary_rank", "pullback_representation", "restrict", "evaluate_word",
    "SL2Element", "SO3Element",
]
