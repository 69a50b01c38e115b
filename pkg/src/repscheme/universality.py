"""Polynomial systems -> based projective arrangements -> Coxeter graphs -> SO3 representations.

Points of the projective plane are 3-vectors and lines are 3-covectors
(conormals); incidence is the vanishing of the standard pairing.  A
realization is turned into a representation by sending each point or line to
the rotation by pi about its vector, so incidence becomes commutation and the
45-degree pairs of the standard quadrangle become order-4 products.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import AnisotropyError, OrbitError, ParseError, ValidationError
from .fields import (adjoin_sqrt, as_scalar, format_fraction, format_scalar, inverse,
                     parse_scalar, parse_tower, tower_header, tower_of)
from .matrices import Matrix, kernel
from .matrix_groups import SO3Element, cross, dot, rotation_axis, rotation_pi
from .presentations import LabeledGraph, build_coxeter
from .rep_scheme import RepresentationPoint, check_representation

STANDARD_POINTS = {
    "v00": (0, 0, 1), "v10": (1, 0, 1), "v01": (0, 1, 1), "v11": (1, 1, 1),
    "vx": (1, 0, 0), "vy": (0, 1, 0),
}
STANDARD_LINES = {
    "l_x": (0, 1, 0), "l_y": (1, 0, 0), "l_inf": (0, 0, 1),
    "m_x": (1, 0, -1), "m_y": (0, 1, -1),
}
BASE_INCIDENCES = [
    ("v00", "l_x"), ("v10", "l_x"), ("vx", "l_x"),
    ("v00", "l_y"), ("v01", "l_y"), ("vy", "l_y"),
    ("vx", "l_inf"), ("vy", "l_inf"),
    ("v10", "m_x"), ("vy", "m_x"), ("v11", "m_x"),
    ("v01", "m_y"), ("vx", "m_y"), ("v11", "m_y"),
]
POINT_ROLES = tuple(STANDARD_POINTS)
LINE_ROLES = tuple(STANDARD_LINES)
# point ~ line identifications of the Coxeter graph
IDENTIFICATIONS = (("v00", "l_inf"), ("vx", "l_y"), ("vy", "l_x"))
LABEL4_EDGES = (("v10", "v00"), ("v01", "v00"))

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def normalize(v):
    """Projective normal form: scale so the last nonzero coordinate is 1."""
    v = tuple(as_scalar(x) for x in v)
    for x in reversed(v):
        if x != 0:
            inv = inverse(x)
            return tuple(y * inv for y in v)
    raise ValidationError("zero vector has no projective class")


def proportional(u, v):
    return all(x == 0 for x in cross(u, v))


# -- arrangements -------------------------------------------------------------

@dataclass
class Arrangement:
    points: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    incidences: list = field(default_factory=list)
    base: dict = field(default_factory=dict)

    def __post_init__(self):
        self._inc = set(self.incidences)

    def add_point(self, name):
        self._check_new(name)
        self.points.append(name)
        return name

    def add_line(self, name):
        self._check_new(name)
        self.lines.append(name)
        return name

    def _check_new(self, name):
        if not _NAME.match(name):
            raise ValidationError(f"bad element name {name!r}", obj=name)
        if name in self.points or name in self.lines:
            raise ValidationError(f"duplicate element {name}", obj=name)

    def add_incidence(self, p, l):
        if p not in self.points:
            raise ValidationError(f"{p} is not a point", obj=p)
        if l not in self.lines:
            raise ValidationError(f"{l} is not a line", obj=l)
        if (p, l) not in self._inc:
            self._inc.add((p, l))
            self.incidences.append((p, l))

    def is_incident(self, p, l):
        return (p, l) in self._inc

    def elements(self):
        return self.points + self.lines

    def role(self, r):
        try:
            return self.base[r]
        except KeyError:
            raise ValidationError(f"arrangement has no base element for role {r}", obj=r) from None

    def check_base(self):
        for r in POINT_ROLES:
            if self.role(r) not in self.points:
                raise ValidationError(f"base role {r} must be a point", obj=r)
        for r in LINE_ROLES:
            if self.role(r) not in self.lines:
                raise ValidationError(f"base role {r} must be a line", obj=r)
        for p, l in BASE_INCIDENCES:
            if not self.is_incident(self.base[p], self.base[l]):
                raise ValidationError(f"base incidence {p} on {l} is missing", obj=f"{p},{l}")

    def to_text(self):
        out = [f"point {p}" for p in self.points]
        out += [f"line {l}" for l in self.lines]
        out += [f"on {p} {l}" for p, l in self.incidences]
        out += [f"base {r}={n}" for r, n in self.base.items()]
        return "\n".join(out) + "\n"


def standard_quadrangle():
    A = Arrangement()
    for p in POINT_ROLES:
        A.add_point(p)
    for l in LINE_ROLES:
        A.add_line(l)
    for p, l in BASE_INCIDENCES:
        A.add_incidence(p, l)
    A.base = {r: r for r in POINT_ROLES + LINE_ROLES}
    return A


def parse_arrangement(text, source=None):
    A = Arrangement()
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        parts = line.split()
        col = raw.index(parts[0]) + 1
        kw = parts[0]
        try:
            if kw in ("point", "line") and len(parts) == 2:
                (A.add_point if kw == "point" else A.add_line)(parts[1])
            elif kw == "on" and len(parts) == 3:
                pending.append((lineno, raw, parts[1], parts[2]))
            elif kw == "base" and len(parts) == 2 and "=" in parts[1]:
                role, name = parts[1].split("=", 1)
                if role not in POINT_ROLES + LINE_ROLES:
                    raise ParseError(f"unknown base role {role!r}", lineno,
                                     raw.index(parts[1]) + 1, source)
                A.base[role] = name
            else:
                raise ParseError(f"cannot parse {line.strip()!r}", lineno, col, source)
        except ValidationError as e:
            raise ParseError(str(e), lineno, col, source) from None
    for lineno, raw, p, l in pending:
        try:
            A.add_incidence(p, l)
        except ValidationError as e:
            raise ParseError(str(e), lineno, raw.index(p) + 1, source) from None
    for role, name in A.base.items():
        if name not in A.points and name not in A.lines:
            raise ParseError(f"base {role} names unknown element {name}", source=source)
    return A


# -- realizations ---------------------------------------------------------------

@dataclass
class Realization:
    arrangement: Arrangement
    coords: dict

    def __post_init__(self):
        self.coords = {k: normalize(v) for k, v in self.coords.items()}

    def __eq__(self, other):
        return isinstance(other, Realization) and self.coords == other.coords

    def incidence_failures(self):
        return [(p, l) for p, l in self.arrangement.incidences
                if dot(self.coords[p], self.coords[l]) != 0]

    def is_based(self):
        A = self.arrangement
        std = {**STANDARD_POINTS, **STANDARD_LINES}
        return all(r in A.base and self.coords.get(A.base[r]) == normalize(std[r]) for r in std)

    def isotropic_elements(self):
        return [e for e, v in self.coords.items() if dot(v, v) == 0]

    def is_anisotropic(self):
        return not self.isotropic_elements()

    def validate(self):
        missing = [e for e in self.arrangement.elements() if e not in self.coords]
        if missing:
            raise ValidationError(f"element {missing[0]} has no coordinates", obj=missing[0])
        bad = self.incidence_failures()
        if bad:
            p, l = bad[0]
            raise ValidationError(f"incidence {p} on {l} fails", obj=f"{p},{l}")
        return self

    def tower(self):
        return tower_of(*(x for v in self.coords.values() for x in v))

    def to_json(self):
        tower = self.tower()
        names = tower.names()
        return {"radicals": tower_header(tower),
                "coords": {e: [format_scalar(x, names) for x in self.coords[e]]
                           for e in self.arrangement.elements() if e in self.coords}}

    @classmethod
    def from_json(cls, arrangement, data, source=None):
        tower = parse_tower(data.get("radicals", []))
        coords = {}
        for e, v in data.get("coords", {}).items():
            if len(v) != 3:
                raise ParseError(f"{e}: expected 3 coordinates", source=source)
            coords[e] = tuple(parse_scalar(str(x), tower) for x in v)
        return cls(arrangement, coords)


def tangent_kernel_dimension(psi):
    """Dimension of the linearized incidence system at psi with the base held fixed.

    Each non-base element moves in the affine chart where its normalized
    coordinate equal to 1 stays fixed.
    """
    A = psi.arrangement
    base = set(A.base.values())
    col = {}
    ncols = 0
    for e in A.elements():
        if e in base:
            continue
        v = psi.coords[e]
        fixed = max(k for k in range(3) if v[k] != 0)
        col[e] = {}
        for k in range(3):
            if k != fixed:
                col[e][k] = ncols
                ncols += 1
    rows = []
    for p, l in A.incidences:
        row = {}
        vp, vl = psi.coords[p], psi.coords[l]
        for e, other in ((p, vl), (l, vp)):
            for k, c in col.get(e, {}).items():
                if other[k] != 0:
                    row[c] = row.get(c, 0) + other[k]
        row = {c: x for c, x in row.items() if x != 0}
        if row:
            rows.append(row)
    if ncols == 0:
        return 0
    return kernel((rows, ncols))[0]


# -- geometrization ---------------------------------------------------------------

@dataclass
class CoordinateMap:
    """Reads variable values off a realization: x = base + (first / last coordinate)."""

    variables: list
    points: dict
    base_point: dict

    def read(self, psi):
        out = {}
        for v in self.variables:
            p = psi.coords[self.points[v]]
            if p[2] == 0:
                raise ValidationError(f"point {self.points[v]} is at infinity", obj=self.points[v])
            out[v] = self.base_point[v] + p[0] / p[2]
        return out


@dataclass
class Geometrization:
    system: object
    arrangement: Arrangement
    steps: list
    coordinate_map: CoordinateMap
    base_realization: Realization = None

    def realize(self, values, check=True):
        """Place a point of X (in original coordinates) as a realization."""
        coords = {e: STANDARD_POINTS.get(e) or STANDARD_LINES[e]
                  for e in self.arrangement.base.values()}
        for step in self.steps:
            kind, name = step[0], step[1]
            if kind == "var":
                var = step[2]
                a = Fraction(values[var]) - self.system.base_point[var]
                coords[name] = (a, Fraction(0), Fraction(1))
            elif kind in ("join", "meet"):
                coords[name] = normalize(cross(coords[step[2]], coords[step[3]]))
        psi = Realization(self.arrangement, coords)
        if check:
            psi.validate()
        return psi


class _Builder:
    def __init__(self, system):
        self.system = system
        self.A = standard_quadrangle()
        self.steps = []
        self.memo = {("const", 0): "v00", ("const", 1): "v10"}
        self.count = {}
        self.var_points = {}
        self.have_unit = False

    def _fresh(self, prefix):
        n = self.count.get(prefix, 0) + 1
        self.count[prefix] = n
        return f"{prefix}{n}"

    def join(self, name, p, q):
        self.A.add_line(name)
        self.A.add_incidence(p, name)
        self.A.add_incidence(q, name)
        self.steps.append(("join", name, p, q))
        return name

    def meet(self, name, l1, l2):
        self.A.add_point(name)
        self.A.add_incidence(name, l1)
        self.A.add_incidence(name, l2)
        self.steps.append(("meet", name, l1, l2))
        return name

    def var(self, v):
        key = ("var", v)
        if key not in self.memo:
            name = f"X_{v}"
            self.A.add_point(name)
            self.A.add_incidence(name, "l_x")
            self.steps.append(("var", name, v))
            self.memo[key] = name
            self.var_points[v] = name
        return self.memo[key]

    def unit(self):
        if not self.have_unit:
            self.join("l_unit", "v10", "v01")
            self.meet("F", "l_unit", "l_inf")
            self.have_unit = True

    def add(self, a, b):
        key = ("add",) + tuple(sorted((a, b)))
        if key in self.memo:
            return self.memo[key]
        g = self._fresh("add")
        l1 = self.join(f"{g}_L1", "v01", a)
        e = self.meet(f"{g}_E", l1, "l_inf")
        vb = self.join(f"{g}_V", b, "vy")
        d = self.meet(f"{g}_D", vb, "m_y")
        l3 = self.join(f"{g}_L3", d, e)
        s = self.meet(f"{g}_S", l3, "l_x")
        self.memo[key] = s
        return s

    def mul(self, a, b):
        key = ("mul",) + tuple(sorted((a, b)))
        if key in self.memo:
            return self.memo[key]
        self.unit()
        g = self._fresh("mul")
        l2 = self.join(f"{g}_L2", "v01", a)
        ea = self.meet(f"{g}_E", l2, "l_inf")
        l3 = self.join(f"{g}_L3", b, "F")
        gg = self.meet(f"{g}_G", l3, "l_y")
        l4 = self.join(f"{g}_L4", gg, ea)
        s = self.meet(f"{g}_S", l4, "l_x")
        self.memo[key] = s
        return s

    def times(self, c, node):
        """c * node for a positive integer c (double and add)."""
        if c == 1:
            return node
        half = self.times(c // 2, node)
        out = self.add(half, half)
        return self.add(out, node) if c % 2 else out

    def monomial(self, mono, order):
        factors = []
        for v in order:
            factors += [v] * dict(mono).get(v, 0)
        if not factors:
            return "v10"
        node = self.var(factors[0])
        for v in factors[1:]:
            node = self.mul(node, self.var(v))
        return node

    def side(self, terms, order):
        node = None
        for mono, c in terms:
            t = self.times(int(c), self.monomial(mono, order))
            node = t if node is None else self.add(node, t)
        return "v00" if node is None else node


def geometrize(system):
    """Build the arrangement encoding a rational polynomial system around its base point."""
    if system.base_point is None:
        raise ValidationError("geometrization needs a rational base point")
    system.check_base_point()
    shifted = system.shifted()
    b = _Builder(system)
    order = list(system.variables)
    for v in order:
        b.var(v)
    for k, p in enumerate(shifted.polynomials):
        if p.is_zero():
            continue
        scale = lcm(*(c.denominator for c in p.terms.values()))
        terms = (p * scale).sorted_terms(order)
        pos = [(m, c) for m, c in terms if c > 0]
        neg = [(m, -c) for m, c in terms if c < 0]
        sp = b.side(pos, order)
        sn = b.side(neg, order)
        if sp == sn:
            continue
        v_line = b.join(f"eq{k + 1}_V", sp, "vy")
        b.A.add_incidence(sn, v_line)
        b.steps.append(("on", sn, v_line))
    cmap = CoordinateMap(order, dict(b.var_points), dict(system.base_point))
    geo = Geometrization(system, b.A, b.steps, cmap)
    geo.base_realization = geo.realize(system.base_point)
    return geo


# -- Coxeter graph -------------------------------------------------------------------

@dataclass
class CoxeterData:
    graph: LabeledGraph
    vertex_of: dict  # element name -> vertex name
    t_prime: list
    sigma: list

    def members(self, vertex):
        return [e for e, v in self.vertex_of.items() if v == vertex]


def arrangement_to_coxeter(A):
    A.check_base()
    vertex_of = {e: e for e in A.elements()}
    for p, l in IDENTIFICATIONS:
        vertex_of[A.base[l]] = A.base[p]
    vertices = [e for e in A.elements() if vertex_of[e] == e]
    edges = {}
    for p, l in A.incidences:
        v, w = vertex_of[p], vertex_of[l]
        if v == w:
            raise ValidationError(f"identification creates a loop at {v}", obj=v)
        key = frozenset((v, w))
        if key not in edges:
            edges[key] = (v, w, 2)
    for p, q in LABEL4_EDGES:
        v, w = A.base[p], A.base[q]
        key = frozenset((v, w))
        if key in edges:
            raise ValidationError(f"edge [{v},{w}] already present before labeling it 4",
                                  obj=f"{v},{w}")
        edges[key] = (v, w, 4)
    graph = LabeledGraph(tuple(vertices), tuple(edges.values()))
    t_prime = []
    for r in POINT_ROLES + LINE_ROLES:
        v = vertex_of[A.base[r]]
        if v not in t_prime:
            t_prime.append(v)
    sigma = [v for v in t_prime if v != vertex_of[A.base["v11"]]]
    return CoxeterData(graph, vertex_of, t_prime, sigma)


def algebraize(psi, data=None):
    """The representation sending each vertex to the pi-rotation about its vector."""
    A = psi.arrangement
    data = arrangement_to_coxeter(A) if data is None else data
    iso = psi.isotropic_elements()
    if iso:
        raise AnisotropyError(f"element {iso[0]} is isotropic", obj=iso[0])
    images = {}
    for e in A.elements():
        v = data.vertex_of[e]
        if v in images:
            if not proportional(images[v], psi.coords[e]):
                raise ValidationError(f"identified elements {v} and {e} have different "
                                      "coordinates", obj=e)
        else:
            images[v] = psi.coords[e]
    pres = build_coxeter(data.graph)
    rots = {v: rotation_pi(images[v]) for v in data.graph.vertices}
    return check_representation(pres, rots, "SO3")


def cross_section_point(geo):
    """rho_c: the algebraization of the base realization."""
    return algebraize(geo.base_realization)


def _unit(v, tower):
    tower, root = adjoin_sqrt(tower, dot(v, v))
    inv = inverse(root)
    return tuple(x * inv for x in v), tower


def invert_algebraization(rho, A, data=None):
    """Recover (psi, g) with rho = g (alg psi) g^-1 and psi based."""
    data = arrangement_to_coxeter(A) if data is None else data

    def image(role):
        return rho.images[data.vertex_of[A.base[role]]]

    tower = rho.tower()
    cols = []
    for role in ("vx", "vy", "v00"):
        u, tower = _unit(rotation_axis(image(role)), tower)
        cols.append(u)
    if any(dot(cols[i], cols[j]) != 0 for i in range(3) for j in range(i + 1, 3)):
        raise OrbitError("base frame axes are not orthogonal; rho is not in the orbit of the "
                         "cross-section", obj="v00,vx,vy")
    std = {**STANDARD_POINTS, **STANDARD_LINES}
    found = None
    for signs in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        g = Matrix([[signs[j] * cols[j][i] for j in range(3)] for i in range(3)])
        if g.det() != 1:
            g = Matrix([[-x for x in row] for row in g.rows])
        gel = SO3Element(g, check=False)
        if all(gel * rotation_pi(std[r]) * gel.inverse() == image(r) for r in std):
            found = gel
            break
    if found is None:
        raise OrbitError("no frame matches the base generators; rho is not in the orbit of "
                         "the cross-section", obj="base")
    ginv = found.inverse()
    coords = {}
    for e in A.elements():
        h = ginv * rho.images[data.vertex_of[e]] * found
        coords[e] = rotation_axis(h)
    return Realization(A, coords), found


def random_rotation(rng, bound=5):
    """Rational rotation via the Cayley transform of a random skew matrix."""
    a, b, c = (rng.randint(-bound, bound) for _ in range(3))
    K = Matrix([[0, -c, b], [c, 0, -a], [-b, a, 0]])
    ident = Matrix.identity(3)
    return SO3Element((ident - K).inverse() * (ident + K))


def conjugate_point(rho, g):
    images = {s: g * x * g.inverse() for s, x in rho.images.items()}
    return RepresentationPoint(rho.presentation, rho.target, images)


def nonreduced_certificate(geo, epsilons=None):
    """Probe sampled first-order directions for actual curves of realizations.

    For each variable direction and each sampled epsilon, the realization at
    base + epsilon * e_i is constructed without checking; the curve survives
    only if every incidence holds there and the algebraized point satisfies all
    Coxeter relators.
    """
    from .rep_scheme import tangent_report
    epsilons = epsilons or [Fraction(1, 10 ** k) for k in range(1, 4)]
    rho_c = cross_section_point(geo)
    tr = tangent_report(rho_c)
    tx = geo.system.tangent_dimension()
    survivors = 0
    tried = 0
    data = arrangement_to_coxeter(geo.arrangement)
    for v in geo.system.variables:
        for eps in epsilons:
            tried += 1
            values = dict(geo.system.base_point)
            values[v] = values[v] + eps
            psi = geo.realize(values, check=False)
            if psi.incidence_failures():
                continue
            try:
                algebraize(psi, data)
            except ValidationError:
                continue
            survivors += 1
    excess = tr.dim_Z1 - tr.dim_B1
    return {"dim_Z1": tr.dim_Z1, "orbit_dim": tr.dim_B1, "dim_TxX": tx,
            "tangent_excess": excess, "sampled_curves": tried,
            "surviving_curves": survivors,
            "nonreduced": excess > 0 and survivors == 0}


def sample_solutions(name):
    """Rational sample solutions of the shipped systems, by instance name."""
    table = {
        "empty": [{"t": Fraction(x)} for x in (0, 1, -1, Fraction(5, 3))],
        "t": [{"t": Fraction(0)}],
        "t2": [{"t": Fraction(0)}],
        "t3": [{"t": Fraction(0)}],
        "circle": [{"x": Fraction(x), "y": Fraction(y)} for x, y in
                   ((1, 0), (0, 1), (-1, 0), (Fraction(3, 5), Fraction(4, 5)),
                    (Fraction(-5, 13), Fraction(12, 13)))],
        "t_uv": [{"t": Fraction(u * v), "u": Fraction(u), "v": Fraction(v)}
                 for u, v in ((0, 0), (1, 2), (Fraction(1, 2), -3), (2, Fraction(5, 7)))],
    }
    return table.get(name, [])


def coordinate_json(values, order):
    return {v: format_fraction(values[v]) for v in order}


def realization_dumps(psi):
    return json.dumps(psi.to_json(), indent=2)


def seeded_rng(seed):
    return random.Random(seed)
