"""Spin lifts of Coxeter representations to the extended Coxeter group, and the assembly maps."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ValidationError
from .fields import format_scalar, tower_header, tower_of
from .matrix_groups import ExceedsCap, SL2Element, adjoint, group_closure, spin_lift
from .presentations import (Word, build_extended_coxeter, central_generator,
                            free_letters, free_product_with_free, quotient_by_normal_closure)
from .rep_scheme import (RepresentationPoint, check_representation, fox_rows,
                         tangent_report)
from .matrices import kernel

MATERIALIZE_LIMIT = 1024


def check_hom_o(rho):
    """Raise unless rho is injective on every generator's Z2 and every edge's dihedral group."""
    graph = rho.presentation.graph
    if graph is None:
        raise ValidationError("representation has no Coxeter graph attached")
    for v in graph.vertices:
        if rho.images[v].is_identity():
            raise ValidationError(f"generator {v} is sent to the identity; rho is not in hom_o",
                                  obj=v)
    cap = 4 * max((m for _, _, m in graph.edges), default=1)
    for v, w, m in graph.edges:
        closure = group_closure([rho.images[v], rho.images[w]], cap)
        if isinstance(closure, ExceedsCap):
            raise ValidationError(f"edge [{v},{w}] generates more than {cap} elements; its "
                                  "image is not the dihedral group of the label", obj=f"{v},{w}")
        if closure.order != 2 * m:
            raise ValidationError(f"edge [{v},{w}] with label {m} has image of order "
                                  f"{closure.order}, expected {2 * m}", obj=f"{v},{w}")


@dataclass
class LiftFamily:
    """All 2^r sign choices of spin lifts; lift k has sign vector given by the bits of k."""

    base: RepresentationPoint
    extended: object
    projection: object
    z: str
    vertices: tuple
    canonical: dict
    tower: object = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def rank(self):
        return len(self.vertices)

    def __len__(self):
        return 2 ** self.rank

    def sign_vector(self, index):
        r = self.rank
        return tuple(-1 if index >> (r - 1 - k) & 1 else 1 for k in range(r))

    def index_of(self, signs):
        idx = 0
        for s in signs:
            idx = 2 * idx + (1 if s == -1 else 0)
        return idx

    def images_for(self, signs):
        images = {self.z: -SL2Element.identity()}
        for v, s in zip(self.vertices, signs):
            u = self.canonical[v]
            images[v] = u if s == 1 else -u
        return images

    def lift(self, index):
        if not 0 <= index < len(self):
            raise IndexError(index)
        if index not in self._cache:
            self._cache[index] = RepresentationPoint(self.extended, "SL2",
                                                     self.images_for(self.sign_vector(index)))
        return self._cache[index]

    @property
    def lifts(self):
        if len(self) > MATERIALIZE_LIMIT:
            raise ValueError(f"{len(self)} lifts; use lift(index) instead of materializing")
        return [self.lift(k) for k in range(len(self))]

    def deck_table(self):
        """Row per sign vector eps (lex order, + first): index of eps * lift_k for each k."""
        n = len(self)
        if n > MATERIALIZE_LIMIT:
            raise ValueError("deck table too large to materialize")
        table = []
        for e in range(n):
            eps = self.sign_vector(e)
            row = []
            for k in range(n):
                s = self.sign_vector(k)
                row.append(self.index_of(tuple(a * b for a, b in zip(eps, s))))
            table.append(row)
        return table

    def to_json(self, include_lifts=True):
        names = self.tower.names()
        fmt = lambda el: [[format_scalar(x, names) for x in row] for row in el.matrix.rows]
        out = {
            "rank": self.rank,
            "count": len(self),
            "generators": list(self.extended.generators),
            "central_generator": self.z,
            "radicals": tower_header(self.tower),
            "base": self.base.to_json(),
        }
        if include_lifts and len(self) <= MATERIALIZE_LIMIT:
            out["lifts"] = [
                {"signs": list(self.sign_vector(k)),
                 "images": {g: fmt(x) for g, x in self.images_for(self.sign_vector(k)).items()}}
                for k in range(len(self))]
            out["deck_table"] = self.deck_table()
        return out


def _validate_all_signs(ext, z, canonical):
    """Check every relator under every sign pattern of the vertex letters it contains."""
    ident = SL2Element.identity()
    zimg = -ident
    for r in ext.relators:
        gens = [g for g in r.generators() if g != z]
        for signs in itertools.product((1, -1), repeat=len(gens)):
            images = {z: zimg}
            for g, s in zip(gens, signs):
                images[g] = canonical[g] if s == 1 else -canonical[g]
            out = ident
            for g, e in r:
                out = out * (images[g] if e == 1 else images[g].inverse())
            if not out.is_identity():
                raise ValidationError(f"lift fails extended relator {r} for signs {signs}",
                                      obj=str(r))


def enumerate_lifts(rho):
    if rho.target != "SO3":
        raise ValidationError("lifts start from an SO3 representation")
    check_hom_o(rho)
    graph = rho.presentation.graph
    ext, phi = build_extended_coxeter(graph)
    z = central_generator(ext)
    tower = tower_of(*(x for g in rho.elements() for x in g.matrix.entries()))
    canonical = {}
    for v in graph.vertices:
        u, _, tower = spin_lift(rho.images[v], tower)
        canonical[v] = u
    _validate_all_signs(ext, z, canonical)
    return LiftFamily(rho, ext, phi, z, tuple(graph.vertices), canonical, tower)


def check_deck_action(family):
    """Every sign vector permutes the lifts, and any two lifts differ by exactly one."""
    n = len(family)
    table = family.deck_table()
    if any(sorted(row) != list(range(n)) for row in table):
        return False
    for a in range(n):
        hits = [e for e in range(n) if table[e][a] == 0]
        if len(hits) != 1:
            return False
    return True


def verify_etale_at(family, exhaustive_limit=MATERIALIZE_LIMIT):
    """Compare tangent data of the lifts with the base.

    Flipping the sign of a lifted generator does not change its adjoint
    action, so all 2^r Fox matrices coincide; that is checked generator by
    generator, after which one computation covers every lift.  Small
    families are also recomputed lift by lift.
    """
    base_tr = tangent_report(family.base)
    covering_ok = True
    sign_invariant = True
    for v in family.vertices:
        u = family.canonical[v]
        if adjoint(u) != family.base.images[v]:
            covering_ok = False
        if (-u).ad() != u.ad():
            sign_invariant = False
    lift_tr = tangent_report(family.lift(0))
    reports = [lift_tr]
    if len(family) <= exhaustive_limit:
        reports = [tangent_report(family.lift(k)) for k in range(len(family))]
        method = "every lift"
    else:
        method = "sign invariance of the adjoint Fox matrix"
    key = lambda t: (t.dim_Z1, t.dim_B1, t.dim_H1)
    match = sign_invariant and all(key(t) == key(base_tr) for t in reports)
    return {
        "base": base_tr.to_json(),
        "lift": lift_tr.to_json(),
        "lifts_computed": len(reports),
        "lift_count": len(family),
        "method": method,
        "adjoint_matches_base": covering_ok,
        "sign_invariant": sign_invariant,
        "match": match and covering_ok,
    }


def extend_over_free(rho, free_images):
    """The point of hom(Gamma * F_k) restricting to rho with the given free images."""
    free_images = list(free_images)
    big, psi = free_product_with_free(rho.presentation, len(free_images))
    letters = free_letters(big, rho.presentation)
    if len(letters) != len(free_images):
        raise ValidationError("arity mismatch between free letters and images")
    images = dict(rho.images)
    for t, g in zip(letters, free_images):
        if g.group != rho.target:
            raise ValidationError(f"free image for {t} is in {g.group}, expected {rho.target}",
                                  obj=t)
        images[t] = g
    return RepresentationPoint(big, rho.target, images), psi


def restriction(point, pres):
    return RepresentationPoint(pres, point.target, {g: point.images[g] for g in pres.generators})


def _power_is_identity(el, n):
    return (el ** n).is_identity()


def theta_subscheme_check(pres, theta, rho, orders=None, max_order=12):
    """Point- and tangent-level checks for the locus of representations killing theta.

    Each theta word needs a finite-order witness n: supplied, found as a
    relator theta^n, or (weakest) found on rho itself; the source is reported.
    When rho kills theta, the point is pulled back to the quotient presentation
    and the quotient's Z1 is compared with the kernel of the Fox matrix of the
    relators plus theta at rho.
    """
    theta = [w if isinstance(w, Word) else Word.parse(str(w)) for w in theta]
    orders = list(orders) if orders is not None else [None] * len(theta)
    if len(orders) != len(theta):
        raise ValidationError("one order per theta word is required")
    witnesses = []
    for w, n in zip(theta, orders):
        img = rho.image(w)
        if n is None:
            rel = next((k for k in range(1, max_order + 1)
                        if (w ** k).reduce() in {r.reduce() for r in pres.relators}), None)
            if rel is not None:
                witnesses.append({"word": str(w), "n": rel, "source": "relator",
                                  "holds_at_rho": _power_is_identity(img, rel)})
                continue
            found = next((k for k in range(1, max_order + 1) if _power_is_identity(img, k)), None)
            witnesses.append({"word": str(w), "n": found,
                              "source": "rho" if found else "unverified",
                              "holds_at_rho": found is not None})
        else:
            witnesses.append({"word": str(w), "n": n, "source": "supplied",
                              "holds_at_rho": _power_is_identity(img, n)})
    kills = all(rho.image(w).is_identity() for w in theta)
    report = {"kills_theta": kills, "order_witnesses": witnesses}
    ambient = tangent_report(rho)
    report["ambient"] = ambient.to_json()
    if not kills:
        report["passes"] = False
        return report
    quotient, proj = quotient_by_normal_closure(pres, theta)
    qpoint = check_representation(quotient, {g: rho.images[g] for g in quotient.generators},
                                  rho.target)
    qtr = tangent_report(qpoint)
    rows, ncols = fox_rows(pres, rho, list(pres.relators) + theta)
    constrained = kernel((rows, ncols))[0]
    report.update({
        "quotient_generators": list(quotient.generators),
        "quotient_relators": [str(r) for r in quotient.relators],
        "quotient_point": qpoint.to_json(),
        "quotient": qtr.to_json(),
        "constrained_Z1": constrained,
        "constrained_matches_quotient": constrained == qtr.dim_Z1,
        "open_tangent_match": constrained == ambient.dim_Z1,
        "passes": constrained == qtr.dim_Z1,
    })
    return report


def sign_law(ua, ub, m):
    """+1 if (ab)^m = (ba)^m, -1 if (ab)^m = -(ba)^m, else 0."""
    left = (ua * ub) ** m
    right = (ub * ua) ** m
    if left == right:
        return 1
    if left == -right:
        return -1
    return 0
