"""The shipped invariant suite behind ``repscheme verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .instances import SYSTEMS, finite_instances, load_instance, load_system
from .lifting import (check_deck_action, enumerate_lifts, extend_over_free, sign_law,
                      verify_etale_at)
from .matrix_groups import (FiniteGroup, cross, density_certificate, group_closure,
                            rotation_pi, spin_lift)
from .presentations import free_product_with_free
from .rep_scheme import (apply_rows, coboundary_vectors, fox_rows, scheme_equations,
                         tangent_report)
from .universality import (algebraize, arrangement_to_coxeter, conjugate_point, geometrize,
                           invert_algebraization, random_rotation, sample_solutions)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def random_dihedral_pair(rng, m):
    """Rational axes whose pi-rotations generate a dihedral group of order 4m (m = 1, 2)."""
    g = random_rotation(rng)
    if m == 1:
        while True:
            a = tuple(rng.randint(-4, 4) for _ in range(3))
            c = tuple(rng.randint(-4, 4) for _ in range(3))
            b = cross(a, c)
            if any(a) and any(b):
                break
    else:
        a, b = (1, 0, 0), (1, 1, 0)
    ga = tuple(sum(g.matrix[i, j] * a[j] for j in range(3)) for i in range(3))
    gb = tuple(sum(g.matrix[i, j] * b[j] for j in range(3)) for i in range(3))
    return ga, gb


def check_finite_vanishing():
    bad = []
    count = 0
    for inst in finite_instances():
        count += 1
        tr = tangent_report(inst.rho)
        if tr.dim_H1 != 0:
            bad.append(f"{inst.name}: H1={tr.dim_H1}")
    return Check("finite groups have H1 = 0", not bad and count > 0,
                 "; ".join(bad) or f"{count} representation points")


def check_sign_law(seed, trials=20):
    rng = random.Random(seed)
    failures = []
    for k in range(trials):
        m = 1 + k % 2
        a, b = random_dihedral_pair(rng, m)
        ua, _, tower = spin_lift(rotation_pi(a))
        ub, _, tower = spin_lift(rotation_pi(b), tower)
        for sa in (1, -1):
            for sb in (1, -1):
                x = ua if sa == 1 else -ua
                y = ub if sb == 1 else -ub
                if sign_law(x, y, m) != -1:
                    failures.append(k)
    return Check("lift pairs satisfy (ab)^m = -(ba)^m", not failures,
                 f"{trials} random pairs" if not failures else f"failed trials {failures}")


def check_deck_groups():
    out = []
    for name in ("rank1_so3", "klein_so3_faithful", "rank3_so3"):
        fam = enumerate_lifts(load_instance(name).rho)
        ok = len(fam) == 2 ** fam.rank and check_deck_action(fam)
        out.append(f"{name}: r={fam.rank}, lifts={len(fam)}, simply transitive={ok}")
        if not ok:
            return Check("deck group Z2^r acts simply transitively", False, "; ".join(out))
    return Check("deck group Z2^r acts simply transitively", True, "; ".join(out))


def check_universality(seed, cap=None, conjugators=20):
    results = []
    rng = random.Random(seed)
    for name in SYSTEMS:
        system = load_system(name)
        geo = geometrize(system)
        data = arrangement_to_coxeter(geo.arrangement)
        rho = algebraize(geo.base_realization, data)
        tr = tangent_report(rho)
        tx = system.tangent_dimension()
        sigma = group_closure([rho.images[v] for v in data.sigma], 100)
        dense = density_certificate(rho.elements(), cap).kind
        extended_ok = True
        for k in (1, 2):
            free = [random_rotation(rng) for _ in range(k)]
            big, _ = extend_over_free(rho, free)
            if tangent_report(big).dim_Z1 != tr.dim_Z1 + 3 * k:
                extended_ok = False
        trips = 0
        trips_ok = True
        for sample in sample_solutions(name):
            psi = geo.realize(sample)
            base = algebraize(psi, data)
            for _ in range(conjugators):
                g = random_rotation(rng)
                psi2, g2 = invert_algebraization(conjugate_point(base, g), geo.arrangement, data)
                trips += 1
                if psi2 != psi or g2 != g or geo.coordinate_map.read(psi2) != sample:
                    trips_ok = False
        results.append(Check(f"{name}: dim Z1 = dim TxX + 3", tr.dim_Z1 == tx + 3,
                             f"Z1={tr.dim_Z1}, TxX={tx}"))
        results.append(Check(f"{name}: free factors add 3 each", extended_ok))
        results.append(Check(f"{name}: Sigma image has order 24",
                             isinstance(sigma, FiniteGroup) and sigma.order == 24))
        results.append(Check(f"{name}: full image is dense", dense == "Dense", dense))
        results.append(Check(f"{name}: inverse algebraization round trips", trips_ok,
                             f"{trips} conjugated samples"))
    return results


def check_product_decomposition():
    bad = []
    for inst in finite_instances():
        pres = inst.presentation
        for k in (1, 2):
            big, _ = free_product_with_free(pres, k)
            small = scheme_equations(pres, inst.rho.target)
            large = scheme_equations(big, inst.rho.target)
            extra = [t for t in big.generators if t not in pres.generators]
            blocks = []
            for t in extra:
                blocks += [p for p, lab in zip(large.polynomials, large.labels)
                           if lab[0] == "member" and lab[1] == t]
            expected = sorted(map(str, small.polynomials + blocks))
            if sorted(map(str, large.polynomials)) != expected:
                bad.append(f"{inst.name}, k={k}")
            n = 3 if inst.rho.target == "SO3" else 2
            free_vars = {f"{t}_{i}{j}" for t in extra for i in range(1, n + 1)
                         for j in range(1, n + 1)}
            if set(large.variables) != set(small.variables) | free_vars:
                bad.append(f"{inst.name}, k={k}: variables")
    return Check("equations of Gamma * F_k split off k membership blocks", not bad,
                 "; ".join(bad))


def check_coboundaries():
    bad = []
    for inst in finite_instances() + [load_instance("von_dyck"), load_instance("seifert")]:
        rows, ncols = fox_rows(inst.presentation, inst.rho)
        for v in coboundary_vectors(inst.rho):
            if any(apply_rows(rows, ncols, v)):
                bad.append(inst.name)
                break
    return Check("coboundaries lie in Z1", not bad, ", ".join(bad))


def von_dyck_dimensions():
    g = tangent_report(load_instance("von_dyck").rho)
    p = tangent_report(load_instance("seifert").rho)
    return {"von_dyck": g.to_json(), "seifert": p.to_json()}


def run_suite(seed=0, cap=None, conjugators=5):
    checks = [check_finite_vanishing(), check_sign_law(seed), check_deck_groups(),
              check_product_decomposition(), check_coboundaries()]
    checks += check_universality(seed, cap, conjugators)
    fam = enumerate_lifts(algebraize(geometrize(load_system("t2")).base_realization))
    rep = verify_etale_at(fam)
    checks.append(Check("t2 lift family: lifts match base tangent data", rep["match"],
                        f"Z1={rep['lift']['dim_Z1']}, {rep['method']}"))
    return checks
