import random

import pytest

from repscheme.errors import ValidationError
from repscheme.instances import load_instance, load_system
from repscheme.lifting import (LiftFamily, check_deck_action, check_hom_o, enumerate_lifts,
                               extend_over_free, restriction, sign_law,
                               theta_subscheme_check, verify_etale_at)
from repscheme.matrix_groups import (FiniteGroup, SL2Element, SO3Element, adjoint,
                                     group_closure, rotation_pi)
from repscheme.presentations import Word, build_coxeter
from repscheme.rep_scheme import check_representation, tangent_report
from repscheme.universality import (algebraize, arrangement_to_coxeter, geometrize,
                                    random_rotation)


def _family(name):
    return enumerate_lifts(load_instance(name).rho)


def test_klein_family_is_q8():
    fam = _family("klein_so3_faithful")
    assert fam.rank == 2 and len(fam) == 4
    for lift in fam.lifts:
        assert lift.images[fam.z] == -SL2Element.identity()
        grp = group_closure(lift.elements(), 100)
        assert grp.order == 8
        for v in fam.vertices:
            assert adjoint(lift.images[v]) == fam.base.images[v]


def test_i24_lifts_obey_sign_law():
    fam = _family("i24_so3_faithful")
    a, b = fam.vertices
    for lift in fam.lifts:
        assert sign_law(lift.images[a], lift.images[b], 2) == -1


def test_generator_sent_to_identity_rejected():
    rho = load_instance("klein_so3_faithful").rho
    images = dict(rho.images, b=SO3Element.identity())
    bad = check_representation(rho.presentation, images)
    with pytest.raises(ValidationError):
        enumerate_lifts(bad)
    with pytest.raises(ValidationError):
        check_hom_o(load_instance("klein_so3_partial").rho)


def test_sign_vectors_and_indexing():
    fam = _family("rank3_so3")
    assert len(fam) == 8
    for k in range(8):
        assert fam.index_of(fam.sign_vector(k)) == k
    assert fam.sign_vector(0) == (1, 1, 1) and fam.sign_vector(7) == (-1, -1, -1)


@pytest.mark.parametrize("name, r", [("rank1_so3", 1), ("klein_so3_faithful", 2),
                                     ("rank3_so3", 3)])
def test_deck_group_simply_transitive(name, r):
    fam = _family(name)
    assert fam.rank == r and len(fam) == 2 ** r
    assert len({tuple(sorted(l.images.items(), key=lambda kv: kv[0])) for l in fam.lifts}) == 2 ** r
    assert check_deck_action(fam)


def test_klein_deck_table():
    assert _family("klein_so3_faithful").deck_table() == [
        [0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def test_etale_examples():
    rep = verify_etale_at(_family("klein_so3_faithful"))
    assert rep["match"] and rep["lifts_computed"] == 4
    assert (rep["lift"]["dim_Z1"], rep["lift"]["dim_B1"], rep["lift"]["dim_H1"]) == (3, 3, 0)

    rep = verify_etale_at(_family("rank1_so3"))
    assert rep["match"] and rep["lift"]["dim_H1"] == 0

    geo = geometrize(load_system("t2"))
    fam = enumerate_lifts(algebraize(geo.base_realization))
    rep = verify_etale_at(fam)
    assert rep["match"] and rep["lift"]["dim_Z1"] == 4
    # 2^18 lifts: covered by sign invariance of the adjoint Fox blocks
    assert len(fam) == 2 ** 18 and rep["sign_invariant"] and rep["adjoint_matches_base"]


def test_lifts_of_cross_section_contain_octahedral_group():
    geo = geometrize(load_system("t"))
    data = arrangement_to_coxeter(geo.arrangement)
    fam = enumerate_lifts(algebraize(geo.base_realization, data))
    for k in (0, len(fam) - 1):
        lift = fam.lift(k)
        sigma = group_closure([adjoint(lift.images[v]) for v in data.sigma], 100)
        assert isinstance(sigma, FiniteGroup) and sigma.order == 24


def test_large_family_is_lazy():
    fam = LiftFamily(None, None, None, "z", tuple(f"v{k}" for k in range(11)), {})
    assert len(fam) == 2048
    with pytest.raises(ValueError):
        fam.lifts


def test_extend_over_free_examples():
    rho = load_instance("klein_so3_faithful").rho
    point, psi = extend_over_free(rho, [SO3Element.identity()])
    assert point.images["t1"].is_identity()
    assert restriction(point, rho.presentation).images == rho.images
    same, _ = extend_over_free(rho, [])
    assert same.images == rho.images
    g = random_rotation(random.Random(4))
    point, _ = extend_over_free(rho, [g])
    assert tangent_report(point).dim_Z1 == tangent_report(rho).dim_Z1 + 3
    with pytest.raises(ValidationError):
        extend_over_free(rho, [SL2Element.identity()])


def test_theta_seifert():
    seifert = load_instance("seifert")
    vd = load_instance("von_dyck")
    # lift with z -> I: the von Dyck point pulled back along the quotient
    images = dict(vd.rho.images, z=SL2Element.identity())
    rho = check_representation(seifert.presentation, images)
    rep = theta_subscheme_check(seifert.presentation, [Word.gen("z")], rho)
    assert rep["kills_theta"] and rep["passes"]
    assert rep["constrained_matches_quotient"]
    assert rep["quotient"]["dim_Z1"] == tangent_report(vd.rho).dim_Z1


def test_theta_extended_coxeter_fails_membership():
    fam = _family("klein_so3_faithful")
    rep = theta_subscheme_check(fam.extended, [Word.gen(fam.z)], fam.lift(0))
    assert not rep["kills_theta"] and not rep["passes"]
    assert rep["order_witnesses"][0]["source"] == "relator"


def test_theta_empty_is_trivial():
    rho = load_instance("z3_so3_faithful").rho
    rep = theta_subscheme_check(rho.presentation, [], rho)
    assert rep["passes"] and rep["constrained_Z1"] == tangent_report(rho).dim_Z1


def test_theta_order_witness_mismatch():
    rho = load_instance("z3_so3_faithful").rho
    with pytest.raises(ValidationError):
        theta_subscheme_check(rho.presentation, [Word.gen("s")], rho, orders=[3, 2])


def test_sign_law_random_pairs():
    a, b = rotation_pi((1, 2, 2)), rotation_pi((2, 1, -2))  # orthogonal axes, label 2
    pres = build_coxeter(load_instance("klein_so3_faithful").rho.presentation.graph)
    fam = enumerate_lifts(check_representation(pres, {"a": a, "b": b}))
    for lift in fam.lifts:
        assert sign_law(lift.images["a"], lift.images["b"], 1) == -1
