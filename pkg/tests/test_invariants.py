import random
from fractions import Fraction

import pytest

from tsext.cohomology import coboundary, compute_h2, compute_z2, is_symmetric, random_one_cochain, zero_cochain
from tsext.extensions import build_extension, coboundary_morphism, identity_morphism, semidirect_example_s3
from tsext.groups import cyclic_group, make_action, make_cyclic, parse_abelian, parse_group, trivial_action
from tsext.invariants import (
    density_invariants,
    dim_ts,
    functoriality_check,
    invariant_report,
    stab_centralizer,
    symmetry_locus,
)


def pair(gt, ht):
    g, h = parse_group(gt), parse_abelian(ht)
    return g, h, trivial_action(g, h)


def test_dim_is_zero():
    g, h, a = pair("S3", "C2")
    e = build_extension(g, h, a, zero_cochain(g, h))
    assert dim_ts(e) == 0
    m = identity_morphism(e)
    assert functoriality_check(m)["dim_equal"]


def test_centralizer_examples():
    g, h, a = pair("C4", "C2")
    abel = build_extension(g, h, a, compute_h2(g, h, a).representative((1,)))
    assert len(stab_centralizer(abel)) == abel.order
    s3 = semidirect_example_s3()
    assert len(stab_centralizer(s3)) == 3
    assert density_invariants(s3)[0] == Fraction(1, 2)
    g, h, a = pair("S3", "C2")
    central = build_extension(g, h, a, compute_h2(g, h, a).representative((1,)))
    assert len(stab_centralizer(central)) == central.order


def test_symmetry_locus_examples():
    g, h, a = pair("C6", "C3")
    rng = random.Random(1)
    f = random_one_cochain(g, h, rng)
    assert symmetry_locus(coboundary(f, a))[1] == 36
    g, h, a = pair("S3", "C2")
    c = compute_z2(g, h, a).random_element(rng)
    pairs, _ = symmetry_locus(c)
    assert all((x, x) in pairs and (x, 0) in pairs for x in range(6))


def test_extremal_values():
    g, h, a = pair("C3", "C2")
    triv = build_extension(g, h, a, zero_cochain(g, h))
    assert density_invariants(triv) == (1, 1)
    g, h, a = pair("C2", "C2")
    z4 = build_extension(g, h, a, compute_h2(g, h, a).representative((1,)))
    # nontrivial class, yet central: centralizer density stays 1
    assert density_invariants(z4)[0] == 1


@pytest.mark.parametrize("gt,ht", [("C2", "C2"), ("C4", "C2"), ("S3", "C2"), ("C2xC2", "C2"), ("S3", "C3"), ("C6", "C2")])
def test_density_characterizations(gt, ht):
    g, h, a = pair(gt, ht)
    rng = random.Random(2)
    lattice = compute_z2(g, h, a)
    for _ in range(8):
        c = lattice.random_element(rng)
        e = build_extension(g, h, a, c)
        dc, dp = density_invariants(e)
        assert 0 < dc <= 1 and 0 <= dp <= 1
        assert (dp == 1) == is_symmetric(c)
        inc = e.inclusion_map
        center = {x for x in range(e.order) if all(e.group.mul(x, y) == e.group.mul(y, x) for y in range(e.order))}
        assert (dc == 1) == set(inc).issubset(center)
        stab = set(stab_centralizer(e))
        assert e.group.is_subgroup(stab)
        assert set(inc) <= stab


def test_centralizer_with_action():
    g, h = cyclic_group(2), make_cyclic(4)
    inv = make_action(g, h, [((1,),), ((3,),)])
    e = build_extension(g, h, inv, zero_cochain(g, h))
    # dihedral of order 8: the rotations centralize the rotation subgroup
    assert len(stab_centralizer(e)) == 4
    assert density_invariants(e)[0] == Fraction(1, 2)


def test_report_json_and_functoriality():
    g, h, a = pair("C4", "C2")
    rng = random.Random(3)
    e = build_extension(g, h, a, compute_h2(g, h, a).representative((1,)))
    rep = invariant_report(e).to_json()
    assert rep["delta_centralizer"] == {"num": 1, "den": 1}
    assert rep["dim_ts"] == 0 and rep["max_order"] == 8
    m = coboundary_morphism(e, random_one_cochain(g, h, rng))
    chk = functoriality_check(m)
    assert chk["alpha_surjective"] and chk["stab_maps_into_stab"]
    assert set(chk["source"]) == {"delta_centralizer", "delta_pair"}
