import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsext.errors import InvalidParameterError, SizeGuardError, ValidationError
from tsext.groups import (
    AbelianGroup,
    FiniteGroup,
    UnknownTokenError,
    action_from_generators,
    check_homomorphism,
    compose_matrices,
    cyclic_group,
    direct_product,
    element_order,
    enumerate_automorphisms,
    identity_matrix,
    make_action,
    make_cyclic,
    make_symmetric_group,
    parse_abelian,
    parse_group,
    trivial_action,
)
from oracles import is_associative, power_order


SMALL_GROUPS = [cyclic_group(n) for n in range(1, 9)] + [
    make_symmetric_group(3),
    direct_product(cyclic_group(2), cyclic_group(2)),
    parse_group("C2xC4"),
]


def test_make_cyclic_trivial():
    h = make_cyclic(1)
    assert h.order == 1
    assert h.factors == ()


def test_make_cyclic_six_orders():
    g = cyclic_group(6)
    orders = {r: element_order(g, r) for r in (0, 3, 2, 4, 1, 5)}
    assert orders == {0: 1, 3: 2, 2: 3, 4: 3, 1: 6, 5: 6}


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_make_cyclic_rejects(bad):
    with pytest.raises(InvalidParameterError):
        make_cyclic(bad)


def test_direct_product_examples():
    g = cyclic_group(5)
    t = direct_product(cyclic_group(1), g)
    assert t.cayley == g.cayley
    c6 = direct_product(cyclic_group(2), cyclic_group(3))
    assert c6.order == 6 and c6.is_abelian and 6 in c6.element_orders
    v4 = direct_product(cyclic_group(2), cyclic_group(2))
    assert sorted(v4.element_orders) == [1, 2, 2, 2]


@pytest.mark.parametrize("a,b", [(2, 4), (3, 3), (2, 6), (4, 6)])
def test_direct_product_orders_are_lcms(a, b):
    ga, gb = cyclic_group(a), cyclic_group(b)
    p = direct_product(ga, gb)
    for i in range(a):
        for j in range(b):
            assert p.element_orders[i * b + j] == math.lcm(ga.element_orders[i], gb.element_orders[j])


def test_symmetric_groups():
    assert make_symmetric_group(1).order == 1
    s3 = make_symmetric_group(3)
    assert s3.order == 6 and not s3.is_abelian
    x, y = s3.commutator_witness()
    assert s3.mul(x, y) != s3.mul(y, x)
    assert sorted(s3.element_orders) == [1, 2, 2, 2, 3, 3]
    transposition = s3.labels.index("102")
    assert element_order(s3, transposition) == 2
    with pytest.raises(SizeGuardError):
        make_symmetric_group(6)
    with pytest.raises(InvalidParameterError):
        make_symmetric_group(0)


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=lambda g: g.name)
def test_group_axioms_and_lagrange(g):
    t = g.cayley
    assert is_associative(t)
    for x in range(g.order):
        assert t[0][x] == t[x][0] == x
        assert t[x][g.inv(x)] == 0
        assert sorted(t[x]) == list(range(g.order))
        assert sorted(row[x] for row in t) == list(range(g.order))
        assert g.order % element_order(g, x) == 0
        assert element_order(g, x) == power_order(t, x)
    assert element_order(g, 0) == 1


def test_table_validation():
    with pytest.raises(ValidationError):
        FiniteGroup(((0, 1), (1, 1)))
    with pytest.raises(ValidationError):
        FiniteGroup(((1, 0), (0, 1)))
    # Latin square with identity at 0 that is not associative
    bad = ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
    with pytest.raises(ValidationError):
        FiniteGroup(bad)


@pytest.mark.parametrize("token,count", [("C1", 1), ("C2", 1), ("C5", 4), ("C2xC2", 6), ("C4", 2), ("C2xC4", 8)])
def test_automorphism_counts(token, count):
    h = parse_abelian(token)
    auts = enumerate_automorphisms(h)
    assert len(auts) == count
    keys = {a for a in auts}
    assert identity_matrix(h) in keys
    for a, b in itertools.product(auts, repeat=2):
        assert compose_matrices(h, a, b) in keys
    for a in auts:
        assert any(compose_matrices(h, a, b) == identity_matrix(h) for b in auts)


def test_z5_automorphisms_are_units():
    auts = enumerate_automorphisms(make_cyclic(5))
    assert sorted(a[0][0] for a in auts) == [1, 2, 3, 4]


def test_actions():
    g, h = cyclic_group(2), make_cyclic(3)
    assert trivial_action(g, h).is_trivial
    neg = make_action(g, h, [((1,),), ((2,),)])
    assert neg.apply(1, (1,)) == (2,)
    assert not neg.is_trivial
    with pytest.raises(ValidationError):
        make_action(cyclic_group(3), h, [((1,),), ((2,),), ((2,),)])
    s3 = make_symmetric_group(3)
    sign = action_from_generators(s3, h, {s3.labels.index("102"): [[2]], s3.labels.index("120"): [[1]]})
    for x in range(6):
        for y in range(6):
            assert sign.maps[s3.mul(x, y)] == compose_matrices(h, sign.maps[x], sign.maps[y])


def test_matrix_must_be_well_defined():
    # x -> x on Z2 into Z4 coordinates is not well defined on Z2xZ4
    h = parse_abelian("C2xC4")
    with pytest.raises(ValidationError):
        make_action(cyclic_group(1), h, [((1, 1), (0, 1))])


def test_tokens():
    assert parse_group("C6").order == 6
    assert parse_group("S3").order == 6
    assert parse_group("C2xC3").is_abelian
    assert parse_abelian("C2xC3").factors == (6,)
    assert parse_abelian("C4xC2").factors == (2, 4)
    assert parse_abelian("C1").factors == ()
    with pytest.raises(UnknownTokenError, match="unknown group token Q99"):
        parse_group("Q99")


def test_check_homomorphism():
    c4, c2 = cyclic_group(4), cyclic_group(2)
    assert check_homomorphism(c4, c2, [x % 2 for x in range(4)]) is None
    assert check_homomorphism(c4, c2, [0, 1, 1, 0]) is not None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=3))
def test_abelian_invariant_form(orders):
    h = AbelianGroup.from_orders(orders)
    assert h.order == math.prod(orders)
    assert all(b % a == 0 for a, b in zip(h.factors, h.factors[1:]))
    assert all(f > 1 for f in h.factors)
    # same element-order multiset as the direct product of the inputs
    g = cyclic_group(1)
    for n in orders:
        g = direct_product(g, cyclic_group(n))
    assert sorted(g.element_orders) == sorted(h.as_group().element_orders)
    for i, v in enumerate(h.elements()):
        assert h.index(v) == i and h.element(i) == v
