import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsext.zmod import (
    NotInLatticeError,
    cokernel_invariants,
    determinant,
    identity,
    kernel_mod,
    matmul,
    smith_normal_form,
    solve_mod,
    subquotient,
)


def check_snf(m, res):
    rows = len(m)
    cols = len(m[0])
    assert matmul(matmul(res.u, m), res.v) == res.d
    assert abs(determinant(res.u)) == 1 and abs(determinant(res.v)) == 1
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert res.d[i][j] == 0
    diag = res.diagonal
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert diag[: len(nz)] == nz, "zeros must trail"
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert res.rank == len(nz)


def test_snf_examples():
    assert smith_normal_form(identity(3)).d == identity(3)
    z = [[0, 0], [0, 0], [0, 0]]
    assert smith_normal_form(z).d == z
    r = smith_normal_form([[2, 0], [0, 3]])
    assert r.d == [[1, 0], [0, 6]]
    check_snf([[2, 0], [0, 3]], r)


matrices = st.integers(1, 8).flatmap(
    lambda r: st.integers(1, 8).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_snf_random(m):
    check_snf(m, smith_normal_form(m))


def test_snf_is_deterministic():
    m = [[4, 6, 2], [6, 9, 3], [2, 3, 1]]
    a, b = smith_normal_form(m), smith_normal_form(m)
    assert (a.d, a.u, a.v) == (b.d, b.u, b.v)


def test_snf_big_entries():
    m = [[10**30 + 1, 7], [3 * 10**30, 21]]
    res = smith_normal_form(m, track_u_inv=True)
    check_snf(m, res)
    assert matmul(res.u, res.u_inv) == identity(2)


def test_kernel_examples():
    assert sorted(map(tuple, kernel_mod([[2]], [4], [4]))) == [(2,)]
    full = kernel_mod([[0, 0]], [3], [3, 3])
    assert span_mod(full, [3, 3]) == set(itertools.product(range(3), repeat=2))
    assert span_mod(kernel_mod([], [], [2, 4]), [2, 4]) == set(itertools.product(range(2), range(4)))


def test_cokernel_examples():
    f, proj = cokernel_invariants([[2]], [4])
    assert f == (2,)
    assert proj([1]) == (1,) and proj([2]) == (0,)
    assert cokernel_invariants([], [2, 4])[0] == (2, 4)
    assert cokernel_invariants([[1, 0], [0, 1]], [2, 4])[0] == ()


def span_mod(gens, moduli):
    """All Z-combinations of gens reduced mod moduli, by closure."""
    zero = tuple(0 for _ in moduli)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % s for a, b, s in zip(v, g, moduli))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


@st.composite
def modular_systems(draw):
    n = draw(st.integers(1, 4))
    source = draw(st.lists(st.integers(1, 8), min_size=n, max_size=n))
    if math.prod(source) > 4096:
        source = source[:2]
        n = len(source)
    rows = draw(st.integers(0, 4))
    targets = draw(st.lists(st.integers(1, 8), min_size=rows, max_size=rows))
    m = []
    for t in targets:
        # a_ij * s_j must vanish mod t so the row is well defined on the source
        m.append([draw(st.integers(-3, 3)) * (t // math.gcd(t, s)) for s in source])
    return m, targets, source


@settings(max_examples=150, deadline=None)
@given(modular_systems())
def test_kernel_mod_against_enumeration(system):
    m, targets, source = system
    expected = {
        x for x in itertools.product(*(range(s) for s in source))
        if all(sum(a * v for a, v in zip(row, x)) % t == 0 for row, t in zip(m, targets))
    }
    gens = kernel_mod(m, targets, source)
    assert span_mod(gens, source) == expected


@settings(max_examples=100, deadline=None)
@given(modular_systems(), st.data())
def test_solve_mod_against_enumeration(system, data):
    m, targets, source = system
    rhs = [data.draw(st.integers(0, t - 1)) for t in targets]
    sol = solve_mod(m, rhs, targets, source)
    solvable = any(
        all((sum(a * v for a, v in zip(row, x)) - b) % t == 0 for row, b, t in zip(m, rhs, targets))
        for x in itertools.product(*(range(s) for s in source))
    )
    assert (sol is not None) == solvable
    if sol is not None:
        assert all((sum(a * v for a, v in zip(row, sol)) - b) % t == 0 for row, b, t in zip(m, rhs, targets))


def _orders_of(factors):
    out = Counter()
    for x in itertools.product(*(range(f) for f in factors)):
        out[math.lcm(*[f // math.gcd(f, v) for v, f in zip(x, factors)]) if factors else 1] += 1
    return out


@settings(max_examples=120, deadline=None)
@given(
    st.lists(st.integers(1, 9), min_size=1, max_size=3).flatmap(
        lambda a: st.tuples(st.just(a), st.lists(st.lists(st.integers(0, 8), min_size=len(a), max_size=len(a)), max_size=3))
    )
)
def test_cokernel_against_cosets(case):
    ambient, gens = case
    factors, proj = cokernel_invariants(gens, ambient)
    sub = span_mod([[v % a for v, a in zip(g, ambient)] for g in gens], ambient)
    everything = list(itertools.product(*(range(a) for a in ambient)))
    # coset enumeration: element orders of the quotient
    cosets = {}
    for x in everything:
        key = min(tuple((a + b) % s for a, b, s in zip(x, y, ambient)) for y in sub)
        cosets[key] = x
    assert math.prod(factors) == len(cosets)
    orders = Counter()
    for x in cosets.values():
        k, y = 1, x
        while tuple(y) not in sub:
            y = tuple((a + b) % s for a, b, s in zip(y, x, ambient))
            k += 1
        orders[k] += 1
    assert orders == _orders_of(factors)
    # projection is a homomorphism with kernel exactly the subgroup
    for x in everything:
        assert (not any(proj(list(x)))) == (x in sub)


def test_subquotient_coordinates():
    sq = subquotient([[2, 0], [0, 3]], [[4, 0], [0, 9]], 2)
    assert sorted(sq.factors) == [2, 3] or sq.factors == (6,)
    assert sq.order == 6
    with pytest.raises(NotInLatticeError):
        sq.coordinates([1, 0])
    assert not any(sq.coordinates([4, 9]))
    free = subquotient([[1]], [], 1)
    assert free.factors == (0,)
    with pytest.raises(ValueError):
        free.order
