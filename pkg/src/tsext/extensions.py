"""Extension groups built from cocycles, their morphisms, and the groupoid operations.

The carrier of E is H x G indexed lexicographically: the pair (h, g) has
index ``index(h) * |G| + g``, so index 0 is the identity (0, e).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .cohomology import Cochain2, coboundary, require_cocycle, same_class, symmetrize_class, zero_cochain
from .errors import NotInvertibleError, SizeGuardError, ValidationError
from .groups import (
    AbelianGroup,
    FiniteGroup,
    GroupAction,
    check_homomorphism,
    cyclic_group,
    factorize,
    identity_matrix,
    make_action,
    make_cyclic,
)

NONABELIAN = "nonabelian"
ISOMORPHISM_GUARD = 24
EQUIVALENCE_SEARCH_GUARD = 200_000


def twisted_table(action: GroupAction, c: Cochain2) -> list[list[int]]:
    """Raw multiplication table of (h, g)(h', g') = (h + phi(g)h' + c(g, g'), gg'), unvalidated."""
    g, h = action.group, action.coefficients
    n = g.order
    elems = h.elements()
    idx = {v: i for i, v in enumerate(elems)}
    act = action.index_table
    cval = [[idx[c.values[x][y]] for y in range(n)] for x in range(n)]
    add = h.as_group().cayley
    table = []
    for hi in range(len(elems)):
        for gx in range(n):
            row = []
            for hj in range(len(elems)):
                moved = add[hi][act[gx][hj]]
                for gy in range(n):
                    row.append(add[moved][cval[gx][gy]] * n + g.cayley[gx][gy])
            # row is ordered by (hj, gy), matching the carrier indexing
            table.append(row)
    return table


@dataclass(frozen=True)
class ExtensionGroup:
    """E = H x G with the twisted product, plus inclusion, projection and section."""

    group: FiniteGroup
    quotient: FiniteGroup
    kernel: AbelianGroup
    action: GroupAction
    cocycle: Cochain2

    @property
    def order(self) -> int:
        return self.group.order

    def element(self, h, g: int) -> int:
        return self.kernel.index(h) * self.quotient.order + g

    def pair(self, x: int) -> tuple[tuple[int, ...], int]:
        hi, g = divmod(x, self.quotient.order)
        return self.kernel.element(hi), g

    def inclusion(self, hi: int) -> int:
        """Index in E of the H-element with index hi."""
        return hi * self.quotient.order

    def projection(self, x: int) -> int:
        return x % self.quotient.order

    def section(self, g: int) -> int:
        return g

    @cached_property
    def inclusion_map(self) -> tuple[int, ...]:
        return tuple(self.inclusion(i) for i in range(self.kernel.order))

    @cached_property
    def projection_map(self) -> tuple[int, ...]:
        return tuple(self.projection(x) for x in range(self.order))

    @cached_property
    def topo_symmetric(self) -> bool:
        """Whether the class of the defining cocycle contains a symmetric cocycle."""
        return symmetrize_class(self.cocycle, self.action) is not None


def build_extension(g: FiniteGroup, h: AbelianGroup, action: GroupAction, c: Cochain2) -> ExtensionGroup:
    """Construct and fully validate the extension defined by a normalized cocycle."""
    if action.group != g or action.coefficients != h or c.group != g or c.coefficients != h:
        raise ValidationError("cocycle and action do not match (G, H)")
    if not c.normalized:
        raise ValidationError("build_extension needs a normalized cocycle")
    require_cocycle(c, action)
    table = twisted_table(action, c)
    hg = h.as_group()
    labels = tuple(f"({hg.label(hi)};{g.label(x)})" for hi in range(h.order) for x in range(g.order))
    e = FiniteGroup(tuple(map(tuple, table)), labels=labels, name=f"E({h.token},{g.name})")
    return ExtensionGroup(e, g, h, action, c)


def check_exactness(e: ExtensionGroup) -> bool:
    """Inclusion injective homomorphism, projection surjective homomorphism, ker = image."""
    hg = e.kernel.as_group()
    inc, proj = e.inclusion_map, e.projection_map
    if len(set(inc)) != len(inc) or check_homomorphism(hg, e.group, inc) is not None:
        return False
    if set(proj) != set(range(e.quotient.order)) or check_homomorphism(e.group, e.quotient, proj) is not None:
        return False
    return {x for x in range(e.order) if proj[x] == 0} == set(inc)


def max_element_order(e) -> int:
    grp = e.group if isinstance(e, ExtensionGroup) else e
    return max(grp.element_orders)


def max_order_element(e) -> int:
    """Lowest-index element attaining the maximal order."""
    grp = e.group if isinstance(e, ExtensionGroup) else e
    orders = grp.element_orders
    return orders.index(max(orders))


def abelian_invariants(e):
    """Invariant factors of an abelian group from its element-order statistics, else "nonabelian"."""
    grp = e.group if isinstance(e, ExtensionGroup) else e
    if not grp.is_abelian:
        return NONABELIAN
    return invariant_factors_from_orders_multiset(grp.element_orders)


def invariant_factors_from_orders_multiset(orders) -> tuple[int, ...]:
    """Invariant factors of the finite abelian group whose element orders are ``orders``."""
    per_prime = []
    for p, a in factorize(len(orders)).items():
        # |E[p^j]| = p^(sum_i min(j, a_i)); successive differences count parts >= j
        logs = []
        for j in range(a + 1):
            count = sum(1 for o in orders if (p**j) % o == 0)
            logs.append(_ilog(count, p))
        ge = [logs[j] - logs[j - 1] for j in range(1, a + 1)]
        parts = [sum(1 for j in range(a) if ge[j] > i) for i in range(ge[0] if ge else 0)]
        per_prime.append((p, parts))
    width = max((len(parts) for _, parts in per_prime), default=0)
    factors = [1] * width
    for p, parts in per_prime:
        for i, ex in enumerate(parts):
            factors[width - 1 - i] *= p**ex
    return tuple(f for f in factors if f != 1)


def _ilog(n: int, p: int) -> int:
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    if n != 1:
        raise ValueError("count is not a prime power")
    return k


def order_statistics(e) -> dict[int, int]:
    grp = e.group if isinstance(e, ExtensionGroup) else e
    return dict(sorted(Counter(grp.element_orders).items()))


def are_isomorphic(a: FiniteGroup, b: FiniteGroup, guard: int = ISOMORPHISM_GUARD) -> bool:
    """Brute-force isomorphism test by extending generator images (small groups only)."""
    if a.order != b.order:
        return False
    if a.order > guard:
        raise SizeGuardError("|E| for isomorphism search", a.order, guard)
    if sorted(a.element_orders) != sorted(b.element_orders):
        return False
    gens = a.generators()
    cands = [[y for y in range(b.order) if b.element_orders[y] == a.element_orders[x]] for x in gens]
    for images in itertools.product(*cands):
        phi = _extend(a, b, gens, images)
        if phi is not None and len(set(phi.values())) == a.order:
            return True
    return False


def _extend(a, b, gens, images):
    phi = {0: 0}
    queue = [0]
    while queue:
        x = queue.pop()
        for s, t in zip(gens, images):
            y, img = a.cayley[x][s], b.cayley[phi[x]][t]
            if y not in phi:
                phi[y] = img
                queue.append(y)
            elif phi[y] != img:
                return None
    if len(phi) != a.order:
        return None
    for x in range(a.order):
        for y in range(a.order):
            if phi[a.cayley[x][y]] != b.cayley[phi[x]][phi[y]]:
                return None
    return phi


# ---------------------------------------------------------------------------
# Morphisms


@dataclass(frozen=True)
class ExtensionMorphism:
    """A triple of maps on element indices: alpha on H, beta on G, gamma on E."""

    source: ExtensionGroup = field(repr=False)
    target: ExtensionGroup = field(repr=False)
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]


@dataclass
class MorphismCheck:
    ok: bool
    failures: list[str]

    def __bool__(self):
        return self.ok


def check_morphism(m: ExtensionMorphism) -> MorphismCheck:
    """Verify homomorphisms, both commuting squares and action compatibility.

    Diagnostics name the first failing condition with a witness.
    """
    e, f = m.source, m.target
    hg, hg2 = e.kernel.as_group(), f.kernel.as_group()
    fails = []
    for name, src, dst, mp in (
        ("alpha", hg, hg2, m.alpha),
        ("beta", e.quotient, f.quotient, m.beta),
        ("gamma", e.group, f.group, m.gamma),
    ):
        if len(mp) != src.order:
            return MorphismCheck(False, [f"{name} has {len(mp)} entries, expected {src.order}"])
        w = check_homomorphism(src, dst, mp)
        if w is not None:
            fails.append(f"{name} is not a homomorphism at pair {w}")
    if fails:
        return MorphismCheck(False, fails)
    for hi in range(e.kernel.order):
        if m.gamma[e.inclusion(hi)] != f.inclusion(m.alpha[hi]):
            fails.append(f"left square fails at h={hg.label(hi)}")
            break
    for x in range(e.order):
        if f.projection(m.gamma[x]) != m.beta[e.projection(x)]:
            fails.append(f"right square fails at x={e.group.label(x)}")
            break
    act, act2 = e.action.index_table, f.action.index_table
    done = False
    for gx in range(e.quotient.order):
        for hi in range(e.kernel.order):
            if m.alpha[act[gx][hi]] != act2[m.beta[gx]][m.alpha[hi]]:
                fails.append(f"action compatibility fails at g={e.quotient.label(gx)}, h={hg.label(hi)}")
                done = True
                break
        if done:
            break
    return MorphismCheck(not fails, fails)


def identity_morphism(e: ExtensionGroup) -> ExtensionMorphism:
    return ExtensionMorphism(
        e, e, tuple(range(e.kernel.order)), tuple(range(e.quotient.order)), tuple(range(e.order))
    )


def compose_morphisms(m2: ExtensionMorphism, m1: ExtensionMorphism) -> ExtensionMorphism:
    """m2 o m1 (apply m1 first)."""
    if m1.target != m2.source:
        raise ValidationError("morphisms are not composable: target of m1 is not the source of m2")
    return ExtensionMorphism(
        m1.source,
        m2.target,
        tuple(m2.alpha[i] for i in m1.alpha),
        tuple(m2.beta[i] for i in m1.beta),
        tuple(m2.gamma[i] for i in m1.gamma),
    )


def _invert(mp, name):
    if len(set(mp)) != len(mp):
        raise NotInvertibleError(f"{name} is not bijective")
    inv = [0] * len(mp)
    for i, j in enumerate(mp):
        inv[j] = i
    return tuple(inv)


def invert_morphism(m: ExtensionMorphism) -> ExtensionMorphism:
    if not (
        len(m.alpha) == m.target.kernel.order
        and len(m.beta) == m.target.quotient.order
        and len(m.gamma) == m.target.order
    ):
        raise NotInvertibleError("component maps between sets of different size")
    return ExtensionMorphism(
        m.target, m.source, _invert(m.alpha, "alpha"), _invert(m.beta, "beta"), _invert(m.gamma, "gamma")
    )


def coboundary_morphism(e: ExtensionGroup, f) -> ExtensionMorphism:
    """Equivalence gamma(h, g) = (h + f(g), g) from E_c onto E_{c - df}.

    f is a normalized 1-cochain (f(e) = 0), one H-tuple per element of G.
    """
    h = e.kernel
    f = [h.reduce(v) for v in f]
    if any(f[0]):
        raise ValidationError("f must vanish at the identity")
    target_c = e.cocycle - coboundary(f, e.action)
    target = build_extension(e.quotient, h, e.action, target_c)
    gamma = []
    for x in range(e.order):
        hv, gx = e.pair(x)
        gamma.append(target.element(h.add(hv, f[gx]), gx))
    return ExtensionMorphism(e, target, tuple(range(h.order)), tuple(range(e.quotient.order)), tuple(gamma))


def find_equivalence(e1: ExtensionGroup, e2: ExtensionGroup, guard: int = EQUIVALENCE_SEARCH_GUARD):
    """Search for an equivalence with alpha = id, beta = id.

    Any such gamma has the form (h, g) -> (h + u(g), g) with u(e) = 0, so
    the search runs over all normalized u.
    """
    if e1.quotient != e2.quotient or e1.kernel != e2.kernel or e1.action != e2.action:
        raise ValidationError("extensions of different (G, H, action)")
    h, g = e1.kernel, e1.quotient
    n_cand = h.order ** (g.order - 1)
    if n_cand > guard:
        raise SizeGuardError("equivalence search space", n_cand, guard)
    elems = h.elements()
    ida, idb = tuple(range(h.order)), tuple(range(g.order))
    for u in itertools.product(elems, repeat=g.order - 1):
        u = (h.zero,) + u
        gamma = tuple(e2.element(h.add(e1.pair(x)[0], u[e1.projection(x)]), e1.projection(x)) for x in range(e1.order))
        m = ExtensionMorphism(e1, e2, ida, idb, gamma)
        if check_homomorphism(e1.group, e2.group, gamma) is None:
            return m
    return None


def are_equivalent(e1: ExtensionGroup, e2: ExtensionGroup) -> bool:
    if e1.quotient != e2.quotient or e1.kernel != e2.kernel or e1.action != e2.action:
        raise ValidationError("extensions of different (G, H, action)")
    return same_class(e1.cocycle, e2.cocycle, e1.action)


# ---------------------------------------------------------------------------
# Forgetting the symmetry annotation


@dataclass(frozen=True)
class ClassicalExtension:
    group: FiniteGroup
    quotient: FiniteGroup
    kernel: AbelianGroup
    action: GroupAction
    cocycle: Cochain2
    inclusion_map: tuple[int, ...]
    projection_map: tuple[int, ...]


@dataclass(frozen=True)
class ClassicalMorphism:
    source: ClassicalExtension = field(repr=False)
    target: ClassicalExtension = field(repr=False)
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]


def forget_to_classical(e: ExtensionGroup) -> ClassicalExtension:
    return ClassicalExtension(e.group, e.quotient, e.kernel, e.action, e.cocycle, e.inclusion_map, e.projection_map)


def forget_morphism(m: ExtensionMorphism) -> ClassicalMorphism:
    return ClassicalMorphism(forget_to_classical(m.source), forget_to_classical(m.target), m.alpha, m.beta, m.gamma)


def check_classical_morphism(m: ClassicalMorphism) -> bool:
    """Commuting squares and homomorphism conditions only."""
    e, f = m.source, m.target
    if check_homomorphism(e.group, f.group, m.gamma) is not None:
        return False
    if any(m.gamma[e.inclusion_map[i]] != f.inclusion_map[m.alpha[i]] for i in range(len(m.alpha))):
        return False
    return all(f.projection_map[m.gamma[x]] == m.beta[e.projection_map[x]] for x in range(len(m.gamma)))


def semidirect_example_s3() -> ExtensionGroup:
    """S3 as the split extension of Z2 by Z3 with Z2 acting by negation."""
    g, h = cyclic_group(2), make_cyclic(3)
    action = make_action(g, h, [identity_matrix(h), ((2,),)])
    return build_extension(g, h, action, zero_cochain(g, h))

