"""Finite groups as Cayley tables, finite abelian coefficient groups, and actions.

Elements are dense indices ``0..order-1`` and index 0 is always the identity.
Coefficient groups are kept in invariant-factor form; their elements are
residue tuples, enumerated lexicographically (first coordinate major).
"""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import InitVar, dataclass, field
from functools import cached_property, lru_cache, reduce

import numpy as np

from .errors import InvalidParameterError, SizeGuardError, ValidationError

Matrix = tuple[tuple[int, ...], ...]

MAX_SYMMETRIC_DEGREE = 5
AUT_ORDER_GUARD = 64
AUT_CANDIDATE_GUARD = 200_000


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here are tiny)."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def invariant_factors_from_orders(orders) -> tuple[int, ...]:
    """Canonical invariant factors of the product of cyclic groups of the given orders."""
    by_prime: dict[int, list[int]] = {}
    for n in orders:
        if n < 1:
            raise InvalidParameterError(f"cyclic order must be positive, got {n}")
        for p, e in factorize(n).items():
            by_prime.setdefault(p, []).append(e)
    width = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * width
    for p, exps in by_prime.items():
        exps = sorted(exps, reverse=True)
        for i, e in enumerate(exps):
            factors[width - 1 - i] *= p**e
    return tuple(f for f in factors if f != 1)


# ---------------------------------------------------------------------------
# Finite groups


def associativity_witness(table) -> tuple[int, int, int] | None:
    """First triple (a, b, c) in lexicographic order with (ab)c != a(bc), or None."""
    t = np.asarray(table, dtype=np.int64)
    n = t.shape[0]
    if n == 0:
        return None
    left = t[t[:, :, None], np.arange(n)[None, None, :]]  # (ab)c
    right = t[np.arange(n)[:, None, None], t[None, :, :]]  # a(bc)
    bad = np.argwhere(left != right)
    if len(bad) == 0:
        return None
    a, b, c = bad[0]
    return int(a), int(b), int(c)


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table.

    ``cayley[x][y]`` is the index of the product ``x*y``. The identity is
    index 0. Construction validates the table (identity, Latin square,
    associativity) unless ``check=False``.
    """

    cayley: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        n = len(self.cayley)
        if n == 0:
            raise ValidationError("a group needs at least one element")
        t = np.asarray(self.cayley, dtype=np.int64)
        if t.shape != (n, n):
            raise ValidationError(f"Cayley table must be square, got shape {t.shape}")
        if t.min() < 0 or t.max() >= n:
            raise ValidationError("Cayley table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise ValidationError("index 0 must be the identity")
        if check:
            srt = np.sort(t, axis=1)
            if not (np.all(srt == ar) and np.all(np.sort(t, axis=0) == ar[:, None])):
                raise ValidationError("Cayley table is not a Latin square")
            w = associativity_witness(t)
            if w is not None:
                raise ValidationError(f"Cayley table is not associative at {w}")
        inv = np.argmax(t == 0, axis=1)
        object.__setattr__(self, "inverses", tuple(int(i) for i in inv))
        if self.labels is not None and len(self.labels) != n:
            raise ValidationError("labels must have one entry per element")

    @property
    def order(self) -> int:
        return len(self.cayley)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, x: int, y: int) -> int:
        return self.cayley[x][y]

    def inv(self, x: int) -> int:
        return self.inverses[x]

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def is_abelian(self) -> bool:
        t = np.asarray(self.cayley)
        return bool(np.array_equal(t, t.T))

    def commutator_witness(self) -> tuple[int, int] | None:
        for x in range(self.order):
            for y in range(x + 1, self.order):
                if self.cayley[x][y] != self.cayley[y][x]:
                    return x, y
        return None

    @cached_property
    def element_orders(self) -> tuple[int, ...]:
        return tuple(element_order(self, x) for x in range(self.order))

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily by index."""
        gens: list[int] = []
        span = {0}
        for x in range(self.order):
            if x not in span:
                gens.append(x)
                span = set(closure(self, gens))
            if len(span) == self.order:
                break
        return gens

    def is_subgroup(self, subset) -> bool:
        s = set(subset)
        if 0 not in s:
            return False
        return all(self.cayley[a][self.inverses[b]] in s for a in s for b in s)


def closure(g: FiniteGroup, gens) -> list[int]:
    """Sorted elements of the subgroup generated by ``gens``."""
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = g.cayley[x][s]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def element_order(g: FiniteGroup, x: int) -> int:
    """Least k >= 1 with x**k equal to the identity."""
    if not 0 <= x < g.order:
        raise InvalidParameterError(f"element {x} out of range for group of order {g.order}")
    k, y = 1, x
    while y != 0:
        y = g.cayley[y][x]
        k += 1
    return k


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element (i, j) has index i*|b| + j."""
    na, nb = a.order, b.order
    table = tuple(
        tuple(a.cayley[i][k] * nb + b.cayley[j][l] for k in range(na) for l in range(nb))
        for i in range(na)
        for j in range(nb)
    )
    labels = tuple(f"({a.label(i)},{b.label(j)})" for i in range(na) for j in range(nb))
    name = "x".join(x for x in (a.name, b.name) if x)
    return FiniteGroup(table, labels=labels, name=name, check=False)


@lru_cache(maxsize=None)
def make_symmetric_group(n: int) -> FiniteGroup:
    """S_n on {0..n-1}; permutations in lexicographic order, product (p*q)(i) = p(q(i))."""
    if n < 1:
        raise InvalidParameterError(f"symmetric group degree must be >= 1, got {n}")
    if n > MAX_SYMMETRIC_DEGREE:
        raise SizeGuardError("symmetric group degree", n, MAX_SYMMETRIC_DEGREE)
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(tuple(index[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms)
    labels = tuple("".join(map(str, p)) for p in perms)
    return FiniteGroup(table, labels=labels, name=f"S{n}")


# ---------------------------------------------------------------------------
# Abelian coefficient groups


@dataclass(frozen=True)
class AbelianGroup:
    """Finite abelian group Z_{d1} x ... x Z_{dk} with d1 | d2 | ... | dk."""

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        for d in self.factors:
            if d < 2:
                raise InvalidParameterError(f"invariant factors must be >= 2, got {self.factors}")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise InvalidParameterError(f"factors {self.factors} do not form a divisibility chain")

    @classmethod
    def from_orders(cls, orders) -> AbelianGroup:
        return cls(invariant_factors_from_orders(orders))

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[-1] if self.factors else 1

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    @property
    def token(self) -> str:
        return "x".join(f"C{d}" for d in self.factors) or "C1"

    def is_cyclic(self) -> bool:
        return self.rank <= 1

    def reduce(self, v) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(v, self.factors))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def sub(self, a, b) -> tuple[int, ...]:
        return tuple((x - y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(-x % d for x, d in zip(a, self.factors))

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(d) for d in self.factors)))

    def index(self, v) -> int:
        i = 0
        for x, d in zip(v, self.factors):
            i = i * d + x % d
        return i

    def element(self, i: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.factors):
            i, r = divmod(i, d)
            out.append(r)
        return tuple(reversed(out))

    def as_group(self) -> FiniteGroup:
        return _abelian_view(self)


@lru_cache(maxsize=None)
def _abelian_view(h: AbelianGroup) -> FiniteGroup:
    elems = h.elements()
    table = tuple(tuple(h.index(h.add(a, b)) for b in elems) for a in elems)
    if h.rank == 1:
        labels = tuple(str(a[0]) for a in elems)
    else:
        labels = tuple("(" + ",".join(map(str, a)) + ")" for a in elems)
    return FiniteGroup(table, labels=labels, name=h.token, check=False)


def make_cyclic(n: int) -> AbelianGroup:
    if not isinstance(n, int) or n < 1:
        raise InvalidParameterError(f"cyclic order must be a positive integer, got {n!r}")
    return AbelianGroup(() if n == 1 else (n,))


def cyclic_group(n: int) -> FiniteGroup:
    """The FiniteGroup view of Z_n (addition mod n)."""
    g = make_cyclic(n).as_group()
    return g if g.name == f"C{n}" else FiniteGroup(g.cayley, labels=g.labels, name=f"C{n}", check=False)


# ---------------------------------------------------------------------------
# Automorphisms and actions


def identity_matrix(h: AbelianGroup) -> Matrix:
    k = h.rank
    return tuple(tuple(int(i == j) for j in range(k)) for i in range(k))


def apply_matrix(h: AbelianGroup, m: Matrix, v) -> tuple[int, ...]:
    return tuple(sum(a * x for a, x in zip(row, v)) % d for row, d in zip(m, h.factors))


def compose_matrices(h: AbelianGroup, a: Matrix, b: Matrix) -> Matrix:
    """Matrix of the map a o b (apply b first)."""
    k = h.rank
    return tuple(
        tuple(sum(a[i][l] * b[l][j] for l in range(k)) % h.factors[i] for j in range(k))
        for i in range(k)
    )


def reduce_matrix(h: AbelianGroup, m) -> Matrix:
    """Reduce entries of row i mod d_i, checking the map is well defined on H."""
    k = h.rank
    rows = [list(r) for r in m]
    if len(rows) != k or any(len(r) != k for r in rows):
        raise ValidationError(f"expected a {k}x{k} matrix, got {m!r}")
    d = h.factors
    for i in range(k):
        for j in range(k):
            if (rows[i][j] * d[j]) % d[i]:
                raise ValidationError(
                    f"matrix entry ({i},{j}) = {rows[i][j]} is not well defined from Z_{d[j]} to Z_{d[i]}"
                )
    return tuple(tuple(x % d[i] for x in rows[i]) for i in range(k))


def is_bijective_matrix(h: AbelianGroup, m: Matrix) -> bool:
    # injective on a finite group iff the kernel is trivial
    return all(any(apply_matrix(h, m, v)) for v in h.elements()[1:])


def enumerate_automorphisms(h: AbelianGroup, guard: int = AUT_ORDER_GUARD) -> list[Matrix]:
    """All automorphisms of H as reduced matrices, in lexicographic order."""
    if h.order > guard:
        raise SizeGuardError("|H|", h.order, guard)
    d = h.factors
    k = h.rank
    # column j is the image of the j-th generator; entry i must satisfy M_ij * d_j = 0 mod d_i
    entry_choices = [
        [[x for x in range(d[i]) if (x * d[j]) % d[i] == 0] for i in range(k)] for j in range(k)
    ]
    columns = [list(itertools.product(*entry_choices[j])) for j in range(k)]
    n_candidates = math.prod(len(c) for c in columns)
    if n_candidates > AUT_CANDIDATE_GUARD:
        raise SizeGuardError("automorphism candidates", n_candidates, AUT_CANDIDATE_GUARD)
    out = []
    for cols in itertools.product(*columns):
        m = tuple(tuple(cols[j][i] for j in range(k)) for i in range(k))
        if is_bijective_matrix(h, m):
            out.append(m)
    return out


@dataclass(frozen=True)
class GroupAction:
    """A homomorphism G -> Aut(H), one reduced matrix per element of G."""

    group: FiniteGroup
    coefficients: AbelianGroup
    maps: tuple[Matrix, ...]

    @cached_property
    def is_trivial(self) -> bool:
        ident = identity_matrix(self.coefficients)
        return all(m == ident for m in self.maps)

    def apply(self, g: int, v) -> tuple[int, ...]:
        return apply_matrix(self.coefficients, self.maps[g], v)

    @cached_property
    def index_table(self) -> tuple[tuple[int, ...], ...]:
        """``index_table[g][i]`` is the index of g acting on the i-th element of H."""
        h = self.coefficients
        elems = h.elements()
        return tuple(tuple(h.index(apply_matrix(h, m, v)) for v in elems) for m in self.maps)

    def to_json(self):
        return [[list(r) for r in m] for m in self.maps]


def make_action(g: FiniteGroup, h: AbelianGroup, assignment) -> GroupAction:
    """Validate a per-element assignment of matrices as an action of G on H."""
    assignment = list(assignment)
    if len(assignment) != g.order:
        raise ValidationError(f"need {g.order} matrices, got {len(assignment)}")
    maps = []
    for x, m in enumerate(assignment):
        try:
            r = reduce_matrix(h, m)
        except ValidationError as exc:
            raise ValidationError(f"element {g.label(x)}: {exc}") from None
        if not is_bijective_matrix(h, r):
            raise ValidationError(f"matrix for element {g.label(x)} is not invertible on H")
        maps.append(r)
    if maps[0] != identity_matrix(h):
        raise ValidationError("the identity of G must act trivially")
    for x in range(g.order):
        for y in range(g.order):
            if compose_matrices(h, maps[x], maps[y]) != maps[g.cayley[x][y]]:
                raise ValidationError(
                    f"not a homomorphism: map({g.label(x)}*{g.label(y)}) != "
                    f"map({g.label(x)}) o map({g.label(y)}) for pair ({x}, {y})"
                )
    return GroupAction(g, h, tuple(maps))


def trivial_action(g: FiniteGroup, h: AbelianGroup) -> GroupAction:
    ident = identity_matrix(h)
    return GroupAction(g, h, (ident,) * g.order)


def action_from_generators(g: FiniteGroup, h: AbelianGroup, gen_maps: dict) -> GroupAction:
    """Extend matrices given on generating elements to all of G, then validate."""
    gens = {int(k): reduce_matrix(h, v) for k, v in gen_maps.items()}
    if set(closure(g, gens)) != set(range(g.order)):
        raise ValidationError("the given elements do not generate G")
    maps: dict[int, Matrix] = {0: identity_matrix(h)}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for s, ms in gens.items():
            y = g.cayley[x][s]
            my = compose_matrices(h, maps[x], ms)
            if y not in maps:
                maps[y] = my
                queue.append(y)
            elif maps[y] != my:
                raise ValidationError(f"generator images are inconsistent at element {g.label(y)}")
    return make_action(g, h, [maps[x] for x in range(g.order)])


def check_homomorphism(src: FiniteGroup, dst: FiniteGroup, mapping) -> tuple[int, int] | None:
    """First pair (x, y) where mapping fails to be multiplicative, or None."""
    if len(mapping) != src.order:
        raise ValidationError("mapping must have one entry per element of the source")
    for x in range(src.order):
        for y in range(src.order):
            if mapping[src.cayley[x][y]] != dst.cayley[mapping[x]][mapping[y]]:
                return x, y
    return None


# ---------------------------------------------------------------------------
# Group tokens

_CYCLIC = re.compile(r"C(\d+)")
_SYMMETRIC = re.compile(r"S(\d+)")


class UnknownTokenError(InvalidParameterError):
    def __init__(self, token):
        self.token = token
        super().__init__(f"unknown group token {token}")


def parse_group(token: str) -> FiniteGroup:
    """Parse ``C<n>``, ``C<a>xC<b>...`` or ``S<n>`` into a FiniteGroup."""
    m = _SYMMETRIC.fullmatch(token)
    if m:
        return make_symmetric_group(int(m.group(1)))
    orders = _parse_cyclic_product(token)
    groups = [cyclic_group(n) for n in orders]
    if len(groups) == 1:
        return groups[0]
    g = reduce(direct_product, groups)
    return FiniteGroup(g.cayley, labels=g.labels, name=token, check=False)


def parse_abelian(token: str) -> AbelianGroup:
    """Parse a coefficient token; products are converted to invariant factors."""
    return AbelianGroup.from_orders(_parse_cyclic_product(token))


def _parse_cyclic_product(token: str) -> list[int]:
    parts = token.split("x")
    orders = []
    for part in parts:
        m = _CYCLIC.fullmatch(part)
        if not m or int(m.group(1)) < 1:
            raise UnknownTokenError(token)
        orders.append(int(m.group(1)))
    return orders
