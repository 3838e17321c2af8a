"""Second cohomology of a finite group with coefficients in a finite abelian group.

Notation is additive. For an action phi of G on H, a 2-cochain c is a
cocycle when

    phi(a) c(b, x) - c(ab, x) + c(a, bx) - c(a, b) = 0      for all a, b, x,

which is exactly associativity of the twisted product on H x G

    (h, g) * (h', g') = (h + phi(g) h' + c(g, g'), g g').

Coboundaries are df(x, y) = phi(x) f(y) - f(xy) + f(x). The symmetric
subgroup H2_ts is the image in H2 of the symmetric cocycles
(c(x, y) = c(y, x)), i.e. Z2_ts / (B2 & Z2_ts).

Every computation is a linear system over the residues of the cochain
entries; by default cochains are normalized (c(e, .) = c(., e) = 0), which
fixes the section g -> (0, g).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import CocycleError, SizeGuardError, ValidationError
from .groups import AbelianGroup, FiniteGroup, GroupAction, check_homomorphism
from .zmod import Subquotient, kernel_mod, solve_mod, subquotient

DEFAULT_GROUP_GUARD = 24

Values = tuple[tuple[tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class Cochain2:
    """An H-valued function on G x G, stored as a full |G| x |G| table of tuples."""

    group: FiniteGroup
    coefficients: AbelianGroup
    values: Values

    def __post_init__(self):
        n, k = self.group.order, self.coefficients.rank
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValidationError(f"cochain table must be {n}x{n}")
        vals = tuple(tuple(self.coefficients.reduce(v) for v in row) for row in self.values)
        if any(len(v) != k for row in vals for v in row):
            raise ValidationError(f"cochain values must have {k} components")
        object.__setattr__(self, "values", vals)

    def __call__(self, x: int, y: int) -> tuple[int, ...]:
        return self.values[x][y]

    @property
    def normalized(self) -> bool:
        z = self.coefficients.zero
        return all(self.values[0][g] == z and self.values[g][0] == z for g in range(self.group.order))

    def __add__(self, other: Cochain2) -> Cochain2:
        _same_carriers(self, other)
        h = self.coefficients
        return Cochain2(
            self.group, h, tuple(tuple(h.add(a, b) for a, b in zip(r, s)) for r, s in zip(self.values, other.values))
        )

    def __sub__(self, other: Cochain2) -> Cochain2:
        return self + other.scale(-1)

    def scale(self, k: int) -> Cochain2:
        h = self.coefficients
        return Cochain2(self.group, h, tuple(tuple(h.reduce([k * x for x in v]) for v in row) for row in self.values))

    def to_json(self):
        return {
            "group": self.group.name,
            "coeffs": list(self.coefficients.factors),
            "values": [[list(v) for v in row] for row in self.values],
        }

    @classmethod
    def from_json(cls, data, group: FiniteGroup, coefficients: AbelianGroup) -> Cochain2:
        if list(data["coeffs"]) != list(coefficients.factors):
            raise ValidationError("coefficient factors do not match")
        return cls(group, coefficients, tuple(tuple(tuple(v) for v in row) for row in data["values"]))


def _same_carriers(a, b):
    if a.group != b.group or a.coefficients != b.coefficients:
        raise ValidationError("cochains live on different (G, H)")


def _check_action(c: Cochain2, action: GroupAction):
    if c.group != action.group or c.coefficients != action.coefficients:
        raise ValidationError("cochain and action have mismatched carriers")


def zero_cochain(g: FiniteGroup, h: AbelianGroup) -> Cochain2:
    z = h.zero
    return Cochain2(g, h, tuple(tuple(z for _ in range(g.order)) for _ in range(g.order)))


def random_cochain(g: FiniteGroup, h: AbelianGroup, rng: random.Random, normalized: bool = True) -> Cochain2:
    def entry(x, y):
        if normalized and (x == 0 or y == 0):
            return h.zero
        return tuple(rng.randrange(d) for d in h.factors)

    return Cochain2(g, h, tuple(tuple(entry(x, y) for y in range(g.order)) for x in range(g.order)))


def random_one_cochain(g: FiniteGroup, h: AbelianGroup, rng: random.Random, normalized: bool = True):
    return tuple(
        h.zero if normalized and x == 0 else tuple(rng.randrange(d) for d in h.factors) for x in range(g.order)
    )


def coboundary(f, action: GroupAction) -> Cochain2:
    """df(x, y) = phi(x) f(y) - f(xy) + f(x) for a 1-cochain f (one H-tuple per element)."""
    g, h = action.group, action.coefficients
    f = [h.reduce(v) for v in f]
    if len(f) != g.order:
        raise ValidationError("1-cochain needs one value per element of G")
    vals = tuple(
        tuple(h.add(h.sub(action.apply(x, f[y]), f[g.cayley[x][y]]), f[x]) for y in range(g.order))
        for x in range(g.order)
    )
    return Cochain2(g, h, vals)


def cocycle_violations(c: Cochain2, action: GroupAction):
    """Yield every triple (a, b, x) at which the cocycle identity fails."""
    _check_action(c, action)
    g, h = c.group, c.coefficients
    t, v = g.cayley, c.values
    for a in range(g.order):
        for b in range(g.order):
            ab = t[a][b]
            for x in range(g.order):
                left = h.add(v[a][b], v[ab][x])
                right = h.add(action.apply(a, v[b][x]), v[a][t[b][x]])
                if left != right:
                    yield (a, b, x)


def cocycle_residual(c: Cochain2, action: GroupAction) -> int:
    """Number of triples violating the cocycle identity; 0 iff c is a cocycle."""
    return sum(1 for _ in cocycle_violations(c, action))


def is_cocycle(c: Cochain2, action: GroupAction) -> bool:
    return next(cocycle_violations(c, action), None) is None


def require_cocycle(c: Cochain2, action: GroupAction):
    w = next(cocycle_violations(c, action), None)
    if w is not None:
        raise CocycleError(w)


def is_symmetric(c: Cochain2) -> bool:
    v = c.values
    n = c.group.order
    return all(v[x][y] == v[y][x] for x in range(n) for y in range(x + 1, n))


def normalize_cocycle(c: Cochain2, action: GroupAction) -> Cochain2:
    """Cohomologous normalized cocycle: subtract the coboundary of the constant c(e, e)."""
    require_cocycle(c, action)
    a = c.values[0][0]
    return c - coboundary([a] * c.group.order, action)


# ---------------------------------------------------------------------------
# Linear systems on cochain coordinates


class CochainSpace:
    """Coordinates of (normalized or full) 2-cochains and 1-cochains as residue vectors."""

    def __init__(self, action: GroupAction, normalized: bool = True):
        self.action = action
        self.group = g = action.group
        self.coefficients = h = action.coefficients
        self.normalized = normalized
        self.k = k = h.rank
        lo = 1 if normalized else 0
        self.points = list(range(lo, g.order))
        self.pairs = [(x, y) for x in self.points for y in self.points]
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        self.n = len(self.pairs) * k
        self.moduli = list(h.factors) * len(self.pairs)
        self.n1 = len(self.points) * k
        self.moduli1 = list(h.factors) * len(self.points)
        self.point_index = {x: i for i, x in enumerate(self.points)}

    def var(self, x, y, i) -> int | None:
        j = self.pair_index.get((x, y))
        return None if j is None else j * self.k + i

    def var1(self, x, i) -> int | None:
        j = self.point_index.get(x)
        return None if j is None else j * self.k + i

    def to_vector(self, c: Cochain2) -> list[int]:
        if c.group != self.group or c.coefficients != self.coefficients:
            raise ValidationError("cochain does not live on this (G, H)")
        if self.normalized and not c.normalized:
            raise ValidationError("expected a normalized cochain")
        out = []
        for x, y in self.pairs:
            out.extend(c.values[x][y])
        return out

    def from_vector(self, vec) -> Cochain2:
        h = self.coefficients
        z = h.zero
        table = [[z] * self.group.order for _ in range(self.group.order)]
        for j, (x, y) in enumerate(self.pairs):
            table[x][y] = h.reduce(vec[j * self.k:(j + 1) * self.k])
        return Cochain2(self.group, h, tuple(tuple(r) for r in table))

    def one_cochain(self, vec):
        h = self.coefficients
        f = [h.zero] * self.group.order
        for j, x in enumerate(self.points):
            f[x] = h.reduce(vec[j * self.k:(j + 1) * self.k])
        return f

    def cocycle_rows(self):
        g, action, k = self.group, self.action, self.k
        t = g.cayley
        rows, mods = [], []
        pts = self.points
        for a in pts:
            m = action.maps[a]
            for b in pts:
                ab = t[a][b]
                for x in pts:
                    bx = t[b][x]
                    for i in range(k):
                        row = [0] * self.n
                        for j in range(k):
                            v = self.var(b, x, j)
                            if v is not None and m[i][j]:
                                row[v] += m[i][j]
                        for sign, (p, q) in ((-1, (ab, x)), (1, (a, bx)), (-1, (a, b))):
                            v = self.var(p, q, i)
                            if v is not None:
                                row[v] += sign
                        if any(row):
                            rows.append(row)
                            mods.append(self.coefficients.factors[i])
        return rows, mods

    def symmetry_rows(self):
        rows, mods = [], []
        for x, y in self.pairs:
            if x < y:
                for i in range(self.k):
                    row = [0] * self.n
                    row[self.var(x, y, i)] += 1
                    row[self.var(y, x, i)] -= 1
                    rows.append(row)
                    mods.append(self.coefficients.factors[i])
        return rows, mods

    def coboundary_matrix(self):
        """Rows: 2-cochain coordinates; columns: 1-cochain coordinates (the map f -> df)."""
        g, action, k = self.group, self.action, self.k
        cols = []
        for x in self.points:
            for j in range(k):
                e = [0] * k
                e[j] = 1
                f = [self.coefficients.zero] * g.order
                f[x] = tuple(e)
                cols.append(self.to_vector(coboundary(f, action)))
        return [[col[r] for col in cols] for r in range(self.n)]

    def coboundary_generators(self):
        m = self.coboundary_matrix()
        return [[m[r][c] for r in range(self.n)] for c in range(self.n1)]

    def diagonal(self):
        return [[s if i == j else 0 for i in range(self.n)] for j, s in enumerate(self.moduli)]


@lru_cache(maxsize=256)
def _space(action: GroupAction, normalized: bool) -> CochainSpace:
    return CochainSpace(action, normalized)


def _guard(g: FiniteGroup, guard: int):
    if g.order > guard:
        raise SizeGuardError("|G|", g.order, guard)


@dataclass(frozen=True)
class CocycleLattice:
    """A subgroup of cochains (Z2, Z2_ts, B2) given by generators."""

    action: GroupAction
    generators: tuple[Cochain2, ...]
    normalized: bool = True

    @cached_property
    def structure(self) -> tuple[int, ...]:
        sp = _space(self.action, self.normalized)
        sq = subquotient([sp.to_vector(c) for c in self.generators] + sp.diagonal(), sp.diagonal(), sp.n)
        return sq.factors

    @property
    def order(self) -> int:
        return math.prod(self.structure)

    def random_element(self, rng: random.Random) -> Cochain2:
        h = self.action.coefficients
        c = zero_cochain(self.action.group, h)
        for gen in self.generators:
            c = c + gen.scale(rng.randrange(h.exponent))
        return c


@lru_cache(maxsize=256)
def compute_z2(g: FiniteGroup, h: AbelianGroup, action: GroupAction, normalized: bool = True,
               guard: int = DEFAULT_GROUP_GUARD, symmetric: bool = False) -> CocycleLattice:
    """Generators of the (symmetric, if asked) normalized 2-cocycles."""
    _check_carriers(g, h, action)
    _guard(g, guard)
    sp = _space(action, normalized)
    rows, mods = sp.cocycle_rows()
    if symmetric:
        r2, m2 = sp.symmetry_rows()
        rows, mods = rows + r2, mods + m2
    gens = kernel_mod(rows, mods, sp.moduli)
    return CocycleLattice(action, tuple(sp.from_vector(v) for v in gens), normalized)


@lru_cache(maxsize=256)
def compute_b2(g: FiniteGroup, h: AbelianGroup, action: GroupAction, normalized: bool = True,
               guard: int = DEFAULT_GROUP_GUARD) -> CocycleLattice:
    _check_carriers(g, h, action)
    _guard(g, guard)
    sp = _space(action, normalized)
    gens = [sp.from_vector(v) for v in sp.coboundary_generators() if any(x % s for x, s in zip(v, sp.moduli))]
    return CocycleLattice(action, tuple(gens), normalized)


def _check_carriers(g, h, action):
    if action.group != g or action.coefficients != h:
        raise ValidationError("action does not match (G, H)")


@dataclass(frozen=True)
class CohomologyGroup:
    """H2(G, H) or its symmetric subgroup, with representatives and exact class coordinates.

    ``class_of(c)`` returns coordinates in prod Z_{factors}; the i-th
    generator has the i-th unit vector and coboundaries map to zero.
    For the symmetric subgroup, ``embedding[i]`` holds the H2 coordinates of
    the i-th generator and all generators are symmetric cocycles.
    """

    action: GroupAction
    factors: tuple[int, ...]
    generators: tuple[Cochain2, ...]
    normalized: bool
    symmetric: bool
    num_unknowns: int
    embedding: tuple[tuple[int, ...], ...] | None = None
    _quotient: Subquotient = field(default=None, compare=False, repr=False)

    @property
    def group(self) -> FiniteGroup:
        return self.action.group

    @property
    def coefficients(self) -> AbelianGroup:
        return self.action.coefficients

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def class_of(self, c: Cochain2) -> tuple[int, ...]:
        """Coordinates of the class of c; raises ValueError if c is not in this group."""
        sp = _space(self.action, self.normalized)
        return self._quotient.coordinates(sp.to_vector(c))

    def contains(self, c: Cochain2) -> bool:
        try:
            self.class_of(c)
        except ValueError:
            return False
        return True

    def classes(self):
        """All coordinate vectors, in lexicographic order."""
        return itertools.product(*(range(f) for f in self.factors))

    def representative(self, coords) -> Cochain2:
        c = zero_cochain(self.group, self.coefficients)
        for k, gen in zip(coords, self.generators):
            if k:
                c = c + gen.scale(k)
        return c

    def to_json(self):
        out = {
            "factors": list(self.factors),
            "order": self.order,
            "generators": [gen.to_json() for gen in self.generators],
        }
        if self.embedding is not None:
            out["embedding"] = [list(e) for e in self.embedding]
        return out


@lru_cache(maxsize=256)
def compute_h2(g: FiniteGroup, h: AbelianGroup, action: GroupAction, normalized: bool = True,
               guard: int = DEFAULT_GROUP_GUARD) -> CohomologyGroup:
    """H2 = Z2 / B2 with invariant factors, representatives and exact class coordinates."""
    z2 = compute_z2(g, h, action, normalized, guard)
    b2 = compute_b2(g, h, action, normalized, guard)
    sp = _space(action, normalized)
    diag = sp.diagonal()
    sq = subquotient(
        [sp.to_vector(c) for c in z2.generators] + diag,
        [sp.to_vector(c) for c in b2.generators] + diag,
        sp.n,
    )
    gens = tuple(sp.from_vector(v) for v in sq.generators)
    return CohomologyGroup(action, sq.factors, gens, normalized, False, len(sp.pairs), None, sq)


@lru_cache(maxsize=256)
def compute_h2_ts(g: FiniteGroup, h: AbelianGroup, action: GroupAction, normalized: bool = True,
                  guard: int = DEFAULT_GROUP_GUARD) -> CohomologyGroup:
    """The subgroup of H2 of classes containing a symmetric cocycle."""
    full = compute_h2(g, h, action, normalized, guard)
    zts = compute_z2(g, h, action, normalized, guard, symmetric=True)
    b2 = compute_b2(g, h, action, normalized, guard)
    sp = _space(action, normalized)
    diag = sp.diagonal()
    bvec = [sp.to_vector(c) for c in b2.generators]
    sq = subquotient([sp.to_vector(c) for c in zts.generators] + bvec + diag, bvec + diag, sp.n)
    gens = []
    for v in sq.generators:
        rep = sp.from_vector(v)
        sym = symmetrize_class(rep, action)
        if sym is None:
            raise AssertionError("symmetric subgroup generator has no symmetric representative")
        gens.append(sym)
    embedding = tuple(full.class_of(c) for c in gens)
    return CohomologyGroup(action, sq.factors, tuple(gens), normalized, True, full.num_unknowns, embedding, sq)


# ---------------------------------------------------------------------------
# Class-level operations solved directly as linear systems


def _coboundary_system(action: GroupAction, normalized: bool):
    """Matrix of f -> df on all |G|^2 pairs, with f ranging over normalized or all 1-cochains."""
    g, h = action.group, action.coefficients
    full = _space(action, False)
    pts = range(1, g.order) if normalized else range(g.order)
    k = h.rank
    cols = []
    for x in pts:
        for j in range(k):
            f = [h.zero] * g.order
            e = [0] * k
            e[j] = 1
            f[x] = tuple(e)
            cols.append(full.to_vector(coboundary(f, action)))
    rows = [[col[r] for col in cols] for r in range(full.n)]
    return rows, list(full.moduli), list(h.factors) * len(pts), list(pts)


def coboundary_solution(d: Cochain2, action: GroupAction, normalized: bool = False):
    """A 1-cochain f with df = d, or None when d is not a coboundary."""
    _check_action(d, action)
    g, h = action.group, action.coefficients
    rows, tmods, smods, pts = _coboundary_system(action, normalized)
    rhs = _space(action, False).to_vector(d)
    sol = solve_mod(rows, rhs, tmods, smods)
    if sol is None:
        return None
    f = [h.zero] * g.order
    k = h.rank
    for j, x in enumerate(pts):
        f[x] = tuple(sol[j * k:(j + 1) * k])
    return f


def same_class(c1: Cochain2, c2: Cochain2, action: GroupAction) -> bool:
    """True iff c1 - c2 is a coboundary."""
    _same_carriers(c1, c2)
    require_cocycle(c1, action)
    require_cocycle(c2, action)
    return coboundary_solution(c1 - c2, action) is not None


def symmetrize_class(c: Cochain2, action: GroupAction) -> Cochain2 | None:
    """A symmetric cocycle c + df in the class of c, or None if the class has none.

    f is normalized when c is, so the result stays normalized.
    """
    require_cocycle(c, action)
    g, h = action.group, action.coefficients
    if is_symmetric(c):
        return c
    normalized = c.normalized
    brows, _, smods, pts = _coboundary_system(action, normalized)
    full = _space(action, False)
    k = h.rank
    rows, mods, rhs = [], [], []
    for x in range(g.order):
        for y in range(x + 1, g.order):
            for i in range(k):
                rx, ry = brows[full.var(x, y, i)], brows[full.var(y, x, i)]
                rows.append([a - b for a, b in zip(rx, ry)])
                mods.append(h.factors[i])
                rhs.append(-(c.values[x][y][i] - c.values[y][x][i]))
    sol = solve_mod(rows, rhs, mods, smods)
    if sol is None:
        return None
    f = [h.zero] * g.order
    for j, x in enumerate(pts):
        f[x] = tuple(sol[j * k:(j + 1) * k])
    out = c + coboundary(f, action)
    if not is_symmetric(out):
        raise AssertionError("symmetrization solver returned a non-symmetric cocycle")
    return out


def inflation(c: Cochain2, g: FiniteGroup, q) -> Cochain2:
    """Pull a cochain on a quotient Q back to G along the surjection q: G -> Q."""
    quotient = c.group
    w = check_homomorphism(g, quotient, q)
    if w is not None:
        raise ValidationError(f"quotient map is not a homomorphism at pair {w}")
    if set(q) != set(range(quotient.order)):
        raise ValidationError("quotient map is not surjective")
    vals = tuple(tuple(c.values[q[x]][q[y]] for y in range(g.order)) for x in range(g.order))
    return Cochain2(g, c.coefficients, vals)


def inflate_action(action: GroupAction, g: FiniteGroup, q) -> GroupAction:
    """The action of G through the quotient map q."""
    return GroupAction(g, action.coefficients, tuple(action.maps[q[x]] for x in range(g.order)))
