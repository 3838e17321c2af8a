"""Finite towers Z_p -> Z_{p^2} -> ... standing in for the pro-p completion of Z.

Inflation along the reductions Z_{p^j} -> Z_{p^i} (i <= j) carries classes
from coarse to fine levels, so the induced maps on cohomology form a direct
system indexed upward. The report records that direction instead of
pretending the maps point the other way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cohomology import compute_b2, compute_h2, compute_h2_ts, inflate_action, inflation, is_cocycle, is_symmetric
from .errors import InvalidParameterError, SizeGuardError
from .groups import AbelianGroup, FiniteGroup, cyclic_group, is_prime, trivial_action

TOWER_GUARD = 64
COHOMOLOGY_LEVEL_GUARD = 16

SYSTEM_NOTE = (
    "inflation maps point from level i to level j > i (a direct system); "
    "a stabilized value is reported as the limit only when the last map is an isomorphism"
)


@dataclass(frozen=True)
class Tower:
    prime: int
    levels: tuple[FiniteGroup, ...]

    @property
    def k_max(self) -> int:
        return len(self.levels)

    @property
    def quotient_maps(self) -> dict:
        return {(j, i): self.quotient_map(j, i) for j in range(1, self.k_max + 1) for i in range(1, j + 1)}

    def quotient_map(self, j: int, i: int) -> tuple[int, ...]:
        """Reduction Z_{p^j} -> Z_{p^i} for levels 1 <= i <= j (as element indices)."""
        if not 1 <= i <= j <= self.k_max:
            raise InvalidParameterError(f"no quotient map from level {j} to level {i}")
        return tuple(x % self.prime**i for x in range(self.prime**j))


def build_cyclic_tower(p: int, k_max: int, guard: int = TOWER_GUARD) -> Tower:
    if not is_prime(p):
        raise InvalidParameterError(f"{p} is not prime")
    if k_max < 1:
        raise InvalidParameterError(f"k_max must be >= 1, got {k_max}")
    if p**k_max > guard:
        raise SizeGuardError("p^k_max", p**k_max, guard)
    return Tower(p, tuple(cyclic_group(p**k) for k in range(1, k_max + 1)))


def check_tower_coherence(t: Tower) -> bool:
    for i, j, k in itertools.combinations_with_replacement(range(1, t.k_max + 1), 3):
        qij, qjk, qik = t.quotient_map(j, i), t.quotient_map(k, j), t.quotient_map(k, i)
        if any(qik[x] != qij[qjk[x]] for x in range(len(qik))):
            return False
    return True


@dataclass(frozen=True)
class TowerReport:
    prime: int
    coefficients: AbelianGroup
    level_factors: tuple[tuple[int, ...], ...]
    induced_maps: dict  # (i, j) -> matrix with one column per generator at level i
    cocycles_preserved: bool
    coboundaries_vanish: bool
    coherent: bool
    stabilized: bool

    @property
    def limit(self):
        return list(self.level_factors[-1]) if self.stabilized else "inconclusive at k_max"

    def to_json(self):
        return {
            "prime": self.prime,
            "coefficients": list(self.coefficients.factors),
            "levels": [self.prime ** (k + 1) for k in range(len(self.level_factors))],
            "level_factors": [list(f) for f in self.level_factors],
            "induced_maps": [
                {"from_level": i, "to_level": j, "matrix": [list(r) for r in m]}
                for (i, j), m in sorted(self.induced_maps.items())
            ],
            "cocycles_preserved": self.cocycles_preserved,
            "coboundaries_vanish": self.coboundaries_vanish,
            "coherent": self.coherent,
            "stabilized": self.stabilized,
            "limit": self.limit,
            "system": SYSTEM_NOTE,
        }


def _matrix_from_columns(cols, nrows):
    return tuple(tuple(col[r] for col in cols) for r in range(nrows))


def tower_cohomology_system(t: Tower, h: AbelianGroup, level_guard: int = COHOMOLOGY_LEVEL_GUARD) -> TowerReport:
    """H2_ts at each level with trivial action, and the maps induced by inflation."""
    top = t.prime**t.k_max
    if top > level_guard:
        raise SizeGuardError("p^k_max for tower cohomology", top, level_guard)
    actions = [trivial_action(g, h) for g in t.levels]
    ts = [compute_h2_ts(g, h, a) for g, a in zip(t.levels, actions)]
    full = [compute_h2(g, h, a) for g, a in zip(t.levels, actions)]
    maps = {}
    preserved = True
    vanish = True
    for i, j in itertools.combinations(range(1, t.k_max + 1), 2):
        q = t.quotient_map(j, i)
        g_fine = t.levels[j - 1]
        cols = []
        for gen in ts[i - 1].generators:
            inf = inflation(gen, g_fine, q)
            act = inflate_action(actions[i - 1], g_fine, q)
            preserved &= is_cocycle(inf, act) and is_symmetric(inf)
            cols.append(ts[j - 1].class_of(inf))
        maps[(i, j)] = _matrix_from_columns(cols, len(ts[j - 1].factors))
        for b in compute_b2(t.levels[i - 1], h, actions[i - 1]).generators:
            if any(full[j - 1].class_of(inflation(b, g_fine, q))):
                vanish = False
    coherent = check_tower_coherence(t)
    for i, j, k in itertools.combinations(range(1, t.k_max + 1), 3):
        if _compose(maps[(j, k)], maps[(i, j)], ts[k - 1].factors, len(ts[i - 1].factors)) != maps[(i, k)]:
            coherent = False
    factors = tuple(x.factors for x in ts)
    if t.k_max == 1:
        stabilized = True
    else:
        last = maps[(t.k_max - 1, t.k_max)]
        stabilized = factors[-1] == factors[-2] and _is_isomorphism(last, factors[-2], factors[-1])
    return TowerReport(t.prime, h, factors, maps, preserved, vanish, coherent, stabilized)


def _compose(b, a, target_factors, ncols):
    """Matrix of (b o a) reduced modulo the target factors."""
    rows = len(target_factors)
    return tuple(
        tuple(sum(b[r][m] * a[m][c] for m in range(len(a))) % target_factors[r] for c in range(ncols))
        for r in range(rows)
    )


def _is_isomorphism(m, src_factors, dst_factors) -> bool:
    """Brute force: the induced homomorphism between the finite groups is bijective."""
    if len(src_factors) != len(dst_factors):
        return False
    images = set()
    for x in itertools.product(*(range(f) for f in src_factors)):
        images.add(tuple(sum(m[r][c] * x[c] for c in range(len(x))) % dst_factors[r] for r in range(len(dst_factors))))
    total = 1
    for f in dst_factors:
        total *= f
    return len(images) == total
