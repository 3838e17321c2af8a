"""Dimension, stabilizer, symmetry-locus and density invariants of finite extensions.

Two stabilizer variants are reported side by side:

* the centralizer of the image of H in E (conjugation is the only action
  of all of E on H that is defined), giving ``delta_centralizer``;
* the symmetry locus {(x, y) in G x G : c(x, y) = c(y, x)} of the defining
  cocycle, giving ``delta_pair``.

All densities are exact ``Fraction`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cohomology import Cochain2
from .extensions import ExtensionGroup, ExtensionMorphism, abelian_invariants, check_morphism, max_element_order


def dim_ts(e: ExtensionGroup) -> int:
    """Sum of the manifold dimensions of H and G; finite discrete groups contribute 0."""
    return 0 + 0


def stab_centralizer(e: ExtensionGroup) -> tuple[int, ...]:
    """Elements of E commuting with every element of the image of H."""
    t = e.group.cayley
    inc = e.inclusion_map
    return tuple(x for x in range(e.order) if all(t[x][i] == t[i][x] for i in inc))


def symmetry_locus(c: Cochain2) -> tuple[frozenset, int]:
    n = c.group.order
    v = c.values
    pairs = frozenset((x, y) for x in range(n) for y in range(n) if v[x][y] == v[y][x])
    return pairs, len(pairs)


def density_invariants(e: ExtensionGroup) -> tuple[Fraction, Fraction]:
    """(|centralizer of H| / |E|, |symmetry locus| / |G|^2)."""
    _, size = symmetry_locus(e.cocycle)
    return Fraction(len(stab_centralizer(e)), e.order), Fraction(size, e.quotient.order**2)


def fraction_json(q: Fraction):
    return {"num": q.numerator, "den": q.denominator}


@dataclass(frozen=True)
class InvariantReport:
    dim_ts: int
    stab_centralizer_order: int
    symmetry_locus_size: int
    delta_centralizer: Fraction
    delta_pair: Fraction
    max_order: int
    abelian_type: tuple[int, ...] | str

    def __post_init__(self):
        if not (0 < self.delta_centralizer <= 1 and 0 <= self.delta_pair <= 1):
            raise AssertionError(f"density out of range: {self}")

    def to_json(self):
        return {
            "dim_ts": self.dim_ts,
            "stab_centralizer_order": self.stab_centralizer_order,
            "symmetry_locus_size": self.symmetry_locus_size,
            "delta_centralizer": fraction_json(self.delta_centralizer),
            "delta_pair": fraction_json(self.delta_pair),
            "max_order": self.max_order,
            "abelian_type": self.abelian_type if isinstance(self.abelian_type, str) else list(self.abelian_type),
        }


def invariant_report(e: ExtensionGroup) -> InvariantReport:
    stab = stab_centralizer(e)
    _, locus = symmetry_locus(e.cocycle)
    dc, dp = density_invariants(e)
    return InvariantReport(dim_ts(e), len(stab), locus, dc, dp, max_element_order(e), abelian_invariants(e))


def functoriality_check(m: ExtensionMorphism) -> dict:
    """Check what is literally testable for a morphism and record both densities.

    The centralizer is only claimed to map into the centralizer when alpha is
    surjective (otherwise gamma(iota(H)) need not exhaust iota'(H')). No
    inequality between the densities is asserted.
    """
    e, f = m.source, m.target
    check = check_morphism(m)
    if not check:
        raise ValueError(f"not a morphism: {check.failures}")
    alpha_onto = set(m.alpha) == set(range(f.kernel.order))
    target_stab = set(stab_centralizer(f))
    image = {m.gamma[x] for x in stab_centralizer(e)}
    dc1, dp1 = density_invariants(e)
    dc2, dp2 = density_invariants(f)
    return {
        "dim_equal": dim_ts(e) == dim_ts(f),
        "alpha_surjective": alpha_onto,
        "stab_maps_into_stab": image <= target_stab if alpha_onto else None,
        "source": {"delta_centralizer": dc1, "delta_pair": dp1},
        "target": {"delta_centralizer": dc2, "delta_pair": dp2},
    }
