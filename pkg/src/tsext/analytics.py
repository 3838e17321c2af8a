"""Extension density, congruences, truncated zeta series, histograms and the claim registry.

Every H2_ts class is realized by one extension, built from a symmetric
normalized representative. Claims are loaded from ``claims.json``; each is
evaluated by brute force and reported VERIFIED, REFUTED (with a witness
that :func:`replay_witness` re-checks independently) or NOT-APPLICABLE.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import cohomology, groups
from .cohomology import (
    DEFAULT_GROUP_GUARD,
    Cochain2,
    compute_h2,
    compute_h2_ts,
    is_cocycle,
    is_symmetric,
    same_class,
    symmetrize_class,
    zero_cochain,
)
from .extensions import (
    ExtensionGroup,
    are_isomorphic,
    build_extension,
    invariant_factors_from_orders_multiset,
    max_element_order,
    max_order_element,
    twisted_table,
)
from .groups import (
    AbelianGroup,
    FiniteGroup,
    GroupAction,
    cyclic_group,
    make_cyclic,
    make_symmetric_group,
    parse_abelian,
    trivial_action,
)
from .invariants import density_invariants, fraction_json

VERIFIED = "VERIFIED"
REFUTED = "REFUTED"
NOT_APPLICABLE = "NOT-APPLICABLE"

SELECTORS = ("max_order", "class_index", "extension_order")


# ---------------------------------------------------------------------------
# Per-class extensions


@lru_cache(maxsize=128)
def ts_extensions(g: FiniteGroup, h: AbelianGroup, action: GroupAction,
                  guard: int = DEFAULT_GROUP_GUARD) -> tuple[tuple[tuple[int, ...], ExtensionGroup], ...]:
    """One extension per H2_ts class, in lexicographic order of class coordinates."""
    ts = compute_h2_ts(g, h, action, guard=guard)
    return tuple((cl, build_extension(g, h, action, ts.representative(cl))) for cl in ts.classes())


def clear_caches():
    """Drop memoized groups and cohomology computations (used for cold timings)."""
    for fn in (ts_extensions, cohomology.compute_z2, cohomology.compute_b2, cohomology.compute_h2,
               cohomology.compute_h2_ts, cohomology._space, groups.make_symmetric_group, groups._abelian_view):
        fn.cache_clear()


def extension_density(g, h, action, guard=DEFAULT_GROUP_GUARD) -> Fraction:
    """Number of H2_ts classes divided by |G| |H|."""
    return Fraction(compute_h2_ts(g, h, action, guard=guard).order, g.order * h.order)


def paper_density(n: int, m: int) -> Fraction:
    return Fraction(math.gcd(n, m), n * m)


@dataclass(frozen=True)
class ZetaSeries:
    """Finite sum over classes of ord_max(E)^(-s), stored as (order, multiplicity) terms."""

    terms: tuple[tuple[int, int], ...]

    @property
    def class_count(self) -> int:
        return sum(mult for _, mult in self.terms)

    def evaluate(self, s) -> complex:
        if s == 0:
            return complex(self.class_count)
        return complex(sum(mult * complex(order) ** (-s) for order, mult in self.terms))

    def to_json(self):
        return [{"max_order": o, "multiplicity": k} for o, k in self.terms]


def zeta_series(g, h, action, guard=DEFAULT_GROUP_GUARD) -> ZetaSeries:
    counts: dict[int, int] = {}
    for _, e in ts_extensions(g, h, action, guard):
        o = max_element_order(e)
        counts[o] = counts.get(o, 0) + 1
    return ZetaSeries(tuple(sorted(counts.items())))


def zeta_ts(s, g, h, action, guard=DEFAULT_GROUP_GUARD) -> tuple[complex, ZetaSeries]:
    series = zeta_series(g, h, action, guard)
    return series.evaluate(s), series


@dataclass(frozen=True)
class Histogram:
    modulus: int
    selector: str
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total, self.modulus)

    @property
    def deviation(self) -> Fraction:
        return max(abs(c - self.mean) for c in self.counts)

    def to_json(self):
        return {
            "modulus": self.modulus,
            "selector": self.selector,
            "counts": list(self.counts),
            "total": self.total,
            "mean": fraction_json(self.mean),
            "max_deviation": fraction_json(self.deviation),
        }


def modular_histogram(g, h, action, selector: str, modulus: int, guard=DEFAULT_GROUP_GUARD) -> Histogram:
    if modulus < 1:
        raise ValueError(f"modulus must be >= 1, got {modulus}")
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; choose from {SELECTORS}")
    counts = [0] * modulus
    for i, (_, e) in enumerate(ts_extensions(g, h, action, guard)):
        value = {"max_order": lambda: max_element_order(e), "class_index": lambda: i,
                 "extension_order": lambda: e.order}[selector]()
        counts[value % modulus] += 1
    return Histogram(modulus, selector, tuple(counts))


# ---------------------------------------------------------------------------
# Claim registry


@dataclass(frozen=True)
class ClaimResult:
    id: str
    statement: str
    paper_location: str
    status: str
    computed: object = None
    expected: object = None
    witness: object = None

    def __post_init__(self):
        if self.status == REFUTED and not self.witness:
            raise AssertionError(f"claim {self.id} refuted without a witness")

    def to_json(self):
        return {
            "id": self.id,
            "statement": self.statement,
            "paper_location": self.paper_location,
            "status": self.status,
            "computed": self.computed,
            "expected": self.expected,
            "witness": self.witness,
        }


@dataclass(frozen=True)
class ClaimReport:
    g: str
    h: str
    action: str
    claims: tuple[ClaimResult, ...]

    @property
    def refuted(self) -> bool:
        return any(c.status == REFUTED for c in self.claims)

    def by_id(self, claim_id: str) -> ClaimResult:
        return next(c for c in self.claims if c.id == claim_id)

    def to_json(self):
        return {
            "pair": {"g": self.g, "h": self.h, "action": self.action},
            "claims": [c.to_json() for c in self.claims],
        }


def load_registry(path=None) -> list[dict]:
    if path is None:
        text = resources.files("tsext").joinpath("claims.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return sorted(json.loads(text)["claims"], key=lambda c: c["id"])


def action_ref(action: GroupAction) -> str:
    if action.is_trivial:
        return "trivial"
    digest = hashlib.sha256(json.dumps(action.to_json()).encode()).hexdigest()
    return f"sha256:{digest[:16]}"


def _is_cyclic(g: FiniteGroup) -> bool:
    return g.order in g.element_orders


def _applies(req: str, g: FiniteGroup, h: AbelianGroup, action: GroupAction) -> bool:
    name, _, arg = req.partition(":")
    if name == "g_abelian":
        return g.is_abelian
    if name == "g_nonabelian":
        return not g.is_abelian
    if name == "g_cyclic":
        return _is_cyclic(g)
    if name == "h_cyclic":
        return h.is_cyclic()
    if name == "equal_orders":
        return g.order == h.order
    if name == "trivial_action":
        return action.is_trivial
    if name == "g_iso":
        if arg.startswith("S"):
            ref = make_symmetric_group(int(arg[1:]))
            return g.order == ref.order and are_isomorphic(g, ref)
        raise ValueError(f"unsupported isomorphism target {arg}")
    if name == "h_iso":
        return h == parse_abelian(arg)
    if name in ("lie_group", "profinite_tower"):
        return False
    raise ValueError(f"unknown applicability condition {req!r}")


def _census(g, h, action, guard):
    """One entry per H2 class: representative, and a symmetric representative if one exists."""
    full = compute_h2(g, h, action, guard=guard)
    ts = compute_h2_ts(g, h, action, guard=guard)
    classes = []
    for cl in full.classes():
        rep = full.representative(cl)
        sym = symmetrize_class(rep, action)
        if (sym is not None) != ts.contains(rep):
            raise AssertionError(f"symmetrization and subgroup membership disagree on class {cl}")
        classes.append({
            "class": list(cl),
            "cocycle": rep.to_json()["values"],
            "symmetric_rep": None if sym is None else sym.to_json()["values"],
        })
    return {
        "kind": "class-census",
        "h2_factors": list(full.factors),
        "ts_factors": list(ts.factors),
        "classes": classes,
    }


def _expected_factors(kind, g):
    if kind == "cyclic_of_order_g":
        return [] if g.order == 1 else [g.order]
    return list(kind)


def _eval_ts_equals_classical(g, h, action, params, guard):
    full = compute_h2(g, h, action, guard=guard)
    ts = compute_h2_ts(g, h, action, guard=guard)
    computed = {"h2": list(full.factors), "h2_ts": list(ts.factors)}
    if ts.order == full.order:
        return VERIFIED, computed, "equal", None
    return REFUTED, computed, "equal", _census(g, h, action, guard)


def _eval_ts_proper(g, h, action, params, guard):
    full = compute_h2(g, h, action, guard=guard)
    ts = compute_h2_ts(g, h, action, guard=guard)
    computed = {"h2": list(full.factors), "h2_ts": list(ts.factors)}
    if ts.order < full.order:
        return VERIFIED, computed, "proper", None
    return REFUTED, computed, "proper", _census(g, h, action, guard)


def _eval_ts_factors(g, h, action, params, guard):
    expected = _expected_factors(params["expected"], g)
    ts = compute_h2_ts(g, h, action, guard=guard)
    if list(ts.factors) == expected:
        return VERIFIED, list(ts.factors), expected, None
    return REFUTED, list(ts.factors), expected, _census(g, h, action, guard)


def _eval_classical_factors(g, h, action, params, guard):
    expected = list(params["expected"])
    full = compute_h2(g, h, action, guard=guard)
    if list(full.factors) == expected:
        return VERIFIED, list(full.factors), expected, None
    return REFUTED, list(full.factors), expected, _census(g, h, action, guard)


def _eval_density(g, h, action, params, guard):
    computed = extension_density(g, h, action, guard)
    expected = paper_density(g.order, h.order)
    if computed == expected:
        return VERIFIED, fraction_json(computed), fraction_json(expected), None
    return REFUTED, fraction_json(computed), fraction_json(expected), _census(g, h, action, guard)


def _eval_max_order(g, h, action, params, guard):
    claimed = math.lcm(g.order, h.order)
    per_class = []
    witness = None
    for cl, e in ts_extensions(g, h, action, guard):
        o = max_element_order(e)
        per_class.append({"class": list(cl), "max_order": o})
        if o != claimed and witness is None:
            x = max_order_element(e)
            hv, gx = e.pair(x)
            witness = {
                "kind": "element-order",
                "class": list(cl),
                "cocycle": e.cocycle.to_json()["values"],
                "element": x,
                "pair": [list(hv), gx],
                "order": o,
                "max_order": o,
            }
    status = VERIFIED if witness is None else REFUTED
    return status, per_class, claimed, witness


def _eval_extremal(g, h, action, params, guard):
    per_class = []
    witness = None
    for cl, e in ts_extensions(g, h, action, guard):
        dc, dp = density_invariants(e)
        trivial = not any(cl)
        per_class.append({"class": list(cl), "delta_centralizer": fraction_json(dc), "delta_pair": fraction_json(dp)})
        ok = 0 < dc <= 1 and ((dc == 1) == trivial)
        if not ok and witness is None:
            witness = {
                "kind": "delta-mismatch",
                "class": list(cl),
                "cocycle": e.cocycle.to_json()["values"],
                "delta_centralizer": fraction_json(dc),
                "trivial_class": trivial,
            }
    status = VERIFIED if witness is None else REFUTED
    return status, per_class, "delta = 1 iff trivial class", witness


def _eval_congruence(g, h, action, params, guard):
    modulus = math.gcd(g.order, h.order)
    ts = compute_h2_ts(g, h, action, guard=guard)
    witness = None
    checked = 0
    for cl in ts.classes():
        c = ts.representative(cl)
        checked += 1
        v = c.values
        for x in range(g.order):
            for y in range(g.order):
                if h.rank and (v[x][y][0] - v[y][x][0]) % modulus:
                    witness = witness or {
                        "kind": "congruence-violation",
                        "cocycle": c.to_json()["values"],
                        "pair": [x, y],
                        "modulus": modulus,
                    }
    computed = {"modulus": modulus, "classes_checked": checked,
                "note": "representatives are symmetric, so both sides agree exactly"}
    status = VERIFIED if witness is None else REFUTED
    return status, computed, f"c(g,h) = c(h,g) mod {modulus}", witness


EVALUATORS = {
    "ts_equals_classical": _eval_ts_equals_classical,
    "ts_proper_subgroup": _eval_ts_proper,
    "ts_factors": _eval_ts_factors,
    "classical_factors": _eval_classical_factors,
    "density_formula": _eval_density,
    "max_order_lcm": _eval_max_order,
    "extremal_density": _eval_extremal,
    "congruence_gcd": _eval_congruence,
}


def evaluate_claim(entry: dict, g, h, action, guard=DEFAULT_GROUP_GUARD) -> ClaimResult:
    base = dict(id=entry["id"], statement=entry["statement"], paper_location=entry["paper_location"])
    if not all(_applies(r, g, h, action) for r in entry["requires"]) or entry["evaluator"] == "none":
        return ClaimResult(status=NOT_APPLICABLE, **base)
    status, computed, expected, witness = EVALUATORS[entry["evaluator"]](g, h, action, entry["params"], guard)
    return ClaimResult(status=status, computed=computed, expected=expected, witness=witness, **base)


def verify_claims(g, h, action, guard=DEFAULT_GROUP_GUARD, registry=None) -> ClaimReport:
    entries = load_registry() if registry is None else sorted(registry, key=lambda c: c["id"])
    results = tuple(evaluate_claim(e, g, h, action, guard) for e in entries)
    return ClaimReport(g.name, h.token, action_ref(action), results)


def congruence_report(n: int, m: int) -> ClaimResult:
    g, h = cyclic_group(n), make_cyclic(m)
    entry = next(e for e in load_registry() if e["evaluator"] == "congruence_gcd")
    return evaluate_claim(entry, g, h, trivial_action(g, h))


# ---------------------------------------------------------------------------
# Witness replay


def _cochain(values, g, h) -> Cochain2:
    return Cochain2(g, h, tuple(tuple(tuple(v) for v in row) for row in values))


def _class_order(c: Cochain2, action: GroupAction) -> int:
    zero = zero_cochain(c.group, c.coefficients)
    k = 1
    while not same_class(c.scale(k), zero, action):
        k += 1
    return k


def _replay_census(w, g, h, action):
    """Re-derive the census facts through the solver path; return (h2 factors, ts factors, all_symmetric)."""
    reps = [_cochain(entry["cocycle"], g, h) for entry in w["classes"]]
    if not all(is_cocycle(c, action) for c in reps):
        return None
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if same_class(reps[i], reps[j], action):
                return None
    if len(reps) != compute_h2(g, h, action).order:
        return None
    ts_orders = []
    for entry, rep in zip(w["classes"], reps):
        if entry["symmetric_rep"] is None:
            if symmetrize_class(rep, action) is not None:
                return None
        else:
            sym = _cochain(entry["symmetric_rep"], g, h)
            if not (is_symmetric(sym) and same_class(rep, sym, action)):
                return None
            ts_orders.append(_class_order(rep, action))
    h2_orders = [_class_order(rep, action) for rep in reps]
    return (
        list(invariant_factors_from_orders_multiset(h2_orders)),
        list(invariant_factors_from_orders_multiset(ts_orders)),
        len(ts_orders),
    )


def _power_order(table, x) -> int:
    k, y = 1, x
    while y != 0:
        y = table[y][x]
        k += 1
    return k


def replay_witness(result: ClaimResult, g: FiniteGroup, h: AbelianGroup, action: GroupAction) -> bool:
    """Independently re-check that a REFUTED claim's witness contradicts its expected value."""
    w = result.witness
    if result.status != REFUTED or not w:
        return False
    kind = w["kind"]
    if kind == "class-census":
        facts = _replay_census(w, g, h, action)
        if facts is None:
            return False
        h2f, tsf, n_ts = facts
        if h2f != w["h2_factors"] or tsf != w["ts_factors"]:
            return False
        n_all = len(w["classes"])
        evaluator = next(e["evaluator"] for e in load_registry() if e["id"] == result.id)
        if evaluator == "ts_equals_classical":
            return n_ts < n_all
        if evaluator == "ts_proper_subgroup":
            return n_ts == n_all
        if evaluator == "ts_factors":
            return tsf != result.expected
        if evaluator == "classical_factors":
            return h2f != result.expected
        if evaluator == "density_formula":
            exp = Fraction(result.expected["num"], result.expected["den"])
            return Fraction(n_ts, g.order * h.order) != exp
        return False
    if kind == "element-order":
        c = _cochain(w["cocycle"], g, h)
        if not (is_cocycle(c, action) and symmetrize_class(c, action) is not None):
            return False
        table = twisted_table(action, c)
        x = w["element"]
        if divmod(x, g.order) != (h.index(w["pair"][0]), w["pair"][1]):
            return False
        if _power_order(table, x) != w["order"]:
            return False
        true_max = max(_power_order(table, y) for y in range(len(table)))
        return true_max == w["max_order"] and true_max != result.expected
    if kind == "delta-mismatch":
        c = _cochain(w["cocycle"], g, h)
        e = build_extension(g, h, action, c)
        t = e.group.cayley
        cent = [x for x in range(e.order) if all(t[x][i] == t[i][x] for i in e.inclusion_map)]
        dc = Fraction(len(cent), e.order)
        trivial = same_class(c, zero_cochain(g, h), action)
        if dc != Fraction(w["delta_centralizer"]["num"], w["delta_centralizer"]["den"]):
            return False
        return trivial == w["trivial_class"] and not (0 < dc <= 1 and (dc == 1) == trivial)
    if kind == "congruence-violation":
        c = _cochain(w["cocycle"], g, h)
        x, y = w["pair"]
        return is_cocycle(c, action) and (c.values[x][y][0] - c.values[y][x][0]) % w["modulus"] != 0
    return False

