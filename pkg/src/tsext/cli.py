"""Command-line entry point.

Every command first builds a JSON payload; json, csv and text output are
renderings of that payload. With a cache directory the payload is stored
under the sha256 of the run configuration, so warm and cold runs emit the
same bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

from .analytics import (
    REFUTED,
    SELECTORS,
    VERIFIED,
    action_ref,
    congruence_report,
    extension_density,
    modular_histogram,
    paper_density,
    ts_extensions,
    verify_claims,
    zeta_ts,
)
from .cohomology import DEFAULT_GROUP_GUARD, compute_h2, compute_h2_ts
from .errors import SizeGuardError, TsextError
from .extensions import build_extension, max_element_order, order_statistics
from .groups import (
    UnknownTokenError,
    action_from_generators,
    cyclic_group,
    make_cyclic,
    parse_abelian,
    parse_group,
    trivial_action,
)
from .invariants import fraction_json, invariant_report
from .profinite import COHOMOLOGY_LEVEL_GUARD, build_cyclic_tower, tower_cohomology_system

COMMANDS = ("h2", "h2ts", "extensions", "invariants", "density", "zeta", "histogram", "claims", "sweep", "tower")
SWEEP_HEADER = [
    "n", "m", "class_count", "density", "paper_density", "max_orders",
    "density_status", "max_order_status", "congruence_status",
]
CACHE_ENV = "TSEXT_CACHE_DIR"

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_REFUTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    g_token: str | None = None
    h_token: str | None = None
    action_source: str = "trivial"
    output_format: str | None = None
    output_path: str | None = None
    cache_dir: str | None = None
    size_guard: int | None = None
    s_value: str | None = None
    modulus: int | None = None
    selector: str | None = None
    n_max: int | None = None
    m_max: int | None = None
    prime: int | None = None
    k_max: int | None = None

    @property
    def fmt(self) -> str:
        if self.output_format:
            return self.output_format
        return "csv" if self.command == "sweep" else "json"


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Inputs


def _require(value, flag):
    if value is None:
        raise UsageError(f"missing required flag {flag}")
    return value


def _load_pair(cfg: RunConfig):
    g = parse_group(_require(cfg.g_token, "--g"))
    h = parse_abelian(_require(cfg.h_token, "--h"))
    guard = cfg.size_guard or DEFAULT_GROUP_GUARD
    if g.order > guard:
        raise SizeGuardError("|G|", g.order, guard)
    return g, h, load_action(cfg.action_source, g, h)


def load_action(source: str, g, h):
    """``trivial`` or a JSON file {"generators": {"<element index>": matrix}}."""
    if source == "trivial":
        return trivial_action(g, h)
    try:
        with open(source) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read action file {source}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("generators"), dict):
        raise UsageError(f"action file {source} needs a 'generators' object")
    return action_from_generators(g, h, data["generators"])


def _parse_s(text):
    if text is None:
        raise UsageError("missing required flag --s")
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse --s {text!r}") from exc


def _complex_json(z: complex):
    return {"re": z.real, "im": z.imag}


# ---------------------------------------------------------------------------
# Payloads


def _pair_header(cfg, g, h, action):
    return {"command": cfg.command, "g": g.name, "h": h.token, "action": action_ref(action)}


def _h2_payload(cfg):
    g, h, action = _load_pair(cfg)
    fn = compute_h2 if cfg.command == "h2" else compute_h2_ts
    out = _pair_header(cfg, g, h, action)
    out["cohomology"] = fn(g, h, action, guard=cfg.size_guard or DEFAULT_GROUP_GUARD).to_json()
    return out


def _stats_json(e):
    return [[o, k] for o, k in sorted(order_statistics(e).items())]


def _extensions_payload(cfg):
    g, h, action = _load_pair(cfg)
    guard = cfg.size_guard or DEFAULT_GROUP_GUARD
    rows = []
    for cl, e in ts_extensions(g, h, action, guard):
        rows.append({
            "class": list(cl),
            "cocycle": e.cocycle.to_json()["values"],
            "order_statistics": _stats_json(e),
            "invariants": invariant_report(e).to_json(),
        })
    out = _pair_header(cfg, g, h, action)
    out["extensions"] = rows
    return out


def _invariants_payload(cfg):
    """Invariants of one extension per classical class, flagged by symmetry."""
    g, h, action = _load_pair(cfg)
    guard = cfg.size_guard or DEFAULT_GROUP_GUARD
    full = compute_h2(g, h, action, guard=guard)
    ts = compute_h2_ts(g, h, action, guard=guard)
    rows = []
    for cl in full.classes():
        rep = full.representative(cl)
        e = build_extension(g, h, action, rep)
        rows.append({
            "class": list(cl),
            "topo_symmetric": ts.contains(rep),
            "invariants": invariant_report(e).to_json(),
        })
    out = _pair_header(cfg, g, h, action)
    out["classes"] = rows
    return out


def _density_payload(cfg):
    g, h, action = _load_pair(cfg)
    guard = cfg.size_guard or DEFAULT_GROUP_GUARD
    out = _pair_header(cfg, g, h, action)
    out["class_count"] = compute_h2_ts(g, h, action, guard=guard).order
    out["density"] = fraction_json(extension_density(g, h, action, guard))
    cyclic = g.order in g.element_orders and h.is_cyclic() and action.is_trivial
    out["paper_density"] = fraction_json(paper_density(g.order, h.order)) if cyclic else None
    return out


def _zeta_payload(cfg):
    s = _parse_s(cfg.s_value)
    g, h, action = _load_pair(cfg)
    value, series = zeta_ts(s, g, h, action, cfg.size_guard or DEFAULT_GROUP_GUARD)
    out = _pair_header(cfg, g, h, action)
    out.update({"s": _complex_json(s), "value": _complex_json(value), "class_count": series.class_count,
                "terms": series.to_json()})
    return out


def _histogram_payload(cfg):
    modulus = _require(cfg.modulus, "--modulus")
    selector = cfg.selector or "max_order"
    if selector not in SELECTORS:
        raise UsageError(f"unknown selector {selector}; choose from {', '.join(SELECTORS)}")
    if modulus < 1:
        raise UsageError("--modulus must be >= 1")
    g, h, action = _load_pair(cfg)
    out = _pair_header(cfg, g, h, action)
    out["histogram"] = modular_histogram(g, h, action, selector, modulus, cfg.size_guard or DEFAULT_GROUP_GUARD).to_json()
    return out


def _claims_payload(cfg):
    g, h, action = _load_pair(cfg)
    report = verify_claims(g, h, action, cfg.size_guard or DEFAULT_GROUP_GUARD)
    out = {"command": "claims"}
    out.update(report.to_json())
    return out


def sweep_row(n: int, m: int) -> dict:
    g, h = cyclic_group(n), make_cyclic(m)
    action = trivial_action(g, h)
    count = compute_h2_ts(g, h, action).order
    density = extension_density(g, h, action)
    expected = paper_density(n, m)
    orders = [max_element_order(e) for _, e in ts_extensions(g, h, action)]
    lcm = math.lcm(n, m)
    return {
        "n": n,
        "m": m,
        "class_count": count,
        "density": f"{density.numerator}/{density.denominator}",
        "paper_density": f"{expected.numerator}/{expected.denominator}",
        "max_orders": ";".join(str(o) for o in orders),
        "density_status": VERIFIED if density == expected else REFUTED,
        "max_order_status": VERIFIED if all(o == lcm for o in orders) else REFUTED,
        "congruence_status": congruence_report(n, m).status,
    }


def _sweep_payload(cfg):
    n_max = _require(cfg.n_max, "--n-max")
    m_max = _require(cfg.m_max, "--m-max")
    guard = cfg.size_guard or DEFAULT_GROUP_GUARD
    if n_max < 0 or m_max < 0:
        raise UsageError("sweep ranges must be >= 0")
    if n_max > guard:
        raise SizeGuardError("n_max", n_max, guard)
    if m_max > guard:
        raise SizeGuardError("m_max", m_max, guard)
    rows = [sweep_row(n, m) for n in range(1, n_max + 1) for m in range(1, m_max + 1)]
    return {"command": "sweep", "n_max": n_max, "m_max": m_max, "rows": rows}


def _tower_payload(cfg):
    p = _require(cfg.prime, "--p")
    k_max = _require(cfg.k_max, "--k-max")
    h = parse_abelian(cfg.h_token or "C2")
    level_guard = cfg.size_guard or COHOMOLOGY_LEVEL_GUARD
    tower = build_cyclic_tower(p, k_max)
    out = {"command": "tower"}
    out.update(tower_cohomology_system(tower, h, level_guard).to_json())
    return out


PAYLOADS = {
    "h2": _h2_payload,
    "h2ts": _h2_payload,
    "extensions": _extensions_payload,
    "invariants": _invariants_payload,
    "density": _density_payload,
    "zeta": _zeta_payload,
    "histogram": _histogram_payload,
    "claims": _claims_payload,
    "sweep": _sweep_payload,
    "tower": _tower_payload,
}


# ---------------------------------------------------------------------------
# Cache


def cache_key(cfg: RunConfig) -> str:
    fields = asdict(cfg)
    for k in ("output_format", "output_path", "cache_dir"):
        fields.pop(k)
    if cfg.action_source != "trivial":
        # content-address the action file rather than its path
        try:
            with open(cfg.action_source, "rb") as fh:
                fields["action_source"] = "sha256:" + hashlib.sha256(fh.read()).hexdigest()
        except OSError as exc:
            raise UsageError(f"cannot read action file {cfg.action_source}: {exc}") from exc
    return hashlib.sha256(json.dumps(fields, sort_keys=True).encode()).hexdigest()


def compute_payload(cfg: RunConfig):
    cache_dir = cfg.cache_dir
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, cache_key(cfg) + ".json")
        if os.path.exists(path):
            with open(path) as fh:
                return json.load(fh)
    payload = PAYLOADS[cfg.command](cfg)
    # normalize through JSON so cold and warm runs see identical objects
    payload = json.loads(canonical_json(payload))
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(canonical_json(payload))
        os.replace(tmp, path)
    return payload


# ---------------------------------------------------------------------------
# Rendering


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([r[k] for k in header])
    return buf.getvalue()


def render_csv(payload) -> str:
    cmd = payload["command"]
    if cmd == "sweep":
        return _csv_text(SWEEP_HEADER, payload["rows"])
    if cmd == "histogram":
        counts = payload["histogram"]["counts"]
        return _csv_text(["residue", "count"], [{"residue": i, "count": c} for i, c in enumerate(counts)])
    if cmd == "zeta":
        return _csv_text(["max_order", "multiplicity"], payload["terms"])
    if cmd == "claims":
        rows = [{"id": c["id"], "status": c["status"]} for c in payload["claims"]]
        return _csv_text(["id", "status"], rows)
    raise UsageError(f"csv output is not available for {cmd}")


def _text_lines(value, indent=""):
    if isinstance(value, dict):
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                yield f"{indent}{k}:"
                yield from _text_lines(v, indent + "  ")
            else:
                yield f"{indent}{k}: {_scalar(v)}"
    elif isinstance(value, list):
        for i, v in enumerate(value):
            if isinstance(v, (dict, list)) and v and not _flat(v):
                yield f"{indent}[{i}]"
                yield from _text_lines(v, indent + "  ")
            else:
                yield f"{indent}[{i}] {_scalar(v)}"
    else:
        yield f"{indent}{_scalar(value)}"


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    if v is None:
        return "-"
    return str(v)


def render_text(payload) -> str:
    return "\n".join(_text_lines(payload)) + "\n"


def render(payload, fmt: str) -> str:
    if fmt == "json":
        return canonical_json(payload)
    if fmt == "csv":
        return render_csv(payload)
    return render_text(payload)


# ---------------------------------------------------------------------------
# Entry points


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        payload = compute_payload(cfg)
        text = render(payload, cfg.fmt)
    except (UsageError, UnknownTokenError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except (TsextError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_COMPUTE
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if cfg.command == "claims" and any(c["status"] == REFUTED for c in payload["claims"]):
        return EXIT_REFUTED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", dest="g_token", help="group token: C<n>, C<a>xC<b>..., S<n>")
    common.add_argument("--h", dest="h_token", help="abelian coefficient token: C<n> or C<a>xC<b>...")
    common.add_argument("--action", dest="action_source", default="trivial",
                        help="'trivial' or a JSON file {\"generators\": {\"<index>\": matrix}}")
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "text"))
    common.add_argument("--output", dest="output_path")
    common.add_argument("--cache-dir", dest="cache_dir", default=os.environ.get(CACHE_ENV))
    common.add_argument("--guard", dest="size_guard", type=int,
                        help=f"size guard (default {DEFAULT_GROUP_GUARD} for |G|, "
                             f"{COHOMOLOGY_LEVEL_GUARD} for tower levels)")
    common.add_argument("--s", dest="s_value", help="zeta argument, e.g. 2 or 1+0.5j")
    common.add_argument("--modulus", type=int)
    common.add_argument("--selector", choices=SELECTORS)
    common.add_argument("--n-max", dest="n_max", type=int)
    common.add_argument("--m-max", dest="m_max", type=int)
    common.add_argument("--p", dest="prime", type=int)
    common.add_argument("--k-max", dest="k_max", type=int)

    parser = argparse.ArgumentParser(prog="tsext", description="Symmetric extension cohomology of finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "h2": "classical H2 invariant factors",
        "h2ts": "symmetric-class subgroup H2_ts",
        "extensions": "one extension per H2_ts class with invariants",
        "invariants": "invariants of one extension per H2 class",
        "density": "extension density against gcd(n,m)/(nm)",
        "zeta": "truncated zeta series at --s",
        "histogram": "class histogram modulo --modulus",
        "claims": "evaluate the claim registry (exit 3 on refutation)",
        "sweep": "grid of cyclic pairs 1..n-max x 1..m-max",
        "tower": "cyclic p-tower with inflation maps",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**vars(args))
    if cfg.size_guard is not None and cfg.size_guard < 1:
        print("error: --guard must be positive", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
