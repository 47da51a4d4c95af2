"""Command-line interface: ``chamber-atlas {trees,chambers,graph,report,kostant}``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Callable

from . import arrangement as arr
from . import graph as gr
from . import kostant as ko
from .core import enumerate_alternating_trees, enumerate_positive_alternating_trees, format_tree
from .errors import AtlasError, BoundsError, DomainError, InvariantError, ResourceError, StructuralError

log = logging.getLogger("chamber_atlas")

CACHE_VERSION = 1
THREADS_ENV = "CHAMBER_ATLAS_THREADS"
CACHE_ENV = "CHAMBER_ATLAS_CACHE"

# (default cap, cap with --allow-large) per target
LIMITS = {
    "trees": (9, 9),
    "resonance": (5, 6),
    "threshold": (4, 5),
    "graph": (6, 7),
    "kostant": (5, 6),
}
FORMATS = {
    "trees": {"text", "json"},
    "chambers": {"text", "json", "csv"},
    "graph": {"text", "json", "dot"},
    "report": {"text", "json"},
    "kostant": {"text", "json"},
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None
    family: str
    positive_only: bool
    fmt: str
    out: Path | None
    threads: int
    allow_large: bool
    cache: Path | None

    def validate(self) -> None:
        if self.fmt not in FORMATS[self.command]:
            raise StructuralError(f"format {self.fmt!r} is not available for {self.command}")
        if self.n is None:
            return
        lo = 2 if self.command in ("trees", "graph") else 1
        cap, large_cap = LIMITS[self.family if self.command == "chambers" else self.command]
        top = large_cap if self.allow_large else cap
        if not lo <= self.n <= top:
            hint = " (use --allow-large)" if self.n <= large_cap and self.n >= lo else ""
            raise BoundsError(f"{self.command}: n must lie in [{lo}, {top}]{hint}")


def resolve_threads(flag: int | None) -> int:
    if flag:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise StructuralError(f"{THREADS_ENV} must be an integer")
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

class Cache:
    """JSON payloads stored under the hash of their key, written atomically."""

    def __init__(self, root: Path | None):
        self.root = root

    def _path(self, key: dict) -> Path:
        digest = hashlib.sha256(json.dumps({"v": CACHE_VERSION, **key}, sort_keys=True).encode()).hexdigest()
        return self.root / f"{digest}.json"

    def load(self, key: dict):
        if self.root is None:
            return None
        path = self._path(key)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            body = json.dumps(data["payload"], sort_keys=True)
            if data["key"] != key or data["sha256"] != hashlib.sha256(body.encode()).hexdigest():
                raise ValueError("checksum mismatch")
            return data["payload"]
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("discarding corrupt cache entry %s: %s", path.name, exc)
            return None

    def store(self, key: dict, payload) -> None:
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        body = json.dumps(payload, sort_keys=True)
        data = {"key": key, "sha256": hashlib.sha256(body.encode()).hexdigest(), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, sort_keys=True)
        os.replace(tmp, self._path(key))

    def get_or_compute(self, key: dict, compute: Callable):
        hit = self.load(key)
        if hit is not None:
            return hit
        payload = compute()
        self.store(key, payload)
        return payload


def arrangement_for(family: str, n: int) -> arr.CentralArrangement:
    """``--n`` counts threshold functions of ``n`` variables, i.e. the arrangement in dimension ``n+1``."""
    if family == "resonance":
        return arr.resonance_arrangement(n)
    if family == "threshold":
        return arr.threshold_arrangement(n + 1)
    raise StructuralError(f"unknown family {family!r}")


def load_chambers(cache: Cache, family: str, n: int, threads: int) -> list[arr.Chamber]:
    payload = cache.get_or_compute(
        {"kind": "chambers", "family": family, "n": n},
        lambda: [c.to_json() for c in arr.enumerate_chambers(arrangement_for(family, n), workers=threads)],
    )
    return [arr.Chamber.from_json(c) for c in payload]


def load_census(cache: Cache, family: str, n: int, chambers: int) -> dict:
    def compute():
        c = arr.wall_census(arrangement_for(family, n), chamber_count=chambers)
        return {"per_hyperplane": list(c.per_hyperplane), "total": c.total, "chambers": c.chamber_count, "rank": c.rank}

    return cache.get_or_compute({"kind": "census", "family": family, "n": n}, compute)


def load_graph_report(cache: Cache, n: int, positive: bool, threads: int, allow_large: bool) -> dict:
    def compute():
        G = gr.build_compatibility_graph(n, positive, allow_large=allow_large)
        report = gr.classify_cliques(G, mapper=_mapper(threads))
        out = {"stats": gr.graph_stats(G, report), "report": report.to_json()}
        if not positive and n >= 2:
            rows = gr.source_set_decomposition(G, report)
            out["triangle"] = [rows[k].indexable for k in sorted(rows)]
        return out

    return cache.get_or_compute({"kind": "graph", "n": n, "positive": positive}, compute)


def _mapper(threads: int) -> Callable:
    if threads <= 1:
        return map
    from concurrent.futures import ProcessPoolExecutor

    def pmap(fn, items):
        items = list(items)
        with ProcessPoolExecutor(threads) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * threads))))

    return pmap


# ---------------------------------------------------------------------------
# commands; each returns the text to emit
# ---------------------------------------------------------------------------

def cmd_trees(cfg: RunConfig, args) -> str:
    gen = enumerate_positive_alternating_trees if cfg.positive_only else enumerate_alternating_trees
    trees = gen(cfg.n)
    if cfg.fmt == "json":
        return json.dumps(
            {"n": cfg.n, "positive_only": cfg.positive_only, "count": len(trees),
             "trees": [format_tree(t) for t in trees] if args.list else None},
            indent=2, sort_keys=True,
        ) + "\n"
    lines = [f"count {len(trees)}"]
    if args.list:
        lines += [format_tree(t) for t in trees]
    return "\n".join(lines) + "\n"


def cmd_chambers(cfg: RunConfig, args) -> str:
    cache = Cache(cfg.cache)
    chambers = load_chambers(cache, cfg.family, cfg.n, cfg.threads)
    if cfg.positive_only:
        if cfg.family != "resonance":
            raise DomainError("--positive applies to the resonance family only")
        chambers = arr.positive_chambers(chambers, cfg.n)
    census = load_census(cache, cfg.family, cfg.n, len(chambers)) if args.census else None
    A = arrangement_for(cfg.family, cfg.n)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if census is not None:
            writer.writerow(["n", "hyperplane_mask", "wall_count"])
            for label, w in zip(A.labels, census["per_hyperplane"]):
                writer.writerow([cfg.n, label, w])
        else:
            writer.writerow(["signs", "witness"])
            for c in chambers:
                writer.writerow([c.sign_string, " ".join(c.witness.serialize())])
        return buf.getvalue()
    if cfg.fmt == "json":
        if args.dump:
            return "".join(json.dumps(c.to_json()) + "\n" for c in chambers)
        out = {"family": cfg.family, "n": cfg.n, "positive_only": cfg.positive_only, "count": len(chambers)}
        if census is not None:
            out["census"] = _census_json(census)
        return json.dumps(out, indent=2, sort_keys=True) + "\n"
    lines = [f"count {len(chambers)}"]
    if census is not None:
        lines.append(_census_text(census))
    if args.dump:
        lines += [f"{c.sign_string} {' '.join(c.witness.serialize())}" for c in chambers]
    return "\n".join(lines) + "\n"


def _census_json(census: dict) -> dict:
    w = Fraction(2 * census["total"], census["chambers"])
    return {**census, "average_walls": str(w)}


def _census_text(census: dict) -> str:
    w = Fraction(2 * census["total"], census["chambers"])
    per = sorted(set(census["per_hyperplane"]))
    return f"walls {census['total']} per-hyperplane {per} average {w}"


def cmd_graph(cfg: RunConfig, args) -> str:
    if cfg.fmt == "dot":
        G = gr.build_compatibility_graph(cfg.n, cfg.positive_only, allow_large=cfg.allow_large)
        return gr.to_dot(G)
    data = load_graph_report(Cache(cfg.cache), cfg.n, cfg.positive_only, cfg.threads, cfg.allow_large)
    stats = dict(data["stats"])
    if not cfg.positive_only and cfg.n == 6:
        stats["reference_indexable"] = {"table": 11292, "text": 11296}
    if "triangle" in data:
        stats["indexable_by_source_count"] = data["triangle"]
    if cfg.fmt == "json":
        body = stats if args.stats else {**stats, "cliques": data["report"]}
        return json.dumps(body, indent=2, sort_keys=True) + "\n"
    lines = [f"{k} {json.dumps(v, sort_keys=True)}" for k, v in sorted(stats.items())]
    return "\n".join(lines) + "\n"


def cmd_kostant(cfg: RunConfig, args) -> str:
    if args.value is not None:
        try:
            a = [int(v) for v in args.value.split(",")]
        except ValueError:
            raise StructuralError("--value expects comma-separated integers")
        value = ko.kostant_value(a)
        if cfg.fmt == "json":
            return json.dumps({"netflow": a, "value": value}) + "\n"
        return f"{value}\n"
    if cfg.n is None:
        raise StructuralError("kostant needs --value or --n")
    chambers = load_chambers(Cache(cfg.cache), "resonance", cfg.n, cfg.threads)
    kcs = ko.kostant_chambers(cfg.n, chambers, check=True, cap=6 if cfg.allow_large else 5)
    if args.fit:
        for kc in kcs:
            kc.fit = ko.fit_chamber_polynomial(kc, cfg.n)
    if cfg.fmt == "json":
        return json.dumps({"n": cfg.n, "kostant_chambers": [kc.to_json() for kc in kcs]}, indent=2, sort_keys=True) + "\n"
    lines = [f"count {len(kcs)}"]
    for kc in kcs:
        line = f"trees {list(kc.positive_tree_set)} chambers {len(kc.resonance_chambers)}"
        if kc.fit is not None:
            line += f" degree {kc.fit.degree} holdout {'ok' if kc.fit.holdout_agrees else 'FAIL'} kappa = {kc.fit.polynomial}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def build_report(cfg: RunConfig, max_n: int) -> dict:
    """Compute the table columns up to ``max_n`` and fill gaps from the cache."""
    cache = Cache(cfg.cache)
    R: dict[int, int] = {}
    T: dict[int, int] = {}
    K: dict[int, int] = {}
    triangle: dict[int, list[int]] = {}
    census: dict[int, dict] = {}
    res_cap = LIMITS["resonance"][cfg.allow_large]
    thr_cap = LIMITS["threshold"][cfg.allow_large]
    for n in range(1, max(max_n, 6) + 1):
        key = {"kind": "chambers", "family": "resonance", "n": n}
        # row n reports K_(n+1), so the resonance column runs one step further
        if n <= min(max_n + 1, res_cap) or cache.load(key) is not None:
            chambers = load_chambers(cache, "resonance", n, cfg.threads)
            R[n] = len(chambers)
            if n <= 5:
                K[n] = len(ko.kostant_chambers(n, chambers, check=False))
        key = {"kind": "chambers", "family": "threshold", "n": n}
        if n <= min(max_n, thr_cap) or cache.load(key) is not None:
            T[n] = len(load_chambers(cache, "threshold", n, cfg.threads))
        if n + 1 <= min(max_n + 1, LIMITS["graph"][0]) or cache.load({"kind": "graph", "n": n + 1, "positive": False}):
            triangle[n] = load_graph_report(cache, n + 1, False, cfg.threads, cfg.allow_large)["triangle"]
    for m in range(2, min(max_n, 4) + 2):
        # threshold arrangement in dimension m is table index m - 1
        if m - 1 in T:
            census[m] = _census_json(load_census(cache, "threshold", m - 1, T[m - 1]))
    rows = []
    for n in range(1, max_n + 1):
        rows.append({
            "n": n,
            "lower": (n + 1) * T[n] // 2 ** (n + 1) if n in T else None,
            "R": R.get(n),
            "K_next": K.get(n + 1),
            "T_half": T[n] // 2 if n in T else None,
        })
    checks = [c for c in arr.verify_inequalities(R, T, K) if c.n <= max_n]
    identity = {
        n: sum(comb(n, k) * v for k, v in enumerate(row)) for n, row in triangle.items()
    }
    return {
        "rows": rows,
        "checks": [{"name": c.name, "n": c.n, "statement": c.statement, "holds": c.holds, "kind": c.kind} for c in checks],
        "triangle": {str(n): row for n, row in sorted(triangle.items())},
        "triangle_identity": {str(n): {"sum": s, "R": R.get(n)} for n, s in sorted(identity.items())},
        "wall_census": {str(m): c for m, c in sorted(census.items())},
    }


def cmd_report(cfg: RunConfig, args) -> str:
    report = build_report(cfg, args.max_n)
    if cfg.fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"

    def cell(v):
        return "?" if v is None else str(v)

    lines = ["n  floor((n+1)T/2^(n+1))  R_n  K_(n+1)  T_n/2"]
    for r in report["rows"]:
        lines.append(f"{r['n']}  {cell(r['lower'])}  {cell(r['R'])}  {cell(r['K_next'])}  {cell(r['T_half'])}")
    lines.append("")
    for c in report["checks"]:
        lines.append(f"[{'PASS' if c['holds'] else 'FAIL'}] {c['name']} n={c['n']}: {c['statement']} ({c['kind']})")
    lines.append("")
    lines.append("indexable collections by number of sources")
    for n, row in report["triangle"].items():
        ident = report["triangle_identity"][n]
        lines.append(f"{n}: {', '.join(map(str, row))}  weighted sum {ident['sum']} (R={cell(ident['R'])})")
    lines.append("")
    lines.append("threshold wall census (dimension: walls, chambers, average walls per chamber)")
    for m, c in report["wall_census"].items():
        lines.append(f"{m}: {c['total']}, {c['chambers']}, {c['average_walls']}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "trees": cmd_trees,
    "chambers": cmd_chambers,
    "graph": cmd_graph,
    "report": cmd_report,
    "kostant": cmd_kostant,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", default="text", choices=["json", "csv", "dot", "text"])
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("--threads", type=int, help=f"worker processes (default: ${THREADS_ENV} or CPU count)")
    common.add_argument("--allow-large", action="store_true", help="permit hour-scale targets")
    common.add_argument("--cache", type=Path, help=f"cache directory (default: ${CACHE_ENV}, else none)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="chamber-atlas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trees", parents=[common], help="count or list alternating trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--positive", action="store_true")
    p.add_argument("--list", action="store_true", help="print every tree")

    p = sub.add_parser("chambers", parents=[common], help="enumerate arrangement chambers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", choices=["resonance", "threshold"], default="resonance")
    p.add_argument("--positive", action="store_true", help="keep chambers inside the positive root cone")
    p.add_argument("--census", action="store_true", help="also count walls per hyperplane")
    p.add_argument("--dump", action="store_true", help="print every chamber")

    p = sub.add_parser("graph", parents=[common], help="compatibility graph statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--positive", action="store_true")
    p.add_argument("--stats", action="store_true", help="summary only")
    p.add_argument("--dot", action="store_const", const="dot", dest="fmt", help="same as --format dot")

    p = sub.add_parser("report", parents=[common], help="reproduce the count tables")
    p.add_argument("--max-n", type=int, default=4)

    p = sub.add_parser("kostant", parents=[common], help="partition function values and chambers")
    p.add_argument("--value", help="netflow a1,a2,...")
    p.add_argument("--chambers", action="store_true", help="list Kostant chambers (needs --n)")
    p.add_argument("--n", type=int)
    p.add_argument("--fit", action="store_true", help="fit and verify the chamber polynomials")
    return parser


def make_config(args) -> RunConfig:
    cache = args.cache or (Path(os.environ[CACHE_ENV]) if os.environ.get(CACHE_ENV) else None)
    family = getattr(args, "family", None) or args.command
    cfg = RunConfig(
        command=args.command,
        n=getattr(args, "n", None),
        family=family,
        positive_only=getattr(args, "positive", False),
        fmt=args.fmt,
        out=args.out,
        threads=resolve_threads(args.threads),
        allow_large=args.allow_large,
        cache=cache,
    )
    cfg.validate()
    if args.command == "report" and not 1 <= args.max_n <= LIMITS["resonance"][args.allow_large]:
        raise BoundsError("report: --max-n out of range")
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        text = COMMANDS[cfg.command](cfg, args)
    except (BoundsError, DomainError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except (InvariantError, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 4
    except AtlasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.out is not None:
        cfg.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
