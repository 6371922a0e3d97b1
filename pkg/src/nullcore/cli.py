"""Command-line interface: ``nullcore decide | atlas | experiment | selftest``.

Exit codes: 0 core (or success), 1 non-core verdict, 2 operational error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import platform
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classes import DEFAULT_BUDGET, BudgetExceeded, InvariantViolation, invariant_factors
from .coreset import (
    CoreReport,
    is_core_factorwise,
    is_core_oracle,
    is_core_structural,
    is_pure_core,
)
from .experiments import (
    ATLAS_FIELDS,
    CSV_FIELDS,
    RandomSubsetModel,
    atlas_rows,
    bound_sweep,
    chernoff_tail_check,
    constant_prefixes,
    constant_bound_check,
    monte_carlo_pure_core,
)
from .field import GF, is_prime

EXIT_CORE, EXIT_NONCORE, EXIT_ERROR = 0, 1, 2


class InputError(ValueError):
    """Malformed input; the message names the offending position."""


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def make_manifest(argv, config: dict, seed=None, input_bytes: bytes | None = None, started=None) -> dict:
    return {
        "command": list(argv),
        "config_digest": _digest(json.dumps(config, sort_keys=True, default=str).encode()),
        "seed": seed,
        "versions": {
            "nullcore": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "started": started or _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "input_digest": None if input_bytes is None else _digest(input_bytes),
    }


def parse_matrix_set(doc) -> tuple[int, int, list[np.ndarray]]:
    """Validate {q, n, matrices} and return (q, n, matrices)."""
    if not isinstance(doc, dict):
        raise InputError("top level: expected an object with keys q, n, matrices")
    for key in ("q", "n", "matrices"):
        if key not in doc:
            raise InputError(f"top level: missing key {key!r}")
    q, n, mats = doc["q"], doc["n"], doc["matrices"]
    if not isinstance(q, int) or isinstance(q, bool) or not is_prime(q):
        raise InputError(f"q: {q!r} is not a prime")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError(f"n: {n!r} is not a positive integer")
    if not isinstance(mats, list):
        raise InputError("matrices: expected a list")
    out = []
    for k, M in enumerate(mats):
        where = f"matrices[{k}]"
        if not isinstance(M, list):
            raise InputError(f"{where}: expected a list")
        if len(M) == n * n and all(not isinstance(e, list) for e in M):
            rows = [M[i * n:(i + 1) * n] for i in range(n)]
            flat = True
        elif len(M) == n and all(isinstance(r, list) for r in M):
            rows = M
            flat = False
        else:
            raise InputError(f"{where}: expected {n} rows of {n} or {n * n} flat entries")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise InputError(f"{where}[{i}]: expected {n} entries, got {len(row)}")
            for j, e in enumerate(row):
                pos = f"{where}[{i * n + j}]" if flat else f"{where}[{i}][{j}]"
                if not isinstance(e, int) or isinstance(e, bool):
                    raise InputError(f"{pos}: {e!r} is not an integer")
                if not 0 <= e < q:
                    raise InputError(f"{pos}: entry {e} outside [0, {q})")
        out.append(np.array(rows, dtype=np.int64))
    return q, n, out


def _emit(obj, out_path: str | None):
    text = json.dumps(obj, indent=2, default=str) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in fields})
    return buf.getvalue()


def cmd_decide(args, argv) -> int:
    raw = Path(args.input).read_bytes() if args.input != "-" else sys.stdin.buffer.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    q, n, mats = parse_matrix_set(doc)
    manifest = make_manifest(argv, vars(args), input_bytes=raw)
    if args.method == "pure":
        rep = is_pure_core(q, mats)
        _emit({"manifest": manifest, "pure_core": rep.to_dict()}, args.out)
        return EXIT_CORE if rep.pure else EXIT_NONCORE
    if not mats:
        raise InputError("matrices: the set must be nonempty")
    methods = {
        "oracle": is_core_oracle,
        "factorwise": is_core_factorwise,
        "structural": is_core_structural,
    }
    if args.method == "all":
        chosen = ["oracle", "factorwise"]
        if len({invariant_factors(GF(q), A) for A in mats}) == 1:
            chosen.append("structural")
    else:
        chosen = [args.method]
    reports: dict[str, CoreReport] = {m: methods[m](q, mats) for m in chosen}
    verdicts = {m: r.verdict for m, r in reports.items()}
    if len(set(verdicts.values())) != 1:
        raise InvariantViolation(f"methods disagree: {verdicts}")
    primary = reports[chosen[0]]
    body = {}
    for m, r in reports.items():
        d = r.to_dict()
        if not args.witness:
            d.pop("witness")
        body[m] = d
    _emit({"manifest": manifest, "n": n, "verdict": primary.verdict, "reports": body}, args.out)
    return EXIT_CORE if primary.is_core else EXIT_NONCORE


def cmd_atlas(args, argv) -> int:
    rows = atlas_rows(args.n, args.q, args.budget, bounds=args.bounds)
    if not args.factor_stats:
        keep = ["class", "mu", "class_size", "factor", "multiplicity", "trap_coordinate", "trap_max", "bound_4C_over_q"]
        rows = [{k: r[k] for k in keep} for r in rows]
        fields = keep
    else:
        fields = ATLAS_FIELDS
    manifest = make_manifest(argv, vars(args))
    if args.format == "csv":
        text = _csv_text(rows, fields)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit({"manifest": manifest, "n": args.n, "q": args.q, "rows": rows}, args.out)
    return EXIT_CORE


def _write_outputs(prefix: str | None, rows: list[dict], fields: list[str], payload: dict):
    if prefix:
        Path(prefix + ".csv").write_text(_csv_text(rows, fields))
        Path(prefix + ".json").write_text(json.dumps(payload, indent=2, default=str) + "\n")
    sys.stdout.write(_csv_text(rows, fields))


def cmd_experiment(args, argv) -> int:
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    t0 = time.perf_counter()
    if args.kind == "montecarlo":
        seed = args.seed
        if seed is None:
            seed = secrets.randbits(63)
            print(f"seed: {seed}", file=sys.stderr)
        rows = []
        for q in args.q:
            model = RandomSubsetModel(q=q, n=args.n, density=args.density, seed=seed, trials=args.trials)
            rows.append(monte_carlo_pure_core(model, args.budget).to_dict())
        fields = CSV_FIELDS
    elif args.kind == "chernoff":
        seed = None
        rows = []
        for N in args.N:
            for c in args.c:
                tail, bound = chernoff_tail_check(N, c)
                rows.append({"N": N, "c": c, "exact_tail": float(tail), "bound": bound, "ok": True})
        fields = ["N", "c", "exact_tail", "bound", "ok"]
    elif args.kind == "constant":
        seed = None
        rows = []
        for q in args.q:
            if q == 2:
                constant_bound_check(q, args.terms)
            for k, v in enumerate(constant_prefixes(q, args.terms), 1):
                rows.append({"q": q, "terms": k, "value": f"{float(v):.10f}", "exact": str(v)})
        fields = ["q", "terms", "value", "exact"]
    elif args.kind == "bounds":
        seed = None
        rows = []
        for q in args.q:
            sweep = bound_sweep(args.n, q, args.budget)
            for r in sweep.rows:
                rows.append(
                    {
                        "n": args.n,
                        "q": q,
                        "class": r.cls,
                        "factor": r.factor,
                        "class_size": r.class_size,
                        "trap_coordinate": r.coordinate_trap,
                        "trap_max": r.max_trap,
                        "max_noncore": r.max_noncore,
                        "bound": str(r.bound),
                        "ok": r.ok,
                        "partial": sweep.partial,
                    }
                )
        fields = ["n", "q", "class", "factor", "class_size", "trap_coordinate", "trap_max", "max_noncore", "bound", "ok", "partial"]
    else:  # argparse restricts choices
        raise InputError(f"unknown experiment {args.kind!r}")
    manifest = make_manifest(argv, vars(args), seed=seed, started=started)
    manifest["wall_seconds"] = round(time.perf_counter() - t0, 3)
    _write_outputs(args.out, rows, fields, {"manifest": manifest, "rows": rows})
    if args.kind == "bounds" and any(not r["ok"] for r in rows):
        return EXIT_NONCORE
    return EXIT_CORE


def cmd_selftest(args, argv) -> int:
    from .selftest import run

    return EXIT_CORE if run(verbose=True) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullcore", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", help="decide whether a set of matrices is a core set")
    d.add_argument("input", help="JSON file {q, n, matrices}, or - for stdin")
    d.add_argument("--method", choices=["oracle", "structural", "factorwise", "all", "pure"], default="oracle")
    d.add_argument("--witness", action="store_true", help="include the non-core witness")
    d.add_argument("--out", help="write JSON here instead of stdout")
    d.set_defaults(func=cmd_decide)

    a = sub.add_parser("atlas", help="per-class, per-factor statistics for M_n(F_q)")
    a.add_argument("n", type=int)
    a.add_argument("q", type=int)
    a.add_argument("--factor-stats", action="store_true", help="bucket counts and counting formulas")
    a.add_argument("--bounds", action="store_true", help="trap counts against 4|C|/q")
    a.add_argument("--format", choices=["json", "csv"], default="json")
    a.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    a.add_argument("--out")
    a.set_defaults(func=cmd_atlas)

    e = sub.add_parser("experiment", help="montecarlo | chernoff | constant | bounds")
    e.add_argument("kind", choices=["montecarlo", "chernoff", "constant", "bounds"])
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--q", type=int, nargs="+", default=[2, 3, 5, 7])
    e.add_argument("--trials", type=int, default=2000)
    e.add_argument("--density", type=float, default=0.5)
    e.add_argument("--seed", type=int)
    e.add_argument("--N", type=int, nargs="+", default=[100])
    e.add_argument("--c", type=float, nargs="+", default=[0.5])
    e.add_argument("--terms", type=int, default=30)
    e.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    e.add_argument("--out", help="path prefix for <prefix>.csv and <prefix>.json")
    e.set_defaults(func=cmd_experiment)

    s = sub.add_parser("selftest", help="run the built-in invariant checks")
    s.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_CORE
    if getattr(args, "q", None) is not None and args.command != "decide":
        qs = args.q if isinstance(args.q, list) else [args.q]
        bad = [q for q in qs if not is_prime(q)]
        if bad:
            print(f"error: q={bad[0]} is not prime", file=sys.stderr)
            return EXIT_ERROR
    try:
        return args.func(args, ["nullcore", *argv])
    except (InputError, ValueError, BudgetExceeded, InvariantViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
