"""Command-line entry point: ``sparsepart <verb> ...``.

Exit status 0 means success, 1 means a definite negative outcome (the
``status`` field names it), 2 means bad input or configuration.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .graph import Graph, format_edge_list, gen_sparse, girth, parse_edge_list, subdivide
from .mad import mad_exact
from .partition import (
    ColoringFormatError,
    PartitionSpec,
    exact_solve,
    format_coloring,
    parse_coloring,
    verify,
)

PRNG_ID = "python-random-mt19937"

OK = "OK"
REASONS = ("VIOLATION", "UNSATISFIABLE", "NOT_APPLICABLE", "EXHAUSTED", "ROLE_VIOLATED", "NOT_FOUND")


class ConfigError(Exception):
    """Bad arguments or unreadable input (exit 2)."""


# -- helpers ------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    _atomic_write(Path(path), text)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _graph(path: str) -> Graph:
    try:
        return parse_edge_list(_read(path))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _spec(text: str) -> PartitionSpec:
    try:
        return PartitionSpec.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a fraction: {text!r}") from exc


def _colors(c) -> list:
    return [None if x is None else x.value for x in c]


def emit(payload: dict, fmt: str, text_lines: list[str] | None = None, tsv: str | None = None) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    elif fmt == "tsv":
        if tsv is None:
            keys = [k for k in payload if not isinstance(payload[k], (list, dict))]
            tsv = "\t".join(keys) + "\n" + "\t".join(str(payload[k]) for k in keys) + "\n"
        sys.stdout.write(tsv)
    else:
        lines = text_lines if text_lines is not None else [f"{k}: {v}" for k, v in payload.items()]
        sys.stdout.write("\n".join(lines) + "\n")


# -- verbs -------------------------------------------------------------------------


def cmd_mad(a) -> dict:
    g = _graph(a.graph)
    value, witness = mad_exact(g)
    payload = {
        "status": OK,
        "mad": f"{value.numerator}/{value.denominator}",
        "witness": sorted(witness),
        "n": g.n,
        "m": g.m,
    }
    emit(payload, a.format, [f"mad = {payload['mad']}"])
    return payload


def _solve(g: Graph, a):
    """(status, coloring or None, extra payload)"""
    spec = _spec(a.spec)
    method = a.method
    extra: dict = {"method": method, "spec": str(spec)}
    if method == "exact":
        c = exact_solve(g, spec, max_nodes=a.max_nodes)
        return ("UNSATISFIABLE" if c is None else OK), c, extra
    if method == "thm1":
        from .thm1 import NotApplicable, solve_io3

        if spec != PartitionSpec.order(3):
            raise ConfigError("method thm1 produces (I, O3) partitions; use --spec o3")
        out = solve_io3(g)
        if isinstance(out, NotApplicable):
            extra["residual_vertices"] = list(out.residual_ids)
            return "NOT_APPLICABLE", None, extra
        return OK, out, extra
    from .thm2 import Exhausted, solve_iok

    if spec.family != "order":
        raise ConfigError("method thm2 produces (I, O_k) partitions; use --spec o<k>")
    out = solve_iok(g, spec.k, oracle_policy=a.oracle)
    if isinstance(out, Exhausted):
        extra["reason"] = out.reason
        extra["core_vertices"] = list(out.core_ids)
        if a.state_out:
            _atomic_write(Path(a.state_out), json.dumps(out.state.to_dict(), sort_keys=True) + "\n")
        return "EXHAUSTED", None, extra
    return OK, out, extra


def cmd_solve(a) -> dict:
    g = _graph(a.graph)
    if a.k is not None:
        fam = _spec(a.spec).family
        a.spec = ("o" if fam == "order" else "p") + str(a.k)
    status, c, extra = _solve(g, a)
    payload = {"status": status, **extra}
    if c is not None:
        payload["coloring"] = _colors(c)
        if a.output:
            _write(a.output, format_coloring(c))
    if a.format == "text":
        if c is not None and not a.output:
            sys.stdout.write(format_coloring(c))
        else:
            emit(payload, "text", [f"status: {status}"] + (
                [f"coloring written to {a.output}"] if c is not None else []
            ))
    elif a.format == "tsv":
        rows = ["vertex\tcolor"] + [f"{v}\t{x}" for v, x in enumerate(_colors(c))] if c else None
        emit(payload, "tsv", tsv=None if rows is None else "\n".join(rows) + "\n")
    else:
        emit(payload, "json")
    return payload


def cmd_verify(a) -> dict:
    g = _graph(a.graph)
    spec = _spec(a.spec)
    try:
        c = parse_coloring(_read(a.coloring), g.n)
    except ColoringFormatError as exc:
        raise ConfigError(str(exc)) from exc
    problem = verify(g, c, spec)
    if problem is None:
        payload = {"status": OK, "spec": str(spec)}
        emit(payload, a.format, ["valid"])
    else:
        payload = {
            "status": "VIOLATION",
            "spec": str(spec),
            "kind": problem.kind.value,
            "witness": sorted(problem.witness),
        }
        emit(payload, a.format, [f"status: VIOLATION", f"kind: {problem.kind.value}",
                                 "witness: " + " ".join(map(str, sorted(problem.witness)))])
    return payload


def cmd_gen(a) -> dict:
    cap = _fraction(a.mad_cap)
    graphs = []
    rng = random.Random(a.seed)
    for i in range(a.count):
        n = a.n if a.n is not None else rng.randint(a.n_min, a.n_max)
        seed = a.seed if a.count == 1 else rng.randrange(2**32)
        g = gen_sparse(n, cap, seed)
        head = [f"prng={PRNG_ID} seed={seed} mad_cap={cap}"]
        text = format_edge_list(g, head)
        if a.out_dir:
            _atomic_write(Path(a.out_dir) / f"graph_{i:04d}.edges", text)
        graphs.append({"n": g.n, "m": g.m, "seed": seed})
    payload = {"status": OK, "prng": PRNG_ID, "seed": a.seed, "graphs": graphs}
    if a.out_dir or a.format != "text":
        emit(payload, a.format, [f"prng: {PRNG_ID}", f"wrote {len(graphs)} graphs to {a.out_dir}"],
             tsv="n\tm\tseed\n" + "".join(f"{x['n']}\t{x['m']}\t{x['seed']}\n" for x in graphs))
    else:
        sys.stdout.write(text)
    return payload


def cmd_subdivide(a) -> dict:
    g = _graph(a.graph)
    if a.t < 0:
        raise ConfigError("--t must be non-negative")
    h = subdivide(g, a.t)
    gi = girth(h)
    comments = [f"subdivided t={a.t}"] + ([f"girth={gi}"] if gi != float("inf") else [])
    text = format_edge_list(h, comments)
    _write(a.output, text)
    return {"status": OK, "n": h.n, "m": h.m}


# hardness verbs


def _load_catalog(directory: str | None):
    from .hardness import Gadget, certify_gadget

    out = []
    if directory is None:
        return out
    d = Path(directory)
    if not d.is_dir():
        raise ConfigError(f"catalog directory {directory} does not exist")
    for p in sorted(d.glob("*.json")):
        try:
            gd = Gadget.from_dict(json.loads(p.read_text()))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{p}: {exc}") from exc
        # certificates are recomputed, never trusted from disk
        certify_gadget(gd, gd.spec, limit=max(gd.graph.n, 30))
        out.append(gd)
    return out


def _store(directory: str, gadget) -> Path:
    body = json.dumps(gadget.to_dict(), sort_keys=True)
    digest = hashlib.sha256(body.encode()).hexdigest()[:12]
    path = Path(directory) / f"{gadget.role}_{gadget.spec}_{digest}.json"
    if not path.exists():
        _atomic_write(path, body + "\n")
    return path


def cmd_reduce_sat(a) -> dict:
    from .hardness import CnfError, build_reduction, default_catalog, soundness_check
    from .hardness import parse_dimacs_cnf, BadSpec, MissingGadget

    spec = _spec(a.spec)
    try:
        K = parse_dimacs_cnf(_read(a.cnf), relaxed=a.relaxed)
    except CnfError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    try:
        catalog = _load_catalog(a.catalog) if a.catalog else default_catalog(spec, a.seed)
        R = build_reduction(K, catalog, spec)
    except (BadSpec, MissingGadget) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    comments = [f"reduction of a {K.variable_count}-variable instance, spec {spec}"]
    if K.claimed_planar:
        comments.append("planar=1 (claimed, not verified)")
    if a.output:
        _write(a.output, format_edge_list(R.graph, comments))
    payload = {"status": OK, **R.summary()}
    if a.check:
        payload["sound"] = soundness_check(K, R, spec)
        if not payload["sound"]:
            payload["status"] = "VIOLATION"
    emit(payload, a.format)
    return payload


def cmd_certify_gadget(a) -> dict:
    from .hardness import Gadget, RoleViolated, TooLarge, certify_gadget

    try:
        gd = Gadget.from_dict(json.loads(_read(a.gadget)))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"{a.gadget}: {exc}") from exc
    spec = _spec(a.spec) if a.spec else gd.spec
    try:
        cert = certify_gadget(gd, spec, limit=a.limit)
    except TooLarge as exc:
        raise ConfigError(str(exc)) from exc
    except RoleViolated as exc:
        payload = {"status": "ROLE_VIOLATED", "role": gd.role, "message": str(exc)}
        if exc.counterexample is not None:
            payload["counterexample"] = _colors(exc.counterexample)
        emit(payload, a.format)
        return payload
    payload = {"status": OK, **cert.to_dict()}
    emit(payload, a.format, [f"status: OK", f"role: {gd.role}", f"spec: {spec}"]
         + [f"{k}: {v}" for k, v in cert.facts])
    return payload


def cmd_mine_gadget(a) -> dict:
    from .hardness import NotFound, mine_gadget

    spec = _spec(a.spec)
    force_o = None
    if a.role == "Transmitter" and a.catalog:
        force_o = next((g for g in _load_catalog(a.catalog) if g.role == "ForceO" and g.spec == spec), None)
    out = mine_gadget(a.role, spec, a.girth, a.degree_cap, a.max_n, a.budget, a.seed, force_o)
    if isinstance(out, NotFound):
        payload = {"status": "NOT_FOUND", "role": a.role, "reason": out.reason, "tried": out.candidates_tried}
        emit(payload, a.format)
        return payload
    payload = {"status": OK, "gadget": out.to_dict()}
    if a.catalog:
        payload["path"] = str(_store(a.catalog, out))
    if a.format == "text":
        sys.stdout.write(json.dumps(out.to_dict(), sort_keys=True, indent=1) + "\n")
    else:
        emit(payload, a.format)
    return payload


# discharging and benchmarking


def cmd_audit_discharge(a) -> dict:
    if a.state:
        from .thm2 import DischargeParams, PreconditionViolated, RepairState, discharge_thm2

        try:
            st = RepairState.from_dict(json.loads(_read(a.state)))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{a.state}: {exc}") from exc
        k = a.k if a.k is not None else st.k
        try:
            ledger = discharge_thm2(st.g, st, DischargeParams(k))
        except PreconditionViolated as exc:
            raise ConfigError(str(exc)) from exc
        label = f"k={k}"
    elif a.graph:
        from .thm1 import PreconditionViolated, audit_charges_thm1

        g = _graph(a.graph)
        try:
            ledger = audit_charges_thm1(g)
        except PreconditionViolated as exc:
            raise ConfigError(str(exc)) from exc
        label = "O3 residual"
    else:
        raise ConfigError("give --state (repair state JSON) or --graph (irreducible graph)")
    bad = ledger.violations()
    ok = not bad and ledger.conserved() and not ledger.problems
    payload = {
        "status": OK if ok else "VIOLATION",
        "total": str(ledger.total()),
        "conserved": ledger.conserved(),
        "negative": bad,
        "problems": list(ledger.problems),
        "final": {str(v): str(x) for v, x in sorted(ledger.final.items())},
    }
    if a.figures:
        from .report import charge_figure

        Path(a.figures).mkdir(parents=True, exist_ok=True)
        payload["figure"] = str(charge_figure(ledger, Path(a.figures) / "charges.png", f"final charges, {label}"))
    if a.transfers:
        _write(a.transfers, ledger.transfers_tsv())
    emit(payload, a.format, [f"status: {payload['status']}", f"total: {payload['total']}",
                             f"conserved: {payload['conserved']}",
                             "negative: " + (" ".join(map(str, bad)) or "none")],
         tsv=ledger.to_tsv())
    return payload


def _bench_one(job):
    method, k, n, seed, cap = job
    from .thm1 import NotApplicable, solve_io3
    from .thm2 import Exhausted, solve_iok

    g = gen_sparse(n, cap, seed)
    t = time.perf_counter()
    if method == "thm1":
        out = solve_io3(g)
        status = "NOT_APPLICABLE" if isinstance(out, NotApplicable) else OK
    elif method == "thm2":
        out = solve_iok(g, k)
        status = "EXHAUSTED" if isinstance(out, Exhausted) else OK
    else:
        out = exact_solve(g, PartitionSpec.order(k))
        status = "UNSATISFIABLE" if out is None else OK
    return {"method": method, "k": k, "n": n, "m": g.m, "seed": seed,
            "seconds": round(time.perf_counter() - t, 6), "status": status}


def cmd_bench(a) -> dict:
    methods = [m.strip() for m in a.methods.split(",") if m.strip()]
    for m in methods:
        if m not in ("thm1", "thm2", "exact"):
            raise ConfigError(f"unknown method {m!r}")
    if a.n_min < 3 or a.n_max < a.n_min:
        raise ConfigError("need 3 <= --n-min <= --n-max")
    rng = random.Random(a.seed)
    jobs = []
    for _ in range(a.count):
        n = rng.randint(a.n_min, a.n_max)
        seed = rng.randrange(2**32)
        for m in methods:
            k = 3 if m == "thm1" else a.k
            cap = Fraction(5, 2) if m == "thm1" else Fraction(8 * k, 3 * k + 1)
            jobs.append((m, k, n, seed, cap))
    if a.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(a.workers) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    cols = ["method", "k", "n", "m", "seed", "seconds", "status"]
    tsv = f"# prng={PRNG_ID} seed={a.seed}\n" + "\t".join(cols) + "\n"
    tsv += "".join("\t".join(str(r[c]) for c in cols) + "\n" for r in rows)
    payload = {"status": OK, "prng": PRNG_ID, "seed": a.seed, "rows": rows}
    if a.figures:
        from .report import bench_figure

        Path(a.figures).mkdir(parents=True, exist_ok=True)
        payload["figure"] = str(bench_figure(rows, Path(a.figures) / "bench.png"))
    if a.format == "json":
        emit(payload, "json")
    else:
        sys.stdout.write(tsv)
    return payload


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "tsv"), default="text")
    common.add_argument("--seed", type=int, default=0, help=f"seed for {PRNG_ID}")
    common.add_argument("--workers", type=int, default=1)

    p = argparse.ArgumentParser(prog="sparsepart", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("mad", parents=[common], help="exact maximum average degree")
    s.add_argument("graph")
    s.set_defaults(func=cmd_mad)

    s = sub.add_parser("solve", parents=[common], help="find a partition")
    s.add_argument("graph")
    s.add_argument("--spec", default="o3")
    s.add_argument("--k", type=int, help="override the k of --spec")
    s.add_argument("--method", choices=("thm1", "thm2", "exact"), default="exact")
    s.add_argument("--oracle", choices=("exact", "recursive"), default="exact")
    s.add_argument("--max-nodes", type=int)
    s.add_argument("--output", "-o")
    s.add_argument("--state-out", help="write the repair state here when thm2 gets stuck")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="check a colouring")
    s.add_argument("graph")
    s.add_argument("coloring")
    s.add_argument("--spec", default="o3")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("gen", parents=[common], help="random connected graph with mad below a cap")
    s.add_argument("--n", type=int)
    s.add_argument("--n-min", type=int, default=5)
    s.add_argument("--n-max", type=int, default=40)
    s.add_argument("--mad-cap", default="5/2")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("subdivide", parents=[common], help="replace each edge by a path")
    s.add_argument("graph")
    s.add_argument("--t", type=int, default=1, help="new vertices per edge")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_subdivide)

    s = sub.add_parser("reduce-sat", parents=[common], help="build the reduction graph of a CNF")
    s.add_argument("cnf")
    s.add_argument("--spec", default="p3")
    s.add_argument("--catalog", help="gadget catalog directory (mined when omitted)")
    s.add_argument("--relaxed", action="store_true", help="allow 1-literal clauses and fewer occurrences")
    s.add_argument("--check", action="store_true", help="compare satisfiability with partitionability")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_reduce_sat)

    s = sub.add_parser("certify-gadget", parents=[common], help="exhaustively certify a gadget")
    s.add_argument("gadget")
    s.add_argument("--spec")
    s.add_argument("--limit", type=int, default=30)
    s.set_defaults(func=cmd_certify_gadget)

    s = sub.add_parser("mine-gadget", parents=[common], help="search for a certified gadget")
    s.add_argument("--role", choices=("ForceI", "ForceO", "Transmitter"), required=True)
    s.add_argument("--spec", default="p3")
    s.add_argument("--girth", type=int, default=3)
    s.add_argument("--degree-cap", type=int)
    s.add_argument("--max-n", type=int, default=None)
    s.add_argument("--budget", type=int)
    s.add_argument("--catalog", help="append the result to this directory")
    s.set_defaults(func=cmd_mine_gadget)

    s = sub.add_parser("audit-discharge", parents=[common], help="replay a discharging argument")
    s.add_argument("--state", help="repair state JSON written by solve --state-out")
    s.add_argument("--graph", help="irreducible graph for the O3 argument")
    s.add_argument("--k", type=int)
    s.add_argument("--transfers", help="write every transfer as TSV here")
    s.add_argument("--figures", help="directory for PNG figures")
    s.set_defaults(func=cmd_audit_discharge)

    s = sub.add_parser("bench", parents=[common], help="time the solvers on generated graphs")
    s.add_argument("--methods", default="thm1,thm2")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--n-min", type=int, default=5)
    s.add_argument("--n-max", type=int, default=30)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--figures", help="directory for PNG figures")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("error: CONFIG_ERROR --workers must be positive", file=sys.stderr)
        return 2
    try:
        payload = args.func(args)
    except ConfigError as exc:
        print(f"error: CONFIG_ERROR {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: IO_ERROR {exc}", file=sys.stderr)
        return 2
    return 0 if payload.get("status") == OK else 1


if __name__ == "__main__":
    sys.exit(main())
