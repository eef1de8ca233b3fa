"""Command-line entry point.

    geoprox verify   --instance F --law cat0-four-point [--expect-fail [LAW]] ...
    geoprox solve    --instance F --map P --x0 '[-2, 1]' --eps 1e-9
    geoprox section5 --dim 8 --samples 10000
    geoprox extents  --instance F [--pair NAME]
    geoprox project  --instance F --set A --x0 '[0, 2]'

Exit status: 0 success, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

from . import sets as cs
from .errors import GeoproxError, OutOfDomain, UnsupportedSpace, WrongMode
from .instance import load_instance
from .laws import LawId, verify_law
from .maps import check_rel_nonexpansive
from .pairs import is_proximal, pair_extents
from .section5 import build_instance, verify_section5
from .solvers import cyclic_iterate, midpoint_iterate
from .spaces import point_from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MAP_LAWS = ("rel-nonexpansive", "rel-nonexpansive-upgrade")


class UsageError(Exception):
    pass


def _emit(args, payload) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        if not args.no_timestamp:
            stamp = datetime.now(timezone.utc).isoformat()
            if isinstance(payload, dict):
                payload = {**payload, "timestamp": stamp}
            else:
                payload = [{**p, "timestamp": stamp} for p in payload]
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point(space, literal):
    try:
        obj = json.loads(literal)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--x0 is not valid JSON: {exc.msg}") from exc
    return point_from_json(space, obj)


def _threads():
    try:
        return max(1, int(os.environ.get("GEOPROX_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    expect_all = "*" in (args.expect_fail or [])
    expect = {e for e in (args.expect_fail or []) if e != "*"}
    names = list(args.law or [])
    names += [e for e in sorted(expect) if e not in names]
    explicit = bool(names)
    if not names:
        names = [law.value for law in LawId]
    tasks = []
    for name in names:
        if name in MAP_LAWS:
            for mname in (args.map or list(inst.maps)):
                tasks.append((name, mname))
        else:
            try:
                tasks.append((LawId.parse(name).value, None))
            except GeoproxError as exc:
                raise UsageError(str(exc)) from exc
    named_sets = list(inst.sets.values()) or None

    def run(task):
        name, mname = task
        if mname is not None:
            m = inst.map(mname)
            rep = check_rel_nonexpansive(m, args.samples, args.seed, args.tol,
                                         upgrade_mode=name.endswith("upgrade"), threads=1)
            out = rep.to_json()
            out["map"] = mname
            return out
        try:
            rep = verify_law(inst.space, name, args.samples, args.seed, args.tol, sets=named_sets, threads=1)
        except UnsupportedSpace as exc:
            if explicit:
                raise
            return {"law": name, "space": inst.space.kind, "skipped": str(exc)}
        return rep.to_json()

    workers = _threads()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, tasks))
    else:
        reports = [run(t) for t in tasks]
    ok = True
    for rep in reports:
        if "skipped" in rep:
            continue
        fail_expected = expect_all or rep["law"] in expect
        rep["expect_fail"] = fail_expected
        rep["ok"] = (rep["violations"] > 0) if fail_expected else (rep["violations"] == 0)
        ok &= rep["ok"]
    _emit(args, reports)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    m = inst.map(args.map)
    space = m.pair.space
    x0 = _point(space, args.x0) if args.x0 else space.decode(cs.candidates(space, m.pair.A)[0])
    mode = args.mode or m.mode
    try:
        if mode == "cyclic":
            tr = cyclic_iterate(m, x0, args.eps, args.max_iter)
        else:
            tr = midpoint_iterate(m, x0, args.eps, args.max_iter)
    except (WrongMode, OutOfDomain) as exc:
        print(f"geoprox: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "csv":
        _emit(args, tr.csv())
    elif args.format == "jsonl":
        _emit(args, tr.json_lines(space))
    else:
        out = tr.to_json(space)
        out["map"] = args.map
        out["mode"] = mode
        _emit(args, out)
    return EXIT_OK if tr.stopped_reason == "GapBelowEps" else EXIT_FAIL


def cmd_section5(args) -> int:
    if args.dim < 3:
        raise UsageError("--dim must be at least 3")
    rep = verify_section5(build_instance(args.dim), args.samples, args.seed, args.tol, remark=args.remark)
    _emit(args, rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_extents(args) -> int:
    inst = load_instance(args.instance)
    pair = inst.pair(args.pair)
    ext = pair_extents(pair)
    prox = is_proximal(pair, args.tol, extents=ext)
    out = {"extents": ext.to_json(pair.space), "proximal": prox.to_json(pair.space)}
    _emit(args, out)
    return EXIT_OK


def cmd_project(args) -> int:
    inst = load_instance(args.instance)
    if not args.x0:
        raise UsageError("project needs --x0")
    S = inst.set(args.set)
    space = inst.space
    x = _point(space, args.x0)
    p = cs.project(space, S, x, args.tol)
    d = float(space.dist(space.encode(x), space.encode(p))[0])
    _emit(args, {"point": space.point_to_json(space.encode(p)[0]), "dist": d,
                 "contains": cs.contains(space, S, x, args.tol)})
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)

    p = argparse.ArgumentParser(prog="geoprox", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run law checks on an instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--law", action="append", help="law name, repeatable (default: all)")
    v.add_argument("--expect-fail", action="append", nargs="?", const="*",
                   help="law expected to show violations; bare flag applies to every law")
    v.add_argument("--map", action="append", help="map for rel-nonexpansive checks, repeatable")
    v.add_argument("--samples", type=int, default=10_000)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", parents=[common], help="iterate a map from a starting point")
    s.add_argument("--instance", required=True)
    s.add_argument("--map")
    s.add_argument("--x0", help="JSON point literal (default: first structured point of A)")
    s.add_argument("--mode", choices=["cyclic", "noncyclic"])
    s.add_argument("--eps", type=float, default=1e-9)
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--format", choices=["json", "jsonl", "csv"], default="json")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("section5", parents=[common], help="reproduce the max-norm counterexample")
    f.add_argument("--dim", type=int, default=8)
    f.add_argument("--samples", type=int, default=10_000)
    f.add_argument("--remark", action="store_true", help="also report the polytope subpair")
    f.set_defaults(func=cmd_section5)

    e = sub.add_parser("extents", parents=[common], help="dist and diameter of a pair")
    e.add_argument("--instance", required=True)
    e.add_argument("--pair")
    e.set_defaults(func=cmd_extents)

    q = sub.add_parser("project", parents=[common], help="project a point onto a named set")
    q.add_argument("--instance", required=True)
    q.add_argument("--set", required=True)
    q.add_argument("--x0")
    q.set_defaults(func=cmd_project)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, OSError, GeoproxError) as exc:
        print(f"geoprox: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
