"""``oddcolor`` command line.

Exit codes: 0 success with all checks passing, 1 verification violations
(the report is still written), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import resources

from . import __version__, kernels
from .graph import BIPARTITE, ColoringFormatError, read_coloring, write_coloring

SCHEMA_ID = "report-v1"


class UsageError(Exception):
    pass


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_schema() -> dict:
    return json.loads(resources.files("oddcolor").joinpath("schemas/report-v1.json").read_text())


def _manifest(args, seeds, inputs, outputs, t0) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return {
        "subcommand": args.command,
        "params": params,
        "seeds": seeds,
        "version": __version__,
        "backend": kernels.BACKEND,
        "inputs": {p: sha256_file(p) for p in inputs},
        "outputs": {p: sha256_file(p) for p in outputs},
        "wall_time": round(time.perf_counter() - t0, 6),
    }


def _emit(args, ok, result, seeds, inputs, outputs, t0, report_path=None):
    doc = {
        "schema": SCHEMA_ID,
        "subcommand": args.command,
        "ok": bool(ok),
        "result": result,
        "manifest": _manifest(args, seeds, inputs, outputs, t0),
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if report_path:
        with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return doc


def _load(path):
    try:
        return read_coloring(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except ColoringFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


# -- subcommands ---------------------------------------------------------------

def cmd_cfls(args, t0):
    from .cfls import build_cfls_coloring, side_table_comments, tuple_space_size

    try:
        col, table = build_cfls_coloring(args.m, allow_large=args.allow_large)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_coloring(col, args.out, comments=side_table_comments(table))
    result = {"m": args.m, "n": col.host.n, "edges": col.host.num_edges,
              "colors": col.num_colors, "tuple_space": tuple_space_size(args.m)}
    print(f"cfls m={args.m}: n={col.host.n} t={col.num_colors} -> {args.out}")
    _emit(args, True, result, [], [], [args.out], t0, args.report)
    return 0


def _parse_check(text):
    if text in ("k5odd", "k4odd", "patterns", "leftover", "c4odd"):
        return text, None
    if text.startswith("mincolors:"):
        try:
            p, q = (int(v) for v in text.split(":", 1)[1].split(","))
            return "mincolors", (p, q)
        except ValueError:
            pass
    raise UsageError(f"bad --check {text!r}")


def cmd_verify(args, t0):
    from . import verify as V

    check, pq = _parse_check(args.check)
    try:
        mode = V.parse_mode(args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    col = _load(args.coloring)
    kw = dict(threads=args.threads, limit=args.limit)
    try:
        if check == "c4odd":
            if mode.kind != "exhaustive":
                raise UsageError("c4odd supports exhaustive mode only")
            reps = [V.scan_c4_odd(col, threads=args.threads, limit=args.limit)]
        elif col.host.kind == BIPARTITE:
            raise UsageError(f"--check {check} needs a complete-graph coloring")
        elif check in ("k5odd", "k4odd"):
            reps = [V.scan_cliques_odd(col, 5 if check == "k5odd" else 4, mode, force=args.force, **kw)]
        elif check == "mincolors":
            reps = [V.scan_min_colors(col, pq[0], pq[1], mode, force=args.force, **kw)]
        elif check == "patterns":
            specs = V.builtin_patterns() + [V.fig3c_contextual()]
            reps = [V.match_pattern(col, s, mode, force=args.force, **kw) for s in specs]
        else:  # leftover
            reps = [_leftover_check(col, mode, args)]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    informational = {"fig3c"} if check == "patterns" else set()
    ok = all(r.ok for r in reps if r.check not in informational)
    result = {"check": args.check, "reports": [r.to_dict() for r in reps],
              "informational": sorted(informational)}
    for r in reps:
        tag = " (informational)" if r.check in informational else ""
        print(f"{r.check}: checked={r.checked} violations={r.num_violations}{tag}")
    seeds = [mode.seed] if mode.seed is not None else []
    _emit(args, ok, result, seeds, [args.coloring], [], t0, args.report)
    return 0 if ok else 1


def _leftover_check(col, mode, args):
    from . import verify as V

    rep = V.scan_min_colors(col, 5, 5, mode, threads=args.threads, limit=10 ** 6, force=args.force)
    four = [v for v in rep.violations if len(v["colors"]) == 4]
    bad = []
    for v in four:
        ok, _ = V.is_leftover(col, v["vertices"])
        if not ok:
            bad.append({"vertices": v["vertices"], "colors": v["colors"]})
    out = V.ViolationReport("leftover", rep.mode, len(four), len(bad), bad[: args.limit],
                            rep.elapsed, rep.backend, {"k5_scanned": rep.checked,
                                                       "four_color_k5": len(four)})
    return out


def cmd_exact_g(args, t0):
    from .exact import get_pattern, min_colors_odd, parse_host

    try:
        host = parse_host(args.host)
        pat = get_pattern(args.pattern)
        res = min_colors_odd(host, pat, args.kmax, max_edges=args.max_edges, force=args.force)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    outputs = []
    if args.witness_out and res.witness is not None:
        write_coloring(res.witness, args.witness_out)
        outputs.append(args.witness_out)
    print(f"g({host.spec()}, {pat.name}): {res.to_dict()['result']}")
    _emit(args, True, res.to_dict(), [], [], outputs, t0, args.report)
    return 0


def cmd_knn(args, t0):
    from .knn import Stage2Config, build_knn_coloring

    try:
        cfg = Stage2Config(delta=args.delta, palette=args.palette, max_rounds=args.max_rounds,
                           growth=args.growth, seed=args.seed)
        col, stats = build_knn_coloring(args.n, cfg, max_failures=args.max_failures,
                                        verify=not args.no_verify, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    outputs = []
    if args.out:
        write_coloring(col, args.out)
        outputs.append(args.out)
    ok = stats.get("c4_violations", 0) == 0
    print(f"knn n={args.n} seed={args.seed}: total colors {stats['total_colors']} "
          f"(stage 1 {stats['stage1_colors_used']}, palette {stats['palette']}), "
          f"C4 violations {stats.get('c4_violations', 'not checked')}")
    _emit(args, ok, stats, [args.seed], [], outputs, t0, args.stats)
    return 0 if ok else 1


def cmd_code(args, t0):
    from .code import certify_h_code

    col = _load(args.coloring)
    try:
        rep = certify_h_code(col, args.pattern)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"code {rep.pattern}: certified={rep.certified} rank={rep.rank} t={rep.colors} "
          f"density >= 2^{rep.log2_density}")
    _emit(args, rep.certified, rep.to_dict(), [], [args.coloring], [], t0, args.report)
    return 0 if rep.certified else 1


def cmd_hcode_max(args, t0):
    from .code import max_h_code_exact

    try:
        res = max_h_code_exact(args.n, args.pattern, time_limit=args.time_limit)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if res.exact:
        print(f"D_{res.pattern}({res.n}) = {res.lower}")
    else:
        print(f"D_{res.pattern}({res.n}) in [{res.lower}, {res.upper}] (time limit hit)")
    _emit(args, True, res.to_dict(), [], [], [], t0, args.report)
    return 0


# -- parser ----------------------------------------------------------------------

def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="cap on scan threads (default: available cores)")
    p = argparse.ArgumentParser(prog="oddcolor", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cfls", parents=[common], help="build the CFLS coloring of K_{2^(m^2)}")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--allow-large", action="store_true")
    s.add_argument("--report")
    s.set_defaults(func=cmd_cfls)

    s = sub.add_parser("verify", parents=[common], help="scan a coloring file")
    s.add_argument("--coloring", required=True)
    s.add_argument("--check", required=True,
                   help="k5odd | k4odd | mincolors:p,q | patterns | leftover | c4odd")
    s.add_argument("--mode", default="exhaustive", help="exhaustive | sample:<seed>:<count>")
    s.add_argument("--report")
    s.add_argument("--limit", type=int, default=100, help="violations kept in the report")
    s.add_argument("--force", action="store_true", help="allow very large exhaustive scans")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("exact-g", parents=[common], help="exact g(G,H) by backtracking")
    s.add_argument("--host", required=True, help="K:<n> or B:<n>")
    s.add_argument("--pattern", required=True, help="C4 | K3 | K4 | K5")
    s.add_argument("--kmax", type=int, required=True)
    s.add_argument("--witness-out")
    s.add_argument("--max-edges", type=int, default=20)
    s.add_argument("--force", action="store_true")
    s.add_argument("--report")
    s.set_defaults(func=cmd_exact_g)

    s = sub.add_parser("knn", parents=[common], help="two-stage coloring of K_{n,n}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--delta", type=float, default=0.25)
    s.add_argument("--palette", type=int, default=None, help="initial fresh palette size")
    s.add_argument("--growth", type=float, default=2.0)
    s.add_argument("--max-rounds", type=int, default=None)
    s.add_argument("--max-failures", type=int, default=None)
    s.add_argument("--no-verify", action="store_true")
    s.add_argument("--out")
    s.add_argument("--stats")
    s.set_defaults(func=cmd_knn)

    s = sub.add_parser("code", parents=[common], help="certify the parity-kernel graph code")
    s.add_argument("--coloring", required=True)
    s.add_argument("--pattern", required=True, help="K4 | K5 | C4 | K3")
    s.add_argument("--report")
    s.set_defaults(func=cmd_code)

    s = sub.add_parser("hcode-max", parents=[common], help="exact maximum H-code on [n]")
    s.add_argument("--n", type=int, required=True, choices=[2, 3, 4, 5])
    s.add_argument("--pattern", required=True)
    s.add_argument("--time-limit", type=float, default=None)
    s.add_argument("--report")
    s.set_defaults(func=cmd_hcode_max)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    t0 = time.perf_counter()
    try:
        return args.func(args, t0)
    except UsageError as exc:
        print(f"oddcolor {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
