"""Command-line interface: ``rigikit <command> [options] [graph-file]``.

Graph files use the text format (``n m`` then ``u v`` lines) or JSON
(``{"n": .., "edges": [[u, v], ..]}``); ``-`` or no path reads stdin.
Exit codes: 0 verdict computed, 1 input error, 2 Unknown verdict,
3 internal invariant fault.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from multiprocessing import Pool

from . import certify, checker, corpus, oracle
from .builders import (
    ChainSpec,
    body_bar_graph,
    body_hinge_graph,
    k_chain,
    one_extension,
    standard_body_hinge_config,
    verify_standard_config_rigid,
    zero_extension,
)
from .certify import EngineOptions, Piece
from .errors import InputError, InvariantFault
from .graph_core import format_graph, is_k_connected, parse_graph
from .packing import (
    body_bar_rigid_check,
    body_hinge_global_check,
    body_hinge_rigid_check,
    TreePacking,
    tree_packing,
)
from .rigidity_alg import (
    PROBABLY_GR,
    generic_rank,
    ght_global_rigidity_test,
    is_redundantly_rigid,
    is_rigid,
    is_vertex_redundantly_rigid,
)
from .sparsity2d import (
    ear_decomposition,
    is_circuit_r2,
    is_laman_rigid,
    is_m_connected,
    m_components,
    pebble_rank,
)

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_FAULT = 0, 1, 2, 3


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("RIGIKIT_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"RIGIKIT_SEED must be an integer, got {env!r}") from None


def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(args, multi: bool = False):
    H = parse_graph(_read_text(args.input))
    return H if multi else H.simple()


def _opts(args) -> EngineOptions:
    return EngineOptions(depth=args.depth, node_budget=args.node_budget, trials=args.trials)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected a list of integers, got {text!r}") from None


# -- commands ---------------------------------------------------------------
# each returns (report dict, exit code)

def cmd_rank(args):
    G = _load(args)
    out = {"rank": generic_rank(G, args.dim, args.seed, args.trials)}
    if args.dim == 2:
        out["pebble_rank"] = pebble_rank(G)[0]
    return out, EXIT_OK


def cmd_rigid(args):
    G = _load(args)
    return {"rigid": is_rigid(G, args.dim, args.seed, args.trials)}, EXIT_OK


def cmd_redundant(args):
    G = _load(args)
    ok, e = is_redundantly_rigid(G, args.dim, args.seed, args.trials)
    return {"redundantly_rigid": ok, "witness_edge": None if e is None else list(e)}, EXIT_OK


def cmd_vredundant(args):
    G = _load(args)
    ok, v = is_vertex_redundantly_rigid(G, args.dim, args.seed, args.trials)
    return {"vertex_redundantly_rigid": ok, "witness_vertex": v}, EXIT_OK


def _need_plane(args):
    if args.dim != 2:
        raise InputError(f"{args.command} is a planar test; use --dim 2")


def cmd_laman(args):
    _need_plane(args)
    G = _load(args)
    rank, indep = pebble_rank(G)
    return {"laman_rigid": is_laman_rigid(G), "rank": rank, "independent": [list(e) for e in indep]}, EXIT_OK


def cmd_circuit(args):
    _need_plane(args)
    return {"circuit": is_circuit_r2(_load(args))}, EXIT_OK


def cmd_mcomp(args):
    _need_plane(args)
    G = _load(args)
    comps = m_components(G)
    return {
        "m_connected": is_m_connected(G),
        "components": [[list(e) for e in sorted(c)] for c in comps],
    }, EXIT_OK


def cmd_ears(args):
    _need_plane(args)
    G = _load(args)
    ears = ear_decomposition(G)
    rep = checker.verify_ear_decomposition(G, ears, args.seed)
    if not rep.ok:
        raise InvariantFault("ear decomposition failed verification: " + "; ".join(rep.messages))
    return {**ears.to_dict(), "verified": True}, EXIT_OK


def _verdict_report(v, extra=None):
    out = v.to_dict()
    out["rules"] = v.rules
    if extra:
        out.update(extra)
    return out, EXIT_UNKNOWN if v.status == certify.UNKNOWN else EXIT_OK


def cmd_global(args):
    G = _load(args)
    return _verdict_report(certify.global_rigidity_nd(G, args.dim, _opts(args), args.seed))


def cmd_certify(args):
    G = _load(args)
    v = certify.global_rigidity_nd(G, args.dim, _opts(args), args.seed)
    extra = {}
    rep = checker.verify_verdict(G, v)
    if not rep.ok:
        raise InvariantFault("certificate failed verification: " + "; ".join(rep.messages))
    extra["verified"] = True
    if args.deconstruct:
        _need_plane(args)
        if v.status != certify.GLOBALLY_RIGID:
            raise InputError("deconstruction needs a globally rigid graph")
        steps = certify.deconstruction_certificate_2d(G)
        drep = checker.verify_deconstruction(G, steps)
        if not drep.ok:
            raise InvariantFault("deconstruction failed verification: " + "; ".join(drep.messages))
        extra["deconstruction"] = [s.to_dict() for s in steps]
    return _verdict_report(v, extra)


def cmd_hendrickson(args):
    G = _load(args)
    return certify.hendrickson_check(G, args.dim, args.seed, args.trials).to_dict(), EXIT_OK


def cmd_pack(args):
    H = _load(args, multi=True)
    cert = tree_packing(H, args.trees)
    return {"packable": isinstance(cert, TreePacking), "certificate": cert.to_dict(H)}, EXIT_OK


def cmd_bodybar(args):
    H = _load(args, multi=True)
    if args.action == "build":
        return body_bar_graph(H, args.dim).to_dict(), EXIT_OK
    if args.action == "check":
        return {"rigid": (c := body_bar_rigid_check(H, args.dim)).ok, **c.to_dict()}, EXIT_OK
    return _verdict_report(certify.body_bar_verdict(H, args.dim, args.seed))


def cmd_bodyhinge(args):
    H = _load(args, multi=True)
    if args.action == "build":
        return body_hinge_graph(H, args.dim).to_dict(), EXIT_OK
    if args.action == "check":
        return {"rigid": (c := body_hinge_rigid_check(H, args.dim)).ok, **c.to_dict()}, EXIT_OK
    if args.action == "global":
        chk = body_hinge_global_check(H, args.dim)
        v = certify.body_hinge_verdict(H, args.dim, args.seed)
        out, code = _verdict_report(v)
        out["global"] = chk.ok
        return out, code
    edges = range(H.m) if args.edge is None else [args.edge]
    configs = []
    for e in edges:
        sc = standard_body_hinge_config(H, args.dim, e)
        configs.append({**sc.to_dict(), "infinitesimally_rigid": verify_standard_config_rigid(sc)})
    return {"configs": configs}, EXIT_OK


def cmd_kchain(args):
    spec = ChainSpec(tuple(_ints(args.sizes)))
    if args.action == "build":
        G = k_chain(spec)
        return {"sizes": list(spec.sizes), "graph": G.to_dict()}, EXIT_OK
    return _verdict_report(certify.kchain_global_check(spec, args.dim, args.seed, _opts(args)))


def cmd_extend(args):
    G = _load(args)
    if args.zero is not None:
        H = zero_extension(G, args.dim, _ints(args.zero))
    else:
        e = _ints(args.one)
        if len(e) != 2:
            raise InputError("--one takes an edge 'u,v'")
        H = one_extension(G, args.dim, e, _ints(args.extra or ""))
    return {"graph": H.to_dict(), "text": format_graph(H)}, EXIT_OK


def cmd_combine(args):
    try:
        data = json.loads(_read_text(args.input))
        g1 = Piece.make(data["g1"]["vertices"], data["g1"]["edges"])
        g2 = Piece.make(data["g2"]["vertices"], data["g2"]["edges"])
        X, H, witness = data["x"], data["h"], data["witness"]
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    except (KeyError, TypeError) as exc:
        raise InputError(f"combine input needs g1, g2, x, h, witness: missing {exc}") from None
    v = certify.combine_check(g1, g2, H, X, witness, args.dim, args.seed, _opts(args))
    return _verdict_report(v)


def _load_config(path: str, n: int, d: int):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if len(cfg) != n or any(len(p) != d for p in cfg):
        raise InputError(f"configuration must be {n} points of dimension {d}")
    return cfg


def cmd_oracle(args):
    G = _load(args)
    if args.action == "probe":
        res = oracle.numeric_globally_rigid_probe(G, args.dim, args.restarts, args.seed, args.tol)
        return res.to_dict(), EXIT_OK
    if args.config:
        p = _load_config(args.config, G.n, args.dim)
    else:
        p = oracle.random_float_config(G.n, args.dim, args.seed)
    rep = oracle.enumerate_equivalent(G, p, args.restarts, args.tol, args.seed, args.merge_tol)
    return rep.to_dict(), EXIT_OK


# -- sweep ------------------------------------------------------------------

def _sweep_instance(task):
    kind, n, edges, seed, trials = task
    from .graph_core import SimpleGraph

    G = SimpleGraph.from_edges(n, edges)
    if kind == "rank":
        return pebble_rank(G)[0] == generic_rank(G, 2, seed, trials)
    if kind == "d2":
        v = certify.global_rigidity_2d(G, seed)
        pred = ght_global_rigidity_test(G, 2, seed, trials).status == PROBABLY_GR
        return (v.status == certify.GLOBALLY_RIGID) == pred and checker.verify_verdict(G, v).ok
    ears = ear_decomposition(G)
    return checker.verify_ear_decomposition(G, ears, seed).ok


def cmd_sweep(args):
    graphs = corpus.atlas_graphs(min(args.max_n, 7))
    tasks = []
    for G in graphs:
        e = G.sorted_edges
        if G.n <= 6:
            tasks.append(("rank", G.n, e, args.seed, args.trials))
        if G.n >= 4 and is_k_connected(G, 3):
            tasks.append(("d2", G.n, e, args.seed, args.trials))
        if G.m >= 2 and is_m_connected(G):
            tasks.append(("ears", G.n, e, args.seed, args.trials))
    if args.jobs > 1:
        with Pool(args.jobs) as pool:
            results = pool.map(_sweep_instance, tasks, chunksize=16)
    else:
        results = [_sweep_instance(t) for t in tasks]
    summary = {}
    for (kind, n, e, *_), ok in zip(tasks, results):
        s = summary.setdefault(kind, {"instances": 0, "failures": []})
        s["instances"] += 1
        if not ok:
            s["failures"].append({"n": n, "edges": [list(x) for x in e]})
    failed = any(s["failures"] for s in summary.values())
    if failed:
        raise InvariantFault("sweep found disagreements: " + json.dumps(summary, sort_keys=True))
    return {"max_n": args.max_n, "checks": summary}, EXIT_OK


COMMANDS = {
    "rank": cmd_rank,
    "rigid": cmd_rigid,
    "redundant": cmd_redundant,
    "vredundant": cmd_vredundant,
    "laman": cmd_laman,
    "circuit": cmd_circuit,
    "mcomp": cmd_mcomp,
    "ears": cmd_ears,
    "global": cmd_global,
    "certify": cmd_certify,
    "hendrickson": cmd_hendrickson,
    "pack": cmd_pack,
    "bodybar": cmd_bodybar,
    "bodyhinge": cmd_bodyhinge,
    "kchain": cmd_kchain,
    "extend": cmd_extend,
    "combine": cmd_combine,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are input errors; exit code 2 is reserved for Unknown verdicts
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--dim", "-d", type=int, default=2, help="ambient dimension (default 2)")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $RIGIKIT_SEED or 0)")
    common.add_argument("--trials", type=int, default=3, help="random evaluation points per algebraic test")
    common.add_argument("--depth", type=int, default=8, help="vertex-removal search depth")
    common.add_argument("--node-budget", type=int, default=400, help="vertex-removal search node budget")
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp from reports")
    common.add_argument("--tol", type=float, default=oracle.RESIDUAL_TOL, help="oracle residual tolerance")
    common.add_argument("--merge-tol", type=float, default=oracle.MERGE_TOL, help="oracle class-merge tolerance")

    def graph_arg(p):
        p.add_argument("input", nargs="?", default="-", help="graph file (default stdin)")

    parser = _Parser(prog="rigikit", description="Rigidity and global rigidity of graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("rank", "rigid", "redundant", "vredundant", "laman", "circuit", "mcomp", "ears", "global", "hendrickson"):
        graph_arg(sub.add_parser(name, parents=[common]))
    p = sub.add_parser("certify", parents=[common])
    p.add_argument("--deconstruct", action="store_true", help="emit a planar deconstruction to K4")
    graph_arg(p)
    p = sub.add_parser("pack", parents=[common])
    p.add_argument("--trees", type=int, required=True)
    graph_arg(p)
    p = sub.add_parser("bodybar", parents=[common])
    p.add_argument("action", choices=["build", "check", "global"])
    graph_arg(p)
    p = sub.add_parser("bodyhinge", parents=[common])
    p.add_argument("action", choices=["build", "check", "global", "witness"])
    p.add_argument("--edge", type=int, default=None, help="edge copy index for witness (default all)")
    graph_arg(p)
    p = sub.add_parser("kchain", parents=[common])
    p.add_argument("action", choices=["build", "check"])
    p.add_argument("--sizes", required=True, help="part sizes, e.g. 4,4,4")
    p = sub.add_parser("extend", parents=[common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--zero", help="the d neighbours of the new vertex")
    g.add_argument("--one", help="edge u,v to split")
    p.add_argument("--extra", help="the d-1 further neighbours for --one")
    graph_arg(p)
    p = sub.add_parser("combine", parents=[common])
    p.add_argument("input", nargs="?", default="-", help="JSON with g1, g2, x, h, witness")
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("action", choices=["enumerate", "probe"])
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--config", help="JSON list of points (default: random rounded configuration)")
    graph_arg(p)
    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _human(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if key in ("steps", "deconstruction", "classes", "certificate", "per_edge", "configs", "rigid") and isinstance(value, (list, dict)):
            lines.append(f"{key}: ({len(value)} entries; use --json for details)")
        elif isinstance(value, (list, dict)) and len(json.dumps(value)) > 100:
            lines.append(f"{key}: ({len(value)} entries; use --json for details)")
        else:
            lines.append(f"{key}: {json.dumps(value) if not isinstance(value, str) else value}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    # a graph path given after the options of an action subcommand
    if len(extra) == 1 and not extra[0].startswith("-") and getattr(args, "input", None) == "-":
        args.input = extra[0]
    elif extra:
        parser.error("unrecognized arguments: " + " ".join(extra))
    try:
        args.seed = resolve_seed(args.seed)
        if args.dim < 1:
            raise InputError("--dim must be at least 1")
        if args.trials < 1:
            raise InputError("--trials must be at least 1")
        report, code = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"rigikit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantFault as exc:
        print(f"rigikit {args.command}: invariant fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    report = {"command": args.command, "dim": report.get("dim", args.dim), "seed": args.seed, **report}
    if not args.deterministic:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(_human(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
