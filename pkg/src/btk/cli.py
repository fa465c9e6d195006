"""Command-line front end: ``btk <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed (or a witness was not
verified), 2 malformed input.  Errors are written to stderr as JSON
``{"error": CODE, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import nullcontext

from .errors import BTKError, InternalError, ParseError
from .field import BACKENDS, make_field
from .geometry import (
    LOCALLY_PGL2,
    LocalAut,
    bruhat_geo,
    cartan_geo,
    classify,
    end_pair_witness,
    ghat_local_test,
    iwahori_borel_geo,
    iwahori_geo,
    iwasawa_geo,
    k_double_coset,
    levi_geo,
    sphere_witness,
    weak2_witness,
)
from .gl2 import (
    IWAHORI_SLOTS,
    SubgroupTag,
    bruhat,
    cartan,
    format_mat,
    iwahori_factor,
    iwasawa,
    levi,
    member,
    parse_mat,
    swap,
)
from .tree import (
    act,
    act_end,
    ball,
    ball_dot,
    ball_edges,
    distance,
    format_end,
    format_vertex,
    geodesic,
    neighbors,
    parse_end,
    parse_vertex,
)
from .verify import SUITES, verify_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

CLASSICAL = ("iwasawa", "cartan", "bruhat", "levi", "iwahori")
GEOMETRIC = {
    "iwasawa-geo": iwasawa_geo,
    "cartan-geo": cartan_geo,
    "bruhat-geo": bruhat_geo,
    "levi-geo": levi_geo,
    "iwahori-geo": iwahori_geo,
    "k-double-coset": k_double_coset,
    "iwahori-borel-geo": iwahori_borel_geo,
}


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _factor(F, role, g, tag=None):
    out = {"role": role, "matrix": format_mat(g)}
    if tag is not None:
        out["member"] = member(g, tag)
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, exit code)


def cmd_decompose(F, args):
    g = parse_mat(F, args.matrix)
    kind = args.kind
    B, K = SubgroupTag.B, SubgroupTag.K
    out = {"kind": kind, "input": format_mat(g)}
    if kind == "iwasawa":
        b, k = iwasawa(g)
        factors = [_factor(F, "B", b, B), _factor(F, "K", k, K)]
        recomposed = b * k == g
    elif kind == "cartan":
        cf = cartan(g)
        factors = [_factor(F, "K", cf.k1, K), _factor(F, "T", cf.middle(), SubgroupTag.T), _factor(F, "K", cf.k2, K)]
        out["exponents"] = list(cf.exponents)
        recomposed = cf.recompose() == g
    elif kind == "bruhat":
        bf = bruhat(g)
        out["case"] = bf.case
        factors = [_factor(F, "B", bf.b1, B)]
        if bf.b2 is not None:
            factors += [_factor(F, "s", swap(F)), _factor(F, "B", bf.b2, B)]
        recomposed = bf.recompose() == g
    elif kind == "levi":
        n, t = levi(g)
        factors = [_factor(F, "N", n, SubgroupTag.N), _factor(F, "T", t, SubgroupTag.T)]
        recomposed = n * t == g
    elif kind == "iwahori":
        ordering = tuple(SubgroupTag(s.strip()) for s in args.ordering.split(",")) if args.ordering else IWAHORI_SLOTS
        fs = iwahori_factor(g, ordering)
        factors = [_factor(F, t.value, f, t) for f, t in zip(fs, ordering)]
        for item, f in zip(factors, fs):
            item["member"] = item["member"] and member(f, SubgroupTag.I)
        recomposed = fs[0] * fs[1] * fs[2] == g
    else:
        fn = GEOMETRIC[kind]
        gf = fn(g, route=args.route) if kind == "bruhat-geo" else fn(g)
        out["case"] = gf.case
        if gf.n is not None:
            out["n"] = gf.n
        factors = [{"role": role, "matrix": format_mat(f), "member": ok} for (role, f), ok in zip(gf.factors, gf.membership())]
        out["factors"] = factors
        out["recomposed"] = gf.check()
        out["verified"] = out["recomposed"]
        return out, EXIT_OK if out["verified"] else EXIT_FAIL
    out["factors"] = factors
    out["recomposed"] = recomposed
    out["verified"] = recomposed and all(f.get("member", True) for f in factors)
    return out, EXIT_OK if out["verified"] else EXIT_FAIL


def cmd_distance(F, args):
    x, y = parse_vertex(F, args.x), parse_vertex(F, args.y)
    return {"x": format_vertex(F, x), "y": format_vertex(F, y), "distance": distance(F, x, y)}, EXIT_OK


def cmd_geodesic(F, args):
    x, y = parse_vertex(F, args.x), parse_vertex(F, args.y)
    return {"path": [format_vertex(F, z) for z in geodesic(F, x, y)]}, EXIT_OK


def cmd_neighbors(F, args):
    x = parse_vertex(F, args.x)
    return {"vertex": format_vertex(F, x), "neighbors": [format_vertex(F, z) for z in neighbors(F, x)]}, EXIT_OK


def cmd_ball(F, args):
    x = parse_vertex(F, args.center)
    if args.format == "dot":
        return ball_dot(F, x, args.radius), EXIT_OK
    verts = [format_vertex(F, z) for z in ball(F, x, args.radius)]
    edges = [[format_vertex(F, a), format_vertex(F, b)] for a, b in ball_edges(F, x, args.radius)]
    return {"center": format_vertex(F, x), "radius": args.radius, "vertices": verts, "edges": edges}, EXIT_OK


def cmd_act(F, args):
    g = parse_mat(F, args.matrix)
    out = {"matrix": format_mat(g)}
    if args.x is None and args.end is None:
        raise ParseError("act needs --x or --end")
    if args.x is not None:
        out["vertex"] = format_vertex(F, act(g, parse_vertex(F, args.x)))
    if args.end is not None:
        out["end"] = format_end(F, act_end(g, parse_end(F, args.end)))
    return out, EXIT_OK


def cmd_classify(F, args):
    g = parse_mat(F, args.matrix)
    cl = classify(g)
    out = {"matrix": format_mat(g), "kind": cl.kind, "min_displacement": cl.min_displacement}
    if cl.fixed_vertex is not None:
        out["fixed_vertex"] = format_vertex(F, cl.fixed_vertex)
    if cl.edge is not None:
        out["edge"] = [format_vertex(F, cl.edge.u), format_vertex(F, cl.edge.v)]
    if cl.axis_window is not None:
        out["length"] = cl.length
        out["axis_window"] = [format_vertex(F, z) for z in cl.axis_window]
    return out, EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ParseError(f"missing option(s): {', '.join('--' + n.replace('_', '-') for n in missing)}")


def cmd_witness(F, args):
    V = lambda s: parse_vertex(F, s)  # noqa: E731
    E = lambda s: parse_end(F, s)  # noqa: E731
    if args.kind == "sphere":
        _need(args, "x", "y", "z")
        x, y, z = V(args.x), V(args.y), V(args.z)
        g = sphere_witness(F, x, y, z)
        ok = act(g, x) == x and act(g, y) == z
    elif args.kind == "weak2":
        _need(args, "x1", "x2", "y1", "y2")
        x1, x2, y1, y2 = V(args.x1), V(args.x2), V(args.y1), V(args.y2)
        g = weak2_witness(F, x1, x2, y1, y2)
        ok = act(g, x1) == y1 and act(g, x2) == y2
    else:
        _need(args, "x", "y", "ends", "targets")
        x, y = V(args.x), V(args.y)
        w1, w2 = (E(s) for s in args.ends)
        s1, s2 = (E(s) for s in args.targets)
        g = end_pair_witness(F, x, w1, w2, y, s1, s2)
        ok = act(g, x) == y and act_end(g, w1) == s1 and act_end(g, w2) == s2
    return {"kind": args.kind, "matrix": format_mat(g), "verified": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_ghat_test(F, args):
    if args.input is not None:
        try:
            with open(args.input, encoding="utf-8") if args.input != "-" else nullcontext(sys.stdin) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read {args.input}: {exc}") from exc
        f = LocalAut.from_json(data)
    elif args.matrix is not None:
        f = LocalAut.from_matrix(parse_mat(F, args.matrix), parse_vertex(F, args.center), args.radius).validate()
    else:
        raise ParseError("ghat-test needs --input or --matrix")
    v = ghat_local_test(f, args.e, args.strategy)
    out = {"verdict": v.kind, "e": args.e, "radius": f.radius, "edges_checked": v.edges_checked}
    if v.edge is not None:
        out["edge"] = [format_vertex(f.F, v.edge.u), format_vertex(f.F, v.edge.v)]
    return out, EXIT_OK if v.kind == LOCALLY_PGL2 else EXIT_FAIL


def cmd_verify(F, args):
    suite = SUITES.get(args.suite)
    if suite is not None and suite.randomized and args.seed is None:
        raise ParseError(f"suite {args.suite!r} is randomized and needs --seed")
    levels = [args.e] if args.e is not None else None
    report = verify_suite(
        args.suite, F.p, F.backend, args.seed, cases=args.cases, radius=args.radius, levels=levels
    )
    args.wall_time = report.wall_time
    return report.to_dict(), EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "decompose": cmd_decompose,
    "distance": cmd_distance,
    "geodesic": cmd_geodesic,
    "neighbors": cmd_neighbors,
    "ball": cmd_ball,
    "act": cmd_act,
    "classify": cmd_classify,
    "witness": cmd_witness,
    "ghat-test": cmd_ghat_test,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument grammar


def _default_p():
    env = os.environ.get("BTK_P")
    if env is None:
        return 2
    try:
        return int(env)
    except ValueError:
        return env  # rejected later with a clean error


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", default=None, help="residue characteristic (default: $BTK_P or 2)")
    common.add_argument("--backend", default="QP", type=str.upper, choices=BACKENDS, help="field backend")
    common.add_argument("--format", default="json", choices=("json", "text", "dot"), help="output format")

    parser = argparse.ArgumentParser(
        prog="btk",
        description="Bruhat-Tits tree of PGL2 over Q_p or F_p((t)).",
        epilog="Scalars: QP '-45/7', LAURENT 't^-2 + 1 + 2*t^3'.  Matrices: 'a,b;c,d'.  "
        "Vertices: '(m;c)'.  Ends: '[u:v]'.  Exit codes: 0 ok, 1 verification failed, 2 bad input.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("decompose", parents=[common], help="factor a matrix")
    p.add_argument("--kind", required=True, choices=CLASSICAL + tuple(GEOMETRIC))
    p.add_argument("--matrix", required=True)
    p.add_argument("--ordering", help="iwahori factor order, e.g. NPRIME,T,N")
    p.add_argument("--route", default="crossroad", choices=("crossroad", "unipotent"), help="bruhat-geo N-part")

    for name, help_ in (("distance", "distance between vertices"), ("geodesic", "path between vertices")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--x", required=True)
        p.add_argument("--y", required=True)

    p = sub.add_parser("neighbors", parents=[common], help="the q+1 neighbours of a vertex")
    p.add_argument("--x", required=True)

    p = sub.add_parser("ball", parents=[common], help="list or export a ball")
    p.add_argument("--center", default="(0;0)")
    p.add_argument("--radius", type=int, required=True)

    p = sub.add_parser("act", parents=[common], help="apply a matrix to a vertex or end")
    p.add_argument("--matrix", required=True)
    p.add_argument("--x")
    p.add_argument("--end")

    p = sub.add_parser("classify", parents=[common], help="elliptic, inversion or hyperbolic")
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("witness", parents=[common], help="transitivity witnesses")
    p.add_argument("--kind", required=True, choices=("sphere", "weak2", "end-pair"))
    for opt in ("x", "y", "z", "x1", "x2", "y1", "y2"):
        p.add_argument(f"--{opt}")
    p.add_argument("--ends", nargs=2, metavar="END")
    p.add_argument("--targets", nargs=2, metavar="END")

    p = sub.add_parser("ghat-test", parents=[common], help="local PGL2 test on a ball map")
    p.add_argument("--input", help="LocalAut JSON file ('-' for stdin)")
    p.add_argument("--matrix", help="test the restriction of this matrix instead")
    p.add_argument("--center", default="(0;0)")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--strategy", default="enumerate", choices=("enumerate", "ends"))

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int)
    p.add_argument("--cases", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--e", type=int, help="ghat-local level (default: 1 and 2)")
    return parser


def _render(payload, fmt):
    if isinstance(payload, str):
        return payload
    if fmt == "text":
        lines = []
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, list):
                value = " ".join(v if isinstance(v, str) else json.dumps(v, ensure_ascii=False) for v in value)
            elif isinstance(value, dict):
                value = json.dumps(value, sort_keys=True, ensure_ascii=False)
            lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"
    return _dump(payload)


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        p = args.p if args.p is not None else _default_p()
        try:
            p = int(p)
        except ValueError as exc:
            raise ParseError(f"--p must be an integer: {p!r}") from exc
        try:
            F = make_field(args.backend, p)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        if args.format == "dot" and args.command != "ball":
            raise ParseError("--format dot is only available for ball")
        payload, code = COMMANDS[args.command](F, args)
    except InternalError as exc:
        stderr.write(_dump({"error": exc.code, "message": str(exc)}))
        return EXIT_FAIL
    except BTKError as exc:
        stderr.write(_dump({"error": exc.code, "message": str(exc)}))
        return EXIT_INPUT
    stdout.write(_render(payload, args.format))
    if getattr(args, "wall_time", None) is not None:
        stderr.write(f"wall_time {args.wall_time:.3f}s\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
