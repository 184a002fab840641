"""Command line interface: graph ingestion, experiments, report files.

Reports are JSON or CSV by output extension, embed the run configuration,
the graph hash and the library version, and print numbers with 12
significant digits so identical configurations reproduce byte-identical
files.  Exit codes: 0 success, 1 validation error, 2 resource guard,
3 a verification flag failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .coxeter import (
    CoxeterGraph,
    ResourceGuardExceeded,
    ball,
    builtin_graph,
    graph_analysis,
    graph_hash,
    load_graph,
    normalize,
    save_ball_cache,
)
from .gns import format_number, matrix_of, operator_norm
from .hecke import HeckeElement, MultiParameter, l2_norm, multiply, parse_element, trace

BUILTIN_NAMES = ("dihedral", "square", "pentagon")
VERIFY_TOL = 1e-10


class CliError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; 2 is reserved for resource guards here
    def error(self, message):
        raise CliError(message)


def _graph_arg(spec: str) -> CoxeterGraph:
    if spec in BUILTIN_NAMES:
        return builtin_graph(spec)
    return load_graph(spec)


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, bool) or isinstance(obj, int) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _cell(value) -> str:
    if isinstance(value, (float, complex)):
        return format_number(value)
    return str(value)


def _num(value):
    # JSON has no complex type; keep real values numeric, else format
    if isinstance(value, complex):
        return value.real if value.imag == 0 else format_number(value)
    return value


def _emit(args, payload: dict, csv_table: tuple[list[str], list[list]] | None) -> None:
    out = getattr(args, "out", None)
    if out is None:
        return
    if out.endswith(".csv"):
        if csv_table is None:
            raise CliError("this command has no CSV form; use a .json output path")
        header, rows = csv_table
        with open(out, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
    elif out.endswith(".json"):
        with open(out, "w") as fh:
            json.dump(_round12(payload), fh, indent=2)
            fh.write("\n")
    else:
        raise CliError(f"output path must end in .csv or .json, got {out!r}")
    print(f"wrote {out}")


def _payload(command: str, graph: CoxeterGraph | None, config: dict, body: dict) -> dict:
    head = {"schema": 1, "version": __version__, "command": command, "config": config}
    if graph is not None:
        head["graph_hash"] = graph_hash(graph)
    head.update(body)
    return head


def _figure_path(args, suffix: str = "") -> str:
    base = args.out
    stem = base.rsplit(".", 1)[0]
    return f"{stem}{suffix}.png"


def _require_plot_target(args) -> None:
    if getattr(args, "plot", False) and not getattr(args, "out", None):
        raise CliError("--plot writes figures next to the report; give --out as well")


def cmd_graph_check(args) -> int:
    graph = _graph_arg(args.graph)
    analysis = graph_analysis(graph)
    hyperbolic = analysis.square is None
    witness = analysis.square_names()
    if hyperbolic:
        print(f"hyperbolic=true ({graph.n} generators, no induced square)")
    else:
        print(f"hyperbolic=false witness={','.join(witness)}")
    config = {"graph": args.graph}
    _emit(
        args,
        _payload(
            "graph check",
            graph,
            config,
            {
                "generators": list(graph.names),
                "commuting_pairs": len(graph.pairs),
                "hyperbolic": hyperbolic,
                "square": list(witness) if witness else None,
            },
        ),
        (
            ["property", "value"],
            [["hyperbolic", str(hyperbolic).lower()], ["square", ",".join(witness) if witness else ""]],
        ),
    )
    return 0


def cmd_ball(args) -> int:
    _require_plot_target(args)
    graph = _graph_arg(args.graph)
    basis = ball(graph, args.radius)
    sizes = [basis.size_at(k) for k in range(args.radius + 1)]
    totals = []
    for s in sizes:
        totals.append((totals[-1] if totals else 0) + s)
    print("radius " + " ".join(f"{k}:{t}" for k, t in enumerate(totals)))
    if args.cache:
        save_ball_cache(basis, args.cache)
        print(f"wrote {args.cache}")
    config = {"graph": args.graph, "radius": args.radius}
    _emit(
        args,
        _payload(
            "ball", graph, config, {"sphere_sizes": sizes, "ball_sizes": totals, "total": len(basis)}
        ),
        (
            ["length", "sphere_size", "ball_size"],
            [[k, sizes[k], totals[k]] for k in range(args.radius + 1)],
        ),
    )
    if args.plot:
        from .plots import ball_growth_figure

        print(f"wrote {ball_growth_figure(sizes, _figure_path(args))}")
    return 0


def cmd_mul(args) -> int:
    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    x = parse_element(args.x, q)
    y = parse_element(args.y, q)
    product = multiply(x, y)
    words = product.support()
    pretty = " + ".join(f"{format_number(product.coeff(w))}*{w.display()}" for w in words) or "0"
    print(pretty)
    config = {"graph": args.graph, "q": args.q, "x": args.x, "y": args.y}
    _emit(
        args,
        _payload(
            "mul",
            graph,
            config,
            {"coefficients": {w.display(): _num(product.coeff(w)) for w in words}},
        ),
        (["word", "coefficient"], [[w.display(), product.coeff(w)] for w in words]),
    )
    return 0


def cmd_trace(args) -> int:
    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    x = parse_element(args.element, q)
    value = trace(x)
    norm = l2_norm(x)
    print(f"trace = {format_number(value)}")
    print(f"l2 norm = {format_number(norm)}")
    config = {"graph": args.graph, "q": args.q, "element": args.element}
    _emit(
        args,
        _payload(
            "trace", graph, config, {"trace": _num(value), "l2_norm": norm}
        ),
        (["quantity", "value"], [["trace", value], ["l2_norm", norm]]),
    )
    return 0


def cmd_decompose(args) -> int:
    _require_plot_target(args)
    from .ladders import decompose, sigma_census

    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    word = normalize(graph.parse_letters(args.word), graph)
    census = sigma_census(word)
    op = decompose(word, q, args.radius)
    by_l: dict[int, int] = {}
    for wit in census:
        by_l[wit.l] = by_l.get(wit.l, 0) + 1
    print(
        f"summands: {len(census)} "
        + " ".join(f"l={l}:{c}" for l, c in sorted(by_l.items()))
    )
    deviation = None
    code = 0
    if args.verify:
        ref = matrix_of(HeckeElement.basis(q, word), args.radius, codomain_radius=args.radius)
        deviation = float(abs(op.entries - ref.entries).max())
        verdict = "ok" if deviation <= VERIFY_TOL else "FAILED"
        print(f"max deviation = {format_number(deviation)} ({verdict})")
        if deviation > VERIFY_TOL:
            code = 3
    config = {
        "graph": args.graph,
        "q": args.q,
        "word": args.word,
        "radius": args.radius,
        "verify": args.verify,
    }
    rows = [
        [wit.l, wit.k, "".join(graph.names[t] for t in wit.gamma0) or "-",
         "".join(graph.names[t] for t in wit.gamma1) or "-",
         "".join(graph.names[t] for t in wit.gamma2) or "-",
         " ".join(str(i) for i in wit.sigma)]
        for wit in census
    ]
    _emit(
        args,
        _payload(
            "decompose",
            graph,
            config,
            {
                "summands": len(census),
                "by_clique_size": {str(l): c for l, c in sorted(by_l.items())},
                "operator_norm": operator_norm(op),
                "max_deviation": deviation,
                "census": [
                    {
                        "l": wit.l,
                        "k": wit.k,
                        "gamma0": [graph.names[t] for t in wit.gamma0],
                        "gamma1": [graph.names[t] for t in wit.gamma1],
                        "gamma2": [graph.names[t] for t in wit.gamma2],
                        "sigma": list(wit.sigma),
                    }
                    for wit in census
                ],
            },
        ),
        (["l", "k", "gamma0", "gamma1", "gamma2", "sigma"], rows),
    )
    if args.plot:
        from .plots import matrix_figure

        print(f"wrote {matrix_figure(op.entries, _figure_path(args), title=f'T_{args.word} on ball({args.radius})')}")
    return code


def cmd_haagerup_scan(args) -> int:
    _require_plot_target(args)
    from .haagerup import haagerup_scan

    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    report = haagerup_scan(
        graph, q, args.nmax, args.radius, args.samples, args.seed, threads=args.threads
    )
    best = max(report.rows, key=lambda r: r.ratio)
    print(
        f"max ratio = {format_number(report.max_ratio)} at n={best.n} (i={best.i}, j={best.j}); "
        f"c_q = {format_number(report.c_q)}; K = {format_number(report.k_emp)}"
    )
    config = {
        "graph": args.graph,
        "q": args.q,
        "nmax": args.nmax,
        "radius": args.radius,
        "samples": args.samples,
        "seed": args.seed,
    }
    _emit(
        args,
        _payload("haagerup scan", graph, config, report.to_dict()),
        (
            ["n", "sample", "i", "j", "ratio"],
            [[r.n, r.sample, r.i, r.j, r.ratio] for r in report.rows],
        ),
    )
    if args.plot:
        from .plots import scan_figure

        print(f"wrote {scan_figure(report, _figure_path(args))}")
    return 0


def cmd_haagerup_counterexample(args) -> int:
    _require_plot_target(args)
    from .haagerup import verify_counterexample

    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    result = verify_counterexample(args.n, q)
    print(
        f"n={result.n}: block norm = {format_number(result.block_norm)}, "
        f"ratio = {format_number(result.ratio)} vs bound {format_number(result.lower_bound)}: "
        + ("pass" if result.passed else "FAILED")
    )
    config = {"graph": args.graph, "q": args.q, "n": args.n}
    _emit(
        args,
        _payload("haagerup counterexample", graph, config, result.to_dict()),
        (
            ["m", "c_m"],
            [[m, c] for m, c in sorted(result.coefficient_counts.items())],
        ),
    )
    if args.plot:
        from .plots import counterexample_figure

        print(f"wrote {counterexample_figure(result, _figure_path(args))}")
    return 0 if result.passed else 3


def cmd_tuples(args) -> int:
    from .haagerup import count_tuples, tuple_scan

    graph = _graph_arg(args.graph)
    if args.scan:
        report = tuple_scan(graph, args.max_len, args.imax)
        print(f"bound = {report.bound} at x={report.argmax[0]} y={report.argmax[1]} i={report.argmax[2]}")
        config = {"graph": args.graph, "scan": True, "max_len": args.max_len, "imax": args.imax}
        _emit(
            args,
            _payload("tuples", graph, config, report.to_dict()),
            (
                ["i", "max_count"],
                [[k, v] for k, v in sorted(report.per_i_max.items())],
            ),
        )
        return 0
    if args.x is None or args.y is None or args.i is None:
        raise CliError("need --x, --y and --i (or --scan with --max-len/--imax)")
    x = normalize(graph.parse_letters(args.x), graph)
    y = normalize(graph.parse_letters(args.y), graph)
    value = count_tuples(x, y, args.i)
    print(f"count = {value}")
    config = {"graph": args.graph, "x": args.x, "y": args.y, "i": args.i}
    _emit(
        args,
        _payload("tuples", graph, config, {"count": value}),
        (["x", "y", "i", "count"], [[args.x, args.y, args.i, value]]),
    )
    return 0


def cmd_schur_gram(args) -> int:
    from .schur import gram_check

    graph = _graph_arg(args.graph)
    result = gram_check(args.kappa, ball(graph, args.radius))
    print(
        f"min eigenvalue = {format_number(result.min_eigenvalue)} on {result.size} words: "
        + ("pass" if result.passed else "FAILED")
    )
    config = {"graph": args.graph, "kappa": args.kappa, "radius": args.radius}
    _emit(
        args,
        _payload(
            "schur gram",
            graph,
            config,
            {
                "size": result.size,
                "min_eigenvalue": result.min_eigenvalue,
                "passed": result.passed,
            },
        ),
        (
            ["kappa", "radius", "size", "min_eigenvalue", "passed"],
            [[args.kappa, args.radius, result.size, result.min_eigenvalue, result.passed]],
        ),
    )
    return 0 if result.passed else 3


def cmd_schur_check(args) -> int:
    from .schur import INTERTWINE_TOL, commutator_intertwine_check, commutator_norms

    graph = _graph_arg(args.graph)
    q = MultiParameter.from_spec(graph, args.q)
    x = parse_element(args.element, q)
    deviation = commutator_intertwine_check(x, args.kappa, args.radius)
    damped, plain = commutator_norms(x, args.kappa, args.radius)
    ok = deviation <= INTERTWINE_TOL and damped <= plain + 1e-9
    print(
        f"intertwine deviation = {format_number(deviation)}; "
        f"damped commutator {format_number(damped)} <= {format_number(plain)}: "
        + ("pass" if ok else "FAILED")
    )
    config = {
        "graph": args.graph,
        "q": args.q,
        "element": args.element,
        "kappa": args.kappa,
        "radius": args.radius,
    }
    _emit(
        args,
        _payload(
            "schur check",
            graph,
            config,
            {
                "intertwine_deviation": deviation,
                "damped_commutator_norm": damped,
                "commutator_norm": plain,
                "passed": ok,
            },
        ),
        (
            ["quantity", "value"],
            [
                ["intertwine_deviation", deviation],
                ["damped_commutator_norm", damped],
                ["commutator_norm", plain],
                ["passed", ok],
            ],
        ),
    )
    return 0 if ok else 3


def cmd_converge(args) -> int:
    _require_plot_target(args)
    from .schur import convergence_experiment, default_k_emp

    graph = _graph_arg(args.graph)
    try:
        q_grid = [float(part) for part in args.qgrid.split(",") if part]
    except ValueError as exc:
        raise CliError(f"bad --qgrid value: {exc}") from exc
    if not q_grid:
        raise CliError("--qgrid must list at least one value")
    k_emp = args.kemp if args.kemp is not None else default_k_emp(graph, args.radius, args.seed)
    rows = convergence_experiment(
        graph,
        q_grid,
        args.kappa,
        args.support,
        args.radius,
        args.samples,
        args.seed,
        k_emp=k_emp,
        threads=args.threads,
    )
    for r in rows:
        print(
            f"q={r.q:g}: C={format_number(r.c_q1)} F={format_number(r.f_q1)} "
            f"gap1={format_number(r.gap_dir1)} gap2={format_number(r.gap_dir2)}"
        )
    config = {
        "graph": args.graph,
        "qgrid": args.qgrid,
        "kappa": args.kappa,
        "support": args.support,
        "radius": args.radius,
        "samples": args.samples,
        "seed": args.seed,
        "k_emp": k_emp,
    }
    _emit(
        args,
        _payload(
            "converge",
            graph,
            config,
            {"rows": [r.to_dict() for r in rows], "columns_are": "truncated surrogate"},
        ),
        (
            ["q", "kappa", "C_q1", "F_q1", "gap_dir1", "gap_dir2", "n_samples", "radius"],
            [
                [r.q, r.kappa, r.c_q1, r.f_q1, r.gap_dir1, r.gap_dir2, r.n_samples, r.radius]
                for r in rows
            ],
        ),
    )
    if args.plot:
        from .plots import convergence_figure

        print(f"wrote {convergence_figure(rows, _figure_path(args))}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="heckeq", description=__doc__)
    parser.add_argument("--version", action="version", version=f"heckeq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p, graph=True, out=True, plot=False, threads=False):
        if graph:
            p.add_argument("--graph", required=True, help="builtin name or JSON path")
        if out:
            p.add_argument("--out", help="report path (.json or .csv)")
        if plot:
            p.add_argument("--plot", action="store_true", help="render figures next to --out")
        if threads:
            p.add_argument("--threads", type=int, default=None, help="worker cap")

    graph_cmd = sub.add_parser("graph", help="graph utilities")
    graph_sub = graph_cmd.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    check = graph_sub.add_parser("check", help="hyperbolicity and witness")
    add_common(check)
    check.set_defaults(func=cmd_graph_check)

    ball_cmd = sub.add_parser("ball", help="ball and sphere sizes")
    add_common(ball_cmd, plot=True)
    ball_cmd.add_argument("--radius", type=int, required=True)
    ball_cmd.add_argument("--cache", help="write a reusable ball cache file")
    ball_cmd.set_defaults(func=cmd_ball)

    mul_cmd = sub.add_parser("mul", help="multiply two element literals")
    add_common(mul_cmd)
    mul_cmd.add_argument("--q", required=True, help="parameter spec, e.g. all=2 or s=1.5,t=2")
    mul_cmd.add_argument("x")
    mul_cmd.add_argument("y")
    mul_cmd.set_defaults(func=cmd_mul)

    trace_cmd = sub.add_parser("trace", help="trace and l2 norm of an element")
    add_common(trace_cmd)
    trace_cmd.add_argument("--q", required=True)
    trace_cmd.add_argument("element")
    trace_cmd.set_defaults(func=cmd_trace)

    dec_cmd = sub.add_parser("decompose", help="ladder decomposition of a basis operator")
    add_common(dec_cmd, graph=False, plot=True)
    dec_cmd.add_argument("--graph", default="square", help="builtin name or JSON path (default: square)")
    dec_cmd.add_argument("--q", required=True)
    dec_cmd.add_argument("--word", required=True)
    dec_cmd.add_argument("--radius", type=int, required=True)
    dec_cmd.add_argument("--verify", action="store_true", help="compare against the direct matrix")
    dec_cmd.set_defaults(func=cmd_decompose)

    haag = sub.add_parser("haagerup", help="block-norm experiments")
    haag_sub = haag.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    scan = haag_sub.add_parser("scan", help="ratio scan over homogeneous degrees")
    add_common(scan, plot=True, threads=True)
    scan.add_argument("--q", required=True)
    scan.add_argument("--nmax", type=int, required=True)
    scan.add_argument("--radius", type=int, required=True)
    scan.add_argument("--samples", type=int, required=True)
    scan.add_argument("--seed", type=int, required=True)
    scan.set_defaults(func=cmd_haagerup_scan)
    cx = haag_sub.add_parser("counterexample", help="square-graph family, exact block norm")
    add_common(cx, graph=False, plot=True)
    cx.add_argument("--graph", default="square", help="builtin name or JSON path (default: square)")
    cx.add_argument("--q", required=True)
    cx.add_argument("--n", type=int, required=True)
    cx.set_defaults(func=cmd_haagerup_counterexample)

    tup = sub.add_parser("tuples", help="two-sided factorization counts")
    add_common(tup)
    tup.add_argument("--x")
    tup.add_argument("--y")
    tup.add_argument("--i", type=int)
    tup.add_argument("--scan", action="store_true", help="exhaustive box maximum")
    tup.add_argument("--max-len", type=int, default=3, dest="max_len")
    tup.add_argument("--imax", type=int, default=4)
    tup.set_defaults(func=cmd_tuples)

    schur_cmd = sub.add_parser("schur", help="radial multiplier checks")
    schur_sub = schur_cmd.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    gram = schur_sub.add_parser("gram", help="kernel positivity on a ball")
    add_common(gram)
    gram.add_argument("--kappa", type=float, required=True)
    gram.add_argument("--radius", type=int, required=True)
    gram.set_defaults(func=cmd_schur_gram)
    check_cmd = schur_sub.add_parser("check", help="commutator intertwining and contraction")
    add_common(check_cmd)
    check_cmd.add_argument("--q", required=True)
    check_cmd.add_argument("--element", required=True)
    check_cmd.add_argument("--kappa", type=float, required=True)
    check_cmd.add_argument("--radius", type=int, required=True)
    check_cmd.set_defaults(func=cmd_schur_check)

    conv = sub.add_parser("converge", help="two-directional q -> 1 experiment")
    add_common(conv, plot=True, threads=True)
    conv.add_argument("--qgrid", required=True, help="comma-separated q values")
    conv.add_argument("--kappa", type=float, required=True)
    conv.add_argument("--support", type=int, required=True)
    conv.add_argument("--radius", type=int, required=True)
    conv.add_argument("--samples", type=int, required=True)
    conv.add_argument("--seed", type=int, required=True)
    conv.add_argument("--kemp", type=float, default=None, help="override the empirical constant")
    conv.set_defaults(func=cmd_converge)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ResourceGuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
