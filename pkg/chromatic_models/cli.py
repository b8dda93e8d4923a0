"""
Command-line front end.

Every subcommand prints deterministic JSON (or CSV for tables) on stdout and
logs to stderr. Exit codes: 0 success, 1 violated precondition or usage
error, 2 unreadable or malformed input.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional

from pydantic import ValidationError

from chromatic_models import certificates as certs
from chromatic_models.amalgamation import (
    ClassDescriptor,
    audit_extension_axioms,
    check_homogeneity,
    embed_target,
    grow_generic,
    odd_cycle_path_requests,
)
from chromatic_models.coloring import chromatic_number, max_clique
from chromatic_models.config import get_settings
from chromatic_models.errors import (
    ChromaticModelsError,
    ContractError,
    GraphFormatError,
)
from chromatic_models.graph_core import empty_graph, shift_graph
from chromatic_models.graph_io import GraphDescriptor, read_graph, write_graph
from chromatic_models.interval_cell import (
    BipartiteShortcut,
    BoundedColoring,
    CellSpec,
    CliqueBuilder,
    analyze_cell,
    color_point,
    emit_clique,
    grid_points,
    materialize_sample,
)
from chromatic_models.ledger import open_ledger, record_growth
from chromatic_models.mycielski import iterated_mycielskian, ladder_frame
from chromatic_models.predimension import (
    Alpha,
    Closedness,
    closure,
    delta,
    in_k_alpha,
    is_closed,
    kstar_coloring,
    lower_bound_epsilon,
)
from chromatic_models.witnesses import max_half_graph, max_shattered_set

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_INPUT = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for bad input."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONTRACT, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if not -(1 << 63) <= value < (1 << 63):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _probability(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability {value} outside [0, 1]")
    return value


def _vertex_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad vertex list {text!r}") from exc


def _emit(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_csv(frame, path: Optional[Path] = None) -> None:
    if path is None:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
    else:
        frame.to_csv(path, index=False, lineterminator="\n")


# --- handlers ---


def cmd_chromatic(args) -> int:
    g = read_graph(args.graph)
    chi, coloring = chromatic_number(g)
    clique = max_clique(g)
    _emit(
        {
            "n": g.n,
            "edges": g.edge_count(),
            "chi": chi,
            "omega": clique.size,
            "coloring": list(coloring.colors),
            "clique": list(clique.members),
        }
    )
    if args.out:
        cert = certs.ColoringCertificate(
            graph=GraphDescriptor.from_graph(g), colors=coloring.colors, palette=chi
        )
        certs.write_certificate(cert, args.out)
    return EXIT_OK


def cmd_mycielski(args) -> int:
    g = read_graph(args.graph)
    results = iterated_mycielskian(g, args.iterate)
    _write_csv(ladder_frame(g, results, with_chi=not args.no_chi))
    if args.write_graph and results:
        write_graph(results[-1].graph, args.write_graph)
    return EXIT_OK


def cmd_kalpha_check(args) -> int:
    g = read_graph(args.graph)
    alpha = Alpha.parse(args.alpha)
    kind = Closedness.STRICT if args.strict else Closedness.WEAK
    member, witness = in_k_alpha(g, alpha)
    closed, extension = is_closed(args.set, g, alpha, kind)
    _emit(
        {
            "alpha": str(alpha),
            "member": member,
            "delta": str(delta(g, alpha)),
            "witness": None if witness is None else sorted(witness),
            "set": sorted(args.set),
            "closedness": kind.value,
            "closed": closed,
            "extension": None if extension is None else sorted(extension),
        }
    )
    return EXIT_OK


def cmd_kalpha_epsilon(args) -> int:
    epsilon, witness = lower_bound_epsilon(args.n)
    _emit(
        {
            "n": args.n,
            "epsilon": str(epsilon),
            "size": witness.n,
            "edges": witness.edge_count(),
            "max_degree": witness.max_degree(),
        }
    )
    if args.write_graph:
        write_graph(witness, args.write_graph)
    return EXIT_OK


def cmd_kalpha_color(args) -> int:
    g = read_graph(args.graph)
    alpha = Alpha.parse(args.alpha)
    coloring = kstar_coloring(g, alpha, args.kstar, check_membership=True)
    _emit(
        {
            "k_star": args.kstar,
            "colors_used": coloring.palette_size,
            "coloring": list(coloring.colors),
        }
    )
    if args.out:
        cert = certs.ColoringCertificate(
            graph=GraphDescriptor.from_graph(g),
            colors=coloring.colors,
            palette=args.kstar,
        )
        certs.write_certificate(cert, args.out)
    return EXIT_OK


def cmd_kalpha_closure(args) -> int:
    g = read_graph(args.graph)
    alpha = Alpha.parse(args.alpha)
    kind = Closedness.STRICT if args.strict else Closedness.WEAK
    base = args.set
    _emit({"set": sorted(base), "closure": sorted(closure(base, g, alpha, kind))})
    return EXIT_OK


def _descriptor(args) -> ClassDescriptor:
    alpha = Alpha.parse(args.alpha) if args.alpha is not None else None
    return ClassDescriptor.from_name(args.class_name, alpha, args.strict)


def cmd_generic_grow(args) -> int:
    d = _descriptor(args)
    start = empty_graph()
    embedding = None
    if args.embed:
        start, emb = embed_target(start, d, read_graph(args.embed))
        embedding = list(emb.mapping)
    requests = odd_cycle_path_requests(offset=start.n) if args.odd_cycle else ()
    g, log = grow_generic(
        d,
        budget=args.budget,
        size_cap=args.size_cap,
        rng_seed=args.seed,
        initial=start,
        extensions=requests,
        completion=args.completion,
        chi_limit=args.chi_limit,
        half_cap=args.half_cap,
    )
    frame = log.to_frame()
    if args.out:
        _write_csv(frame, Path(f"{args.out}.csv"))
        write_graph(g, f"{args.out}.json")
        _emit(
            {
                "class": d.name,
                "seed": args.seed,
                "saturated": log.saturated,
                "note": log.note,
                "size": g.n,
                "edges": g.edge_count(),
                "omega": int(frame["omega"].iloc[-1]),
                "embedding": embedding,
            }
        )
    else:
        _write_csv(frame)
    db_url = args.db or get_settings().db_url
    if db_url:
        command = " ".join(args.argv)
        record_growth(open_ledger(db_url), log, command, args.budget, args.size_cap)
    return EXIT_OK


def cmd_generic_audit(args) -> int:
    g = read_graph(args.graph)
    d = _descriptor(args)
    missing = audit_extension_axioms(
        g, d, args.a_max, args.b_max, exhaustive=args.exhaustive
    )
    _emit(
        {
            "class": d.name,
            "a_max": args.a_max,
            "b_max": args.b_max,
            "missing": len(missing),
            "axioms": [ext.describe() for ext in missing[: args.limit]],
        }
    )
    return EXIT_OK


def cmd_witness_half(args) -> int:
    g = read_graph(args.graph)
    order, witness = max_half_graph(g, args.cap)
    _emit({"order": order, "a_seq": list(witness.a_seq), "b_seq": list(witness.b_seq)})
    if args.out:
        cert = certs.HalfGraphCertificate(
            graph=GraphDescriptor.from_graph(g), witness=witness
        )
        certs.write_certificate(cert, args.out)
    return EXIT_OK


def cmd_witness_shatter(args) -> int:
    g = read_graph(args.graph)
    size, witness = max_shattered_set(g, args.cap)
    _emit(
        {
            "size": size,
            "base": list(witness.base),
            "realizers": [[list(x), v] for x, v in witness.realizers],
        }
    )
    if args.out:
        cert = certs.ShatterCertificate(
            graph=GraphDescriptor.from_graph(g), witness=witness
        )
        certs.write_certificate(cert, args.out)
    return EXIT_OK


def cmd_shift(args) -> int:
    g = shift_graph(args.n, args.k)
    payload = {
        "n": args.n,
        "k": args.k,
        "vertices": g.n,
        "edges": g.edge_count(),
        "triangle_free": not g.has_triangle(),
    }
    if args.chi:
        payload["chi"] = chromatic_number(g)[0]
    _emit(payload)
    if args.write_graph:
        write_graph(g, args.write_graph)
    return EXIT_OK


def _load_cell(path: str) -> CellSpec:
    try:
        return CellSpec.model_validate_json(Path(path).read_text())
    except (ValidationError, UnicodeDecodeError) as exc:
        raise GraphFormatError(f"bad cell spec {path}: {exc}") from exc


def cmd_cell_analyze(args) -> int:
    spec = _load_cell(args.spec)
    verdict = analyze_cell(spec)
    payload = verdict.model_dump(mode="json", exclude={"cell", "stars"})
    payload["analyzed_d0"] = str(verdict.cell.d0)
    if args.clique:
        if not isinstance(verdict, CliqueBuilder):
            raise ContractError(f"verdict {verdict.kind} builds no cliques")
        clique = emit_clique(verdict, args.clique)
        payload["clique"] = [str(p) for p in clique.points]
        if args.out:
            cert = certs.PointCliqueCertificate(cell=verdict.cell, points=clique.points)
            certs.write_certificate(cert, args.out)
    if args.color_sample:
        if not isinstance(verdict, (BoundedColoring, BipartiteShortcut)):
            raise ContractError(f"verdict {verdict.kind} gives no colouring")
        points = grid_points(verdict.cell, args.color_sample, below=True)
        colors = tuple(color_point(verdict, p) for p in points)
        sample = materialize_sample(verdict.cell, points)
        palette = 2 if isinstance(verdict, BipartiteShortcut) else verdict.palette_bound
        payload["sample"] = {
            "points": len(points),
            "edges": sample.edge_count(),
            "colors_used": len(set(colors)),
            "palette_bound": palette,
        }
        if args.out:
            cert = certs.PointColoringCertificate(
                cell=verdict.cell, points=tuple(points), colors=colors, palette=palette
            )
            certs.write_certificate(cert, args.out)
    _emit(payload)
    return EXIT_OK


def cmd_homog(args) -> int:
    g = read_graph(args.graph)
    ok, pair = check_homogeneity(g, args.k)
    _emit(
        {
            "k": args.k,
            "homogeneous": ok,
            "counterexample": None if pair is None else [list(pair[0]), list(pair[1])],
        }
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    results = {}
    for path in args.certificates:
        cert = certs.read_certificate(path)
        valid = certs.verify_certificate(cert)
        results[str(path)] = {"kind": cert.kind, "valid": valid}
    _emit(results)
    return EXIT_OK if all(r["valid"] for r in results.values()) else EXIT_CONTRACT


# --- parser ---


def _class_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--class",
        dest="class_name",
        required=True,
        help="all, trianglefree, k<m>free or kalpha",
    )
    p.add_argument("--alpha", help="alpha as p/q (class kalpha)")
    p.add_argument("--strict", action="store_true", help="strict closedness")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chromatic-models", description="Command-line front end.")
    parser.add_argument("--log-level", help="overrides CHROMATIC_MODELS_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chromatic", help="exact chromatic and clique number")
    p.add_argument("graph")
    p.add_argument("--out", help="write PREFIX.cert.json")
    p.set_defaults(handler=cmd_chromatic)

    p = sub.add_parser("mycielski", help="iterated Mycielskian ladder as CSV")
    p.add_argument("graph")
    p.add_argument("--iterate", type=int, default=1)
    p.add_argument("--no-chi", action="store_true", help="skip the exact solver")
    p.add_argument("--write-graph", help="write the last iterate")
    p.set_defaults(handler=cmd_mycielski)

    kalpha = sub.add_parser("kalpha", help="predimension class K_alpha")
    ksub = kalpha.add_subparsers(dest="action", required=True)
    p = ksub.add_parser("check", help="membership with a violating subset")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    p.add_argument("--set", type=_vertex_list, default=[], help="e.g. 0,2,5")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(handler=cmd_kalpha_check)
    p = ksub.add_parser("epsilon", help="witness of the lower bound for chi >= n")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--write-graph")
    p.set_defaults(handler=cmd_kalpha_epsilon)
    p = ksub.add_parser("color", help="colouring with at most k* colours")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    p.add_argument("--kstar", type=_positive, required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_kalpha_color)
    p = ksub.add_parser("closure", help="closure of a vertex set")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    p.add_argument("--set", type=_vertex_list, default=[], help="e.g. 0,2,5")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(handler=cmd_kalpha_closure)

    generic = sub.add_parser("generic", help="amalgamation classes")
    gsub = generic.add_subparsers(dest="action", required=True)
    p = gsub.add_parser("grow", help="grow an approximant of the limit")
    _class_options(p)
    p.add_argument("--budget", type=_positive, default=200)
    p.add_argument("--size-cap", type=_positive, default=3)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--embed", help="graph to embed before growing")
    p.add_argument(
        "--odd-cycle",
        action="store_true",
        help="realize the odd and even path extensions first",
    )
    p.add_argument(
        "--completion", type=_probability, help="completion edge probability p/q"
    )
    p.add_argument("--chi-limit", type=int, help="largest size given an exact chi")
    p.add_argument("--half-cap", type=int, default=0)
    p.add_argument("--out", help="write PREFIX.csv and PREFIX.json")
    p.add_argument("--db", help="SQLAlchemy URL of the experiment ledger")
    p.set_defaults(handler=cmd_generic_grow)
    p = gsub.add_parser("audit", help="missing extension axioms")
    p.add_argument("graph")
    _class_options(p)
    p.add_argument("--a-max", type=int, required=True)
    p.add_argument("--b-max", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--limit", type=int, default=50, help="axioms listed")
    p.set_defaults(handler=cmd_generic_audit)

    witness = sub.add_parser("witness", help="instability witnesses")
    wsub = witness.add_subparsers(dest="action", required=True)
    for name, handler in (("half", cmd_witness_half), ("shatter", cmd_witness_shatter)):
        p = wsub.add_parser(name)
        p.add_argument("graph")
        p.add_argument("--cap", type=int, required=True)
        p.add_argument("--out")
        p.set_defaults(handler=handler)

    p = sub.add_parser("shift", help="shift graph Sh(n, k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--chi", action="store_true")
    p.add_argument("--write-graph")
    p.set_defaults(handler=cmd_shift)

    cell = sub.add_parser("cell", help="interval cell analyzer")
    csub = cell.add_subparsers(dest="action", required=True)
    p = csub.add_parser("analyze")
    p.add_argument("spec")
    p.add_argument("--clique", type=_positive)
    p.add_argument("--color-sample", type=_positive)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_cell_analyze)

    p = sub.add_parser("homog", help="truncated homogeneity check")
    p.add_argument("graph")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(handler=cmd_homog)

    p = sub.add_parser("verify", help="re-check certificate files")
    p.add_argument("certificates", nargs="+")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONTRACT
    args.argv = argv

    level = args.log_level or get_settings().log_level
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except (GraphFormatError, OSError) as exc:
        logger.error(str(exc))
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ChromaticModelsError as exc:
        logger.error(str(exc))
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONTRACT
