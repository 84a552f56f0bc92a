"""Command-line entry point.

Exit codes: 0 when the question was answered (whatever the answer),
2 for malformed input, 3 when a size guard or state budget was hit.
``enumerate`` treats an oversized ``n`` as malformed input (exit 2).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import complete as kn
from .dynamics import format_config, parse_config, is_stable
from .enumeration import (
    enumerate_dr,
    enumerate_minimal,
    enumerate_psr,
    enumerate_sr,
    reachable_recurrent_set,
    table_counts,
)
from .errors import GuardExceeded, NotRecurrentError
from .formats import load_graph
from .graph import complete_graph, complete_graph_multi_sink
from .markov import ChainSpec, parse_mu, run_chain, stats_to_json
from .polytope import decompose, decompose_level_restricted
from .recurrence import dhar_burning, is_dr, is_sr_flow

EXIT_OK, EXIT_USAGE, EXIT_GUARD = 0, 2, 3


class UsageError(ValueError):
    pass


def _graph(args):
    if args.graph is not None:
        if args.sink_mult is not None:
            raise UsageError("--sink-mult only applies to --complete")
        return load_graph(args.graph)
    if args.sink_mult is not None:
        return complete_graph_multi_sink(args.complete, args.sink_mult)
    return complete_graph(args.complete)


def _model(text: str) -> tuple[str, int]:
    text = text.strip().lower()
    if text in ("det", "sto"):
        return text, 0
    if text.startswith("partial:"):
        try:
            return "partial", int(text.split(":", 1)[1])
        except ValueError:
            pass
    raise UsageError(f"model must be det, sto or partial:K, got {text!r}")


def _config_for(graph, text: str):
    c = parse_config(text)
    if len(c) != graph.n:
        raise UsageError(f"configuration has {len(c)} entries, graph has {graph.n} non-sink vertices")
    if not is_stable(graph, c):
        raise UsageError("configuration is not stable")
    return c


def _emit(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {json.dumps(v)}" for k, v in obj.items())
    return str(obj)


# --------------------------------------------------------------------------


def cmd_check(args) -> str:
    graph = _graph(args)
    c = _config_for(graph, args.config)
    model, k = _model(args.model)
    if model == "det":
        out = is_dr(graph, c).to_json()
    elif model == "sto":
        out = is_sr_flow(graph, c).to_json()
    else:
        if not 0 <= k <= graph.n:
            raise UsageError(f"partial:K needs 0 <= K <= {graph.n}")
        states = reachable_recurrent_set(graph, range(1, k + 1))
        out = {
            "recurrent": c in states,
            "witness_kind": "state_space",
            "witness": {"k": k, "recurrent_count": len(states)},
        }
    return _emit(out, args.format)


def cmd_burn(args) -> str:
    graph = _graph(args)
    c = _config_for(graph, args.config)
    if args.algorithm == "dhar":
        return _emit(dhar_burning(graph, c).to_json(), args.format)
    if not graph.is_complete():
        raise UsageError("stochastic burning only applies to complete graphs (use --complete N)")
    k, report = kn.stochastic_burning(graph.n, c)
    out = {"unburned": k, **report.to_json()}
    return _emit(out, args.format)


def cmd_enumerate(args) -> str:
    try:
        return _enumerate(args)
    except GuardExceeded as exc:
        # asking for too large an n is a usage error here
        raise UsageError(str(exc)) from None


def _enumerate(args) -> str:
    n = args.complete
    which = args.set.strip().lower()
    if which == "dr":
        summary = enumerate_dr(n)
    elif which == "sr":
        summary = enumerate_sr(n)
    elif which == "minimal-dr":
        summary = enumerate_minimal(n, "DR")
    elif which == "minimal-sr":
        summary = enumerate_minimal(n, "SR")
    elif which.startswith("psr:"):
        try:
            k = int(which.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad set {args.set!r}") from None
        summary = enumerate_psr(n, k)
    else:
        raise UsageError(f"set must be dr, sr, psr:K, minimal-dr or minimal-sr, got {args.set!r}")

    fmt = args.format or "plain"
    lines = []
    if fmt == "json":
        lines.append(json.dumps({"n": n, "set": which, "count": summary.count}))
        if args.states:
            lines.extend(json.dumps({"state": list(s)}) for s in summary.states)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if args.states:
            w.writerow([f"c{i}" for i in range(1, n + 1)])
            w.writerows(summary.states)
        else:
            w.writerow(["n", "set", "count"])
            w.writerow([n, which, summary.count])
        return buf.getvalue().rstrip("\n")
    else:
        lines.append(str(summary.count))
        if args.states:
            lines.extend(format_config(s) for s in summary.states)
    return "\n".join(lines)


def cmd_decompose(args) -> str:
    n = args.complete
    graph = complete_graph(n)
    c = _config_for(graph, args.config)
    try:
        cert = decompose_level_restricted(n, c) if args.level_restricted else decompose(n, c)
    except NotRecurrentError as exc:
        report = exc.witness
        subset, grains, edges = kn.sr_violation(n, c)
        out = {
            "target": list(c),
            "sr": False,
            "witness": {
                "unburned": len(report.remain),
                **report.to_json(),
                "forbidden_subset": {"subset": sorted(subset), "grains": grains, "edges": edges},
            },
        }
        return _emit(out, args.format)
    return _emit(cert.to_json(), args.format)


def cmd_table(args) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "dr", "psr1", "sr"])
    w.writerows(table_counts(args.nmax))
    return buf.getvalue().rstrip("\n")


def _parse_p(text: str) -> float:
    try:
        p = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed probability {text!r}") from None
    if not 0 < p < 1:
        raise UsageError(f"p must lie in (0, 1), got {text}")
    return float(p)


def cmd_simulate(args) -> str:
    graph = _graph(args)
    model, k = _model(args.model)
    spec = ChainSpec(
        graph,
        model,
        p=_parse_p(args.p),
        k=k,
        mu=parse_mu(args.mu, graph.n),
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    return _emit(stats_to_json(spec, run_chain(spec)), args.format)


# --------------------------------------------------------------------------


def _add_graph_source(p: argparse.ArgumentParser, complete_only: bool = False) -> None:
    if complete_only:
        p.add_argument("--complete", type=int, required=True, metavar="N")
        return
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="graph JSON file")
    src.add_argument("--complete", type=int, metavar="N", help="complete graph K_n with sink")
    p.add_argument("--sink-mult", type=int, metavar="L", help="sink-edge multiplicity for --complete")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sandpiles", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide recurrence of a stable configuration")
    _add_graph_source(p)
    p.add_argument("--config", required=True, help="comma-separated grains for vertices 1..n")
    p.add_argument("--model", default="sto", help="det, sto or partial:K")
    p.add_argument("--format", choices=["json", "plain"], default="json")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("burn", help="run a burning algorithm")
    _add_graph_source(p)
    p.add_argument("--config", required=True)
    p.add_argument("--algorithm", choices=["dhar", "stochastic"], default="dhar")
    p.add_argument("--format", choices=["json", "plain"], default="json")
    p.set_defaults(func=cmd_burn)

    p = sub.add_parser("enumerate", help="enumerate recurrent sets on K_n")
    _add_graph_source(p, complete_only=True)
    p.add_argument("--set", required=True, help="dr, sr, psr:K, minimal-dr or minimal-sr")
    p.add_argument("--states", action="store_true", help="list the states, not only the count")
    p.add_argument("--format", choices=["json", "csv", "plain"])
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("decompose", help="write an SR state as a convex combination of DR states")
    _add_graph_source(p, complete_only=True)
    p.add_argument("--config", required=True)
    p.add_argument("--level-restricted", action="store_true")
    p.add_argument("--format", choices=["json", "plain"], default="json")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("table", help="counts of DR, 1-partial SR and SR states on K_n")
    p.add_argument("--nmax", type=int, default=5)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="run the sandpile Markov chain")
    _add_graph_source(p)
    p.add_argument("--model", default="det", help="det, sto or partial:K")
    p.add_argument("--p", default="1/2", help="toppling probability, decimal or num/den")
    p.add_argument("--mu", default="uniform", help="'uniform' or comma-separated probabilities")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "plain"], default="json")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except GuardExceeded as exc:
        print(f"sandpiles: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, TypeError, OSError) as exc:
        print(f"sandpiles {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
