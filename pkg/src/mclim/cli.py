"""``mclim`` command line.

Exit codes: 0 success, 1 validation failure, 2 tied row maximum,
3 non-convergence / reducible chain / non-alternating partition,
4 parse, IO or usage error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .chain_model import (
    ChainModel,
    InvariantError,
    ModelError,
    TieError,
    parse_model,
    perturb_ties,
    read_model,
    validate,
)
from .dot import to_dot
from .limit_cycle import greedy_walk, limit_of
from .reinforcement_sim import SimConfig, run
from .sojourn import (
    NonAlternatingError,
    Partition,
    ReducibleChainError,
    cycle_sojourn,
    monte_carlo_sojourn,
    stationary_sojourn,
)

EXIT_OK, EXIT_INVALID, EXIT_TIE, EXIT_NOCONV, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _num(x: float) -> str:
    return f"{x:.17g}"


def _emit(args, human: list[str], machine: list[tuple[str, object]]) -> None:
    if args.machine:
        for key, value in machine:
            if isinstance(value, float):
                value = _num(value)
            print(f"{key}={value}")
    else:
        print("\n".join(human))


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load(path: str) -> ChainModel:
    return parse_model(_read_text(path))


def _state(model: ChainModel, name: str) -> int:
    try:
        return model.index(name)
    except KeyError:
        raise UsageError(f"unknown state {name!r}; states are {' '.join(model.names)}") from None


def cmd_validate(args) -> int:
    model = read_model(_read_text(args.model))
    report = validate(model)
    errors = [i for i in report.issues if i.severity == "error"]
    ties = report.ties
    human = [f"{i.severity}: {i.locator}: {i.message}" for i in report.issues]
    summary = f"{model.n} states, {len(ties)} tie warnings"
    if errors:
        summary += f", {len(errors)} errors"
    human.append(summary)
    human.append("ok" if report.ok else "INVALID")
    machine = [
        ("ok", str(report.ok).lower()),
        ("states", model.n),
        ("errors", len(errors)),
        ("tie_warnings", len(ties)),
    ]
    machine += [(f"issue.{k}", f"{i.severity}|{i.locator}|{i.message}") for k, i in enumerate(report.issues)]
    _emit(args, human, machine)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_limit(args) -> int:
    model = _load(args.model)
    if args.perturb is not None:
        try:
            model = perturb_ties(model, args.perturb)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    starts = range(model.n) if args.all_starts else [_state(model, args.start)]
    human, machine = [], []
    for s in starts:
        path = greedy_walk(model, s)
        cyc = limit_of(model, s)
        name = model.names[s]
        line = f"{name}: {cyc.format(model, path.entry)}"
        if path.tail:
            line += "  (tail: " + " -> ".join(model.names[t] for t in path.tail) + ")"
        human.append(line)
        machine.append((f"limit.{name}", ",".join(cyc.names(model))))
        machine.append((f"entry.{name}", model.names[path.entry]))
        machine.append((f"tail.{name}", ",".join(model.names[t] for t in path.tail)))
    _emit(args, human, machine)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _load(args.model)
    start = _state(model, args.start) if args.start is not None else 0
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    try:
        configs = [
            SimConfig(
                epsilon=args.epsilon,
                seed=args.seed + k,
                max_events=args.max_events,
                delta=args.delta,
                start=start,
            )
            for k in range(args.runs)
        ]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    greedy = limit_of(model, start)
    results = [run(model, cfg) for cfg in configs]
    converged = [r for r in results if r.converged]
    agree = sum(r.realized == greedy for r in converged)
    frac = agree / len(converged) if converged else 0.0
    human, machine = [], []
    for r in results:
        if r.converged:
            human.append(
                f"seed {r.seed}: converged after {r.events_used} events, "
                f"cycle {r.realized.format(model)}"
            )
        else:
            human.append(f"seed {r.seed}: not converged after {r.events_used} events")
        machine.append((f"run.{r.seed}.converged", str(r.converged).lower()))
        machine.append((f"run.{r.seed}.events", r.events_used))
        machine.append((f"run.{r.seed}.cycle", ",".join(r.realized.names(model)) if r.converged else ""))
    human.append(f"greedy limit: {greedy.format(model)}")
    human.append(f"{len(converged)}/{len(results)} converged")
    human.append(f"agreement with greedy limit: {agree}/{len(converged)} ({frac:.4f})")
    machine = [
        ("runs", len(results)),
        ("converged", len(converged)),
        ("agree", agree),
        ("agreement_fraction", float(frac)),
        ("greedy_cycle", ",".join(greedy.names(model))),
    ] + machine
    _emit(args, human, machine)
    return EXIT_OK if len(converged) == len(results) else EXIT_NOCONV


def cmd_sojourn(args) -> int:
    model = _load(args.model)
    good = [g for g in args.good.split(",") if g]
    idx = [_state(model, g) for g in good]
    try:
        part = Partition(frozenset(idx), model.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.mode == "stationary":
        rep = stationary_sojourn(model, part)
        extra = [("residual", rep.detail["residual"])]
    elif args.mode == "cycle":
        start = _state(model, args.start) if args.start is not None else 0
        rep = cycle_sojourn(model, limit_of(model, start), part)
        extra = [("cycle", ",".join(rep.detail["cycle"]))]
        if "note" in rep.detail:
            extra.append(("note", rep.detail["note"]))
    else:
        if args.entries < 100:
            raise UsageError("--entries must be >= 100")
        rep = monte_carlo_sojourn(model, part, seed=args.seed, entries=args.entries)
        extra = [
            ("replications", rep.detail["replications"]),
            ("se_good", rep.detail["se_good"]),
            ("se_bad", rep.detail["se_bad"]),
            ("seed", args.seed),
        ]
    human = [
        f"s(G)={rep.s_good:.12g} s(Gc)={rep.s_bad:.12g} STC={rep.stc:.12g}",
        f"method: {rep.method}",
    ]
    human += [f"{k}: {v:.6g}" if isinstance(v, float) else f"{k}: {v}" for k, v in extra]
    machine = [("method", rep.method), ("s_good", rep.s_good), ("s_bad", rep.s_bad), ("stc", rep.stc)] + extra
    _emit(args, human, machine)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    model = _load(args.model)
    cycle = limit_of(model, _state(model, args.cycle_from)) if args.cycle_from is not None else None
    text = to_dot(model, cycle)
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc.strerror or exc}") from exc
    edges = text.count(" -> ")
    bold = text.count("style=dashed")
    _emit(
        args,
        [f"wrote {args.output}: {model.n} nodes, {edges} edges, {bold} cycle edges"],
        [("output", args.output), ("nodes", model.n), ("edges", edges), ("cycle_edges", bold)],
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mclim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("model", help="model file")
        p.add_argument("--machine", action="store_true", help="print key=value lines instead of text")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a model file")

    p = add("limit", cmd_limit, "greedy limit cycle per start state")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--start", metavar="NAME")
    g.add_argument("--all-starts", action="store_true")
    p.add_argument("--perturb", type=float, metavar="MAG", help="break tied row maxima first")

    p = add("simulate", cmd_simulate, "reinforced-chain simulation replicas")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--max-events", type=int, default=10**6)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--start", metavar="NAME")

    p = add("sojourn", cmd_sojourn, "sojourn time cycle for a partition")
    p.add_argument("--good", required=True, metavar="LIST", help="comma-separated good states")
    p.add_argument("--mode", choices=["stationary", "cycle", "mc"], default="stationary")
    p.add_argument("--start", metavar="NAME")
    p.add_argument("--entries", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("export-dot", cmd_export_dot, "write the transition network as DOT")
    p.add_argument("--cycle-from", metavar="NAME")
    p.add_argument("-o", "--output", metavar="PATH")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mclim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"mclim: invalid model: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ModelError as exc:
        print(f"mclim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TieError as exc:
        print(f"mclim: {exc} (use --perturb MAG, e.g. --perturb 1e-9)", file=sys.stderr)
        return EXIT_TIE
    except (ReducibleChainError, NonAlternatingError) as exc:
        print(f"mclim: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
