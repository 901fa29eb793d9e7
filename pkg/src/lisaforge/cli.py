"""Command-line driver: ``convert``, ``synth``, ``gen`` and ``selftest``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .bdd import BDD, DEFAULT_NODE_BUDGET
from .bench import FAMILIES, generate
from .composer import MODES, PRESETS, HybridComposer, Thresholds
from .errors import BudgetExceeded
from .explicit import DEFAULT_STATE_BUDGET, minimize
from .ltlf import read_formula, read_partition
from .symbolic import decode
from .synthesis import extract_strategy, simulate, winning_set

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2
EXIT_REALIZABLE = 10
EXIT_UNREALIZABLE = 20

log = logging.getLogger("lisaforge")


def _threshold(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer or 'inf', got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("thresholds must be non-negative")
    return v


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--ltlf", nargs="+", required=True, type=Path, metavar="FILE",
                   help="formula file(s); several files run as a batch")
    p.add_argument("--mode", choices=MODES, default="hybrid")
    p.add_argument("--preset", choices=sorted(PRESETS), default="default",
                   help="threshold preset (nim raises t2 to 300000)")
    p.add_argument("--t1", type=_threshold, help="override t1 (integer or inf)")
    p.add_argument("--t2", type=_threshold, help="override t2 (integer or inf)")
    p.add_argument("--stats", type=Path, metavar="OUT.json", help="write run statistics")
    p.add_argument("--trace", type=Path, metavar="OUT.jsonl", help="write the composer trace")
    p.add_argument("--sift", action="store_true", help="enable dynamic variable reordering")
    p.add_argument("--state-budget", type=int, default=DEFAULT_STATE_BUDGET)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for batches")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lisaforge",
                                     description="LTLf to DFA compilation and synthesis")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convert", help="build the DFA of a formula")
    _add_common(conv)
    conv.add_argument("--dot", type=Path, metavar="OUT.dot",
                      help="write the minimal explicit DFA in DOT format")

    syn = sub.add_parser("synth", help="decide realizability")
    _add_common(syn)
    syn.add_argument("--part", type=Path, metavar="FILE",
                     help="partition file (default: FILE.part next to each formula)")
    syn.add_argument("--simulate", type=Path, metavar="INPUTS.json",
                     help="play the strategy against a JSON list of input sets")

    gen = sub.add_parser("gen", help="write benchmark files")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("--n", type=int, help="bit width (counters)")
    gen.add_argument("--inc", action="store_true", help="counter gated by an input signal")
    gen.add_argument("--p", type=int, help="heaps (nim)")
    gen.add_argument("--q", type=int, help="tokens per heap (nim)")
    gen.add_argument("--depth", type=int, default=3)
    gen.add_argument("--props", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, default=Path("."))

    st = sub.add_parser("selftest", help="run the built-in oracle checks")
    st.add_argument("--quick", action="store_true")
    return parser


def _thresholds(args) -> Thresholds:
    base = PRESETS[args.preset]
    return Thresholds(base.t1 if args.t1 is None else args.t1,
                      base.t2 if args.t2 is None else args.t2)


def _composer(args) -> HybridComposer:
    bdd = BDD(node_budget=args.node_budget, auto_reorder=args.sift)
    return HybridComposer(_thresholds(args), args.mode, bdd=bdd,
                          state_budget=args.state_budget)


def _write_outputs(args, composer: HybridComposer, stats: dict):
    if args.stats:
        args.stats.write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for entry in composer.trace:
                fh.write(json.dumps(entry) + "\n")


def _base_stats(composer: HybridComposer, game) -> dict:
    s = composer.stats()
    s.update({"state_vars": game.num_state_vars, "iterations": None,
              "fixpoint_ms": None, "winning_set_nodes": None})
    return s


def run_convert(args, path: Path) -> tuple[int, str]:
    f = read_formula(path)
    composer = _composer(args)
    game = composer.compose(f)
    if args.sift:
        composer.bdd.reorder()
    stats = _base_stats(composer, game)
    _write_outputs(args, composer, stats)
    if getattr(args, "dot", None):
        d = composer.explicit_result or minimize(decode(game))
        args.dot.write_text(d.to_dot(path.stem), encoding="utf-8")
    line = (f"{path.name}: state_vars={game.num_state_vars} "
            f"explicit_products={composer.explicit_products} "
            f"symbolic_products={composer.symbolic_products}")
    return EXIT_OK, line


def run_synth(args, path: Path) -> tuple[int, str]:
    f = read_formula(path)
    part_path = args.part or path.with_suffix(".part")
    p = read_partition(part_path)
    p.check_covers(f)
    composer = _composer(args)
    composer.prop_order = p.inputs + p.outputs
    game = composer.compose(f)
    result = winning_set(game, p)
    stats = _base_stats(composer, game)
    stats.update({"iterations": result.iterations,
                  "fixpoint_ms": round(result.fixpoint_ms, 3),
                  "winning_set_nodes": result.winning_set_nodes,
                  "bdd_nodes_peak": max(composer.bdd.peak_nodes, len(composer.bdd))})
    _write_outputs(args, composer, stats)
    verdict = "REALIZABLE" if result.realizable else "UNREALIZABLE"
    out = [verdict]
    if args.simulate:
        if not result.realizable:
            raise ValueError("--simulate needs a realizable specification")
        inputs = json.loads(args.simulate.read_text(encoding="utf-8"))
        if not isinstance(inputs, list):
            raise ValueError("simulation inputs must be a JSON list of lists of names")
        sim = simulate(extract_strategy(game, result, p), [set(x) for x in inputs])
        out.append(json.dumps({"trace": [sorted(x) for x in sim.trace],
                               "accepted": sim.accepted, "steps": sim.steps}))
    return (EXIT_REALIZABLE if result.realizable else EXIT_UNREALIZABLE), "\n".join(out)


def _run_one(command: str, args, path: Path) -> tuple[int, str]:
    try:
        if command == "convert":
            return run_convert(args, path)
        return run_synth(args, path)
    except BudgetExceeded as e:
        return EXIT_BUDGET, f"{path.name}: budget exceeded: {e}"
    except (ValueError, OSError) as e:
        return EXIT_ERROR, f"{path.name}: error: {e}"


def _run_batch(args) -> int:
    paths = args.ltlf
    if len(paths) == 1:
        code, text = _run_one(args.command, args, paths[0])
        stream = sys.stderr if code in (EXIT_ERROR, EXIT_BUDGET) else sys.stdout
        print(text, file=stream)
        return code
    if args.stats or args.trace or getattr(args, "dot", None) or getattr(args, "simulate", None):
        print("error: --stats/--trace/--dot/--simulate need a single --ltlf file", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "synth" and args.part:
        print("error: batches read FILE.part next to each formula; drop --part", file=sys.stderr)
        return EXIT_ERROR
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = [_run_one(args.command, args, p) for p in paths]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, [args.command] * len(paths),
                                    [args] * len(paths), paths))
    codes = set()
    for path, (code, text) in zip(paths, results):
        if args.command == "synth" and code in (EXIT_REALIZABLE, EXIT_UNREALIZABLE):
            text = f"{path.name}: {text}"
        print(text)
        codes.add(code)
    # a batch reports problems only; per-file verdicts are on stdout
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return EXIT_BUDGET if EXIT_BUDGET in codes else EXIT_OK


def run_gen(args) -> int:
    fam = args.family
    if fam in ("counter", "double_counter"):
        if args.n is None:
            raise ValueError(f"{fam} needs --n")
        params = {"n": args.n, "inc": args.inc} if fam == "counter" else {"n": args.n}
    elif fam == "nim":
        if args.p is None or args.q is None:
            raise ValueError("nim needs --p and --q")
        params = {"p": args.p, "q": args.q}
    else:
        params = {"depth": args.depth, "num_props": args.props, "seed": args.seed}
    inst = generate(fam, **params)
    ltlf, part = inst.write(args.out)
    print(ltlf)
    print(part)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen":
            return run_gen(args)
        if args.command == "selftest":
            from .selftest import run_selftest
            return EXIT_OK if run_selftest(quick=args.quick) else EXIT_ERROR
        return _run_batch(args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
