"""Command-line entry point: ``clonehunt <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .detector import (
    DetectionConfig,
    DetectionError,
    GroundTruthOracle,
    StochasticOracle,
    detect,
)
from .evaluation import (
    CloneInjectionSpec,
    alpha_sweep,
    evaluate,
    inject_clone,
    sweep_to_csv,
    sweep_to_json,
)
from .graph import GraphError, load_graph, save_graph, validate
from .mcl import MclParams, run_mcl, write_history_csv
from .similarity import augmented_adjacency, compute_k
from .weights import weigh_graph

log = logging.getLogger("clonehunt")

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clonehunt", description="Detect cloned profiles in a social graph.")
    p.add_argument("--threads", type=int, default=1, help="cap on internal parallelism (output is unaffected)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def dataset(sp):
        sp.add_argument("dataset", help="CSV dataset directory or JSON file")

    def out(sp):
        sp.add_argument("--out", "-o", help="output file (default: stdout)")

    def mcl_opts(sp):
        sp.add_argument("--inflation", type=float, default=2.0)
        sp.add_argument("--prune", type=float, default=1e-4, help="prune threshold")
        sp.add_argument("--max-iterations", type=int, default=100)

    s = sub.add_parser("validate", help="print dataset statistics")
    dataset(s)
    out(s)

    s = sub.add_parser("cluster", help="attribute-augmented MCL clustering")
    dataset(s)
    s.add_argument("--alpha", type=float, required=True)
    mcl_opts(s)
    s.add_argument("--history", help="write per-iteration convergence CSV here")
    out(s)

    s = sub.add_parser("detect", help="suspect report for one victim")
    dataset(s)
    s.add_argument("--victim", type=int, required=True)
    s.add_argument("--alpha", type=float, default=0.68)
    s.add_argument("--name-threshold", type=float, default=0.75)
    s.add_argument("--oracle", default="none", help="none | ground-truth | stochastic:TP,FP")
    s.add_argument("--truth", help="truth JSON (default: <dataset>/truth.json)")
    s.add_argument("--stop-policy", choices=["exhaustive", "first_hit"], default="exhaustive")
    s.add_argument("--seed", type=int, default=None)
    mcl_opts(s)
    out(s)

    s = sub.add_parser("inject", help="add a forged clone to a dataset")
    dataset(s)
    s.add_argument("--victim", type=int, required=True)
    s.add_argument("--spec", required=True, help="clone injection spec JSON")
    s.add_argument("--out", required=True, help="output dataset directory")
    s.add_argument("--seed", type=int, default=None)

    s = sub.add_parser("eval", help="TP/FP over the victims of a truth file")
    dataset(s)
    s.add_argument("--truth", required=True)
    s.add_argument("--victims", default="all", help="'all' or comma-separated ids")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--alpha", type=float, default=0.68)
    s.add_argument("--name-threshold", type=float, default=0.75)
    s.add_argument("--oracle", default="stochastic:0.9,0.1", help="ground-truth | stochastic:TP,FP")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    mcl_opts(s)
    out(s)

    s = sub.add_parser("sweep", help="K, clusters and similarity rates for several alphas")
    dataset(s)
    s.add_argument("--alphas", type=_float_list, required=True)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    mcl_opts(s)
    out(s)

    s = sub.add_parser("weights", help="dump per-edge interaction weights as CSV")
    dataset(s)
    s.add_argument("--out", "-o", required=True)
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(path):
    try:
        return load_graph(path)
    except GraphError as exc:
        raise DataError(str(exc)) from exc


def _mcl(args) -> MclParams:
    try:
        return MclParams(inflation=args.inflation, prune_threshold=args.prune, max_iterations=args.max_iterations)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def read_truth(path) -> dict[int, int]:
    """Parse ``{"clones": [{"id": c, "victim": v}, ...]}`` into ``{clone: victim}``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return {int(r["id"]): int(r["victim"]) for r in doc["clones"]}
    except FileNotFoundError:
        raise DataError(f"{path}: missing file") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed truth file ({exc})") from None


def write_truth(truth: dict[int, int], path) -> None:
    doc = {"clones": [{"id": c, "victim": v} for c, v in sorted(truth.items())]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _seed(args) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    print(f"seed={seed}", file=sys.stderr)
    return seed


def _oracle(spec: str, truth_path, seed: int):
    if spec == "none":
        return None
    if truth_path is None or not Path(truth_path).exists():
        raise UsageError(f"--oracle {spec} needs a truth file (--truth)")
    clones = read_truth(truth_path)
    if spec == "ground-truth":
        return GroundTruthOracle(clones)
    if spec.startswith("stochastic:"):
        try:
            tp, fp = (float(x) for x in spec.split(":", 1)[1].split(","))
            return StochasticOracle(clones, tp, fp, seed)
        except ValueError:
            pass
    raise UsageError(f"bad --oracle value {spec!r}")


def _config(args, oracle) -> DetectionConfig:
    try:
        return DetectionConfig(
            alpha=args.alpha,
            mcl=_mcl(args),
            name_threshold=args.name_threshold,
            oracle=oracle,
            stop_policy=getattr(args, "stop_policy", "exhaustive"),
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_validate(args):
    rep = validate(_load(args.dataset))
    _emit(json.dumps(rep.to_dict(), indent=2), args.out)


def cmd_cluster(args):
    params = _mcl(args)
    g = _load(args.dataset)
    W = augmented_adjacency(g, args.alpha, workers=args.threads)
    cs = run_mcl(W, params, threads=args.threads)
    doc = {"alpha": args.alpha, "K": compute_k(args.alpha, g.edge_count), **cs.to_dict()}
    if args.history:
        write_history_csv(cs.history, args.history)
    _emit(json.dumps(doc, indent=2), args.out)


def cmd_detect(args):
    seed = _seed(args)
    truth = args.truth or str(Path(args.dataset) / "truth.json")
    oracle = _oracle(args.oracle, truth if args.oracle != "none" else None, seed)
    config = _config(args, oracle)
    g = _load(args.dataset)
    if args.victim not in g:
        raise DataError(f"victim {args.victim} is not in the dataset")
    report = detect(g, args.victim, config)
    _emit(report.to_json(), args.out)


def cmd_inject(args):
    try:
        doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        doc["victim"] = args.victim
        if args.seed is not None:
            doc["seed"] = args.seed
        spec = CloneInjectionSpec.from_dict(doc)
    except FileNotFoundError:
        raise DataError(f"{args.spec}: missing file") from None
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise DataError(f"{args.spec}: invalid spec ({exc})") from None
    print(f"seed={spec.seed}", file=sys.stderr)
    src = Path(args.dataset)
    g = _load(src)
    try:
        new, clone = inject_clone(g, spec)
    except (KeyError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    truth_src = (src if src.is_dir() else src.parent) / "truth.json"
    truth = read_truth(truth_src) if truth_src.exists() else {}
    truth[clone] = spec.victim
    out = Path(args.out)
    save_graph(new, out)
    write_truth(truth, out / "truth.json")
    print(json.dumps({"clone": clone, "victim": spec.victim}))


def cmd_eval(args):
    seed = _seed(args)
    oracle = _oracle(args.oracle, args.truth, seed)
    config = _config(args, oracle)
    truth = read_truth(args.truth)
    g = _load(args.dataset)
    if args.victims == "all":
        victims = sorted(set(truth.values()))
    else:
        try:
            victims = [int(x) for x in args.victims.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad --victims value {args.victims!r}") from None
    unknown = [v for v in victims if v not in g]
    if unknown:
        raise DataError(f"victims not in dataset: {unknown}")
    rep = evaluate(g, truth, victims, config)
    if args.format == "csv":
        _emit(rep.to_csv(), args.out)
    else:
        _emit(json.dumps({"seed": seed, **rep.to_dict()}, indent=2), args.out)


def cmd_sweep(args):
    if not args.alphas:
        raise UsageError("--alphas must list at least one value")
    params = _mcl(args)
    rows = alpha_sweep(_load(args.dataset), args.alphas, params)
    _emit(sweep_to_csv(rows) if args.format == "csv" else sweep_to_json(rows), args.out)


def cmd_weights(args):
    weigh_graph(_load(args.dataset)).to_csv(args.out)


COMMANDS = {
    "validate": cmd_validate,
    "cluster": cmd_cluster,
    "detect": cmd_detect,
    "inject": cmd_inject,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "weights": cmd_weights,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    if args.threads < 1:
        print("clonehunt: error: --threads must be >= 1", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"clonehunt: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, DetectionError) as exc:
        print(f"clonehunt: data error: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
