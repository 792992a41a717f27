#!/usr/bin/env python3
"""
Fuzzy Learning Agent Runner Script
Main entry point: dataset generation, knowledge-base learning, Part-2
accuracy comparison, single inference and the agent service.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config import config
from core.exceptions import FuzzyAgentError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LONG_RUN_GENERATIONS = (1000, 2000, 3000)


def setup_logging(level: str):
    """Logs go to stderr (and LOG_FILE when set); stdout carries results."""
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE))
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT,
                        handlers=handlers, force=True)


def positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return number


def non_negative_float(value: str) -> float:
    number = float(value)
    if not math.isfinite(number) or number < 0:
        raise argparse.ArgumentTypeError(f"must be a finite non-negative number, got {value}")
    return number


def finite_float(value: str) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise argparse.ArgumentTypeError(f"must be a finite number, got {value}")
    return number


def load_part1_kb(source):
    """'before' (or nothing) means the baseline system; anything else is an FML path."""
    from core.fuzzy_system import baseline_part1_system
    from data.fml_io import load_fml

    if source in (None, "before"):
        return baseline_part1_system()
    return load_fml(source)


def cmd_gen_data(args) -> int:
    from data.dataset_generator import gen_rlcr_dataset, gen_slp_dataset
    from data.dataset_io import write_csv_dataset

    seed = config.SEED if args.seed is None else args.seed
    n = config.RECORD_COUNT if args.n is None else args.n
    if args.stage == "part1":
        dataset = gen_slp_dataset(n, seed, noise_sigma=args.noise)
    else:
        dataset = gen_rlcr_dataset(n, seed, include_published_rows=args.include_paper_rows)
    write_csv_dataset(dataset, args.out)
    print(f"Wrote {len(dataset)} {args.stage} records to {args.out}")
    return 0


def _part1_dataset(args, seed):
    from data.dataset_generator import gen_slp_dataset
    from data.dataset_io import read_csv_dataset

    if args.data:
        return read_csv_dataset(args.data, expected_inputs=["SA", "LCD", "SCL", "STS"])
    logger.info(f"No --data given, generating {config.RECORD_COUNT} records with seed {seed}")
    return gen_slp_dataset(config.RECORD_COUNT, seed)


def cmd_part1(args) -> int:
    from analysis.cross_validation import cross_validate
    from analysis.learning import LearnConfig
    from data.fml_io import save_fml
    from utils.report_writer import write_history, write_report

    method = args.method.upper()
    learn_config = LearnConfig.from_config(
        method, generations=args.generations, seed=args.seed, population_size=args.population,
        k_folds=args.folds, workers=args.workers)
    dataset = _part1_dataset(args, learn_config.seed)
    out_dir = Path(args.out_dir)
    template = load_part1_kb(args.part1_kb)

    runs = LONG_RUN_GENERATIONS if args.paper_scale else (learn_config.generations,)
    for generations in runs:
        run_config = LearnConfig(**{**learn_config.to_dict(), "generations": generations})
        stem = f"part1_{method.lower()}" + (f"_g{generations}" if args.paper_scale else "")
        report = cross_validate(dataset, run_config, template=template)
        write_report(report, out_dir / f"{stem}_report.json",
                     extra={"method": method, "records": len(dataset), "data": args.data})
        write_history(report, out_dir / f"{stem}_history.csv")
        save_fml(report.best_system, out_dir / f"{stem}_learned.fml")
        print(f"{method} {generations} generations: before MSE {report.before_mse:.6f}, "
              f"after MSE {report.after_mse:.6f}")
    return 0


def cmd_part2(args) -> int:
    from analysis.recommender import accuracy, build_part2_system, level_agreement, part2_records
    from data.dataset_generator import gen_rlcr_dataset
    from data.dataset_io import read_csv_dataset
    from utils.report_writer import write_frame, write_json

    threshold = config.ACCURACY_THRESHOLD if args.threshold is None else args.threshold
    if args.data:
        dataset = read_csv_dataset(args.data, expected_inputs=["SA", "SLP"])
    else:
        seed = config.SEED if args.seed is None else args.seed
        dataset = gen_rlcr_dataset(config.RECORD_COUNT, seed)
    system = build_part2_system(load_part1_kb(args.part1_kb))
    if args.metric == "level":
        score = level_agreement(system, dataset)
    else:
        score = accuracy(system, dataset, threshold)

    out_dir = Path(args.out_dir)
    write_json({
        "part1_kb": args.part1_kb or "before",
        "data": args.data,
        "records": len(dataset),
        "metric": args.metric,
        "threshold": threshold,
        "accuracy": score,
    }, out_dir / "part2_report.json")
    write_frame(part2_records(system, dataset, threshold, args.metric), out_dir / "part2_records.csv")
    print(f"accuracy {score:.4f} ({args.metric}) over {len(dataset)} records")
    return 0


def cmd_infer(args) -> int:
    from core.inference import infer
    from data.fml_io import format_number

    system = load_part1_kb(args.kb)
    result = infer(system, {"SA": args.sa, "LCD": args.lcd, "SCL": args.scl, "STS": args.sts})
    print(f"{format_number(result.crisp_value)} {result.winning_term}")
    return 0


def cmd_serve(args) -> int:
    from app.agent_server import serve
    from data.content_graph import load_content_graph, sample_content_graph
    from data.fml_io import load_fml

    part1 = load_part1_kb(args.part1_kb)
    part2 = load_fml(args.part2_kb) if args.part2_kb else None
    graph = load_content_graph(args.content_graph) if args.content_graph else sample_content_graph()
    bind = args.bind or config.SERVICE_BIND
    config.parse_bind(bind)

    def banner(server):
        print(f"Agent service listening on {server.bound_address}", flush=True)

    serve(bind, part1, part2, graph, on_ready=banner)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="runner.py", description="Fuzzy learning agent experiments")
    parser.add_argument("--config", help=".env-style settings file (flags win)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-data", help="Write a synthetic dataset to CSV")
    gen.add_argument("--stage", choices=["part1", "part2"], default="part1")
    gen.add_argument("--n", type=positive_int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--noise", type=non_negative_float, help="Part-1 label noise sigma")
    gen.add_argument("--include-paper-rows", action="store_true",
                     help="Prefix Part-2 data with the 15 published (SA, SLP) rows")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_data)

    part1 = sub.add_parser("part1", help="Learn the Part-1 knowledge base with K-fold evaluation")
    part1.add_argument("--method", choices=["ga", "pso", "GA", "PSO"], default="pso")
    part1.add_argument("--generations", type=positive_int)
    part1.add_argument("--population", type=positive_int, help="GA population or PSO swarm size")
    part1.add_argument("--folds", type=int)
    part1.add_argument("--workers", type=positive_int)
    part1.add_argument("--seed", type=int)
    part1.add_argument("--data", help="Part-1 CSV (generated when omitted)")
    part1.add_argument("--part1-kb", help="Starting FML knowledge base (baseline when omitted)")
    part1.add_argument("--paper-scale", action="store_true",
                       help="Run 1000, 2000 and 3000 generations instead of --generations")
    part1.add_argument("--out-dir", default="results")
    part1.set_defaults(func=cmd_part1)

    part2 = sub.add_parser("part2", help="Score the Part-2 system built from a Part-1 knowledge base")
    part2.add_argument("--part1-kb", default="before", help="'before' or a learned FML path")
    part2.add_argument("--data", help="Part-2 CSV (generated when omitted)")
    part2.add_argument("--seed", type=int)
    part2.add_argument("--threshold", type=non_negative_float)
    part2.add_argument("--metric", choices=["threshold", "level"], default="threshold")
    part2.add_argument("--out-dir", default="results")
    part2.set_defaults(func=cmd_part2)

    inf = sub.add_parser("infer", help="Infer SLP for one student")
    inf.add_argument("--kb", help="FML knowledge base (baseline when omitted)")
    for name in ("sa", "lcd", "scl", "sts"):
        inf.add_argument(f"--{name}", type=finite_float, required=True)
    inf.set_defaults(func=cmd_infer)

    srv = sub.add_parser("serve", help="Run the agent service")
    srv.add_argument("--bind", help="host:port (default SERVICE_BIND)")
    srv.add_argument("--part1-kb")
    srv.add_argument("--part2-kb",
                     help="Part-2 FML (derived from the Part-1 KB, and rebuilt on part1 reloads, when omitted)")
    srv.add_argument("--content-graph")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.config:
        try:
            config.load_file(args.config)
        except FileNotFoundError as e:
            parser.error(str(e))
    setup_logging(args.log_level or config.LOG_LEVEL)

    problems = config.validate()
    if problems:
        for problem in problems:
            logger.error(f"Configuration problem: {problem}")
        print(f"error: invalid configuration: {problems[0]}", file=sys.stderr)
        return 1

    try:
        return args.func(args)
    except (FuzzyAgentError, OSError, ValueError) as e:
        message = (str(e).splitlines() or [e.__class__.__name__])[0]
        logger.error(f"{args.command} failed: {message}")
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
