# osim/cli.py
"""Command-line entry point: ``osim list | gen check | sample | verify | verify-all | serve``."""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from osim import __version__
from osim.config import app_settings, setup_logging
from osim.core.copulagen import builtin_names, check_condition, make_generator
from osim.core.exceptions import ConfigParseError, OsimError
from osim.core.harness import list_scenarios, load_experiments, run_batch
from osim.core.ordered_models import sample_many
from osim.core.scenarios import CATALOG, model_from_config
from osim.models.config_models import BatchConfig, parse_experiment, read_config_file
from osim.models.verdict_models import ConditionId

logger = logging.getLogger(__name__)


def _parse_floats(text: Optional[str]) -> List[float]:
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigParseError(f"--params must be comma-separated numbers, got '{text}'", field="params") from e


def _cmd_list(args) -> int:
    infos = list_scenarios()
    if args.json:
        for info in infos:
            print(info.model_dump_json())
        return 0
    for info in infos:
        print(f"{info.id:<7} {info.relation.value:<11} {info.method.value:<14} {info.statement}")
    return 0


def _cmd_gen_check(args) -> int:
    gen = make_generator(args.name, _parse_floats(args.params))
    conditions = [ConditionId(args.condition)] if args.condition else list(ConditionId)
    for cond in conditions:
        if cond == ConditionId.GR_DIFF_POS_INC and args.n is None:
            if args.condition:
                raise ConfigParseError(f"{cond.value} needs --n", field="n")
            continue
        verdict = check_condition(gen, cond, n=args.n if cond == ConditionId.GR_DIFF_POS_INC else None)
        print(json.dumps({
            "condition": cond.value,
            "status": "HOLDS" if verdict.holds else "VIOLATED",
            "worst_point": verdict.worst_u,
            "worst_violation": max(0.0, -verdict.worst_margin),
        }))
    return 0


def _cmd_sample(args) -> int:
    data = read_config_file(args.model)
    data.setdefault("seed", args.seed)
    if args.n is not None:
        data.setdefault("model", {})["n"] = args.n
    config = parse_experiment(data)
    model = model_from_config(config)
    draws = sample_many(model, args.draws, args.seed, keys=("sample", model.tag))
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(1, model.n + 1)])
        for row in draws:
            writer.writerow([format(float(v), ".17g") for v in row])
    finally:
        if args.out:
            out.close()
    logger.info(f"Wrote {args.draws} draws of {model!r} to {args.out or 'stdout'}")
    return 0


def _cmd_verify(args) -> int:
    if args.config:
        configs = load_experiments(args.config, scenario=args.scenario)
    else:
        configs = [parse_experiment({"scenario": args.scenario, "seed": args.seed})]
    index, _ = run_batch(configs, args.out, args.workers)
    for entry in index.entries:
        print(f"{entry.scenario}: {entry.status.value if entry.status else 'ERROR'}"
              + (f" ({entry.error})" if entry.error else ""))
    return index.exit_code


def _cmd_verify_all(args) -> int:
    if args.config:
        configs = load_experiments(args.config)
    else:
        configs = BatchConfig(seed=args.seed).experiments(list(CATALOG))
    index, _ = run_batch(configs, args.out, args.workers)
    counts = {}
    for entry in index.entries:
        key = entry.status.value if entry.status else "ERROR"
        counts[key] = counts.get(key, 0) + 1
    print(", ".join(f"{k}: {v}" for k, v in sorted(counts.items())) + f" (exit {index.exit_code})")
    return index.exit_code


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("osim.main:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osim",
        description="Simulation and stochastic-order verification for ordered random vectors",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  osim list
  osim gen check --name gumbel --params 2 --condition R_RATIO_POS_INC
  osim sample --model model.json --draws 1000 --seed 7 --out draws.csv
  osim verify --scenario T4.4a --seed 42 --out reports
  osim verify-all --config batch.json --out reports
        """,
    )
    parser.add_argument("--version", action="version", version=f"osim {__version__}")
    parser.add_argument("--log-level", default=app_settings.LOG_LEVEL,
                        choices=["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"], type=str.upper)
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="List the scenario catalog")
    p_list.add_argument("--json", action="store_true", help="One JSON object per line")
    p_list.set_defaults(func=_cmd_list)

    p_gen = sub.add_parser("gen", help="Generator tools")
    gen_sub = p_gen.add_subparsers(dest="gen_command", required=True)
    p_check = gen_sub.add_parser("check", help="Check generator conditions; prints JSON lines")
    p_check.add_argument("--name", required=True, choices=builtin_names())
    p_check.add_argument("--params", default="", help="Comma-separated parameters, e.g. 2")
    p_check.add_argument("--condition", choices=[c.value for c in ConditionId])
    p_check.add_argument("--n", type=int, help="Dimension for GR_DIFF_POS_INC")
    p_check.set_defaults(func=_cmd_gen_check)

    p_sample = sub.add_parser("sample", help="Draw from a model described by a JSON config")
    p_sample.add_argument("--model", required=True, type=Path, help="JSON with generator, distributions, model")
    p_sample.add_argument("--draws", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--n", type=int, help="Override model.n")
    p_sample.add_argument("--out", type=Path, help="CSV file; stdout when omitted")
    p_sample.set_defaults(func=_cmd_sample)

    for name, func, help_text in (("verify", _cmd_verify, "Verify one scenario"),
                                  ("verify-all", _cmd_verify_all, "Verify every scenario of a batch")):
        p = sub.add_parser(name, help=help_text)
        if name == "verify":
            p.add_argument("--scenario", required=True)
        p.add_argument("--config", type=Path)
        p.add_argument("--seed", type=int, default=0, help="Master seed when no config is given")
        p.add_argument("--out", type=Path, default=app_settings.OUTPUT_DIR)
        p.add_argument("--workers", type=int, default=app_settings.WORKERS)
        p.set_defaults(func=func)

    p_serve = sub.add_parser("serve", help="Run the HTTP verification service")
    p_serve.add_argument("--host", default=app_settings.HOST)
    p_serve.add_argument("--port", type=int, default=app_settings.PORT)
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_level_str=args.log_level, log_dir=app_settings.LOG_DIR)
    try:
        return args.func(args)
    except ConfigParseError as e:
        logger.error(f"Config error{f' in {e.field}' if e.field else ''}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OsimError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
