"""Command-line entry point: gen, solve, roundtrip, eval, serve.

Every pipeline is reproducible from the seed and config alone. Flags
override config-file values, which override built-in defaults. Exit codes:
0 success, 1 domain error, 2 usage error.
"""

import argparse
import json
import random
import re
import sys
from typing import Any, Dict, List, Optional

from .datagen import GenParams, gen_inventory, gen_request, ingest_flight_csv
from .dataset import read_records, write_records
from .evaluate import EvalRecord, evaluate_corpus
from .milp import ModelParams, ObjectiveMode, parse_mode_weights
from .model import DateRange, Inventory, PlanningError, SymbolicRequest, exact_match
from .nl import TranslatorBackend, parse_nl, render_nl
from .plan import plan_request
from .solver import SolveStatus, SolverConfig


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise PlanningError(f"config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise PlanningError(f"config {path}: top level must be an object")
    return raw


def _model_params(config: Dict[str, Any], mode: Optional[str] = None) -> ModelParams:
    kwargs: Dict[str, Any] = {}
    for key in ("slot_minutes", "min_sleep_slots", "soft_penalty_weight",
                "night_start_min", "night_end_min", "max_span_days"):
        if key in config:
            try:
                kwargs[key] = int(config[key])
            except (TypeError, ValueError):
                raise PlanningError(f"config.{key}: expected an integer") from None
    if "mode_weights" in config:
        try:
            kwargs["mode_weights"] = parse_mode_weights(config["mode_weights"])
        except ValueError as exc:
            raise PlanningError(f"config.mode_weights: {exc}") from None
    if mode:
        kwargs["objective_mode"] = ObjectiveMode(mode)
    try:
        return ModelParams(**kwargs)
    except ValueError as exc:
        raise PlanningError(f"config: {exc}") from None


def _solver_config(config: Dict[str, Any]) -> SolverConfig:
    kwargs: Dict[str, Any] = {}
    if "time_limit_ms" in config:
        kwargs["time_limit_ms"] = int(config["time_limit_ms"])
    if "node_limit" in config:
        kwargs["node_limit"] = int(config["node_limit"])
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise PlanningError(f"config: {exc}") from None


def _backend_from_flag(value: str) -> TranslatorBackend:
    if value == "template":
        return TranslatorBackend()
    if value.startswith("endpoint:"):
        return TranslatorBackend(url=value.split(":", 1)[1])
    raise PlanningError(f"unknown backend {value!r}; use template or endpoint:URL")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_gen(args, config: Dict[str, Any]) -> int:
    gen_kwargs: Dict[str, Any] = {"rng_seed": args.seed}
    if args.csv:
        if not args.column_map:
            raise PlanningError("--csv requires --column-map")
        with open(args.column_map, encoding="utf-8") as handle:
            column_map = json.load(handle)
        gen_kwargs["base_table"] = ingest_flight_csv(args.csv, column_map)
    for key in ("one_way_fraction", "three_city_fraction", "price_noise_sigma"):
        if key in config:
            gen_kwargs[key] = float(config[key])
    for key in ("flights_per_leg", "hotels_per_city", "leg_gap_days"):
        if key in config:
            gen_kwargs[key] = tuple(config[key])
    if "date_horizon" in config:
        gen_kwargs["date_horizon"] = DateRange.from_json(config["date_horizon"], "date_horizon")
    params = GenParams(**gen_kwargs)

    noise_rng = random.Random(args.seed ^ 0xD1CE)
    records: List[EvalRecord] = []
    corrupted = 0
    for index in range(args.count):
        request = gen_request(params, index)
        inventory = gen_inventory(params, request)
        nl_text = render_nl(request, variant_seed=index)
        if args.simulate_noise > 0 and noise_rng.random() < args.simulate_noise:
            swapped = _swap_rendered_dates(nl_text)
            if swapped is not None:
                nl_text = swapped
                corrupted += 1
        records.append(EvalRecord(
            request=request, inventory=inventory, nl_text=nl_text,
            record_id=f"{args.seed}-{index}"))
    count = write_records(args.out, records)
    payload = {"written": count, "path": args.out}
    if args.simulate_noise > 0:
        payload["date_swapped"] = corrupted
    _emit(args, payload)
    return 0


_RENDERED_DATE_RE = re.compile(
    r"(?:January|February|March|April|May|June|July|August|September|October|"
    r"November|December) \d{1,2}(?:st|nd|rd|th), \d{4}")


def _swap_rendered_dates(text: str) -> Optional[str]:
    """Swap the first two leg dates in a rendered request, reproducing the
    date-ordering inconsistency a sloppy translator would emit. The result
    fails request validation downstream, which is the point."""
    matches = list(_RENDERED_DATE_RE.finditer(text))
    if len(matches) < 2 or matches[0].group() == matches[1].group():
        return None
    first, second = matches[0], matches[1]
    return (text[:first.start()] + second.group()
            + text[first.end():second.start()] + first.group()
            + text[second.end():])


def _cmd_solve(args, config: Dict[str, Any]) -> int:
    with open(args.instance, encoding="utf-8") as handle:
        raw = json.load(handle)
    request = SymbolicRequest.from_json(raw["request"])
    inventory = Inventory.from_json(raw["inventory"])
    params = _model_params(config, args.mode)
    outcome = plan_request(request, inventory, params, _solver_config(config))

    payload: Dict[str, Any] = {"mode": args.mode, "status": outcome.status.value}
    if outcome.status is SolveStatus.OPTIMAL:
        payload["objective"] = outcome.solve_result.objective
        payload["itinerary"] = outcome.itinerary.to_json()
    else:
        payload["reason"] = outcome.infeasible_reason
    if args.dump_stats:
        payload["stats"] = outcome.solve_result.stats.to_json()
    _emit(args, payload, pretty_ok=True)
    return 0 if outcome.status is SolveStatus.OPTIMAL else 1


def _cmd_roundtrip(args, config: Dict[str, Any]) -> int:
    records = read_records(args.infile)
    mismatches: List[Dict[str, Any]] = []
    parse_failures = 0
    for record in records:
        try:
            recovered = parse_nl(record.nl_text)
        except PlanningError as exc:
            parse_failures += 1
            mismatches.append({"id": record.record_id, "error": str(exc)})
            continue
        match = exact_match(record.request, recovered)
        if not match.is_match:
            mismatches.append({"id": record.record_id,
                               "fields": list(match.mismatched_fields)})
    total = len(records)
    matched = total - len(mismatches)
    report = {
        "count": total,
        "em_accuracy": matched / total if total else None,
        "valid_output_rate": (total - parse_failures) / total if total else None,
        "mismatches": mismatches,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(report, handle, indent=2)
    _emit(args, {k: report[k] for k in ("count", "em_accuracy", "valid_output_rate")}
          | {"mismatch_count": len(mismatches)})
    return 0 if not mismatches else 1


def _cmd_eval(args, config: Dict[str, Any]) -> int:
    records = read_records(args.data)
    backend = _backend_from_flag(args.backend)
    report = evaluate_corpus(
        records, backend, subsets=args.subsets,
        params=_model_params(config), cfg=_solver_config(config),
        with_scores=not args.skip_scores)
    payload = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
    if args.emit_markdown:
        sys.stdout.write(report.to_markdown())
    else:
        _emit(args, {"count": payload["count"],
                     "em_accuracy": payload["em_accuracy"],
                     "valid_output_rate": payload["valid_output_rate"],
                     "score_mean": payload["score_mean"],
                     "score_std": payload["score_std"]})
    return 0


def _cmd_serve(args, config: Dict[str, Any]) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    service_cfg = ServiceConfig.from_dict(config)
    if args.dataset:
        service_cfg.inventory_mode = "dataset"
        service_cfg.dataset_path = args.dataset
    if args.ui:
        service_cfg.ui_dir = args.ui
    app = create_app(service_cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _emit(args, payload: Dict[str, Any], pretty_ok: bool = False) -> None:
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(payload) + "\n")
    elif pretty_ok:
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        for key, value in payload.items():
            sys.stdout.write(f"{key}: {value}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripsolve",
        description="Itinerary planning: generate benchmarks, solve, round-trip, evaluate, serve.")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config file; flags override its values")
    shared.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a benchmark dataset", parents=[shared])
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--count", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--csv", help="flight CSV to use as a statistical base")
    p_gen.add_argument("--column-map", help="JSON file mapping flight fields to CSV columns")
    p_gen.add_argument("--simulate-noise", type=float, default=0.0, metavar="P",
                       help="swap leg dates in this fraction of NL texts to "
                            "exercise the evaluation pipeline's failure paths")
    p_gen.set_defaults(func=_cmd_gen)

    p_solve = sub.add_parser("solve", help="solve one {request, inventory} instance", parents=[shared])
    p_solve.add_argument("--instance", required=True)
    p_solve.add_argument("--mode", default="min_cost",
                         choices=[m.value for m in ObjectiveMode])
    p_solve.add_argument("--dump-stats", action="store_true")
    p_solve.set_defaults(func=_cmd_solve)

    p_round = sub.add_parser("roundtrip", help="NL round-trip a dataset and report EM", parents=[shared])
    p_round.add_argument("--in", dest="infile", required=True)
    p_round.add_argument("--report")
    p_round.set_defaults(func=_cmd_roundtrip)

    p_eval = sub.add_parser("eval", help="self-consistency evaluation of a corpus", parents=[shared])
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--backend", default="template",
                        help="template or endpoint:URL")
    p_eval.add_argument("--subsets", type=int, default=8)
    p_eval.add_argument("--out")
    p_eval.add_argument("--skip-scores", action="store_true")
    p_eval.add_argument("--emit-markdown", action="store_true")
    p_eval.set_defaults(func=_cmd_eval)

    p_serve = sub.add_parser("serve", help="run the planning HTTP service", parents=[shared])
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--dataset", help="JSON-lines dataset to load as inventory")
    p_serve.add_argument("--ui", help="built frontend directory to serve at /ui")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except PlanningError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
