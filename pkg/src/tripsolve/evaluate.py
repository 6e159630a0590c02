"""Self-consistency evaluation: exact match, quality ratio, breakdowns, timing.

The quality ratio of a reconstructed request is the true optimum's cost
divided by the cost (under the true request) of the optimum computed from
the reconstruction; infeasible reconstructions score 0, so the score always
lies in [0, 1] and equals 1 exactly on perfect translations.
"""

import statistics
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import random

from .milp import ModelParams
from .model import (
    CabinClass,
    Inventory,
    PlanningError,
    SymbolicRequest,
    TimeWindow,
    exact_match,
)
from .nl import TranslatorBackend, translate
from .plan import plan_request
from .simulate import evaluate_cost
from .solver import SolveStatus, SolverConfig


class GroundTruthInfeasible(PlanningError):
    """The ground-truth request itself has no feasible itinerary (generator bug)."""


class UnknownField(PlanningError):
    """corrupt_request was pointed at a field it cannot corrupt."""


@dataclass(frozen=True)
class EvalRecord:
    request: SymbolicRequest
    inventory: Inventory
    nl_text: str
    record_id: str = ""


@dataclass
class PhaseTiming:
    samples: List[float] = field(default_factory=list)

    def add(self, seconds: float) -> None:
        self.samples.append(seconds)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.samples) if self.samples else 0.0

    @property
    def std(self) -> float:
        return statistics.pstdev(self.samples) if len(self.samples) > 1 else 0.0

    def to_json(self) -> Dict[str, float]:
        return {"mean_s": self.mean, "std_s": self.std, "n": len(self.samples)}


@dataclass
class EvalReport:
    count: int = 0
    em_matches: int = 0
    valid_outputs: int = 0
    scores: List[float] = field(default_factory=list)
    subset_means: List[float] = field(default_factory=list)
    error_histogram: Counter = field(default_factory=Counter)
    # keyed by constraint/city count: {count_value: [matches, records]}
    breakdown_hotel: Dict[int, List[int]] = field(default_factory=dict)
    breakdown_airline: Dict[int, List[int]] = field(default_factory=dict)
    breakdown_cities: Dict[int, List[int]] = field(default_factory=dict)
    timings: Dict[str, PhaseTiming] = field(default_factory=dict)
    failures: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def em_accuracy(self) -> Optional[float]:
        return self.em_matches / self.count if self.count else None

    @property
    def valid_output_rate(self) -> Optional[float]:
        return self.valid_outputs / self.count if self.count else None

    @property
    def score_mean(self) -> Optional[float]:
        if self.subset_means:
            return statistics.fmean(self.subset_means)
        return statistics.fmean(self.scores) if self.scores else None

    @property
    def score_std(self) -> Optional[float]:
        if len(self.subset_means) > 1:
            return statistics.pstdev(self.subset_means)
        return None

    def to_json(self) -> Dict:
        def breakdown_json(table: Dict[int, List[int]]) -> Dict[str, Dict]:
            return {
                str(key): {"em": hits / total if total else None, "count": total}
                for key, (hits, total) in sorted(table.items())
            }

        return {
            "count": self.count,
            "em_accuracy": self.em_accuracy,
            "valid_output_rate": self.valid_output_rate,
            "score_mean": self.score_mean,
            "score_std": self.score_std,
            "subset_means": self.subset_means,
            "error_histogram": dict(sorted(self.error_histogram.items())),
            "breakdowns": {
                "hotel_constraints": breakdown_json(self.breakdown_hotel),
                "airline_constraints": breakdown_json(self.breakdown_airline),
                "cities": breakdown_json(self.breakdown_cities),
            },
            "timings": {phase: t.to_json() for phase, t in self.timings.items()},
            "failures": self.failures,
        }

    def to_markdown(self) -> str:
        lines = ["## Translation quality", "",
                 "| Metric | Value |", "| --- | --- |"]
        em = f"{self.em_accuracy:.1%}" if self.em_accuracy is not None else "n/a"
        valid = f"{self.valid_output_rate:.1%}" if self.valid_output_rate is not None else "n/a"
        lines.append(f"| EM accuracy | {em} |")
        lines.append(f"| Valid output | {valid} |")
        if self.score_mean is not None:
            std = f" +/- {self.score_std:.4f}" if self.score_std is not None else ""
            lines.append(f"| Quality score | {self.score_mean:.4f}{std} |")
        for title, table in (("hotel constraints", self.breakdown_hotel),
                             ("airline constraints", self.breakdown_airline),
                             ("cities", self.breakdown_cities)):
            if not table:
                continue
            lines += ["", f"## EM by number of {title}", "",
                      "| " + title + " | EM | # samples |", "| --- | --- | --- |"]
            for key in sorted(table):
                hits, total = table[key]
                acc = f"{hits / total:.1%}" if total else "n/a"
                lines.append(f"| {key} | {acc} | {total} |")
        if self.error_histogram:
            lines += ["", "## Error sources (mismatched fields)", "",
                      "| Field | Mismatches |", "| --- | --- |"]
            for fieldname, hits in self.error_histogram.most_common():
                lines.append(f"| {fieldname} | {hits} |")
        if self.timings:
            lines += ["", "## Phase timing", "",
                      "| Phase | Time (s) |", "| --- | --- |"]
            for phase, timing in self.timings.items():
                lines.append(f"| {phase} | {timing.mean:.3f} +/- {timing.std:.3f} |")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# quality ratio
# ---------------------------------------------------------------------------

def quality_score(request_true: SymbolicRequest, request_est: SymbolicRequest,
                  inventory: Inventory, params: Optional[ModelParams] = None,
                  cfg: Optional[SolverConfig] = None) -> float:
    """Ratio of the true optimal cost to the reconstructed plan's cost under
    the true request; 0 when the reconstruction is infeasible there."""
    params = params or ModelParams()
    cfg = cfg or SolverConfig()
    true_outcome = plan_request(request_true, inventory, params, cfg)
    if true_outcome.status is not SolveStatus.OPTIMAL:
        raise GroundTruthInfeasible(
            f"ground-truth request unsolvable: {true_outcome.status.value} "
            f"({true_outcome.infeasible_reason})")
    est_outcome = plan_request(request_est, inventory, params, cfg)
    if est_outcome.status is not SolveStatus.OPTIMAL or est_outcome.selection is None:
        return 0.0
    sim = evaluate_cost(est_outcome.selection, request_true, inventory, params)
    if not sim.feasible:
        return 0.0
    f_true = true_outcome.solve_result.objective
    f_est = sim.objective
    if f_est < f_true - 1e-6:
        raise PlanningError(
            f"internal: reconstruction beat the 'optimal' ground truth "
            f"({f_est} < {f_true}); solver bug")
    if f_est <= 0:
        return 1.0
    return min(1.0, f_true / f_est)


# ---------------------------------------------------------------------------
# corpus evaluation
# ---------------------------------------------------------------------------

def evaluate_corpus(records: Sequence[EvalRecord],
                    backend: Optional[TranslatorBackend] = None,
                    subsets: int = 8,
                    params: Optional[ModelParams] = None,
                    cfg: Optional[SolverConfig] = None,
                    with_scores: bool = True) -> EvalReport:
    """Translate every record's NL text, score EM and quality, and build the
    count-keyed breakdowns plus the per-field mismatch histogram."""
    params = params or ModelParams()
    cfg = cfg or SolverConfig()
    report = EvalReport()
    report.timings = {"translator": PhaseTiming(), "loading": PhaseTiming(),
                      "solving": PhaseTiming()}

    for record in records:
        report.count += 1
        truth = record.request
        t0 = time.perf_counter()
        try:
            result = translate(record.nl_text, backend)
        except PlanningError as exc:
            report.failures.append((record.record_id, str(exc)))
            report.scores.append(0.0)
            self_counts = truth.constraint_counts()
            _bump(report.breakdown_hotel, self_counts["hotel"], False)
            _bump(report.breakdown_airline, self_counts["airline"], False)
            _bump(report.breakdown_cities, len(set(truth.cities)), False)
            continue
        report.timings["translator"].add(time.perf_counter() - t0)
        if result.valid_json:
            report.valid_outputs += 1

        match = exact_match(truth, result.request)
        if match.is_match:
            report.em_matches += 1
        for path in match.mismatched_fields:
            report.error_histogram[path] += 1

        counts = truth.constraint_counts()
        _bump(report.breakdown_hotel, counts["hotel"], match.is_match)
        _bump(report.breakdown_airline, counts["airline"], match.is_match)
        _bump(report.breakdown_cities, len(set(truth.cities)), match.is_match)

        if with_scores:
            if match.is_match:
                # EM implies identical models; the ratio is 1 by definition
                report.scores.append(1.0)
                outcome = plan_request(truth, record.inventory, params, cfg)
                if outcome.status is not SolveStatus.OPTIMAL:
                    raise GroundTruthInfeasible(
                        f"record {record.record_id}: {outcome.infeasible_reason}")
                stats = outcome.solve_result.stats
                report.timings["loading"].add(stats.load_ms / 1000.0)
                report.timings["solving"].add(stats.solve_ms / 1000.0)
            else:
                report.scores.append(quality_score(
                    truth, result.request, record.inventory, params, cfg))

    if report.scores and subsets > 0:
        chunk = -(-len(report.scores) // subsets)
        report.subset_means = [
            statistics.fmean(report.scores[i:i + chunk])
            for i in range(0, len(report.scores), chunk)
        ]
    return report


def _bump(table: Dict[int, List[int]], key: int, hit: bool) -> None:
    slot = table.setdefault(key, [0, 0])
    slot[0] += 1 if hit else 0
    slot[1] += 1


# ---------------------------------------------------------------------------
# phase profiling
# ---------------------------------------------------------------------------

def profile_phases(request_nl: str, backend: Optional[TranslatorBackend],
                   inventory: Inventory, params: Optional[ModelParams] = None,
                   cfg: Optional[SolverConfig] = None,
                   repetitions: int = 5) -> Dict[str, PhaseTiming]:
    """Mean/std seconds per pipeline phase over repeated runs."""
    params = params or ModelParams()
    cfg = cfg or SolverConfig()
    timings = {"translator": PhaseTiming(), "loading": PhaseTiming(),
               "solving": PhaseTiming(), "solver_total": PhaseTiming()}
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = translate(request_nl, backend)
        timings["translator"].add(time.perf_counter() - t0)
        outcome = plan_request(result.request, inventory, params, cfg)
        stats = outcome.solve_result.stats
        timings["loading"].add(stats.load_ms / 1000.0)
        timings["solving"].add(stats.solve_ms / 1000.0)
        timings["solver_total"].add(stats.wall_ms / 1000.0)
    return timings


# ---------------------------------------------------------------------------
# corruption harness (controlled error injection for quality-ratio studies)
# ---------------------------------------------------------------------------

_CORRUPTIBLE_BOOLEANS = (
    "airline.refundable", "airline.nonstop_only", "airline.must_not_basic_economy",
    "airline.no_mixed_cabin", "airline.avoid_red_eye",
)
_CORRUPTIBLE_MONEY = (
    "airline.price_total_max", "hotel.daily_budget_max", "hotel.total_budget_max",
    "budget.total_budget", "budget.everyday_budget",
)
_CORRUPTIBLE_WINDOWS = ("airline.departure_time", "airline.arrival_time")
_CORRUPTIBLE_SETS = ("airline.plane_types", "airline.preferred_airlines", "hotel.brands")
CORRUPTIBLE_FIELDS = (_CORRUPTIBLE_BOOLEANS + _CORRUPTIBLE_MONEY + _CORRUPTIBLE_WINDOWS
                      + _CORRUPTIBLE_SETS + ("airline.cabin_class", "hotel.min_rating"))


def _replace_section(request: SymbolicRequest, section: str, **changes) -> SymbolicRequest:
    import dataclasses

    new_section = dataclasses.replace(getattr(request, section), **changes)
    return dataclasses.replace(request, **{section: new_section})


def corrupt_request(request: SymbolicRequest, field_path: str,
                    rng: Optional[random.Random] = None,
                    action: Optional[str] = None) -> SymbolicRequest:
    """Deterministically flip/perturb/drop one constraint field.

    `action` forces a specific corruption ("drop", "flip", "shift", "scale",
    "swap", "add"); otherwise one applicable action is drawn from the rng.
    """
    rng = rng or random.Random(0)
    if field_path not in CORRUPTIBLE_FIELDS:
        raise UnknownField(f"cannot corrupt {field_path!r}")
    section, name = field_path.split(".", 1)
    value = getattr(getattr(request, section), name)

    if field_path in _CORRUPTIBLE_BOOLEANS:
        choices = (["flip", "drop"] if value is not None else ["add"])
        act = action or rng.choice(choices)
        if act == "drop":
            return _replace_section(request, section, **{name: None})
        if act == "flip" and value is not None:
            return _replace_section(request, section, **{name: not value})
        return _replace_section(request, section, **{name: True if value is None else not value})

    if field_path in _CORRUPTIBLE_MONEY:
        choices = (["scale", "drop"] if value is not None else ["add"])
        act = action or rng.choice(choices)
        if act == "drop":
            return _replace_section(request, section, **{name: None})
        if act == "scale" and value is not None:
            factor = rng.choice((0.6, 0.8, 1.4))
            return _replace_section(request, section,
                                    **{name: max(100, int(value * factor) // 100 * 100)})
        return _replace_section(request, section, **{name: value or 50000})

    if field_path in _CORRUPTIBLE_WINDOWS:
        choices = (["shift", "drop"] if value is not None else ["add"])
        act = action or rng.choice(choices)
        if act == "drop":
            return _replace_section(request, section, **{name: None})
        if act == "shift" and value is not None:
            delta = 120 if value.end + 120 <= 1439 else -120
            return _replace_section(
                request, section,
                **{name: TimeWindow(value.start + delta, value.end + delta)})
        return _replace_section(request, section,
                                **{name: value or TimeWindow(8 * 60, 12 * 60)})

    if field_path in _CORRUPTIBLE_SETS:
        choices = (["swap", "drop"] if value is not None else ["add"])
        act = action or rng.choice(choices)
        if act == "drop":
            return _replace_section(request, section, **{name: None})
        if act == "swap" and value is not None and len(value) > 1:
            return _replace_section(request, section, **{name: value[:-1]})
        if value is not None:
            return _replace_section(request, section, **{name: None})
        fallback = ("Delta",) if section == "airline" else ("Hilton",)
        return _replace_section(request, section, **{name: fallback})

    if field_path == "airline.cabin_class":
        act = action or ("swap" if value is not None else "add")
        if act == "drop":
            return _replace_section(request, "airline", cabin_class=None)
        order = list(CabinClass)
        if value is None:
            return _replace_section(request, "airline", cabin_class=rng.choice(order))
        idx = (order.index(value) + 1) % len(order)
        return _replace_section(request, "airline", cabin_class=order[idx])

    # hotel.min_rating
    act = action or ("shift" if value is not None else "add")
    if act == "drop":
        return _replace_section(request, "hotel", min_rating=None)
    if value is None:
        return _replace_section(request, "hotel", min_rating=35)
    delta = rng.choice((-10, -5, 5, 10))
    return _replace_section(request, "hotel",
                            min_rating=min(50, max(0, value + delta)))
