"""Brute-force oracle: enumerate every selection and simulate each one.

Shares zero code with the branch-and-bound search: combinations come from
`itertools.product` over structurally matching options, and feasibility and
cost come from the timeline simulator. Used to certify the solver's results
on every instance small enough to enumerate.
"""

import itertools
import time
from typing import Optional

from .datagen import Selection
from .milp import ModelParams
from .model import Inventory, PlanningError, SymbolicRequest
from .simulate import compile_instance, evaluate_fast
from .solver import SolveResult, SolveStats, SolveStatus

DEFAULT_ENUMERATION_CAP = 1_000_000


class CapExceeded(PlanningError):
    """Combination count above the enumeration cap."""


def brute_force(request: SymbolicRequest, inventory: Inventory,
                params: Optional[ModelParams] = None,
                cap: int = DEFAULT_ENUMERATION_CAP) -> SolveResult:
    """Minimum-objective feasible combination by exhaustive enumeration."""
    t0 = time.perf_counter()
    inst = compile_instance(request, inventory, params)

    leg_ids = [list(table.keys()) for table in inst.leg_flights]
    stay_ids = [list(table.keys()) for table in inst.stay_hotels]
    combos = 1
    for ids in leg_ids + stay_ids:
        combos *= len(ids)
    if combos > cap:
        raise CapExceeded(f"{combos} combinations exceed the cap of {cap}")

    stats = SolveStats()
    stats.load_ms = (time.perf_counter() - t0) * 1000.0
    t1 = time.perf_counter()

    n_legs = len(leg_ids)
    best_objective = None
    best_sel = None
    for combo in itertools.product(*leg_ids, *stay_ids):
        stats.nodes += 1
        flights = combo[:n_legs]
        hotels = combo[n_legs:]
        ok, objective, _, _, _ = evaluate_fast(inst, flights, hotels)
        if ok and (best_objective is None or objective < best_objective - 1e-9):
            best_objective = objective
            best_sel = Selection(tuple(flights), tuple(hotels))

    stats.solve_ms = (time.perf_counter() - t1) * 1000.0
    if best_sel is None:
        return SolveResult(SolveStatus.INFEASIBLE, None, None, None, stats)
    return SolveResult(SolveStatus.OPTIMAL, best_sel, best_objective, None, stats)
