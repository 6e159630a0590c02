"""End-to-end planning: prefilter, compile, solve, and verify one request.

Every itinerary returned here has been re-checked by the independent
timeline simulator; a solver solution that fails verification raises
instead of being served.
"""

from dataclasses import dataclass
from typing import Dict, Optional

from .datagen import Selection
from .milp import MilpModel, ModelParams, ObjectiveMode, build_model, prefilter_options
from .model import Inventory, PlanningError, SymbolicRequest
from .simulate import Itinerary, SimResult, evaluate_cost
from .solver import SolveResult, SolveStatus, SolverConfig, solve
from .timegrid import build_time_grid


@dataclass
class PlanOutcome:
    mode: ObjectiveMode
    status: SolveStatus
    solve_result: SolveResult
    selection: Optional[Selection] = None
    itinerary: Optional[Itinerary] = None
    sim: Optional[SimResult] = None
    infeasible_reason: Optional[str] = None


def drop_unschedulable(request: SymbolicRequest, inventory: Inventory,
                       params: Optional[ModelParams] = None) -> Inventory:
    """Remove leg-matched flights whose conservative slots fall outside the
    trip grid (e.g. overnight arrivals on the final day). Useful when the
    inventory comes from external data rather than the generator."""
    params = params or ModelParams()
    grid = build_time_grid(request, params.slot_minutes, params.night_start_min,
                           params.night_end_min, params.max_span_days)
    keep = []
    leg_keys = {(leg.origin, leg.destination, leg.date) for leg in request.legs}
    for flight in inventory.flights:
        if (flight.origin, flight.destination, flight.departure.date()) in leg_keys:
            try:
                grid.flight_slots(flight)
            except PlanningError:
                continue
        keep.append(flight)
    return Inventory(flights=tuple(keep), hotels=inventory.hotels)


def _infeasible_reason(request: SymbolicRequest, model: MilpModel) -> str:
    for k, cands in enumerate(model.leg_candidates):
        if not cands:
            leg = request.legs[k]
            return (f"no flight satisfies the airline constraints for leg {k} "
                    f"({leg.origin} to {leg.destination} on {leg.date.isoformat()})")
    for pos, i in enumerate(model.hotel_stays):
        if not model.stay_candidates[pos]:
            stay = model.stays[i]
            return (f"no hotel satisfies the constraints for the stay at "
                    f"{stay.city} (nights {stay.nights[0]}..{stay.nights[-1]})")
    return "no combination of available options satisfies the budget and schedule constraints"


def plan_request(request: SymbolicRequest, inventory: Inventory,
                 params: Optional[ModelParams] = None,
                 cfg: Optional[SolverConfig] = None,
                 tolerate_grid_mismatch: bool = False) -> PlanOutcome:
    """Solve one request at one objective mode and verify the result."""
    params = params or ModelParams()
    cfg = cfg or SolverConfig()
    working = inventory
    if tolerate_grid_mismatch:
        working = drop_unschedulable(request, working, params)
    filtered = prefilter_options(request, working)
    model = build_model(request, filtered, params)
    result = solve(model, cfg)

    if result.status is not SolveStatus.OPTIMAL or result.selection is None:
        reason = None
        if result.status is SolveStatus.INFEASIBLE:
            reason = _infeasible_reason(request, model)
        return PlanOutcome(mode=params.objective_mode, status=result.status,
                           solve_result=result, infeasible_reason=reason)

    sim = evaluate_cost(result.selection, request, inventory, params)
    if not sim.feasible:
        raise PlanningError(
            "internal: solver solution failed independent verification: "
            + "; ".join(str(v) for v in sim.violations))
    return PlanOutcome(
        mode=params.objective_mode, status=result.status, solve_result=result,
        selection=result.selection, itinerary=sim.itinerary, sim=sim)


def plan_all_modes(request: SymbolicRequest, inventory: Inventory,
                   params: Optional[ModelParams] = None,
                   cfg: Optional[SolverConfig] = None,
                   tolerate_grid_mismatch: bool = False) -> Dict[str, PlanOutcome]:
    """The three demo options: minimum cost, better hotel, better flight."""
    import dataclasses

    params = params or ModelParams()
    outcomes: Dict[str, PlanOutcome] = {}
    for mode in (ObjectiveMode.MIN_COST, ObjectiveMode.BETTER_HOTEL,
                 ObjectiveMode.BETTER_FLIGHT):
        mode_params = dataclasses.replace(params, objective_mode=mode)
        outcomes[mode.value] = plan_request(
            request, inventory, mode_params, cfg, tolerate_grid_mismatch)
    return outcomes
