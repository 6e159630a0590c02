"""Exact depth-first branch-and-bound over the selection variables.

Search branches only on flight/hotel selection columns; once selections are
fixed the schedule variables (u, m, e) are implied by the model structure
and get derived by propagation. Every candidate incumbent is verified
against the full constraint matrix before acceptance, so the search can
never return an assignment the model itself rejects.

The lower bound is committed cost plus the cheapest remaining option per
undecided leg/stay: admissible and O(1) to maintain. Ties between optima
are broken toward the lexicographically smallest tuple of selected columns
(lowest variable index wins), which keeps results reproducible.
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .datagen import Selection
from .milp import FlightCandidate, HotelCandidate, MilpModel, ModelParams
from .model import Inventory, SymbolicRequest
from .timegrid import AIR

_EPS = 1e-9
_ROW_TOL = 1e-6


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIME_LIMIT = "time_limit"


class BranchOrder(str, Enum):
    OBJECTIVE_DESCENDING = "objective_descending"  # best (cheapest) candidate first
    INDEX_ASCENDING = "index_ascending"


@dataclass(frozen=True)
class SolverConfig:
    time_limit_ms: int = 10_000
    node_limit: int = 10_000_000
    branch_order: BranchOrder = BranchOrder.OBJECTIVE_DESCENDING

    def __post_init__(self):
        if self.time_limit_ms <= 0 or self.node_limit <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SolveStats:
    nodes: int = 0
    propagations: int = 0
    row_rejections: int = 0
    load_ms: float = 0.0
    solve_ms: float = 0.0

    @property
    def wall_ms(self) -> float:
        return self.load_ms + self.solve_ms

    def to_json(self) -> Dict:
        return {
            "nodes": self.nodes,
            "propagations": self.propagations,
            "row_rejections": self.row_rejections,
            "load_ms": round(self.load_ms, 3),
            "solve_ms": round(self.solve_ms, 3),
            "wall_ms": round(self.wall_ms, 3),
        }


@dataclass
class SolveResult:
    status: SolveStatus
    selection: Optional[Selection]
    objective: Optional[float]
    assignment: Optional[np.ndarray]
    stats: SolveStats = field(default_factory=SolveStats)


@dataclass(frozen=True)
class _Group:
    """One branching decision: a leg's flight or a stay's hotel."""

    kind: str  # "leg" | "stay"
    index: int
    candidates: Tuple  # FlightCandidate or HotelCandidate, in branch order
    min_contrib: float
    min_price: int  # cents toward the relevant budget


def _flight_contrib(model: MilpModel, cand: FlightCandidate) -> float:
    pen = (cand.dep_penalty_slots + cand.arr_penalty_slots) * model.params.soft_penalty_weight
    return cand.obj_coef + float(pen)


def _hotel_feasible_alone(model: MilpModel, cand: HotelCandidate) -> bool:
    """Per-booking budget rows force the variable to 0; mirror that here."""
    nightly = cand.hotel.price_per_night
    request = model.request
    if request.hotel.daily_budget_max is not None and nightly > request.hotel.daily_budget_max:
        return False
    if request.budget.everyday_budget is not None and nightly > request.budget.everyday_budget:
        return False
    return True


def _build_groups(model: MilpModel, cfg: SolverConfig) -> Optional[List[_Group]]:
    groups: List[_Group] = []
    for k, cands in enumerate(model.leg_candidates):
        usable = list(cands)
        if not usable:
            return None
        if cfg.branch_order is BranchOrder.OBJECTIVE_DESCENDING:
            usable.sort(key=lambda c: (_flight_contrib(model, c), c.col))
        groups.append(_Group(
            kind="leg", index=k, candidates=tuple(usable),
            min_contrib=min(_flight_contrib(model, c) for c in usable),
            min_price=min(c.flight.price for c in usable)))
    for pos, i in enumerate(model.hotel_stays):
        usable = [c for c in model.stay_candidates[pos] if _hotel_feasible_alone(model, c)]
        if not usable:
            return None
        if cfg.branch_order is BranchOrder.OBJECTIVE_DESCENDING:
            usable.sort(key=lambda c: (c.obj_coef, c.col))
        groups.append(_Group(
            kind="stay", index=i, candidates=tuple(usable),
            min_contrib=min(c.obj_coef for c in usable),
            min_price=min(c.hotel.price_per_night * c.nights for c in usable)))
    return groups


class _Search:
    def __init__(self, model: MilpModel, cfg: SolverConfig, groups: List[_Group]):
        self.model = model
        self.cfg = cfg
        self.groups = groups
        self.stats = SolveStats()
        self.deadline = time.perf_counter() + cfg.time_limit_ms / 1000.0
        self.hit_limit = False

        self.a_ub, self.b_ub, self.a_eq, self.b_eq = model.matrices()
        self.n_legs = len(model.leg_candidates)
        # suffix sums of group minimums for the admissible bound
        n = len(groups)
        self.suffix_contrib = [0.0] * (n + 1)
        self.suffix_flight_price = [0] * (n + 1)
        self.suffix_hotel_price = [0] * (n + 1)
        for d in range(n - 1, -1, -1):
            g = groups[d]
            self.suffix_contrib[d] = self.suffix_contrib[d + 1] + g.min_contrib
            self.suffix_flight_price[d] = (
                self.suffix_flight_price[d + 1] + (g.min_price if g.kind == "leg" else 0))
            self.suffix_hotel_price[d] = (
                self.suffix_hotel_price[d + 1] + (g.min_price if g.kind == "stay" else 0))

        self.best_objective: Optional[float] = None
        self.best_key: Optional[Tuple[int, ...]] = None
        self.best_x: Optional[np.ndarray] = None
        self.chosen: List = [None] * n

    # -- pruning ------------------------------------------------------------

    def _budgets_ok(self, depth: int, flight_cents: int, hotel_cents: int) -> bool:
        request = self.model.request
        min_f = flight_cents + self.suffix_flight_price[depth]
        min_h = hotel_cents + self.suffix_hotel_price[depth]
        if (request.airline.price_total_max is not None
                and min_f > request.airline.price_total_max):
            return False
        if (request.hotel.total_budget_max is not None
                and min_h > request.hotel.total_budget_max):
            return False
        if (request.budget.total_budget is not None
                and min_f + min_h > request.budget.total_budget):
            return False
        return True

    def _sleep_possible(self, stay_pos: int, booking: Optional[HotelCandidate]) -> bool:
        """Sleep capacity for one stay given its two fixed flights; when the
        booking is still open, assume unrestricted coverage."""
        model = self.model
        i = model.hotel_stays[stay_pos]
        stay = model.stays[i]
        arrive = self.chosen[i].t_land
        depart = self.chosen[i + 1].t_dep
        lo_cov = booking.cover_lo if booking else 0
        hi_cov = booking.cover_hi if booking else model.grid.num_slots
        for night in stay.nights:
            wlo, whi = model.grid.night_windows[night]
            lo = max(wlo, lo_cov, arrive)
            hi = min(whi, hi_cov, depart + 1)
            if hi - lo < model.params.min_sleep_slots:
                return False
        return True

    # -- leaf handling ------------------------------------------------------

    def _leaf_assignment(self) -> np.ndarray:
        model = self.model
        T = model.grid.num_slots
        x = np.zeros(model.num_vars)
        flights: List[FlightCandidate] = [self.chosen[k] for k in range(self.n_legs)]
        hotels: List[HotelCandidate] = [
            self.chosen[self.n_legs + pos] for pos in range(len(model.hotel_stays))]

        cursor, here = 0, model.request.legs[0].origin
        for cand in flights:
            x[cand.col] = 1.0
            for t in range(cursor, cand.t_dep + 1):
                x[model.u_col[(here, t)]] = 1.0
            for t in range(cand.t_dep + 1, cand.t_land):
                x[model.u_col[(AIR, t)]] = 1.0
            x[model.e_col[cand.t_dep]] = 1.0
            x[model.e_col[cand.t_land - 1]] = 1.0
            cursor, here = cand.t_land, cand.flight.destination
        for t in range(cursor, T):
            x[model.u_col[(here, t)]] = 1.0
        for t in range(T - 1):
            x[model.ne_col[t]] = 1.0 - x[model.e_col[t]]

        for pos, booking in enumerate(hotels):
            x[booking.col] = 1.0
            i = model.hotel_stays[pos]
            stay = model.stays[i]
            arrive = flights[i].t_land
            depart = flights[i + 1].t_dep
            for night in stay.nights:
                wlo, whi = model.grid.night_windows[night]
                lo = max(wlo, booking.cover_lo, arrive)
                hi = min(whi, booking.cover_hi, depart + 1)
                for t in range(lo, hi):
                    x[model.m_col[t]] = 1.0

        for (kind, k), dev in model.dev_cols.items():
            cand = flights[k]
            x[dev] = float(cand.dep_penalty_slots if kind == "dep"
                           else cand.arr_penalty_slots)
        return x

    def _accept_leaf(self):
        x = self._leaf_assignment()
        if (self.a_ub @ x > self.b_ub + _ROW_TOL).any():
            self.stats.row_rejections += 1
            return
        if self.a_eq.shape[0] and (np.abs(self.a_eq @ x - self.b_eq) > _ROW_TOL).any():
            self.stats.row_rejections += 1
            return
        objective = float(self.model.objective @ x)
        key = tuple(c.col for c in self.chosen)
        if (self.best_objective is None
                or objective < self.best_objective - _EPS
                or (abs(objective - self.best_objective) <= _EPS
                    and (self.best_key is None or key < self.best_key))):
            self.best_objective = objective
            self.best_key = key
            self.best_x = x

    # -- depth-first search ---------------------------------------------------

    def run(self):
        self._descend(0, 0.0, 0, 0)

    def _descend(self, depth: int, contrib: float, flight_cents: int, hotel_cents: int):
        if self.hit_limit:
            return
        self.stats.nodes += 1
        if self.stats.nodes > self.cfg.node_limit or (
                self.stats.nodes % 256 == 0 and time.perf_counter() > self.deadline):
            self.hit_limit = True
            return
        if depth == len(self.groups):
            self._accept_leaf()
            return
        group = self.groups[depth]
        for cand in group.candidates:
            if group.kind == "leg":
                step_contrib = _flight_contrib(self.model, cand)
                new_flight = flight_cents + cand.flight.price
                new_hotel = hotel_cents
            else:
                step_contrib = cand.obj_coef
                new_flight = flight_cents
                new_hotel = hotel_cents + cand.hotel.price_per_night * cand.nights

            bound = contrib + step_contrib + self.suffix_contrib[depth + 1]
            if self.best_objective is not None and bound > self.best_objective + _EPS:
                if self.cfg.branch_order is BranchOrder.OBJECTIVE_DESCENDING:
                    break  # candidates sorted by contribution: the rest only get worse
                self.stats.propagations += 1
                continue

            self.chosen[depth] = cand
            ok = True
            if group.kind == "leg":
                k = group.index
                if k > 0 and cand.t_dep < self.chosen[k - 1].t_land:
                    ok = False
                # closing a stay fixes both of its flights: check sleep upper bound
                if ok and k > 0 and (k - 1) in self.model.hotel_stays:
                    pos = self.model.hotel_stays.index(k - 1)
                    booking = (self.chosen[self.n_legs + pos]
                               if self.n_legs + pos < depth else None)
                    ok = self._sleep_possible(pos, booking)
            else:
                pos = self.model.hotel_stays.index(group.index)
                ok = self._sleep_possible(pos, cand)
            if ok and not self._budgets_ok(depth + 1, new_flight, new_hotel):
                ok = False
            if not ok:
                self.stats.propagations += 1
                self.chosen[depth] = None
                continue

            self._descend(depth + 1, contrib + step_contrib, new_flight, new_hotel)
            self.chosen[depth] = None
            if self.hit_limit:
                return


def solve(model: MilpModel, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Globally optimal selection for a compiled model, or Infeasible.

    Deterministic for a given (model, cfg) as long as the limits are not
    hit; stats include the constraint-loading / solving phase split.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    groups = _build_groups(model, cfg)
    stats = SolveStats()
    if groups is None:
        stats.load_ms = (time.perf_counter() - t0) * 1000.0
        return SolveResult(SolveStatus.INFEASIBLE, None, None, None, stats)

    search = _Search(model, cfg, groups)
    search.stats.load_ms = (time.perf_counter() - t0) * 1000.0
    t1 = time.perf_counter()
    search.run()
    search.stats.solve_ms = (time.perf_counter() - t1) * 1000.0

    if search.best_x is None:
        status = SolveStatus.TIME_LIMIT if search.hit_limit else SolveStatus.INFEASIBLE
        return SolveResult(status, None, None, None, search.stats)

    # recover the selection in leg/stay order from the incumbent's columns
    chosen_cols = set(search.best_key or ())
    flights = []
    for cands in model.leg_candidates:
        flights.extend(c.flight.id for c in cands if c.col in chosen_cols)
    hotels = []
    for cands in model.stay_candidates:
        hotels.extend(c.hotel.id for c in cands if c.col in chosen_cols)
    selection = Selection(tuple(flights), tuple(hotels))
    status = SolveStatus.TIME_LIMIT if search.hit_limit else SolveStatus.OPTIMAL
    return SolveResult(status, selection, search.best_objective, search.best_x, search.stats)


def check_feasible(solution, request: SymbolicRequest, inventory: Inventory,
                   params: Optional[ModelParams] = None):
    """Verdict for any selection: delegates to the timeline simulator and
    returns its SimResult, whose violations carry human-readable reasons."""
    from .simulate import evaluate_cost

    return evaluate_cost(solution, request, inventory, params)
