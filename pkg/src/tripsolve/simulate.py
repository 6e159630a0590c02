"""Independent itinerary simulator: replay a selection on the timeline and
check every constraint family without any LP machinery.

This is the semantic authority the solver is cross-checked against: it
re-derives slots, presence, sleep capacity, budgets, and soft penalties
straight from the request and inventory. `evaluate_cost` produces the full
verdict plus schedule artifacts; `compile_instance` + `evaluate_fast` give
the allocation-light path the brute-force oracle loops over.
"""

import numpy as np
from dataclasses import dataclass, field
from datetime import date
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    CostBreakdown,
    FlightOption,
    HotelOption,
    Inventory,
    SymbolicRequest,
)
from .milp import MilpModel, ModelParams, _window_deviation_slots
from .timegrid import (
    AIR,
    GridMismatch,
    Stay,
    TimeGrid,
    build_time_grid,
    is_red_eye_departure,
    stays_for_request,
)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class Schedule:
    locations: Tuple[str, ...]
    u: np.ndarray  # [location][slot]
    m: np.ndarray  # [slot]
    e: np.ndarray  # [slot]

    def location_at(self, t: int) -> str:
        return self.locations[int(np.argmax(self.u[:, t]))]

    def segments(self) -> List[Tuple[int, int, str]]:
        """(first_slot, last_slot, location) runs of constant location."""
        out: List[Tuple[int, int, str]] = []
        start = 0
        current = self.location_at(0)
        for t in range(1, self.u.shape[1]):
            loc = self.location_at(t)
            if loc != current:
                out.append((start, t - 1, current))
                start, current = t, loc
        out.append((start, self.u.shape[1] - 1, current))
        return out


@dataclass(frozen=True)
class Itinerary:
    chosen_flights: Tuple[Tuple[int, FlightOption], ...]  # (leg, option)
    chosen_hotels: Tuple[Tuple[HotelOption, date, date], ...]  # (option, first/last night)
    timeline: Optional[Schedule]
    cost: CostBreakdown

    def to_json(self) -> Dict:
        out = {
            "chosen_flights": [
                {"leg": k, "flight": f.to_json()} for k, f in self.chosen_flights],
            "chosen_hotels": [
                {"hotel": h.to_json(), "first_night": a.isoformat(),
                 "last_night": b.isoformat()} for h, a, b in self.chosen_hotels],
            "cost": self.cost.to_json(),
        }
        if self.timeline is not None:
            out["timeline"] = {
                "segments": [
                    {"from_slot": a, "to_slot": b, "location": loc}
                    for a, b, loc in self.timeline.segments()],
                "sleep_slots": [int(t) for t in np.nonzero(self.timeline.m)[0]],
                "event_slots": [int(t) for t in np.nonzero(self.timeline.e)[0]],
            }
        return out


@dataclass(frozen=True)
class SimResult:
    feasible: bool
    violations: Tuple[Violation, ...]
    cost: CostBreakdown
    objective: float
    schedule: Optional[Schedule] = None
    itinerary: Optional[Itinerary] = None

    def violation_codes(self) -> List[str]:
        return [v.code for v in self.violations]


# ---------------------------------------------------------------------------
# compiled instance: slot math and per-option checks done once
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledFlight:
    flight: FlightOption
    t_dep: int
    t_land: int
    in_grid: bool
    categorical: Tuple[str, ...]  # violated airline constraint codes
    dep_penalty_slots: int
    arr_penalty_slots: int
    obj_coef: float


@dataclass(frozen=True)
class CompiledHotel:
    hotel: HotelOption
    cover_lo: int
    cover_hi: int
    categorical: Tuple[str, ...]
    nights: int
    obj_coef: float


@dataclass
class CompiledInstance:
    request: SymbolicRequest
    inventory: Inventory
    params: ModelParams
    grid: TimeGrid
    stays: List[Stay]
    hotel_stays: List[int]
    leg_flights: List[Dict[str, CompiledFlight]]
    stay_hotels: List[Dict[str, CompiledHotel]]
    min_sleep: int = field(init=False)

    def __post_init__(self):
        self.min_sleep = self.params.min_sleep_slots


def _flight_categorical(request: SymbolicRequest, flight: FlightOption) -> Tuple[str, ...]:
    a = request.airline
    out: List[str] = []
    if a.cabin_class is not None and flight.cabin_class != a.cabin_class:
        out.append("airline.cabin_class")
    if a.refundable is True and not flight.refundable:
        out.append("airline.refundable")
    if a.nonstop_only is True and not flight.is_nonstop:
        out.append("airline.nonstop_only")
    if a.must_not_basic_economy is True and flight.is_basic_economy:
        out.append("airline.must_not_basic_economy")
    if a.no_mixed_cabin is True and flight.is_mixed_cabin:
        out.append("airline.no_mixed_cabin")
    if a.avoid_red_eye is True and is_red_eye_departure(
            flight.departure.hour * 60 + flight.departure.minute):
        out.append("airline.avoid_red_eye")
    if a.plane_types is not None and flight.plane_type not in a.plane_types:
        out.append("airline.plane_types")
    if a.preferred_airlines is not None and flight.airline not in a.preferred_airlines:
        out.append("airline.preferred_airlines")
    return tuple(out)


def _hotel_categorical(request: SymbolicRequest, hotel: HotelOption,
                       first_date: date, last_date: date, city: str) -> Tuple[str, ...]:
    h = request.hotel
    out: List[str] = []
    if hotel.city != city:
        out.append("hotel.city")
    if not (hotel.available_dates.covers(first_date)
            and hotel.available_dates.covers(last_date)):
        out.append("hotel.availability")
    if h.min_rating is not None and hotel.rating < h.min_rating:
        out.append("hotel.min_rating")
    if h.brands is not None and hotel.brand not in h.brands:
        out.append("hotel.brands")
    return tuple(out)


def compile_instance(request: SymbolicRequest, inventory: Inventory,
                     params: Optional[ModelParams] = None) -> CompiledInstance:
    params = params or ModelParams()
    grid = build_time_grid(
        request, params.slot_minutes, params.night_start_min,
        params.night_end_min, params.max_span_days)
    stays = stays_for_request(request, grid)
    weights = params.weights

    leg_flights: List[Dict[str, CompiledFlight]] = []
    for leg in request.legs:
        table: Dict[str, CompiledFlight] = {}
        for flight in inventory.flights:
            if (flight.origin != leg.origin or flight.destination != leg.destination
                    or flight.departure.date() != leg.date):
                continue
            try:
                t_dep, t_land = grid.flight_slots(flight)
                in_grid = True
            except GridMismatch:
                t_dep, t_land, in_grid = -1, -1, False
            dep_minute = flight.departure.hour * 60 + flight.departure.minute
            arr_minute = flight.arrival.hour * 60 + flight.arrival.minute
            dep_pen = (_window_deviation_slots(dep_minute, request.airline.departure_time,
                                               params.slot_minutes)
                       if request.airline.departure_time else 0)
            arr_pen = (_window_deviation_slots(arr_minute, request.airline.arrival_time,
                                               params.slot_minutes)
                       if request.airline.arrival_time else 0)
            table[flight.id] = CompiledFlight(
                flight=flight, t_dep=t_dep, t_land=t_land, in_grid=in_grid,
                categorical=_flight_categorical(request, flight),
                dep_penalty_slots=dep_pen, arr_penalty_slots=arr_pen,
                obj_coef=weights.flight_coef(flight))
        leg_flights.append(table)

    hotel_stays = [i for i, stay in enumerate(stays) if stay.num_nights > 0]
    stay_hotels: List[Dict[str, CompiledHotel]] = []
    for i in hotel_stays:
        stay = stays[i]
        first_date = grid.date_of_day(stay.nights[0])
        last_date = grid.date_of_day(stay.nights[-1])
        table: Dict[str, CompiledHotel] = {}
        for hotel in inventory.hotels:
            if hotel.city != stay.city:
                continue
            lo, hi = grid.hotel_coverage(hotel, stay.nights[0], stay.nights[-1])
            table[hotel.id] = CompiledHotel(
                hotel=hotel, cover_lo=lo, cover_hi=hi,
                categorical=_hotel_categorical(request, hotel, first_date, last_date, stay.city),
                nights=stay.num_nights,
                obj_coef=weights.hotel_coef(hotel, stay.num_nights))
        stay_hotels.append(table)

    return CompiledInstance(
        request=request, inventory=inventory, params=params, grid=grid,
        stays=stays, hotel_stays=hotel_stays,
        leg_flights=leg_flights, stay_hotels=stay_hotels)


def evaluate_fast(inst: CompiledInstance, flight_ids: Sequence[str],
                  hotel_ids: Sequence[str]):
    """(feasible, objective, flight_total, hotel_total, penalty_cents).

    Feasibility only; no verdict detail and no schedule artifacts. Used in
    the brute-force enumeration inner loop.
    """
    if len(flight_ids) != len(inst.leg_flights) or len(hotel_ids) != len(inst.stay_hotels):
        return False, 0.0, 0, 0, 0

    flights: List[CompiledFlight] = []
    for k, fid in enumerate(flight_ids):
        cand = inst.leg_flights[k].get(fid)
        if cand is None or not cand.in_grid or cand.categorical:
            return False, 0.0, 0, 0, 0
        if flights and cand.t_dep < flights[-1].t_land:
            return False, 0.0, 0, 0, 0
        flights.append(cand)

    hotels: List[CompiledHotel] = []
    for s, hid in enumerate(hotel_ids):
        cand = inst.stay_hotels[s].get(hid)
        if cand is None or cand.categorical:
            return False, 0.0, 0, 0, 0
        hotels.append(cand)

    # sleep capacity per night: window, hotel coverage, presence at the city
    windows = inst.grid.night_windows
    for pos, i in enumerate(inst.hotel_stays):
        stay = inst.stays[i]
        booking = hotels[pos]
        arrive = flights[i].t_land
        depart = flights[i + 1].t_dep
        for night in stay.nights:
            wlo, whi = windows[night]
            lo = max(wlo, booking.cover_lo, arrive)
            hi = min(whi, booking.cover_hi, depart + 1)
            if hi - lo < inst.min_sleep:
                return False, 0.0, 0, 0, 0

    request = inst.request
    flight_total = sum(c.flight.price for c in flights)
    hotel_total = sum(c.hotel.price_per_night * c.nights for c in hotels)
    if request.airline.price_total_max is not None and flight_total > request.airline.price_total_max:
        return False, 0.0, 0, 0, 0
    for booking in hotels:
        nightly = booking.hotel.price_per_night
        if request.hotel.daily_budget_max is not None and nightly > request.hotel.daily_budget_max:
            return False, 0.0, 0, 0, 0
        if request.budget.everyday_budget is not None and nightly > request.budget.everyday_budget:
            return False, 0.0, 0, 0, 0
    if request.hotel.total_budget_max is not None and hotel_total > request.hotel.total_budget_max:
        return False, 0.0, 0, 0, 0
    if request.budget.total_budget is not None and flight_total + hotel_total > request.budget.total_budget:
        return False, 0.0, 0, 0, 0

    penalty_slots = sum(c.dep_penalty_slots + c.arr_penalty_slots for c in flights)
    penalty = penalty_slots * inst.params.soft_penalty_weight
    objective = (sum(c.obj_coef for c in flights) + sum(c.obj_coef for c in hotels)
                 + float(penalty))
    return True, objective, flight_total, hotel_total, penalty


# ---------------------------------------------------------------------------
# full evaluation with verdicts and artifacts
# ---------------------------------------------------------------------------

def evaluate_cost(selection, request: SymbolicRequest, inventory: Inventory,
                  params: Optional[ModelParams] = None,
                  build_artifacts: bool = True,
                  inst: Optional[CompiledInstance] = None) -> SimResult:
    """Recompute the cost of a selection and list every violated constraint.

    `selection` is anything with `flights` and `hotels` id sequences (one
    flight id per leg, one hotel id per non-empty stay).
    """
    if inst is None:
        inst = compile_instance(request, inventory, params)
    params = inst.params
    violations: List[Violation] = []

    flight_ids = list(selection.flights)
    hotel_ids = list(selection.hotels)

    flights: List[Optional[CompiledFlight]] = []
    for k in range(len(request.legs)):
        if k >= len(flight_ids):
            violations.append(Violation("flight.missing", f"missing flight for leg {k}"))
            flights.append(None)
            continue
        fid = flight_ids[k]
        cand = inst.leg_flights[k].get(fid)
        if cand is None:
            detail = ("not in inventory" if inventory.flight_by_id(fid) is None
                      else "does not serve this leg's route and date")
            violations.append(Violation("flight.leg_mismatch", f"leg {k}: flight {fid} {detail}"))
            flights.append(None)
            continue
        if not cand.in_grid:
            violations.append(Violation(
                "flight.grid", f"leg {k}: flight {fid} lands outside the trip grid"))
            flights.append(None)
            continue
        for code in cand.categorical:
            violations.append(Violation(code, f"leg {k}: flight {fid} violates {code}"))
        flights.append(cand)
    if len(flight_ids) > len(request.legs):
        violations.append(Violation(
            "flight.extra", f"{len(flight_ids) - len(request.legs)} unneeded flight selections"))

    for k in range(1, len(flights)):
        if flights[k] is not None and flights[k - 1] is not None:
            if flights[k].t_dep < flights[k - 1].t_land:
                violations.append(Violation(
                    "flight.chain",
                    f"leg {k} departs slot {flights[k].t_dep} before leg {k - 1} "
                    f"lands at slot {flights[k - 1].t_land}"))

    hotels: List[Optional[CompiledHotel]] = []
    for pos, i in enumerate(inst.hotel_stays):
        stay = inst.stays[i]
        if pos >= len(hotel_ids):
            violations.append(Violation(
                "hotel.missing", f"missing hotel for stay {i} at {stay.city}"))
            hotels.append(None)
            continue
        hid = hotel_ids[pos]
        cand = inst.stay_hotels[pos].get(hid)
        if cand is None:
            detail = ("not in inventory" if inventory.hotel_by_id(hid) is None
                      else f"not in {stay.city}")
            violations.append(Violation("hotel.city", f"stay {i}: hotel {hid} {detail}"))
            hotels.append(None)
            continue
        for code in cand.categorical:
            violations.append(Violation(code, f"stay {i}: hotel {hid} violates {code}"))
        hotels.append(cand)
    if len(hotel_ids) > len(inst.hotel_stays):
        violations.append(Violation(
            "hotel.extra", f"{len(hotel_ids) - len(inst.hotel_stays)} unneeded hotel selections"))

    # nightly sleep
    windows = inst.grid.night_windows
    for pos, i in enumerate(inst.hotel_stays):
        stay = inst.stays[i]
        booking = hotels[pos] if pos < len(hotels) else None
        arrive_ok = flights[i] is not None
        depart_ok = flights[i + 1] is not None
        if booking is None or not arrive_ok or not depart_ok or booking.categorical:
            continue  # already reported above
        arrive = flights[i].t_land
        depart = flights[i + 1].t_dep
        for night in stay.nights:
            wlo, whi = windows[night]
            lo = max(wlo, booking.cover_lo, arrive)
            hi = min(whi, booking.cover_hi, depart + 1)
            if hi - lo < params.min_sleep_slots:
                violations.append(Violation(
                    "commonsense.sleep",
                    f"night {night}: only {max(0, hi - lo)} sleep slots "
                    f"available, need {params.min_sleep_slots}"))

    # budgets
    flight_total = sum(c.flight.price for c in flights if c is not None)
    hotel_total = sum(c.hotel.price_per_night * c.nights for c in hotels if c is not None)
    if (request.airline.price_total_max is not None
            and flight_total > request.airline.price_total_max):
        violations.append(Violation(
            "airline.price_total_max",
            f"flight total {flight_total} over budget {request.airline.price_total_max}"))
    for booking in hotels:
        if booking is None:
            continue
        nightly = booking.hotel.price_per_night
        if (request.hotel.daily_budget_max is not None
                and nightly > request.hotel.daily_budget_max):
            violations.append(Violation(
                "hotel.daily_budget_max",
                f"hotel {booking.hotel.id} nightly {nightly} over {request.hotel.daily_budget_max}"))
        if (request.budget.everyday_budget is not None
                and nightly > request.budget.everyday_budget):
            violations.append(Violation(
                "budget.everyday_budget",
                f"hotel {booking.hotel.id} nightly {nightly} over {request.budget.everyday_budget}"))
    if (request.hotel.total_budget_max is not None
            and hotel_total > request.hotel.total_budget_max):
        violations.append(Violation(
            "hotel.total_budget_max",
            f"hotel total {hotel_total} over budget {request.hotel.total_budget_max}"))
    if (request.budget.total_budget is not None
            and flight_total + hotel_total > request.budget.total_budget):
        violations.append(Violation(
            "budget.total_budget",
            f"grand total {flight_total + hotel_total} over {request.budget.total_budget}"))

    penalty_slots = sum(c.dep_penalty_slots + c.arr_penalty_slots
                        for c in flights if c is not None)
    penalty = penalty_slots * params.soft_penalty_weight
    objective = (sum(c.obj_coef for c in flights if c is not None)
                 + sum(c.obj_coef for c in hotels if c is not None)
                 + float(penalty))
    cost = CostBreakdown(flight_total=flight_total, hotel_total=hotel_total,
                         soft_penalty=penalty)
    feasible = not violations

    schedule = None
    itinerary = None
    if build_artifacts and feasible:
        schedule = _build_schedule(inst, [c for c in flights], [c for c in hotels])
        itinerary = Itinerary(
            chosen_flights=tuple((k, c.flight) for k, c in enumerate(flights)),
            chosen_hotels=tuple(
                (hotels[pos].hotel,
                 inst.grid.date_of_day(inst.stays[i].nights[0]),
                 inst.grid.date_of_day(inst.stays[i].nights[-1]))
                for pos, i in enumerate(inst.hotel_stays)),
            timeline=schedule,
            cost=cost)
    return SimResult(feasible=feasible, violations=tuple(violations), cost=cost,
                     objective=objective, schedule=schedule, itinerary=itinerary)


def _build_schedule(inst: CompiledInstance, flights: List[CompiledFlight],
                    hotels: List[CompiledHotel]) -> Schedule:
    """Canonical timeline: home -> air -> city ... with maximal allowed sleep
    inside night windows and events exactly at location changes."""
    grid = inst.grid
    T = grid.num_slots
    locations = tuple(inst.request.cities) + (AIR,)
    loc_index = {loc: i for i, loc in enumerate(locations)}
    u = np.zeros((len(locations), T), dtype=np.int8)
    m = np.zeros(T, dtype=np.int8)
    e = np.zeros(T, dtype=np.int8)

    cursor = 0
    here = inst.request.legs[0].origin
    for cand in flights:
        u[loc_index[here], cursor:cand.t_dep + 1] = 1
        u[loc_index[AIR], cand.t_dep + 1:cand.t_land] = 1
        e[cand.t_dep] = 1
        e[cand.t_land - 1] = 1
        cursor = cand.t_land
        here = cand.flight.destination
    u[loc_index[here], cursor:T] = 1

    windows = grid.night_windows
    for pos, i in enumerate(inst.hotel_stays):
        stay = inst.stays[i]
        booking = hotels[pos]
        arrive = flights[i].t_land
        depart = flights[i + 1].t_dep
        for night in stay.nights:
            wlo, whi = windows[night]
            lo = max(wlo, booking.cover_lo, arrive)
            hi = min(whi, booking.cover_hi, depart + 1)
            if lo < hi:
                m[lo:hi] = 1
    return Schedule(locations=locations, u=u, m=m, e=e)


# ---------------------------------------------------------------------------
# schedule invariant audit (for solver assignments)
# ---------------------------------------------------------------------------

def verify_schedule_invariants(model: MilpModel, x: np.ndarray) -> List[str]:
    """Audit a full variable assignment directly against the timeline rules:
    single location per slot, nightly sleep, movement only on events, and
    the flight/hotel consequence constraints. Returns problem descriptions.
    """
    problems: List[str] = []
    grid = model.grid
    T = grid.num_slots
    locs = model.locations
    u = np.array([[x[model.u_col[(loc, t)]] for t in range(T)] for loc in locs])

    for t in range(T):
        if abs(u[:, t].sum() - 1.0) > 1e-9:
            problems.append(f"slot {t}: traveller at {u[:, t].sum():g} locations")
    for n, (lo, hi) in enumerate(grid.night_windows):
        total = sum(x[model.m_col[t]] for t in range(lo, hi))
        if total < model.params.min_sleep_slots - 1e-9:
            problems.append(f"night {n}: sleep {total:g} < {model.params.min_sleep_slots}")
    for t in range(T - 1):
        if x[model.e_col[t]] < 0.5 and not np.allclose(u[:, t + 1], u[:, t]):
            problems.append(f"slot {t}: location changed without an event")

    for cands in model.leg_candidates:
        for cand in cands:
            if x[cand.col] < 0.5:
                continue
            checks = (
                (model.u_col[(cand.flight.origin, cand.t_dep)], "at origin at departure"),
                (model.u_col[(AIR, cand.t_dep + 1)], "in air after departure"),
                (model.u_col[(cand.flight.destination, cand.t_land)], "at destination on landing"),
                (model.u_col[(AIR, cand.t_land - 1)], "in air before landing"),
                (model.e_col[cand.t_dep], "departure event"),
                (model.e_col[cand.t_land - 1], "landing event"),
            )
            for col, what in checks:
                if x[col] < 0.5:
                    problems.append(f"flight {cand.flight.id}: not {what}")

    selected_cover = np.zeros(T)
    for cands in model.stay_candidates:
        for cand in cands:
            if x[cand.col] < 0.5:
                continue
            city_row = locs.index(cand.hotel.city)
            for t in range(cand.cover_lo, cand.cover_hi):
                selected_cover[t] = 1
                if x[model.m_col[t]] > 0.5 and u[city_row, t] < 0.5:
                    problems.append(
                        f"slot {t}: asleep under hotel {cand.hotel.id} while away from {cand.hotel.city}")
    air_row = locs.index(AIR)
    for t in range(T):
        if x[model.m_col[t]] > 0.5 and not selected_cover[t]:
            problems.append(f"slot {t}: asleep with no selected hotel coverage")
        if x[model.m_col[t]] > 0.5 and u[air_row, t] > 0.5:
            problems.append(f"slot {t}: asleep aboard a flight")
    return problems
