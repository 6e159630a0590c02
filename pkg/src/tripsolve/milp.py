"""Compile (request, inventory, objective mode) into a 0-1 linear program.

The formulation follows a time-indexed schedule: binary occupancy variables
u[l][t] over locations (cities plus the AIR pseudo-location), sleep bits
m[t], event bits e[t], plus selection variables f (one flight per leg) and
h (one hotel per stay). Conditional constraints such as "if flight j is
taken, the traveller is at its origin at the departure slot" are encoded
with the big-M implication pair

    x <= y + M * sum_j (1 - z_j)      y <= x + M * sum_j (1 - z_j)

which forces x == y when every z_j is 1 and goes slack otherwise. For
binary-to-binary implications M = 1 is tight and keeps bounds strong.

Hard categorical constraints (cabin class, nonstop, fare flags, brands,
rating) are prefiltered away before modeling; price and budget constraints
couple selections and therefore stay in the model.
"""

import numpy as np
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    CabinClass,
    FlightOption,
    HotelOption,
    Inventory,
    PlanningError,
    SymbolicRequest,
    TimeWindow,
)
from .timegrid import (
    AIR,
    DEFAULT_MAX_SPAN_DAYS,
    DEFAULT_NIGHT_END_MIN,
    DEFAULT_NIGHT_START_MIN,
    DEFAULT_SLOT_MINUTES,
    GridMismatch,
    Stay,
    TimeGrid,
    build_time_grid,
    is_red_eye_departure,
    stays_for_request,
)

__all__ = [
    "AIR", "GridMismatch", "LinearConstraint", "MTooSmall", "MilpModel",
    "ModeWeights", "ModelParams", "ObjectiveMode", "FlightCandidate",
    "HotelCandidate", "build_model", "build_time_grid", "encode_implication",
    "prefilter_options", "dump_lp",
]

CABIN_RANK = {CabinClass.COACH: 0, CabinClass.PREMIUM: 1,
              CabinClass.BUSINESS: 2, CabinClass.FIRST: 3}


class MTooSmall(PlanningError):
    """Big-M constant below the attainable |x - y| gap."""


class ObjectiveMode(str, Enum):
    MIN_COST = "min_cost"
    BETTER_HOTEL = "better_hotel"
    BETTER_FLIGHT = "better_flight"


@dataclass(frozen=True)
class ModeWeights:
    """Objective reweighting for one mode.

    Quality bonuses are multiplicative discounts expressed in 1/256 steps
    and capped at 50%: dyadic factors keep every weighted integer-cent term
    exact in binary floating point, so objective values are reproducible
    bit-for-bit across summation orders (solver vs oracle)."""

    flight_weight: float = 1.0
    hotel_weight: float = 1.0
    hotel_rating_bonus: int = 0   # 1/256 discount per rating tenth
    flight_cabin_bonus: int = 0   # 1/256 discount per cabin rank step
    flight_nonstop_bonus: int = 0  # 1/256 discount when nonstop

    def flight_coef(self, flight: FlightOption) -> float:
        weighted = self.flight_weight * flight.price
        steps = (CABIN_RANK[flight.cabin_class] * self.flight_cabin_bonus
                 + (self.flight_nonstop_bonus if flight.is_nonstop else 0))
        return weighted * (256 - min(steps, 128)) / 256.0

    def hotel_coef(self, hotel: HotelOption, nights: int) -> float:
        weighted = self.hotel_weight * hotel.price_per_night * nights
        steps = hotel.rating * self.hotel_rating_bonus
        return weighted * (256 - min(steps, 128)) / 256.0


DEFAULT_MODE_WEIGHTS: Dict[ObjectiveMode, ModeWeights] = {
    ObjectiveMode.MIN_COST: ModeWeights(),
    ObjectiveMode.BETTER_HOTEL: ModeWeights(
        flight_weight=1.0, hotel_weight=0.5, hotel_rating_bonus=3),
    ObjectiveMode.BETTER_FLIGHT: ModeWeights(
        flight_weight=0.5, hotel_weight=1.0,
        flight_cabin_bonus=16, flight_nonstop_bonus=16),
}


def parse_mode_weights(raw: Dict[str, Dict[str, float]]) -> Dict[ObjectiveMode, ModeWeights]:
    """Per-mode weight overrides from config, merged over the defaults."""
    import dataclasses

    if not isinstance(raw, dict):
        raise ValueError("mode_weights must be an object keyed by objective mode")
    table = dict(DEFAULT_MODE_WEIGHTS)
    for mode_name, overrides in raw.items():
        try:
            mode = ObjectiveMode(mode_name)
        except ValueError:
            raise ValueError(f"unknown objective mode {mode_name!r}") from None
        try:
            table[mode] = dataclasses.replace(table[mode], **overrides)
        except TypeError as exc:
            raise ValueError(f"mode_weights.{mode_name}: {exc}") from None
    return table


@dataclass(frozen=True)
class ModelParams:
    slot_minutes: int = DEFAULT_SLOT_MINUTES
    min_sleep_slots: int = 6  # L
    night_start_min: int = DEFAULT_NIGHT_START_MIN
    night_end_min: int = DEFAULT_NIGHT_END_MIN
    max_span_days: int = DEFAULT_MAX_SPAN_DAYS
    big_m: float = 1.0
    soft_penalty_weight: int = 1500  # cents per slot of soft-window deviation
    objective_mode: ObjectiveMode = ObjectiveMode.MIN_COST
    mode_weights: Dict[ObjectiveMode, ModeWeights] = field(
        default_factory=lambda: dict(DEFAULT_MODE_WEIGHTS))

    def __post_init__(self):
        if self.min_sleep_slots < 1:
            raise ValueError("min_sleep_slots must be >= 1")
        if self.big_m < 1.0:
            raise ValueError("big_m must cover the binary gap (>= 1)")

    @property
    def weights(self) -> ModeWeights:
        return self.mode_weights.get(
            self.objective_mode, DEFAULT_MODE_WEIGHTS[self.objective_mode])


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    family: str
    coeffs: Tuple[Tuple[int, float], ...]  # (column, coefficient)
    sense: str  # one of "<=", ">=", "=="
    rhs: float

    def satisfied(self, x: Sequence[float], tol: float = 1e-9) -> bool:
        lhs = sum(coef * x[col] for col, coef in self.coeffs)
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


def encode_implication(
    z_cols: Sequence[int],
    x_col: int,
    *,
    y_col: Optional[int] = None,
    y_const: Optional[float] = None,
    m: float = 1.0,
    name: str = "imp",
    family: str = "implication",
) -> Tuple[LinearConstraint, LinearConstraint]:
    """Encode "if all z_j = 1 then x = y" as two slackened inequalities.

    All z and x are binary columns; y is either a binary column or a
    constant. When every z_j is 1 the pair pins x to y; when k >= 1 of the
    z_j are 0 both rows gain k*M of slack and bind nothing.
    """
    if (y_col is None) == (y_const is None):
        raise ValueError("exactly one of y_col / y_const is required")
    if y_col is not None:
        gap = 1.0  # binary vs binary
    else:
        gap = max(abs(1.0 - y_const), abs(y_const))
    if m < gap:
        raise MTooSmall(f"M={m} below attainable |x - y| gap {gap}")

    k = len(z_cols)
    # x <= y + M * sum(1 - z)   ==>   x - y + M * sum(z) <= M * k
    fwd: List[Tuple[int, float]] = [(x_col, 1.0)]
    rev: List[Tuple[int, float]] = [(x_col, -1.0)]
    rhs_fwd = m * k
    rhs_rev = m * k
    if y_col is not None:
        fwd.append((y_col, -1.0))
        rev.append((y_col, 1.0))
    else:
        rhs_fwd += y_const
        rhs_rev -= y_const
    for z in z_cols:
        fwd.append((z, m))
        rev.append((z, m))
    return (
        LinearConstraint(f"{name}/fwd", family, tuple(fwd), "<=", rhs_fwd),
        LinearConstraint(f"{name}/rev", family, tuple(rev), "<=", rhs_rev),
    )


# ---------------------------------------------------------------------------
# prefiltering
# ---------------------------------------------------------------------------

def _flight_passes(request: SymbolicRequest, flight: FlightOption) -> bool:
    a = request.airline
    if a.cabin_class is not None and flight.cabin_class != a.cabin_class:
        return False
    if a.refundable is True and not flight.refundable:
        return False
    if a.nonstop_only is True and not flight.is_nonstop:
        return False
    if a.must_not_basic_economy is True and flight.is_basic_economy:
        return False
    if a.no_mixed_cabin is True and flight.is_mixed_cabin:
        return False
    if a.avoid_red_eye is True:
        minute = flight.departure.hour * 60 + flight.departure.minute
        if is_red_eye_departure(minute):
            return False
    if a.plane_types is not None and flight.plane_type not in a.plane_types:
        return False
    if a.preferred_airlines is not None and flight.airline not in a.preferred_airlines:
        return False
    return True


def _hotel_passes(request: SymbolicRequest, hotel: HotelOption) -> bool:
    h = request.hotel
    if h.min_rating is not None and hotel.rating < h.min_rating:
        return False
    if h.brands is not None and hotel.brand not in h.brands:
        return False
    return True


def prefilter_options(request: SymbolicRequest, inventory: Inventory) -> Inventory:
    """Drop options violating hard categorical constraints. A False boolean
    waives the requirement (only asserted constraints filter); price, budget,
    and schedule constraints are left to the model."""
    return Inventory(
        flights=tuple(f for f in inventory.flights if _flight_passes(request, f)),
        hotels=tuple(h for h in inventory.hotels if _hotel_passes(request, h)),
    )


# ---------------------------------------------------------------------------
# model structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    name: str
    role: str  # u | m | e | f | h | aux
    kind: str  # binary | continuous


@dataclass(frozen=True)
class FlightCandidate:
    col: int
    leg: int
    flight: FlightOption
    t_dep: int
    t_land: int
    dep_penalty_slots: int
    arr_penalty_slots: int
    obj_coef: float


@dataclass(frozen=True)
class HotelCandidate:
    col: int
    stay: int
    hotel: HotelOption
    cover_lo: int  # half-open slot coverage
    cover_hi: int
    nights: int
    obj_coef: float


@dataclass
class MilpModel:
    request: SymbolicRequest
    params: ModelParams
    grid: TimeGrid
    locations: Tuple[str, ...]  # cities in route order, then AIR
    stays: Tuple[Stay, ...]
    variables: List[VarDecl]
    constraints: List[LinearConstraint]
    objective: np.ndarray
    var_index: Dict[str, int]
    leg_candidates: List[List[FlightCandidate]]
    stay_candidates: List[List[HotelCandidate]]  # parallel to hotel_stays
    hotel_stays: List[int]  # stay indices that need a hotel
    u_col: Dict[Tuple[str, int], int]
    m_col: List[int]
    e_col: List[int]
    ne_col: List[int]
    dev_cols: Dict[Tuple[str, int], int]  # ("dep"|"arr", leg) -> column

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def family_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for con in self.constraints:
            counts[con.family] = counts.get(con.family, 0) + 1
        return counts

    def matrices(self):
        """(A_ub, b_ub, A_eq, b_eq) as CSR matrices for fast point checks."""
        from scipy.sparse import csr_matrix

        def assemble(rows: List[LinearConstraint], flip_ge: bool):
            data, indices, indptr, rhs = [], [], [0], []
            for con in rows:
                sign = -1.0 if (flip_ge and con.sense == ">=") else 1.0
                for col, coef in con.coeffs:
                    data.append(sign * coef)
                    indices.append(col)
                indptr.append(len(data))
                rhs.append(sign * con.rhs)
            mat = csr_matrix((data, indices, indptr),
                             shape=(len(rows), self.num_vars))
            return mat, np.asarray(rhs)

        ineq = [c for c in self.constraints if c.sense in ("<=", ">=")]
        eq = [c for c in self.constraints if c.sense == "=="]
        a_ub, b_ub = assemble(ineq, flip_ge=True)
        a_eq, b_eq = assemble(eq, flip_ge=False)
        return a_ub, b_ub, a_eq, b_eq


def _window_deviation_slots(minute_of_day: int, window: TimeWindow, slot_minutes: int) -> int:
    """Whole slots by which a time of day misses a soft window."""
    if window.contains(minute_of_day):
        return 0
    if minute_of_day < window.start:
        gap = window.start - minute_of_day
    else:
        gap = minute_of_day - (window.end - 1)
    return -(-gap // slot_minutes)


def build_model(request: SymbolicRequest, inventory: Inventory,
                params: Optional[ModelParams] = None) -> MilpModel:
    """Emit the full 0-1 program for a prefiltered inventory.

    Raises GridMismatch when a leg-matched option's datetimes fall outside
    the trip's time grid.
    """
    params = params or ModelParams()
    grid = build_time_grid(
        request, params.slot_minutes, params.night_start_min,
        params.night_end_min, params.max_span_days)
    T = grid.num_slots
    locations = tuple(request.cities) + (AIR,)
    stays = tuple(stays_for_request(request, grid))
    weights = params.weights

    variables: List[VarDecl] = []
    var_index: Dict[str, int] = {}

    def declare(name: str, role: str, kind: str = "binary") -> int:
        col = len(variables)
        variables.append(VarDecl(name, role, kind))
        var_index[name] = col
        return col

    u_col = {(loc, t): declare(f"u[{loc}][{t}]", "u") for loc in locations for t in range(T)}
    m_col = [declare(f"m[{t}]", "m") for t in range(T)]
    e_col = [declare(f"e[{t}]", "e") for t in range(T)]
    ne_col = [declare(f"ne[{t}]", "aux") for t in range(T - 1)]

    # flight candidates: inventory options matching each leg's route and date
    leg_candidates: List[List[FlightCandidate]] = []
    for k, leg in enumerate(request.legs):
        cands: List[FlightCandidate] = []
        for flight in inventory.flights:
            if (flight.origin != leg.origin or flight.destination != leg.destination
                    or flight.departure.date() != leg.date):
                continue
            t_dep, t_land = grid.flight_slots(flight)
            dep_minute = flight.departure.hour * 60 + flight.departure.minute
            arr_minute = flight.arrival.hour * 60 + flight.arrival.minute
            dep_pen = (_window_deviation_slots(dep_minute, request.airline.departure_time,
                                               params.slot_minutes)
                       if request.airline.departure_time else 0)
            arr_pen = (_window_deviation_slots(arr_minute, request.airline.arrival_time,
                                               params.slot_minutes)
                       if request.airline.arrival_time else 0)
            col = declare(f"f[{flight.id}]", "f")
            cands.append(FlightCandidate(
                col=col, leg=k, flight=flight, t_dep=t_dep, t_land=t_land,
                dep_penalty_slots=dep_pen, arr_penalty_slots=arr_pen,
                obj_coef=weights.flight_coef(flight)))
        leg_candidates.append(cands)

    # hotel candidates: city match plus availability over the stay's nights
    hotel_stays = [i for i, stay in enumerate(stays) if stay.num_nights > 0]
    stay_candidates: List[List[HotelCandidate]] = []
    for i in hotel_stays:
        stay = stays[i]
        first_date = grid.date_of_day(stay.nights[0])
        last_date = grid.date_of_day(stay.nights[-1])
        cands: List[HotelCandidate] = []
        for hotel in inventory.hotels:
            if hotel.city != stay.city:
                continue
            if not (hotel.available_dates.covers(first_date)
                    and hotel.available_dates.covers(last_date)):
                continue
            lo, hi = grid.hotel_coverage(hotel, stay.nights[0], stay.nights[-1])
            col = declare(f"h[{hotel.id}]@s{i}", "h")
            cands.append(HotelCandidate(
                col=col, stay=i, hotel=hotel, cover_lo=lo, cover_hi=hi,
                nights=stay.num_nights,
                obj_coef=weights.hotel_coef(hotel, stay.num_nights)))
        stay_candidates.append(cands)

    dev_cols: Dict[Tuple[str, int], int] = {}
    if request.airline.departure_time is not None:
        for k in range(len(request.legs)):
            dev_cols[("dep", k)] = declare(f"dev_dep[{k}]", "aux", "continuous")
    if request.airline.arrival_time is not None:
        for k in range(len(request.legs)):
            dev_cols[("arr", k)] = declare(f"dev_arr[{k}]", "aux", "continuous")

    cons: List[LinearConstraint] = []

    # (a) commonsense: single location per slot; minimum sleep per night
    for t in range(T):
        cons.append(LinearConstraint(
            f"one_place[{t}]", "commonsense",
            tuple((u_col[(loc, t)], 1.0) for loc in locations), "==", 1.0))
    for n, (lo, hi) in enumerate(grid.night_windows):
        cons.append(LinearConstraint(
            f"sleep[night{n}]", "commonsense",
            tuple((m_col[t], 1.0) for t in range(lo, hi)), ">=",
            float(params.min_sleep_slots)))

    # (b) no teleport: e(t)=0 forces u_l(t+1)=u_l(t), via the complement bit
    for t in range(T - 1):
        cons.append(LinearConstraint(
            f"e_complement[{t}]", "no_teleport",
            ((e_col[t], 1.0), (ne_col[t], 1.0)), "==", 1.0))
        for loc in locations:
            cons.extend(encode_implication(
                [ne_col[t]], u_col[(loc, t + 1)], y_col=u_col[(loc, t)],
                m=params.big_m, name=f"stay_put[{loc}][{t}]", family="no_teleport"))

    # (c) flight consequences and one flight per leg
    for k, cands in enumerate(leg_candidates):
        for cand in cands:
            f = cand.col
            src, dst = cand.flight.origin, cand.flight.destination
            pins = (
                (u_col[(src, cand.t_dep)], "at_src"),
                (u_col[(AIR, cand.t_dep + 1)], "in_air_after_dep"),
                (u_col[(dst, cand.t_land)], "at_dst"),
                (u_col[(AIR, cand.t_land - 1)], "in_air_before_land"),
                (e_col[cand.t_dep], "event_dep"),
                (e_col[cand.t_land - 1], "event_land"),
            )
            for col, tag in pins:
                cons.extend(encode_implication(
                    [f], col, y_const=1.0, m=params.big_m,
                    name=f"flight[{cand.flight.id}]/{tag}", family="flight"))
        cons.append(LinearConstraint(
            f"one_flight[leg{k}]", "flight",
            tuple((c.col, 1.0) for c in cands), "==", 1.0))

    # (d) hotel coverage: sleeping requires presence at the booked hotel's
    # city, and a covering selected booking; one hotel per non-empty stay
    cover_cols: List[List[int]] = [[] for _ in range(T)]
    for cands in stay_candidates:
        for cand in cands:
            city = cand.hotel.city
            for t in range(cand.cover_lo, cand.cover_hi):
                cover_cols[t].append(cand.col)
                cons.append(LinearConstraint(
                    f"sleep_at[{cand.hotel.id}]@s{cand.stay}[{t}]", "hotel",
                    ((m_col[t], 1.0), (u_col[(city, t)], -1.0), (cand.col, params.big_m)),
                    "<=", params.big_m))
    for t in range(T):
        cons.append(LinearConstraint(
            f"sleep_covered[{t}]", "hotel",
            tuple([(m_col[t], 1.0)] + [(col, -1.0) for col in cover_cols[t]]),
            "<=", 0.0))
    for i, cands in zip(hotel_stays, stay_candidates):
        cons.append(LinearConstraint(
            f"one_hotel[stay{i}]", "hotel",
            tuple((c.col, 1.0) for c in cands), "==", 1.0))

    # no sleeping aboard a flight
    for t in range(T):
        cons.append(LinearConstraint(
            f"awake_in_air[{t}]", "sleep_air",
            ((m_col[t], 1.0), (u_col[(AIR, t)], 1.0)), "<=", 1.0))

    # (e) budgets
    all_flight_cands = [c for cands in leg_candidates for c in cands]
    all_hotel_cands = [c for cands in stay_candidates for c in cands]
    if request.airline.price_total_max is not None:
        cons.append(LinearConstraint(
            "flight_budget", "budget",
            tuple((c.col, float(c.flight.price)) for c in all_flight_cands),
            "<=", float(request.airline.price_total_max)))
    if request.hotel.daily_budget_max is not None:
        for cand in all_hotel_cands:
            cons.append(LinearConstraint(
                f"hotel_daily[{cand.hotel.id}]@s{cand.stay}", "budget",
                ((cand.col, float(cand.hotel.price_per_night)),),
                "<=", float(request.hotel.daily_budget_max)))
    if request.budget.everyday_budget is not None:
        for cand in all_hotel_cands:
            cons.append(LinearConstraint(
                f"everyday[{cand.hotel.id}]@s{cand.stay}", "budget",
                ((cand.col, float(cand.hotel.price_per_night)),),
                "<=", float(request.budget.everyday_budget)))
    if request.hotel.total_budget_max is not None:
        cons.append(LinearConstraint(
            "hotel_budget", "budget",
            tuple((c.col, float(c.hotel.price_per_night * c.nights))
                  for c in all_hotel_cands),
            "<=", float(request.hotel.total_budget_max)))
    if request.budget.total_budget is not None:
        cons.append(LinearConstraint(
            "grand_budget", "budget",
            tuple([(c.col, float(c.flight.price)) for c in all_flight_cands]
                  + [(c.col, float(c.hotel.price_per_night * c.nights))
                     for c in all_hotel_cands]),
            "<=", float(request.budget.total_budget)))

    # (f) soft-window deviation feeds the objective through aux terms
    for (kind, k), dev in dev_cols.items():
        terms = [(c.col, float(c.dep_penalty_slots if kind == "dep" else c.arr_penalty_slots))
                 for c in leg_candidates[k]]
        cons.append(LinearConstraint(
            f"dev_{kind}[leg{k}]", "penalty",
            tuple(terms + [(dev, -1.0)]), "<=", 0.0))

    # (g) objective: weighted selection costs plus penalty aux terms
    objective = np.zeros(len(variables))
    for cand in all_flight_cands:
        objective[cand.col] = cand.obj_coef
    for cand in all_hotel_cands:
        objective[cand.col] = cand.obj_coef
    for dev in dev_cols.values():
        objective[dev] = float(params.soft_penalty_weight)

    return MilpModel(
        request=request, params=params, grid=grid, locations=locations,
        stays=stays, variables=variables, constraints=cons,
        objective=objective, var_index=var_index,
        leg_candidates=leg_candidates, stay_candidates=stay_candidates,
        hotel_stays=hotel_stays, u_col=u_col, m_col=m_col, e_col=e_col,
        ne_col=ne_col, dev_cols=dev_cols)


def dump_lp(model: MilpModel) -> str:
    """Text dump, one constraint per line: `name: sum coeff*var sense rhs`."""
    lines = ["minimize: " + " + ".join(
        f"{model.objective[col]:g} {model.variables[col].name}"
        for col in np.nonzero(model.objective)[0])]
    for con in model.constraints:
        terms = " + ".join(f"{coef:g} {model.variables[col].name}"
                           for col, coef in con.coeffs)
        lines.append(f"{con.name}: {terms} {con.sense} {con.rhs:g}")
    return "\n".join(lines) + "\n"
