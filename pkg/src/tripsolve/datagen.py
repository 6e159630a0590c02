"""Synthetic benchmark generator: travel requests plus matching inventories.

Requests mix 2- and 3-city round trips with a small one-way fraction, and
draw optional constraints with configurable presence probabilities. Every
generated (request, inventory) pair is feasible by construction: one
combination of options satisfying every constraint is planted, then the
remaining options are randomized (and may freely undercut or violate the
request, which is what makes the benchmark non-trivial).

All outputs are pure functions of (params, index): each sample runs on its
own seeded sub-generator, so generation parallelizes trivially.
"""

import csv
import hashlib
import random
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import Dict, List, Optional, Sequence, Tuple

from .model import (
    AirlineConstraints,
    BudgetConstraints,
    CabinClass,
    DateRange,
    FlightOption,
    HotelConstraints,
    HotelOption,
    Inventory,
    InvariantViolation,
    PlanningError,
    SymbolicRequest,
    TimeWindow,
    TripKind,
    TripLeg,
    serialize_request,
)


class FileUnreadable(PlanningError):
    """CSV source missing or unreadable."""


class MappingIncomplete(PlanningError):
    """Column map lacks a source column for a required flight field."""


CITY_POOL = ("ATL", "BOS", "DEN", "DFW", "JFK", "LAX", "MIA", "ORD", "PHX", "SEA", "SFO")
AIRLINES = ("Alaska", "American", "Delta", "JetBlue", "Southwest", "United")
PLANE_TYPES = ("Airbus A320", "Airbus A321", "Boeing 737", "Boeing 757", "Embraer E175")
HOTEL_BRANDS = ("Comfort Inn", "Hilton", "Hyatt", "Marriott", "Radisson", "Sheraton", "Westin")
HOTEL_SUFFIXES = ("Airport", "Central", "Downtown", "Garden", "Plaza", "Riverside")

AIRLINE_FIELDS = (
    "price_total_max", "cabin_class", "refundable", "nonstop_only",
    "must_not_basic_economy", "no_mixed_cabin", "avoid_red_eye",
    "departure_time", "arrival_time", "plane_types", "preferred_airlines",
)
HOTEL_FIELDS = ("daily_budget_max", "total_budget_max", "min_rating", "brands")
BUDGET_FIELDS = ("total_budget", "everyday_budget")

DEFAULT_PRESENCE: Dict[str, float] = {
    "airline.price_total_max": 0.70,
    "airline.cabin_class": 0.55,
    "airline.refundable": 0.30,
    "airline.nonstop_only": 0.45,
    "airline.must_not_basic_economy": 0.45,
    "airline.no_mixed_cabin": 0.35,
    "airline.avoid_red_eye": 0.35,
    "airline.departure_time": 0.35,
    "airline.arrival_time": 0.25,
    "airline.plane_types": 0.15,
    "airline.preferred_airlines": 0.25,
    "hotel.daily_budget_max": 0.55,
    "hotel.total_budget_max": 0.40,
    "hotel.min_rating": 0.40,
    "hotel.brands": 0.20,
    "budget.total_budget": 0.30,
    "budget.everyday_budget": 0.20,
}


@dataclass(frozen=True)
class GenParams:
    rng_seed: int = 0
    one_way_fraction: float = 0.04
    three_city_fraction: float = 0.15
    city_pool: Tuple[str, ...] = CITY_POOL
    date_horizon: DateRange = field(
        default_factory=lambda: DateRange(date(2025, 1, 1), date(2025, 6, 30)))
    flights_per_leg: Tuple[int, int] = (4, 8)
    hotels_per_city: Tuple[int, int] = (3, 6)
    leg_gap_days: Tuple[int, int] = (1, 3)
    constraint_presence_probs: Dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_PRESENCE))
    price_noise_sigma: float = 0.15
    base_table: Optional["BaseFlightTable"] = None

    def __post_init__(self):
        if not (0.0 <= self.one_way_fraction < 1.0):
            raise ValueError("one_way_fraction must be a probability")
        if len(self.city_pool) < 3:
            raise ValueError("need at least 3 cities in the pool")
        for name in ("flights_per_leg", "hotels_per_city", "leg_gap_days"):
            lo, hi = getattr(self, name)
            if not (1 <= lo <= hi):
                raise ValueError(f"{name} range {lo}..{hi} is empty or invalid")
        # a 3-leg trip needs room for two leg gaps inside the horizon
        if self.date_horizon.days() < 2 * self.leg_gap_days[1] + 2:
            raise ValueError("date_horizon too short for the configured leg gaps")

    def presence(self, key: str) -> float:
        return self.constraint_presence_probs.get(key, DEFAULT_PRESENCE.get(key, 0.0))


@dataclass(frozen=True)
class Selection:
    """One flight per leg and one hotel per (non-empty) stay, by option id."""

    flights: Tuple[str, ...]
    hotels: Tuple[str, ...]


@dataclass(frozen=True)
class BaseFlightTable:
    rows: Tuple[FlightOption, ...]
    date_span: DateRange
    skipped: int = 0
    skip_reasons: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        if not self.rows:
            raise InvariantViolation("base_table", "no valid flight rows after ingestion")


def _sample_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_000_007 + index * 2 + 1)


def _inventory_rng(params: GenParams, request: SymbolicRequest) -> random.Random:
    digest = hashlib.sha256(
        f"{params.rng_seed}|{serialize_request(request)}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _whole_dollars(cents: float) -> int:
    return max(100, int(-(-cents // 100)) * 100)  # ceil to a whole dollar


# ---------------------------------------------------------------------------
# request generation
# ---------------------------------------------------------------------------

def gen_request(params: GenParams, index: int) -> SymbolicRequest:
    """Deterministic request for (params.rng_seed, index)."""
    rng = _sample_rng(params.rng_seed, index)
    one_way = rng.random() < params.one_way_fraction

    horizon = params.date_horizon
    if one_way:
        origin, dest = rng.sample(params.city_pool, 2)
        day = horizon.start + timedelta(days=rng.randrange(horizon.days()))
        legs = (TripLeg(day, origin, dest),)
        kind = TripKind.ONE_WAY
    else:
        n_cities = 3 if rng.random() < params.three_city_fraction else 2
        cities = rng.sample(params.city_pool, n_cities)
        gaps = [rng.randint(*params.leg_gap_days) for _ in range(n_cities)]
        span = sum(gaps)
        latest_start = max(horizon.days() - span - 1, 1)
        start = horizon.start + timedelta(days=rng.randrange(latest_start))
        route = cities + [cities[0]]
        legs_list: List[TripLeg] = []
        day = start
        for k in range(len(route) - 1):
            legs_list.append(TripLeg(day, route[k], route[k + 1]))
            day = day + timedelta(days=gaps[k])
        legs = tuple(legs_list)
        kind = TripKind.ROUND_TRIP

    nights = (legs[-1].date - legs[0].date).days
    # cost anchors keep sampled budgets generous enough to plant a solution
    flight_bases = [rng.randint(120, 600) * 100 for _ in legs]
    hotel_base = rng.randint(70, 350) * 100

    present = lambda key: rng.random() < params.presence(key)

    air: Dict[str, object] = {}
    if present("airline.price_total_max"):
        air["price_total_max"] = _whole_dollars(sum(flight_bases) * rng.uniform(1.05, 1.6))
    if present("airline.cabin_class"):
        air["cabin_class"] = rng.choices(
            list(CabinClass), weights=(0.65, 0.10, 0.18, 0.07))[0]
    if present("airline.refundable"):
        air["refundable"] = rng.random() < 0.8
    if present("airline.nonstop_only"):
        air["nonstop_only"] = rng.random() < 0.85
    if present("airline.must_not_basic_economy"):
        air["must_not_basic_economy"] = rng.random() < 0.9
    if present("airline.no_mixed_cabin"):
        air["no_mixed_cabin"] = rng.random() < 0.9
    if present("airline.avoid_red_eye"):
        air["avoid_red_eye"] = rng.random() < 0.9
    if present("airline.departure_time"):
        start_min = rng.randrange(10, 40) * 30  # 05:00 .. 19:30
        length = rng.choice((120, 180, 240, 300, 360))
        air["departure_time"] = TimeWindow(start_min, min(start_min + length, 1439))
    if present("airline.arrival_time"):
        start_min = rng.randrange(16, 43) * 30  # 08:00 .. 21:00
        length = rng.choice((120, 180, 240, 300))
        air["arrival_time"] = TimeWindow(start_min, min(start_min + length, 1439))
    if present("airline.plane_types"):
        air["plane_types"] = tuple(rng.sample(PLANE_TYPES, rng.randint(1, 3)))
    if present("airline.preferred_airlines"):
        air["preferred_airlines"] = tuple(rng.sample(AIRLINES, rng.randint(1, 3)))

    hot: Dict[str, object] = {}
    if nights > 0:
        if present("hotel.daily_budget_max"):
            hot["daily_budget_max"] = _whole_dollars(hotel_base * rng.uniform(1.05, 1.5))
        if present("hotel.total_budget_max"):
            hot["total_budget_max"] = _whole_dollars(hotel_base * nights * rng.uniform(1.05, 1.5))
        if present("hotel.min_rating"):
            hot["min_rating"] = rng.choice((25, 30, 35, 40, 45))
        if present("hotel.brands"):
            hot["brands"] = tuple(rng.sample(HOTEL_BRANDS, rng.randint(1, 3)))

    bud: Dict[str, object] = {}
    if present("budget.total_budget"):
        bud["total_budget"] = _whole_dollars(
            (sum(flight_bases) + hotel_base * nights) * rng.uniform(1.1, 1.5))
    if nights > 0 and present("budget.everyday_budget"):
        bud["everyday_budget"] = _whole_dollars(hotel_base * rng.uniform(1.15, 1.8))

    return SymbolicRequest(
        legs=legs,
        airline=AirlineConstraints(**air),  # type: ignore[arg-type]
        hotel=HotelConstraints(**hot),  # type: ignore[arg-type]
        budget=BudgetConstraints(**bud),  # type: ignore[arg-type]
        trip_kind=kind,
    )


# ---------------------------------------------------------------------------
# inventory generation
# ---------------------------------------------------------------------------

def _planted_flight_caps(request: SymbolicRequest) -> List[int]:
    """Per-leg price ceiling the planted flights must respect."""
    n = len(request.legs)
    caps = []
    if request.airline.price_total_max is not None:
        caps.append(request.airline.price_total_max // n)
    if request.budget.total_budget is not None:
        caps.append(int(request.budget.total_budget * 0.6) // n)
    cap = min(caps) if caps else 45000
    return [cap] * n


def _planted_nightly_cap(request: SymbolicRequest, total_nights: int) -> int:
    caps = []
    if request.hotel.daily_budget_max is not None:
        caps.append(request.hotel.daily_budget_max)
    if request.budget.everyday_budget is not None:
        caps.append(request.budget.everyday_budget)
    if total_nights > 0:
        if request.hotel.total_budget_max is not None:
            caps.append(request.hotel.total_budget_max // total_nights)
        if request.budget.total_budget is not None:
            caps.append(int(request.budget.total_budget * 0.4) // total_nights)
    return min(caps) if caps else 25000


def _pick_minute(rng: random.Random, lo: int, hi: int) -> int:
    """Random 5-minute mark in [lo, hi]."""
    return rng.randrange(lo // 5, hi // 5 + 1) * 5


def _planted_departure(rng: random.Random, window: Optional[TimeWindow]) -> int:
    if window is not None:
        lo = max(window.start, 5 * 60)
        hi = min(window.end - 1, 20 * 60)
        if lo <= hi:
            return _pick_minute(rng, lo, hi)
    return _pick_minute(rng, 8 * 60, 17 * 60)


def _flight(rng: random.Random, fid: str, leg: TripLeg, dep_min: int, duration: int,
            price: int, cabin: CabinClass, basic: bool, mixed: bool, nonstop: bool,
            airline: str, plane: str, refundable: bool) -> FlightOption:
    dep = datetime.combine(leg.date, time(dep_min // 60, dep_min % 60))
    arr_min = dep_min + duration
    arr = datetime.combine(leg.date, time(arr_min // 60, arr_min % 60))
    return FlightOption(
        id=fid, origin=leg.origin, destination=leg.destination,
        departure=dep, arrival=arr, price=price, cabin_class=cabin,
        is_basic_economy=basic, is_mixed_cabin=mixed, is_nonstop=nonstop,
        airline=airline, plane_type=plane, refundable=refundable)


def _random_flight(rng: random.Random, fid: str, leg: TripLeg,
                   base_table: Optional[BaseFlightTable]) -> FlightOption:
    dep_min = _pick_minute(rng, 0, 21 * 60)
    duration = rng.randint(75, min(300, 22 * 60 + 55 - dep_min))
    if base_table is not None:
        sample = rng.choice(base_table.rows)
        price = max(100, int(sample.price * rng.uniform(0.85, 1.15)) // 100 * 100)
        airline, plane, cabin = sample.airline, sample.plane_type, sample.cabin_class
        basic, mixed, nonstop = sample.is_basic_economy, sample.is_mixed_cabin, sample.is_nonstop
        refundable = sample.refundable
    else:
        price = rng.randint(80, 900) * 100
        airline = rng.choice(AIRLINES)
        plane = rng.choice(PLANE_TYPES)
        cabin = rng.choices(list(CabinClass), weights=(0.6, 0.12, 0.2, 0.08))[0]
        basic = rng.random() < 0.25
        mixed = rng.random() < 0.15
        nonstop = rng.random() < 0.7
        refundable = rng.random() < 0.5
    return _flight(rng, fid, leg, dep_min, duration, price, cabin,
                   basic, mixed, nonstop, airline, plane, refundable)


def _planted_flight_for_leg(rng: random.Random, fid: str, leg: TripLeg,
                            request: SymbolicRequest, price_cap: int) -> FlightOption:
    a = request.airline
    price = max(6000, int(price_cap * rng.uniform(0.35, 0.85)) // 100 * 100)
    price = min(price, price_cap)
    dep_min = _planted_departure(rng, a.departure_time)
    duration = rng.randint(75, min(300, 22 * 60 + 55 - dep_min))
    cabin = a.cabin_class if a.cabin_class is not None else rng.choice(list(CabinClass))
    return _flight(
        rng, fid, leg, dep_min, duration, price, cabin,
        basic=False if a.must_not_basic_economy else rng.random() < 0.2,
        mixed=False if a.no_mixed_cabin else rng.random() < 0.1,
        nonstop=True if a.nonstop_only else rng.random() < 0.8,
        airline=rng.choice(a.preferred_airlines) if a.preferred_airlines else rng.choice(AIRLINES),
        plane=rng.choice(a.plane_types) if a.plane_types else rng.choice(PLANE_TYPES),
        refundable=a.refundable if a.refundable is not None else rng.random() < 0.5,
    )


def _planted_hotel(rng: random.Random, hid: str, city: str, request: SymbolicRequest,
                   nightly_cap: int, first_night: date, last_night: date) -> HotelOption:
    h = request.hotel
    price = max(3000, int(nightly_cap * rng.uniform(0.35, 0.85)) // 100 * 100)
    price = min(price, nightly_cap)
    brand = rng.choice(h.brands) if h.brands else rng.choice(HOTEL_BRANDS)
    rating = rng.randint(h.min_rating, 50) if h.min_rating is not None else rng.randint(20, 50)
    return HotelOption(
        id=hid, city=city, name=f"{brand} {city} {rng.choice(HOTEL_SUFFIXES)}",
        brand=brand, rating=rating, price_per_night=price,
        earliest_checkin=_pick_minute(rng, 12 * 60, 16 * 60),
        latest_checkout=_pick_minute(rng, 9 * 60, 12 * 60),
        available_dates=DateRange(
            first_night - timedelta(days=rng.randint(0, 2)),
            last_night + timedelta(days=rng.randint(0, 2))),
    )


def _random_hotel(rng: random.Random, hid: str, city: str,
                  first_night: date, last_night: date) -> HotelOption:
    brand = rng.choice(HOTEL_BRANDS)
    if rng.random() < 0.1:
        # occasional availability miss so the date filter is exercised
        start = first_night + timedelta(days=rng.randint(1, 3))
        available = DateRange(start, start + timedelta(days=rng.randint(0, 3)))
    else:
        available = DateRange(
            first_night - timedelta(days=rng.randint(0, 3)),
            last_night + timedelta(days=rng.randint(0, 3)))
    return HotelOption(
        id=hid, city=city, name=f"{brand} {city} {rng.choice(HOTEL_SUFFIXES)}",
        brand=brand, rating=rng.randint(15, 50),
        price_per_night=rng.randint(40, 600) * 100,
        earliest_checkin=_pick_minute(rng, 12 * 60, 18 * 60),
        latest_checkout=_pick_minute(rng, 8 * 60, 12 * 60),
        available_dates=available,
    )


def gen_inventory(params: GenParams, request: SymbolicRequest,
                  return_planted: bool = False):
    """Flights per leg and hotels per intermediate city, with one feasible
    combination planted so the instance always admits a solution."""
    rng = _inventory_rng(params, request)
    flight_caps = _planted_flight_caps(request)
    total_nights = (request.legs[-1].date - request.legs[0].date).days
    nightly_cap = _planted_nightly_cap(request, total_nights)

    flights: List[FlightOption] = []
    planted_flights: List[str] = []
    for k, leg in enumerate(request.legs):
        count = rng.randint(*params.flights_per_leg)
        planted = _planted_flight_for_leg(rng, f"F{k}-00", leg, request, flight_caps[k])
        planted_flights.append(planted.id)
        leg_flights = [planted]
        for i in range(1, count):
            leg_flights.append(_random_flight(rng, f"F{k}-{i:02d}", leg, params.base_table))
        order = list(range(len(leg_flights)))
        rng.shuffle(order)  # planted option is not positionally distinguishable
        flights.extend(leg_flights[i] for i in order)

    hotels: List[HotelOption] = []
    planted_hotels: List[str] = []
    stay_no = 0
    for k in range(len(request.legs) - 1):
        city = request.legs[k].destination
        first_night = request.legs[k].date
        last_night = request.legs[k + 1].date - timedelta(days=1)
        if last_night < first_night:
            continue  # zero-night stay needs no hotel
        count = rng.randint(*params.hotels_per_city)
        planted = _planted_hotel(
            rng, f"H{stay_no}-00", city, request, nightly_cap, first_night, last_night)
        planted_hotels.append(planted.id)
        distractors = [
            _random_hotel(rng, f"H{stay_no}-{i:02d}", city, first_night, last_night)
            for i in range(1, count)
        ]
        distractors = perturb_hotels(distractors, params, rng)
        stay_hotels = [planted] + distractors
        order = list(range(len(stay_hotels)))
        rng.shuffle(order)
        hotels.extend(stay_hotels[i] for i in order)
        stay_no += 1

    inventory = Inventory(flights=tuple(flights), hotels=tuple(hotels))
    if return_planted:
        return inventory, Selection(tuple(planted_flights), tuple(planted_hotels))
    return inventory


def perturb_hotels(hotels: Sequence[HotelOption], params: GenParams,
                   rng: Optional[random.Random] = None) -> List[HotelOption]:
    """Multiplicative log-normal price noise plus small attribute jitter."""
    if rng is None:
        rng = random.Random(params.rng_seed)
    out: List[HotelOption] = []
    for hotel in hotels:
        factor = 1.0 if params.price_noise_sigma == 0 else (
            2.718281828459045 ** rng.gauss(0.0, params.price_noise_sigma))
        price = max(100, int(round(hotel.price_per_night * factor)))
        rating = hotel.rating
        checkin = hotel.earliest_checkin
        if params.price_noise_sigma > 0:
            rating = min(50, max(0, rating + rng.choice((-2, -1, 0, 0, 1, 2))))
            checkin = min(1435, max(0, checkin + rng.choice((-30, 0, 0, 30))))
        out.append(HotelOption(
            id=hotel.id, city=hotel.city, name=hotel.name, brand=hotel.brand,
            rating=rating, price_per_night=price, earliest_checkin=checkin,
            latest_checkout=hotel.latest_checkout, available_dates=hotel.available_dates))
    return out


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

REQUIRED_CSV_FIELDS = ("origin", "destination", "departure", "arrival", "price")
OPTIONAL_CSV_FIELDS = ("id", "cabin_class", "is_basic_economy", "is_mixed_cabin",
                       "is_nonstop", "airline", "plane_type", "refundable")

_TRUTHY = {"1", "true", "yes", "y", "t"}
_FALSY = {"0", "false", "no", "n", "f", ""}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _TRUTHY:
        return True
    if lowered in _FALSY:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_dt(raw: str) -> datetime:
    return datetime.fromisoformat(raw.strip())


def ingest_flight_csv(path: str, column_map: Dict[str, str]) -> BaseFlightTable:
    """Load real-world flight rows with a configurable column mapping.

    Rows failing flight invariants are skipped and tallied by reason.
    """
    for needed in REQUIRED_CSV_FIELDS:
        if needed not in column_map:
            raise MappingIncomplete(f"no source column mapped for required field {needed!r}")
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"cannot read {path}: {exc}") from None

    rows: List[FlightOption] = []
    reasons: Counter = Counter()
    with handle:
        reader = csv.DictReader(handle)
        for line_no, row in enumerate(reader, start=2):
            try:
                def col(field_name: str, default: Optional[str] = None) -> str:
                    source = column_map.get(field_name)
                    if source is None:
                        if default is None:
                            raise ValueError(f"missing column for {field_name}")
                        return default
                    value = row.get(source)
                    if value is None:
                        raise ValueError(f"row lacks column {source!r}")
                    return value

                cabin_raw = col("cabin_class", "coach").strip().lower()
                flight = FlightOption(
                    id=col("id", f"row{line_no}").strip(),
                    origin=col("origin").strip().upper(),
                    destination=col("destination").strip().upper(),
                    departure=_parse_dt(col("departure")),
                    arrival=_parse_dt(col("arrival")),
                    price=max(0, round(float(col("price")) * 100)),
                    cabin_class=CabinClass(cabin_raw),
                    is_basic_economy=_parse_bool(col("is_basic_economy", "false")),
                    is_mixed_cabin=_parse_bool(col("is_mixed_cabin", "false")),
                    is_nonstop=_parse_bool(col("is_nonstop", "true")),
                    airline=col("airline", "Unknown").strip(),
                    plane_type=col("plane_type", "Unknown").strip(),
                    refundable=_parse_bool(col("refundable", "false")),
                )
            except (PlanningError, ValueError) as exc:
                reasons[type(exc).__name__] += 1
                continue
            rows.append(flight)

    if not rows:
        raise InvariantViolation("base_table", f"no valid flight rows in {path}")
    dates = [r.departure.date() for r in rows]
    return BaseFlightTable(
        rows=tuple(rows),
        date_span=DateRange(min(dates), max(dates)),
        skipped=sum(reasons.values()),
        skip_reasons=tuple(sorted(reasons.items())),
    )


def replicate_dates(table: BaseFlightTable, target_horizon: DateRange) -> BaseFlightTable:
    """Tile base rows across a longer horizon by whole-span date shifts."""
    span_days = table.date_span.days()
    first_offset = (target_horizon.start - table.date_span.start).days
    rows: List[FlightOption] = []
    copy = 0
    while True:
        shift = timedelta(days=first_offset + copy * span_days)
        if (table.date_span.start + shift) > target_horizon.end:
            break
        for row in table.rows:
            departure = row.departure + shift
            if not target_horizon.covers(departure.date()):
                continue
            rows.append(FlightOption(
                id=f"{row.id}@r{copy}",
                origin=row.origin, destination=row.destination,
                departure=departure, arrival=row.arrival + shift,
                price=row.price, cabin_class=row.cabin_class,
                is_basic_economy=row.is_basic_economy,
                is_mixed_cabin=row.is_mixed_cabin, is_nonstop=row.is_nonstop,
                airline=row.airline, plane_type=row.plane_type,
                refundable=row.refundable))
        copy += 1
    dates = [r.departure.date() for r in rows]
    return BaseFlightTable(
        rows=tuple(rows),
        date_span=DateRange(min(dates), max(dates)),
        skipped=table.skipped,
        skip_reasons=table.skip_reasons,
    )
