"""Symbolic travel-request data model, canonical JSON, and structural comparison.

A travel request is a small constraint program: ordered trip legs plus
optional airline/hotel/budget constraints. Everything here is immutable
after construction and normalized at construction time, so two requests
compare equal exactly when their canonical JSON is byte-identical.

Conventions used across the package:
  * money is integer cents (JSON carries dollars),
  * times of day are integer minutes from midnight (JSON carries "HH:MM"),
  * hotel ratings are integer tenths of a star (JSON carries e.g. 4.5),
  * soft time windows are half-open [start, end) minute spans.
"""

import json
import re
from dataclasses import dataclass, fields
from datetime import date, datetime, timedelta
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class PlanningError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedJson(PlanningError):
    """Input text is not valid JSON."""


class SchemaViolation(PlanningError):
    """A field has the wrong name, type, or format."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class InvariantViolation(PlanningError):
    """Structurally valid JSON that violates a domain invariant."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


MINUTES_PER_DAY = 24 * 60
_AIRPORT_RE = re.compile(r"^[A-Z]{3}$")
_TIME_RE = re.compile(r"^([01]?\d|2[0-3]):([0-5]\d)$")


class TripKind(str, Enum):
    ROUND_TRIP = "round_trip"
    ONE_WAY = "one_way"


class CabinClass(str, Enum):
    COACH = "coach"
    PREMIUM = "premium"
    BUSINESS = "business"
    FIRST = "first"


# ---------------------------------------------------------------------------
# scalar codecs (JSON <-> internal representation)
# ---------------------------------------------------------------------------

def cents_to_json(cents: int) -> Any:
    """Integer dollars when whole, else a two-decimal float."""
    if cents % 100 == 0:
        return cents // 100
    return cents / 100.0


def cents_from_json(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected a number of dollars, got {value!r}")
    cents = round(value * 100)
    if abs(cents - value * 100) > 1e-6:
        raise SchemaViolation(path, f"amount {value!r} has sub-cent precision")
    return int(cents)


def minutes_to_json(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def minutes_from_json(value: Any, path: str) -> int:
    if not isinstance(value, str) or not _TIME_RE.match(value):
        raise SchemaViolation(path, f"expected 'HH:MM', got {value!r}")
    hours, mins = value.split(":")
    return int(hours) * 60 + int(mins)


def rating_to_json(tenths: int) -> float:
    return tenths / 10.0


def rating_from_json(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected a rating number, got {value!r}")
    tenths = round(value * 10)
    if abs(tenths - value * 10) > 1e-6:
        raise SchemaViolation(path, f"rating {value!r} is finer than 0.1 steps")
    return int(tenths)


def date_from_json(value: Any, path: str) -> date:
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected 'YYYY-MM-DD', got {value!r}")
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from None


def datetime_from_json(value: Any, path: str) -> datetime:
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected 'YYYY-MM-DDTHH:MM', got {value!r}")
    try:
        return datetime.fromisoformat(value)
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from None


def _require_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected a string, got {value!r}")
    return value


def _require_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaViolation(path, f"expected a boolean, got {value!r}")
    return value


def _require_airport(value: Any, path: str) -> str:
    code = _require_str(value, path)
    if not _AIRPORT_RE.match(code):
        raise InvariantViolation(path, f"{code!r} is not a 3-letter uppercase airport code")
    return code


def _require_obj(value: Any, path: str, allowed: Tuple[str, ...]) -> Dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaViolation(path, f"expected an object, got {value!r}")
    for key in value:
        if key not in allowed:
            raise SchemaViolation(f"{path}.{key}" if path else key, "unknown field")
    return value


def _str_set(value: Any, path: str) -> Tuple[str, ...]:
    if not isinstance(value, list):
        raise SchemaViolation(path, f"expected a list of strings, got {value!r}")
    items = [_require_str(v, f"{path}[{i}]") for i, v in enumerate(value)]
    return tuple(sorted(set(items)))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class TimeWindow:
    """Half-open [start, end) minutes-from-midnight span within one day."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end <= MINUTES_PER_DAY):
            raise InvariantViolation(
                "window", f"need 0 <= start < end <= 1440, got [{self.start}, {self.end})")

    def contains(self, minute: int) -> bool:
        return self.start <= minute < self.end

    def to_json(self) -> Dict[str, str]:
        return {"start": minutes_to_json(self.start), "end": minutes_to_json(self.end)}

    @staticmethod
    def from_json(value: Any, path: str) -> "TimeWindow":
        obj = _require_obj(value, path, ("start", "end"))
        if "start" not in obj or "end" not in obj:
            raise SchemaViolation(path, "window needs both 'start' and 'end'")
        return TimeWindow(
            minutes_from_json(obj["start"], f"{path}.start"),
            minutes_from_json(obj["end"], f"{path}.end"),
        )


@dataclass(frozen=True)
class TripLeg:
    date: date
    origin: str
    destination: str

    def __post_init__(self):
        _require_airport(self.origin, "leg.origin")
        _require_airport(self.destination, "leg.destination")
        if self.origin == self.destination:
            raise InvariantViolation("leg", f"origin == destination ({self.origin})")

    def to_json(self) -> Dict[str, str]:
        return {
            "date": self.date.isoformat(),
            "origin": self.origin,
            "destination": self.destination,
        }

    @staticmethod
    def from_json(value: Any, path: str) -> "TripLeg":
        obj = _require_obj(value, path, ("date", "origin", "destination"))
        for key in ("date", "origin", "destination"):
            if key not in obj:
                raise SchemaViolation(f"{path}.{key}", "missing required field")
        return TripLeg(
            date_from_json(obj["date"], f"{path}.date"),
            _require_airport(obj["origin"], f"{path}.origin"),
            _require_airport(obj["destination"], f"{path}.destination"),
        )


@dataclass(frozen=True)
class AirlineConstraints:
    price_total_max: Optional[int] = None
    cabin_class: Optional[CabinClass] = None
    refundable: Optional[bool] = None
    nonstop_only: Optional[bool] = None
    must_not_basic_economy: Optional[bool] = None
    no_mixed_cabin: Optional[bool] = None
    avoid_red_eye: Optional[bool] = None
    departure_time: Optional[TimeWindow] = None
    arrival_time: Optional[TimeWindow] = None
    plane_types: Optional[Tuple[str, ...]] = None
    preferred_airlines: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.price_total_max is not None and self.price_total_max < 0:
            raise InvariantViolation("airline.price_total_max", "must be >= 0")
        for name in ("plane_types", "preferred_airlines"):
            value = getattr(self, name)
            if value is not None:
                normalized = tuple(sorted(set(value)))
                if not normalized:
                    raise InvariantViolation(f"airline.{name}", "set must be non-empty when present")
                object.__setattr__(self, name, normalized)

    def present_fields(self) -> List[str]:
        return [f.name for f in fields(self) if getattr(self, f.name) is not None]

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        if self.price_total_max is not None:
            out["price_total_max"] = cents_to_json(self.price_total_max)
        if self.cabin_class is not None:
            out["cabin_class"] = self.cabin_class.value
        for name in ("refundable", "nonstop_only", "must_not_basic_economy",
                     "no_mixed_cabin", "avoid_red_eye"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        if self.departure_time is not None:
            out["departure_time"] = self.departure_time.to_json()
        if self.arrival_time is not None:
            out["arrival_time"] = self.arrival_time.to_json()
        if self.plane_types is not None:
            out["plane_types"] = list(self.plane_types)
        if self.preferred_airlines is not None:
            out["preferred_airlines"] = list(self.preferred_airlines)
        return out

    @staticmethod
    def from_json(value: Any, path: str) -> "AirlineConstraints":
        allowed = ("price_total_max", "cabin_class", "refundable", "nonstop_only",
                   "must_not_basic_economy", "no_mixed_cabin", "avoid_red_eye",
                   "departure_time", "arrival_time", "plane_types", "preferred_airlines")
        obj = _require_obj(value, path, allowed)
        kwargs: Dict[str, Any] = {}
        if "price_total_max" in obj:
            kwargs["price_total_max"] = cents_from_json(obj["price_total_max"], f"{path}.price_total_max")
        if "cabin_class" in obj:
            raw = _require_str(obj["cabin_class"], f"{path}.cabin_class")
            try:
                kwargs["cabin_class"] = CabinClass(raw)
            except ValueError:
                raise SchemaViolation(f"{path}.cabin_class", f"unknown cabin class {raw!r}") from None
        for name in ("refundable", "nonstop_only", "must_not_basic_economy",
                     "no_mixed_cabin", "avoid_red_eye"):
            if name in obj:
                kwargs[name] = _require_bool(obj[name], f"{path}.{name}")
        if "departure_time" in obj:
            kwargs["departure_time"] = TimeWindow.from_json(obj["departure_time"], f"{path}.departure_time")
        if "arrival_time" in obj:
            kwargs["arrival_time"] = TimeWindow.from_json(obj["arrival_time"], f"{path}.arrival_time")
        if "plane_types" in obj:
            kwargs["plane_types"] = _str_set(obj["plane_types"], f"{path}.plane_types")
        if "preferred_airlines" in obj:
            kwargs["preferred_airlines"] = _str_set(obj["preferred_airlines"], f"{path}.preferred_airlines")
        return AirlineConstraints(**kwargs)


@dataclass(frozen=True)
class HotelConstraints:
    daily_budget_max: Optional[int] = None
    total_budget_max: Optional[int] = None
    min_rating: Optional[int] = None  # tenths of a star, 0..50
    brands: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        for name in ("daily_budget_max", "total_budget_max"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvariantViolation(f"hotel.{name}", "must be >= 0")
        if self.min_rating is not None and not (0 <= self.min_rating <= 50):
            raise InvariantViolation("hotel.min_rating", "rating must be in [0, 5]")
        if self.brands is not None:
            normalized = tuple(sorted(set(self.brands)))
            if not normalized:
                raise InvariantViolation("hotel.brands", "set must be non-empty when present")
            object.__setattr__(self, "brands", normalized)

    def present_fields(self) -> List[str]:
        return [f.name for f in fields(self) if getattr(self, f.name) is not None]

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        if self.daily_budget_max is not None:
            out["daily_budget_max"] = cents_to_json(self.daily_budget_max)
        if self.total_budget_max is not None:
            out["total_budget_max"] = cents_to_json(self.total_budget_max)
        if self.min_rating is not None:
            out["min_rating"] = rating_to_json(self.min_rating)
        if self.brands is not None:
            out["brands"] = list(self.brands)
        return out

    @staticmethod
    def from_json(value: Any, path: str) -> "HotelConstraints":
        obj = _require_obj(value, path, ("daily_budget_max", "total_budget_max", "min_rating", "brands"))
        kwargs: Dict[str, Any] = {}
        if "daily_budget_max" in obj:
            kwargs["daily_budget_max"] = cents_from_json(obj["daily_budget_max"], f"{path}.daily_budget_max")
        if "total_budget_max" in obj:
            kwargs["total_budget_max"] = cents_from_json(obj["total_budget_max"], f"{path}.total_budget_max")
        if "min_rating" in obj:
            kwargs["min_rating"] = rating_from_json(obj["min_rating"], f"{path}.min_rating")
        if "brands" in obj:
            kwargs["brands"] = _str_set(obj["brands"], f"{path}.brands")
        return HotelConstraints(**kwargs)


@dataclass(frozen=True)
class BudgetConstraints:
    total_budget: Optional[int] = None
    everyday_budget: Optional[int] = None

    def __post_init__(self):
        for name in ("total_budget", "everyday_budget"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvariantViolation(f"budget.{name}", "must be >= 0")

    def present_fields(self) -> List[str]:
        return [f.name for f in fields(self) if getattr(self, f.name) is not None]

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        if self.total_budget is not None:
            out["total_budget"] = cents_to_json(self.total_budget)
        if self.everyday_budget is not None:
            out["everyday_budget"] = cents_to_json(self.everyday_budget)
        return out

    @staticmethod
    def from_json(value: Any, path: str) -> "BudgetConstraints":
        obj = _require_obj(value, path, ("total_budget", "everyday_budget"))
        kwargs: Dict[str, Any] = {}
        if "total_budget" in obj:
            kwargs["total_budget"] = cents_from_json(obj["total_budget"], f"{path}.total_budget")
        if "everyday_budget" in obj:
            kwargs["everyday_budget"] = cents_from_json(obj["everyday_budget"], f"{path}.everyday_budget")
        return BudgetConstraints(**kwargs)


@dataclass(frozen=True)
class SymbolicRequest:
    legs: Tuple[TripLeg, ...]
    airline: AirlineConstraints = AirlineConstraints()
    hotel: HotelConstraints = HotelConstraints()
    budget: BudgetConstraints = BudgetConstraints()
    trip_kind: TripKind = TripKind.ROUND_TRIP

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        if not (1 <= len(self.legs) <= 3):
            raise InvariantViolation("legs", f"need 1-3 legs, got {len(self.legs)}")
        for i in range(1, len(self.legs)):
            if self.legs[i].date < self.legs[i - 1].date:
                raise InvariantViolation(f"legs[{i}].date", "legs must be date-ordered")
            if self.legs[i].origin != self.legs[i - 1].destination:
                raise InvariantViolation(
                    f"legs[{i}].origin",
                    f"legs must chain: {self.legs[i - 1].destination} != {self.legs[i].origin}")
        if self.trip_kind is TripKind.ONE_WAY:
            if len(self.legs) != 1:
                raise InvariantViolation("legs", "one-way trips have exactly 1 leg")
        else:
            if len(self.legs) < 2:
                raise InvariantViolation("legs", "round trips have 2 or 3 legs")
            if self.legs[-1].destination != self.legs[0].origin:
                raise InvariantViolation(
                    "legs", "round trip must return to the first origin")

    @property
    def home(self) -> str:
        return self.legs[0].origin

    @property
    def cities(self) -> List[str]:
        """Distinct airports on the route, in first-visit order."""
        seen: List[str] = [self.legs[0].origin]
        for leg in self.legs:
            if leg.destination not in seen:
                seen.append(leg.destination)
        return seen

    def constraint_counts(self) -> Dict[str, int]:
        return {
            "airline": len(self.airline.present_fields()),
            "hotel": len(self.hotel.present_fields()),
            "budget": len(self.budget.present_fields()),
        }

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "trip_kind": self.trip_kind.value,
            "legs": [leg.to_json() for leg in self.legs],
        }
        airline = self.airline.to_json()
        if airline:
            out["airline"] = airline
        hotel = self.hotel.to_json()
        if hotel:
            out["hotel"] = hotel
        budget = self.budget.to_json()
        if budget:
            out["budget"] = budget
        return out

    @staticmethod
    def from_json(value: Any, path: str = "") -> "SymbolicRequest":
        obj = _require_obj(value, path, ("trip_kind", "legs", "airline", "hotel", "budget"))
        if "legs" not in obj:
            raise SchemaViolation("legs", "missing required field")
        if not isinstance(obj["legs"], list):
            raise SchemaViolation("legs", f"expected a list, got {obj['legs']!r}")
        legs = tuple(
            TripLeg.from_json(item, f"legs[{i}]") for i, item in enumerate(obj["legs"]))
        kind_raw = obj.get("trip_kind", TripKind.ROUND_TRIP.value)
        try:
            kind = TripKind(_require_str(kind_raw, "trip_kind"))
        except ValueError:
            raise SchemaViolation("trip_kind", f"unknown trip kind {kind_raw!r}") from None
        return SymbolicRequest(
            legs=legs,
            airline=AirlineConstraints.from_json(obj.get("airline", {}), "airline"),
            hotel=HotelConstraints.from_json(obj.get("hotel", {}), "hotel"),
            budget=BudgetConstraints.from_json(obj.get("budget", {}), "budget"),
            trip_kind=kind,
        )


@dataclass(frozen=True)
class FlightOption:
    id: str
    origin: str
    destination: str
    departure: datetime
    arrival: datetime
    price: int
    cabin_class: CabinClass
    is_basic_economy: bool
    is_mixed_cabin: bool
    is_nonstop: bool
    airline: str
    plane_type: str
    refundable: bool

    def __post_init__(self):
        _require_airport(self.origin, f"flight[{self.id}].origin")
        _require_airport(self.destination, f"flight[{self.id}].destination")
        if self.departure >= self.arrival:
            raise InvariantViolation(f"flight[{self.id}]", "departure must precede arrival")
        if self.price <= 0:
            raise InvariantViolation(f"flight[{self.id}].price", "price must be > 0")

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "origin": self.origin,
            "destination": self.destination,
            "departure": self.departure.isoformat(timespec="minutes"),
            "arrival": self.arrival.isoformat(timespec="minutes"),
            "price": cents_to_json(self.price),
            "cabin_class": self.cabin_class.value,
            "is_basic_economy": self.is_basic_economy,
            "is_mixed_cabin": self.is_mixed_cabin,
            "is_nonstop": self.is_nonstop,
            "airline": self.airline,
            "plane_type": self.plane_type,
            "refundable": self.refundable,
        }

    @staticmethod
    def from_json(value: Any, path: str) -> "FlightOption":
        allowed = ("id", "origin", "destination", "departure", "arrival", "price",
                   "cabin_class", "is_basic_economy", "is_mixed_cabin", "is_nonstop",
                   "airline", "plane_type", "refundable")
        obj = _require_obj(value, path, allowed)
        for key in allowed:
            if key not in obj:
                raise SchemaViolation(f"{path}.{key}", "missing required field")
        try:
            cabin = CabinClass(_require_str(obj["cabin_class"], f"{path}.cabin_class"))
        except ValueError:
            raise SchemaViolation(f"{path}.cabin_class", f"unknown cabin class {obj['cabin_class']!r}") from None
        return FlightOption(
            id=_require_str(obj["id"], f"{path}.id"),
            origin=_require_airport(obj["origin"], f"{path}.origin"),
            destination=_require_airport(obj["destination"], f"{path}.destination"),
            departure=datetime_from_json(obj["departure"], f"{path}.departure"),
            arrival=datetime_from_json(obj["arrival"], f"{path}.arrival"),
            price=cents_from_json(obj["price"], f"{path}.price"),
            cabin_class=cabin,
            is_basic_economy=_require_bool(obj["is_basic_economy"], f"{path}.is_basic_economy"),
            is_mixed_cabin=_require_bool(obj["is_mixed_cabin"], f"{path}.is_mixed_cabin"),
            is_nonstop=_require_bool(obj["is_nonstop"], f"{path}.is_nonstop"),
            airline=_require_str(obj["airline"], f"{path}.airline"),
            plane_type=_require_str(obj["plane_type"], f"{path}.plane_type"),
            refundable=_require_bool(obj["refundable"], f"{path}.refundable"),
        )


@dataclass(frozen=True)
class DateRange:
    """Inclusive calendar date range."""

    start: date
    end: date

    def __post_init__(self):
        if self.start > self.end:
            raise InvariantViolation("date_range", f"{self.start} > {self.end}")

    def covers(self, day: date) -> bool:
        return self.start <= day <= self.end

    def days(self) -> int:
        return (self.end - self.start).days + 1

    def iter_days(self) -> List[date]:
        return [self.start + timedelta(days=i) for i in range(self.days())]

    def to_json(self) -> Dict[str, str]:
        return {"start": self.start.isoformat(), "end": self.end.isoformat()}

    @staticmethod
    def from_json(value: Any, path: str) -> "DateRange":
        obj = _require_obj(value, path, ("start", "end"))
        if "start" not in obj or "end" not in obj:
            raise SchemaViolation(path, "range needs both 'start' and 'end'")
        return DateRange(
            date_from_json(obj["start"], f"{path}.start"),
            date_from_json(obj["end"], f"{path}.end"),
        )


@dataclass(frozen=True)
class HotelOption:
    id: str
    city: str
    name: str
    brand: str
    rating: int  # tenths of a star, 0..50
    price_per_night: int
    earliest_checkin: int  # minutes from midnight
    latest_checkout: int
    available_dates: DateRange

    def __post_init__(self):
        _require_airport(self.city, f"hotel[{self.id}].city")
        if self.price_per_night <= 0:
            raise InvariantViolation(f"hotel[{self.id}].price_per_night", "must be > 0")
        if not (0 <= self.rating <= 50):
            raise InvariantViolation(f"hotel[{self.id}].rating", "rating must be in [0, 5]")
        for name in ("earliest_checkin", "latest_checkout"):
            minute = getattr(self, name)
            if not (0 <= minute < MINUTES_PER_DAY):
                raise InvariantViolation(f"hotel[{self.id}].{name}", "not a valid time of day")

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "city": self.city,
            "name": self.name,
            "brand": self.brand,
            "rating": rating_to_json(self.rating),
            "price_per_night": cents_to_json(self.price_per_night),
            "earliest_checkin": minutes_to_json(self.earliest_checkin),
            "latest_checkout": minutes_to_json(self.latest_checkout),
            "available_dates": self.available_dates.to_json(),
        }

    @staticmethod
    def from_json(value: Any, path: str) -> "HotelOption":
        allowed = ("id", "city", "name", "brand", "rating", "price_per_night",
                   "earliest_checkin", "latest_checkout", "available_dates")
        obj = _require_obj(value, path, allowed)
        for key in allowed:
            if key not in obj:
                raise SchemaViolation(f"{path}.{key}", "missing required field")
        return HotelOption(
            id=_require_str(obj["id"], f"{path}.id"),
            city=_require_airport(obj["city"], f"{path}.city"),
            name=_require_str(obj["name"], f"{path}.name"),
            brand=_require_str(obj["brand"], f"{path}.brand"),
            rating=rating_from_json(obj["rating"], f"{path}.rating"),
            price_per_night=cents_from_json(obj["price_per_night"], f"{path}.price_per_night"),
            earliest_checkin=minutes_from_json(obj["earliest_checkin"], f"{path}.earliest_checkin"),
            latest_checkout=minutes_from_json(obj["latest_checkout"], f"{path}.latest_checkout"),
            available_dates=DateRange.from_json(obj["available_dates"], f"{path}.available_dates"),
        )


@dataclass(frozen=True)
class Inventory:
    flights: Tuple[FlightOption, ...]
    hotels: Tuple[HotelOption, ...]

    def __post_init__(self):
        object.__setattr__(self, "flights", tuple(self.flights))
        object.__setattr__(self, "hotels", tuple(self.hotels))
        for kind, options in (("flights", self.flights), ("hotels", self.hotels)):
            ids = [o.id for o in options]
            if len(ids) != len(set(ids)):
                dupes = sorted({i for i in ids if ids.count(i) > 1})
                raise InvariantViolation(kind, f"duplicate ids: {dupes}")

    def flight_by_id(self, flight_id: str) -> Optional[FlightOption]:
        for flight in self.flights:
            if flight.id == flight_id:
                return flight
        return None

    def hotel_by_id(self, hotel_id: str) -> Optional[HotelOption]:
        for hotel in self.hotels:
            if hotel.id == hotel_id:
                return hotel
        return None

    def to_json(self) -> Dict[str, Any]:
        return {
            "flights": [f.to_json() for f in self.flights],
            "hotels": [h.to_json() for h in self.hotels],
        }

    @staticmethod
    def from_json(value: Any, path: str = "inventory") -> "Inventory":
        obj = _require_obj(value, path, ("flights", "hotels"))
        flights_raw = obj.get("flights", [])
        hotels_raw = obj.get("hotels", [])
        if not isinstance(flights_raw, list):
            raise SchemaViolation(f"{path}.flights", "expected a list")
        if not isinstance(hotels_raw, list):
            raise SchemaViolation(f"{path}.hotels", "expected a list")
        return Inventory(
            flights=tuple(FlightOption.from_json(v, f"{path}.flights[{i}]")
                          for i, v in enumerate(flights_raw)),
            hotels=tuple(HotelOption.from_json(v, f"{path}.hotels[{i}]")
                         for i, v in enumerate(hotels_raw)),
        )


@dataclass(frozen=True)
class CostBreakdown:
    flight_total: int
    hotel_total: int
    soft_penalty: int

    @property
    def grand_total(self) -> int:
        return self.flight_total + self.hotel_total

    def to_json(self) -> Dict[str, Any]:
        return {
            "flight_total": cents_to_json(self.flight_total),
            "hotel_total": cents_to_json(self.hotel_total),
            "grand_total": cents_to_json(self.grand_total),
            "soft_penalty": cents_to_json(self.soft_penalty),
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def parse_request(json_text: str) -> SymbolicRequest:
    """Parse and fully validate a symbolic request from JSON text."""
    try:
        raw = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None
    return SymbolicRequest.from_json(raw)


def serialize_request(request: SymbolicRequest) -> str:
    """Canonical JSON: fixed key order, sorted sets, absent optionals omitted."""
    return json.dumps(request.to_json(), separators=(",", ":"))


@dataclass(frozen=True)
class MatchResult:
    is_match: bool
    mismatched_fields: Tuple[str, ...]


def _diff(a: Any, b: Any, path: str, out: List[str]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in list(a) + [k for k in b if k not in a]:
            sub = f"{path}.{key}" if path else key
            if key not in a or key not in b:
                out.append(sub)
            else:
                _diff(a[key], b[key], sub, out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(path)
        elif a and all(not isinstance(x, (dict, list)) for x in a + b):
            # flat value lists (canonical sorted sets) compare as one field
            if a != b:
                out.append(path)
        else:
            for i, (x, y) in enumerate(zip(a, b)):
                _diff(x, y, f"{path}[{i}]", out)
    elif a != b:
        out.append(path)


def exact_match(a: SymbolicRequest, b: SymbolicRequest) -> MatchResult:
    """Field-exact comparison; absent and present-with-any-value never match."""
    obj_a, obj_b = a.to_json(), b.to_json()
    # keep constraint sections present so mismatches name leaf fields
    for section in ("airline", "hotel", "budget"):
        obj_a.setdefault(section, {})
        obj_b.setdefault(section, {})
    mismatched: List[str] = []
    _diff(obj_a, obj_b, "", mismatched)
    return MatchResult(is_match=not mismatched, mismatched_fields=tuple(mismatched))
