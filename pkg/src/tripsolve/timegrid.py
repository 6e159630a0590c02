"""Discretized trip timeline: slot arithmetic, night windows, option slot mapping.

The grid runs from midnight of the first leg date to midnight after the last
leg date. Flight datetimes round outward to conservative slots: departures
floor (the traveller must already be at the airport inside that slot) and
arrivals ceil (the destination is occupied only once fully landed).
"""

from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from typing import List, Optional, Tuple

from .model import (
    MINUTES_PER_DAY,
    FlightOption,
    HotelOption,
    PlanningError,
    SymbolicRequest,
)

AIR = "AIR"  # pseudo-location occupied while flying

DEFAULT_SLOT_MINUTES = 60
DEFAULT_NIGHT_START_MIN = 22 * 60
DEFAULT_NIGHT_END_MIN = 8 * 60  # on the following day
DEFAULT_MAX_SPAN_DAYS = 10
RED_EYE_START_MIN = 23 * 60
RED_EYE_END_MIN = 5 * 60


class SpanTooLong(PlanningError):
    """Trip span exceeds the configured day cap."""


class GridMismatch(PlanningError):
    """An option's datetimes fall outside the trip's time grid."""


def is_red_eye_departure(minute_of_day: int) -> bool:
    """Red-eye: departure in [23:00, 05:00) local, wrapping midnight."""
    return minute_of_day >= RED_EYE_START_MIN or minute_of_day < RED_EYE_END_MIN


@dataclass(frozen=True)
class TimeGrid:
    slot_minutes: int
    origin: datetime  # midnight of the first leg date
    num_slots: int
    num_days: int
    night_windows: Tuple[Tuple[int, int], ...] = field(default=())  # half-open slot ranges

    @property
    def slots_per_day(self) -> int:
        return MINUTES_PER_DAY // self.slot_minutes

    def slot_of_datetime_floor(self, dt: datetime) -> int:
        delta = dt - self.origin
        return int(delta.total_seconds() // 60) // self.slot_minutes

    def slot_of_datetime_ceil(self, dt: datetime) -> int:
        minutes = int((dt - self.origin).total_seconds() // 60)
        return -(-minutes // self.slot_minutes)

    def datetime_of_slot(self, slot: int) -> datetime:
        return self.origin + timedelta(minutes=slot * self.slot_minutes)

    def day_of_slot(self, slot: int) -> int:
        return slot // self.slots_per_day

    def date_of_day(self, day: int) -> date:
        return (self.origin + timedelta(days=day)).date()

    def day_of_date(self, when: date) -> int:
        return (when - self.origin.date()).days

    def contains_slot(self, slot: int) -> bool:
        return 0 <= slot < self.num_slots

    def flight_slots(self, flight: FlightOption) -> Tuple[int, int]:
        """(departure slot, landing slot) with outward-conservative rounding.

        The landing slot is pushed to at least departure + 2 so the source,
        in-air, and destination occupancy slots never collide.
        """
        t_dep = self.slot_of_datetime_floor(flight.departure)
        t_land = max(self.slot_of_datetime_ceil(flight.arrival), t_dep + 2)
        if not self.contains_slot(t_dep) or not self.contains_slot(t_land):
            raise GridMismatch(
                f"flight {flight.id} occupies slots [{t_dep}, {t_land}] "
                f"outside grid of {self.num_slots} slots")
        return t_dep, t_land

    def hotel_coverage(self, hotel: HotelOption, first_night: int, last_night: int) -> Tuple[int, int]:
        """Half-open slot range a booking covers: check-in on the first night's
        day through check-out on the morning after the last night."""
        start_min = first_night * MINUTES_PER_DAY + hotel.earliest_checkin
        end_min = (last_night + 1) * MINUTES_PER_DAY + hotel.latest_checkout
        lo = -(-start_min // self.slot_minutes)  # may not sleep before check-in
        hi = end_min // self.slot_minutes
        return max(lo, 0), min(hi, self.num_slots)


def build_time_grid(
    request: SymbolicRequest,
    slot_minutes: int = DEFAULT_SLOT_MINUTES,
    night_start_min: int = DEFAULT_NIGHT_START_MIN,
    night_end_min: int = DEFAULT_NIGHT_END_MIN,
    max_span_days: int = DEFAULT_MAX_SPAN_DAYS,
) -> TimeGrid:
    if MINUTES_PER_DAY % slot_minutes != 0:
        raise ValueError(f"slot_minutes must divide a day, got {slot_minutes}")
    first = request.legs[0].date
    last = request.legs[-1].date
    num_days = (last - first).days + 1
    if num_days > max_span_days:
        raise SpanTooLong(f"trip spans {num_days} days, cap is {max_span_days}")
    slots_per_day = MINUTES_PER_DAY // slot_minutes
    num_slots = num_days * slots_per_day
    # one window per calendar night fully inside the grid
    nights: List[Tuple[int, int]] = []
    for day in range(num_days):
        lo = (day * MINUTES_PER_DAY + night_start_min) // slot_minutes
        hi = (day * MINUTES_PER_DAY + MINUTES_PER_DAY + night_end_min) // slot_minutes
        if hi <= num_slots:
            nights.append((lo, hi))
    return TimeGrid(
        slot_minutes=slot_minutes,
        origin=datetime.combine(first, datetime.min.time()),
        num_slots=num_slots,
        num_days=num_days,
        night_windows=tuple(nights),
    )


@dataclass(frozen=True)
class Stay:
    """Consecutive nights spent at one city between two legs."""

    city: str
    arrive_day: int  # day index of the inbound leg
    depart_day: int  # day index of the outbound leg
    nights: Tuple[int, ...]  # night indices == day index the night starts on

    @property
    def num_nights(self) -> int:
        return len(self.nights)


def stays_for_request(request: SymbolicRequest, grid: TimeGrid) -> List[Stay]:
    """Stay structure implied by the legs; zero-night stays are kept (no hotel
    is required for them) so stay indices always align with leg gaps."""
    stays: List[Stay] = []
    for k in range(len(request.legs) - 1):
        arrive = grid.day_of_date(request.legs[k].date)
        depart = grid.day_of_date(request.legs[k + 1].date)
        stays.append(Stay(
            city=request.legs[k].destination,
            arrive_day=arrive,
            depart_day=depart,
            nights=tuple(range(arrive, depart)),
        ))
    return stays


def stay_dates(stay: Stay, grid: TimeGrid) -> Optional[Tuple[date, date]]:
    """First and last night dates of a stay, None when it has no nights."""
    if not stay.nights:
        return None
    return grid.date_of_day(stay.nights[0]), grid.date_of_day(stay.nights[-1])
