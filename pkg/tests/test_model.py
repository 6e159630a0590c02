"""Symbolic request model: parsing, canonical serialization, exact match."""

import json
from datetime import date

import pytest

from tripsolve.model import (
    AirlineConstraints,
    BudgetConstraints,
    CabinClass,
    HotelConstraints,
    InvariantViolation,
    MalformedJson,
    SchemaViolation,
    SymbolicRequest,
    TimeWindow,
    TripKind,
    TripLeg,
    exact_match,
    parse_request,
    serialize_request,
)


def demo_request(**overrides) -> SymbolicRequest:
    """3-leg round trip with coach/nonstop fare rules and hotel budgets.

    Shape and figures follow the worked demo: DEN -> MIA -> JFK -> DEN in
    January 2025, flight budget $1383, hotel daily $317 / total $952.
    """
    kwargs = dict(
        legs=(
            TripLeg(date(2025, 1, 15), "DEN", "MIA"),
            TripLeg(date(2025, 1, 17), "MIA", "JFK"),
            TripLeg(date(2025, 1, 18), "JFK", "DEN"),
        ),
        airline=AirlineConstraints(
            price_total_max=138300,
            cabin_class=CabinClass.COACH,
            nonstop_only=True,
            must_not_basic_economy=True,
            no_mixed_cabin=True,
        ),
        hotel=HotelConstraints(daily_budget_max=31700, total_budget_max=95200),
        trip_kind=TripKind.ROUND_TRIP,
    )
    kwargs.update(overrides)
    return SymbolicRequest(**kwargs)


class TestParseRequest:
    def test_round_trip_identity(self):
        r = demo_request()
        assert parse_request(serialize_request(r)) == r

    def test_empty_legs_is_invariant_violation(self):
        with pytest.raises(InvariantViolation):
            parse_request('{"legs": []}')

    def test_demo_request_fields_parse(self):
        text = json.dumps({
            "trip_kind": "round_trip",
            "legs": [
                {"date": "2025-01-15", "origin": "DEN", "destination": "MIA"},
                {"date": "2025-01-17", "origin": "MIA", "destination": "JFK"},
                {"date": "2025-01-18", "origin": "JFK", "destination": "DEN"},
            ],
            "airline": {
                "price_total_max": 1383,
                "cabin_class": "coach",
                "nonstop_only": True,
                "must_not_basic_economy": True,
                "no_mixed_cabin": True,
            },
            "hotel": {"daily_budget_max": 317, "total_budget_max": 952},
        })
        r = parse_request(text)
        assert r == demo_request()
        assert r.airline.price_total_max == 138300
        assert r.hotel.daily_budget_max == 31700
        assert r.hotel.total_budget_max == 95200

    def test_not_json(self):
        with pytest.raises(MalformedJson):
            parse_request("{nope")

    def test_unknown_field_reports_path(self):
        with pytest.raises(SchemaViolation) as err:
            parse_request('{"legs": [], "airline": {"frequent_flyer": true}}')
        assert "airline.frequent_flyer" in str(err.value)

    def test_wrong_type_reports_path(self):
        with pytest.raises(SchemaViolation) as err:
            parse_request(
                '{"legs": [{"date": "2025-01-15", "origin": "DEN", "destination": "MIA"}],'
                ' "trip_kind": "one_way", "hotel": {"min_rating": "high"}}')
        assert "hotel.min_rating" in str(err.value)

    def test_non_chaining_legs(self):
        with pytest.raises(InvariantViolation):
            parse_request(json.dumps({
                "trip_kind": "round_trip",
                "legs": [
                    {"date": "2025-01-15", "origin": "DEN", "destination": "MIA"},
                    {"date": "2025-01-17", "origin": "JFK", "destination": "DEN"},
                ],
            }))

    def test_round_trip_must_close(self):
        with pytest.raises(InvariantViolation):
            SymbolicRequest(legs=(
                TripLeg(date(2025, 1, 15), "DEN", "MIA"),
                TripLeg(date(2025, 1, 17), "MIA", "JFK"),
            ))

    def test_one_way_single_leg_only(self):
        with pytest.raises(InvariantViolation):
            SymbolicRequest(
                legs=(
                    TripLeg(date(2025, 1, 15), "DEN", "MIA"),
                    TripLeg(date(2025, 1, 17), "MIA", "DEN"),
                ),
                trip_kind=TripKind.ONE_WAY,
            )


class TestSerializeRequest:
    def test_brand_order_is_canonical(self):
        a = demo_request(hotel=HotelConstraints(brands=("Marriott", "Hilton")))
        b = demo_request(hotel=HotelConstraints(brands=("Hilton", "Marriott")))
        assert serialize_request(a) == serialize_request(b)

    def test_minimal_request_omits_absent_sections(self):
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 3, 1), "SEA", "LAX"),),
            trip_kind=TripKind.ONE_WAY,
        )
        obj = json.loads(serialize_request(r))
        assert set(obj) == {"trip_kind", "legs"}

    def test_parse_then_serialize_canonicalizes_input(self):
        # shuffled keys, unsorted sets, duplicate brand: one canonical output
        messy = json.dumps({
            "legs": [{"origin": "SEA", "date": "2025-03-01", "destination": "LAX"},
                     {"destination": "SEA", "origin": "LAX", "date": "2025-03-03"}],
            "hotel": {"brands": ["Westin", "Hilton", "Hilton"]},
            "trip_kind": "round_trip",
        })
        canonical = serialize_request(parse_request(messy))
        obj = json.loads(canonical)
        assert list(obj) == ["trip_kind", "legs", "hotel"]
        assert obj["hotel"]["brands"] == ["Hilton", "Westin"]
        assert serialize_request(parse_request(canonical)) == canonical

    def test_serialize_then_parse_is_identity(self):
        r = demo_request(
            airline=AirlineConstraints(
                price_total_max=123456,  # $1234.56 exercises the cents path
                departure_time=TimeWindow(8 * 60, 12 * 60),
                plane_types=("Boeing 737", "Airbus A320"),
            ),
            budget=BudgetConstraints(total_budget=500000, everyday_budget=30000),
        )
        assert parse_request(serialize_request(r)) == r


class TestExactMatch:
    def test_identity(self):
        r = demo_request()
        result = exact_match(r, r)
        assert result.is_match and result.mismatched_fields == ()

    def test_single_field_diff(self):
        r = demo_request()
        flipped = demo_request(airline=AirlineConstraints(
            price_total_max=138300,
            cabin_class=CabinClass.COACH,
            nonstop_only=True,
            must_not_basic_economy=False,
            no_mixed_cabin=True,
        ))
        result = exact_match(r, flipped)
        assert not result.is_match
        assert result.mismatched_fields == ("airline.must_not_basic_economy",)

    def test_set_semantics(self):
        a = demo_request(hotel=HotelConstraints(brands=("Hyatt", "Hilton")))
        b = demo_request(hotel=HotelConstraints(brands=("Hilton", "Hyatt")))
        assert exact_match(a, b).is_match

    def test_absent_differs_from_present(self):
        present = demo_request(budget=BudgetConstraints(total_budget=100000))
        absent = demo_request()
        result = exact_match(present, absent)
        assert not result.is_match
        assert "budget.total_budget" in result.mismatched_fields

    def test_is_match_iff_no_mismatches(self):
        a = demo_request()
        b = demo_request(hotel=HotelConstraints(daily_budget_max=31700))
        for x, y in ((a, a), (a, b), (b, a)):
            result = exact_match(x, y)
            assert result.is_match == (len(result.mismatched_fields) == 0)

    def test_symmetric(self):
        a = demo_request()
        b = demo_request(trip_kind=TripKind.ROUND_TRIP,
                         hotel=HotelConstraints(min_rating=40))
        assert exact_match(a, b).is_match == exact_match(b, a).is_match
        assert set(exact_match(a, b).mismatched_fields) == set(exact_match(b, a).mismatched_fields)


class TestTimeWindow:
    def test_rejects_inverted(self):
        with pytest.raises(InvariantViolation):
            TimeWindow(600, 600)

    def test_half_open(self):
        w = TimeWindow(480, 720)
        assert w.contains(480) and w.contains(719) and not w.contains(720)
