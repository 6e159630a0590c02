"""Generator determinism, distribution shape, planted feasibility, CSV paths."""

from datetime import date, timedelta

import pytest

from tripsolve.datagen import (
    BaseFlightTable,
    GenParams,
    MappingIncomplete,
    gen_inventory,
    gen_request,
    ingest_flight_csv,
    perturb_hotels,
    replicate_dates,
)
from tripsolve.model import DateRange, TripKind, serialize_request
from tripsolve.simulate import evaluate_cost


@pytest.fixture(scope="module")
def big_sample():
    """One 10k draw shared by the distribution checks."""
    params = GenParams(rng_seed=42)
    return params, [gen_request(params, i) for i in range(10_000)]


class TestGenRequest:
    def test_deterministic(self):
        params = GenParams(rng_seed=7)
        assert serialize_request(gen_request(params, 3)) == \
            serialize_request(gen_request(params, 3))

    def test_one_way_fraction_below_five_percent(self, big_sample):
        _, sample = big_sample
        one_ways = sum(1 for r in sample if r.trip_kind is TripKind.ONE_WAY)
        assert one_ways / len(sample) < 0.05

    def test_round_trips_have_two_or_three_cities(self, big_sample):
        _, sample = big_sample
        for r in sample:
            if r.trip_kind is TripKind.ROUND_TRIP:
                assert len(set(r.cities)) in (2, 3)

    def test_presence_frequencies_track_configured_probs(self, big_sample):
        params, sample = big_sample
        # hotel/budget fields are suppressed on one-way trips, so measure on
        # round trips only, where every configured probability applies
        round_trips = [r for r in sample if r.trip_kind is TripKind.ROUND_TRIP]
        n = len(round_trips)
        observed = {
            "airline.nonstop_only": sum(
                1 for r in round_trips if r.airline.nonstop_only is not None) / n,
            "airline.departure_time": sum(
                1 for r in round_trips if r.airline.departure_time is not None) / n,
            "hotel.daily_budget_max": sum(
                1 for r in round_trips if r.hotel.daily_budget_max is not None) / n,
            "budget.total_budget": sum(
                1 for r in round_trips if r.budget.total_budget is not None) / n,
        }
        for key, freq in observed.items():
            assert abs(freq - params.presence(key)) < 0.02, (key, freq)

    def test_dates_inside_horizon(self, big_sample):
        params, sample = big_sample
        for r in sample[:2000]:
            for leg in r.legs:
                assert params.date_horizon.covers(leg.date)

    def test_legs_strictly_ordered(self, big_sample):
        _, sample = big_sample
        for r in sample[:2000]:
            for a, b in zip(r.legs, r.legs[1:]):
                assert a.date < b.date


class TestGenInventory:
    def test_deterministic(self):
        params = GenParams(rng_seed=11)
        request = gen_request(params, 5)
        assert gen_inventory(params, request).to_json() == \
            gen_inventory(params, request).to_json()

    def test_planted_combination_is_feasible(self):
        params = GenParams(rng_seed=13)
        for i in range(30):
            request = gen_request(params, i)
            inventory, planted = gen_inventory(params, request, return_planted=True)
            sim = evaluate_cost(planted, request, inventory, build_artifacts=False)
            assert sim.feasible, (i, sim.violation_codes())

    def test_nonstop_under_budget_exists_per_leg(self):
        params = GenParams(rng_seed=17)
        found = 0
        for i in range(200):
            request = gen_request(params, i)
            if not (request.airline.nonstop_only and request.airline.price_total_max):
                continue
            found += 1
            inventory, planted = gen_inventory(params, request, return_planted=True)
            chosen = [inventory.flight_by_id(fid) for fid in planted.flights]
            assert all(f.is_nonstop for f in chosen)
            assert sum(f.price for f in chosen) <= request.airline.price_total_max
        assert found >= 10

    def test_flight_invariants_hold(self):
        params = GenParams(rng_seed=19)
        for i in range(20):
            request = gen_request(params, i)
            for flight in gen_inventory(params, request).flights:
                assert flight.departure < flight.arrival
                assert flight.price > 0


class TestPerturbHotels:
    def _hotels(self):
        params = GenParams(rng_seed=23)
        request = gen_request(GenParams(rng_seed=23, one_way_fraction=0.0), 2)
        return list(gen_inventory(params, request).hotels)

    def test_zero_sigma_keeps_prices(self):
        hotels = self._hotels()
        out = perturb_hotels(hotels, GenParams(rng_seed=1, price_noise_sigma=0.0))
        assert [h.price_per_night for h in out] == [h.price_per_night for h in hotels]

    def test_prices_stay_positive(self):
        hotels = self._hotels()
        out = perturb_hotels(hotels, GenParams(rng_seed=2, price_noise_sigma=2.5))
        assert all(h.price_per_night > 0 for h in out)

    def test_same_seed_same_output(self):
        hotels = self._hotels()
        params = GenParams(rng_seed=3, price_noise_sigma=0.4)
        first = perturb_hotels(hotels, params)
        second = perturb_hotels(hotels, params)
        assert [h.to_json() for h in first] == [h.to_json() for h in second]


CSV_TEXT = """origin,dest,dep,arr,fare,carrier
DEN,MIA,2022-04-16T08:00,2022-04-16T12:00,199.00,Delta
MIA,JFK,2022-04-17T09:30,2022-04-17T12:45,149.50,United
JFK,DEN,2022-04-22T14:00,2022-04-22T18:05,240.00,Alaska
"""

COLUMN_MAP = {"origin": "origin", "destination": "dest", "departure": "dep",
              "arrival": "arr", "price": "fare", "airline": "carrier"}


class TestIngestCsv:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "base.csv"
        path.write_text(CSV_TEXT)
        table = ingest_flight_csv(str(path), COLUMN_MAP)
        assert len(table.rows) == 3
        assert table.skipped == 0
        assert table.rows[0].price == 19900
        assert table.date_span == DateRange(date(2022, 4, 16), date(2022, 4, 22))

    def test_bad_row_skipped_and_reported(self, tmp_path):
        bad = CSV_TEXT + "SEA,LAX,2022-04-18T10:00,2022-04-18T09:00,99.00,Delta\n"
        path = tmp_path / "base.csv"
        path.write_text(bad)
        table = ingest_flight_csv(str(path), COLUMN_MAP)
        assert len(table.rows) == 3
        assert table.skipped == 1
        assert dict(table.skip_reasons)  # reason tallied by exception name

    def test_missing_required_column(self, tmp_path):
        path = tmp_path / "base.csv"
        path.write_text(CSV_TEXT)
        incomplete = {k: v for k, v in COLUMN_MAP.items() if k != "price"}
        with pytest.raises(MappingIncomplete):
            ingest_flight_csv(str(path), incomplete)


class TestReplicateDates:
    def _table(self, tmp_path) -> BaseFlightTable:
        rows = []
        for day in range(7):
            d = date(2022, 4, 16) + timedelta(days=day)
            rows.append(f"DEN,MIA,{d}T08:00,{d}T12:00,100,Delta")
        path = tmp_path / "week.csv"
        path.write_text("origin,dest,dep,arr,fare,carrier\n" + "\n".join(rows) + "\n")
        return ingest_flight_csv(str(path), COLUMN_MAP)

    def test_three_fold_tiling(self, tmp_path):
        table = self._table(tmp_path)
        horizon = DateRange(date(2025, 1, 1), date(2025, 1, 21))
        out = replicate_dates(table, horizon)
        assert len(out.rows) == 3 * len(table.rows)

    def test_identity_horizon(self, tmp_path):
        table = self._table(tmp_path)
        out = replicate_dates(table, table.date_span)
        assert len(out.rows) == len(table.rows)
        assert [r.departure for r in out.rows] == [r.departure for r in table.rows]
        assert all(r.id.endswith("@r0") for r in out.rows)

    def test_departures_inside_horizon(self, tmp_path):
        table = self._table(tmp_path)
        horizon = DateRange(date(2025, 1, 1), date(2025, 1, 17))  # not a whole multiple
        out = replicate_dates(table, horizon)
        assert out.rows
        for row in out.rows:
            assert horizon.covers(row.departure.date())

    def test_ids_unique(self, tmp_path):
        table = self._table(tmp_path)
        out = replicate_dates(table, DateRange(date(2025, 1, 1), date(2025, 2, 10)))
        ids = [r.id for r in out.rows]
        assert len(ids) == len(set(ids))
