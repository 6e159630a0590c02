"""Quality-ratio mechanics, corpus evaluation, corruption harness, profiling."""

import random
from datetime import date

import pytest

from tripsolve.datagen import GenParams, gen_inventory, gen_request
from tripsolve.evaluate import (
    EvalRecord,
    GroundTruthInfeasible,
    UnknownField,
    corrupt_request,
    evaluate_corpus,
    profile_phases,
    quality_score,
)
from tripsolve.model import (
    AirlineConstraints,
    Inventory,
    SymbolicRequest,
    TimeWindow,
    TripKind,
    TripLeg,
    exact_match,
)
from tripsolve.nl import render_nl
from .test_milp import flight
from .test_model import demo_request


def corpus(seed: int, count: int):
    params = GenParams(rng_seed=seed, flights_per_leg=(3, 5), hotels_per_city=(2, 4),
                       leg_gap_days=(1, 2))
    records = []
    for i in range(count):
        request = gen_request(params, i)
        records.append(EvalRecord(
            request=request,
            inventory=gen_inventory(params, request),
            nl_text=render_nl(request, variant_seed=i),
            record_id=str(i)))
    return records


class TestQualityScore:
    def test_exact_translation_scores_one(self):
        record = corpus(61, 1)[0]
        score = quality_score(record.request, record.request, record.inventory)
        assert score == 1.0

    def test_infeasible_reconstruction_scores_zero(self):
        # the true request requires nonstop; the reconstruction lost that
        # field, so its optimum picks the cheaper connecting flight
        true = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(nonstop_only=True),
            trip_kind=TripKind.ONE_WAY)
        est = corrupt_request(true, "airline.nonstop_only", action="drop")
        inv = Inventory(flights=(
            flight("conn", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T14:00",
                   nonstop=False, price=8000),
            flight("direct", "DEN", "MIA", "2025-01-15T09:00", "2025-01-15T12:00",
                   nonstop=True, price=20000),
        ), hotels=())
        assert quality_score(true, est, inv) == 0.0

    def test_ratio_arithmetic_on_soft_window(self):
        # true optimum costs 150.00; the reconstruction's plan costs 200.00
        # under the true request (140.00 fare + 4 penalty slots): 0.75
        window_true = TimeWindow(8 * 60, 12 * 60)
        window_est = TimeWindow(12 * 60, 16 * 60)
        true = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(departure_time=window_true),
            trip_kind=TripKind.ONE_WAY)
        est = SymbolicRequest(
            legs=true.legs,
            airline=AirlineConstraints(departure_time=window_est),
            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("a", "DEN", "MIA", "2025-01-15T09:00", "2025-01-15T12:00", price=15000),
            flight("b", "DEN", "MIA", "2025-01-15T15:30", "2025-01-15T18:30", price=14000),
        ), hotels=())
        assert quality_score(true, est, inv) == pytest.approx(0.75)

    def test_ground_truth_infeasible_raises(self):
        true = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(nonstop_only=True),
            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("conn", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T14:00",
                   nonstop=False),
        ), hotels=())
        with pytest.raises(GroundTruthInfeasible):
            quality_score(true, true, inv)


class TestEvaluateCorpus:
    def test_template_backend_is_perfect_on_its_own_corpus(self):
        records = corpus(67, 24)
        report = evaluate_corpus(records, subsets=4)
        assert report.em_accuracy == 1.0
        assert report.valid_output_rate == 1.0
        assert report.score_mean == 1.0
        assert report.score_std == 0.0
        assert len(report.subset_means) == 4
        assert sum(total for _, total in report.breakdown_cities.values()) == len(records)

    def test_corrupted_corpus_shows_up_in_histogram(self):
        records = corpus(71, 40)
        rng = random.Random(5)
        corrupted = []
        flipped = 0
        for i, record in enumerate(records):
            if i % 10 == 0 and record.request.airline.must_not_basic_economy is not None:
                bad = corrupt_request(record.request, "airline.must_not_basic_economy",
                                      action="flip")
                corrupted.append(EvalRecord(
                    request=record.request, inventory=record.inventory,
                    nl_text=render_nl(bad, variant_seed=i), record_id=record.record_id))
                flipped += 1
            else:
                corrupted.append(record)
        report = evaluate_corpus(corrupted, subsets=4, with_scores=False)
        assert flipped > 0
        assert report.em_matches == len(records) - flipped
        assert set(report.error_histogram) == {"airline.must_not_basic_economy"}
        assert report.error_histogram["airline.must_not_basic_economy"] == flipped

    def test_empty_dataset(self):
        report = evaluate_corpus([], subsets=8)
        assert report.count == 0
        assert report.em_accuracy is None
        assert report.valid_output_rate is None
        assert report.score_mean is None

    def test_markdown_has_table_shapes(self):
        report = evaluate_corpus(corpus(73, 8), subsets=2)
        text = report.to_markdown()
        assert "| EM accuracy |" in text
        assert "## EM by number of airline constraints" in text


class TestProfilePhases:
    def test_phase_split_and_magnitudes(self):
        record = corpus(79, 1)[0]
        timings = profile_phases(record.nl_text, None, record.inventory, repetitions=3)
        for phase in ("translator", "loading", "solving", "solver_total"):
            assert len(timings[phase].samples) == 3
            assert timings[phase].std >= 0.0
        # loading + solving adds up to the reported solver total
        total = timings["loading"].mean + timings["solving"].mean
        assert total == pytest.approx(timings["solver_total"].mean, abs=1e-6)

    def test_template_translation_is_much_faster_than_solving(self):
        import scipy.sparse  # noqa: F401  (keep import cost out of the timings)

        from tripsolve.nl import render_nl as render

        # demo-scale instance: ~100 candidate flights, ~30 hotels
        params = GenParams(rng_seed=83, flights_per_leg=(33, 34),
                           hotels_per_city=(15, 16))
        request = gen_request(GenParams(rng_seed=83, one_way_fraction=0.0,
                                        three_city_fraction=1.0), 0)
        inventory = gen_inventory(params, request)
        timings = profile_phases(render(request, 0), None, inventory, repetitions=3)
        solver_time = timings["loading"].mean + timings["solving"].mean
        assert timings["translator"].mean < solver_time


class TestCorruptRequest:
    def test_drop_removes_field(self):
        r = demo_request()
        out = corrupt_request(r, "airline.must_not_basic_economy", action="drop")
        assert out.airline.must_not_basic_economy is None

    def test_flip_twice_restores(self):
        r = demo_request()
        once = corrupt_request(r, "airline.must_not_basic_economy", action="flip")
        twice = corrupt_request(once, "airline.must_not_basic_economy", action="flip")
        assert exact_match(r, twice).is_match

    def test_window_shift_moves_by_two_hours(self):
        r = demo_request(airline=AirlineConstraints(
            departure_time=TimeWindow(8 * 60, 12 * 60)))
        out = corrupt_request(r, "airline.departure_time", action="shift")
        assert out.airline.departure_time == TimeWindow(10 * 60, 14 * 60)

    def test_unknown_field(self):
        with pytest.raises(UnknownField):
            corrupt_request(demo_request(), "airline.meal_preference")

    def test_deterministic_under_seed(self):
        r = demo_request()
        a = corrupt_request(r, "hotel.daily_budget_max", rng=random.Random(3))
        b = corrupt_request(r, "hotel.daily_budget_max", rng=random.Random(3))
        assert exact_match(a, b).is_match
