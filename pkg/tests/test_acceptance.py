"""Acceptance suite: one test per criterion, at its stated tolerance.

Each test prints a single CRITERION ... PASS line on success (visible with
`pytest -s` or in the captured output). Tolerances are pinned here and are
not configurable.
"""

import itertools
import random
import time

import scipy.sparse  # noqa: F401  (imported up front so timings exclude it)

from tripsolve.bruteforce import brute_force
from tripsolve.datagen import GenParams, gen_inventory, gen_request
from tripsolve.evaluate import EvalRecord, corrupt_request, evaluate_corpus, quality_score
from tripsolve.milp import ModelParams, build_model, encode_implication, prefilter_options
from tripsolve.model import exact_match, parse_request
from tripsolve.nl import NUM_VARIANT_SCHEMES, parse_nl, render_nl
from tripsolve.plan import plan_request
from tripsolve.simulate import evaluate_cost, verify_schedule_invariants
from tripsolve.solver import SolveStatus, check_feasible, solve

# instance scale pinned by the oracle-equivalence criterion:
# 2-3 legs, <= 8 flights per leg, <= 6 hotels per city, T <= 120 slots
ORACLE_PARAMS = GenParams(rng_seed=20250115, one_way_fraction=0.0,
                          flights_per_leg=(4, 8), hotels_per_city=(3, 6),
                          leg_gap_days=(1, 2))

DEMO_REQUEST_JSON = """
{
  "trip_kind": "round_trip",
  "legs": [
    {"date": "2025-01-15", "origin": "DEN", "destination": "MIA"},
    {"date": "2025-01-17", "origin": "MIA", "destination": "JFK"},
    {"date": "2025-01-18", "origin": "JFK", "destination": "DEN"}
  ],
  "airline": {
    "price_total_max": 1383,
    "cabin_class": "coach",
    "nonstop_only": true,
    "must_not_basic_economy": true,
    "no_mixed_cabin": true
  },
  "hotel": {"daily_budget_max": 317, "total_budget_max": 952}
}
"""


def test_criterion_oracle_equivalence_500_instances():
    """solve and brute_force agree on status, and exactly (integer cents)
    on the objective, over >= 500 generated instances in under 5 minutes."""
    started = time.perf_counter()
    params = ModelParams()
    optimal = infeasible = 0
    for index in range(500):
        request = gen_request(ORACLE_PARAMS, index)
        inventory = gen_inventory(ORACLE_PARAMS, request)
        model = build_model(request, prefilter_options(request, inventory), params)
        assert model.grid.num_slots <= 120
        mine = solve(model)
        oracle = brute_force(request, inventory, params)
        assert mine.status == oracle.status, index
        if mine.status is SolveStatus.OPTIMAL:
            optimal += 1
            assert mine.objective == oracle.objective, index
            assert float(mine.objective).is_integer(), index
            assert mine.selection == oracle.selection, index
        else:
            infeasible += 1
    # tightened requests on inventories planted for the originals: both
    # routes must also agree when instances become infeasible
    import dataclasses
    for index in range(120):
        request = gen_request(ORACLE_PARAMS, index)
        inventory = gen_inventory(ORACLE_PARAMS, request)
        if index % 2 == 0:
            squeezed = dataclasses.replace(request.airline, price_total_max=500)
            tightened = dataclasses.replace(request, airline=squeezed)
        else:
            squeezed = dataclasses.replace(request.hotel, min_rating=50)
            tightened = dataclasses.replace(request, hotel=squeezed)
        model = build_model(
            tightened, prefilter_options(tightened, inventory), params)
        mine = solve(model)
        oracle = brute_force(tightened, inventory, params)
        assert mine.status == oracle.status, index
        if mine.status is SolveStatus.OPTIMAL:
            assert mine.objective == oracle.objective, index
        else:
            infeasible += 1
    elapsed = time.perf_counter() - started
    assert elapsed < 300.0, f"took {elapsed:.0f}s"
    assert optimal >= 450  # planting keeps every original instance feasible
    assert infeasible >= 5  # the tightened variants exercise the other branch
    print(f"\nCRITERION oracle-equivalence: PASS "
          f"({500 + 120} instances, {optimal} optimal, {infeasible} infeasible, "
          f"{elapsed:.1f}s)")


def test_criterion_big_m_truth_tables():
    """Exhaustive enumeration for 1-3 condition variables: the two-row
    encoding's feasible set equals the logical implication's, exactly."""
    checked = 0
    for n_z in (1, 2, 3):
        z_cols = list(range(n_z))
        x_col = n_z
        # binary y variable
        fwd, rev = encode_implication(z_cols, x_col, y_col=n_z + 1, m=1.0)
        for values in itertools.product((0.0, 1.0), repeat=n_z + 2):
            logical = (values[x_col] == values[n_z + 1]) \
                if all(v == 1.0 for v in values[:n_z]) else True
            assert (fwd.satisfied(values) and rev.satisfied(values)) == logical
            checked += 1
        # constant y
        for y_const in (0.0, 1.0):
            fwd, rev = encode_implication(z_cols, x_col, y_const=y_const, m=1.0)
            for values in itertools.product((0.0, 1.0), repeat=n_z + 1):
                logical = (values[x_col] == y_const) \
                    if all(v == 1.0 for v in values[:n_z]) else True
                assert (fwd.satisfied(values) and rev.satisfied(values)) == logical
                checked += 1
    print(f"\nCRITERION big-m-encoding: PASS ({checked} assignments, exact)")


def test_criterion_round_trip_exact_match_10k():
    """parse_nl(render_nl(r)) exact-matches r for 10,000 requests across
    every paraphrase scheme; EM rate and valid-output rate exactly 1.0."""
    params = GenParams(rng_seed=777)
    total = matches = valid = 0
    for index in range(10_000):
        request = gen_request(params, index)
        for seed in range(NUM_VARIANT_SCHEMES):
            total += 1
            recovered = parse_nl(render_nl(request, seed))  # raises if unparsable
            valid += 1
            if exact_match(request, recovered).is_match:
                matches += 1
    assert matches == total == valid
    print(f"\nCRITERION round-trip-em: PASS ({total} renderings, EM rate 1.000, "
          f"valid rate 1.000)")


def test_criterion_quality_ratio_mechanics():
    """(a) EM records score exactly 1.0; (b) under a corruption mix over the
    dominant error fields, scores live in [0,1] and are 0 exactly when the
    reconstruction's plan is rejected under the true request; (c) the
    evaluator reports the 8-subset mean/std shape."""
    gen = GenParams(rng_seed=31337, one_way_fraction=0.0,
                    flights_per_leg=(3, 6), hotels_per_city=(2, 5),
                    leg_gap_days=(1, 2))
    params = ModelParams()

    # (a) clean corpus: every score exactly 1.0 through the full evaluator
    records = []
    for i in range(48):
        request = gen_request(gen, i)
        records.append(EvalRecord(request=request,
                                  inventory=gen_inventory(gen, request),
                                  nl_text=render_nl(request, i),
                                  record_id=str(i)))
    report = evaluate_corpus(records, subsets=8)
    assert report.em_accuracy == 1.0
    assert all(s == 1.0 for s in report.scores)

    # (c) subset reporting shape
    assert len(report.subset_means) == 8
    assert report.score_mean == 1.0
    assert report.score_std == 0.0

    # (b) corruption mix patterned on the dominant error fields
    dominant = ("airline.must_not_basic_economy", "airline.departure_time",
                "airline.avoid_red_eye")
    rng = random.Random(99)
    scored = zeros = 0
    for i in range(200, 1000):
        request = gen_request(gen, i)
        section_field = dominant[i % 3]
        name = section_field.split(".", 1)[1]
        if getattr(request.airline, name) is None:
            continue
        corrupted = corrupt_request(request, section_field, rng=rng)
        inventory = gen_inventory(gen, request)
        score = quality_score(request, corrupted, inventory, params)
        assert 0.0 <= score <= 1.0
        est_outcome = plan_request(corrupted, inventory, params)
        if est_outcome.status is SolveStatus.OPTIMAL:
            verdict = check_feasible(est_outcome.selection, request, inventory, params)
            rejected = not verdict.feasible
        else:
            rejected = True  # nothing plannable from the reconstruction
        assert (score == 0.0) == rejected, (i, score, rejected)
        scored += 1
        zeros += score == 0.0
        if scored >= 120:
            break
    assert scored >= 120
    print(f"\nCRITERION quality-ratio-mechanics: PASS "
          f"({scored} corrupted records, {zeros} scored 0, 8-subset shape)")


def test_criterion_schedule_invariants_zero_violations():
    """Every solved instance satisfies the timeline rules: one location per
    slot, nightly sleep >= L, moves only on events, and every selected
    flight/hotel consequence - audited by the independent simulator."""
    params = ModelParams()
    solved = 0
    for index in range(120):
        request = gen_request(ORACLE_PARAMS, index + 9000)
        inventory = gen_inventory(ORACLE_PARAMS, request)
        model = build_model(request, prefilter_options(request, inventory), params)
        result = solve(model)
        if result.status is not SolveStatus.OPTIMAL:
            continue
        solved += 1
        problems = verify_schedule_invariants(model, result.assignment)
        assert problems == [], (index, problems[:3])
        sim = evaluate_cost(result.selection, request, inventory, params)
        assert sim.feasible, (index, sim.violation_codes())
        assert sim.objective == result.objective
    assert solved >= 100
    print(f"\nCRITERION schedule-invariants: PASS ({solved} solved instances, "
          f"zero violations)")


def test_criterion_demo_scale_timing():
    """Demo-scale instance (3 legs, ~100 candidate flights, ~30 hotels):
    constraint loading + solving within 2 s; full /plan within 5 s."""
    request = parse_request(DEMO_REQUEST_JSON)
    inventory = gen_inventory(
        GenParams(rng_seed=2025, flights_per_leg=(33, 34), hotels_per_city=(15, 16)),
        request)
    assert len(inventory.flights) >= 90
    assert len(inventory.hotels) >= 28

    started = time.perf_counter()
    model = build_model(request, prefilter_options(request, inventory), ModelParams())
    result = solve(model)
    elapsed = time.perf_counter() - started
    assert result.status is SolveStatus.OPTIMAL
    assert elapsed <= 2.0, f"build+solve took {elapsed:.2f}s"

    from fastapi.testclient import TestClient
    from tripsolve.service import ServiceConfig, create_app

    app = create_app(ServiceConfig(gen_seed=2025))
    with TestClient(app) as client:
        text = render_nl(request, 0)
        t0 = time.perf_counter()
        response = client.post("/plan", json={"text": text})
        handler = time.perf_counter() - t0
        assert response.status_code == 200
        assert response.json()["options"]["min_cost"]["feasible"] is True
        assert handler <= 5.0, f"/plan took {handler:.2f}s"
    print(f"\nCRITERION demo-scale-timing: PASS (solve {elapsed * 1000:.0f}ms, "
          f"/plan {handler * 1000:.0f}ms)")


def test_criterion_demo_reproduction():
    """The worked demo request: the min-cost option stays within the $1383
    flight / $317 nightly / $952 hotel budgets with one nonstop coach
    non-basic-economy, non-mixed-cabin flight per leg."""
    request = parse_request(DEMO_REQUEST_JSON)
    inventory = gen_inventory(
        GenParams(rng_seed=115, flights_per_leg=(12, 20), hotels_per_city=(6, 10)),
        request)
    outcome = plan_request(request, inventory)
    assert outcome.status is SolveStatus.OPTIMAL
    itinerary = outcome.itinerary
    assert itinerary.cost.flight_total <= 138300
    assert itinerary.cost.hotel_total <= 95200
    assert len(itinerary.chosen_flights) == 3
    for _, chosen in itinerary.chosen_flights:
        assert chosen.is_nonstop
        assert chosen.cabin_class.value == "coach"
        assert not chosen.is_basic_economy
        assert not chosen.is_mixed_cabin
    for chosen, _, _ in itinerary.chosen_hotels:
        assert chosen.price_per_night <= 31700
    print(f"\nCRITERION demo-reproduction: PASS (flights "
          f"${itinerary.cost.flight_total / 100:.0f} <= $1383, hotels "
          f"${itinerary.cost.hotel_total / 100:.0f} <= $952)")


def test_criterion_relaxation_monotonicity():
    """Dropping one random optional constraint never increases the optimal
    objective, verified with the brute-force oracle on both sides."""
    gen = GenParams(rng_seed=4242, one_way_fraction=0.0,
                    flights_per_leg=(3, 5), hotels_per_city=(2, 4),
                    leg_gap_days=(1, 2))
    params = ModelParams()
    rng = random.Random(17)
    checked = 0
    index = 0
    while checked < 200 and index < 600:
        index += 1
        request = gen_request(gen, index)
        present = ([f"airline.{f}" for f in request.airline.present_fields()]
                   + [f"hotel.{f}" for f in request.hotel.present_fields()]
                   + [f"budget.{f}" for f in request.budget.present_fields()])
        if not present:
            continue
        relaxed = corrupt_request(request, rng.choice(present), action="drop")
        inventory = gen_inventory(gen, request)
        original = brute_force(request, inventory, params)
        relaxed_result = brute_force(relaxed, inventory, params)
        assert original.status is SolveStatus.OPTIMAL, index
        assert relaxed_result.status is SolveStatus.OPTIMAL, index
        assert relaxed_result.objective <= original.objective + 1e-9, index
        checked += 1
    assert checked >= 200
    print(f"\nCRITERION relaxation-monotonicity: PASS ({checked} instances)")
