"""From symbolic request to optimal itinerary.

Compiles the worked three-city January trip (DEN -> MIA -> JFK -> DEN,
flight budget $1383, hotel daily $317 / total $952, coach, non-stop, no
basic economy or mixed cabin) into a 0-1 program over a 96-slot time grid
and solves it exactly under all three objective modes.
"""

import json

from tripsolve import (
    GenParams,
    ModelParams,
    ObjectiveMode,
    build_model,
    dump_lp,
    gen_inventory,
    parse_request,
    prefilter_options,
    solve,
)
from tripsolve.plan import plan_all_modes

request = parse_request(json.dumps({
    "trip_kind": "round_trip",
    "legs": [
        {"date": "2025-01-15", "origin": "DEN", "destination": "MIA"},
        {"date": "2025-01-17", "origin": "MIA", "destination": "JFK"},
        {"date": "2025-01-18", "origin": "JFK", "destination": "DEN"},
    ],
    "airline": {"price_total_max": 1383, "cabin_class": "coach",
                "nonstop_only": True, "must_not_basic_economy": True,
                "no_mixed_cabin": True},
    "hotel": {"daily_budget_max": 317, "total_budget_max": 952},
}))

inventory = gen_inventory(
    GenParams(rng_seed=115, flights_per_leg=(12, 20), hotels_per_city=(6, 10)),
    request)

print("=== compiled model ===")
filtered = prefilter_options(request, inventory)
model = build_model(request, filtered, ModelParams())
print(f"grid: {model.grid.num_slots} slots over {model.grid.num_days} days, "
      f"{len(model.grid.night_windows)} nights")
print(f"{model.num_vars} variables, {len(model.constraints)} constraints")
print("rows per family:", model.family_counts())

print("\n=== a few constraint rows (LP dump) ===")
for line in dump_lp(model).splitlines()[:4]:
    print(" ", line[:110])

print("\n=== exact solve, three objective modes ===")
for key, outcome in plan_all_modes(request, inventory).items():
    stats = outcome.solve_result.stats
    print(f"\n--- {key} ({outcome.status.value}, {stats.nodes} nodes, "
          f"{stats.wall_ms:.1f} ms) ---")
    if outcome.itinerary is None:
        print("  infeasible:", outcome.infeasible_reason)
        continue
    for leg, flight in outcome.itinerary.chosen_flights:
        print(f"  leg {leg}: {flight.origin}->{flight.destination} "
              f"{flight.departure:%H:%M} {flight.airline} ${flight.price / 100:.0f} "
              f"({flight.cabin_class.value}{', nonstop' if flight.is_nonstop else ''})")
    for hotel, first, last in outcome.itinerary.chosen_hotels:
        print(f"  hotel: {hotel.name} {hotel.rating / 10:.1f}* "
              f"${hotel.price_per_night / 100:.0f}/night, nights {first} .. {last}")
    print("  cost:", outcome.itinerary.cost.to_json())
