"""Benchmark generation walkthrough.

Every sample is a pure function of (seed, index): a symbolic travel request
plus a flight/hotel inventory in which at least one combination satisfying
every stated constraint is guaranteed to exist. Run it twice and diff the
output - it is byte-identical.
"""

import json

from tripsolve import GenParams, gen_inventory, gen_request, serialize_request
from tripsolve.simulate import evaluate_cost

params = GenParams(rng_seed=7)

print("=== one generated request ===")
request = gen_request(params, index=0)
print(json.dumps(json.loads(serialize_request(request)), indent=2))

print("\n=== its inventory (counts) ===")
inventory, planted = gen_inventory(params, request, return_planted=True)
print(f"{len(inventory.flights)} flights across {len(request.legs)} legs, "
      f"{len(inventory.hotels)} hotels")

print("\n=== the planted feasible combination ===")
print("flights:", planted.flights, " hotels:", planted.hotels)
verdict = evaluate_cost(planted, request, inventory)
print("feasible:", verdict.feasible, " cost:", verdict.cost.to_json())

print("\n=== determinism ===")
again = gen_request(params, index=0)
print("same (seed, index) twice, byte-identical:",
      serialize_request(again) == serialize_request(request))

print("\n=== sample statistics over 2000 draws ===")
one_way = nonstop = 0
for i in range(2000):
    r = gen_request(params, i)
    one_way += r.trip_kind.value == "one_way"
    nonstop += r.airline.nonstop_only is not None
print(f"one-way fraction: {one_way / 2000:.3f}  (target < 0.05)")
print(f"nonstop constraint present: {nonstop / 2000:.3f}")
