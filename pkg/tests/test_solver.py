"""Branch-and-bound correctness: dominance, infeasibility, oracle agreement,
determinism, bound admissibility, and verdict wording."""

import itertools
from datetime import date

import pytest

from tripsolve.bruteforce import CapExceeded, brute_force
from tripsolve.datagen import GenParams, Selection, gen_inventory, gen_request
from tripsolve.milp import ModelParams, build_model, prefilter_options
from tripsolve.model import (
    AirlineConstraints,
    HotelConstraints,
    Inventory,
    SymbolicRequest,
    TripKind,
    TripLeg,
)
from tripsolve.simulate import evaluate_cost, verify_schedule_invariants
from tripsolve.solver import (
    BranchOrder,
    SolveStatus,
    SolverConfig,
    _Search,
    _build_groups,
    check_feasible,
    solve,
)
from .test_milp import flight, hotel


SMALL = GenParams(rng_seed=101, flights_per_leg=(3, 6), hotels_per_city=(2, 5),
                  leg_gap_days=(1, 2))


def build_instance(params: GenParams, index: int):
    request = gen_request(params, index)
    inventory = gen_inventory(params, request)
    model = build_model(request, prefilter_options(request, inventory), ModelParams())
    return request, inventory, model


class TestSolveBasics:
    def test_picks_cheaper_dominating_flight(self):
        r = SymbolicRequest(legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
                            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("cheap", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T12:00", price=10000),
            flight("dear", "DEN", "MIA", "2025-01-15T09:00", "2025-01-15T13:00", price=12000),
        ), hotels=())
        result = solve(build_model(r, inv, ModelParams()))
        assert result.status is SolveStatus.OPTIMAL
        assert result.selection == Selection(("cheap",), ())
        assert result.objective == 10000.0

    def test_empty_candidate_set_is_infeasible(self):
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(nonstop_only=True),
            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("conn", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T14:00",
                   nonstop=False),
        ), hotels=())
        filtered = prefilter_options(r, inv)
        result = solve(build_model(r, filtered, ModelParams()))
        assert result.status is SolveStatus.INFEASIBLE

    def test_deterministic_including_node_counts(self):
        _, _, model = build_instance(SMALL, 7)
        first = solve(model)
        second = solve(model)
        assert first.status == second.status
        assert first.objective == second.objective
        assert first.selection == second.selection
        assert first.stats.nodes == second.stats.nodes
        assert first.stats.propagations == second.stats.propagations

    def test_time_limit_reports_status(self):
        _, _, model = build_instance(SMALL, 3)
        result = solve(model, SolverConfig(time_limit_ms=10_000, node_limit=1))
        assert result.status is SolveStatus.TIME_LIMIT

    def test_index_order_matches_sorted_order_on_optimum(self):
        _, _, model = build_instance(SMALL, 11)
        by_cost = solve(model, SolverConfig(branch_order=BranchOrder.OBJECTIVE_DESCENDING))
        by_index = solve(model, SolverConfig(branch_order=BranchOrder.INDEX_ASCENDING))
        assert by_cost.status == by_index.status
        if by_cost.status is SolveStatus.OPTIMAL:
            assert by_cost.objective == by_index.objective
            assert by_cost.selection == by_index.selection


class TestOracleAgreement:
    def test_sixty_random_instances(self):
        params = ModelParams()
        for i in range(60):
            request, inventory, model = build_instance(SMALL, i)
            mine = solve(model)
            oracle = brute_force(request, inventory, params)
            assert mine.status == oracle.status, i
            if mine.status is SolveStatus.OPTIMAL:
                assert mine.objective == oracle.objective, i
                assert mine.selection == oracle.selection, i

    def test_agreement_holds_at_half_hour_slots(self):
        params = ModelParams(slot_minutes=30, min_sleep_slots=12)
        for i in range(20):
            request = gen_request(SMALL, i)
            inventory = gen_inventory(SMALL, request)
            model = build_model(request, prefilter_options(request, inventory), params)
            mine = solve(model)
            oracle = brute_force(request, inventory, params)
            assert mine.status == oracle.status, i
            if mine.status is SolveStatus.OPTIMAL:
                assert mine.objective == oracle.objective, i

    def test_coarse_grid_rejects_unschedulable_final_arrival(self):
        # a 22:55 arrival on the last day lands past the final 2-hour slot:
        # build_model refuses it, drop_unschedulable removes it, and the
        # enumeration oracle treats it as infeasible - all three agree
        from tripsolve.milp import GridMismatch
        from tripsolve.plan import drop_unschedulable

        r = SymbolicRequest(legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
                            trip_kind=TripKind.ONE_WAY)
        late = flight("late", "DEN", "MIA", "2025-01-15T20:00", "2025-01-15T22:55")
        inv = Inventory(flights=(late,), hotels=())
        params = ModelParams(slot_minutes=120, min_sleep_slots=3)
        with pytest.raises(GridMismatch):
            build_model(r, inv, params)
        dropped = drop_unschedulable(r, inv, params)
        assert dropped.flights == ()
        result = solve(build_model(r, dropped, params))
        assert result.status is SolveStatus.INFEASIBLE
        assert brute_force(r, inv, params).status is SolveStatus.INFEASIBLE

    def test_solutions_verify_and_respect_invariants(self):
        params = ModelParams()
        for i in range(25):
            request, inventory, model = build_instance(SMALL, i)
            result = solve(model)
            if result.status is not SolveStatus.OPTIMAL:
                continue
            sim = evaluate_cost(result.selection, request, inventory, params)
            assert sim.feasible, sim.violation_codes()
            assert sim.objective == result.objective
            assert verify_schedule_invariants(model, result.assignment) == []


class TestBoundAdmissibility:
    def test_bound_never_exceeds_best_completion(self):
        """Partial-node bound <= objective of every completion of that node."""
        cfg = SolverConfig()
        checked = 0
        for i in range(12):
            _, _, model = build_instance(SMALL, i)
            groups = _build_groups(model, cfg)
            if groups is None:
                continue
            search = _Search(model, cfg, groups)
            # enumerate completions of each 1-deep partial node
            first = groups[0]
            rest = groups[1:]
            for cand in first.candidates[:3]:
                if first.kind == "leg":
                    from tripsolve.solver import _flight_contrib
                    committed = _flight_contrib(model, cand)
                else:
                    committed = cand.obj_coef
                bound = committed + search.suffix_contrib[1]
                completions = []
                for combo in itertools.product(*(g.candidates for g in rest)):
                    total = committed
                    for g, c in zip(rest, combo):
                        if g.kind == "leg":
                            from tripsolve.solver import _flight_contrib
                            total += _flight_contrib(model, c)
                        else:
                            total += c.obj_coef
                    completions.append(total)
                if completions:
                    assert bound <= min(completions) + 1e-9
                    checked += 1
        assert checked > 0


class TestBruteForce:
    def test_single_feasible_combination_is_returned(self):
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(nonstop_only=True),
            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("conn", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T14:00",
                   nonstop=False, price=5000),
            flight("only", "DEN", "MIA", "2025-01-15T09:00", "2025-01-15T12:00",
                   nonstop=True, price=30000),
        ), hotels=())
        result = brute_force(r, inv)
        assert result.status is SolveStatus.OPTIMAL
        assert result.selection == Selection(("only",), ())

    def test_no_feasible_combination(self):
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),),
            airline=AirlineConstraints(nonstop_only=True),
            trip_kind=TripKind.ONE_WAY)
        inv = Inventory(flights=(
            flight("conn", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T14:00",
                   nonstop=False),
        ), hotels=())
        assert brute_force(r, inv).status is SolveStatus.INFEASIBLE

    def test_cap_exceeded(self):
        request, inventory, _ = build_instance(SMALL, 2)
        with pytest.raises(CapExceeded):
            brute_force(request, inventory, cap=1)


class TestObjectiveModes:
    def _two_hotel_instance(self):
        r = SymbolicRequest(legs=(
            TripLeg(date(2025, 1, 15), "DEN", "MIA"),
            TripLeg(date(2025, 1, 17), "MIA", "DEN")))
        inv = Inventory(
            flights=(
                flight("f0", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T12:00",
                       price=20000),
                flight("f1", "MIA", "DEN", "2025-01-17T15:00", "2025-01-17T19:00",
                       price=21000),
            ),
            hotels=(hotel("cheap2star", "MIA", price=9000, rating=20),
                    hotel("fine5star", "MIA", price=13000, rating=48)))
        return r, inv

    def test_better_hotel_tolerates_cost_for_rating(self):
        from tripsolve.milp import ObjectiveMode
        from tripsolve.plan import plan_all_modes

        r, inv = self._two_hotel_instance()
        outcomes = plan_all_modes(r, inv)
        assert outcomes[ObjectiveMode.MIN_COST.value].selection.hotels == ("cheap2star",)
        assert outcomes[ObjectiveMode.BETTER_HOTEL.value].selection.hotels == ("fine5star",)

    def test_weighted_modes_agree_with_oracle(self):
        from tripsolve.milp import ObjectiveMode

        for mode in (ObjectiveMode.BETTER_HOTEL, ObjectiveMode.BETTER_FLIGHT):
            params = ModelParams(objective_mode=mode)
            for i in range(15):
                request, inventory, _ = build_instance(SMALL, i)
                model = build_model(request, prefilter_options(request, inventory), params)
                mine = solve(model)
                oracle = brute_force(request, inventory, params)
                assert mine.status == oracle.status, (mode, i)
                if mine.status is SolveStatus.OPTIMAL:
                    assert mine.objective == oracle.objective, (mode, i)


class TestCheckFeasible:
    def test_optimal_solution_passes(self):
        params = ModelParams()
        request, inventory, model = build_instance(SMALL, 5)
        result = solve(model)
        assert result.status is SolveStatus.OPTIMAL
        verdict = check_feasible(result.selection, request, inventory, params)
        assert verdict.feasible and verdict.violations == ()

    def test_min_rating_violation_named(self):
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),
                  TripLeg(date(2025, 1, 16), "MIA", "DEN")),
            hotel=HotelConstraints(min_rating=45))
        inv = Inventory(
            flights=(
                flight("f0", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T12:00"),
                flight("f1", "MIA", "DEN", "2025-01-16T15:00", "2025-01-16T19:00"),
            ),
            hotels=(hotel("h0", "MIA", rating=30),))
        verdict = check_feasible(Selection(("f0", "f1"), ("h0",)), r, inv)
        assert "hotel.min_rating" in verdict.violation_codes()

    def test_short_sleep_names_the_night(self):
        # late second-night arrival is impossible, so force it with a
        # red-eye departure on the return leg: night 2 loses its morning
        r = SymbolicRequest(
            legs=(TripLeg(date(2025, 1, 15), "DEN", "MIA"),
                  TripLeg(date(2025, 1, 18), "MIA", "DEN")))
        inv = Inventory(
            flights=(
                flight("f0", "DEN", "MIA", "2025-01-15T08:00", "2025-01-15T12:00"),
                flight("f1", "MIA", "DEN", "2025-01-18T01:30", "2025-01-18T05:30"),
            ),
            hotels=(hotel("h0", "MIA"),))
        verdict = check_feasible(Selection(("f0", "f1"), ("h0",)), r, inv)
        assert "commonsense.sleep" in verdict.violation_codes()
        assert any("night 2" in str(v) for v in verdict.violations)
