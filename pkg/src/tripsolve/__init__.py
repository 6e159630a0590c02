"""Itinerary planning engine: symbolic requests, NL round-tripping, exact
0-1 MILP solving, and self-consistency evaluation."""

from .model import (
    AirlineConstraints,
    BudgetConstraints,
    CabinClass,
    CostBreakdown,
    DateRange,
    FlightOption,
    HotelConstraints,
    HotelOption,
    Inventory,
    MatchResult,
    SymbolicRequest,
    TimeWindow,
    TripKind,
    TripLeg,
    exact_match,
    parse_request,
    serialize_request,
)
from .datagen import (
    BaseFlightTable,
    GenParams,
    Selection,
    gen_inventory,
    gen_request,
    ingest_flight_csv,
    perturb_hotels,
    replicate_dates,
)
from .nl import TranslatorBackend, TranslateResult, parse_nl, render_nl, translate
from .milp import (
    LinearConstraint,
    MilpModel,
    ModeWeights,
    ModelParams,
    ObjectiveMode,
    build_model,
    dump_lp,
    encode_implication,
    prefilter_options,
)
from .timegrid import TimeGrid, build_time_grid
from .simulate import Itinerary, Schedule, SimResult, evaluate_cost, verify_schedule_invariants
from .solver import (
    BranchOrder,
    SolveResult,
    SolveStats,
    SolveStatus,
    SolverConfig,
    check_feasible,
    solve,
)
from .bruteforce import CapExceeded, brute_force
from .plan import PlanOutcome, plan_all_modes, plan_request
from .evaluate import (
    EvalRecord,
    EvalReport,
    corrupt_request,
    evaluate_corpus,
    profile_phases,
    quality_score,
)

__version__ = "0.1.0"
