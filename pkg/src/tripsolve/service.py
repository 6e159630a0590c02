"""HTTP planning service: translate -> compile -> solve, three ways per request.

Each /plan call returns the three objective modes (minimum cost, better
hotel, better flight); every itinerary served has already passed the
independent feasibility check. Failures are reported per option so one
infeasible mode never hides the others.

Inventory comes either from a JSON-lines dataset (all records merged, ids
namespaced) or, in demo mode, from the deterministic generator applied to
the incoming request itself.
"""

import json
import os
import threading
import time
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from . import __version__
from .datagen import GenParams, gen_inventory
from .milp import ModelParams, parse_mode_weights
from .model import FlightOption, HotelOption, Inventory, PlanningError, SymbolicRequest
from .nl import TranslatorBackend, translate
from .plan import plan_all_modes
from .solver import SolveStatus, SolverConfig


@dataclass
class ServiceConfig:
    inventory_mode: str = "generate"  # "generate" | "dataset"
    dataset_path: Optional[str] = None
    gen_seed: int = 20250115
    flights_per_leg: tuple = (20, 40)
    hotels_per_city: tuple = (10, 16)
    translator: TranslatorBackend = field(default_factory=TranslatorBackend)
    model_params: ModelParams = field(default_factory=ModelParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    session_log_path: Optional[str] = None
    ui_dir: Optional[str] = None  # built frontend to serve at /ui

    @staticmethod
    def from_dict(raw: Dict[str, Any]) -> "ServiceConfig":
        cfg = ServiceConfig()
        if "inventory_mode" in raw:
            cfg.inventory_mode = raw["inventory_mode"]
        if "dataset_path" in raw:
            cfg.dataset_path = raw["dataset_path"]
        if "gen_seed" in raw:
            cfg.gen_seed = int(raw["gen_seed"])
        if "flights_per_leg" in raw:
            cfg.flights_per_leg = tuple(raw["flights_per_leg"])
        if "hotels_per_city" in raw:
            cfg.hotels_per_city = tuple(raw["hotels_per_city"])
        if "session_log_path" in raw:
            cfg.session_log_path = raw["session_log_path"]
        if "ui_dir" in raw:
            cfg.ui_dir = raw["ui_dir"]
        if "translator_url" in raw and raw["translator_url"]:
            cfg.translator = TranslatorBackend(
                url=raw["translator_url"],
                model_name=raw.get("translator_model", ""),
                timeout_s=float(raw.get("translator_timeout_s", 30.0)),
                max_retries=int(raw.get("translator_retries", 2)))
        solver_kwargs = {}
        if "time_limit_ms" in raw:
            solver_kwargs["time_limit_ms"] = int(raw["time_limit_ms"])
        if "node_limit" in raw:
            solver_kwargs["node_limit"] = int(raw["node_limit"])
        if solver_kwargs:
            cfg.solver = SolverConfig(**solver_kwargs)
        model_kwargs = {}
        for key in ("slot_minutes", "min_sleep_slots", "soft_penalty_weight"):
            if key in raw:
                model_kwargs[key] = int(raw[key])
        if "mode_weights" in raw:
            model_kwargs["mode_weights"] = parse_mode_weights(raw["mode_weights"])
        if model_kwargs:
            cfg.model_params = ModelParams(**model_kwargs)
        return cfg


class _State:
    def __init__(self, cfg: ServiceConfig):
        self.cfg = cfg
        self.status = "loading"
        self.detail = ""
        self.inventory: Optional[Inventory] = None
        self.record_count = 0
        self.sessions: Dict[str, Dict[str, Any]] = {}
        self.lock = threading.Lock()

    def load(self):
        try:
            if self.cfg.inventory_mode == "dataset":
                if not self.cfg.dataset_path:
                    raise PlanningError("dataset mode requires dataset_path")
                self.inventory = _load_dataset(self.cfg.dataset_path, self)
            else:
                self.inventory = Inventory(flights=(), hotels=())
            self.status = "ready"
        except Exception as exc:  # surfaced via /health, process stays up
            self.status = "failed"
            self.detail = str(exc)

    def log_event(self, event: Dict[str, Any]):
        if not self.cfg.session_log_path:
            return
        with self.lock:
            with open(self.cfg.session_log_path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(event) + "\n")


def _load_dataset(path: str, state: _State) -> Inventory:
    flights: List[FlightOption] = []
    hotels: List[HotelOption] = []
    with open(path, encoding="utf-8") as handle:
        for idx, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            inv = Inventory.from_json(record["inventory"])
            for flight in inv.flights:
                data = flight.to_json()
                data["id"] = f"r{idx}:{data['id']}"
                flights.append(FlightOption.from_json(data, "flight"))
            for hotel in inv.hotels:
                data = hotel.to_json()
                data["id"] = f"r{idx}:{data['id']}"
                hotels.append(HotelOption.from_json(data, "hotel"))
            state.record_count += 1
    return Inventory(flights=tuple(flights), hotels=tuple(hotels))


def _inventory_for(state: _State, request: SymbolicRequest) -> Inventory:
    if state.cfg.inventory_mode == "dataset":
        return state.inventory
    params = GenParams(
        rng_seed=state.cfg.gen_seed,
        flights_per_leg=state.cfg.flights_per_leg,
        hotels_per_city=state.cfg.hotels_per_city)
    return gen_inventory(params, request)


def _option_payload(outcome) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "status": outcome.status.value,
        "solver_stats": outcome.solve_result.stats.to_json(),
    }
    if outcome.status is SolveStatus.OPTIMAL and outcome.itinerary is not None:
        payload["feasible"] = True
        payload["itinerary"] = outcome.itinerary.to_json()
        payload["cost"] = outcome.itinerary.cost.to_json()
        payload["objective"] = outcome.solve_result.objective
    else:
        payload["feasible"] = False
        payload["reason"] = (outcome.infeasible_reason
                             or f"solver stopped: {outcome.status.value}")
    return payload


def create_app(cfg: Optional[ServiceConfig] = None) -> FastAPI:
    cfg = cfg or ServiceConfig()
    state = _State(cfg)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        state.load()
        yield

    app = FastAPI(title="tripsolve", version=__version__, lifespan=lifespan)
    app.state.planner = state

    @app.get("/health")
    def health():
        inventory = state.inventory
        return {
            "status": state.status,
            "detail": state.detail,
            "inventory_mode": cfg.inventory_mode,
            "records": state.record_count,
            "flights": len(inventory.flights) if inventory else 0,
            "hotels": len(inventory.hotels) if inventory else 0,
            "build": {"name": "tripsolve", "version": __version__},
        }

    @app.post("/plan")
    def plan(body: Dict[str, Any]):
        if state.status != "ready":
            return JSONResponse(
                status_code=503,
                content={"error": "NotReady", "detail": state.detail or state.status})
        t_start = time.perf_counter()
        has_text = isinstance(body.get("text"), str) and body["text"].strip()
        has_request = isinstance(body.get("request"), dict)
        if not has_text and not has_request:
            return JSONResponse(
                status_code=400,
                content={"error": "UnparsableRequest",
                         "detail": "body must carry 'text' or 'request'"})

        translate_s = 0.0
        if has_request:
            try:
                request = SymbolicRequest.from_json(body["request"])
            except PlanningError as exc:
                return JSONResponse(
                    status_code=400,
                    content={"error": "UnparsableRequest", "detail": str(exc)})
        else:
            t0 = time.perf_counter()
            try:
                request = translate(body["text"], cfg.translator).request
            except PlanningError as exc:
                status = 400 if not cfg.translator.is_external else 422
                name = "UnparsableRequest" if status == 400 else "TranslationFailed"
                return JSONResponse(status_code=status,
                                    content={"error": name, "detail": str(exc)})
            translate_s = time.perf_counter() - t0

        inventory = _inventory_for(state, request)
        outcomes = plan_all_modes(
            request, inventory, cfg.model_params, cfg.solver,
            tolerate_grid_mismatch=(cfg.inventory_mode == "dataset"))

        session_id = uuid.uuid4().hex
        response = {
            "session_id": session_id,
            "request_echo": request.to_json(),
            "options": {key: _option_payload(outcome)
                        for key, outcome in outcomes.items()},
            "timings": {
                "translate_s": round(translate_s, 4),
                "total_s": round(time.perf_counter() - t_start, 4),
            },
        }
        with state.lock:
            state.sessions[session_id] = {
                "request": request.to_json(),
                "options": set(outcomes.keys()),
                "selections": {},
            }
        state.log_event({"event": "plan", "session": session_id,
                         "request": request.to_json()})
        return response

    @app.post("/select")
    def select(body: Dict[str, Any]):
        session_id = body.get("session_id")
        option = body.get("option")
        with state.lock:
            session = state.sessions.get(session_id)
            if session is None:
                return JSONResponse(status_code=404,
                                    content={"error": "UnknownSession"})
            if option not in session["options"]:
                return JSONResponse(
                    status_code=400,
                    content={"error": "UnknownOption",
                             "detail": f"option must be one of {sorted(session['options'])}"})
            if option not in session["selections"]:
                session["selections"][option] = time.strftime(
                    "%Y-%m-%dT%H:%M:%SZ", time.gmtime())
                state.log_event({"event": "select", "session": session_id,
                                 "option": option,
                                 "at": session["selections"][option]})
            return {"session_id": session_id, "option": option,
                    "selected_at": session["selections"][option]}

    if cfg.ui_dir and os.path.isdir(cfg.ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=cfg.ui_dir, html=True), name="ui")

    return app
