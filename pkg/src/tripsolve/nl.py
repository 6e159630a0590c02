"""Natural-language bridge: render requests to English and parse them back.

The grammar is a set of clause templates per constraint family. The parser
is compiled from the same template strings the renderer uses, so every
rendering variant is invertible by construction; round-tripping a request
through text recovers it exactly. The paraphrase scheme (sentence order,
family headers, per-clause variants) is selected deterministically from a
seed, with four schemes that jointly cover every template variant.

A pluggable external translator client mirrors the same contract for real
model backends: its output is validated against the canonical request
schema, with bounded retries on invalid output.
"""

import re
from dataclasses import dataclass
from datetime import date
from typing import Callable, Dict, List, Optional, Tuple

from .model import (
    AirlineConstraints,
    BudgetConstraints,
    CabinClass,
    HotelConstraints,
    PlanningError,
    SymbolicRequest,
    TimeWindow,
    TripKind,
    TripLeg,
    cents_to_json,
    minutes_to_json,
    parse_request,
    serialize_request,
)


class UnparsableSegment(PlanningError):
    """A span of text matched no known clause."""

    def __init__(self, text: str, start: int, end: int, message: str = "unparsable"):
        super().__init__(f"{message} at [{start}:{end}]: {text[start:end]!r}")
        self.start = start
        self.end = end
        self.segment = text[start:end]


class MissingLegs(PlanningError):
    """Text contains no recognizable trip legs."""


class EndpointUnreachable(PlanningError):
    """External translator endpoint could not be reached."""


class InvalidOutputAfterRetries(PlanningError):
    """External translator never produced schema-valid output."""


NUM_VARIANT_SCHEMES = 4

MONTHS = ("January", "February", "March", "April", "May", "June", "July",
          "August", "September", "October", "November", "December")


def _ordinal(day: int) -> str:
    if 11 <= day % 100 <= 13:
        return f"{day}th"
    return f"{day}{ {1: 'st', 2: 'nd', 3: 'rd'}.get(day % 10, 'th') }"


def render_date(when: date) -> str:
    return f"{MONTHS[when.month - 1]} {_ordinal(when.day)}, {when.year}"


def _parse_date(text: str) -> date:
    match = re.fullmatch(r"(\w+) (\d{1,2})(?:st|nd|rd|th), (\d{4})", text)
    if match is None or match.group(1) not in MONTHS:
        raise ValueError(f"bad date {text!r}")
    return date(int(match.group(3)), MONTHS.index(match.group(1)) + 1, int(match.group(2)))


def _dollars(cents: int) -> str:
    value = cents_to_json(cents)
    return str(value) if isinstance(value, int) else f"{value:.2f}"


def _cents(text: str) -> int:
    return round(float(text) * 100)


def _rating_text(tenths: int) -> str:
    return f"{tenths / 10:g}"


# placeholder -> (render function, capture regex, parse function)
_SLOTS: Dict[str, Tuple[str, Callable[[str], object]]] = {
    "amt": (r"(\d+(?:\.\d{1,2})?)", _cents),
    "time": (r"([0-2]\d:[0-5]\d)", lambda s: int(s[:2]) * 60 + int(s[3:])),
    "rating": (r"(\d(?:\.\d)?)", lambda s: round(float(s) * 10)),
    "cabin": (r"(coach|premium|business|first)", CabinClass),
    "items": (r"([^;.]+?)", lambda s: tuple(part.strip() for part in s.split(","))),
    "date": (r"((?:" + "|".join(MONTHS) + r") \d{1,2}(?:st|nd|rd|th), \d{4})", _parse_date),
    "ap": (r"([A-Z]{3})", str),
}

_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")


def _template_regex(template: str) -> Tuple[re.Pattern, List[str]]:
    pattern = ""
    names: List[str] = []
    pos = 0
    for match in _PLACEHOLDER_RE.finditer(template):
        pattern += re.escape(template[pos:match.start()])
        slot = match.group(1)
        pattern += _SLOTS[slot][0]
        names.append(slot)
        pos = match.end()
    pattern += re.escape(template[pos:])
    return re.compile(pattern), names


@dataclass(frozen=True)
class Clause:
    """One renderable/parsable statement about a single request field."""

    field: str            # dotted path inside the request
    value: object         # fixed value for flag clauses, None for slotted ones
    templates: Tuple[str, ...]

    def render(self, variant: int, slots: Dict[str, str]) -> str:
        template = self.templates[variant % len(self.templates)]
        return template.format(**slots)


AIRLINE_CLAUSES: Tuple[Clause, ...] = (
    Clause("cabin_class", None, (
        "{cabin} class", "cabin class {cabin}", "flying {cabin}", "seats in {cabin}")),
    Clause("price_total_max", None, (
        "with a total flight budget of ${amt}", "total airfare at most ${amt}",
        "flight budget capped at ${amt}", "no more than ${amt} on flights")),
    Clause("refundable", True, (
        "refundable tickets only", "tickets must be refundable",
        "refundable fares required", "only refundable fares")),
    Clause("refundable", False, (
        "refundable tickets are not needed", "no need for refundable fares",
        "non-refundable fares are okay", "refundability is not required")),
    Clause("nonstop_only", True, (
        "non-stop flights only", "direct flights only",
        "no layovers", "non-stop itineraries only")),
    Clause("nonstop_only", False, (
        "layovers are fine", "connections are acceptable",
        "stops are okay", "non-stop is not required")),
    Clause("must_not_basic_economy", True, (
        "no basic economy", "basic economy is not acceptable",
        "avoid basic economy fares", "exclude basic economy")),
    Clause("must_not_basic_economy", False, (
        "basic economy is acceptable", "basic economy fares are okay",
        "basic economy works too", "fine with basic economy")),
    Clause("no_mixed_cabin", True, (
        "no mixed cabin", "avoid mixed-cabin itineraries",
        "mixed cabin is not acceptable", "exclude mixed-cabin fares")),
    Clause("no_mixed_cabin", False, (
        "mixed cabin is acceptable", "mixed-cabin itineraries are okay",
        "mixed cabin works too", "fine with mixed cabin")),
    Clause("avoid_red_eye", True, (
        "no red-eye flights", "avoid red-eye departures",
        "skip red-eyes", "no overnight departures")),
    Clause("avoid_red_eye", False, (
        "red-eye flights are fine", "red-eyes are acceptable",
        "overnight departures are okay", "fine with red-eye flights")),
    Clause("departure_time", None, (
        "departing between {time} and {time2}", "departure window {time} to {time2}",
        "take off between {time} and {time2}", "departures from {time} until {time2}")),
    Clause("arrival_time", None, (
        "arriving between {time} and {time2}", "arrival window {time} to {time2}",
        "landing between {time} and {time2}", "arrivals from {time} until {time2}")),
    Clause("plane_types", None, (
        "aircraft types: {items}", "preferred aircraft: {items}",
        "plane models: {items}", "fly on: {items}")),
    Clause("preferred_airlines", None, (
        "airlines: {items}", "preferred airlines: {items}",
        "carriers: {items}", "fly with: {items}")),
)

HOTEL_CLAUSES: Tuple[Clause, ...] = (
    Clause("daily_budget_max", None, (
        "daily budget ${amt}", "at most ${amt} per night",
        "nightly rate within ${amt}", "cap the nightly cost at ${amt}")),
    Clause("total_budget_max", None, (
        "total budget ${amt}", "at most ${amt} on hotels overall",
        "hotel spend capped at ${amt}", "keep the total hotel cost within ${amt}")),
    Clause("min_rating", None, (
        "rated at least {rating} stars", "minimum rating {rating}",
        "{rating} stars or better", "rating {rating} or higher")),
    Clause("brands", None, (
        "brands: {items}", "preferred brands: {items}",
        "stick to brands: {items}", "chains: {items}")),
)

BUDGET_CLAUSES: Tuple[Clause, ...] = (
    Clause("total_budget", None, (
        "total trip budget ${amt}", "overall budget ${amt}",
        "keep the whole trip within ${amt}", "spend at most ${amt} in total")),
    Clause("everyday_budget", None, (
        "everyday budget ${amt}", "daily spending cap ${amt}",
        "per-day budget ${amt}", "at most ${amt} per day")),
)

LEG_TEMPLATES: Tuple[str, ...] = (
    "{date}, {ap} to {ap2}",
    "{ap} to {ap2} on {date}",
    "fly {ap} to {ap2} on {date}",
    "{date} from {ap} to {ap2}",
)

FAMILY_HEADERS: Dict[str, Tuple[str, ...]] = {
    "airline": ("Flights:", "Flight requirements:", "For flights:", "Airfare preferences:"),
    "hotel": ("Hotels:", "Hotel requirements:", "For hotels:", "Lodging preferences:"),
    "budget": ("Budget:", "Overall budget:", "Spending plan:", "Money limits:"),
    "legs": ("Travel dates:", "Itinerary:", "Trip legs:", "Route plan:"),
}

FAMILY_ORDERS: Tuple[Tuple[str, ...], ...] = (
    ("airline", "hotel", "budget", "legs"),
    ("legs", "airline", "hotel", "budget"),
    ("airline", "budget", "hotel", "legs"),
    ("legs", "hotel", "airline", "budget"),
)

# {time2}/{ap2} reuse the base slot pattern with a distinct position
_SLOTS["time2"] = _SLOTS["time"]
_SLOTS["ap2"] = _SLOTS["ap"]


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _airline_slots(a: AirlineConstraints, field: str) -> Dict[str, str]:
    if field == "cabin_class":
        return {"cabin": a.cabin_class.value}
    if field == "price_total_max":
        return {"amt": _dollars(a.price_total_max)}
    if field == "departure_time":
        return {"time": minutes_to_json(a.departure_time.start),
                "time2": minutes_to_json(a.departure_time.end)}
    if field == "arrival_time":
        return {"time": minutes_to_json(a.arrival_time.start),
                "time2": minutes_to_json(a.arrival_time.end)}
    if field == "plane_types":
        return {"items": ", ".join(a.plane_types)}
    if field == "preferred_airlines":
        return {"items": ", ".join(a.preferred_airlines)}
    return {}


def _hotel_slots(h: HotelConstraints, field: str) -> Dict[str, str]:
    if field == "daily_budget_max":
        return {"amt": _dollars(h.daily_budget_max)}
    if field == "total_budget_max":
        return {"amt": _dollars(h.total_budget_max)}
    if field == "min_rating":
        return {"rating": _rating_text(h.min_rating)}
    if field == "brands":
        return {"items": ", ".join(h.brands)}
    return {}


def _budget_slots(b: BudgetConstraints, field: str) -> Dict[str, str]:
    if field == "total_budget":
        return {"amt": _dollars(b.total_budget)}
    return {"amt": _dollars(b.everyday_budget)}


def _family_clause_texts(request: SymbolicRequest, family: str, scheme: int) -> List[str]:
    texts: List[str] = []
    if family == "airline":
        section, slots_fn = request.airline, _airline_slots
        clauses = AIRLINE_CLAUSES
    elif family == "hotel":
        section, slots_fn = request.hotel, _hotel_slots
        clauses = HOTEL_CLAUSES
    else:
        section, slots_fn = request.budget, _budget_slots
        clauses = BUDGET_CLAUSES
    rendered_fields = []
    for ordinal, clause in enumerate(clauses):
        value = getattr(section, clause.field)
        if value is None or clause.field in rendered_fields:
            continue
        if clause.value is not None and value != clause.value:
            continue
        rendered_fields.append(clause.field)
        texts.append(clause.render(scheme + ordinal, slots_fn(section, clause.field)))
    return texts


def _join_clauses(items: List[str]) -> str:
    if len(items) >= 2:
        items = items[:-1] + ["and " + items[-1]]
    return "; ".join(items)


def render_nl(request: SymbolicRequest, variant_seed: int = 0) -> str:
    """English text stating every present field exactly once; the paraphrase
    scheme is a deterministic function of the seed."""
    scheme = variant_seed % NUM_VARIANT_SCHEMES
    sentences: List[str] = []
    for family in FAMILY_ORDERS[scheme]:
        if family == "legs":
            leg_texts = []
            for k, leg in enumerate(request.legs):
                template = LEG_TEMPLATES[(scheme + k) % len(LEG_TEMPLATES)]
                leg_texts.append(template.format(
                    date=render_date(leg.date), ap=leg.origin, ap2=leg.destination))
            header = FAMILY_HEADERS["legs"][scheme]
            sentences.append(f"{header} {_join_clauses(leg_texts)}.")
        else:
            clause_texts = _family_clause_texts(request, family, scheme)
            if not clause_texts:
                continue
            header = FAMILY_HEADERS[family][scheme]
            sentences.append(f"{header} {_join_clauses(clause_texts)}.")
    return " ".join(sentences)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _compile_family(clauses: Tuple[Clause, ...]):
    compiled = []
    for clause in clauses:
        for template in clause.templates:
            regex, names = _template_regex(template)
            compiled.append((regex, names, clause))
    return compiled

_PARSERS = {
    "airline": _compile_family(AIRLINE_CLAUSES),
    "hotel": _compile_family(HOTEL_CLAUSES),
    "budget": _compile_family(BUDGET_CLAUSES),
}
_LEG_PARSERS = [_template_regex(t) for t in LEG_TEMPLATES]

_ALL_HEADERS = sorted(
    ((header, family) for family, headers in FAMILY_HEADERS.items() for header in headers),
    key=lambda pair: -len(pair[0]))


def _split_sentences(text: str) -> List[Tuple[int, int]]:
    """Spans of sentences: a period ends one only when followed by space/end
    (so decimal amounts survive)."""
    spans: List[Tuple[int, int]] = []
    start = 0
    for i, ch in enumerate(text):
        if ch == "." and (i + 1 == len(text) or text[i + 1].isspace()):
            spans.append((start, i + 1))
            start = i + 1
    if text[start:].strip():
        spans.append((start, len(text)))
    return spans


def _parse_clause_value(names: List[str], groups: Tuple[str, ...], clause: Clause):
    if clause.value is not None or not names:
        return clause.value if clause.value is not None else True
    parsed = [(name, _SLOTS[name][1](raw)) for name, raw in zip(names, groups)]
    if clause.field in ("departure_time", "arrival_time"):
        return TimeWindow(parsed[0][1], parsed[1][1])
    return parsed[0][1]


def parse_nl(text: str) -> SymbolicRequest:
    """Recover the unique request whose rendering family contains the text."""
    legs: List[TripLeg] = []
    fields: Dict[str, Dict[str, object]] = {"airline": {}, "hotel": {}, "budget": {}}

    for start, end in _split_sentences(text):
        sentence = text[start:end].strip()
        if not sentence:
            continue
        body = sentence[:-1] if sentence.endswith(".") else sentence
        family = None
        for header, fam in _ALL_HEADERS:
            if body.startswith(header):
                family = fam
                body = body[len(header):].strip()
                break
        if family is None:
            raise UnparsableSegment(text, start, end, "no known clause family")

        items = [item.strip() for item in body.split("; ")]
        for item in items:
            if item.startswith("and "):
                item = item[4:]
            if not item:
                continue
            if family == "legs":
                for regex, names in _LEG_PARSERS:
                    match = regex.fullmatch(item)
                    if match:
                        values = dict(zip(names, match.groups()))
                        legs.append(TripLeg(
                            _parse_date(values["date"]),
                            values["ap"], values["ap2"]))
                        break
                else:
                    raise UnparsableSegment(text, start, end, f"unknown leg clause {item!r}")
            else:
                for regex, names, clause in _PARSERS[family]:
                    match = regex.fullmatch(item)
                    if match:
                        if clause.field in fields[family]:
                            raise UnparsableSegment(
                                text, start, end, f"duplicate field {clause.field}")
                        fields[family][clause.field] = _parse_clause_value(
                            names, match.groups(), clause)
                        break
                else:
                    raise UnparsableSegment(text, start, end, f"unknown clause {item!r}")

    if not legs:
        raise MissingLegs("no trip legs found in the text")
    kind = TripKind.ONE_WAY if len(legs) == 1 else TripKind.ROUND_TRIP
    return SymbolicRequest(
        legs=tuple(legs),
        airline=AirlineConstraints(**fields["airline"]),  # type: ignore[arg-type]
        hotel=HotelConstraints(**fields["hotel"]),  # type: ignore[arg-type]
        budget=BudgetConstraints(**fields["budget"]),  # type: ignore[arg-type]
        trip_kind=kind,
    )


# ---------------------------------------------------------------------------
# translator backends
# ---------------------------------------------------------------------------

DEFAULT_SYSTEM_PROMPT = (
    "Convert the user's travel request into a single JSON object following "
    "the canonical symbolic request schema. Output only the JSON object.")


@dataclass(frozen=True)
class TranslatorBackend:
    """Template parser by default; set `url` for an external endpoint."""

    url: Optional[str] = None
    model_name: str = ""
    timeout_s: float = 30.0
    max_retries: int = 2
    system_prompt: str = DEFAULT_SYSTEM_PROMPT
    # test seam: replaces the HTTP call, takes the payload, returns raw text
    transport: Optional[Callable[[Dict[str, str]], str]] = None

    def __post_init__(self):
        if self.url is not None and self.timeout_s <= 0:
            raise ValueError("timeout must be positive for external backends")

    @property
    def is_external(self) -> bool:
        return self.url is not None or self.transport is not None


@dataclass(frozen=True)
class TranslateResult:
    request: SymbolicRequest
    raw_output: str
    valid_json: bool  # first-attempt schema validity


def _call_endpoint(backend: TranslatorBackend, payload: Dict[str, str]) -> str:
    if backend.transport is not None:
        return backend.transport(payload)
    import httpx

    try:
        response = httpx.post(backend.url, json=payload, timeout=backend.timeout_s)
        response.raise_for_status()
        return response.text
    except httpx.HTTPError as exc:
        raise EndpointUnreachable(f"translator endpoint failed: {exc}") from None


def translate(text: str, backend: Optional[TranslatorBackend] = None) -> TranslateResult:
    """NL -> symbolic request via the configured backend, with the external
    output schema-validated (the offline analog of constrained decoding)."""
    backend = backend or TranslatorBackend()
    if not backend.is_external:
        request = parse_nl(text)
        return TranslateResult(request, serialize_request(request), valid_json=True)

    payload = {"system": backend.system_prompt, "user": text,
               "model": backend.model_name}
    first_attempt_valid = None
    for _ in range(1 + backend.max_retries):
        raw = _call_endpoint(backend, payload)
        try:
            request = parse_request(raw)
            if first_attempt_valid is None:
                first_attempt_valid = True
            return TranslateResult(request, raw, valid_json=first_attempt_valid)
        except PlanningError:
            if first_attempt_valid is None:
                first_attempt_valid = False
    raise InvalidOutputAfterRetries(
        f"no schema-valid output after {1 + backend.max_retries} attempts")
