"""Grammar round-tripping, rendering completeness, translator backends."""

import json
from datetime import date

import pytest

from tripsolve.datagen import GenParams, gen_request
from tripsolve.evaluate import corrupt_request
from tripsolve.model import (
    SymbolicRequest,
    TripKind,
    TripLeg,
    exact_match,
    serialize_request,
)
from tripsolve.nl import (
    NUM_VARIANT_SCHEMES,
    InvalidOutputAfterRetries,
    MissingLegs,
    TranslatorBackend,
    UnparsableSegment,
    parse_nl,
    render_nl,
    translate,
)
from .test_model import demo_request


class TestRenderNl:
    def test_demo_request_mentions_everything(self):
        text = render_nl(demo_request(), variant_seed=0)
        for token in ("coach", "non-stop", "1383", "317", "952",
                      "January 15th, 2025", "January 17th, 2025",
                      "January 18th, 2025", "DEN", "MIA", "JFK"):
            assert token in text, (token, text)

    def test_minimal_request_is_legs_only(self):
        r = SymbolicRequest(legs=(TripLeg(date(2025, 3, 1), "SEA", "LAX"),),
                            trip_kind=TripKind.ONE_WAY)
        for seed in range(NUM_VARIANT_SCHEMES):
            text = render_nl(r, seed)
            assert text.count(".") == 1  # a single sentence
            assert "SEA" in text and "LAX" in text

    def test_deterministic(self):
        r = demo_request()
        assert render_nl(r, 2) == render_nl(r, 2)

    def test_seeds_give_distinct_paraphrases(self):
        r = demo_request()
        texts = {render_nl(r, seed) for seed in range(NUM_VARIANT_SCHEMES)}
        assert len(texts) == NUM_VARIANT_SCHEMES

    def test_every_present_field_leaves_a_trace(self):
        # dropping any present optional field must change the rendering
        params = GenParams(rng_seed=31)
        for i in range(25):
            r = gen_request(params, i)
            base = render_nl(r, 1)
            for section in ("airline", "hotel", "budget"):
                for field in getattr(r, section).present_fields():
                    dropped = corrupt_request(r, f"{section}.{field}", action="drop")
                    assert render_nl(dropped, 1) != base, f"{section}.{field}"


class TestParseNl:
    def test_round_trip_over_generated_corpus(self):
        params = GenParams(rng_seed=37)
        for i in range(300):
            r = gen_request(params, i)
            for seed in range(NUM_VARIANT_SCHEMES):
                recovered = parse_nl(render_nl(r, seed))
                assert exact_match(r, recovered).is_match, (i, seed)

    def test_empty_string(self):
        with pytest.raises(MissingLegs):
            parse_nl("")

    def test_unknown_trailing_clause_reports_span(self):
        text = render_nl(demo_request(), 0) + " Bring me a sandwich too."
        with pytest.raises(UnparsableSegment) as err:
            parse_nl(text)
        assert "sandwich" in err.value.segment

    def test_unknown_clause_inside_family(self):
        r = demo_request()
        text = render_nl(r, 0).replace("coach class", "a roomy seat please")
        with pytest.raises(UnparsableSegment):
            parse_nl(text)


class TestTranslate:
    def test_template_backend_matches_parse_nl(self):
        text = render_nl(demo_request(), 1)
        result = translate(text)
        assert result.valid_json is True
        assert exact_match(result.request, parse_nl(text)).is_match
        assert result.raw_output == serialize_request(result.request)

    def test_external_retry_records_first_attempt_validity(self):
        good = serialize_request(demo_request())
        outputs = [good[: len(good) // 2], good]  # truncated, then valid

        def transport(payload):
            return outputs.pop(0)

        backend = TranslatorBackend(url="http://example.invalid/translate",
                                    max_retries=2, transport=transport)
        result = translate("whatever", backend)
        assert result.valid_json is False
        assert exact_match(result.request, demo_request()).is_match

    def test_external_always_invalid_exhausts_retries(self):
        calls = []

        def transport(payload):
            calls.append(1)
            return "{not json"

        backend = TranslatorBackend(url="http://example.invalid/translate",
                                    max_retries=2, transport=transport)
        with pytest.raises(InvalidOutputAfterRetries):
            translate("whatever", backend)
        assert len(calls) == 3  # first attempt + two retries

    def test_external_payload_carries_prompt_and_text(self):
        seen = {}

        def transport(payload):
            seen.update(payload)
            return serialize_request(demo_request())

        backend = TranslatorBackend(url="http://example.invalid/translate",
                                    model_name="demo-model", transport=transport)
        translate("plan my trip", backend)
        assert seen["user"] == "plan my trip"
        assert seen["model"] == "demo-model"
        assert "JSON" in seen["system"]

    def test_accepted_output_is_schema_valid(self):
        # validator soundness: whatever translate returns parses as a request
        text = render_nl(demo_request(), 3)
        result = translate(text)
        assert isinstance(result.request, SymbolicRequest)
        json.loads(result.raw_output)
