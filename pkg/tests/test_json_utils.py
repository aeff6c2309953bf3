"""
Tests for relaxed JSON extraction from model output.
"""

import json
import random

import pytest

from src.utils.json_utils import (
    AlignmentPayload, GenerationPayload, JsonExtractionError, balanced_objects, extract_json_object,
)

EXTRACTED = [
    ('{"a": 1}', {"a": 1}),
    ('  {"a": 1}  ', {"a": 1}),
    ('Here you go: {"a": 1} Hope it helps.', {"a": 1}),
    ('```json\n{"a": 1}\n```', {"a": 1}),
    ('```JSON\n{"a": 1}\n```', {"a": 1}),
    ('```\n{"a": 1}\n```', {"a": 1}),
    ('```json {"a": 1}```', {"a": 1}),
    ('Intro\n```json\n{"a": 1}\n```\nOutro', {"a": 1}),
    ('```json\n{"a": 1}\n```\n```json\n{"a": 2}\n```', {"a": 1}),
    ('```python\nx = 1\n```\n{"a": 4}', {"a": 4}),
    ('```json\nnot json at all\n```\n{"a": 5}', {"a": 5}),
    ('{"a": {"b": {"c": 1}}}', {"a": {"b": {"c": 1}}}),
    ('{"model": "x { y", "data": "}"}', {"model": "x { y", "data": "}"}),
    ('{"model": "say \\"hi\\" {", "data": ""}', {"model": 'say "hi" {', "data": ""}),
    ('{"s": "back\\\\slash"}', {"s": "back\\slash"}),
    ('{not json} {"a": 6}', {"a": 6}),
    ('[{"a": 7}]', {"a": 7}),
    ('{"a": [1, 2, {"b": 3}]}', {"a": [1, 2, {"b": 3}]}),
    ('{"a": null, "b": true, "c": 1.5}', {"a": None, "b": True, "c": 1.5}),
    ('{"unicode": "caf\\u00e9"}', {"unicode": "café"}),
    ('{"a": 1}\n{"a": 2}', {"a": 1}),
    ('{"a": 1} trailing {', {"a": 1}),
    ('}{"a": 8}', {"a": 8}),
    ('{\n  "model": "line1\\nline2",\n  "data": "n = 3;"\n}', {"model": "line1\nline2", "data": "n = 3;"}),
    ('{}', {}),
    ('```json\r\n{"a": 9}\r\n```', {"a": 9}),
]

FAILURES = [
    ("", "no_object"),
    ("no json here", "no_object"),
    ("```json\n```", "no_object"),
    ('["a", "b"]', "no_object"),
    ('{"a": 1', "unbalanced"),
    ('{"a": {"b": 2}', "unbalanced"),
    ("{not json}", "invalid_json"),
    ("{'a': 1}", "invalid_json"),
    ('{"a": 1,}', "invalid_json"),
]


@pytest.mark.parametrize("text,expected", EXTRACTED)
def test_extracts_object(text, expected):
    assert extract_json_object(text) == expected


@pytest.mark.parametrize("text,reason", FAILURES)
def test_extraction_failures(text, reason):
    with pytest.raises(JsonExtractionError) as info:
        extract_json_object(text)
    assert info.value.reason == reason


def test_none_text_has_no_object():
    with pytest.raises(JsonExtractionError) as info:
        extract_json_object(None)
    assert info.value.reason == "no_object"


def test_balanced_objects_yields_each_top_level_span():
    assert list(balanced_objects('a {"x": 1} b {"y": {"z": 2}} c')) == ['{"x": 1}', '{"y": {"z": 2}}']


def test_balanced_objects_ignores_braces_in_strings():
    assert list(balanced_objects('{"k": "}}}"}')) == ['{"k": "}}}"}']


# Payload schemas

GENERATION_OK = [
    '{"model": "dvar float x;", "data": ""}',
    '```json\n{"model": "m", "data": "d"}\n```',
    'Sure!\n{"data": "d", "model": "m"}',
]


@pytest.mark.parametrize("text", GENERATION_OK)
def test_generation_payload_accepted(text):
    obj = extract_json_object(text, GenerationPayload)
    assert set(obj) == {"model", "data"}


@pytest.mark.parametrize("text,missing,extra", [
    ('{"model": "m"}', ["data"], []),
    ('{"data": "d"}', ["model"], []),
    ('{}', ["data", "model"], []),
    ('{"model": "m", "data": "d", "notes": "x"}', [], ["notes"]),
    ('{"mod": "m", "data": "d"}', ["model"], ["mod"]),
])
def test_generation_payload_key_mismatch(text, missing, extra):
    with pytest.raises(JsonExtractionError) as info:
        extract_json_object(text, GenerationPayload)
    assert info.value.reason == "schema"
    assert info.value.missing == missing
    assert info.value.extra == extra


@pytest.mark.parametrize("text,bad", [
    ('{"model": 1, "data": "d"}', "model"),
    ('{"model": "m", "data": ["a"]}', "data"),
    ('{"model": null, "data": "d"}', "model"),
])
def test_generation_payload_wrong_types(text, bad):
    with pytest.raises(JsonExtractionError) as info:
        extract_json_object(text, GenerationPayload)
    assert info.value.reason == "schema"
    assert f"'{bad}'" in str(info.value)


def test_alignment_payload():
    obj = extract_json_object('{"aligned": false, "assessment": "Missing the budget row."}', AlignmentPayload)
    assert obj == {"aligned": False, "assessment": "Missing the budget row."}


@pytest.mark.parametrize("text", [
    '{"aligned": "true", "assessment": "ok"}',
    '{"aligned": 1, "assessment": "ok"}',
    '{"aligned": true}',
    '{"aligned": true, "assessment": "ok", "score": 3}',
])
def test_alignment_payload_rejected(text):
    with pytest.raises(JsonExtractionError) as info:
        extract_json_object(text, AlignmentPayload)
    assert info.value.reason == "schema"


PROSE = [
    "Here is the model you asked for.",
    "Sure! I fixed the chained comparison {as requested}.",
    "Note: a stray } before the object is harmless.",
    'The "answer" follows:',
    "",
]


@pytest.mark.parametrize("seed", range(30))
def test_random_prose_wrappers(seed):
    rng = random.Random(seed)
    payload = {"model": "subject to { c: x >= " + str(seed) + "; }", "data": "n = {1, 2};"}
    body = json.dumps(payload, indent=rng.choice([None, 2]))
    if rng.random() < 0.5:
        body = f"```{rng.choice(['json', 'JSON', ''])}\n{body}\n```"
    text = f"{rng.choice(PROSE)}\n{body}\n{rng.choice(PROSE)}"
    assert extract_json_object(text, GenerationPayload) == payload
