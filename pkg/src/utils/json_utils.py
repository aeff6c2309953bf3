"""
JSON Extraction Utilities

Relaxed extraction of a single JSON object from model output. A fenced code
block is preferred when present; otherwise the first balanced {...} object
in the text is used and any surrounding prose is discarded.
"""

import json
import logging
import re
from typing import Any, Dict, Iterator, List, Optional, Type

from pydantic import BaseModel, ConfigDict, StrictBool, StrictStr, ValidationError

# Setup logging
logger = logging.getLogger(__name__)

_FENCE = re.compile(r"```[ \t]*([A-Za-z0-9_-]*)[ \t]*\r?\n?(.*?)```", re.DOTALL)


class JsonExtractionError(Exception):
    """Custom exception for responses without a usable JSON object."""

    def __init__(self, reason: str, message: str, missing: Optional[List[str]] = None,
                 extra: Optional[List[str]] = None):
        super().__init__(message)
        self.reason = reason
        self.missing = missing or []
        self.extra = extra or []


class GenerationPayload(BaseModel):
    """Generation and revision responses."""
    model_config = ConfigDict(extra="forbid")

    model: StrictStr
    data: StrictStr


class AlignmentPayload(BaseModel):
    """Alignment responses."""
    model_config = ConfigDict(extra="forbid")

    aligned: StrictBool
    assessment: StrictStr


def _fenced_blocks(text: str) -> Iterator[str]:
    for match in _FENCE.finditer(text):
        language = match.group(1).lower()
        if language in ("", "json"):
            yield match.group(2)


def balanced_objects(text: str) -> Iterator[str]:
    """
    Yield every top-level balanced {...} span in order.

    Brace counting skips string literals and their escapes.
    """
    depth = 0
    start = -1
    in_string = False
    escape_next = False
    for i, char in enumerate(text):
        if in_string:
            if escape_next:
                escape_next = False
            elif char == "\\":
                escape_next = True
            elif char == '"':
                in_string = False
            continue
        if char == '"':
            # quotes only delimit strings inside an object
            if depth > 0:
                in_string = True
        elif char == "{":
            if depth == 0:
                start = i
            depth += 1
        elif char == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                yield text[start:i + 1]
    if depth > 0:
        raise JsonExtractionError("unbalanced", "Unbalanced braces in JSON object")


def _first_object(text: str) -> Dict[str, Any]:
    found = False
    try:
        for candidate in balanced_objects(text):
            found = True
            try:
                value = json.loads(candidate)
            except json.JSONDecodeError:
                continue
            if isinstance(value, dict):
                return value
    except JsonExtractionError:
        if not found:
            raise
    if not found:
        raise JsonExtractionError("no_object", "No JSON object found in response")
    raise JsonExtractionError("invalid_json", "No balanced object parses as JSON")


def extract_json_object(text: str, schema: Optional[Type[BaseModel]] = None) -> Dict[str, Any]:
    """
    Extract the JSON object carried by a response.

    Args:
        text (str): raw completion text
        schema (type, optional): pydantic model the object must match exactly

    Returns:
        dict: the parsed object

    Raises:
        JsonExtractionError: when no object parses or the keys or types do not match
    """
    obj: Optional[Dict[str, Any]] = None
    # Step 1: fenced blocks first
    for block in _fenced_blocks(text or ""):
        try:
            obj = _first_object(block)
            break
        except JsonExtractionError:
            continue
    # Step 2: first balanced object anywhere
    if obj is None:
        obj = _first_object(text or "")

    if schema is not None:
        validate_payload(obj, schema)
    return obj


def validate_payload(obj: Dict[str, Any], schema: Type[BaseModel]) -> BaseModel:
    """Validate an object against a payload model, naming missing and extra keys."""
    expected = set(schema.model_fields)
    missing = sorted(expected - set(obj))
    extra = sorted(set(obj) - expected)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing keys {missing}")
        if extra:
            parts.append(f"unexpected keys {extra}")
        raise JsonExtractionError("schema", "Schema mismatch: " + ", ".join(parts), missing, extra)
    try:
        return schema.model_validate(obj)
    except ValidationError as e:
        fields = sorted({str(err["loc"][0]) for err in e.errors() if err.get("loc")})
        raise JsonExtractionError("schema", f"Wrong value types for keys {fields}")
