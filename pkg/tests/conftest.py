"""
Shared fixtures: the aircraft-landing model pair, scripted backend replies
and paths to the bundled knowledge base.
"""

import json
import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.services.ai_service import ScriptedBackend, ScriptedReply  # noqa: E402

FIXTURES = Path(__file__).resolve().parent / "fixtures"
KNOWLEDGE_BASE = ROOT / "knowledge_base"

ALP_PROBLEM = (
    "Three aircraft A1, A2 and A3 must land in that order. Each has an earliest, latest and "
    "target landing time and a separation to keep from the aircraft landing before it. "
    "Landing early or late costs a penalty per minute. Minimise the total penalty."
)


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def generation_reply(model: str, data: str, prompt_tokens: int = 100, completion_tokens: int = 50) -> ScriptedReply:
    """A generation or revision reply wrapped in a json fence."""
    payload = json.dumps({"model": model, "data": data})
    return ScriptedReply(text=f"```json\n{payload}\n```", prompt_tokens=prompt_tokens,
                         completion_tokens=completion_tokens)


def alignment_reply(aligned: bool, assessment: str = "The model matches the problem.",
                    prompt_tokens: int = 80, completion_tokens: int = 20) -> ScriptedReply:
    payload = json.dumps({"aligned": aligned, "assessment": assessment})
    return ScriptedReply(text=payload, prompt_tokens=prompt_tokens, completion_tokens=completion_tokens)


def write_script(path: Path, replies) -> Path:
    """Write replies as a JSONL script for the scripted backend."""
    with open(path, "w", encoding="utf-8") as f:
        for reply in replies:
            f.write(reply.model_dump_json() + "\n")
    return path


@pytest.fixture
def alp_model() -> str:
    return read_fixture("alp.mod")


@pytest.fixture
def alp_data() -> str:
    return read_fixture("alp.dat")


@pytest.fixture
def alp_chained_model() -> str:
    return read_fixture("alp_chained.mod")


@pytest.fixture
def alp_trace(alp_model, alp_data, alp_chained_model):
    """Chained comparison first, corrected model second, then an aligned verdict."""
    return [
        generation_reply(alp_chained_model, alp_data, 1000, 400),
        generation_reply(alp_model, alp_data, 1500, 450),
        alignment_reply(True, "Windows, separation and penalties match the description.", 1200, 60),
    ]


@pytest.fixture
def scripted_alp_backend(alp_trace) -> ScriptedBackend:
    return ScriptedBackend(alp_trace)


@pytest.fixture
def clean_env(monkeypatch):
    """Remove environment settings that would leak into command defaults."""
    for name in ("OPLFORGE_MODEL", "OPLFORGE_KB_PATH", "OPLFORGE_RATES_PATH", "OPLFORGE_SUITE_DIR",
                 "OPENAI_API_KEY", "OPENAI_BASE_URL"):
        monkeypatch.delenv(name, raising=False)
    return os.environ
