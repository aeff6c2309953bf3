"""
Configuration Models

Pydantic models for application settings, decoding parameters and the
per-model cost rate table.
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

# Setup logging
logger = logging.getLogger(__name__)


class BackendKind(str, Enum):
    """Available LLM backends."""
    OPENAI = "openai"
    SCRIPTED = "scripted"


class EmbeddingKind(str, Enum):
    """Available embedding providers."""
    HASHING = "hashing"
    REMOTE = "remote"


class Strategy(str, Enum):
    """Prompting strategies."""
    GUIDED = "guided"
    STANDARD = "standard"
    COT = "cot"


class DecodingParams(BaseModel):
    """Sampling parameters sent with every completion request."""
    model_config = ConfigDict(frozen=True)

    temperature: float = Field(1.0, ge=0.0, le=2.0, description="Sampling temperature")
    top_p: float = Field(1.0, gt=0.0, le=1.0, description="Nucleus sampling mass")
    frequency_penalty: float = Field(0.0, ge=-2.0, le=2.0)
    presence_penalty: float = Field(0.0, ge=-2.0, le=2.0)
    stop: Optional[List[str]] = Field(None, description="Stop sequences; none by default")
    max_tokens: Optional[int] = Field(None, gt=0, description="Output cap; none by default")
    n: int = Field(1, gt=0, description="Completions per request")


class ModelRate(BaseModel):
    """Dollar rates per 1k tokens."""
    prompt: float = Field(..., ge=0.0, description="Per 1k prompt tokens")
    completion: float = Field(..., ge=0.0, description="Per 1k completion tokens")


class RateTable(BaseModel):
    """Model id to token rates."""
    rates: Dict[str, ModelRate] = Field(default_factory=dict)

    def cost(self, model: str, prompt_tokens: int, completion_tokens: int) -> float:
        """
        Dollar cost of a token count.

        Unknown model ids cost nothing and are logged.
        """
        rate = self.rates.get(model)
        if rate is None:
            logger.warning(f"No cost rate for model '{model}'; cost recorded as 0")
            return 0.0
        return prompt_tokens / 1000 * rate.prompt + completion_tokens / 1000 * rate.completion

    @classmethod
    def load(cls, path: Optional[str]) -> "RateTable":
        """Read a JSON rate file; a missing path gives an empty table."""
        if not path:
            return cls()
        file_path = Path(path)
        if not file_path.exists():
            logger.warning(f"Rate file not found: {path}")
            return cls()
        raw = json.loads(file_path.read_text(encoding="utf-8"))
        if "rates" not in raw:
            raw = {"rates": raw}
        return cls.model_validate(raw)


class AppSettings(BaseModel):
    """Settings for the run and eval commands."""
    model: str = Field("gpt-4.1", description="Backend model id")
    budget: int = Field(5, gt=0, description="Maximum loop iterations")
    k: int = Field(3, gt=0, description="Few-shot exemplars retrieved per request")
    kb_path: str = Field("knowledge_base", description="Knowledge-base directory")
    backend: BackendKind = Field(BackendKind.OPENAI)
    backend_url: Optional[str] = Field(None, description="OpenAI-compatible base URL")
    script_path: Optional[str] = Field(None, description="JSONL replies for the scripted backend")
    decoding: DecodingParams = Field(default_factory=DecodingParams)
    parallelism: int = Field(1, gt=0, description="Concurrent suite instances")
    rates_path: Optional[str] = Field(None, description="Cost-rate JSON file")
    embedding: EmbeddingKind = Field(EmbeddingKind.HASHING)
    embedding_url: Optional[str] = Field(None, description="OpenAI-compatible embeddings base URL")
    embedding_model: str = Field("sentence-transformers/all-MiniLM-L6-v2")
    strategy: Strategy = Field(Strategy.GUIDED)
    final_assessment: bool = Field(True, description="Request an assessment after budget exhaustion")
    grammar: bool = Field(True, description="Include the language reference in prompts")
    retrieval: bool = Field(True, description="Add retrieved exemplars to prompts")
    alignment: bool = Field(True, description="Judge compiled attempts before accepting them")
    literate: bool = Field(True, description="Ask for comments and keep them in exemplars")

    class Config:
        """Pydantic configuration."""
        json_schema_extra = {
            "example": {
                "model": "gpt-4.1",
                "budget": 5,
                "k": 3,
                "kb_path": "knowledge_base",
                "backend": "openai",
                "rates_path": "config/rates.example.json",
            }
        }


class SettingsError(Exception):
    """Custom exception for unreadable or invalid settings files."""
    pass


def load_settings(path: str, overrides: Optional[Dict] = None) -> AppSettings:
    """
    Build settings from command-line values and an optional JSON file.

    Values in the file take precedence over the command-line values.

    Args:
        path (str): settings file, may be empty
        overrides (dict, optional): values taken from command-line flags

    Returns:
        AppSettings: validated settings

    Raises:
        SettingsError: if the file is missing or does not validate
    """
    values = {k: v for k, v in (overrides or {}).items() if v is not None}
    if path:
        file_path = Path(path)
        if not file_path.exists():
            raise SettingsError(f"Settings file not found: {path}")
        try:
            values.update(json.loads(file_path.read_text(encoding="utf-8")))
        except json.JSONDecodeError as e:
            raise SettingsError(f"Settings file {path} is not valid JSON: {e}")
    try:
        return AppSettings.model_validate(values)
    except ValidationError as e:
        raise SettingsError(f"Invalid settings: {e}")
