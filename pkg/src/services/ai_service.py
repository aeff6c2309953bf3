"""
AI Service for LLM Backends

This module defines the backend contract used by the modelling loop and its
two adapters: an OpenAI-compatible chat-completions client and a scripted
backend that replays canned replies for tests and offline runs.
"""

import asyncio
import json
import logging
import math
import os
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import openai
from dotenv import load_dotenv
from openai import AsyncOpenAI
from pydantic import BaseModel, Field
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..models.config import AppSettings, BackendKind, DecodingParams
from ..models.loop import BackendResponse

# Load environment variables
load_dotenv()

# Setup logging
logger = logging.getLogger(__name__)

TRANSIENT_ERRORS = (
    openai.APIConnectionError,
    openai.RateLimitError,
    openai.InternalServerError,
)


class BackendError(Exception):
    """Custom exception for backend transport or API failures."""
    pass


class BackendAuthError(BackendError):
    """Missing or rejected API credentials."""
    pass


class ScriptExhausted(BackendError):
    """The scripted backend has no replies left."""
    pass


def estimate_tokens(text: str) -> int:
    """Deterministic token estimate used when a backend reports no usage."""
    return math.ceil(len(text or "") / 4)


class LLMBackend(ABC):
    """Text completion contract used by the modelling loop."""

    model: str = "unknown"

    @abstractmethod
    async def complete(self, system: str, user: str, params: DecodingParams) -> BackendResponse:
        """
        Run one completion.

        Args:
            system (str): system text, skipped when empty
            user (str): user text
            params (DecodingParams): sampling parameters

        Returns:
            BackendResponse: text, token usage and latency

        Raises:
            BackendError: if the request fails after retries
        """


class OpenAIChatBackend(LLMBackend):
    """Backend for OpenAI-compatible chat-completions endpoints."""

    def __init__(self, api_key: Optional[str] = None, model: str = "gpt-4.1",
                 base_url: Optional[str] = None, min_request_interval: float = 1.0):
        """
        Initialize the chat backend.

        Args:
            api_key (str, optional): API key, defaults to OPENAI_API_KEY
            model (str): model id sent with each request
            base_url (str, optional): endpoint, defaults to OPENAI_BASE_URL
            min_request_interval (float): minimum seconds between requests

        Raises:
            BackendAuthError: if no API key is configured
        """
        self.api_key = api_key or os.getenv("OPENAI_API_KEY")
        self.model = model
        self.base_url = base_url or os.getenv("OPENAI_BASE_URL") or None

        if not self.api_key or self.api_key == "your_openai_api_key_here":
            raise BackendAuthError("OPENAI_API_KEY is not set. Export it or add it to the .env file.")

        self.client = AsyncOpenAI(api_key=self.api_key, base_url=self.base_url)

        # Rate limiting and token tracking
        self.last_request_time = 0.0
        self.min_request_interval = min_request_interval
        self._lock = asyncio.Lock()
        self.token_usage = {
            "total_tokens": 0,
            "prompt_tokens": 0,
            "completion_tokens": 0
        }

    async def _rate_limit(self):
        """Space requests at least min_request_interval apart."""
        async with self._lock:
            elapsed = time.time() - self.last_request_time
            if elapsed < self.min_request_interval:
                await asyncio.sleep(self.min_request_interval - elapsed)
            self.last_request_time = time.time()

    def _update_token_usage(self, prompt_tokens: int, completion_tokens: int):
        self.token_usage["prompt_tokens"] += prompt_tokens
        self.token_usage["completion_tokens"] += completion_tokens
        self.token_usage["total_tokens"] += prompt_tokens + completion_tokens

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=1, min=4, max=10),
        retry=retry_if_exception_type(TRANSIENT_ERRORS),
        reraise=True,
    )
    async def _make_completion_request(self, messages: List[Dict[str, str]], params: DecodingParams) -> Any:
        """Chat-completions call, retried on transient errors."""
        await self._rate_limit()

        completion_kwargs = {
            "model": self.model,
            "messages": messages,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "frequency_penalty": params.frequency_penalty,
            "presence_penalty": params.presence_penalty,
            "n": params.n,
        }
        if params.stop:
            completion_kwargs["stop"] = params.stop
        if params.max_tokens:
            completion_kwargs["max_tokens"] = params.max_tokens

        try:
            return await self.client.chat.completions.create(**completion_kwargs)
        except TRANSIENT_ERRORS as e:
            logger.warning(f"Transient backend error, retrying: {e}")
            raise

    async def complete(self, system: str, user: str, params: DecodingParams) -> BackendResponse:
        messages = []
        if system:
            messages.append({"role": "system", "content": system})
        messages.append({"role": "user", "content": user})

        start = time.monotonic()
        try:
            response = await self._make_completion_request(messages, params)
        except (openai.AuthenticationError, openai.PermissionDeniedError) as e:
            logger.error(f"Backend rejected credentials: {e}")
            raise BackendAuthError(f"Backend rejected the OPENAI_API_KEY credentials: {e}")
        except openai.OpenAIError as e:
            logger.error(f"Backend request failed: {e}")
            raise BackendError(f"Failed to get completion from {self.model}: {str(e)}")
        latency = time.monotonic() - start

        text = (response.choices[0].message.content or "") if response.choices else ""
        usage = getattr(response, "usage", None)
        if usage is not None and usage.prompt_tokens is not None:
            prompt_tokens, completion_tokens, estimated = usage.prompt_tokens, usage.completion_tokens or 0, False
        else:
            prompt_tokens = estimate_tokens(system) + estimate_tokens(user)
            completion_tokens = estimate_tokens(text)
            estimated = True
        self._update_token_usage(prompt_tokens, completion_tokens)

        return BackendResponse(text=text, prompt_tokens=prompt_tokens, completion_tokens=completion_tokens,
                               latency=latency, estimated=estimated)

    def get_usage_stats(self) -> Dict[str, Any]:
        """
        Get API usage statistics.

        Returns:
            dict: Usage statistics
        """
        return {
            "token_usage": self.token_usage.copy(),
            "model": self.model,
            "base_url": self.base_url,
        }


class ScriptedReply(BaseModel):
    """One canned reply; missing token counts are estimated."""
    text: str = Field(..., description="Completion text")
    prompt_tokens: Optional[int] = Field(None, ge=0)
    completion_tokens: Optional[int] = Field(None, ge=0)


class ScriptedBackend(LLMBackend):
    """Replays canned replies in order and records every request."""

    def __init__(self, replies: List[Union[str, ScriptedReply]], model: str = "scripted"):
        self.replies = [r if isinstance(r, ScriptedReply) else ScriptedReply(text=r) for r in replies]
        self.model = model
        self.requests: List[Dict[str, Any]] = []
        self._cursor = 0

    @property
    def remaining(self) -> int:
        return len(self.replies) - self._cursor

    async def complete(self, system: str, user: str, params: DecodingParams) -> BackendResponse:
        self.requests.append({"system": system, "user": user, "params": params})
        if self._cursor >= len(self.replies):
            raise ScriptExhausted(f"Scripted backend ran out of replies after {len(self.replies)} requests")
        reply = self.replies[self._cursor]
        self._cursor += 1

        estimated = reply.prompt_tokens is None or reply.completion_tokens is None
        prompt_tokens = reply.prompt_tokens
        if prompt_tokens is None:
            prompt_tokens = estimate_tokens(system) + estimate_tokens(user)
        completion_tokens = reply.completion_tokens
        if completion_tokens is None:
            completion_tokens = estimate_tokens(reply.text)
        return BackendResponse(text=reply.text, prompt_tokens=prompt_tokens,
                               completion_tokens=completion_tokens, latency=0.0, estimated=estimated)


def load_script(path: str) -> List[ScriptedReply]:
    """
    Read scripted replies from a JSONL file.

    Each line is either a JSON string or an object with "text" and optional
    "prompt_tokens" and "completion_tokens".

    Raises:
        FileNotFoundError: if the file does not exist
        BackendError: if a line is malformed
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Script file not found: {path}")
    replies = []
    for number, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            replies.append(ScriptedReply(text=raw) if isinstance(raw, str) else ScriptedReply.model_validate(raw))
        except (json.JSONDecodeError, ValueError) as e:
            raise BackendError(f"Malformed script line {number} in {path}: {e}")
    logger.info(f"Loaded {len(replies)} scripted replies from {path}")
    return replies


def create_backend(settings: AppSettings) -> LLMBackend:
    """
    Build the backend named in the settings.

    Raises:
        BackendAuthError: for the OpenAI backend without an API key
        FileNotFoundError: for the scripted backend without a script file
    """
    if settings.backend == BackendKind.SCRIPTED:
        if not settings.script_path:
            raise FileNotFoundError("The scripted backend needs a script file (--script)")
        return ScriptedBackend(load_script(settings.script_path), model=settings.model)
    return OpenAIChatBackend(model=settings.model, base_url=settings.backend_url)
