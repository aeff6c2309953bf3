"""
Retrieval Service

This module indexes the knowledge base of description/model/data triplets
and returns the exemplars closest to a query by cosine similarity over
L2-normalised embeddings.
"""

import hashlib
import json
import logging
import os
import re
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional, Sequence

import httpx
import numpy as np
from dotenv import load_dotenv
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..aml.lexer import strip_comments
from ..models.diagnostics import SourceKind
from ..models.knowledge import Exemplar, KnowledgeBase, ScoredExemplar

load_dotenv()

# Setup logging
logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
VECTORS_FILE = "vectors.npy"
GUIDANCE = "Use these solved examples for reference only; treat exemplars as guidance rather than templates (e.g., avoid copying variable names)."

_TOKEN = re.compile(r"[a-z0-9]+")


class KnowledgeBaseError(Exception):
    """Custom exception for unusable knowledge-base directories."""
    pass


def _normalize(matrix: np.ndarray) -> np.ndarray:
    """Scale rows to unit L2 norm; an all-zero row becomes uniform."""
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    zero = norms[:, 0] == 0.0
    if np.any(zero):
        matrix = matrix.copy()
        matrix[zero] = 1.0
        norms[zero] = np.sqrt(matrix.shape[1])
    return matrix / norms


class EmbeddingProvider(ABC):
    """Text to fixed-dimension vector contract."""

    provider_id: str
    dimension: int

    @abstractmethod
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Return one unit-norm row per text."""


class HashingEmbedding(EmbeddingProvider):
    """Deterministic feature-hashing embedding; needs no model weights."""

    def __init__(self, dimension: int = 256):
        self.dimension = dimension
        self.provider_id = f"hashing-{dimension}"

    def _vector(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dimension)
        for token in _TOKEN.findall(text.lower()):
            digest = hashlib.md5(token.encode("utf-8")).digest()
            index = int.from_bytes(digest[:4], "little") % self.dimension
            sign = 1.0 if digest[4] & 1 else -1.0
            vector[index] += sign
        return vector

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        return _normalize(np.vstack([self._vector(t) for t in texts]))


class RemoteEmbedding(EmbeddingProvider):
    """Embeddings from an OpenAI-compatible /embeddings endpoint."""

    def __init__(self, base_url: Optional[str] = None, model: str = "sentence-transformers/all-MiniLM-L6-v2",
                 api_key: Optional[str] = None, dimension: int = 384, timeout: float = 30.0):
        self.base_url = (base_url or os.getenv("OPENAI_BASE_URL") or "https://api.openai.com/v1").rstrip("/")
        self.model = model
        self.api_key = api_key or os.getenv("OPENAI_API_KEY")
        self.dimension = dimension
        self.provider_id = f"remote-{model}"
        self.timeout = timeout

    @retry(
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=1, min=4, max=10),
        retry=retry_if_exception_type((httpx.TransportError, httpx.HTTPStatusError)),
        reraise=True,
    )
    def _request(self, texts: List[str]) -> List[List[float]]:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        response = httpx.post(f"{self.base_url}/embeddings", json={"model": self.model, "input": texts},
                              headers=headers, timeout=self.timeout)
        response.raise_for_status()
        items = sorted(response.json()["data"], key=lambda item: item["index"])
        return [item["embedding"] for item in items]

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dimension))
        try:
            matrix = np.asarray(self._request(list(texts)), dtype=np.float64)
        except (httpx.HTTPError, KeyError, ValueError) as e:
            raise KnowledgeBaseError(f"Embedding request to {self.base_url} failed: {e}")
        if matrix.ndim != 2 or matrix.shape[1] != self.dimension:
            raise KnowledgeBaseError(f"Embedding endpoint returned shape {matrix.shape}, "
                                     f"expected dimension {self.dimension}")
        return _normalize(matrix)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise KnowledgeBaseError(f"Cannot read {path}: {e}")


def scan_exemplars(root: str) -> List[Exemplar]:
    """
    Collect complete triplets under a directory tree.

    Raises:
        KnowledgeBaseError: if the directory is missing or empty, or a file is unreadable
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise KnowledgeBaseError(f"Knowledge-base directory not found: {root}")
    if not any(p.is_file() for p in root_path.rglob("*")):
        raise KnowledgeBaseError(f"Knowledge-base directory is empty: {root}")

    exemplars = []
    for description_path in sorted(root_path.rglob("*.txt")):
        model_path = description_path.with_suffix(".mod")
        data_path = description_path.with_suffix(".dat")
        missing = [p.suffix for p in (model_path, data_path) if not p.is_file()]
        if missing:
            logger.warning(f"Skipping incomplete triplet {description_path} (missing {', '.join(missing)})")
            continue
        texts = [_read(p) for p in (description_path, model_path, data_path)]
        if not all(t.strip() for t in texts):
            logger.warning(f"Skipping triplet {description_path} with an empty file")
            continue
        exemplar_id = description_path.relative_to(root_path).with_suffix("").as_posix()
        exemplars.append(Exemplar(
            id=exemplar_id,
            description=texts[0],
            model=texts[1],
            data=texts[2],
            source_paths=[str(description_path), str(model_path), str(data_path)],
        ))
    return exemplars


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _load_cache(root: Path, provider: EmbeddingProvider, exemplars: List[Exemplar]) -> Optional[np.ndarray]:
    manifest_path, vectors_path = root / MANIFEST_FILE, root / VECTORS_FILE
    if not manifest_path.exists() or not vectors_path.exists():
        return None
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        expected = {
            "provider": provider.provider_id,
            "dimension": provider.dimension,
            "ids": [e.id for e in exemplars],
            "digests": [_digest(e.description) for e in exemplars],
        }
        if any(manifest.get(key) != value for key, value in expected.items()):
            logger.info("Knowledge-base cache is stale; re-embedding")
            return None
        vectors = np.load(vectors_path)
    except (OSError, ValueError) as e:
        logger.warning(f"Ignoring unreadable knowledge-base cache: {e}")
        return None
    if vectors.shape != (len(exemplars), provider.dimension):
        return None
    return vectors


def _write_cache(root: Path, provider: EmbeddingProvider, exemplars: List[Exemplar], vectors: np.ndarray):
    manifest = {
        "provider": provider.provider_id,
        "dimension": provider.dimension,
        "ids": [e.id for e in exemplars],
        "digests": [_digest(e.description) for e in exemplars],
    }
    try:
        (root / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2), encoding="utf-8")
        np.save(root / VECTORS_FILE, vectors)
    except OSError as e:
        logger.warning(f"Could not write knowledge-base cache: {e}")


def index_knowledge_base(root: str, provider: Optional[EmbeddingProvider] = None,
                         use_cache: bool = False) -> KnowledgeBase:
    """
    Embed every complete triplet's description.

    Args:
        root (str): knowledge-base directory
        provider (EmbeddingProvider, optional): defaults to the 256-dimension hashing embedding
        use_cache (bool): read and write manifest.json and vectors.npy in the root

    Returns:
        KnowledgeBase: one unit vector per exemplar

    Raises:
        KnowledgeBaseError: empty directory or unreadable file
    """
    provider = provider or HashingEmbedding()
    exemplars = scan_exemplars(root)

    vectors = _load_cache(Path(root), provider, exemplars) if use_cache and exemplars else None
    if vectors is None:
        vectors = provider.embed([e.description for e in exemplars])
        if use_cache and exemplars:
            _write_cache(Path(root), provider, exemplars, vectors)
    if not exemplars:
        vectors = np.zeros((0, provider.dimension))

    logger.info(f"Indexed {len(exemplars)} exemplars from {root} with {provider.provider_id}")
    return KnowledgeBase(provider_id=provider.provider_id, dimension=provider.dimension,
                         exemplars=exemplars, vectors=vectors)


def top_k(kb: KnowledgeBase, query: str, k: int,
          provider: Optional[EmbeddingProvider] = None) -> List[ScoredExemplar]:
    """
    Most similar exemplars, score descending, ties by exemplar id.

    Args:
        kb (KnowledgeBase): indexed knowledge base
        query (str): problem description
        k (int): number of results, at least 1
        provider (EmbeddingProvider, optional): must match the one used for indexing

    Returns:
        list: min(k, len(kb)) scored exemplars
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(kb) == 0:
        return []
    provider = provider or HashingEmbedding(kb.dimension)
    if provider.provider_id != kb.provider_id:
        raise ValueError(f"query provider {provider.provider_id} does not match index provider {kb.provider_id}")
    query_vector = provider.embed([query])[0]
    scores = np.clip(kb.vectors @ query_vector, -1.0, 1.0)
    order = sorted(range(len(kb)), key=lambda i: (-float(scores[i]), kb.exemplars[i].id))
    return [ScoredExemplar(exemplar=kb.exemplars[i], score=float(scores[i])) for i in order[:k]]


def format_few_shot_block(results: Sequence[ScoredExemplar], literate: bool = True) -> str:
    """
    Render retrieved triplets inside a few-shot block; no results give an empty string.

    Triplets are verbatim unless literate is off, in which case model and data
    comments are stripped.
    """
    if not results:
        return ""
    parts = ["<few_shot_examples>", GUIDANCE, ""]
    for n, hit in enumerate(results, start=1):
        exemplar = hit.exemplar
        model, data = exemplar.model, exemplar.data
        if not literate:
            model = strip_comments(model, SourceKind.MODEL)
            data = strip_comments(data, SourceKind.DATA)
        parts.extend([
            f'<example index="{n}" id="{exemplar.id}">',
            "<description>",
            exemplar.description.rstrip("\n"),
            "</description>",
            "<model>",
            model.rstrip("\n"),
            "</model>",
            "<data>",
            data.rstrip("\n"),
            "</data>",
            "</example>",
            "",
        ])
    parts.append("</few_shot_examples>")
    return "\n".join(parts)


def create_provider(kind: str = "hashing", url: Optional[str] = None,
                    model: str = "sentence-transformers/all-MiniLM-L6-v2") -> EmbeddingProvider:
    """Provider named by settings."""
    if kind == "remote":
        return RemoteEmbedding(base_url=url, model=model)
    return HashingEmbedding()
