"""
Knowledge Base Models

Exemplar triplets and the embedded knowledge base used for few-shot retrieval.
"""

from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Exemplar(BaseModel):
    """A description/model/data triplet."""
    model_config = ConfigDict(frozen=True)

    id: str = Field(..., description="Path relative to the knowledge-base root, without suffix")
    description: str = Field(..., description="Problem description (.txt)")
    model: str = Field(..., description="Model text (.mod)")
    data: str = Field(..., description="Data text (.dat)")
    source_paths: List[str] = Field(default_factory=list)

    @field_validator("description", "model", "data")
    @classmethod
    def _non_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("exemplar texts must be non-empty")
        return v


class KnowledgeBase(BaseModel):
    """Exemplars with one unit-norm vector each."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    provider_id: str = Field(..., description="Embedding provider identifier")
    dimension: int = Field(..., gt=0)
    exemplars: List[Exemplar] = Field(default_factory=list)
    vectors: np.ndarray = Field(..., description="Row i embeds exemplars[i]")

    @model_validator(mode="after")
    def _one_vector_per_exemplar(self) -> "KnowledgeBase":
        if self.vectors.shape != (len(self.exemplars), self.dimension):
            raise ValueError(f"expected vectors of shape ({len(self.exemplars)}, {self.dimension}), "
                             f"got {self.vectors.shape}")
        return self

    def __len__(self) -> int:
        return len(self.exemplars)


class ScoredExemplar(BaseModel):
    """A retrieval hit."""
    exemplar: Exemplar
    score: float = Field(..., ge=-1.0 - 1e-9, le=1.0 + 1e-9, description="Cosine similarity")
