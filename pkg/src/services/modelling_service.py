"""
Modelling Loop Service

Main orchestration for turning a problem description into a compiled model:
generate a model/data pair, compile it, ask the judge whether it matches the
problem, and revise until both checks pass or the iteration budget runs out.
"""

import json
import logging
import time
from pathlib import Path
from typing import List, Optional

from .ai_service import LLMBackend
from .prompts import build_alignment_prompt, build_generation_prompt, build_revision_prompt
from .retrieval_service import EmbeddingProvider, format_few_shot_block, top_k
from ..aml.catalog import make_diagnostic
from ..aml.compiler import compile_model
from ..models.config import DecodingParams, RateTable, Strategy
from ..models.knowledge import KnowledgeBase
from ..models.loop import (
    AlignmentVerdict, Attempt, BackendExchange, BackendResponse, ExchangeKind, IterationRecord,
    LoopOutcome, LoopResult, RevisionKind, TaskContext, Telemetry,
)
from ..utils.json_utils import AlignmentPayload, GenerationPayload, JsonExtractionError, extract_json_object

# Setup logging
logger = logging.getLogger(__name__)

GRAMMAR_REFERENCE_PATH = Path(__file__).resolve().parent.parent / "aml" / "grammar_reference.md"


def load_grammar_reference(path: Optional[str] = None) -> str:
    """Language reference injected into every prompt."""
    return Path(path or GRAMMAR_REFERENCE_PATH).read_text(encoding="utf-8")


class RunArtifacts:
    """Files of one run directory; every method is a no-op without a directory."""

    def __init__(self, directory: Optional[str]):
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)
            (self.directory / "exchanges.jsonl").write_text("", encoding="utf-8")

    def write(self, name: str, text: str):
        if self.directory:
            (self.directory / name).write_text(text, encoding="utf-8")

    def append_exchange(self, exchange: BackendExchange):
        if self.directory:
            with open(self.directory / "exchanges.jsonl", "a", encoding="utf-8") as f:
                f.write(json.dumps(exchange.model_dump(mode="json")) + "\n")


class ModellingLoopService:
    """Service for the generate, compile, assess and revise loop."""

    def __init__(
        self,
        backend: LLMBackend,
        kb: Optional[KnowledgeBase] = None,
        provider: Optional[EmbeddingProvider] = None,
        k: int = 3,
        params: Optional[DecodingParams] = None,
        rates: Optional[RateTable] = None,
        grammar_reference: Optional[str] = None,
        strategy: Strategy = Strategy.GUIDED,
        final_assessment: bool = True,
        grammar: bool = True,
        retrieval: bool = True,
        alignment: bool = True,
        literate: bool = True,
    ):
        """
        Initialize the loop.

        Args:
            backend (LLMBackend): completion backend for generation and judging
            kb (KnowledgeBase, optional): exemplars for few-shot retrieval
            provider (EmbeddingProvider, optional): provider used to index kb
            k (int): exemplars per request, at least 1
            params (DecodingParams, optional): sampling parameters for every call
            rates (RateTable, optional): dollar rates per model
            grammar_reference (str, optional): defaults to the bundled reference
            strategy (Strategy): baselines run once, without retrieval or final assessment
            final_assessment (bool): request an assessment after budget exhaustion
            grammar (bool): include the language reference in prompts
            retrieval (bool): add retrieved exemplars to prompts
            alignment (bool): judge compiled attempts; off accepts the first compiling one
            literate (bool): ask for comments and keep them in exemplars
        """
        self.backend = backend
        self.kb = kb
        self.provider = provider
        self.k = k
        self.params = params or DecodingParams()
        self.rates = rates or RateTable()
        self.grammar_reference = grammar_reference or load_grammar_reference()
        self.strategy = strategy
        if k < 1:
            raise ValueError("k must be at least 1")
        self.grammar = grammar
        self.retrieval = retrieval
        self.alignment = alignment
        self.literate = literate
        self.final_assessment = final_assessment and strategy == Strategy.GUIDED and alignment

    def few_shots_for(self, problem: str) -> str:
        if self.strategy != Strategy.GUIDED or not self.retrieval or self.kb is None or len(self.kb) == 0:
            return ""
        results = top_k(self.kb, problem, self.k, self.provider)
        logger.info(f"Retrieved exemplars {[r.exemplar.id for r in results]}")
        return format_few_shot_block(results, literate=self.literate)

    async def run(self, problem: str, budget: int = 5, output_dir: Optional[str] = None) -> LoopResult:
        """
        Run the loop on one problem.

        Args:
            problem (str): natural-language problem description
            budget (int): maximum generation iterations
            output_dir (str, optional): run directory for model.mod, data.dat,
                assessment.txt, telemetry.json and exchanges.jsonl

        Returns:
            LoopResult: last artifacts, final assessment, telemetry and outcome

        Raises:
            BackendError: when the backend fails after retries
        """
        if budget < 1:
            raise ValueError("budget must be at least 1")
        if self.strategy != Strategy.GUIDED:
            budget = 1

        start = time.monotonic()
        artifacts = RunArtifacts(output_dir)
        ctx = TaskContext(problem_text=problem, grammar_reference=self.grammar_reference,
                          few_shots=self.few_shots_for(problem))
        exchanges: List[BackendExchange] = []
        records: List[IterationRecord] = []
        revision: Optional[RevisionKind] = None
        verdict: Optional[AlignmentVerdict] = None
        ended_with_verdict = False
        compiled = False
        outcome = LoopOutcome.BUDGET_EXHAUSTED

        for t in range(1, budget + 1):
            logger.info(f"Iteration {t}/{budget} started ({revision.value if revision else 'generation'})")

            # Step 1: generate or revise
            if revision is None:
                prompt = build_generation_prompt(ctx, self.strategy, grammar=self.grammar, literate=self.literate)
                kind = ExchangeKind.GENERATION
            else:
                prompt = build_revision_prompt(ctx, revision, grammar=self.grammar, literate=self.literate)
                kind = ExchangeKind.REVISION
            response = await self._exchange(t, kind, prompt, exchanges, artifacts)
            record = IterationRecord(iteration=t, revision=revision, parsed=False)
            records.append(record)

            # Step 2: parse the payload
            try:
                payload = extract_json_object(response.text, GenerationPayload)
            except JsonExtractionError as e:
                logger.warning(f"Iteration {t}: unparseable response ({e.reason}): {e}")
                ctx.compiler_errors = [make_diagnostic("GEN-INVALID-RESPONSE", detail=str(e).rstrip("."))]
                if ctx.last_attempt is None:
                    ctx.last_attempt = Attempt(model="", data="")
                revision = RevisionKind.SYNTAX
                ended_with_verdict = compiled = False
                continue
            attempt = Attempt(model=payload["model"], data=payload["data"])
            record.parsed = True
            ctx.last_attempt = attempt
            artifacts.write("model.mod", attempt.model)
            artifacts.write("data.dat", attempt.data)

            # Step 3: compile
            result = compile_model(attempt.model, attempt.data)
            compiled = record.compiled = result.compiled
            record.error_count = len(result.errors)
            if not result.compiled:
                logger.info(f"Iteration {t}: {len(result.errors)} compile error(s)")
                ctx.compiler_errors = result.errors
                revision = RevisionKind.SYNTAX
                ended_with_verdict = False
                continue
            ctx.compiler_errors = []

            # Step 4: judge alignment, only for compiled attempts
            if not self.alignment:
                logger.info(f"Iteration {t}: gate passed (compiled, alignment check off)")
                outcome = LoopOutcome.ALIGNED
                break
            verdict = await self._judge(t, ExchangeKind.ALIGNMENT, ctx, attempt, exchanges, artifacts)
            record.aligned = verdict.aligned
            ctx.assessment = verdict.assessment
            ended_with_verdict = True
            artifacts.write("assessment.txt", verdict.assessment)
            if verdict.aligned:
                logger.info(f"Iteration {t}: gate passed (compiled and aligned)")
                outcome = LoopOutcome.ALIGNED
                break
            logger.info(f"Iteration {t}: compiled but judged misaligned")
            revision = RevisionKind.ALIGNMENT

        final_assessment = verdict.assessment if verdict and ended_with_verdict else ""
        # Step 5: final assessment after exhaustion with errors remaining
        if outcome == LoopOutcome.BUDGET_EXHAUSTED and not ended_with_verdict and self.final_assessment:
            last = ctx.last_attempt or Attempt(model="", data="")
            final = await self._judge(len(records), ExchangeKind.FINAL_ASSESSMENT, ctx, last, exchanges, artifacts)
            final_assessment = final.assessment
            artifacts.write("assessment.txt", final_assessment)

        telemetry = self._telemetry(records, exchanges, time.monotonic() - start)
        artifacts.write("telemetry.json", telemetry.model_dump_json(indent=2))
        last = ctx.last_attempt or Attempt(model="", data="")
        logger.info(f"Run finished: {outcome.value} after {telemetry.iterations} iteration(s), "
                    f"{telemetry.total_tokens} tokens, ${telemetry.cost:.6f}")
        return LoopResult(
            model_text=last.model,
            data_text=last.data,
            final_assessment=final_assessment,
            telemetry=telemetry,
            outcome=outcome,
            compiled=compiled,
            iterations=records,
            exchanges=exchanges,
        )

    async def _exchange(self, iteration: int, kind: ExchangeKind, prompt: str,
                        exchanges: List[BackendExchange], artifacts: RunArtifacts) -> BackendResponse:
        response = await self.backend.complete("", prompt, self.params)
        exchange = BackendExchange(iteration=iteration, kind=kind, user=prompt, params=self.params,
                                   response=response)
        exchanges.append(exchange)
        artifacts.append_exchange(exchange)
        return response

    async def _judge(self, iteration: int, kind: ExchangeKind, ctx: TaskContext, attempt: Attempt,
                     exchanges: List[BackendExchange], artifacts: RunArtifacts) -> AlignmentVerdict:
        prompt = build_alignment_prompt(ctx, attempt.model, attempt.data, grammar=self.grammar)
        response = await self._exchange(iteration, kind, prompt, exchanges, artifacts)
        try:
            payload = extract_json_object(response.text, AlignmentPayload)
            assessment = payload["assessment"].strip() or "No assessment given."
            return AlignmentVerdict(aligned=payload["aligned"], assessment=assessment)
        except JsonExtractionError as e:
            logger.warning(f"Unparseable alignment response ({e.reason}); treated as misaligned")
            raw = response.text.strip()
            return AlignmentVerdict(aligned=False, assessment=raw or f"The alignment response was unusable: {e}")

    def _telemetry(self, records: List[IterationRecord], exchanges: List[BackendExchange],
                   latency: float) -> Telemetry:
        prompt_tokens = sum(e.response.prompt_tokens for e in exchanges)
        completion_tokens = sum(e.response.completion_tokens for e in exchanges)
        return Telemetry(
            iterations=len(records),
            prompt_tokens=prompt_tokens,
            completion_tokens=completion_tokens,
            latency=latency,
            cost=self.rates.cost(self.backend.model, prompt_tokens, completion_tokens),
        )
