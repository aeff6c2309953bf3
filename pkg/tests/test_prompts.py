"""
Tests for the generation, revision and alignment prompt builders.
"""

import pytest

from src.aml.catalog import make_diagnostic
from src.models.config import Strategy
from src.models.diagnostics import SourceKind
from src.models.loop import Attempt, RevisionKind, TaskContext
from src.services.modelling_service import load_grammar_reference
from src.services.prompts import (
    ALIGNMENT_GUIDELINE, GRAMMAR_BEGIN, GRAMMAR_END, SYNTAX_GUIDELINE, build_alignment_prompt,
    build_generation_prompt, build_revision_prompt,
)

PROBLEM = "Ship {goods} from two plants to three markets at minimum cost."
FEW_SHOTS = "<examples>\n<example>transport</example>\n</examples>"


def context(**overrides) -> TaskContext:
    values = {"problem_text": PROBLEM, "grammar_reference": load_grammar_reference()}
    values.update(overrides)
    return TaskContext(**values)


def previous_attempt() -> Attempt:
    return Attempt(model="dvar float x;\nminimize obj: x;\n// {{PROMPT}} stays literal\n", data="")


def chained_error():
    return make_diagnostic("SEM-CHAINED-CMP", 20, 5, SourceKind.MODEL)


def test_grammar_reference_is_bundled():
    reference = load_grammar_reference()
    assert reference.strip()
    assert "subject to" in reference


@pytest.mark.parametrize("strategy", list(Strategy))
def test_generation_prompt_structure(strategy):
    prompt = build_generation_prompt(context(few_shots=FEW_SHOTS), strategy)
    assert GRAMMAR_BEGIN in prompt and GRAMMAR_END in prompt
    assert prompt.index(GRAMMAR_BEGIN) < prompt.index(GRAMMAR_END)
    assert PROBLEM in prompt
    assert FEW_SHOTS in prompt
    assert "{{" not in prompt
    assert '"model"' in prompt and '"data"' in prompt
    assert prompt.index(FEW_SHOTS) < prompt.index("<problem_description>")


def test_generation_prompt_without_few_shots():
    prompt = build_generation_prompt(context())
    assert "<examples>" not in prompt
    assert "</grammar_reference>\n\n<problem_description>" in prompt


def test_strategies_differ_in_task_wording():
    guided = build_generation_prompt(context(), Strategy.GUIDED)
    standard = build_generation_prompt(context(), Strategy.STANDARD)
    assert "literate" in guided
    assert "literate" not in standard
    assert "step by step" in build_generation_prompt(context(), Strategy.COT)


def test_generation_rejects_previous_attempt():
    with pytest.raises(ValueError):
        build_generation_prompt(context(last_attempt=previous_attempt()))


def test_syntax_revision_prompt():
    ctx = context(last_attempt=previous_attempt(), compiler_errors=[chained_error()])
    prompt = build_revision_prompt(ctx, RevisionKind.SYNTAX)
    assert SYNTAX_GUIDELINE in prompt
    assert ALIGNMENT_GUIDELINE not in prompt
    assert "Semantic Error (Line 20): Chained comparisons" in prompt
    assert "<alignment_assessment>\nNone.\n</alignment_assessment>" in prompt
    assert "dvar float x;" in prompt


def test_previous_attempt_is_inserted_verbatim():
    ctx = context(last_attempt=previous_attempt(), compiler_errors=[chained_error()])
    prompt = build_revision_prompt(ctx, RevisionKind.SYNTAX)
    # placeholders inside the model text are not expanded again
    assert "// {{PROMPT}} stays literal" in prompt


def test_alignment_revision_prompt():
    ctx = context(last_attempt=previous_attempt(), assessment="The budget row is missing.")
    prompt = build_revision_prompt(ctx, RevisionKind.ALIGNMENT)
    assert ALIGNMENT_GUIDELINE in prompt
    assert SYNTAX_GUIDELINE not in prompt
    assert "The budget row is missing." in prompt
    assert "<compiler_errors>\nNone.\n</compiler_errors>" in prompt


@pytest.mark.parametrize("overrides,kind", [
    ({}, RevisionKind.SYNTAX),
    ({"last_attempt": Attempt(model="m", data="d")}, RevisionKind.SYNTAX),
    ({"last_attempt": Attempt(model="m", data="d")}, RevisionKind.ALIGNMENT),
])
def test_revision_preconditions(overrides, kind):
    with pytest.raises(ValueError):
        build_revision_prompt(context(**overrides), kind)


def test_alignment_prompt():
    prompt = build_alignment_prompt(context(), "dvar float x;", "n = 3;")
    assert GRAMMAR_BEGIN in prompt
    assert "<model>\ndvar float x;\n</model>" in prompt
    assert "<data>\nn = 3;\n</data>" in prompt
    assert '"aligned"' in prompt and '"assessment"' in prompt
    assert "{{" not in prompt


def test_empty_grammar_reference_is_rejected():
    with pytest.raises(ValueError):
        TaskContext(problem_text=PROBLEM, grammar_reference="   ")


def test_grammar_markers_are_exact():
    prompt = build_generation_prompt(context())
    lines = prompt.splitlines()
    assert "--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---" in lines
    assert "--- END PYOPL SYNTAX IMPLEMENTATION ---" in lines
    assert GRAMMAR_BEGIN == "--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---"
    assert GRAMMAR_END == "--- END PYOPL SYNTAX IMPLEMENTATION ---"


def test_template_wording_is_kept():
    generation = build_generation_prompt(context())
    assert "You are an expert in mathematical optimisation and PyOPL." in generation
    assert ("- Output ONLY the final JSON with the model and data; do not include your scratchpad "
            "in the output.") in generation
    assert "If any data are missing, create a small, plausible mock instance consistent with the model." in generation

    ctx = context(last_attempt=previous_attempt(), compiler_errors=[chained_error()])
    revision = build_revision_prompt(ctx, RevisionKind.SYNTAX).splitlines()
    assert "- Keep syntax strictly valid." in revision
    assert "Change only what is necessary; keep syntax valid." in revision
    assert "- Return complete model and data strings; do not return diffs." in revision

    alignment = build_alignment_prompt(context(), "m", "d").splitlines()
    assert "You are an expert in mathematical optimization and PyOPL." in alignment
    assert "- Objective and constraints reflect the prompt intent." in alignment


def test_baseline_task_wording():
    standard = build_generation_prompt(context(), Strategy.STANDARD)
    assert ("Ensure the model decision variables, objective function, and constraints fully align "
            "with the provided problem description.") in standard
    cot = build_generation_prompt(context(), Strategy.COT)
    assert "Think step by step to derive a correct PyOPL model (.mod) and matching data (.dat) for the problem." in cot


def test_prompts_without_grammar_reference():
    ctx = context(last_attempt=previous_attempt(), compiler_errors=[chained_error()])
    prompts = [
        build_generation_prompt(context(), grammar=False),
        build_revision_prompt(ctx, RevisionKind.SYNTAX, grammar=False),
        build_alignment_prompt(context(), "m", "d", grammar=False),
    ]
    for prompt in prompts:
        assert "<grammar_reference>" not in prompt
        assert GRAMMAR_BEGIN not in prompt
        assert "{{" not in prompt
    assert "</task>\n\n<problem_description>" in prompts[0]
    assert "</task>\n\n<inputs>" in prompts[2]


def test_prompts_without_literate_comments():
    ctx = context(last_attempt=previous_attempt(), compiler_errors=[chained_error()])
    generation = build_generation_prompt(context(), literate=False)
    revision = build_revision_prompt(ctx, RevisionKind.SYNTAX, literate=False)
    for prompt in (generation, revision):
        assert "literate style" not in prompt
        assert "Label the objective and each constraint." in prompt
    assert "literate style" in build_generation_prompt(context())
