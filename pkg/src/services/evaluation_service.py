"""
Evaluation Service

This module runs benchmark suites end-to-end through the modelling loop,
compiles and solves the final artifacts, classifies every run as AC, CE, RE
or WA and aggregates telemetry into a suite report.
"""

import asyncio
import json
import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple

from .ai_service import BackendAuthError
from .data_service import BenchmarkDataService, SuiteFormatError, benchmark_data_service
from .modelling_service import ModellingLoopService
from ..aml.compiler import compile_model
from ..models.evaluation import BenchmarkInstance, Outcome, Report, RunRecord
from ..models.flat import SolveOptions, SolveStatus
from ..solver.branch_and_bound import solve_milp
from ..utils.excel_utils import ReportExporter

# Setup logging
logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-6
ABSOLUTE_TOLERANCE = 1e-9

RECORDS_FILE = "records.jsonl"
REPORT_FILE = "report.json"
WORKBOOK_FILE = "report.xlsx"

_UNSAFE_PATH = re.compile(r"[^A-Za-z0-9._-]+")


def classify_outcome(observed: Optional[float], expected: Optional[float], compiled: bool,
                     status: Optional[SolveStatus]) -> Outcome:
    """
    Classify one run.

    Args:
        observed (float, optional): objective of the final artifacts, None without an optimum
        expected (float, optional): ground truth, None when the instance has no objective
        compiled (bool): final artifacts compiled
        status (SolveStatus, optional): solver status, None when nothing was solved

    Returns:
        Outcome: CE, then RE, then AC or WA, in that order of precedence
    """
    if not compiled:
        return Outcome.CE
    if status != SolveStatus.OPTIMAL and expected is not None:
        return Outcome.RE
    if observed is None and expected is None:
        return Outcome.AC
    if observed is None or expected is None:
        return Outcome.WA
    tolerance = max(ABSOLUTE_TOLERANCE, RELATIVE_TOLERANCE * abs(expected))
    return Outcome.AC if abs(observed - expected) <= tolerance else Outcome.WA


def _path_part(value: str) -> str:
    return _UNSAFE_PATH.sub("_", value).strip("_") or "instance"


class EvaluationService:
    """Service for running suites and producing reports."""

    def __init__(self, loop: ModellingLoopService, parallelism: int = 1,
                 solve_options: Optional[SolveOptions] = None,
                 data_service: Optional[BenchmarkDataService] = None):
        """
        Initialize the harness.

        Args:
            loop (ModellingLoopService): loop used for every run
            parallelism (int): concurrent runs
            solve_options (SolveOptions, optional): options for solving final artifacts
            data_service (BenchmarkDataService, optional): suite loader
        """
        if parallelism < 1:
            raise ValueError("parallelism must be at least 1")
        self.loop = loop
        self.parallelism = parallelism
        self.solve_options = solve_options or SolveOptions()
        self.data_service = data_service or benchmark_data_service

    def evaluate_artifacts(self, model_text: str, data_text: str,
                           expected: Optional[float]) -> Tuple[bool, Optional[SolveStatus], Optional[float], Outcome]:
        """Compile and solve final artifacts, then classify them."""
        result = compile_model(model_text, data_text)
        if not result.compiled or result.flat is None:
            return False, None, None, classify_outcome(None, expected, False, None)
        solution = solve_milp(result.flat, self.solve_options)
        observed = solution.objective_value
        return True, solution.status, observed, classify_outcome(observed, expected, True, solution.status)

    async def run_instance(self, instance: BenchmarkInstance, repetition: int, budget: int,
                           run_dir: Optional[Path] = None) -> RunRecord:
        """
        One loop run plus classification; failures other than authentication become records.

        Raises:
            BackendAuthError: credentials are missing or rejected
        """
        try:
            result = await self.loop.run(instance.description, budget=budget,
                                         output_dir=str(run_dir) if run_dir else None)
        except BackendAuthError:
            raise
        except Exception as e:
            logger.error(f"Run {instance.id}#{repetition} failed: {e}")
            return RunRecord(instance_id=instance.id, repetition=repetition, outcome=Outcome.CE,
                             expected_objective=instance.expected_objective, error=str(e))

        compiled, status, observed, outcome = await asyncio.to_thread(
            self.evaluate_artifacts, result.model_text, result.data_text, instance.expected_objective)
        return RunRecord(
            instance_id=instance.id,
            repetition=repetition,
            outcome=outcome,
            observed_objective=observed,
            expected_objective=instance.expected_objective,
            compiled=compiled,
            solve_status=status,
            loop_outcome=result.outcome,
            telemetry=result.telemetry,
        )

    async def run_suite(self, suite_path: str, budget: int = 5, repetitions: int = 1,
                        output_dir: Optional[str] = None) -> Tuple[Report, List[RunRecord]]:
        """
        Run every instance of a suite the given number of times.

        Args:
            suite_path (str): JSONL suite file
            budget (int): loop iteration budget per run
            repetitions (int): runs per instance
            output_dir (str, optional): root of the per-run directories and reports

        Returns:
            tuple: (Report, records ordered by instance then repetition)

        Raises:
            SuiteFormatError: if the suite is empty or malformed
            BackendAuthError: credentials are missing or rejected
        """
        if repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        instances = self.data_service.load_suite(suite_path)
        if not instances:
            raise SuiteFormatError(f"Suite is empty: {suite_path}")

        suite = Path(suite_path).stem
        root = Path(output_dir) if output_dir else None
        records_path = None
        if root:
            root.mkdir(parents=True, exist_ok=True)
            records_path = root / RECORDS_FILE
            records_path.write_text("", encoding="utf-8")

        semaphore = asyncio.Semaphore(self.parallelism)
        write_lock = asyncio.Lock()
        total = len(instances) * repetitions
        finished: List[RunRecord] = []

        async def worker(instance: BenchmarkInstance, repetition: int):
            async with semaphore:
                run_dir = root / _path_part(instance.id) / str(repetition) if root else None
                record = await self.run_instance(instance, repetition, budget, run_dir)
            async with write_lock:
                finished.append(record)
                if records_path:
                    with open(records_path, "a", encoding="utf-8") as f:
                        f.write(record.model_dump_json() + "\n")
                logger.info(f"[{len(finished)}/{total}] {instance.id}#{repetition}: {record.outcome.value}")

        logger.info(f"Running suite {suite}: {len(instances)} instance(s) x {repetitions} repetition(s)")
        await asyncio.gather(*(worker(instance, rep) for instance in instances
                               for rep in range(1, repetitions + 1)))

        position = {instance.id: n for n, instance in enumerate(instances)}
        records = sorted(finished, key=lambda r: (position[r.instance_id], r.repetition))
        report = Report.from_records(suite, records, instances=len(instances), repetitions=repetitions)
        if root:
            self.persist(report, records, root)
        return report, records

    @staticmethod
    def persist(report: Report, records: List[RunRecord], root: Path):
        """Write records.jsonl in final order, report.json and report.xlsx."""
        with open(root / RECORDS_FILE, "w", encoding="utf-8") as f:
            for record in records:
                f.write(record.model_dump_json() + "\n")
        (root / REPORT_FILE).write_text(report.model_dump_json(indent=2), encoding="utf-8")
        try:
            ReportExporter.write_workbook(report, records, str(root / WORKBOOK_FILE))
        except (OSError, ValueError) as e:
            logger.warning(f"Could not write report workbook: {e}")


def load_records(path: str) -> List[RunRecord]:
    """Read persisted run records."""
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                records.append(RunRecord.model_validate(json.loads(line)))
    return records
