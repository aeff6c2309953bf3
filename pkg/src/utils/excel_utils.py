"""
Excel Utilities

Helper functions for turning evaluation records into pandas frames, a
printable summary table and an Excel workbook.
"""

import logging
from pathlib import Path
from typing import List

import pandas as pd
from openpyxl.utils import get_column_letter

from ..models.evaluation import Report, RunRecord

# Setup logging
logger = logging.getLogger(__name__)

SUMMARY_SHEET = "Summary"
RECORDS_SHEET = "Records"


class ReportExporter:
    """Utility class for report formatting and export."""

    @staticmethod
    def records_frame(records: List[RunRecord]) -> pd.DataFrame:
        """
        Flatten run records into one row each.

        Args:
            records (list): run records

        Returns:
            pd.DataFrame: one column per record field, telemetry expanded
        """
        rows = []
        for record in records:
            rows.append({
                "instance_id": record.instance_id,
                "repetition": record.repetition,
                "outcome": record.outcome.value,
                "observed_objective": record.observed_objective,
                "expected_objective": record.expected_objective,
                "compiled": record.compiled,
                "solve_status": record.solve_status.value if record.solve_status else None,
                "loop_outcome": record.loop_outcome.value if record.loop_outcome else None,
                "iterations": record.telemetry.iterations,
                "prompt_tokens": record.telemetry.prompt_tokens,
                "completion_tokens": record.telemetry.completion_tokens,
                "latency": record.telemetry.latency,
                "cost": record.telemetry.cost,
                "error": record.error,
            })
        return pd.DataFrame(rows, columns=[
            "instance_id", "repetition", "outcome", "observed_objective", "expected_objective",
            "compiled", "solve_status", "loop_outcome", "iterations", "prompt_tokens",
            "completion_tokens", "latency", "cost", "error",
        ])

    @staticmethod
    def summary_frame(report: Report) -> pd.DataFrame:
        """Two-column metric/value frame of a report."""
        metrics = [
            ("Suite", report.suite),
            ("Instances", report.instances),
            ("Repetitions", report.repetitions),
            ("Records", report.records),
            ("Accuracy", report.accuracy),
            ("CE rate", report.ce_rate),
            ("RE rate", report.re_rate),
            ("WA rate", report.wa_rate),
            ("Avg prompt tokens", report.avg_prompt_tokens),
            ("Avg completion tokens", report.avg_completion_tokens),
            ("Avg latency (s)", report.avg_latency),
            ("Avg cost ($)", report.avg_cost),
            ("Avg iterations", report.avg_iterations),
        ]
        return pd.DataFrame(metrics, columns=["Metric", "Value"])

    @staticmethod
    def format_table(report: Report) -> str:
        """Human-readable summary for standard output."""
        header = f"{'Accuracy':>9} {'CE':>7} {'RE':>7} {'WA':>7} {'Tokens':>10} {'Latency':>9} {'Cost':>10} {'Iter':>6}"
        tokens = report.avg_prompt_tokens + report.avg_completion_tokens
        row = (f"{report.accuracy:>9.1%} {report.ce_rate:>7.1%} {report.re_rate:>7.1%} {report.wa_rate:>7.1%} "
               f"{tokens:>10.0f} {report.avg_latency:>8.2f}s {report.avg_cost:>10.4f} {report.avg_iterations:>6.2f}")
        title = (f"Suite {report.suite}: {report.instances} instance(s) x {report.repetitions} "
                 f"repetition(s) = {report.records} run(s)")
        return "\n".join([title, header, row])

    @staticmethod
    def write_workbook(report: Report, records: List[RunRecord], path: str) -> Path:
        """
        Write the Summary and Records sheets.

        Args:
            report (Report): aggregated metrics
            records (list): run records
            path (str): .xlsx destination

        Returns:
            Path: the written file
        """
        file_path = Path(path)
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with pd.ExcelWriter(file_path, engine="openpyxl") as writer:
            ReportExporter.summary_frame(report).to_excel(writer, sheet_name=SUMMARY_SHEET, index=False)
            ReportExporter.records_frame(records).to_excel(writer, sheet_name=RECORDS_SHEET, index=False)
            for sheet in writer.sheets.values():
                ReportExporter._fit_columns(sheet)
        logger.info(f"Report workbook written to {file_path}")
        return file_path

    @staticmethod
    def _fit_columns(sheet):
        for index, column in enumerate(sheet.iter_cols(), start=1):
            width = max((len(str(cell.value)) for cell in column if cell.value is not None), default=8)
            sheet.column_dimensions[get_column_letter(index)].width = min(width + 2, 60)
