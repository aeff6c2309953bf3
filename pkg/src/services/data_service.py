"""
Data Service for Benchmark Suites

This module loads benchmark suites (line-delimited records with id,
description and expected objective) using pandas, and converts the public
benchmark layouts into that format.
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd
from dotenv import load_dotenv

from ..models.evaluation import BenchmarkInstance

load_dotenv()

# Setup logging
logger = logging.getLogger(__name__)

# Source layouts: (description column, expected-objective column)
LAYOUTS: Dict[str, Tuple[str, str]] = {
    "en": ("en_question", "en_answer"),
    "qa": ("question", "answer"),
    "ground_truth": ("description", "ground_truth"),
    "suite": ("description", "expected_objective"),
}


class SuiteFormatError(Exception):
    """Custom exception for empty or malformed suite files."""
    pass


def _expected(value) -> Optional[float]:
    """Expected objective as float; null, blanks and non-numeric text become None."""
    if value is None:
        return None
    if isinstance(value, str):
        text = value.strip().replace(",", "")
        if text.lower() in ("", "null", "none", "nan"):
            return None
        try:
            return float(text)
        except ValueError:
            return None
    if pd.isna(value):
        return None
    return float(value)


class BenchmarkDataService:
    """Service for reading and converting benchmark suites."""

    def __init__(self, suite_dir: Optional[str] = None):
        """
        Initialize the data service.

        Args:
            suite_dir (str, optional): default directory for relative suite paths
        """
        self.suite_dir = suite_dir or os.getenv("OPLFORGE_SUITE_DIR", ".")
        self._cache: Dict[str, List[BenchmarkInstance]] = {}

    def _resolve(self, path: str) -> Path:
        file_path = Path(path)
        if not file_path.is_absolute() and not file_path.exists():
            file_path = Path(self.suite_dir) / file_path
        return file_path

    def load_suite(self, path: str, force_reload: bool = False) -> List[BenchmarkInstance]:
        """
        Load a suite file.

        Args:
            path (str): JSONL file with id, description, expected_objective
            force_reload (bool): ignore the cache

        Returns:
            list: instances in file order

        Raises:
            FileNotFoundError: if the file does not exist
            SuiteFormatError: if the suite is empty, lacks columns or repeats ids
        """
        file_path = self._resolve(path)
        key = str(file_path)
        if key in self._cache and not force_reload:
            return self._cache[key]
        if not file_path.exists():
            raise FileNotFoundError(f"Suite file not found: {path}")

        text = file_path.read_text(encoding="utf-8")
        if not text.strip():
            raise SuiteFormatError(f"Suite is empty: {path}")
        try:
            frame = pd.read_json(file_path, lines=True, dtype={"id": str}, convert_dates=False)
        except ValueError as e:
            raise SuiteFormatError(f"Suite {path} is not line-delimited JSON: {e}")

        missing = [c for c in ("id", "description") if c not in frame.columns]
        if missing:
            raise SuiteFormatError(f"Suite {path} lacks columns {missing}")
        if "expected_objective" not in frame.columns:
            frame["expected_objective"] = None
        if frame.empty:
            raise SuiteFormatError(f"Suite is empty: {path}")
        duplicates = frame["id"][frame["id"].duplicated()].tolist()
        if duplicates:
            raise SuiteFormatError(f"Duplicate instance ids in {path}: {duplicates}")

        instances = [
            BenchmarkInstance(
                id=str(row["id"]).strip(),
                description=str(row["description"]),
                expected_objective=_expected(row["expected_objective"]),
            )
            for _, row in frame.iterrows()
        ]
        logger.info(f"Loaded {len(instances)} instances from {path}")
        self._cache[key] = instances
        return instances

    @staticmethod
    def read_source(path: str) -> pd.DataFrame:
        """Read a public benchmark file (.json, .jsonl or .xlsx) into a frame."""
        file_path = Path(path)
        if not file_path.exists():
            raise FileNotFoundError(f"Benchmark file not found: {path}")
        suffix = file_path.suffix.lower()
        if suffix in (".xlsx", ".xls"):
            frame = pd.read_excel(file_path, engine="openpyxl")
        elif suffix == ".jsonl":
            frame = pd.read_json(file_path, lines=True, convert_dates=False)
        else:
            with open(file_path, encoding="utf-8") as f:
                raw = json.load(f)
            # Either a list of records or a mapping of id to record
            if isinstance(raw, dict):
                frame = pd.DataFrame([{"id": k, **v} for k, v in raw.items()])
            else:
                frame = pd.DataFrame(raw)
        frame.columns = [str(c).strip() for c in frame.columns]
        return frame

    @staticmethod
    def detect_layout(frame: pd.DataFrame) -> str:
        """Name of the first layout whose columns the frame has."""
        for name, (description, expected) in LAYOUTS.items():
            if description in frame.columns and expected in frame.columns:
                return name
        raise SuiteFormatError(f"Unrecognised benchmark layout with columns {list(frame.columns)}")

    def convert(self, source: str, destination: str, layout: Optional[str] = None,
                prefix: Optional[str] = None) -> List[BenchmarkInstance]:
        """
        Convert a public benchmark file into a suite file.

        Args:
            source (str): input file
            destination (str): JSONL suite to write
            layout (str, optional): one of LAYOUTS; detected when omitted
            prefix (str, optional): id prefix when the source has no id column

        Returns:
            list: the converted instances
        """
        frame = self.read_source(source)
        if frame.empty:
            raise SuiteFormatError(f"Benchmark file is empty: {source}")
        layout = layout or self.detect_layout(frame)
        if layout not in LAYOUTS:
            raise SuiteFormatError(f"Unknown layout '{layout}'; choose from {sorted(LAYOUTS)}")
        description_column, expected_column = LAYOUTS[layout]
        prefix = prefix or Path(source).stem

        instances = []
        seen = set()
        for n, (_, row) in enumerate(frame.iterrows(), start=1):
            instance_id = str(row["id"]).strip() if "id" in frame.columns and not pd.isna(row["id"]) \
                else f"{prefix}-{n:04d}"
            if instance_id in seen:
                instance_id = f"{instance_id}-{n}"
            seen.add(instance_id)
            instances.append(BenchmarkInstance(
                id=instance_id,
                description=str(row[description_column]).strip(),
                expected_objective=_expected(row[expected_column]),
            ))

        self.write_suite(instances, destination)
        logger.info(f"Converted {len(instances)} instances from {source} ({layout} layout) to {destination}")
        return instances

    @staticmethod
    def write_suite(instances: List[BenchmarkInstance], destination: str):
        """Write instances as a JSONL suite."""
        Path(destination).parent.mkdir(parents=True, exist_ok=True)
        with open(destination, "w", encoding="utf-8") as f:
            for instance in instances:
                f.write(instance.model_dump_json() + "\n")


# Global instance for use across the application
benchmark_data_service = BenchmarkDataService()
