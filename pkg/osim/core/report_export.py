# osim/core/report_export.py
"""Canonical report serialization: sorted keys, floats with 17 significant digits, non-finite floats as null."""
import csv
import io
import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Union

from pydantic import BaseModel

from osim.core.exceptions import ParamOutOfDomainError
from osim.models.report_models import BatchIndex, Report

logger = logging.getLogger(__name__)

CSV_HEADER = ["scenario", "status", "max_violation", "tolerance", "seed", "N"]
EXPORT_FORMATS = ("json", "csv_summary")


def _float(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    return format(value, ".17g")


def _encode(value: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    close = "\n" + " " * (indent * level)
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="json")
    if isinstance(value, Enum):
        value = value.value
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _float(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{json.dumps(str(k), ensure_ascii=False)}: {_encode(value[k], indent, level + 1)}"
                 for k in sorted(value, key=str)]
        return "{" + pad + ("," + pad).join(items) + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in value]
        return "[" + pad + ("," + pad).join(items) + close + "]"
    if hasattr(value, "tolist"):
        return _encode(value.tolist(), indent, level)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(value: Any, indent: int = 2) -> str:
    return _encode(value, indent, 0) + "\n"


def _csv_number(value) -> str:
    if value is None:
        return ""
    return "" if not math.isfinite(value) else format(value, ".17g")


def csv_summary(reports: Union[Report, Iterable[Report]]) -> str:
    rows = [reports] if isinstance(reports, Report) else list(reports)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in rows:
        writer.writerow([report.scenario, report.verdict.value, _csv_number(report.max_violation),
                         _csv_number(report.tolerance), report.seed, report.N])
    return buffer.getvalue()


def export_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return canonical_json(report).encode("utf-8")
    if fmt == "csv_summary":
        return csv_summary(report).encode("utf-8")
    raise ParamOutOfDomainError(f"unknown export format '{fmt}'; available: {', '.join(EXPORT_FORMATS)}")


def write_report(report: Report, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(export_report(report, "json"))
    logger.debug(f"Wrote report {report.scenario} to {path}")
    return path


def write_index(index: BatchIndex, out_dir: Path, reports: List[Report]) -> Path:
    """index.json plus summary.csv; wall times live only here."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    index_path = out_dir / "index.json"
    index_path.write_text(canonical_json(index), encoding="utf-8")
    (out_dir / "summary.csv").write_text(csv_summary(reports), encoding="utf-8")
    logger.info(f"Wrote index of {len(index.entries)} entries to {index_path}")
    return index_path
