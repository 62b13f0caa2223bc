# json, json-lines, csv and table output for command results and reports
import csv
import json
import logging
import math
from typing import Any, Dict, List, Sequence, TextIO

from .models import OutputFormat, ReportItem, VerificationReport

logger = logging.getLogger(__name__)

# named groups of flat records; most commands produce a single "rows" section
Sections = Dict[str, List[Dict[str, Any]]]

REPORT_COLUMNS = ("name", "status", "computed", "oracle", "rel_error", "tolerance", "literal", "paper_form", "corrected_form")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # repr round-trips exactly
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _columns(records: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for record in records:
        for key in record:
            if key not in columns:
                columns.append(key)
    return columns


# strict JSON has no NaN or Infinity; those floats are written as strings that float() reads back
def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def write_json(document: Any, stream: TextIO) -> None:
    json.dump(_json_safe(document), stream, indent=2, ensure_ascii=False, allow_nan=False)
    stream.write("\n")


def write_jsonl(records: Sequence[Dict[str, Any]], stream: TextIO) -> None:
    """One JSON object per line"""
    for record in records:
        stream.write(json.dumps(_json_safe(record), ensure_ascii=False, allow_nan=False) + "\n")


def write_csv(sections: Sections, stream: TextIO) -> None:
    """Each section as a header row plus records; sections separated by a blank line"""
    writer = csv.writer(stream, lineterminator="\n")
    for index, records in enumerate(sections.values()):
        if index:
            stream.write("\n")
        columns = _columns(records)
        writer.writerow(columns)
        for record in records:
            writer.writerow([_cell(record.get(column)) for column in columns])


def _table_cell(value: Any) -> str:
    if isinstance(value, float) and math.isfinite(value):
        return format(value, ".12g")
    return _cell(value)


def write_table(sections: Sections, stream: TextIO) -> None:
    """Aligned columns for reading in a terminal"""
    for index, (title, records) in enumerate(sections.items()):
        if index:
            stream.write("\n")
        if len(sections) > 1:
            stream.write(f"# {title}\n")
        columns = _columns(records)
        if not columns:
            stream.write("(no rows)\n")
            continue
        cells = [[_table_cell(record.get(column)) for column in columns] for record in records]
        widths = [max([len(column)] + [len(row[i]) for row in cells]) for i, column in enumerate(columns)]
        stream.write("  ".join(column.ljust(width) for column, width in zip(columns, widths)).rstrip() + "\n")
        for row in cells:
            stream.write("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() + "\n")


def write_sections(sections: Sections, output_format: OutputFormat, stream: TextIO, command: str = "") -> None:
    if output_format == OutputFormat.JSON:
        document: Dict[str, Any] = {"command": command} if command else {}
        document.update(sections)
        write_json(document, stream)
    elif output_format == OutputFormat.CSV:
        write_csv(sections, stream)
    else:
        write_table(sections, stream)


# python-mode dump keeps non-finite floats as floats for _json_safe
def _item_record(item: ReportItem) -> Dict[str, Any]:
    record = item.model_dump()
    record["status"] = item.status.value
    return record


def report_document(report: VerificationReport) -> Dict[str, Any]:
    return {
        "metadata": report.metadata,
        "items": [_item_record(item) for item in report.items],
    }


def report_rows(report: VerificationReport) -> List[Dict[str, Any]]:
    rows = []
    for item in report.items:
        data = _item_record(item)
        rows.append({column: data.get(column) for column in REPORT_COLUMNS})
    return rows


def write_report(report: VerificationReport, output_format: OutputFormat, stream: TextIO) -> None:
    """Report as one JSON document, as CSV, or as a table with a status summary"""
    if output_format == OutputFormat.JSON:
        write_json(report_document(report), stream)
        return
    rows = report_rows(report)
    if output_format == OutputFormat.CSV:
        write_csv({"items": rows}, stream)
        return
    write_table({"items": rows}, stream)
    counts = report.counts()
    stream.write("\n" + ", ".join(f"{status}: {count}" for status, count in counts.items()) + "\n")


# save a report to a json file; a .jsonl path gets one line per item after a metadata line
def export_report(report: VerificationReport, filepath: str) -> None:
    """Export report to a JSON or JSON-lines file"""
    try:
        with open(filepath, "w", encoding="utf-8") as f:
            if filepath.endswith(".jsonl"):
                write_jsonl(report_lines(report), f)
            else:
                write_json(report_document(report), f)
        logger.info(f"Report exported to {filepath}")
    except OSError as e:
        logger.error(f"Error exporting report: {str(e)}")
        raise


def report_lines(report: VerificationReport) -> List[Dict[str, Any]]:
    return [{"metadata": report.metadata}] + [_item_record(item) for item in report.items]


# load a report written by export_report or `verify --format json`
def load_report(filepath: str) -> VerificationReport:
    """Load report from JSON or JSON-lines file"""
    try:
        with open(filepath, "r", encoding="utf-8") as f:
            if filepath.endswith(".jsonl"):
                lines = [json.loads(line) for line in f if line.strip()]
                data = {"metadata": lines[0]["metadata"], "items": lines[1:]} if lines else {}
            else:
                data = json.load(f)
        return VerificationReport(**data)
    except (OSError, ValueError, KeyError) as e:
        logger.error(f"Error loading report: {str(e)}")
        raise


def report_statistics(report: VerificationReport) -> Dict[str, Any]:
    """Summary numbers of a report"""
    counts = report.counts()
    worst = max(report.items, key=lambda item: item.rel_error / item.tolerance, default=None)
    return {
        "total_items": len(report.items),
        **counts,
        "typo_probes": len([item for item in report.items if item.name.startswith("typo.")]),
        "worst_item": worst.name if worst else None,
        "worst_ratio": worst.rel_error / worst.tolerance if worst else 0.0,
    }
