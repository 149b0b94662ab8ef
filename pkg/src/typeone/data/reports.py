"""Machine-readable campaign reports.

JSON is the primary format (schema shipped with the package, see
schemas/report.schema.json). The CSV layout is two sections: a summary header
row plus one summary row (columns dataset, mode, num_samples, Dis_input,
Dis_output, Dev, success_rate), then a per-sample header plus one row per
attack. Both formats round-trip losslessly: floats are written with their
shortest exact representation.
"""

from __future__ import annotations

import csv
import importlib.resources
import json
from pathlib import Path

from ..exceptions import DataError, InvalidInputError
from ..metrics import CampaignSummary

REPORT_SCHEMA_VERSION = 1

_SUMMARY_COLUMNS = ("dataset", "mode", "num_samples", "Dis_input", "Dis_output", "Dev", "success_rate")
_SAMPLE_COLUMNS = ("index", "input_distance", "output_distance", "dev", "success", "iterations_used")


def report_schema() -> dict:
    """The JSON schema the json report format validates against."""
    ref = importlib.resources.files("typeone") / "schemas" / "report.schema.json"
    return json.loads(ref.read_text())


def summary_to_dict(summary: CampaignSummary) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "dataset": summary.dataset_name,
        "mode": summary.mode,
        "num_samples": summary.num_samples,
        "mean_input_distance": summary.mean_input_distance,
        "mean_output_distance": summary.mean_output_distance,
        "mean_dev": summary.mean_dev,
        "success_rate": summary.success_rate,
        "per_sample": [dict(rec) for rec in summary.per_sample_records],
    }


def summary_from_dict(data: dict) -> CampaignSummary:
    if data.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise DataError(f"unsupported report schema version {data.get('schema_version')!r}")
    return CampaignSummary(
        dataset_name=data["dataset"],
        mode=data["mode"],
        num_samples=data["num_samples"],
        mean_input_distance=data["mean_input_distance"],
        mean_output_distance=data["mean_output_distance"],
        mean_dev=data["mean_dev"],
        success_rate=data["success_rate"],
        per_sample_records=[dict(rec) for rec in data["per_sample"]],
    )


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def _parse_opt_float(text):
    return None if text == "" else float(text)


def write_report(summary: CampaignSummary, path, format="json"):
    """Serialize a campaign summary with its per-sample digests."""
    path = Path(path)
    if format == "json":
        payload = json.dumps(summary_to_dict(summary), indent=2) + "\n"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(payload)
        except OSError as exc:
            raise DataError(f"cannot write report {path}: {exc}") from exc
        return path
    if format == "csv":
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(_SUMMARY_COLUMNS)
                writer.writerow([
                    summary.dataset_name,
                    summary.mode,
                    summary.num_samples,
                    _fmt(summary.mean_input_distance),
                    _fmt(summary.mean_output_distance),
                    _fmt(summary.mean_dev),
                    _fmt(summary.success_rate),
                ])
                writer.writerow(_SAMPLE_COLUMNS)
                for rec in summary.per_sample_records:
                    writer.writerow([_fmt(rec[col]) for col in _SAMPLE_COLUMNS])
        except OSError as exc:
            raise DataError(f"cannot write report {path}: {exc}") from exc
        return path
    raise InvalidInputError(f"unknown report format {format!r}; use 'json' or 'csv'")


def read_report(path, format=None) -> CampaignSummary:
    """Parse a report written by write_report (format inferred from suffix)."""
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix == ".csv" else "json"
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read report {path}: {exc}") from exc
    if format == "json":
        try:
            return summary_from_dict(json.loads(text))
        except (ValueError, KeyError) as exc:
            raise DataError(f"corrupt json report {path}: {exc}") from exc
    if format == "csv":
        rows = list(csv.reader(text.splitlines()))
        if len(rows) < 3 or tuple(rows[0]) != _SUMMARY_COLUMNS or tuple(rows[2]) != _SAMPLE_COLUMNS:
            raise DataError(f"corrupt csv report {path}: unexpected layout")
        try:
            head = rows[1]
            records = [
                {
                    "index": None if r[0] == "" else int(r[0]),
                    "input_distance": float(r[1]),
                    "output_distance": float(r[2]),
                    "dev": _parse_opt_float(r[3]),
                    "success": r[4] == "true",
                    "iterations_used": int(r[5]),
                }
                for r in rows[3:]
                if r
            ]
            return CampaignSummary(
                dataset_name=head[0],
                mode=head[1],
                num_samples=int(head[2]),
                mean_input_distance=float(head[3]),
                mean_output_distance=float(head[4]),
                mean_dev=_parse_opt_float(head[5]),
                success_rate=float(head[6]),
                per_sample_records=records,
            )
        except (ValueError, IndexError) as exc:
            raise DataError(f"corrupt csv report {path}: {exc}") from exc
    raise InvalidInputError(f"unknown report format {format!r}; use 'json' or 'csv'")
