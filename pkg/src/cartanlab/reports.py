"""Machine-readable run reports: JSON-lines trials, CSV summaries, metadata.

A run produces three files with stable names under the output directory:

* ``<experiment>.jsonl``: one JSON object per line.  The first line echoes
  the fully resolved parameter set; every following line is one trial
  record.  Nothing time-dependent is written here, so two runs with the
  same configuration produce byte-identical payloads.
* ``<experiment>.summary.csv``: the aggregate summary table, one header
  row plus data rows.
* ``<experiment>.meta.json``: timestamps, wall-clock duration, package
  version, file inventory, and the aggregate verdict.  Everything that can
  differ between identical runs lives here.

Reals are serialized by the JSON encoder's shortest round-trip decimal
form, so parsing a report back recovers the exact floats.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata as _importlib_metadata
from pathlib import Path

import numpy as np

from .errors import ContractError

__all__ = ["RunReport", "write_report", "read_jsonl"]


def _json_default(value):
    """Fold numpy scalars into their Python equivalents; reject the rest."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _package_version() -> str:
    try:
        return _importlib_metadata.version("cartanlab")
    except _importlib_metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class RunReport:
    """In-memory result of one experiment run, ready to serialize.

    `records` hold per-trial results only; anything derived from wall-clock
    time is banned from them (and from `parameters` and `aggregate`) so the
    JSON-lines payload stays reproducible.  `summary_rows` become the CSV;
    `aggregate` and `passed` carry the run verdict.
    """

    experiment: str
    parameters: dict
    records: tuple
    summary_fields: tuple
    summary_rows: tuple
    aggregate: dict
    passed: bool

    def __post_init__(self):
        if not self.experiment or not isinstance(self.experiment, str):
            raise ContractError(f"experiment must be a nonempty string, got {self.experiment!r}")
        for row in self.summary_rows:
            missing = [f for f in self.summary_fields if f not in row]
            if missing:
                raise ContractError(f"summary row is missing fields {missing}")

    def jsonl_lines(self) -> list[str]:
        head = {"record": "config", "experiment": self.experiment, "parameters": self.parameters}
        lines = [json.dumps(head, allow_nan=False, default=_json_default)]
        for rec in self.records:
            body = {"record": "trial"}
            body.update(rec)
            lines.append(json.dumps(body, allow_nan=False, default=_json_default))
        return lines


def write_report(report: RunReport, outdir, *, extra_metadata: dict | None = None) -> dict:
    """Write the three report files and return their paths keyed by kind."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = report.experiment

    jsonl_path = out / f"{stem}.jsonl"
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    jsonl_path.write_text("\n".join(report.jsonl_lines()) + "\n", encoding="utf-8")

    csv_path = out / f"{stem}.summary.csv"
    with csv_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(
            handle, fieldnames=list(report.summary_fields), lineterminator="\n"
        )
        writer.writeheader()
        for row in report.summary_rows:
            writer.writerow({f: row[f] for f in report.summary_fields})

    meta_path = out / f"{stem}.meta.json"
    meta = {
        "experiment": report.experiment,
        "passed": report.passed,
        "aggregate": report.aggregate,
        "parameters": report.parameters,
        "package_version": _package_version(),
        "started_utc": started,
        "write_seconds": time.perf_counter() - t0,
        "files": {"jsonl": jsonl_path.name, "csv": csv_path.name},
    }
    if extra_metadata:
        meta.update(extra_metadata)
    meta_path.write_text(
        json.dumps(meta, indent=2, allow_nan=False, default=_json_default) + "\n",
        encoding="utf-8",
    )

    return {"jsonl": str(jsonl_path), "csv": str(csv_path), "metadata": str(meta_path)}


def read_jsonl(path) -> tuple[dict, list[dict]]:
    """Parse a report back into (parameters echo, trial records)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ContractError(f"{path} is empty")
    head = json.loads(lines[0])
    if head.get("record") != "config":
        raise ContractError(f"{path} does not start with a config record")
    trials = [json.loads(line) for line in lines[1:]]
    return head, trials
