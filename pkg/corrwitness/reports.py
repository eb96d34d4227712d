from __future__ import annotations

import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import UsageError
from .types import MEASURES, CheckResult, ConcurrenceMap, FrequencyCurve, MeasureKind, RunManifest

logger = logging.getLogger(__name__)

STDOUT = "-"

TIMETRACE_COLUMNS = ["lambda", "t"] + [f"delta_{k.symbol}" for k in MEASURES]
FREQUENCY_COLUMNS = ["lambda"] + [f"f_{k.symbol}" for k in MEASURES] + ["samples", "seed"]
SPINSTAR_COLUMNS = ["lambda"] + [f"f_{k.symbol}" for k in MEASURES] + ["n_bath", "a0", "samples", "seed"]
CONCURRENCE_COLUMNS = ["lambda", "t", "concurrence"]
SE_COLUMNS = [f"se_{k.symbol}" for k in MEASURES]


def fmt(x) -> str:
    """17 significant digits: parsing the text back gives the same double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


# -----------------------------
# CSV
# -----------------------------

def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_text(out: str, text: str) -> Optional[Path]:
    """Write to a file (returned) or to stdout when out is "-"."""
    if out == STDOUT:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        f.write(text)
    logger.info("wrote %s", path)
    return path


def read_csv(path) -> Tuple[List[str], np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise UsageError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))


def timetrace_rows(results: Sequence[Tuple[float, np.ndarray, Dict[MeasureKind, np.ndarray]]]):
    for lam, times, deltas in results:
        for i, t in enumerate(times):
            yield [lam, t] + [deltas[k][i] for k in MEASURES]


def frequency_rows(curve: FrequencyCurve, extra: Sequence = ()):
    freqs = curve.frequencies
    errors = curve.standard_errors()
    for i, lam in enumerate(curve.lambdas):
        yield (
            [lam]
            + [freqs[k][i] for k in MEASURES]
            + list(extra)
            + [curve.samples, curve.master_seed]
            + [errors[k][i] for k in MEASURES]
        )


def timetrace_csv(results) -> str:
    return csv_text(TIMETRACE_COLUMNS, timetrace_rows(results))


def frequency_csv(curve: FrequencyCurve) -> str:
    return csv_text(FREQUENCY_COLUMNS + SE_COLUMNS, frequency_rows(curve))


def spinstar_csv(curve: FrequencyCurve, n_bath: int, a0: float) -> str:
    return csv_text(SPINSTAR_COLUMNS + SE_COLUMNS, frequency_rows(curve, extra=(n_bath, a0)))


def concurrence_csv(cmap: ConcurrenceMap) -> str:
    rows = (
        [lam, t, cmap.values[i, j]]
        for i, lam in enumerate(cmap.lambdas)
        for j, t in enumerate(cmap.times)
    )
    return csv_text(CONCURRENCE_COLUMNS, rows)


def concurrence_summary(cmap: ConcurrenceMap) -> str:
    value = "none" if cmap.threshold_lambda is None else fmt(cmap.threshold_lambda)
    return f"threshold_lambda,{value}\n"


def summary_path(out: str) -> str:
    return STDOUT if out == STDOUT else f"{out}.summary.csv"


# -----------------------------
# Manifest
# -----------------------------

def manifest_path(out: str) -> str:
    return f"{out}.manifest.json"


def manifest_json(manifest: RunManifest) -> str:
    return json.dumps(asdict(manifest), sort_keys=True, indent=2) + "\n"


def write_manifest(out: str, manifest: RunManifest) -> Optional[Path]:
    if out == STDOUT:
        logger.info("output went to stdout; no manifest written")
        return None
    return write_text(manifest_path(out), manifest_json(manifest))


def read_manifest(path) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise UsageError(f"manifest {path} not found") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"manifest {path} is not valid JSON: {e}") from e
    try:
        return RunManifest(**data)
    except TypeError as e:
        raise UsageError(f"manifest {path} has unexpected fields: {e}") from e


# -----------------------------
# Verify report
# -----------------------------

def verify_report(results: Sequence[CheckResult]) -> str:
    """Mono report, one line per check, grouped by suite."""
    lines: List[str] = []
    lines.append("CORRWITNESS   VERIFICATION REPORT")
    lines.append("")
    suites = list(dict.fromkeys(r.suite for r in results))
    width = max((len(r.name) for r in results), default=0)
    for suite in suites:
        lines.append(f"----- {suite.capitalize()} -----")
        for r in (r for r in results if r.suite == suite):
            line = f"{r.status:<4}  {r.name:<{width}}  worst {r.worst:10.3e}  limit {r.limit:8.1e}"
            if r.detail:
                line += f"  ({r.detail})"
            lines.append(line)
        lines.append("")
    failed = sum(r.status != "PASS" for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
