"""Report rendering: delimited data, a human-readable summary, and figures.

Every batch writes the same three data products into the output directory:

* ``timeseries.csv`` — one row per recorded step of every replicate, with
  ``replicate`` and ``seed`` as the first two columns; the remaining columns
  are the kind's row schema, identical across replicates.
* ``summary.csv`` — one row per replicate with its end-of-run scalars.
* ``summary.txt`` — batch header, per-replicate table, and aggregate
  statistics (mean/min/max over the numeric summary columns).

Plus one or more PNG figures giving a first look at the batch (see
:mod:`coevo.plots`). All text output is deterministic: identical RunLogs
produce byte-identical files regardless of worker count or platform.
CSV fields are quoted RFC-4180 style (quotes only where needed, doubled
quotes inside quoted fields) with ``\\n`` line endings.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, is_dataclass
from pathlib import Path

from .config import ExperimentConfig
from .engine import RunLog
from .errors import ReportError
from . import plots


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns: list[str], rows: list[list]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format_value(v) for v in row])
    path.write_text(buffer.getvalue())


def _timeseries_table(logs: list[RunLog]) -> tuple[list[str], list[list]]:
    first = logs[0].timeseries
    keys = list(first[0].keys()) if first else []
    columns = ["replicate", "seed"] + keys
    rows = []
    for log in logs:
        for record in log.timeseries:
            rows.append([log.replicate, log.seed] + [record[k] for k in keys])
    return columns, rows


def _summary_table(logs: list[RunLog]) -> tuple[list[str], list[list]]:
    keys = list(logs[0].summary.keys())
    columns = ["replicate", "seed"] + keys
    rows = [[log.replicate, log.seed] + [log.summary[k] for k in keys] for log in logs]
    return columns, rows


def _settings_lines(config: ExperimentConfig) -> list[str]:
    def flatten(prefix: str, obj) -> list[str]:
        if is_dataclass(obj) and not isinstance(obj, type):
            items = asdict(obj)
            lines: list[str] = []
            for key, value in items.items():
                name = f"{prefix}{key}"
                if isinstance(value, dict):
                    lines.extend(
                        f"  {name}.{sub} = {_format_value(v)}" for sub, v in value.items()
                    )
                else:
                    lines.append(f"  {name} = {_format_value(value)}")
            return lines
        return [f"  {prefix} = {_format_value(obj)}"]

    return flatten("", config.settings)


def _aggregate_lines(logs: list[RunLog]) -> list[str]:
    lines = []
    for key in logs[0].summary:
        values = [log.summary[key] for log in logs]
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            mean = sum(values) / len(values)
            lines.append(
                f"  {key}: mean={mean:.6g} min={min(values):.6g} max={max(values):.6g}"
            )
        else:
            counts: dict[str, int] = {}
            for v in values:
                counts[str(v)] = counts.get(str(v), 0) + 1
            joined = ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
            lines.append(f"  {key}: {joined}")
    return lines


def _summary_text(config: ExperimentConfig, logs: list[RunLog], files: list[str]) -> str:
    columns, rows = _summary_table(logs)
    widths = [
        max(len(c), *(len(_format_value(r[i])) for r in rows))
        for i, c in enumerate(columns)
    ]
    header = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    body = [
        "  ".join(_format_value(v).ljust(w) for v, w in zip(row, widths))
        for row in rows
    ]
    lines = [
        f"{config.kind} batch report",
        "=" * (len(config.kind) + len(" batch report")),
        "",
        f"replicates: {len(logs)}",
        f"base seed:  {logs[0].seed}",
        "settings:",
        *_settings_lines(config),
        "",
        "per-replicate summary:",
        f"  {header}",
        *(f"  {b}" for b in body),
        "",
        "aggregates over replicates:",
        *_aggregate_lines(logs),
        "",
        "files:",
        *(f"  {name}" for name in files),
        "",
    ]
    return "\n".join(lines)


def write_reports(
    logs: list[RunLog],
    config: ExperimentConfig,
    out_dir: str | Path,
    figures: bool = True,
) -> dict[str, Path]:
    """Render a batch to ``out_dir``; returns the paths written.

    Always writes ``timeseries.csv``, ``summary.csv`` and ``summary.txt``;
    with ``figures=True`` also renders the kind's PNG figures alongside.
    """
    if not logs:
        raise ReportError("no run logs to report")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create output directory {out}: {exc}") from exc

    paths: dict[str, Path] = {}
    ts_columns, ts_rows = _timeseries_table(logs)
    paths["timeseries"] = out / "timeseries.csv"
    _write_csv(paths["timeseries"], ts_columns, ts_rows)

    sm_columns, sm_rows = _summary_table(logs)
    paths["summary_csv"] = out / "summary.csv"
    _write_csv(paths["summary_csv"], sm_columns, sm_rows)

    figure_paths: list[Path] = []
    if figures:
        figure_paths = plots.make_figures(config.kind, logs, out)
        for fp in figure_paths:
            paths[fp.stem] = fp

    file_names = ["timeseries.csv", "summary.csv", "summary.txt"] + [
        fp.name for fp in figure_paths
    ]
    paths["summary_txt"] = out / "summary.txt"
    paths["summary_txt"].write_text(_summary_text(config, logs, file_names))
    return paths
