"""CSV time-series reader.

Dialect: comma separator, ``.`` decimal point, ``\\n`` or ``\\r\\n`` line
endings.  Optional ``# key=value`` comment lines before the header carry
per-series metadata; the reserved key ``target`` sets the class label.
Columns: optional ``time``, then either ``value`` (+ optional ``error``) or
``value_0..value_{C-1}`` (+ optional ``error_0..error_{C-1}``).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..core import ChannelData, TimeSeries, ValidationError, validate_time_series


class CsvFormatError(ValidationError):
    """Malformed time-series CSV; the message carries the line number."""


def _parse_header(columns: list[str]) -> tuple[bool, int, bool]:
    """Returns (has_time, n_channels, has_errors)."""
    cols = [c.strip() for c in columns]
    has_time = bool(cols) and cols[0] == "time"
    rest = cols[1:] if has_time else cols
    if rest == ["value"]:
        return has_time, 1, False
    if rest == ["value", "error"]:
        return has_time, 1, True
    n = 0
    while n < len(rest) and rest[n] == f"value_{n}":
        n += 1
    if n >= 1:
        if len(rest) == n:
            return has_time, n, False
        if rest[n:] == [f"error_{i}" for i in range(n)]:
            return has_time, n, True
    raise CsvFormatError(
        "header must be [time,] value[,error] or [time,] value_0..[,error_0..]; "
        f"got: {', '.join(cols)}"
    )


def read_time_series_csv(path: str | Path) -> TimeSeries:
    """Parse one CSV file into a valid TimeSeries named after the file stem."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()

    metadata: dict[str, str | float] = {}
    target: str | None = None
    line_no = 0
    for line in lines:
        if not line.strip() or line.lstrip().startswith("#"):
            line_no += 1
            stripped = line.strip().lstrip("#").strip()
            if "=" in stripped:
                key, _, raw = stripped.partition("=")
                key, raw = key.strip(), raw.strip()
                if key == "target":
                    target = raw
                else:
                    try:
                        metadata[key] = float(raw)
                    except ValueError:
                        metadata[key] = raw
            continue
        break
    if line_no >= len(lines):
        raise CsvFormatError(f"line {len(lines) + 1}: no header row")

    header_line = line_no + 1
    has_time, n_channels, has_errors = _parse_header(lines[line_no].split(","))
    n_cols = (1 if has_time else 0) + n_channels * (2 if has_errors else 1)

    rows: list[list[float]] = []
    for offset, line in enumerate(lines[header_line:], start=header_line + 1):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != n_cols:
            raise CsvFormatError(
                f"line {offset}: expected {n_cols} columns, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _is_number(c))
            raise CsvFormatError(
                f"line {offset}: non-numeric value {bad.strip()!r}"
            ) from None
    if not rows:
        raise CsvFormatError(f"line {len(lines) + 1}: no data rows")

    data = np.array(rows, dtype=np.float64)
    times = data[:, 0] if has_time else None
    if times is not None and len(times) > 1:
        bad = np.nonzero(np.diff(times) <= 0)[0]
        if bad.size:
            raise CsvFormatError(
                f"line {header_line + int(bad[0]) + 2}: times not strictly increasing"
            )
    base = 1 if has_time else 0
    channels = []
    for c in range(n_channels):
        errors = data[:, base + n_channels + c] if has_errors else None
        channels.append(
            ChannelData(values=data[:, base + c], times=times, errors=errors)
        )
    ts = TimeSeries(
        name=path.stem, channels=tuple(channels), target=target, metadata=metadata
    )
    violations = validate_time_series(ts)
    if violations:
        raise CsvFormatError(f"{path.name}: " + "; ".join(violations))
    return ts


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_time_series_csv(ts: TimeSeries, path: str | Path) -> None:
    """Write a TimeSeries whose channels share one time grid (or none)."""
    grids = {tuple(ch.times) if ch.times is not None else None for ch in ts.channels}
    if len(grids) != 1:
        raise ValidationError("channels must share a single time grid for CSV")
    lengths = {len(ch) for ch in ts.channels}
    if len(lengths) != 1:
        raise ValidationError("channels must share one length for CSV")
    has_errors = all(ch.errors is not None for ch in ts.channels)
    if not has_errors and any(ch.errors is not None for ch in ts.channels):
        raise ValidationError("either every channel has errors or none for CSV")

    lines = []
    if ts.target is not None:
        lines.append(f"# target={ts.target}")
    for key, value in ts.metadata.items():
        lines.append(f"# {key}={value}")
    single = len(ts.channels) == 1
    header = []
    times = ts.channels[0].times
    if times is not None:
        header.append("time")
    header.extend(
        ["value"] if single else [f"value_{c}" for c in range(len(ts.channels))]
    )
    if has_errors:
        header.extend(
            ["error"] if single else [f"error_{c}" for c in range(len(ts.channels))]
        )
    lines.append(",".join(header))
    n = len(ts.channels[0])
    for i in range(n):
        cells = []
        if times is not None:
            cells.append(repr(float(times[i])))
        cells.extend(repr(float(ch.values[i])) for ch in ts.channels)
        if has_errors:
            cells.extend(repr(float(ch.errors[i])) for ch in ts.channels)
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
