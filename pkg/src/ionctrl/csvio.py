"""CSV emission with a reproducible provenance header.

Every output starts with `# key=value` comment lines (tool version,
scenario hash, seed, task extras) and one `# generated_utc=` timestamp
line; the timestamp is the only line excluded when outputs are compared
byte for byte.  Numeric values are written with 13 significant digits.
"""

from __future__ import annotations

import datetime
from pathlib import Path


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12e}"
    return str(value)


def write_csv(path, columns, rows, provenance: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for key, value in provenance.items():
        lines.append(f"# {key}={format_value(value)}")
    stamp = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    lines.append(f"# generated_utc={stamp.isoformat()}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def strip_timestamp(text: str) -> str:
    """Drop the timestamp line, for byte-comparing two outputs."""
    return "\n".join(
        line for line in text.splitlines() if not line.startswith("# generated_utc=")
    )
