from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

__all__ = [
    "guarantee_existence",
    "write_csv",
    "read_csv",
    "write_json",
]


def guarantee_existence(path: Path) -> Path:
    if not path.exists():
        path.mkdir(parents=True)
    return path.resolve(strict=True)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    append: bool = False,
) -> Path:
    """Write ``rows`` under ``header``.

    With ``append=True`` rows are added to an existing file and the header is
    only written when the file is new, so run directories grow append-only.
    """
    path = Path(path)
    guarantee_existence(path.parent)
    is_new = not path.exists() or not append
    with path.open("a" if append else "w", newline="") as handle:
        writer = csv.writer(handle)
        if is_new:
            writer.writerow(header)
        writer.writerows(rows)
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as handle:
        return list(csv.DictReader(handle))


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    guarantee_existence(path.parent)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    return path
