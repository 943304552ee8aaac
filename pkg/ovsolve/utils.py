"""
Utility functions: CSV and JSON writers and readers
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np


PathLike = Union[str, Path]

FLOAT_FORMAT = "%.16e"   # 17 significant digits


def format_value(value: Any) -> str:
    """
    Format one CSV cell

    Example:
        >>> format_value(0.1)
        '1.0000000000000001e-01'
        >>> format_value("I")
        'I'
    """
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return FLOAT_FORMAT % float(value)
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows with a header line; floats use FLOAT_FORMAT"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv_columns(path: PathLike, required: Sequence[str] = ()) -> Dict[str, np.ndarray]:
    """
    Read a headed numeric CSV into float columns

    Raises:
        FileNotFoundError: If the file does not exist
        ValueError: If a required column is missing or a cell is not a number
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        fields = [name.strip() for name in (reader.fieldnames or [])]
        missing = [c for c in required if c not in fields]
        if missing:
            raise ValueError(f"{path}: missing columns {missing} (found {fields})")
        columns: Dict[str, List[float]] = {name: [] for name in fields}
        for line, row in enumerate(reader, start=2):
            for key, cell in row.items():
                try:
                    columns[key.strip()].append(float(cell))
                except (TypeError, ValueError):
                    raise ValueError(f"{path}:{line}: column '{key}' is not numeric: {cell!r}")
    return {k: np.asarray(v, dtype=float) for k, v in columns.items()}


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Write JSON with sorted keys; complex numbers become {re, im}"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(payload), f, sort_keys=True, indent=2)
        f.write("\n")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"JSON file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
