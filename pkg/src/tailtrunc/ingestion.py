"""Reading observation files into sorted samples."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import DatasetError
from .sample import SortedSample


@dataclass(frozen=True)
class DatasetSpec:
    """Where and how to read observations.

    ``column`` selects a field of a delimited file by header name or 0-based
    index; leave it ``None`` for one-value-per-line files. Values below
    ``min_threshold`` are dropped (values equal to it are kept).
    """

    path: Union[str, Path]
    column: Optional[Union[str, int]] = None
    delimiter: str = ","
    min_threshold: Optional[float] = None


def _parse_float(text: str, lineno: int) -> float:
    try:
        v = float(text.strip())
    except ValueError:
        raise DatasetError(f"line {lineno}: cannot parse {text.strip()!r} as a number") from None
    return v


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_text(text: str, column=None, delimiter: str = ",", min_threshold=None,
               source: str = "<string>") -> SortedSample:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DatasetError(f"{source}: no data lines")
    values, bad = [], []

    if column is None and all(delimiter not in ln for _, ln in lines):
        rows = lines
        # a single non-numeric first line is treated as a header
        if not _is_number(rows[0][1].strip()):
            rows = rows[1:]
        for lineno, ln in rows:
            values.append((lineno, _parse_float(ln, lineno)))
    else:
        reader = csv.reader(io.StringIO("\n".join(ln for _, ln in lines)), delimiter=delimiter)
        records = list(zip((i for i, _ in lines), reader))
        header = records[0][1]
        has_header = not all(_is_number(c) for c in header if c.strip())
        if isinstance(column, str) and not column.lstrip("-").isdigit():
            if not has_header:
                raise DatasetError(f"{source}: column {column!r} requested but no header line")
            names = [h.strip() for h in header]
            if column not in names:
                raise DatasetError(f"{source}: column {column!r} not found in header {names}")
            idx = names.index(column)
        else:
            idx = 0 if column is None else int(column)
        body = records[1:] if has_header else records
        for lineno, row in body:
            if idx >= len(row) or idx < -len(row):
                raise DatasetError(f"line {lineno}: no column {idx}")
            values.append((lineno, _parse_float(row[idx], lineno)))

    for lineno, v in values:
        if not (v > 0) or not np.isfinite(v):
            bad.append(f"line {lineno}: value {v!r} is not positive and finite")
    if bad:
        raise DatasetError(f"{source}: " + "; ".join(bad))
    arr = np.array([v for _, v in values], dtype=float)
    if min_threshold is not None:
        arr = arr[arr >= min_threshold]
    if arr.size < 2:
        raise DatasetError(f"{source}: fewer than 2 values after filtering")
    return SortedSample.from_values(arr)


def load(spec: Union[DatasetSpec, str, Path]) -> SortedSample:
    """Read, validate, filter and sort the observations described by ``spec``."""
    if not isinstance(spec, DatasetSpec):
        spec = DatasetSpec(spec)
    path = Path(spec.path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror or exc}") from exc
    return parse_text(text, spec.column, spec.delimiter, spec.min_threshold, str(path))


def dumps(sample: SortedSample) -> str:
    """One value per line, shortest round-trip decimal form."""
    return "".join(f"{v!r}\n" for v in sample.values.tolist())


def save(sample: SortedSample, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(sample), encoding="utf-8")
