"""CSV readers/writers and run manifests shared by the CLI."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from . import __version__
from .fit import ChoiceRecord
from .raicr import VoteLedger


class DataError(ValueError):
    """Malformed or unusable input data."""


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.9g}"
    return str(value)


def write_csv(rows: Iterable[Sequence], header: Sequence[str], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def render_csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    write_csv(rows, header, buf)
    return buf.getvalue()


def _read_rows(path: Path, required: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in required if c not in (reader.fieldnames or [])]
            if missing:
                raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
            return list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc


def read_guesses(path: Path) -> list[tuple[str, str]]:
    """Rows of ``question_id,guess``; guesses stay raw strings for cleaning."""
    return [(row["question_id"], row["guess"]) for row in _read_rows(path, ("question_id", "guess"))]


def _parse_bool(text: str, where: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true"):
        return True
    if t in ("0", "false"):
        return False
    raise DataError(f"{where}: expected 0/1, got {text!r}")


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"{where}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{where}: non-finite value {text!r}")
    return v


def _parse_count(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise DataError(f"{where}: expected an integer count, got {text!r}") from None


def read_choices(path: Path) -> list[ChoiceRecord]:
    rows = _read_rows(path, ("a_first", "a_last", "chose_first"))
    records = []
    for i, row in enumerate(rows, start=2):
        where = f"{path}:{i}"
        records.append(ChoiceRecord(_parse_float(row["a_first"], where), _parse_float(row["a_last"], where),
                                    _parse_bool(row["chose_first"], where)))
    return records


def read_ledgers(path: Path) -> list[tuple[str, VoteLedger]]:
    rows = _read_rows(path, ("answer_id", "n_t", "N_t", "n_b", "N_b"))
    out = []
    for i, row in enumerate(rows, start=2):
        where = f"{path}:{i}"
        counts = {k: _parse_count(row[k], where) for k in ("n_t", "N_t", "n_b", "N_b")}
        try:
            out.append((row["answer_id"], VoteLedger(**counts)))
        except ValueError as exc:
            raise DataError(f"{where}: {exc}") from None
    return out


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int | None
    version: str = __version__
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"


def manifest_path(output: Path) -> Path:
    return output.with_name(output.name + ".manifest.json")
