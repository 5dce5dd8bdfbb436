"""Series files, parameter configs and result tables.

Series are comma-separated with one header row. Parameter configs are YAML
documents of the form::

    model: habit
    provenance: where the numbers come from
    params: {alpha: 2.0, beta: 0.89, ...}
    preferences: {alpha: ..., beta: ...}   # optional companion record
    defaults: {...}                        # optional command defaults

Two-state configs may give ``moments`` instead of ``params``; the chain is
then calibrated from them at load time. Bundled configs live in the package's
``configs`` directory; ``PREMIA_CONFIG_DIR`` names a directory searched first.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from .calibration import GROWTH_KINDS, TwoStateParams, calibrate_two_state
from .core import LogNormalGrowth, MomentTargets, PreferenceParams, TimeSeries
from .disaster import DisasterSpec
from .errors import EmptyFile, InvariantViolation, NotFound, ParseError, SchemaError
from .habit import HabitParams
from .lrr import LrrParams

BUNDLED_CONFIG_DIR = Path(__file__).resolve().parent / "configs"
CONFIG_DIR_ENV = "PREMIA_CONFIG_DIR"

# plain decimal or scientific notation, dot separator only
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


def parse_number(text: str) -> float:
    """Locale-independent float parsing; raises ``ValueError`` on anything else."""
    text = text.strip()
    if not _NUMBER.match(text):
        raise ValueError(f"not a number: {text!r}")
    return float(text)


def _label(text: str):
    text = text.strip()
    if _INTEGER.match(text):
        return int(text)
    if _NUMBER.match(text):
        return float(text)
    return text


# ---------------------------------------------------------------- series


@dataclass(frozen=True)
class DatasetManifest:
    """Where a series lives and how to read it.

    ``kind`` is one of ``levels``, ``gross_growth``, ``log_growth`` or
    ``log_levels`` and must be given explicitly, as must a provenance note.
    """

    path: str
    kind: str
    provenance: str
    period_column: str = "period"
    value_column: str = "value"

    def __post_init__(self):
        if self.kind not in GROWTH_KINDS:
            raise SchemaError(f"kind must be one of {GROWTH_KINDS}, got {self.kind!r}")
        if not str(self.provenance).strip():
            raise SchemaError("a dataset manifest needs a non-empty provenance note")


def parse_series(text: str, period_column: str = "period", value_column: str = "value") -> TimeSeries:
    """Parse CSV text into a series; line numbers in errors are 1-based."""
    lines = text.splitlines()
    rows = list(csv.reader(lines))
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise EmptyFile("file is empty")
    header_line, header = numbered[0]
    header = [h.strip() for h in header]
    for col in (period_column, value_column):
        if col not in header:
            raise ParseError(f"missing column {col!r} in header {header}", header_line)
    ip, iv = header.index(period_column), header.index(value_column)
    labels, values = [], []
    for line, row in numbered[1:]:
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", line)
        try:
            value = parse_number(row[iv])
        except ValueError:
            raise ParseError(f"non-numeric value {row[iv].strip()!r}", line) from None
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {row[iv].strip()!r}", line)
        if not row[ip].strip():
            raise ParseError("empty period label", line)
        labels.append(_label(row[ip]))
        values.append(value)
    if not values:
        raise EmptyFile("file has a header but no data rows")
    return TimeSeries(tuple(labels), np.array(values))


def load_series(manifest: DatasetManifest) -> TimeSeries:
    path = Path(manifest.path)
    data = path.read_bytes()
    if not data.strip():
        raise EmptyFile(f"{path} is empty")
    return parse_series(data.decode("utf-8-sig"), manifest.period_column, manifest.value_column)


def write_series(series: TimeSeries, path, period_column: str = "period", value_column: str = "value") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([period_column, value_column])
        for label, value in zip(series.timestamps, series.values):
            w.writerow([label, repr(float(value))])


# ---------------------------------------------------------------- configs

_RECORDS = {
    "preferences": PreferenceParams,
    "lognormal": LogNormalGrowth,
    "moments": MomentTargets,
    "two_state": TwoStateParams,
    "disaster": DisasterSpec,
    "habit": HabitParams,
    "lrr": LrrParams,
}
_MODEL_OF = {cls: name for name, cls in _RECORDS.items()}
_TOP_KEYS = {"model", "name", "provenance", "params", "moments", "preferences", "defaults"}


@dataclass(frozen=True, eq=False)
class ModelConfig:
    """A loaded config: the validated record plus its companions."""

    name: str
    model: str
    record: Any
    provenance: str
    preferences: PreferenceParams | None = None
    moments: MomentTargets | None = None
    defaults: dict = field(default_factory=dict)
    path: str | None = None


def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        # YAML 1.1 reads exponents without a dot (1e-3) as strings
        try:
            return parse_number(value)
        except ValueError:
            pass
    raise SchemaError(f"{where}: expected a number, got {value!r}")


def _build(model: str, raw, where: str):
    if model not in _RECORDS:
        raise SchemaError(f"unknown model {model!r}; expected one of {sorted(_RECORDS)}")
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected a mapping")
    raw = dict(raw)
    orthodox = None
    if model == "preferences":
        orthodox = raw.pop("orthodox", None)
        if "delta" in raw:
            if "beta" in raw:
                raise SchemaError(f"{where}: give beta or delta, not both")
            raw["beta"] = math.exp(-_number(raw.pop("delta"), f"{where}.delta"))
    if model == "lrr" and "theta" in raw:
        # theta is derived; accept it only as a consistency check
        theta = _number(raw.pop("theta"), f"{where}.theta")
    else:
        theta = None
    names = [f.name for f in dataclasses.fields(_RECORDS[model])]
    unknown = set(raw) - set(names)
    missing = set(names) - set(raw)
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")
    if missing:
        raise SchemaError(f"{where}: missing keys {sorted(missing)}")
    values = {k: _number(raw[k], f"{where}.{k}") for k in names}
    record = _RECORDS[model](**values)
    if orthodox is not None:
        if not isinstance(orthodox, bool):
            raise SchemaError(f"{where}.orthodox must be true or false")
        if orthodox != record.orthodox:
            raise InvariantViolation(f"orthodox={orthodox} contradicts beta={record.beta}")
    if theta is not None and abs(theta - record.theta) > 1e-12 * max(1.0, abs(record.theta)):
        raise InvariantViolation(f"theta={theta} contradicts (1 - alpha)/(1 - 1/ies) = {record.theta}")
    return record


def parse_config(text: str, name: str = "<string>", path: str | None = None) -> ModelConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", None)
        raise ParseError(f"invalid config: {exc}", None if line is None else line + 1) from None
    if doc is None:
        raise EmptyFile(f"config {name} is empty")
    if not isinstance(doc, dict):
        raise SchemaError("config must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise SchemaError(f"unknown top-level keys {sorted(unknown)}")
    model = doc.get("model")
    if not isinstance(model, str):
        raise SchemaError("config needs a 'model' string")
    provenance = doc.get("provenance")
    if not isinstance(provenance, str) or not provenance.strip():
        raise SchemaError("config needs a non-empty 'provenance' string")

    moments = _build("moments", doc["moments"], "moments") if "moments" in doc else None
    if "params" in doc:
        record = _build(model, doc["params"], "params")
    elif model == "two_state" and moments is not None:
        record = calibrate_two_state(moments)
    elif model == "moments" and moments is not None:
        record = moments
    else:
        raise SchemaError("config needs a 'params' section")
    prefs = _build("preferences", doc["preferences"], "preferences") if "preferences" in doc else None
    defaults = doc.get("defaults") or {}
    if not isinstance(defaults, dict):
        raise SchemaError("'defaults' must be a mapping")
    return ModelConfig(
        name=str(doc.get("name", name)),
        model=model,
        record=record,
        provenance=provenance.strip(),
        preferences=prefs,
        moments=moments,
        defaults=defaults,
        path=path,
    )


def config_search_path() -> list[Path]:
    dirs = []
    override = os.environ.get(CONFIG_DIR_ENV)
    if override:
        dirs.append(Path(override))
    dirs.append(BUNDLED_CONFIG_DIR)
    return dirs


def resolve_config(name_or_path) -> Path:
    """A file path as given, else ``<name>.yaml`` in the search path."""
    p = Path(name_or_path)
    if p.is_file():
        return p
    for d in config_search_path():
        for candidate in (d / f"{name_or_path}.yaml", d / str(name_or_path)):
            if candidate.is_file():
                return candidate
    raise NotFound(f"no config named {str(name_or_path)!r} in {[str(d) for d in config_search_path()]}")


def load_config(name_or_path) -> ModelConfig:
    path = resolve_config(name_or_path)
    return parse_config(path.read_text(encoding="utf-8"), name=path.stem, path=str(path))


def load_model_config(name_or_path):
    """The validated parameter record of a config."""
    return load_config(name_or_path).record


def list_configs() -> list[str]:
    names = set()
    for d in config_search_path():
        if d.is_dir():
            names.update(p.stem for p in d.glob("*.yaml"))
    return sorted(names)


def record_to_dict(record) -> dict:
    return {f.name: float(getattr(record, f.name)) for f in dataclasses.fields(record)}


def dump_model_config(record, provenance: str, name: str | None = None, defaults: dict | None = None) -> str:
    """YAML text that :func:`parse_config` turns back into an equal record."""
    model = _MODEL_OF.get(type(record))
    if model is None:
        raise SchemaError(f"cannot serialize {type(record).__name__}")
    doc: dict = {"model": model}
    if name is not None:
        doc["name"] = name
    doc["provenance"] = provenance
    doc["params"] = record_to_dict(record)
    if defaults:
        doc["defaults"] = defaults
    return yaml.safe_dump(doc, sort_keys=False)


# ---------------------------------------------------------------- tables


def format_value(value) -> str:
    """Six significant digits for floats (round-half-even on the binary value)."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0:
            v = 0.0  # drop the sign of -0.0
        return f"{v:#.6g}"
    return str(value)


def format_table(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Aligned plain-text table: right-aligned columns separated by two spaces."""
    cells = [list(columns)] + [[format_value(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def csv_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def table_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    """CSV with one header row and full-precision floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([csv_value(v) for v in row])
    return buf.getvalue()


def write_table_csv(path, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
    Path(path).write_text(table_csv(columns, rows), encoding="utf-8")
