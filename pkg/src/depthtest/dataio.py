"""Reading two-sample datasets from CSV and scenario configurations from JSON."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

from .depth import DepthKind, DepthSpec
from .errors import DepthTestError, DomainError, EmptyGroup, MissingColumn, NonFiniteValue, ParseError, SchemaError
from .sampler import Mixture, MVN, mvn
from .simlab import Calibration, ScenarioConfig
from .teststat import StatSpec

SCHEMA_VERSION = 1
CAMPAIGN_PROJECTION_DIRECTIONS = 100

Column = Union[str, int]

BREAST_CANCER_FEATURES = ["Age", "BMI", "Glucose", "Insulin", "HOMA", "Leptin", "Adiponectin", "Resistin", "MCP.1"]
WINE_FEATURES = [
    "fixed acidity", "volatile acidity", "citric acid", "residual sugar", "chlorides", "free sulfur dioxide",
    "total sulfur dioxide", "density", "pH", "sulphates", "alcohol",
]

# Column mappings for the two public datasets; files are supplied by the user.
PROFILES: dict[str, dict[str, Any]] = {
    "breast-cancer": {
        "feature_columns": BREAST_CANCER_FEATURES,
        "group_column": "Classification",
        "group_values": ("1", "2"),  # healthy controls, patients
    },
    "wine": {
        "feature_columns": WINE_FEATURES,
        "group_column": "quality",
        "group_values": ("4", "5"),
    },
}


@dataclass(frozen=True)
class DatasetConfig:
    """Where the two samples live.

    Either ``path`` with ``group_column`` and ``group_values`` (one file, rows
    split by a label column), or ``x_path`` and ``y_path`` (one file per
    sample).  ``feature_columns`` of ``None`` selects every column other than
    the group column.  ``delimiter`` of ``None`` is sniffed from the header
    line among comma, semicolon and tab.
    """

    path: Optional[str] = None
    feature_columns: Optional[Sequence[Column]] = None
    group_column: Optional[Column] = None
    group_values: Optional[tuple[str, str]] = None
    x_path: Optional[str] = None
    y_path: Optional[str] = None
    has_header: bool = True
    delimiter: Optional[str] = None
    standardize: bool = False

    def __post_init__(self):
        grouped = self.path is not None
        two_file = self.x_path is not None or self.y_path is not None
        if grouped == two_file:
            raise DomainError("give either a single file with a group column or two files")
        if grouped and (self.group_column is None or self.group_values is None):
            raise DomainError("single-file mode needs group_column and group_values")
        if two_file and (self.x_path is None or self.y_path is None):
            raise DomainError("two-file mode needs both x_path and y_path")
        if self.feature_columns is not None and len(self.feature_columns) == 0:
            raise DomainError("feature_columns must not be empty")

    @classmethod
    def from_profile(cls, name: str, path: str, **overrides) -> "DatasetConfig":
        if name not in PROFILES:
            raise DomainError(f"unknown profile {name!r}; known: {sorted(PROFILES)}")
        return cls(path=path, **{**PROFILES[name], **overrides})


def _sniff(first_line: str) -> str:
    counts = {d: first_line.count(d) for d in (",", ";", "\t")}
    best = max(counts, key=counts.get)
    return best if counts[best] else ","


def _read_table(path: str, has_header: bool, delimiter: Optional[str]) -> tuple[list[str], list[tuple[int, list[str]]]]:
    text = Path(path).read_text(encoding="utf-8-sig")
    lines = text.splitlines()
    delim = delimiter or _sniff(lines[0] if lines else "")
    rows = list(csv.reader(lines, delimiter=delim))
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if has_header:
        if not numbered:
            return [], []
        header = [h.strip() for h in numbered[0][1]]
        return header, numbered[1:]
    width = max((len(r) for _, r in numbered), default=0)
    return [str(i) for i in range(width)], numbered


def _resolve(col: Column, header: list[str], path: str) -> int:
    if isinstance(col, int) or (isinstance(col, str) and col.isdigit() and col not in header):
        idx = int(col)
        if not 0 <= idx < len(header):
            raise MissingColumn(f"column index {idx} out of range in {path} ({len(header)} columns)")
        return idx
    if col in header:
        return header.index(col)
    folded = [h.lower() for h in header]
    if col.lower() in folded:
        return folded.index(col.lower())
    raise MissingColumn(f"column {col!r} not found in {path}; available: {header}")


def _parse_cell(text: str, line: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(line, col, text) from None
    if not math.isfinite(value):
        raise NonFiniteValue(line, col, text)
    return value


def _extract(rows, idx: Sequence[int], header: list[str]) -> np.ndarray:
    out = np.empty((len(rows), len(idx)))
    for r, (line, cells) in enumerate(rows):
        for c, k in enumerate(idx):
            cell = cells[k].strip() if k < len(cells) else ""
            out[r, c] = _parse_cell(cell, line, header[k])
    return out


def _label_matches(cell: str, label: str) -> bool:
    cell, label = cell.strip(), str(label).strip()
    if cell == label:
        return True
    try:
        return float(cell) == float(label)
    except ValueError:
        return False


def _feature_indices(cfg: DatasetConfig, header: list[str], path: str, exclude: Optional[int]) -> list[int]:
    if cfg.feature_columns is None:
        return [i for i in range(len(header)) if i != exclude]
    return [_resolve(c, header, path) for c in cfg.feature_columns]


def standardize_pooled(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Z-score both samples with the mean and standard deviation of the pooled sample."""
    pooled = np.vstack([x, y])
    mu = pooled.mean(axis=0)
    sd = pooled.std(axis=0, ddof=1)
    sd[sd == 0] = 1.0
    return (x - mu) / sd, (y - mu) / sd


def load_two_samples(cfg: DatasetConfig) -> tuple[np.ndarray, np.ndarray]:
    """Read the two samples described by ``cfg``; file row order is preserved.

    Raises
    ------
    MissingColumn, ParseError, NonFiniteValue, EmptyGroup
        Each names the file location that caused it.
    """
    if cfg.path is not None:
        header, rows = _read_table(cfg.path, cfg.has_header, cfg.delimiter)
        g = _resolve(cfg.group_column, header, cfg.path)
        idx = _feature_indices(cfg, header, cfg.path, g)
        samples = []
        for label in cfg.group_values:
            sel = [(line, cells) for line, cells in rows if g < len(cells) and _label_matches(cells[g], label)]
            if not sel:
                raise EmptyGroup(f"no rows with {header[g]} == {label!r} in {cfg.path}")
            samples.append(_extract(sel, idx, header))
        x, y = samples
    else:
        parts = []
        for path in (cfg.x_path, cfg.y_path):
            header, rows = _read_table(path, cfg.has_header, cfg.delimiter)
            if not rows:
                raise EmptyGroup(f"{path} has no data rows")
            parts.append(_extract(rows, _feature_indices(cfg, header, path, None), header))
        x, y = parts
        if x.shape[1] != y.shape[1]:
            raise MissingColumn(f"{cfg.x_path} and {cfg.y_path} yield {x.shape[1]} and {y.shape[1]} columns")
    if cfg.standardize:
        x, y = standardize_pooled(x, y)
    return x, y


# --- scenario documents -------------------------------------------------------------


def _require(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise SchemaError(path, "expected an object")
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "required field is missing")
    return doc[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value, path: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    if value < minimum:
        raise SchemaError(path, f"must be >= {minimum}, got {value}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise SchemaError(path, "expected a non-empty array")
    return value


def _dist(doc, path: str):
    kind = _require(doc, "kind", path)
    if kind == "mvn":
        mean = [_number(v, f"{path}.mean[{i}]") for i, v in enumerate(_list(_require(doc, "mean", path), f"{path}.mean"))]
        rows = _list(_require(doc, "cov", path), f"{path}.cov")
        cov = [[_number(v, f"{path}.cov[{i}][{j}]") for j, v in enumerate(_list(r, f"{path}.cov[{i}]"))]
               for i, r in enumerate(rows)]
        if len(cov) != len(mean) or any(len(r) != len(mean) for r in cov):
            raise SchemaError(f"{path}.cov", f"must be {len(mean)} x {len(mean)}")
        try:
            return mvn(mean, cov)
        except DepthTestError as exc:
            raise SchemaError(f"{path}.cov", str(exc)) from None
    if kind == "mixture":
        weights = [_number(v, f"{path}.weights[{i}]")
                   for i, v in enumerate(_list(_require(doc, "weights", path), f"{path}.weights"))]
        comps = tuple(_dist(c, f"{path}.components[{i}]")
                      for i, c in enumerate(_list(_require(doc, "components", path), f"{path}.components")))
        if any(not isinstance(c, MVN) for c in comps):
            raise SchemaError(f"{path}.components", "mixture components must be mvn")
        try:
            return Mixture(np.array(weights), comps)
        except DepthTestError as exc:
            raise SchemaError(f"{path}.weights", str(exc)) from None
    raise SchemaError(f"{path}.kind", f"unknown distribution kind {kind!r}")


def _depth(doc, path: str) -> DepthSpec:
    kind = _require(doc, "kind", path)
    try:
        kind = DepthKind(kind)
    except ValueError:
        raise SchemaError(f"{path}.kind", f"unknown depth {kind!r}") from None
    directions = _integer(doc.get("directions", CAMPAIGN_PROJECTION_DIRECTIONS), f"{path}.directions", 1)
    seed = _integer(doc.get("seed", 0), f"{path}.seed", 0)
    return DepthSpec(kind, directions, seed)


def _stat(doc, path: str) -> StatSpec:
    kind = _require(doc, "kind", path)
    try:
        if kind == "W":
            omega = doc.get("omega", "n/(m+n)")
            return StatSpec.W(None if omega == "n/(m+n)" else _number(omega, f"{path}.omega"))
        if kind == "M":
            return StatSpec.M()
        if kind == "E":
            return StatSpec.E(_number(_require(doc, "lambda", path), f"{path}.lambda"))
        if kind == "R":
            return StatSpec.R(_number(_require(doc, "lambda", path), f"{path}.lambda"),
                              _number(_require(doc, "theta", path), f"{path}.theta"))
    except DomainError as exc:
        raise SchemaError(path, str(exc)) from None
    raise SchemaError(f"{path}.kind", f"unknown statistic {kind!r}")


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    """Validate a scenario document and build the :class:`ScenarioConfig`."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    version = _integer(_require(doc, "schema_version", "$"), "$.schema_version", 1)
    if version != SCHEMA_VERSION:
        raise SchemaError("$.schema_version", f"unsupported version {version}")
    name = _require(doc, "name", "$")
    if not isinstance(name, str) or not name:
        raise SchemaError("$.name", "expected a non-empty string")
    F = _dist(_require(doc, "F", "$"), "$.F")
    G = _dist(_require(doc, "G", "$"), "$.G")
    if F.dim != G.dim:
        raise SchemaError("$.G", "F and G differ in dimension")
    sizes = []
    for i, pair in enumerate(_list(_require(doc, "sizes", "$"), "$.sizes")):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"$.sizes[{i}]", "expected [m, n]")
        sizes.append((_integer(pair[0], f"$.sizes[{i}][0]", 2), _integer(pair[1], f"$.sizes[{i}][1]", 2)))
    depths = tuple(_depth(d, f"$.depths[{i}]") for i, d in enumerate(_list(_require(doc, "depths", "$"), "$.depths")))
    stats = tuple(_stat(s, f"$.stats[{i}]") for i, s in enumerate(_list(_require(doc, "stats", "$"), "$.stats")))
    alpha = _number(_require(doc, "alpha", "$"), "$.alpha")
    if not 0.0 < alpha < 1.0:
        raise SchemaError("$.alpha", f"must lie in (0, 1), got {alpha}")
    reps = _integer(_require(doc, "replications", "$"), "$.replications", 1)
    cal_doc = doc.get("calibration", {"mode": "asymptotic"})
    mode = _require(cal_doc, "mode", "$.calibration")
    if mode == "asymptotic":
        calibration = Calibration()
    elif mode == "empirical":
        calibration = Calibration("empirical", _integer(_require(cal_doc, "B", "$.calibration"), "$.calibration.B", 1))
    else:
        raise SchemaError("$.calibration.mode", f"unknown mode {mode!r}")
    seed = _integer(doc.get("master_seed", 0), "$.master_seed", 0)
    return ScenarioConfig(name, F, G, tuple(sizes), depths, stats, alpha, reps, calibration, seed)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    cal = {"mode": config.calibration.mode}
    if config.calibration.mode == "empirical":
        cal["B"] = config.calibration.B
    return {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "F": config.F.to_dict(),
        "G": config.G.to_dict(),
        "sizes": [list(s) for s in config.sizes],
        "depths": [{"kind": d.kind.value, "directions": d.directions, "seed": d.seed} for d in config.depths],
        "stats": [s.to_dict() for s in config.stats],
        "alpha": config.alpha,
        "replications": config.replications,
        "calibration": cal,
        "master_seed": config.master_seed,
    }


def parse_scenario(path) -> ScenarioConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return scenario_from_dict(doc)


def bundled_scenario(name: str) -> Path:
    here = Path(__file__).parent / "scenarios"
    candidate = here / (name if name.endswith(".json") else f"{name}.json")
    if not candidate.exists():
        raise FileNotFoundError(f"no bundled scenario {name!r}")
    return candidate


def with_replications(config: ScenarioConfig, reps: int) -> ScenarioConfig:
    return replace(config, replications=reps)
