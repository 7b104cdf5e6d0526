"""Dataset ingestion, splitting, and synthetic shift generators.

CSV handling is deliberately strict: every selected cell must parse to a
finite float (after optional per-column value encoding), and errors point at
the offending row and column. Generators are seed-deterministic, with the
source and target streams drawn from fixed seed offsets so the two sides are
independent but reproducible.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from sklearn.datasets import make_moons

from .exceptions import CsvError, EmptySplitError
from .validation import as_float_matrix, check_unique_columns

# Fixed seed offsets separating the source and target sample streams.
SOURCE_SEED_OFFSET = 0
TARGET_SEED_OFFSET = 7919

GENERATOR_KINDS = ("gaussian_mean_shift", "gmm_component_shift", "half_moons")


@dataclass
class TabularDataset:
    """Named-column matrix of finite reals; the unit every map consumes."""

    columns: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.columns = check_unique_columns(self.columns)
        self.values = as_float_matrix(self.values, "values")
        if len(self.columns) != self.values.shape[1]:
            raise ValueError(
                f"{len(self.columns)} column names for {self.values.shape[1]} data columns"
            )

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def select(self, columns) -> "TabularDataset":
        idx = [self.columns.index(c) for c in columns]
        return TabularDataset(list(columns), self.values[:, idx].copy())


def _parse_cell(raw: str, column: str, row_number: int, mapping) -> float:
    cell = raw.strip()
    if mapping is not None and cell in mapping:
        cell = mapping[cell]
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise CsvError(
            f"cell {raw!r} in column {column!r}, data row {row_number} is not numeric "
            "(and no value_map entry matches)",
            row=row_number,
            column=column,
        ) from None
    if not np.isfinite(value):
        raise CsvError(
            f"cell {raw!r} in column {column!r}, data row {row_number} is not finite",
            row=row_number,
            column=column,
        )
    return value


def read_csv_rows(path, column_names=None):
    """Raw string rows plus the header (given or taken from the first line)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise CsvError(f"cannot read {path}: {exc}") from exc
    if column_names is None:
        if not rows:
            raise CsvError(f"{path} is empty; expected a header row")
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        header = [str(c) for c in column_names]
    if not rows:
        raise CsvError(f"{path} contains no data rows")
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise CsvError(
                f"data row {i} has {len(row)} cells, expected {len(header)}", row=i
            )
    return header, rows


def _rows_to_dataset(header, rows, numeric_columns=None, value_map=None) -> TabularDataset:
    header = check_unique_columns(header)
    use = list(numeric_columns) if numeric_columns is not None else list(header)
    missing = [c for c in use if c not in header]
    if missing:
        raise CsvError(f"column(s) {missing} not found in header {header}")
    idx = [header.index(c) for c in use]
    value_map = value_map or {}
    data = np.empty((len(rows), len(use)))
    for i, row in enumerate(rows, start=1):
        for out_j, (j, col) in enumerate(zip(idx, use)):
            data[i - 1, out_j] = _parse_cell(row[j], col, i, value_map.get(col))
    return TabularDataset(use, data)


def load_csv(path, numeric_columns=None, value_map=None, column_names=None) -> TabularDataset:
    """Parse a CSV file into a numeric dataset.

    numeric_columns selects (and orders) the columns to keep; value_map maps
    raw cell strings to replacement values per column (e.g. encode an income
    bracket as 0/1) before float parsing. column_names supplies a header for
    headerless files.
    """
    header, rows = read_csv_rows(path, column_names=column_names)
    return _rows_to_dataset(header, rows, numeric_columns, value_map)


def write_csv(dataset: TabularDataset, path) -> None:
    """Write with full round-trip float precision (shortest repr)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.columns)
        for row in dataset.values:
            writer.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class SplitSpec:
    """Partition rule: rows whose split-column value falls in source_values go
    to the source side, target_values to the target; everything else drops."""

    column: str
    source_values: frozenset
    target_values: frozenset
    drop_split_column: bool = True

    def __post_init__(self):
        object.__setattr__(self, "source_values", frozenset(float(v) for v in self.source_values))
        object.__setattr__(self, "target_values", frozenset(float(v) for v in self.target_values))
        if self.source_values & self.target_values:
            raise ValueError("source_values and target_values must be disjoint")


def split_dataset(dataset: TabularDataset, spec: SplitSpec):
    """Split one dataset into (source, target) along a column's values."""
    if spec.column not in dataset.columns:
        raise ValueError(f"split column {spec.column!r} not in dataset columns {dataset.columns}")
    j = dataset.columns.index(spec.column)
    col = dataset.values[:, j]
    src_mask = np.isin(col, sorted(spec.source_values))
    tgt_mask = np.isin(col, sorted(spec.target_values))
    if not src_mask.any():
        raise EmptySplitError(f"no rows matched source_values on column {spec.column!r}")
    if not tgt_mask.any():
        raise EmptySplitError(f"no rows matched target_values on column {spec.column!r}")
    keep = [c for c in dataset.columns if not (spec.drop_split_column and c == spec.column)]
    keep_idx = [dataset.columns.index(c) for c in keep]
    src = TabularDataset(keep, dataset.values[np.ix_(src_mask, keep_idx)].copy())
    tgt = TabularDataset(keep, dataset.values[np.ix_(tgt_mask, keep_idx)].copy())
    return src, tgt


def split_csv(
    path,
    split_column: str,
    source_raw_values,
    target_raw_values,
    numeric_columns=None,
    value_map=None,
    column_names=None,
    drop_rows_containing=(),
):
    """Split a CSV on raw (string) cell values of one column, then parse sides.

    This is the ingestion path for categorical split columns (e.g. a sex or
    class label) that never become features. Rows containing any token in
    drop_rows_containing (after whitespace stripping) are discarded first.
    """
    header, rows = read_csv_rows(path, column_names=column_names)
    header = check_unique_columns(header)
    if split_column not in header:
        raise CsvError(f"split column {split_column!r} not found in header {header}")
    j = header.index(split_column)
    drop_tokens = {str(t) for t in drop_rows_containing}
    source_raw = {str(v) for v in source_raw_values}
    target_raw = {str(v) for v in target_raw_values}
    if source_raw & target_raw:
        raise ValueError("source and target split values must be disjoint")
    src_rows, tgt_rows = [], []
    for row in rows:
        cells = [c.strip() for c in row]
        if drop_tokens and any(c in drop_tokens for c in cells):
            continue
        if cells[j] in source_raw:
            src_rows.append(row)
        elif cells[j] in target_raw:
            tgt_rows.append(row)
    if not src_rows:
        raise EmptySplitError(f"no rows matched {sorted(source_raw)} on column {split_column!r}")
    if not tgt_rows:
        raise EmptySplitError(f"no rows matched {sorted(target_raw)} on column {split_column!r}")
    if numeric_columns is None:
        numeric_columns = [c for c in header if c != split_column]
    src = _rows_to_dataset(header, src_rows, numeric_columns, value_map)
    tgt = _rows_to_dataset(header, tgt_rows, numeric_columns, value_map)
    return src, tgt


@dataclass
class GeneratorSpec:
    """Parameters for one synthetic source/target pair."""

    kind: str
    n: int = 500
    d: int = 2
    seed: int = 0
    delta: list | None = None  # gaussian_mean_shift: target mean displacement
    means: list | None = None  # gmm_component_shift: component means (c x d)
    component_deltas: list | None = None  # gmm_component_shift: per-component shifts
    noise_scale: float | None = None  # gmm sigma / half-moons noise

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"kind must be one of {GENERATOR_KINDS}, got {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.noise_scale is not None and not self.noise_scale > 0:
            raise ValueError(f"noise_scale must be positive, got {self.noise_scale}")

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "GeneratorSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# Defaults for the GMM toy: two components swap places while the third cuts
# across them, so per-component translations exist but no 3-piece map matches
# the empirical OT displacement field.
_GMM_MEANS = ((0.0, 0.0), (5.0, 0.0), (2.5, 4.0))
_GMM_DELTAS = ((5.0, 0.0), (-5.0, 0.0), (0.0, -6.0))
_GMM_SIGMA = 0.8
_HALF_MOON_NOISE = 0.05
_HALF_MOON_SHIFT = (0.5, 0.5)


def _columns(d):
    return [f"x{j}" for j in range(d)]


def _gaussian_pair(spec: GeneratorSpec):
    delta = np.zeros(spec.d) if spec.delta is None else np.asarray(spec.delta, dtype=np.float64)
    if delta.shape != (spec.d,):
        raise ValueError(f"delta must have length d={spec.d}, got shape {delta.shape}")
    rng_src = np.random.default_rng(spec.seed + SOURCE_SEED_OFFSET)
    rng_tgt = np.random.default_rng(spec.seed + TARGET_SEED_OFFSET)
    src = rng_src.standard_normal((spec.n, spec.d))
    tgt = rng_tgt.standard_normal((spec.n, spec.d)) + delta
    return src, tgt


def _gmm_pair(spec: GeneratorSpec):
    means = np.asarray(spec.means if spec.means is not None else _GMM_MEANS, dtype=np.float64)
    deltas = np.asarray(
        spec.component_deltas if spec.component_deltas is not None else _GMM_DELTAS,
        dtype=np.float64,
    )
    if means.shape != deltas.shape:
        raise ValueError(f"means {means.shape} and component_deltas {deltas.shape} must match")
    sigma = spec.noise_scale if spec.noise_scale is not None else _GMM_SIGMA
    n_comp, d = means.shape

    def sample(rng, shift):
        comps = rng.integers(0, n_comp, size=spec.n)
        noise = sigma * rng.standard_normal((spec.n, d))
        return means[comps] + shift[comps] + noise

    rng_src = np.random.default_rng(spec.seed + SOURCE_SEED_OFFSET)
    rng_tgt = np.random.default_rng(spec.seed + TARGET_SEED_OFFSET)
    return sample(rng_src, np.zeros_like(deltas)), sample(rng_tgt, deltas)


def _half_moons_pair(spec: GeneratorSpec):
    noise = spec.noise_scale if spec.noise_scale is not None else _HALF_MOON_NOISE
    src, _ = make_moons(n_samples=spec.n, noise=noise, random_state=spec.seed + SOURCE_SEED_OFFSET)
    tgt, _ = make_moons(n_samples=spec.n, noise=noise, random_state=spec.seed + TARGET_SEED_OFFSET)
    tgt = tgt * np.array([1.0, -1.0]) + np.asarray(_HALF_MOON_SHIFT)
    return src, tgt


def generate(spec: GeneratorSpec):
    """Draw a (source, target) dataset pair; bit-identical for a given spec."""
    if spec.kind == "gaussian_mean_shift":
        src, tgt = _gaussian_pair(spec)
    elif spec.kind == "gmm_component_shift":
        src, tgt = _gmm_pair(spec)
    else:
        src, tgt = _half_moons_pair(spec)
    cols = _columns(src.shape[1])
    return TabularDataset(cols, src), TabularDataset(cols, tgt)


# ---------------------------------------------------------------------------
# Canonical UCI ingestion (files fetched separately; see scripts/fetch_uci.py)

WISCONSIN_COLUMNS = [
    "sample_id",
    "clump_thickness",
    "uniformity_cell_size",
    "uniformity_cell_shape",
    "marginal_adhesion",
    "single_epithelial_cell_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
    "class",
]

ADULT_COLUMNS = [
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education_num",
    "marital_status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital_gain",
    "capital_loss",
    "hours_per_week",
    "native_country",
    "income",
]


def load_wisconsin(path):
    """Breast-cancer file -> (benign source, malignant target), 9 features.

    Rows with missing cells ('?') are dropped before splitting.
    """
    return split_csv(
        path,
        split_column="class",
        source_raw_values={"2"},
        target_raw_values={"4"},
        numeric_columns=WISCONSIN_COLUMNS[1:-1],
        column_names=WISCONSIN_COLUMNS,
        drop_rows_containing={"?"},
    )


def load_adult(path):
    """Census income file -> (male source, female target) over
    {age, education_num, income}; income encoded 1 if >$50k else 0.

    Rows with missing cells ('?') are dropped before splitting.
    """
    return split_csv(
        path,
        split_column="sex",
        source_raw_values={"Male"},
        target_raw_values={"Female"},
        numeric_columns=["age", "education_num", "income"],
        value_map={"income": {">50K": "1", "<=50K": "0", ">50K.": "1", "<=50K.": "0"}},
        column_names=ADULT_COLUMNS,
        drop_rows_containing={"?"},
    )
