"""Fit one map family across a range of k and report the fidelity frontier.

The OT plan and the baseline W2^2(source, target) are solved once and shared
by every k (the solvers are deterministic, so this matches per-k recomputation
number-for-number). Cluster fits draw their seed from (base seed, k) so each
k keeps an honest, reproducible restart sequence.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ShiftExplainError
from .maps import VARIANTS, make_shift_map
from .metrics import evaluate_map
from .ot import OTConfig, solve_ot
from .validation import check_paired_matrices, feature_names_of

CSV_HEADER = "k,family,transport_cost,distance_to_ot,percent_explained,wall_time_ms"


def derive_k_seed(base_seed: int, k: int) -> int:
    """Stable per-k seed so sweep rows match direct fits with the same seeds."""
    return int(np.random.SeedSequence((int(base_seed), int(k))).generate_state(1)[0])


@dataclass
class SweepRow:
    k: int
    transport_cost: float | None = None
    distance_to_ot: float | None = None
    percent_explained: float | None = None
    wall_time_ms: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    family: str
    rows: list[SweepRow]
    config: dict
    maps: list[dict] | None = field(default=None, repr=False)

    def row_for(self, k: int) -> SweepRow:
        for row in self.rows:
            if row.k == k:
                return row
        raise KeyError(f"no sweep row for k={k}")

    def to_json(self, indent: int | None = 2) -> str:
        payload = {
            "family": self.family,
            "config": self.config,
            "rows": [row.__dict__ for row in self.rows],
            "maps": self.maps,
        }
        return json.dumps(payload, indent=indent)


def sweep_result_from_json(text: str) -> SweepResult:
    d = json.loads(text)
    return SweepResult(
        family=d["family"],
        rows=[SweepRow(**row) for row in d["rows"]],
        config=d["config"],
        maps=d.get("maps"),
    )


def _check_k_values(k_values, family: str, n_rows: int, n_features: int) -> list[int]:
    ks = [int(k) for k in k_values]
    if not ks:
        raise ValueError("k_values must be non-empty")
    if len(set(ks)) != len(ks):
        raise ValueError(f"k_values contains duplicates: {sorted(ks)}")
    upper, what = (n_rows, "source rows") if family == "k_cluster" else (n_features, "features")
    for k in ks:
        if not 1 <= k <= upper:
            raise ValueError(f"k={k} out of range: must be between 1 and {upper} ({what})")
    return sorted(ks)


def run_sweep(
    X,
    Y,
    family: str,
    k_values,
    *,
    strategy: str | None = None,
    lam: float = 1.0,
    ot_config: OTConfig | None = None,
    random_state: int = 0,
    restarts: int = 10,
    keep_maps: bool = False,
) -> SweepResult:
    """One scored row per k; per-k failures are recorded, not fatal."""
    if family not in VARIANTS:
        raise ValueError(f"unknown map family {family!r}; expected one of {VARIANTS}")
    columns = feature_names_of(X)
    X, Y = check_paired_matrices(X, Y)
    ks = _check_k_values(k_values, family, X.shape[0], X.shape[1])
    cfg = ot_config or OTConfig()

    # Shared across every k: the OT point map and the baseline distance.
    sol = solve_ot(X, Y, cfg, with_images=True)
    baseline = sol.cost
    ot_images = sol.images

    X_in = _named(X, columns)
    rows: list[SweepRow] = []
    maps: list[dict] = []
    for k in ks:
        try:
            shift_map = make_shift_map(
                family,
                k=k,
                strategy=strategy,
                ot_config=cfg,
                restarts=restarts,
                random_state=derive_k_seed(random_state, k),
            )
            t0 = time.perf_counter()
            if family == "vector":
                shift_map.fit(X_in, Y)
            else:
                shift_map.fit(X_in, Y, ot_images=ot_images)
            wall_ms = (time.perf_counter() - t0) * 1e3
            report = evaluate_map(
                shift_map, X, Y, lam=lam, ot_config=cfg, ot_images=ot_images, baseline=baseline
            )
            rows.append(
                SweepRow(
                    k=k,
                    transport_cost=report.transport_cost,
                    distance_to_ot=report.distance_to_ot,
                    percent_explained=report.percent_explained,
                    wall_time_ms=wall_ms,
                )
            )
            if keep_maps:
                maps.append(report.map)
        except (ShiftExplainError, ValueError) as exc:
            rows.append(SweepRow(k=k, error=str(exc)))
            if keep_maps:
                maps.append(None)
    return SweepResult(
        family=family,
        rows=rows,
        config={
            "family": family,
            "strategy": strategy,
            "lambda": lam,
            "random_state": random_state,
            "restarts": restarts,
            "ot": cfg.to_dict(),
            "baseline_w2": baseline,
        },
        maps=maps if keep_maps else None,
    )


def _named(X: np.ndarray, columns):
    if columns is None:
        return X
    from .data import TabularDataset

    return TabularDataset(list(columns), X)


def _fmt(value, table: bool) -> str:
    if value is None:
        return ""
    return format(value, ".6g") if table else repr(float(value))


def render_sweep(result: SweepResult, fmt: str = "table") -> str:
    """Deterministic text rendering: 'table' (no timings), 'csv', or 'json'."""
    if not result.rows:
        raise ValueError("cannot render an empty sweep result")
    if fmt == "json":
        return result.to_json()
    if fmt == "csv":
        lines = [CSV_HEADER]
        for row in result.rows:
            lines.append(
                ",".join(
                    [
                        str(row.k),
                        result.family,
                        _fmt(row.transport_cost, table=False),
                        _fmt(row.distance_to_ot, table=False),
                        _fmt(row.percent_explained, table=False),
                        _fmt(row.wall_time_ms, table=False),
                    ]
                )
            )
        return "\n".join(lines)
    if fmt == "table":
        # Wall time is intentionally absent here: table output is the default
        # CLI rendering and must be byte-identical across reruns.
        header = ["k", "family", "transport_cost", "distance_to_ot", "percent_explained"]
        if any(row.error for row in result.rows):
            header.append("error")
        cells = [header]
        for row in result.rows:
            line = [
                str(row.k),
                result.family,
                _fmt(row.transport_cost, table=True),
                _fmt(row.distance_to_ot, table=True),
                _fmt(row.percent_explained, table=True),
            ]
            if len(header) == 6:
                line.append(row.error or "")
            cells.append(line)
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        return "\n".join(
            "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells
        )
    raise ValueError(f"unknown render format {fmt!r}; expected table, csv or json")
