"""Scores for fitted maps: transport cost, PercentExplained, objective.

PercentExplained normalizes how much of the source-to-target gap a map closes,

    100 * (W2^2(src, tgt) - W2^2(mapped src, tgt)) / W2^2(src, tgt),

an R^2-style score: 100 means perfect alignment, 0 is the identity map, and
negative values mean the map made things worse. Both distances are always
evaluated with the same solver configuration so solver bias partially cancels.

The per-sample sums below use exact (fsum) accumulation, which keeps the
closed-form identities of the sparse families true to the last bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NothingToExplainError
from .ot import OTConfig, solve_ot, w2_squared
from .validation import check_same_shape


def _mean_squared_rows(diff: np.ndarray) -> float:
    return math.fsum((diff * diff).ravel()) / diff.shape[0]


def transport_cost(X, images) -> float:
    """Average squared distance each source row is moved: (1/N) sum ||x_i - T(x_i)||^2."""
    X, images = check_same_shape(X, images, "source", "images")
    return _mean_squared_rows(X - images)


def distance_to_ot(images, ot_images) -> float:
    """Average squared gap to the OT point map: (1/N) sum ||T(x_i) - T_OT(x_i)||^2."""
    images, ot_images = check_same_shape(images, ot_images, "images", "ot_images")
    return _mean_squared_rows(images - ot_images)


def empirical_objective(X, images, ot_images, lam: float = 1.0) -> float:
    """Transport cost plus lam times the distance-to-OT penalty."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    return transport_cost(X, images) + lam * distance_to_ot(images, ot_images)


def percent_explained(X, Y, images, config: OTConfig | None = None, *, baseline: float | None = None) -> float:
    """How much of the shift the mapped rows close, on a 0-100 scale.

    ``baseline`` may carry a precomputed W2^2(X, Y) from the same config (the
    sweep does this); both distance evaluations must share one config.
    Raises NothingToExplainError when the baseline distance is zero.
    """
    if baseline is None:
        baseline = w2_squared(X, Y, config)
    if baseline <= 0:
        raise NothingToExplainError(
            "W2^2(source, target) is zero; the distributions already match and "
            "there is nothing to explain"
        )
    return 100.0 * (baseline - w2_squared(images, Y, config)) / baseline


@dataclass
class ExplanationReport:
    """One fitted map with its scores and the configuration that produced it."""

    variant: str
    transport_cost: float
    distance_to_ot: float
    percent_explained: float
    objective: float
    lam: float
    config: dict
    map: dict = field(repr=False)
    n_source: int = 0
    n_target: int = 0
    note: str | None = None

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.__dict__, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ExplanationReport":
        return cls(**json.loads(text))


def evaluate_map(
    shift_map,
    X,
    Y,
    *,
    lam: float = 1.0,
    ot_config: OTConfig | None = None,
    ot_images=None,
    baseline: float | None = None,
) -> ExplanationReport:
    """Score a fitted map against the source/target pair it explains.

    ``ot_images`` and ``baseline`` accept precomputed values from the same
    config; anything missing is solved here.
    """
    if ot_images is None or baseline is None:
        sol = solve_ot(X, Y, ot_config, with_images=ot_images is None)
        if ot_images is None:
            ot_images = sol.images
        if baseline is None:
            baseline = sol.cost
    images = shift_map.transform(X)
    cost = transport_cost(X, images)
    dist = distance_to_ot(images, ot_images)
    pe = percent_explained(X, Y, images, ot_config, baseline=baseline)
    cfg = ot_config or OTConfig()
    note = None
    if pe < 0:
        note = "negative PercentExplained: this map moves the source away from the target"
    params = shift_map.get_params()
    return ExplanationReport(
        variant=shift_map.variant,
        transport_cost=cost,
        distance_to_ot=dist,
        percent_explained=pe,
        objective=cost + lam * dist,
        lam=lam,
        config={
            "k": params.get("k"),
            "strategy": params.get("strategy"),
            "lambda": lam,
            "restarts": params.get("restarts"),
            "random_state": params.get("random_state"),
            "ot": cfg.to_dict(),
        },
        map=shift_map.to_dict(),
        n_source=np.asarray(getattr(X, "values", X)).shape[0],
        n_target=np.asarray(getattr(Y, "values", Y)).shape[0],
        note=note,
    )


_TABLE_COLUMNS = ("k", "variant", "transport_cost", "distance_to_ot", "percent_explained")


def _report_cells(report: ExplanationReport) -> list[str]:
    k = report.config.get("k")
    return [
        "" if k is None else str(k),
        report.variant,
        format(report.transport_cost, ".6g"),
        format(report.distance_to_ot, ".6g"),
        format(report.percent_explained, ".6g"),
    ]


def render_report_table(reports) -> str:
    """Aligned plain-text rows of (k, variant, cost, distance, percent explained)."""
    rows = [list(_TABLE_COLUMNS)] + [_report_cells(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(_TABLE_COLUMNS))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines)


def render_report_csv(reports) -> str:
    lines = [",".join(_TABLE_COLUMNS)]
    for r in reports:
        lines.append(",".join(_report_cells(r)))
    return "\n".join(lines)
