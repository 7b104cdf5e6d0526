"""Interpretable transport map families as sklearn-style estimators.

Every family follows the same protocol: ``fit(X, Y)`` learns a map from a
source sample ``X`` onto a target sample ``Y``, ``transform(X)`` pushes rows
forward, and ``get_params``/``set_params`` come from the sklearn base class so
the estimators compose with the wider ecosystem.

Families, ordered by expressiveness:

* :class:`VectorShift`: one constant displacement (the mean-shift baseline).
* :class:`KSparseMeanShift`: mean shift restricted to k feature columns.
* :class:`KSparseOTShift`: copies the optimal-transport image coordinate on
  k columns, leaves the rest untouched (training-set-local).
* :class:`KClusterShift`: k paired clusters, each translated by its own
  displacement vector.
"""

from __future__ import annotations

import json
import warnings

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cluster import seeded_kmeans
from .ot import OTConfig, solve_ot
from .validation import as_float_matrix, check_k, check_paired_matrices, feature_names_of

STRATEGIES = ("mean_gap", "ot_displacement")
VARIANTS = ("vector", "k_sparse_mean", "k_sparse_ot", "k_cluster")


def select_active_set(X, Y, k: int, strategy: str = "mean_gap", ot_images=None) -> np.ndarray:
    """Pick the k feature columns a sparse map is allowed to move.

    mean_gap scores a column by |mean(Y) - mean(X)|; ot_displacement by the
    total squared displacement the OT point map applies to it. Returns indices
    ordered by descending score, ties broken toward the lower index.
    """
    X, Y = check_paired_matrices(X, Y)
    d = X.shape[1]
    k = check_k(k, d)
    if strategy == "mean_gap":
        scores = np.abs(Y.mean(axis=0) - X.mean(axis=0))
    elif strategy == "ot_displacement":
        if ot_images is None:
            raise ValueError("strategy 'ot_displacement' requires ot_images")
        ot_images = as_float_matrix(ot_images, "ot_images")
        scores = ((X - ot_images) ** 2).sum(axis=0)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    order = np.lexsort((np.arange(d), -scores))
    return order[:k]


class BaseShiftMap(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing for all map families."""

    variant: str = ""

    def _start_fit(self, X, Y):
        names = feature_names_of(X) or feature_names_of(Y)
        X, Y = check_paired_matrices(X, Y)
        self.n_features_in_ = X.shape[1]
        if names is not None:
            self.feature_names_in_ = np.asarray(names, dtype=object)
        return X, Y

    def _check_transform_input(self, X):
        check_is_fitted(self)
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features but the map was fitted on {self.n_features_in_}"
            )
        return X

    def push_forward(self, X) -> np.ndarray:
        """Alias for :meth:`transform`."""
        return self.transform(X)

    def _columns_or_none(self):
        names = getattr(self, "feature_names_in_", None)
        return None if names is None else [str(c) for c in names]

    def _column_label(self, j: int) -> str:
        names = getattr(self, "feature_names_in_", None)
        return str(names[j]) if names is not None else f"x{j}"

    def to_dict(self) -> dict:
        check_is_fitted(self)
        return {"variant": self.variant, "columns": self._columns_or_none(), **self._payload()}

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    def _restore_columns(self, d: dict) -> None:
        if d.get("columns") is not None:
            self.feature_names_in_ = np.asarray(d["columns"], dtype=object)


class VectorShift(BaseShiftMap):
    """Constant displacement by the target-minus-source mean gap."""

    variant = "vector"

    def fit(self, X, Y):
        X, Y = self._start_fit(X, Y)
        self.delta_ = Y.mean(axis=0) - X.mean(axis=0)
        return self

    def transform(self, X) -> np.ndarray:
        X = self._check_transform_input(X)
        return X + self.delta_

    def _payload(self) -> dict:
        return {"delta": self.delta_.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "VectorShift":
        est = cls()
        est.delta_ = np.asarray(d["delta"], dtype=np.float64)
        est.n_features_in_ = est.delta_.size
        est._restore_columns(d)
        return est

    def describe(self) -> list[str]:
        lines = ["delta (target mean - source mean):"]
        for j, v in enumerate(self.delta_):
            lines.append(f"  {self._column_label(j)}: {v:+.6g}")
        return lines


class _SparseShiftMixin:
    """Active-set bookkeeping shared by the two k-sparse families."""

    def _fit_active_set(self, X, Y, ot_images):
        self.active_set_ = select_active_set(X, Y, self.k, self.strategy, ot_images=ot_images)
        return self.active_set_

    def active_columns(self) -> list[str]:
        check_is_fitted(self)
        return [self._column_label(j) for j in self.active_set_]

    def _sparse_payload(self) -> dict:
        return {
            "k": int(self.k),
            "strategy": self.strategy,
            "active_indices": [int(j) for j in self.active_set_],
            "active_columns": self.active_columns(),
        }


class KSparseMeanShift(BaseShiftMap, _SparseShiftMixin):
    """Mean shift on the k most-shifted feature columns, zero elsewhere."""

    variant = "k_sparse_mean"

    def __init__(self, k: int = 1, strategy: str = "mean_gap", ot_config: OTConfig | None = None):
        self.k = k
        self.strategy = strategy
        self.ot_config = ot_config

    def fit(self, X, Y, ot_images=None):
        X, Y = self._start_fit(X, Y)
        if self.strategy == "ot_displacement" and ot_images is None:
            ot_images = solve_ot(X, Y, self.ot_config, with_images=True).images
        active = self._fit_active_set(X, Y, ot_images)
        delta = np.zeros(X.shape[1])
        delta[active] = (Y.mean(axis=0) - X.mean(axis=0))[active]
        self.delta_ = delta
        return self

    def transform(self, X) -> np.ndarray:
        X = self._check_transform_input(X)
        out = X.copy()  # inactive coordinates stay bit-identical
        out[:, self.active_set_] += self.delta_[self.active_set_]
        return out

    def _payload(self) -> dict:
        return {**self._sparse_payload(), "delta": self.delta_.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "KSparseMeanShift":
        est = cls(k=d["k"], strategy=d["strategy"])
        est.delta_ = np.asarray(d["delta"], dtype=np.float64)
        est.active_set_ = np.asarray(d["active_indices"], dtype=int)
        est.n_features_in_ = est.delta_.size
        est._restore_columns(d)
        return est

    def describe(self) -> list[str]:
        lines = [f"active set (k={self.k}, strategy={self.strategy}):"]
        for j in self.active_set_:
            lines.append(f"  {self._column_label(j)}: {self.delta_[j]:+.6g}")
        return lines


class KSparseOTShift(BaseShiftMap, _SparseShiftMixin):
    """Optimal transport restricted to k feature columns.

    Defined pointwise on the training source rows via the empirical OT plan;
    there is no out-of-sample extension, so ``transform`` only accepts the
    exact rows the map was fitted on.
    """

    variant = "k_sparse_ot"

    def __init__(
        self, k: int = 1, strategy: str = "ot_displacement", ot_config: OTConfig | None = None
    ):
        self.k = k
        self.strategy = strategy
        self.ot_config = ot_config

    def fit(self, X, Y, ot_images=None):
        X, Y = self._start_fit(X, Y)
        if ot_images is None:
            ot_images = solve_ot(X, Y, self.ot_config, with_images=True).images
        else:
            ot_images = as_float_matrix(ot_images, "ot_images")
        active = self._fit_active_set(X, Y, ot_images)
        images = X.copy()
        images[:, active] = ot_images[:, active]
        self.images_ = images
        self.source_rows_ = X
        return self

    def transform(self, X) -> np.ndarray:
        X = self._check_transform_input(X)
        if X.shape[0] != self.source_rows_.shape[0] or not np.array_equal(X, self.source_rows_):
            raise ValueError(
                "k-sparse OT maps are defined pointwise on their training rows; "
                "transform expects exactly the fitted source data"
            )
        return self.images_.copy()

    def _payload(self) -> dict:
        return {
            **self._sparse_payload(),
            "source_rows": self.source_rows_.tolist(),
            "images": self.images_.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KSparseOTShift":
        est = cls(k=d["k"], strategy=d["strategy"])
        est.active_set_ = np.asarray(d["active_indices"], dtype=int)
        est.source_rows_ = np.asarray(d["source_rows"], dtype=np.float64)
        est.images_ = np.asarray(d["images"], dtype=np.float64)
        est.n_features_in_ = est.source_rows_.shape[1]
        est._restore_columns(d)
        return est

    def describe(self) -> list[str]:
        moved = self.images_ - self.source_rows_
        lines = [f"active set (k={self.k}, strategy={self.strategy}), mean |move| per column:"]
        for j in self.active_set_:
            lines.append(f"  {self._column_label(j)}: {np.abs(moved[:, j]).mean():.6g}")
        return lines


class KClusterShift(BaseShiftMap):
    """Paired-cluster transport: k clusters, each moved by its own delta.

    Joint clustering runs on the standardized concatenation of the source rows
    and their OT images (standardized by the source feature-wise mean/std);
    centroids and deltas are reported in original units as per-cluster member
    means.
    """

    variant = "k_cluster"

    def __init__(
        self,
        k: int = 1,
        restarts: int = 10,
        random_state: int = 0,
        ot_config: OTConfig | None = None,
    ):
        self.k = k
        self.restarts = restarts
        self.random_state = random_state
        self.ot_config = ot_config

    def fit(self, X, Y, ot_images=None):
        X, Y = self._start_fit(X, Y)
        check_k(self.k, X.shape[0], what="source rows")
        if ot_images is None:
            ot_images = solve_ot(X, Y, self.ot_config, with_images=True).images
        else:
            ot_images = as_float_matrix(ot_images, "ot_images")

        mu = X.mean(axis=0)
        sigma = X.std(axis=0)
        if (sigma == 0).any():
            warnings.warn(
                "zero-variance column(s) during standardization; using sigma=1 so they stay inert",
                RuntimeWarning,
            )
            sigma = np.where(sigma == 0, 1.0, sigma)
        self.scale_mu_ = mu
        self.scale_sigma_ = sigma

        Z = np.hstack([(X - mu) / sigma, (ot_images - mu) / sigma])
        _, labels, _ = seeded_kmeans(Z, self.k, self.random_state, restarts=self.restarts)

        # Present clusters largest-first; relabelling is cosmetic but stable.
        counts = np.bincount(labels, minlength=self.k)
        order = np.lexsort((np.arange(self.k), -counts))
        src_centroids = np.empty((self.k, X.shape[1]))
        tgt_centroids = np.empty((self.k, X.shape[1]))
        for new_idx, old_idx in enumerate(order):
            members = labels == old_idx
            src_centroids[new_idx] = X[members].mean(axis=0)
            tgt_centroids[new_idx] = ot_images[members].mean(axis=0)
        self.source_centroids_ = src_centroids
        self.target_centroids_ = tgt_centroids
        self.deltas_ = tgt_centroids - src_centroids
        self.member_counts_ = counts[order]
        return self

    def assign(self, X) -> np.ndarray:
        """Nearest source centroid in standardized coordinates, per row."""
        X = self._check_transform_input(X)
        scaled = (X - self.scale_mu_) / self.scale_sigma_
        scaled_centroids = (self.source_centroids_ - self.scale_mu_) / self.scale_sigma_
        return np.argmin(cdist(scaled, scaled_centroids, "sqeuclidean"), axis=1)

    def transform(self, X) -> np.ndarray:
        X = self._check_transform_input(X)
        return X + self.deltas_[self.assign(X)]

    def _payload(self) -> dict:
        return {
            "k": int(self.k),
            "restarts": int(self.restarts),
            "random_state": int(self.random_state),
            "source_centroids": self.source_centroids_.tolist(),
            "target_centroids": self.target_centroids_.tolist(),
            "deltas": self.deltas_.tolist(),
            "standardizer": {"mu": self.scale_mu_.tolist(), "sigma": self.scale_sigma_.tolist()},
            "member_counts": [int(c) for c in self.member_counts_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KClusterShift":
        est = cls(k=d["k"], restarts=d["restarts"], random_state=d["random_state"])
        est.source_centroids_ = np.asarray(d["source_centroids"], dtype=np.float64)
        est.target_centroids_ = np.asarray(d["target_centroids"], dtype=np.float64)
        est.deltas_ = np.asarray(d["deltas"], dtype=np.float64)
        est.scale_mu_ = np.asarray(d["standardizer"]["mu"], dtype=np.float64)
        est.scale_sigma_ = np.asarray(d["standardizer"]["sigma"], dtype=np.float64)
        est.member_counts_ = np.asarray(d["member_counts"], dtype=int)
        est.n_features_in_ = est.source_centroids_.shape[1]
        est._restore_columns(d)
        return est

    def describe(self) -> list[str]:
        lines = []
        for c in range(self.k):
            lines.append(f"cluster {c} ({int(self.member_counts_[c])} members):")
            for j in range(self.n_features_in_):
                lines.append(
                    f"  {self._column_label(j)}: "
                    f"{self.source_centroids_[c, j]:.6g} -> {self.target_centroids_[c, j]:.6g} "
                    f"(delta {self.deltas_[c, j]:+.6g})"
                )
        return lines


def assign_cluster(x, shift_map: KClusterShift) -> int:
    """Cluster index of a single point under a fitted k-cluster map."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return int(shift_map.assign(x)[0])


_VARIANT_CLASSES = {
    "vector": VectorShift,
    "k_sparse_mean": KSparseMeanShift,
    "k_sparse_ot": KSparseOTShift,
    "k_cluster": KClusterShift,
}


def make_shift_map(family: str, **kwargs) -> BaseShiftMap:
    """Instantiate an unfitted map family by variant name."""
    if family not in _VARIANT_CLASSES:
        raise ValueError(f"unknown map family {family!r}; expected one of {VARIANTS}")
    cls = _VARIANT_CLASSES[family]
    if family == "vector":
        return cls()
    if family != "k_cluster":
        kwargs.pop("restarts", None)
        kwargs.pop("random_state", None)
    else:
        kwargs.pop("strategy", None)
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return cls(**kwargs)


def shift_map_from_dict(d: dict) -> BaseShiftMap:
    """Rebuild a fitted map from its JSON payload (see ``to_dict``)."""
    variant = d.get("variant")
    if variant not in _VARIANT_CLASSES:
        raise ValueError(f"unknown shift map variant {variant!r}")
    return _VARIANT_CLASSES[variant].from_dict(d)


def load_shift_map(path) -> BaseShiftMap:
    with open(path, encoding="utf-8") as fh:
        return shift_map_from_dict(json.load(fh))
