"""Discrete optimal transport between empirical samples with uniform masses.

Three solver routes, all over the squared Euclidean ground cost:

* equal sample counts: exact linear assignment (permutation plan),
* unequal counts with N*M below ``exact_size_limit``: exact transportation LP,
* anything larger: log-domain Sinkhorn iteration (entropic approximation).

Plans are returned as dense coupling matrices; :func:`barycentric_map` turns a
plan into a point map by averaging each source row's matched targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from .exceptions import ConvergenceError, DegeneratePlanError, SizeLimitExceededError
from .validation import check_paired_matrices

# Scale-free default: epsilon = this fraction of the mean pairwise squared distance.
DEFAULT_EPSILON_SCALE = 0.01

# Iterations spent at each epsilon level of the warm-start schedule.
_WARM_ITERS_PER_LEVEL = 5


@dataclass(frozen=True)
class OTConfig:
    """Solver configuration.

    solver
        "exact", "sinkhorn", or "auto" (exact when N*M <= exact_size_limit,
        Sinkhorn above it).
    epsilon
        Entropic regularization strength. None means scale-free:
        0.01 * mean pairwise squared distance of the instance.
    max_iters, convergence_tol
        Sinkhorn iteration budget and relative marginal tolerance.
    exact_size_limit
        Largest N*M the exact solvers accept.
    """

    solver: str = "auto"
    epsilon: float | None = None
    max_iters: int = 10_000
    convergence_tol: float = 1e-9
    exact_size_limit: int = 250_000

    def __post_init__(self):
        if self.solver not in ("exact", "sinkhorn", "auto"):
            raise ValueError(f"solver must be 'exact', 'sinkhorn' or 'auto', got {self.solver!r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.exact_size_limit < 1:
            raise ValueError("exact_size_limit must be a positive integer")

    def resolved_solver(self, n_source: int, n_target: int) -> str:
        if self.solver != "auto":
            return self.solver
        return "exact" if n_source * n_target <= self.exact_size_limit else "sinkhorn"

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "epsilon": self.epsilon,
            "max_iters": self.max_iters,
            "convergence_tol": self.convergence_tol,
            "exact_size_limit": self.exact_size_limit,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OTConfig":
        return cls(**d)


@dataclass
class TransportPlan:
    """A nonnegative coupling between source and target samples.

    Row sums match ``source_masses`` and column sums match ``target_masses``
    (within tolerance for entropic plans); total mass is 1.
    """

    weights: np.ndarray
    source_masses: np.ndarray
    target_masses: np.ndarray

    @property
    def n_source(self) -> int:
        return self.weights.shape[0]

    @property
    def n_target(self) -> int:
        return self.weights.shape[1]

    def marginal_violation(self) -> float:
        """Largest relative deviation of a row/column sum from its mass."""
        row = np.abs(self.weights.sum(axis=1) - self.source_masses) / self.source_masses
        col = np.abs(self.weights.sum(axis=0) - self.target_masses) / self.target_masses
        return float(max(row.max(), col.max()))

    def validate(self, rel_tol: float = 1e-6) -> "TransportPlan":
        if self.weights.min() < 0:
            raise ValueError("transport plan contains a negative weight")
        violation = self.marginal_violation()
        if violation > rel_tol:
            raise ValueError(f"transport plan marginals violated: max relative error {violation:.3e}")
        return self


@dataclass
class OTSolution:
    """A solved instance: the coupling and its transport cost <plan, C>."""

    plan: TransportPlan
    cost: float
    epsilon: float | None = None
    iterations: int | None = None
    images: np.ndarray | None = field(default=None, repr=False)


def squared_cost_matrix(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, the ground cost everywhere here."""
    return cdist(X, Y, "sqeuclidean")


def _uniform_masses(n: int, m: int):
    return np.full(n, 1.0 / n), np.full(m, 1.0 / m)


def exact_ot_plan(X, Y, config: OTConfig | None = None) -> TransportPlan:
    """Exact optimal coupling of two uniform empirical measures.

    Equal sizes solve a linear assignment (the plan is a permutation matrix
    scaled by 1/N); unequal sizes solve the transportation LP. Raises
    SizeLimitExceededError when N*M exceeds ``config.exact_size_limit``.
    """
    X, Y = check_paired_matrices(X, Y)
    config = config or OTConfig()
    n, m = X.shape[0], Y.shape[0]
    if n * m > config.exact_size_limit:
        raise SizeLimitExceededError(
            f"exact solver limited to N*M <= {config.exact_size_limit}, got {n * m}; "
            "use the sinkhorn solver instead"
        )
    C = squared_cost_matrix(X, Y)
    return _exact_plan_from_cost(C)


def _exact_plan_from_cost(C: np.ndarray) -> TransportPlan:
    n, m = C.shape
    a, b = _uniform_masses(n, m)
    if n == m:
        rows, cols = linear_sum_assignment(C)
        weights = np.zeros((n, m))
        weights[rows, cols] = 1.0 / n
        return TransportPlan(weights, a, b)
    return _transportation_lp(C, a, b)


def _transportation_lp(C: np.ndarray, a: np.ndarray, b: np.ndarray) -> TransportPlan:
    n, m = C.shape
    # Equality constraints: n row sums then m column sums; the final column
    # constraint is redundant (total masses agree) and dropping it plus
    # presolve makes HiGHS markedly faster on this structure.
    var = np.arange(n * m)
    row_idx = np.concatenate([np.repeat(np.arange(n), m), n + var % m])
    A = sparse.coo_matrix(
        (np.ones(2 * n * m), (row_idx, np.concatenate([var, var]))),
        shape=(n + m, n * m),
    ).tocsr()[:-1]
    rhs = np.concatenate([a, b])[:-1]
    res = linprog(
        C.ravel(),
        A_eq=A,
        b_eq=rhs,
        bounds=(0, None),
        method="highs-ds",
        options={"presolve": False},
    )
    if res.status != 0:
        raise ConvergenceError(f"transportation LP failed: {res.message}")
    weights = np.maximum(res.x.reshape(n, m), 0.0)
    return TransportPlan(weights, a, b)


def sinkhorn_plan(X, Y, config: OTConfig | None = None) -> TransportPlan:
    """Entropic-regularized coupling via log-domain Sinkhorn iteration.

    Deterministic; converges when the largest relative marginal violation
    drops below ``config.convergence_tol``. Raises ConvergenceError (with the
    final residual) if the budget runs out first.
    """
    sol = _sinkhorn_solve(*check_paired_matrices(X, Y), config or OTConfig())
    return sol.plan


def _sinkhorn_iterate(C, log_a, log_b, f, g, eps):
    K = -C / eps
    f = eps * (log_a - logsumexp(K + g[None, :] / eps, axis=1))
    g = eps * (log_b - logsumexp(K + f[:, None] / eps, axis=0))
    return f, g


def _round_to_feasible(P, a, b):
    """Project a near-feasible plan onto the exact marginals.

    Scales rows then columns down where they exceed their mass and spreads the
    leftover as a rank-one nonnegative correction; perturbs the cost by at
    most the pre-rounding marginal violation times the cost range.
    """
    row_scale = np.minimum(a / np.maximum(P.sum(axis=1), 1e-300), 1.0)
    P = P * row_scale[:, None]
    col_scale = np.minimum(b / np.maximum(P.sum(axis=0), 1e-300), 1.0)
    P = P * col_scale[None, :]
    missing_a = np.maximum(a - P.sum(axis=1), 0.0)
    missing_b = np.maximum(b - P.sum(axis=0), 0.0)
    total_missing = missing_a.sum()
    if total_missing > 0:
        P = P + np.outer(missing_a, missing_b) / total_missing
    return P


def _sinkhorn_solve(X: np.ndarray, Y: np.ndarray, config: OTConfig) -> OTSolution:
    n, m = X.shape[0], Y.shape[0]
    a, b = _uniform_masses(n, m)
    C = squared_cost_matrix(X, Y)
    eps = config.epsilon if config.epsilon is not None else DEFAULT_EPSILON_SCALE * float(C.mean())
    if eps <= 0:
        # All pairwise costs are zero (identical point sets); any coupling is
        # optimal, so eps only needs to be some positive number.
        eps = 1.0

    log_a = np.log(a)
    log_b = np.log(b)
    f = np.zeros(n)
    g = np.zeros(m)
    iteration = 0

    # Epsilon scaling: a short geometric warm start from a large epsilon makes
    # the potentials a good initial guess at the target epsilon.
    warm_eps = float(C.mean())
    while warm_eps > eps and iteration + _WARM_ITERS_PER_LEVEL < config.max_iters:
        for _ in range(_WARM_ITERS_PER_LEVEL):
            f, g = _sinkhorn_iterate(C, log_a, log_b, f, g, warm_eps)
            iteration += 1
        warm_eps *= 0.5

    K = -C / eps
    residual = np.inf
    converged = False
    while iteration < config.max_iters:
        # One logsumexp pass serves both the row-marginal residual of the
        # current potentials and the next f update.
        row_lse = logsumexp(K + g[None, :] / eps, axis=1)
        row_sums = np.exp(f / eps + row_lse)
        residual = float(np.max(np.abs(row_sums - a) / a))
        if residual <= config.convergence_tol:
            converged = True
            break
        f = eps * (log_a - row_lse)
        g = eps * (log_b - logsumexp(K + f[:, None] / eps, axis=0))
        iteration += 1
        if not (np.isfinite(f).all() and np.isfinite(g).all()):
            raise ConvergenceError(
                "sinkhorn potentials diverged; epsilon is too small for this instance"
            )
    if not converged:
        raise ConvergenceError(
            f"sinkhorn did not converge in {config.max_iters} iterations "
            f"(marginal residual {residual:.3e}); raise epsilon, loosen "
            "convergence_tol, or allow more iterations",
            residual=residual,
        )
    weights = _round_to_feasible(np.exp(K + (f[:, None] + g[None, :]) / eps), a, b)
    plan = TransportPlan(weights, a, b)
    return OTSolution(plan, float(np.sum(weights * C)), epsilon=eps, iterations=iteration)


def solve_ot(X, Y, config: OTConfig | None = None, with_images: bool = False) -> OTSolution:
    """Solve the configured OT problem; optionally attach barycentric images."""
    X, Y = check_paired_matrices(X, Y)
    config = config or OTConfig()
    n, m = X.shape[0], Y.shape[0]
    if config.resolved_solver(n, m) == "exact":
        if n * m > config.exact_size_limit:
            raise SizeLimitExceededError(
                f"exact solver limited to N*M <= {config.exact_size_limit}, got {n * m}; "
                "use the sinkhorn solver instead"
            )
        C = squared_cost_matrix(X, Y)
        plan = _exact_plan_from_cost(C)
        sol = OTSolution(plan, float(np.sum(plan.weights * C)))
    else:
        sol = _sinkhorn_solve(X, Y, config)
    if with_images:
        sol.images = barycentric_map(sol.plan, Y)
    return sol


def ot_plan(X, Y, config: OTConfig | None = None) -> TransportPlan:
    """The coupling alone, solver chosen per ``config``."""
    return solve_ot(X, Y, config).plan


def w2_squared(X, Y, config: OTConfig | None = None) -> float:
    """Empirical squared Wasserstein-2 distance (exact or entropic, per config)."""
    return solve_ot(X, Y, config).cost


def barycentric_map(plan: TransportPlan, Y) -> np.ndarray:
    """Map each source row to the plan-weighted average of its targets.

    For a permutation plan this returns exactly the matched target points.
    """
    Y = np.asarray(getattr(Y, "values", Y), dtype=np.float64)
    if plan.n_target != Y.shape[0]:
        raise ValueError(
            f"plan has {plan.n_target} target columns but target data has {Y.shape[0]} rows"
        )
    row_sums = plan.weights.sum(axis=1)
    if row_sums.min() <= 0:
        raise DegeneratePlanError("transport plan has a zero-mass row; cannot form a point map")
    # Normalize first so a one-hot row multiplies its target by exactly 1.0.
    return (plan.weights / row_sums[:, None]) @ Y


def ot_point_map(X, Y, config: OTConfig | None = None) -> np.ndarray:
    """Convenience: solve OT and return the barycentric images of X's rows."""
    return solve_ot(X, Y, config, with_images=True).images
