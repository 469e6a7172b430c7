"""Sparse local linear surrogates fit to a black box over a neighborhood.

The surrogate g(z) = b + w . z is fit by weighted least squares against
the black box's scores, with greedy forward selection down to a sparsity
budget K. The reported objective is

    fidelity + lambda1 * complexity (+ lambda2 * parity gap, when used)

where fidelity is the kernel-weighted mean squared error, complexity is
the active-set size, and the parity gap compares demographic parity of
the thresholded surrogate against the black box's.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, OptimizationError
from .metrics import demographic_parity
from .neighborhood import KernelConfig, Neighborhood, sample_neighborhood

# Unconditional diagonal damping on the weight block of the normal
# equations. Purely numerical conditioning for duplicated or constant
# columns; not part of the reported complexity or objective.
RIDGE_DAMPING = 1e-8


def default_sparsity(n_features: int) -> int:
    """All features for tiny synthetic spaces, 5 otherwise."""
    return n_features if n_features <= 3 else 5


@dataclass(frozen=True)
class ExplainConfig:
    """Sparsity budget and complexity price for the local fit.

    ``n_features`` of None resolves per dataset via default_sparsity.
    ``lambda1`` prices each active feature in the reported objective; it
    does not bend the least-squares fit itself.
    """

    n_features: int | None = None
    lambda1: float = 0.01

    def __post_init__(self):
        if self.n_features is not None and self.n_features < 1:
            raise ValueError("n_features must be at least 1")
        if self.lambda1 < 0.0:
            raise ValueError("lambda1 must be nonnegative")

    def resolve_budget(self, n_features: int) -> int:
        budget = self.n_features
        if budget is None:
            budget = default_sparsity(n_features)
        if budget > n_features:
            raise DataError(
                f"sparsity budget {budget} exceeds {n_features} features"
            )
        return budget


def _seed_json(seed):
    return list(seed) if isinstance(seed, tuple) else seed


@dataclass(frozen=True)
class Explanation:
    """A fitted sparse linear surrogate with its objective breakdown.

    ``coefficients`` is full-width with exact zeros off the active set,
    so ``intercept + samples @ coefficients`` scores any matrix.
    ``active`` records the selection order. ``psi_hard`` is None when
    the fitting neighborhood lacked one of the groups (the parity gap is
    undefined there, never silently zero).
    """

    feature_names: tuple[str, ...]
    center: np.ndarray
    active: tuple[int, ...]
    intercept: float
    coefficients: np.ndarray
    lambda1: float
    lambda2: float
    n_samples: int
    kernel_width: float
    seed: object
    loss: float
    complexity: int
    psi_hard: float | None
    objective: float

    def __post_init__(self):
        for name in ("center", "coefficients"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "active", tuple(int(j) for j in self.active))
        width = len(self.feature_names)
        if self.coefficients.shape != (width,) or self.center.shape != (width,):
            raise DataError("coefficient or center width does not match names")

    def predict_score(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return self.intercept + X @ self.coefficients

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Hard labels: score at or above 0.5 predicts 1."""
        return (self.predict_score(X) >= 0.5).astype(float)

    def ranked_features(self) -> list[tuple[str, float]]:
        """Active (name, coefficient) pairs, largest magnitude first."""
        order = sorted(self.active, key=lambda j: (-abs(self.coefficients[j]), j))
        return [(self.feature_names[j], float(self.coefficients[j])) for j in order]

    def as_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "center": [float(v) for v in self.center],
            "active_features": [self.feature_names[j] for j in self.active],
            "intercept": self.intercept,
            "coefficients": {
                self.feature_names[j]: float(self.coefficients[j])
                for j in self.active
            },
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "n_samples": self.n_samples,
            "kernel_width": self.kernel_width,
            "seed": _seed_json(self.seed),
            "objective_breakdown": {
                "fidelity": self.loss,
                "complexity": self.complexity,
                "psi_hard": self.psi_hard,
            },
            "objective": self.objective,
        }


def fidelity_loss(explanation, nb: Neighborhood) -> float:
    """Kernel-weighted mean squared error against the black-box scores.

    Normalized by the total kernel mass, so rescaling all weights leaves
    the value unchanged.
    """
    residual = nb.f_scores - explanation.predict_score(nb.samples)
    return float(np.sum(nb.weights * residual * residual) / np.sum(nb.weights))


def complexity(explanation) -> int:
    """Active-set size: the count of features allowed nonzero weight."""
    return len(explanation.active)


def weighted_least_squares(columns: np.ndarray, targets: np.ndarray,
                           norm_weights: np.ndarray) -> np.ndarray:
    """Solve the damped weighted normal equations.

    ``norm_weights`` must sum to 1. Returns [intercept, w_1, ..., w_k];
    the damping touches only the weight coordinates, so an intercept-only
    fit stays the exact weighted mean.
    """
    n, k = columns.shape
    design = np.column_stack([np.ones(n), columns])
    weighted = design.T * norm_weights
    gram = weighted @ design
    gram[np.arange(1, k + 1), np.arange(1, k + 1)] += RIDGE_DAMPING
    try:
        return np.linalg.solve(gram, weighted @ targets)
    except np.linalg.LinAlgError:
        raise OptimizationError(
            "normal equations are singular despite damping"
        ) from None


def _mean_squared_error(columns, targets, norm_weights, beta) -> float:
    residual = targets - (beta[0] + columns @ beta[1:])
    return float(np.sum(norm_weights * residual * residual))


def greedy_feature_selection(samples, targets, norm_weights, budget: int) -> list[int]:
    """Forward selection: repeatedly add the feature whose refit most
    reduces the weighted mean squared error, breaking ties toward the
    lower feature index."""
    d = samples.shape[1]
    active: list[int] = []
    for _ in range(budget):
        best_j, best_err = -1, np.inf
        for j in range(d):
            if j in active:
                continue
            cols = samples[:, active + [j]]
            beta = weighted_least_squares(cols, targets, norm_weights)
            err = _mean_squared_error(cols, targets, norm_weights, beta)
            if err < best_err - 1e-15 or best_j < 0:
                best_j, best_err = j, err
        active.append(best_j)
    return active


def explain_neighborhood(nb: Neighborhood, cfg: ExplainConfig) -> Explanation:
    """Fit a sparse surrogate to an already-sampled neighborhood.

    The parity gap against the black box is attached when both groups
    are present; otherwise psi_hard is None and only the fidelity and
    complexity terms enter the objective.
    """
    budget = cfg.resolve_budget(nb.n_features)
    norm_weights = nb.weights / np.sum(nb.weights)
    targets = nb.f_scores
    active = greedy_feature_selection(nb.samples, targets, norm_weights, budget)
    cols = nb.samples[:, active]
    beta = weighted_least_squares(cols, targets, norm_weights)
    loss = _mean_squared_error(cols, targets, norm_weights, beta)
    coefficients = np.zeros(nb.n_features)
    coefficients[active] = beta[1:]
    psi_hard = None
    if nb.has_both_groups():
        dp_bb = demographic_parity(nb.f_preds, nb.groups)
        surrogate_preds = ((beta[0] + cols @ beta[1:]) >= 0.5).astype(float)
        psi_hard = abs(dp_bb - demographic_parity(surrogate_preds, nb.groups))
    return Explanation(
        feature_names=nb.feature_names,
        center=nb.center,
        active=tuple(active),
        intercept=float(beta[0]),
        coefficients=coefficients,
        lambda1=cfg.lambda1,
        lambda2=0.0,
        n_samples=nb.n_samples,
        kernel_width=nb.kernel_width,
        seed=nb.seed,
        loss=loss,
        complexity=len(active),
        psi_hard=psi_hard,
        objective=loss + cfg.lambda1 * len(active),
    )


def lime_explain(f, x, stats, kc: KernelConfig, cfg: ExplainConfig, seed) -> Explanation:
    """Sample a neighborhood around ``x`` and fit the sparse surrogate.

    Deterministic per seed: the same (x, stats, kc, cfg, seed) always
    yields the same explanation.
    """
    nb = sample_neighborhood(x, stats, f, kc, seed)
    return explain_neighborhood(nb, cfg)


def implied_boundary(explanation: Explanation, feature_index: int) -> float:
    """The feature value where the surrogate crosses score 0.5 with all
    other features held at the explanation's center values."""
    coefs = explanation.coefficients
    if not 0 <= feature_index < coefs.shape[0]:
        raise DataError(f"feature index {feature_index} out of range")
    w = float(coefs[feature_index])
    if w == 0.0:
        raise DataError(
            f"feature {explanation.feature_names[feature_index]!r} has zero "
            "weight; no implied boundary"
        )
    others = float(coefs @ explanation.center) - w * float(explanation.center[feature_index])
    return (0.5 - explanation.intercept - others) / w
