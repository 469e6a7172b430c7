"""Fairness-preserving local surrogates.

Extends the sparse local surrogate with a demographic-parity
preservation penalty. The full objective on a fixed active set is

    fidelity + lambda1 * complexity + lambda2 * psi

where psi is the absolute gap between the black box's demographic
parity over the neighborhood and the thresholded surrogate's. psi is a
step function of the surrogate parameters, so gradient descent runs on
a sigmoid-relaxed psi (temperature tau) and an exact coordinate polish
then attacks the thresholded objective directly. User-facing output
always reports the hard psi; the smooth proxy appears only as a
diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DataError, OptimizationError
from .metrics import demographic_parity
from .neighborhood import KernelConfig, Neighborhood, sample_two_group_neighborhood
from .surrogate import ExplainConfig, Explanation, explain_neighborhood

ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 60
MAX_STEP = 1e6
GRAD_TOL = 1e-8
REL_IMPROVE_TOL = 1e-12

# Coordinate-polish candidates beyond this magnitude are discarded; a
# surrogate weight this size only arises from a degenerate quadratic.
POLISH_CANDIDATE_BOUND = 1e9


@dataclass(frozen=True)
class FairConfig:
    """Knobs for the parity-preservation penalty and its optimizer.

    ``lambda2`` prices the parity gap; 0 turns the penalty off and the
    solve reduces exactly to the plain surrogate. ``tau`` is the sigmoid
    temperature on the score scale. One descent restart always starts
    at the plain least-squares solution; the remaining ``restarts - 1``
    perturb it with Gaussian noise of scale ``noise_scale``. Every
    descent result then gets ``polish_rounds`` rounds of exact line
    minimization of the hard objective, sweeping the coordinate axes
    plus ``polish_dirs`` random directions per round; 0 keeps the
    polish coordinate-only, which is cheaper but cannot cross cell
    corners of the piecewise-constant parity term.
    """

    lambda2: float = 5.0
    tau: float = 0.05
    restarts: int = 5
    steps: int = 300
    step_size: float = 1.0
    noise_scale: float = 0.1
    polish_rounds: int = 3
    polish_dirs: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.lambda2 < 0.0:
            raise ValueError("lambda2 must be nonnegative")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.step_size <= 0.0:
            raise ValueError("step_size must be positive")
        if self.noise_scale < 0.0:
            raise ValueError("noise_scale must be nonnegative")
        if self.polish_rounds < 0:
            raise ValueError("polish_rounds must be nonnegative")
        if self.polish_dirs < 0:
            raise ValueError("polish_dirs must be nonnegative")


@dataclass(frozen=True)
class PsiBreakdown:
    """Parity readings of black box and surrogate over one neighborhood."""

    dp_blackbox: float
    dp_surrogate_hard: float
    dp_surrogate_smooth: float
    psi_hard: float
    psi_smooth: float

    def as_dict(self) -> dict:
        return {
            "dp_blackbox": self.dp_blackbox,
            "dp_surrogate_hard": self.dp_surrogate_hard,
            "dp_surrogate_smooth": self.dp_surrogate_smooth,
            "psi_hard": self.psi_hard,
            "psi_smooth": self.psi_smooth,
        }


class _FairProblem:
    """Fidelity plus parity penalty on a fixed active set.

    The parameter vector is beta = [intercept, weights over the active
    columns]. Kernel weights are normalized once, so the fidelity term
    is invariant under rescaling them. The complexity term is constant
    on a fixed active set and therefore omitted here; callers add
    lambda1 * |active| when reporting objectives.
    """

    def __init__(self, nb: Neighborhood, active, lambda2: float, tau: float):
        self.cols = nb.samples[:, list(active)]
        self.targets = nb.f_scores
        self.wn = nb.weights / np.sum(nb.weights)
        groups = nb.groups
        self.mask1 = groups == 1.0
        self.mask0 = ~self.mask1
        self.n1 = int(np.count_nonzero(self.mask1))
        self.n0 = int(np.count_nonzero(self.mask0))
        self.dp_blackbox = demographic_parity(nb.f_preds, groups)
        # Signed per-sample contribution to the group rate difference.
        self.gsign = np.where(self.mask1, 1.0 / self.n1, -1.0 / self.n0)
        self.lambda2 = lambda2
        self.tau = tau

    def scores(self, beta: np.ndarray) -> np.ndarray:
        return beta[0] + self.cols @ beta[1:]

    def loss(self, scores: np.ndarray) -> float:
        r = scores - self.targets
        return float(np.sum(self.wn * r * r))

    def hard_dp(self, scores: np.ndarray) -> float:
        return float(np.sum(self.gsign * (scores >= 0.5)))

    def smooth_dp(self, scores: np.ndarray) -> float:
        return float(np.sum(self.gsign * expit((scores - 0.5) / self.tau)))

    def hard_value(self, beta: np.ndarray) -> float:
        scores = self.scores(beta)
        return self.loss(scores) + self.lambda2 * abs(
            self.dp_blackbox - self.hard_dp(scores)
        )

    def smooth_value(self, beta: np.ndarray) -> float:
        scores = self.scores(beta)
        return self.loss(scores) + self.lambda2 * abs(
            self.dp_blackbox - self.smooth_dp(scores)
        )

    def smooth_gradient(self, beta: np.ndarray) -> np.ndarray:
        scores = self.scores(beta)
        r = self.wn * (scores - self.targets)
        grad = 2.0 * np.concatenate([[np.sum(r)], self.cols.T @ r])
        s = expit((scores - 0.5) / self.tau)
        gap = self.dp_blackbox - float(np.sum(self.gsign * s))
        # Subgradient of |gap| in the surrogate's parity; sign(0) is 0.
        slope = -np.sign(gap) * self.gsign * s * (1.0 - s) / self.tau
        grad += self.lambda2 * np.concatenate([[np.sum(slope)], self.cols.T @ slope])
        return grad


def psi(explanation, nb: Neighborhood, tau: float = 0.05) -> PsiBreakdown:
    """Parity-preservation gap of a surrogate over its neighborhood.

    Raises MetricUndefinedError when the neighborhood lacks one of the
    groups; the gap is never silently reported as zero.
    """
    if tau <= 0.0:
        raise DataError("tau must be positive")
    problem = _FairProblem(nb, range(nb.n_features), 0.0, tau)
    scores = np.asarray(explanation.predict_score(nb.samples), dtype=float)
    dp_hard = problem.hard_dp(scores)
    dp_smooth = problem.smooth_dp(scores)
    return PsiBreakdown(
        dp_blackbox=problem.dp_blackbox,
        dp_surrogate_hard=dp_hard,
        dp_surrogate_smooth=dp_smooth,
        psi_hard=abs(problem.dp_blackbox - dp_hard),
        psi_smooth=abs(problem.dp_blackbox - dp_smooth),
    )


def smoothed_objective(beta, nb: Neighborhood, active, lambda2: float,
                       tau: float) -> float:
    """Fidelity plus lambda2 times the sigmoid-relaxed parity gap.

    The complexity term is excluded: it is constant on a fixed active
    set and would only shift the value the optimizer sees.
    """
    problem = _FairProblem(nb, active, lambda2, tau)
    return problem.smooth_value(np.asarray(beta, dtype=float))


def smoothed_objective_gradient(beta, nb: Neighborhood, active, lambda2: float,
                                tau: float) -> np.ndarray:
    """Analytic gradient of smoothed_objective over [intercept, weights]."""
    problem = _FairProblem(nb, active, lambda2, tau)
    return problem.smooth_gradient(np.asarray(beta, dtype=float))


def _descend(problem: _FairProblem, start: np.ndarray, steps: int,
             step_size: float, restart_index: int) -> tuple[np.ndarray, float]:
    """Gradient descent with backtracking line search; monotone by
    construction, so the result never scores worse than the start."""
    beta = np.array(start, dtype=float)
    value = problem.smooth_value(beta)
    if not np.isfinite(value):
        raise OptimizationError(
            "non-finite objective at descent start", restart_index=restart_index
        )
    step = step_size
    for _ in range(steps):
        grad = problem.smooth_gradient(beta)
        gsq = float(grad @ grad)
        if not np.isfinite(gsq):
            raise OptimizationError(
                "non-finite gradient during descent", restart_index=restart_index
            )
        if np.sqrt(gsq) <= GRAD_TOL:
            break
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            cand = beta - step * grad
            cval = problem.smooth_value(cand)
            if np.isfinite(cval) and cval <= value - ARMIJO_C1 * step * gsq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        improvement = value - cval
        beta, value = cand, cval
        if improvement <= REL_IMPROVE_TOL * max(1.0, abs(value)):
            break
        step = min(step * 2.0, MAX_STEP)
    return beta, value


# Offsets the polish random stream from the restart-noise stream.
_POLISH_STREAM = 7919


def _line_minimum(problem: _FairProblem, design: np.ndarray, beta: np.ndarray,
                  direction: np.ndarray) -> float:
    """Exact minimizing offset of the hard objective along a line.

    Along ``beta + t * direction`` the fidelity term is a quadratic
    polynomial in t while each sample's predicted label flips at most
    once, where its score crosses 0.5, so the hard parity gap is
    piecewise constant with breakpoints t = (0.5 - score) / slope.
    Candidates are the breakpoints, their immediate floating-point
    neighbours, the quadratic's vertex, and the current point; group
    positive counts over all candidates come from two searchsorted
    passes per group. Returns the best offset t, 0.0 for no move.
    """
    base = design @ beta
    slope = design @ direction
    resid = base - problem.targets
    q2 = float(np.sum(problem.wn * slope * slope))
    q1 = float(np.sum(problem.wn * slope * resid))
    q0 = float(np.sum(problem.wn * resid * resid))
    moving = slope != 0.0
    brk = (0.5 - base[moving]) / slope[moving]
    pool = [np.zeros(1), brk, np.nextafter(brk, np.inf), np.nextafter(brk, -np.inf)]
    if q2 > 0.0:
        pool.append(np.array([-q1 / q2]))
    ts = np.concatenate(pool)
    ts = ts[np.isfinite(ts) & (np.abs(ts) <= POLISH_CANDIDATE_BOUND)]
    fidelity = q2 * ts * ts + 2.0 * q1 * ts + q0
    dp = np.zeros_like(ts)
    for mask, scale in ((problem.mask1, 1.0 / problem.n1),
                        (problem.mask0, -1.0 / problem.n0)):
        sub = mask[moving]
        fixed = np.count_nonzero(mask & ~moving & (base >= 0.5))
        up = np.sort(brk[(slope[moving] > 0.0) & sub])
        down = np.sort(brk[(slope[moving] < 0.0) & sub])
        count = (fixed + np.searchsorted(up, ts, side="right")
                 + down.size - np.searchsorted(down, ts, side="left"))
        dp += scale * count
    values = fidelity + problem.lambda2 * np.abs(problem.dp_blackbox - dp)
    return float(ts[int(np.argmin(values))])


def _polish(problem: _FairProblem, design: np.ndarray, start: np.ndarray,
            anchor: np.ndarray, rounds: int, extra_dirs: int, seed) -> np.ndarray:
    """Polish a point by exact line minimization of the hard objective.

    Each round sweeps the coordinate axes and, when ``extra_dirs`` is
    positive, the direction toward ``anchor`` (the unconstrained
    least-squares fit) plus ``extra_dirs`` random unit directions.
    Coordinate sweeps alone stall on cell corners of the piecewise
    constant parity term; oblique lines can cross them. A move needs
    strict improvement of the exact objective, so the polish never
    leaves its start worse.
    """
    beta = np.array(start, dtype=float)
    best = problem.hard_value(beta)
    rng = np.random.default_rng(seed)
    for _ in range(rounds):
        directions = list(np.eye(beta.size))
        if extra_dirs > 0:
            gap = anchor - beta
            norm = float(np.linalg.norm(gap))
            if norm > 0.0:
                directions.append(gap / norm)
        for _ in range(extra_dirs):
            vec = rng.standard_normal(beta.size)
            norm = float(np.linalg.norm(vec))
            if norm > 0.0:
                directions.append(vec / norm)
        moved = False
        for direction in directions:
            t = _line_minimum(problem, design, beta, direction)
            if t == 0.0:
                continue
            cand = beta + t * direction
            value = problem.hard_value(cand)
            if value < best:
                beta, best = cand, value
                moved = True
        if not moved:
            break
    return beta


@dataclass(frozen=True)
class FairExplanation(Explanation):
    """A surrogate fit under the parity-preservation penalty.

    ``objective`` prices the hard parity gap; ``objective_smooth`` is
    the same expression with the sigmoid-relaxed gap and exists so the
    optimizer's own yardstick stays inspectable.
    """

    tau: float
    dp_blackbox: float
    dp_surrogate_hard: float
    dp_surrogate_smooth: float
    psi_smooth: float
    objective_smooth: float
    restart_count: int

    def as_dict(self) -> dict:
        doc = super().as_dict()
        doc["tau"] = self.tau
        doc["restart_count"] = self.restart_count
        doc["objective_smooth"] = self.objective_smooth
        doc["objective_breakdown"].update(
            {
                "psi_smooth": self.psi_smooth,
                "dp_blackbox": self.dp_blackbox,
                "dp_surrogate_hard": self.dp_surrogate_hard,
                "dp_surrogate_smooth": self.dp_surrogate_smooth,
            }
        )
        return doc


def _assemble(nb: Neighborhood, active, beta: np.ndarray, cfg: ExplainConfig,
              fair: FairConfig, problem: _FairProblem,
              restart_count: int) -> FairExplanation:
    scores = problem.scores(beta)
    loss = problem.loss(scores)
    dp_hard = problem.hard_dp(scores)
    dp_smooth = problem.smooth_dp(scores)
    psi_hard = abs(problem.dp_blackbox - dp_hard)
    psi_smooth = abs(problem.dp_blackbox - dp_smooth)
    coefficients = np.zeros(nb.n_features)
    coefficients[list(active)] = beta[1:]
    penalty = cfg.lambda1 * len(active)
    return FairExplanation(
        feature_names=nb.feature_names,
        center=nb.center,
        active=tuple(active),
        intercept=float(beta[0]),
        coefficients=coefficients,
        lambda1=cfg.lambda1,
        lambda2=fair.lambda2,
        n_samples=nb.n_samples,
        kernel_width=nb.kernel_width,
        seed=nb.seed,
        loss=loss,
        complexity=len(active),
        psi_hard=psi_hard,
        objective=loss + penalty + fair.lambda2 * psi_hard,
        tau=fair.tau,
        dp_blackbox=problem.dp_blackbox,
        dp_surrogate_hard=dp_hard,
        dp_surrogate_smooth=dp_smooth,
        psi_smooth=psi_smooth,
        objective_smooth=loss + penalty + fair.lambda2 * psi_smooth,
        restart_count=restart_count,
    )


def fair_explain_neighborhood(nb: Neighborhood, cfg: ExplainConfig,
                              fair: FairConfig) -> FairExplanation:
    """Fit the parity-penalized surrogate on a two-group neighborhood.

    The active set is the plain surrogate's greedy selection. With
    lambda2 = 0 the plain solution is copied verbatim, bit for bit.
    Otherwise multi-restart descent on the smoothed objective runs from
    the plain solution (restart 0) and noisy copies of it, every
    descent result plus the plain solution gets an exact line-search
    polish against the hard objective, and the winner is the candidate
    with the lowest hard objective. The plain solution is always in
    the pool, so the fit never loses to it on the reported objective.
    The smooth proxy steers only the descent stage: at the hard
    optimum, scores often sit close to the 0.5 threshold where the
    sigmoid relaxation is far from saturated, so judging candidates by
    the smooth value would discard exactly the solutions the penalty
    is after.
    """
    vanilla = explain_neighborhood(nb, cfg)
    active = vanilla.active
    problem = _FairProblem(nb, active, fair.lambda2, fair.tau)
    v_beta = np.concatenate([[vanilla.intercept], vanilla.coefficients[list(active)]])
    if fair.lambda2 == 0.0:
        scores = problem.scores(v_beta)
        dp_hard = problem.hard_dp(scores)
        dp_smooth = problem.smooth_dp(scores)
        return FairExplanation(
            feature_names=vanilla.feature_names,
            center=vanilla.center,
            active=vanilla.active,
            intercept=vanilla.intercept,
            coefficients=vanilla.coefficients,
            lambda1=vanilla.lambda1,
            lambda2=0.0,
            n_samples=vanilla.n_samples,
            kernel_width=vanilla.kernel_width,
            seed=vanilla.seed,
            loss=vanilla.loss,
            complexity=vanilla.complexity,
            psi_hard=abs(problem.dp_blackbox - dp_hard),
            objective=vanilla.objective,
            tau=fair.tau,
            dp_blackbox=problem.dp_blackbox,
            dp_surrogate_hard=dp_hard,
            dp_surrogate_smooth=dp_smooth,
            psi_smooth=abs(problem.dp_blackbox - dp_smooth),
            objective_smooth=vanilla.objective,
            restart_count=0,
        )
    rng = np.random.default_rng(fair.seed)
    design = np.column_stack([np.ones(problem.cols.shape[0]), problem.cols])
    starts = [v_beta]
    for r in range(fair.restarts):
        start = v_beta
        if r > 0:
            start = v_beta + fair.noise_scale * rng.standard_normal(v_beta.shape)
        beta_r, _ = _descend(problem, start, fair.steps, fair.step_size, r)
        starts.append(beta_r)
    if fair.polish_dirs > 0 and len(active) <= 2:
        starts.append(_coarse_scan_seed(nb, cfg, fair, v_beta, active))
    candidates = list(starts)
    for i, s in enumerate(starts):
        candidates.append(
            _polish(problem, design, s, v_beta, fair.polish_rounds,
                    fair.polish_dirs, (fair.seed, _POLISH_STREAM, i))
        )
    pick = min(candidates, key=problem.hard_value)
    return _assemble(nb, active, pick, cfg, fair, problem, fair.restarts)


def fair_lime_explain(f, x, stats, kc: KernelConfig, cfg: ExplainConfig,
                      fair: FairConfig, seed) -> FairExplanation:
    """Sample a two-group neighborhood around ``x`` and fit the
    parity-penalized surrogate. Deterministic per seed; resamples with
    a documented retry scheme when a draw misses one group."""
    nb = sample_two_group_neighborhood(x, stats, f, kc, seed)
    return fair_explain_neighborhood(nb, cfg, fair)


_COARSE_RESOLUTION = 0.05
_COARSE_MAX_STEPS = 200


def _coarse_scan_seed(nb: Neighborhood, cfg: ExplainConfig, fair: FairConfig,
                      v_beta: np.ndarray, active) -> np.ndarray:
    """Global polish seed from a cheap low-resolution lattice scan.

    Random restarts explore a noise ball around the plain fit; when the
    best parity cell lies elsewhere they all converge short of it. For
    up to two active features an exhaustive scan of a wide coarse
    lattice costs a few milliseconds and hands the polish a start in
    the globally best region, which it then refines exactly.
    """
    i_span = max(2.0, 2.0 * abs(float(v_beta[0])))
    w_span = max(1.5, 2.0 * float(np.max(np.abs(v_beta[1:]), initial=0.0)))
    i_steps = min(_COARSE_MAX_STEPS,
                  int(np.ceil(2.0 * i_span / _COARSE_RESOLUTION)))
    w_steps = min(_COARSE_MAX_STEPS,
                  int(np.ceil(2.0 * w_span / _COARSE_RESOLUTION)))
    grid = GridSpec(
        intercept_low=float(v_beta[0]) - i_span,
        intercept_high=float(v_beta[0]) + i_span,
        weight_low=-w_span,
        weight_high=w_span,
        intercept_steps=i_steps,
        weight_steps=w_steps,
    )
    seed = grid_search_oracle(nb, cfg, fair, grid=grid)
    return np.concatenate([[seed.intercept], seed.coefficients[list(active)]])


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned search grid over [intercept, weights].

    Axes are low + span * k / steps for k = 0..steps, so doubling the
    step counts yields a bitwise superset of the coarser grid. Default
    spans give a resolution of 0.01 per axis.
    """

    intercept_low: float = -4.0
    intercept_high: float = 4.0
    weight_low: float = -2.0
    weight_high: float = 2.0
    intercept_steps: int = 800
    weight_steps: int = 400

    def __post_init__(self):
        if self.intercept_high <= self.intercept_low:
            raise ValueError("empty intercept range")
        if self.weight_high <= self.weight_low:
            raise ValueError("empty weight range")
        if self.intercept_steps < 1 or self.weight_steps < 1:
            raise ValueError("step counts must be at least 1")

    def intercept_axis(self) -> np.ndarray:
        span = self.intercept_high - self.intercept_low
        k = np.arange(self.intercept_steps + 1)
        return self.intercept_low + span * (k / self.intercept_steps)

    def weight_axis(self) -> np.ndarray:
        span = self.weight_high - self.weight_low
        k = np.arange(self.weight_steps + 1)
        return self.weight_low + span * (k / self.weight_steps)

    def refine(self) -> "GridSpec":
        """Halve the resolution; the new axes contain the old points."""
        return GridSpec(
            intercept_low=self.intercept_low,
            intercept_high=self.intercept_high,
            weight_low=self.weight_low,
            weight_high=self.weight_high,
            intercept_steps=2 * self.intercept_steps,
            weight_steps=2 * self.weight_steps,
        )


def grid_search_oracle(nb: Neighborhood, cfg: ExplainConfig, fair: FairConfig,
                       grid: GridSpec | None = None,
                       chunk: int = 4096) -> Explanation:
    """Exhaustive search of the exact hard objective over a grid.

    The active set is the plain surrogate's greedy selection, capped at
    two features since the grid is exponential in dimension. Ties break
    toward the lowest objective, then the smallest weight max-norm,
    then lexicographically over (intercept, weights). Intended as an
    independent check on the gradient solver, not for production use.
    """
    if grid is None:
        grid = GridSpec()
    vanilla = explain_neighborhood(nb, cfg)
    active = vanilla.active
    if len(active) > 2:
        raise DataError(
            f"grid oracle supports at most 2 active features, got {len(active)}"
        )
    problem = _FairProblem(nb, active, fair.lambda2, fair.tau)
    b_axis = grid.intercept_axis()
    w_axis = grid.weight_axis()
    if len(active) == 1:
        combos = w_axis[:, None]
    else:
        a, b = np.meshgrid(w_axis, w_axis, indexing="ij")
        combos = np.column_stack([a.ravel(), b.ravel()])
    n_axis = b_axis.shape[0]
    inv1, inv0 = 1.0 / problem.n1, 1.0 / problem.n0
    best_key = None
    best_beta = None
    for lo in range(0, combos.shape[0], chunk):
        w_chunk = combos[lo:lo + chunk]
        c = w_chunk.shape[0]
        z = problem.cols @ w_chunk.T
        d = z - problem.targets[:, None]
        m1 = problem.wn @ d
        m2 = problem.wn @ (d * d)
        fidelity = (b_axis * b_axis)[:, None] + 2.0 * np.outer(b_axis, m1) + m2
        # A sample scores at least 0.5 once the intercept reaches
        # 0.5 - w . x, so per-group positive counts over the intercept
        # axis are cumulative histograms of those thresholds.
        u = 0.5 - z
        dp = np.zeros((n_axis, c))
        for mask, scale in ((problem.mask1, inv1), (problem.mask0, -inv0)):
            pos = np.searchsorted(b_axis, u[mask])
            flat = pos * c + np.arange(c)[None, :]
            counts = np.bincount(
                flat.ravel(), minlength=(n_axis + 1) * c
            ).reshape(n_axis + 1, c)
            dp += scale * np.cumsum(counts[:n_axis], axis=0)
        values = fidelity + fair.lambda2 * np.abs(problem.dp_blackbox - dp)
        low = float(values.min())
        if best_key is not None and low > best_key[0]:
            continue
        for j, cc in zip(*np.nonzero(values == low)):
            w = w_chunk[cc]
            key = (low, float(np.max(np.abs(w))), float(b_axis[j]),
                   tuple(float(v) for v in w))
            if best_key is None or key < best_key:
                best_key = key
                best_beta = np.concatenate([[b_axis[j]], w])
    scores = problem.scores(best_beta)
    loss = problem.loss(scores)
    psi_hard = abs(problem.dp_blackbox - problem.hard_dp(scores))
    coefficients = np.zeros(nb.n_features)
    coefficients[list(active)] = best_beta[1:]
    return Explanation(
        feature_names=nb.feature_names,
        center=nb.center,
        active=active,
        intercept=float(best_beta[0]),
        coefficients=coefficients,
        lambda1=cfg.lambda1,
        lambda2=fair.lambda2,
        n_samples=nb.n_samples,
        kernel_width=nb.kernel_width,
        seed=nb.seed,
        loss=loss,
        complexity=len(active),
        psi_hard=psi_hard,
        objective=loss + cfg.lambda1 * len(active) + fair.lambda2 * psi_hard,
    )
