"""Block coordinate descent with polar-certified column generation.

The outer loop alternates (1) gradient descent on the current columns to a
first-order stationary point, (2) a polar solve on the scaled residual
(Y - D X^T) / lambda, and (3) if the polar value exceeds 1 + epsilon,
appending the polar pair scaled by the closed-form optimal step tau.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from wavefactor.errors import DimensionError, DivergedStepError, PreconditionError
from wavefactor.polar import LineSearchConfig, PolarSolution, solve_polar
from wavefactor.spectral import (
    K_BAR_MAX,
    Laplacian,
    SpectralBasis,
    build_laplacian,
    eigendecompose,
)


@dataclass
class FactorModel:
    """Factorization state: spatial modes D, temporal coefficients X, per-mode k_bar."""

    D: np.ndarray  # n x N
    X: np.ndarray  # m x N
    k_bar: np.ndarray  # length N, entries in [0, 4]
    lambda_reg: float
    gamma_reg: float

    def __post_init__(self):
        if not (self.D.shape[1] == self.X.shape[1] == self.k_bar.shape[0]):
            raise DimensionError("D, X and k_bar must share the column count")
        if self.k_bar.size and (self.k_bar.min() < 0 or self.k_bar.max() > K_BAR_MAX):
            raise ValueError("k_bar entries must lie in [0, 4]")

    @property
    def n_modes(self) -> int:
        return self.D.shape[1]

    @staticmethod
    def empty(n: int, m: int, lambda_reg: float, gamma_reg: float) -> "FactorModel":
        return FactorModel(
            D=np.zeros((n, 0)),
            X=np.zeros((m, 0)),
            k_bar=np.zeros(0),
            lambda_reg=lambda_reg,
            gamma_reg=gamma_reg,
        )


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-2  # polar-gap stopping tolerance
    max_outer_iters: int = 50
    max_inner_iters: int = 2000
    step_size: float | None = None  # None: 1 / (||Y||_2^2 + lambda (1 + 16 gamma))
    stationarity_tol: float | None = None  # None: 1e-6 * ||Y||_F
    max_modes: int | None = None
    line_search: LineSearchConfig = field(default_factory=LineSearchConfig)
    seed: int = 0
    prune_tol: float = 1e-12  # columns with ||d|| ||x|| below this * ||Y||_F are dropped

    def __post_init__(self):
        if self.epsilon <= 0 or self.max_outer_iters <= 0 or self.max_inner_iters <= 0:
            raise ValueError("tolerances and iteration caps must be positive")


@dataclass
class OuterRecord:
    outer: int
    objective: float
    polar_value: float
    n_modes: int
    inner_iters: int
    k_bar_star: float = float("nan")


@dataclass
class SolverTrace:
    records: list[OuterRecord] = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def polar_values(self) -> np.ndarray:
        return np.array([r.polar_value for r in self.records])


def _helmholtz_sq(lap: Laplacian, D: np.ndarray, k_bar: np.ndarray) -> np.ndarray:
    """(L + k_bar_i I)^2 applied to each column d_i."""
    u = lap.matvec(D) + D * k_bar[None, :]
    return lap.matvec(u) + u * k_bar[None, :]


def objective(model: FactorModel, Y: np.ndarray, lap: Laplacian) -> float:
    """0.5 ||Y - D X^T||_F^2 + (lambda/2) ||X||_F^2 + (lambda/2) sum_i d_i^T A(k_i) d_i."""
    if Y.shape[0] != model.D.shape[0] or Y.shape[1] != model.X.shape[0]:
        raise DimensionError("Y dimensions do not match the model")
    resid = Y - model.D @ model.X.T
    val = 0.5 * np.sum(resid**2) + 0.5 * model.lambda_reg * np.sum(model.X**2)
    if model.n_modes:
        h = _helmholtz_sq(lap, model.D, model.k_bar)
        penalty = np.sum(model.D**2) + model.gamma_reg * np.sum(model.D * h)
        val += 0.5 * model.lambda_reg * penalty
    return float(val)


def theta_bar(lap: Laplacian, d: np.ndarray, x: np.ndarray, gamma_reg: float) -> float:
    """||x||^2 + min_k d^T A(k) d with the inner minimizer in closed form.

    The optimal squared wavenumber is the negated Rayleigh quotient
    -d^T L d / ||d||^2, clamped to [0, 4].  Returns ||x||^2 for d = 0.
    """
    d = np.asarray(d, dtype=float)
    x = np.asarray(x, dtype=float)
    dnorm2 = float(d @ d)
    if dnorm2 == 0.0:
        return float(x @ x)
    ld = lap.matvec(d)
    kb = float(np.clip(-(d @ ld) / dnorm2, 0.0, K_BAR_MAX))
    resid = ld + kb * d
    return float(x @ x + dnorm2 + gamma_reg * resid @ resid)


def _gradients(model: FactorModel, Y: np.ndarray, lap: Laplacian):
    """Analytic gradients of the objective w.r.t. D and X at the current point."""
    resid = model.D @ model.X.T - Y
    grad_D = (
        resid @ model.X
        + model.lambda_reg * model.D
        + model.gamma_reg * model.lambda_reg * _helmholtz_sq(lap, model.D, model.k_bar)
    )
    grad_X = resid.T @ model.D + model.lambda_reg * model.X
    return grad_D, grad_X


def _update_k(D: np.ndarray, lap: Laplacian, k_old: np.ndarray) -> np.ndarray:
    """Exact per-column minimizer of the Helmholtz penalty; keeps k for dead columns."""
    norms2 = np.sum(D**2, axis=0)
    k_new = k_old.copy()
    live = norms2 > 0
    if np.any(live):
        rayleigh = -np.sum(D[:, live] * lap.matvec(D[:, live]), axis=0) / norms2[live]
        k_new[live] = np.clip(rayleigh, 0.0, K_BAR_MAX)
    return k_new


def block_descent_pass(
    model: FactorModel, Y: np.ndarray, lap: Laplacian, step_size: float
) -> FactorModel:
    """One pass: D gradient step, X gradient step using the updated D, exact k update."""
    if model.n_modes < 1:
        raise PreconditionError("block_descent_pass requires at least one mode")
    resid = model.D @ model.X.T - Y
    grad_D = (
        resid @ model.X
        + model.lambda_reg * model.D
        + model.gamma_reg * model.lambda_reg * _helmholtz_sq(lap, model.D, model.k_bar)
    )
    D_new = model.D - step_size * grad_D
    grad_X = (D_new @ model.X.T - Y).T @ D_new + model.lambda_reg * model.X
    X_new = model.X - step_size * grad_X
    if not (np.all(np.isfinite(D_new)) and np.all(np.isfinite(X_new))):
        raise DivergedStepError("gradient step produced non-finite values")
    k_new = _update_k(D_new, lap, model.k_bar)
    return replace(model, D=D_new, X=X_new, k_bar=k_new)


def _default_step(Y: np.ndarray, lambda_reg: float, gamma_reg: float) -> float:
    return 1.0 / (np.linalg.norm(Y, 2) ** 2 + lambda_reg * (1.0 + 16.0 * gamma_reg))


def descend_to_stationary(
    model: FactorModel, Y: np.ndarray, lap: Laplacian, cfg: SolverConfig
) -> tuple[FactorModel, int, bool]:
    """Backtracking block descent until the max block gradient norm is small.

    Accepted passes never increase the objective.  Returns the updated
    model, the number of accepted passes, and a convergence flag.
    """
    tol = cfg.stationarity_tol
    if tol is None:
        tol = 1e-6 * np.linalg.norm(Y)
    alpha = cfg.step_size or _default_step(Y, model.lambda_reg, model.gamma_reg)
    obj = objective(model, Y, lap)
    iters = 0
    converged = False
    for _ in range(cfg.max_inner_iters):
        grad_D, grad_X = _gradients(model, Y, lap)
        gnorm = max(np.abs(grad_D).max(initial=0.0), np.abs(grad_X).max(initial=0.0))
        if gnorm < tol:
            converged = True
            break
        accepted = False
        for _ in range(50):
            try:
                trial = block_descent_pass(model, Y, lap, alpha)
                trial_obj = objective(trial, Y, lap)
            except DivergedStepError:
                alpha *= 0.5
                continue
            if np.isfinite(trial_obj) and trial_obj <= obj:
                model, obj = trial, trial_obj
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break  # step size exhausted; treat the point as stationary
        iters += 1
        alpha *= 1.25  # regrow after success; backtracking re-shrinks when needed
    return model, iters, converged


def optimal_tau(
    residual_inner: float, lambda_reg: float, d_star: np.ndarray, x_star: np.ndarray
) -> float:
    """Closed-form append scale: sqrt(d*^T (Y - D X^T) x* - lambda) / (||d*|| ||x*||)."""
    if residual_inner < lambda_reg:
        raise PreconditionError(
            f"residual inner product {residual_inner:.6g} < lambda {lambda_reg:.6g}; "
            "the certificate test should have stopped the solver"
        )
    denom = np.linalg.norm(d_star) * np.linalg.norm(x_star)
    if denom == 0.0:
        raise PreconditionError("cannot append a zero polar pair")
    return float(np.sqrt(residual_inner - lambda_reg) / denom)


def append_mode(model: FactorModel, polar_sol: PolarSolution, tau: float) -> FactorModel:
    """Grow the factorization by the polar pair scaled by tau."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if polar_sol.d_star.shape[0] != model.D.shape[0]:
        raise DimensionError("polar d_star length does not match the model")
    if polar_sol.x_star.shape[0] != model.X.shape[0]:
        raise DimensionError("polar x_star length does not match the model")
    return replace(
        model,
        D=np.column_stack([model.D, tau * polar_sol.d_star]),
        X=np.column_stack([model.X, tau * polar_sol.x_star]),
        k_bar=np.append(model.k_bar, polar_sol.k_bar_star),
    )


def _prune(model: FactorModel, y_norm: float, tol: float) -> FactorModel:
    if model.n_modes == 0:
        return model
    scale = np.linalg.norm(model.D, axis=0) * np.linalg.norm(model.X, axis=0)
    keep = scale > tol * y_norm
    if keep.all():
        return model
    return replace(model, D=model.D[:, keep], X=model.X[:, keep], k_bar=model.k_bar[keep])


def factorize(
    Y: np.ndarray,
    cfg: SolverConfig,
    lambda_reg: float,
    gamma_reg: float,
    init: FactorModel | None = None,
    basis: SpectralBasis | None = None,
) -> tuple[FactorModel, SolverTrace]:
    """Run the full algorithm: descend, certify via the polar, append, repeat.

    Stops when |polar - 1| < epsilon, when max_modes is reached, or after
    max_outer_iters.  Starts from the empty factorization unless a warm
    start is given.
    """
    Y = np.asarray(Y, dtype=float)
    if lambda_reg <= 0 or gamma_reg < 0:
        raise ValueError("lambda_reg must be positive and gamma_reg nonnegative")
    n, m = Y.shape
    lap = build_laplacian(n)
    if basis is None:
        basis = eigendecompose(lap)
    model = init or FactorModel.empty(n, m, lambda_reg, gamma_reg)
    trace = SolverTrace()
    y_norm = np.linalg.norm(Y)

    for outer in range(cfg.max_outer_iters):
        inner_iters = 0
        if model.n_modes:
            model, inner_iters, _ = descend_to_stationary(model, Y, lap, cfg)
            model = _prune(model, y_norm, cfg.prune_tol)
        Z = (Y - model.D @ model.X.T) / lambda_reg
        sol = solve_polar(basis, gamma_reg, Z, cfg.line_search)
        obj = objective(model, Y, lap)
        if not np.isfinite(obj):
            raise DivergedStepError("objective became non-finite")
        trace.records.append(
            OuterRecord(
                outer=outer,
                objective=obj,
                polar_value=sol.value,
                n_modes=model.n_modes,
                inner_iters=inner_iters,
                k_bar_star=sol.k_bar_star,
            )
        )
        if sol.value <= 1.0 + cfg.epsilon:
            trace.converged = True
            trace.stop_reason = "certificate"
            break
        if cfg.max_modes is not None and model.n_modes >= cfg.max_modes:
            trace.stop_reason = "max_modes"
            break
        residual_inner = lambda_reg * sol.value  # d*^T (Y - D X^T) x* = lambda * polar
        tau = optimal_tau(residual_inner, lambda_reg, sol.d_star, sol.x_star)
        model = append_mode(model, sol, tau)
    else:
        trace.stop_reason = "max_outer_iters"
    return model, trace
