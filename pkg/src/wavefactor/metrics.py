"""Evaluation protocol: greedy mode matching, normalized MSEs, PCA baseline,
and Monte-Carlo aggregation over seeds."""

import math
from dataclasses import dataclass, field

import numpy as np

from wavefactor import datagen
from wavefactor.errors import DimensionError
from wavefactor.solver import SolverConfig, factorize

FOURIER_PAD = 4  # zero-padding factor for magnitude spectra


@dataclass(frozen=True)
class ModeMatch:
    """Injective recovered-to-truth assignment with per-pair sign corrections."""

    pairs: tuple[tuple[int, int], ...]  # (recovered index, truth index)
    signs: tuple[int, ...]
    flagged: bool = False  # a zero-norm recovered column was encountered


@dataclass
class EvalReport:
    mse: float
    fourier_mse: float
    per_mode: list[float] = field(default_factory=list)
    trials: int = 1
    mse_mean: float = 0.0
    mse_std: float = 0.0
    fourier_mse_mean: float = 0.0
    fourier_mse_std: float = 0.0
    failures: int = 0


def match_modes(recovered: np.ndarray, truth: np.ndarray) -> ModeMatch:
    """Greedy assignment: recovered modes in descending norm order each claim
    the unassigned truth mode with maximal |correlation|."""
    recovered = np.atleast_2d(np.asarray(recovered, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    if recovered.shape[0] != truth.shape[0]:
        raise DimensionError("recovered and truth modes must share the row count")
    n_rec, n_true = recovered.shape[1], truth.shape[1]
    rec_norms = np.linalg.norm(recovered, axis=0)
    true_norms = np.linalg.norm(truth, axis=0)
    order = np.argsort(-rec_norms, kind="stable")
    available = np.ones(n_true, dtype=bool)
    pairs: list[tuple[int, int]] = []
    signs: list[int] = []
    flagged = False
    deferred: list[int] = []
    for r in order:
        if rec_norms[r] == 0.0:
            flagged = True
            deferred.append(int(r))
            continue
        if not available.any():
            break
        corr = recovered[:, r] @ truth / np.where(true_norms > 0, true_norms, 1.0)
        corr = np.where(available, np.abs(corr) / rec_norms[r], -np.inf)
        t = int(np.argmax(corr))
        available[t] = False
        inner = recovered[:, r] @ truth[:, t]
        pairs.append((int(r), t))
        signs.append(1 if inner >= 0 else -1)
    for r in deferred:  # zero-norm columns match last, sign +1
        if not available.any():
            break
        t = int(np.argmax(available))
        available[t] = False
        pairs.append((r, t))
        signs.append(1)
    return ModeMatch(pairs=tuple(pairs), signs=tuple(signs), flagged=flagged)


def _pair_errors(recovered: np.ndarray, truth: np.ndarray, match: ModeMatch) -> list[float]:
    errors = []
    for (r, t), sign in zip(match.pairs, match.signs):
        d = recovered[:, r]
        d_true = truth[:, t]
        d_true = d_true / np.linalg.norm(d_true)
        nrm = np.linalg.norm(d)
        if nrm == 0.0:
            errors.append(1.0)  # ||0 - unit truth||^2
            continue
        errors.append(float(np.sum((d / nrm - sign * d_true) ** 2)))
    return errors


def mode_mse(recovered: np.ndarray, truth: np.ndarray, match: ModeMatch) -> float:
    """Mean over matched pairs of ||d/||d|| - c d_true/||d_true||||^2."""
    recovered = np.atleast_2d(np.asarray(recovered, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    errors = _pair_errors(recovered, truth, match)
    return float(np.mean(errors)) if errors else 0.0


def _magnitude_spectrum(modes: np.ndarray) -> np.ndarray:
    mags = np.abs(np.fft.rfft(modes, n=FOURIER_PAD * modes.shape[0], axis=0))
    norms = np.linalg.norm(mags, axis=0)
    return mags / np.where(norms > 0, norms, 1.0)


def fourier_mse(recovered: np.ndarray, truth: np.ndarray, match: ModeMatch) -> float:
    """Mode MSE on unit-normalized zero-padded Fourier magnitudes (sign-free)."""
    recovered = np.atleast_2d(np.asarray(recovered, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    rec_mag = _magnitude_spectrum(recovered)
    true_mag = _magnitude_spectrum(truth)
    errors = []
    for (r, t), _ in zip(match.pairs, match.signs):
        if np.linalg.norm(recovered[:, r]) == 0.0:
            errors.append(1.0)
            continue
        errors.append(float(np.sum((rec_mag[:, r] - true_mag[:, t]) ** 2)))
    return float(np.mean(errors)) if errors else 0.0


def pca_baseline(Y: np.ndarray, N: int) -> np.ndarray:
    """Top-N left singular vectors with a deterministic sign convention;
    pads with zero columns when N exceeds the rank."""
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    u, s, _ = np.linalg.svd(Y, full_matrices=False)
    tol = s[0] * max(Y.shape) * np.finfo(float).eps if s.size else 0.0
    rank = int(np.sum(s > tol))
    cols = min(N, rank, u.shape[1])
    out = np.zeros((Y.shape[0], N))
    out[:, :cols] = u[:, :cols]
    for j in range(cols):
        nz = np.flatnonzero(np.abs(out[:, j]) > 1e-14)
        if nz.size and out[nz[0], j] < 0:
            out[:, j] = -out[:, j]
    return out


def oracle_mode_count(dataset: datagen.Dataset) -> int:
    return dataset.ground_truth_modes.shape[1]


def run_trial(
    kind: datagen.Kind | str,
    snr_db: float,
    seed: int,
    method: str = "wimf",
    solver_cfg: SolverConfig | None = None,
) -> tuple[float, float]:
    """generate -> noise -> factorize (or PCA) -> evaluate for one seed."""
    dataset = datagen.generate(kind, seed=seed)
    noisy = datagen.add_noise(dataset, snr_db, seed=seed)
    n_modes = oracle_mode_count(dataset)
    if method == "pca":
        modes = pca_baseline(noisy.Y, n_modes)
    elif method == "wimf":
        lam, _ = datagen.lambda_rule(noisy.Y, n_modes)
        gamma = datagen.gamma_rule(noisy.grid.n_d, noisy.params.delta)
        cfg = solver_cfg or SolverConfig(max_modes=n_modes, seed=seed)
        model, _ = factorize(noisy.Y, cfg, lambda_reg=lam, gamma_reg=gamma)
        modes = model.D
    else:
        raise ValueError(f"unknown method {method!r}")
    match = match_modes(modes, dataset.ground_truth_modes)
    return (
        mode_mse(modes, dataset.ground_truth_modes, match),
        fourier_mse(modes, dataset.ground_truth_modes, match),
    )


def monte_carlo(
    kind: datagen.Kind | str,
    snr_db: float,
    trials: int,
    seeds: list[int] | None = None,
    method: str = "wimf",
    solver_cfg: SolverConfig | None = None,
) -> EvalReport:
    """Run independent seeded trials and aggregate mean/std of both MSEs.

    Trials that raise are counted in `failures` and excluded from the
    aggregates.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seeds is None:
        seeds = list(range(trials))
    if len(seeds) != trials:
        raise ValueError("seed list length must equal trials")
    mses, fmses = [], []
    failures = 0
    for seed in seeds:
        try:
            mse, fmse = run_trial(kind, snr_db, seed, method=method, solver_cfg=solver_cfg)
        except Exception:
            failures += 1
            continue
        mses.append(mse)
        fmses.append(fmse)
    if not mses:
        raise RuntimeError(f"all {trials} trials failed for {kind} at {snr_db} dB")
    mses_arr, fmses_arr = np.array(mses), np.array(fmses)
    return EvalReport(
        mse=float(mses_arr.mean()),
        fourier_mse=float(fmses_arr.mean()),
        per_mode=mses,
        trials=trials,
        mse_mean=float(mses_arr.mean()),
        mse_std=float(mses_arr.std(ddof=0)) if len(mses) > 1 else 0.0,
        fourier_mse_mean=float(fmses_arr.mean()),
        fourier_mse_std=float(fmses_arr.std(ddof=0)) if len(fmses) > 1 else 0.0,
        failures=failures,
    )
