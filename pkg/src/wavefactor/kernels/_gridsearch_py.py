"""Pure-numpy fallback for the line-search kernel."""

import numpy as np

_CHUNK = 64  # grid points per batched eigvalsh call, bounds peak memory


def filtered_spectral_norms(
    gram: np.ndarray, lam: np.ndarray, k_grid: np.ndarray, gamma: float
) -> np.ndarray:
    """sqrt(lambda_max(diag(c_k) G diag(c_k))) for every k_bar in k_grid.

    gram is the n x n Gram matrix W W^T of the residual expressed in the
    Laplacian eigenbasis, lam its eigenvalues, and
    c_k,i = 1 / sqrt(1 + gamma (k_bar + lam_i)^2).
    """
    gram = np.asarray(gram, dtype=float)
    lam = np.asarray(lam, dtype=float)
    k_grid = np.atleast_1d(np.asarray(k_grid, dtype=float))
    out = np.empty(k_grid.shape[0])
    for start in range(0, k_grid.shape[0], _CHUNK):
        ks = k_grid[start : start + _CHUNK]
        coef = 1.0 / np.sqrt(1.0 + gamma * (ks[:, None] + lam[None, :]) ** 2)
        scaled = coef[:, :, None] * gram[None, :, :] * coef[:, None, :]
        eigs = np.linalg.eigvalsh(scaled)
        out[start : start + ks.shape[0]] = np.sqrt(np.maximum(eigs[:, -1], 0.0))
    return out
