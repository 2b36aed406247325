"""Discrete second-derivative operator, its eigenbasis, and spectral filters.

Everything downstream (the solver's Helmholtz penalty and the polar line
search) is expressed in the eigenbasis of the Dirichlet Laplacian, where
the quadratic operator I + gamma (L + k_bar I)^2 becomes a diagonal
filter with coefficients 1 / sqrt(1 + gamma (k_bar + lambda_i)^2).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from wavefactor.errors import DimensionError, NumericalError

K_BAR_MAX = 4.0  # squared wavenumber range on the unit grid


@dataclass(frozen=True)
class Laplacian:
    """Tridiagonal second-difference operator with Dirichlet boundary rows."""

    n: int
    matrix: np.ndarray
    delta_l: float = 1.0

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply L to a vector or to each column of a matrix."""
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.n:
            raise DimensionError(f"expected leading dimension {self.n}, got {v.shape[0]}")
        out = -2.0 * v
        if self.n > 1:
            out[:-1] += v[1:]
            out[1:] += v[:-1]
        return out


@dataclass(frozen=True)
class SpectralBasis:
    """Orthogonal eigenvectors (columns of gamma) and ascending eigenvalues of L."""

    gamma: np.ndarray
    lam: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]


@dataclass(frozen=True)
class FilterSpec:
    """Band-pass filter: center k_bar in [0, 4], inverse-bandwidth weight gamma_reg."""

    k_bar: float
    gamma_reg: float

    def __post_init__(self):
        if not 0.0 <= self.k_bar <= K_BAR_MAX:
            raise ValueError(f"k_bar must lie in [0, {K_BAR_MAX}], got {self.k_bar}")
        if self.gamma_reg < 0.0:
            raise ValueError(f"gamma_reg must be nonnegative, got {self.gamma_reg}")


def build_laplacian(n: int) -> Laplacian:
    """Tridiagonal matrix with -2 on the diagonal and 1 off-diagonal, unit step."""
    if n < 1:
        raise DimensionError(f"spatial sample count must be >= 1, got {n}")
    m = np.zeros((n, n))
    np.fill_diagonal(m, -2.0)
    idx = np.arange(n - 1)
    m[idx, idx + 1] = 1.0
    m[idx + 1, idx] = 1.0
    return Laplacian(n=n, matrix=m)


def eigendecompose(lap: Laplacian) -> SpectralBasis:
    """Eigendecomposition of L with deterministic eigenvector signs.

    Uses the symmetric-tridiagonal solver; eigenvalues come out ascending.
    The first nonzero entry of each eigenvector is made positive so output
    is reproducible across runs and platforms.
    """
    d = np.full(lap.n, -2.0)
    e = np.ones(max(lap.n - 1, 0))
    try:
        lam, gamma = scipy.linalg.eigh_tridiagonal(d, e)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - solver failure
        raise NumericalError(f"tridiagonal eigensolver failed: {exc}") from exc
    for j in range(lap.n):
        col = gamma[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            gamma[:, j] = -col
    basis = SpectralBasis(gamma=gamma, lam=lam)
    resid = np.linalg.norm(gamma @ np.diag(lam) @ gamma.T - lap.matrix)
    if resid > 1e-8 * max(np.linalg.norm(lap.matrix), 1.0):  # pragma: no cover
        raise NumericalError("eigendecomposition residual too large", residual=resid)
    return basis


def filter_coefficients(basis: SpectralBasis, spec: FilterSpec) -> np.ndarray:
    """Diagonal entries of (I + gamma (k_bar I + Lambda)^2)^(-1/2), each in (0, 1]."""
    return 1.0 / np.sqrt(1.0 + spec.gamma_reg * (spec.k_bar + basis.lam) ** 2)


def apply_A_inv_half(basis: SpectralBasis, spec: FilterSpec, Z: np.ndarray) -> np.ndarray:
    """Apply A(k_bar)^(-1/2) = Gamma diag(c) Gamma^T to the columns of Z."""
    Z = np.asarray(Z, dtype=float)
    if Z.shape[0] != basis.n:
        raise DimensionError(f"expected leading dimension {basis.n}, got {Z.shape[0]}")
    c = filter_coefficients(basis, spec)
    w = basis.gamma.T @ Z
    if w.ndim == 1:
        return basis.gamma @ (c * w)
    return basis.gamma @ (c[:, None] * w)


def apply_A(op: Laplacian | SpectralBasis, spec: FilterSpec, d: np.ndarray) -> np.ndarray:
    """Apply A(k_bar) = I + gamma (L + k_bar I)^2 to a vector."""
    d = np.asarray(d, dtype=float)
    if isinstance(op, SpectralBasis):
        if d.shape[0] != op.n:
            raise DimensionError(f"expected length {op.n}, got {d.shape[0]}")
        w = op.gamma.T @ d
        scaled = (1.0 + spec.gamma_reg * (spec.k_bar + op.lam) ** 2) * w
        return op.gamma @ scaled
    if d.shape[0] != op.n:
        raise DimensionError(f"expected length {op.n}, got {d.shape[0]}")
    u = op.matvec(d) + spec.k_bar * d
    return d + spec.gamma_reg * (op.matvec(u) + spec.k_bar * u)


def spectrum(basis: SpectralBasis, y: np.ndarray) -> np.ndarray:
    """Project y onto the Laplacian eigenbasis (Gamma^T y)."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] != basis.n:
        raise DimensionError(f"expected length {basis.n}, got {y.shape[0]}")
    return basis.gamma.T @ y


def dirichlet_eigenvalues(n: int) -> np.ndarray:
    """Closed-form eigenvalues -4 sin^2(pi i / (2 (n+1))), i = 1..n, ascending."""
    i = np.arange(1, n + 1)
    return np.sort(-4.0 * np.sin(np.pi * i / (2.0 * (n + 1))) ** 2)
