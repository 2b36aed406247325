"""Hot kernel for the polar line search, with a compiled core when available.

The line search evaluates, for hundreds of k_bar grid points, the largest
singular value of the filtered residual diag(c(k_bar)) W with W fixed.
That equals sqrt(lambda_max(diag(c) G diag(c))) with G = W W^T computed
once, so the kernel only needs the Gram matrix, the Laplacian eigenvalues
and the grid.  A Cython extension calls LAPACK dsyevr per grid point; the
pure-numpy fallback batches eigvalsh over chunks of the grid.
"""

from wavefactor.kernels._gridsearch_py import filtered_spectral_norms as _py_impl

try:
    from wavefactor.kernels._gridsearch import filtered_spectral_norms as _impl

    BACKEND = "cython"
except ImportError:  # extension not built; pure-python fallback
    _impl = _py_impl
    BACKEND = "python"

filtered_spectral_norms = _impl
filtered_spectral_norms_py = _py_impl
