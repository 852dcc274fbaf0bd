"""Backend dispatch for the pairwise reduction kernels.

The environment variable GFLOW_BACKEND selects the implementation at import
time: "numba" (default) or "numpy". If numba is requested but cannot be
imported, the numpy twin is used and BACKEND_NAME reflects that.

configure(threads, deterministic) chooses between the sequential kernels
(bit-reproducible, the default) and the parallel ones (threads > 1 and
deterministic=False; numba only, numpy aliases back to serial).
"""

import os

_requested = os.environ.get("GFLOW_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"GFLOW_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        from . import numba_backend as _impl
    except ImportError:
        from . import numpy_backend as _impl
else:
    from . import numpy_backend as _impl

BACKEND_NAME = _impl.NAME

_parallel = False


def configure(threads=1, deterministic=True):
    """Set threading for subsequent kernel calls.

    Parallel reductions may reassociate floating-point sums, so they are
    only enabled when the caller explicitly gives up determinism.
    """
    global _parallel
    threads = max(1, int(threads))
    _impl.set_num_threads(threads)
    _parallel = threads > 1 and not deterministic


def warmup():
    _impl.warmup()


def weights_table(centers, mu, expo):
    return _impl.weights_table(centers, mu, expo)


def energy_sum(w, u, p):
    if _parallel:
        return _impl.energy_sum_par(w, u, p)
    return _impl.energy_sum(w, u, p)


def pairing_sum(w, v, phi, p):
    if _parallel:
        return _impl.pairing_sum_par(w, v, phi, p)
    return _impl.pairing_sum(w, v, phi, p)


def gradient(w, u, p):
    if _parallel:
        return _impl.gradient_par(w, u, p)
    return _impl.gradient(w, u, p)


def min_pair_normsq(u):
    return _impl.min_pair_normsq(u)


def killing_pair_sum(w, u, x, eta, p):
    return _impl.killing_pair_sum(w, u, x, eta, p)


def cross_pair_sum(w, u, psi, p):
    return _impl.cross_pair_sum(w, u, psi, p)
