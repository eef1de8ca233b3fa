"""Hot numerical kernels with a compiled core and a numpy fallback.

The compiled module is used when it imports and ``GEOPROX_PURE_PYTHON`` is not
set to a truthy value. ``BACKEND`` names the implementation in use; both
implementations are importable explicitly through :func:`get_backend`.

Kernels
-------
tree_dist
    Batched path length between points on a weighted tree.
tree_combine
    Batched point at a fraction of the way along the tree path.
min_norm_point
    Convex weights of the minimum-norm point of a finite point set's hull.
"""
import os

from . import _pykernels


def _load_compiled():
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()

if _compiled is not None and os.environ.get("GEOPROX_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    _impl = _compiled
    BACKEND = "cython"
else:
    _impl = _pykernels
    BACKEND = "python"

tree_dist = _impl.tree_dist
tree_combine = _impl.tree_combine
min_norm_point = _impl.min_norm_point


def get_backend(name):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def compiled_available():
    return _compiled is not None
