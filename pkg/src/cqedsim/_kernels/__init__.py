"""Propagation kernels: numba-jitted hot loops with a pure-numpy fallback.

Backend selection (env var ``CQEDSIM_BACKEND``):

  auto   use numba if importable, else numpy   (default)
  numba  require the jitted kernels
  numpy  force the pure-numpy fallback

Both backends implement the same embedded Runge-Kutta 5(4) scheme with PI
step control; results agree to integrator tolerance but are only
bit-reproducible within one backend.
"""

import os

_impl = None
_impl_name = None


def backend_name():
    """Resolved backend name ('numba' or 'numpy')."""
    requested = os.environ.get("CQEDSIM_BACKEND", "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"CQEDSIM_BACKEND={requested!r}; expected auto, numba or numpy")
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        return "numba"
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def get_impl():
    """Import (once) and return the active kernel module."""
    global _impl, _impl_name
    name = backend_name()
    if _impl is not None and _impl_name == name:
        return _impl
    if name == "numba":
        from . import numba_impl as impl
    else:
        from . import numpy_impl as impl
    _impl, _impl_name = impl, name
    return _impl
