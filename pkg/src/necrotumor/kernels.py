"""Kernel backend selection: compiled extension if available, else the
pure-Python fallback."""

try:
    from . import _psor as _backend

    BACKEND = "compiled"
except ImportError:  # extension not built
    from . import _psor_py as _backend

    BACKEND = "python"

psor_tridiag = _backend.psor_tridiag
psor_grid = _backend.psor_grid
