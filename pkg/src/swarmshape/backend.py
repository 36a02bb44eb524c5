"""Selects the batch kernel: compiled extension if built, numpy otherwise.

Both backends expose the same module-level functions (``velocity_field``,
``shape_targets``, ``shape_distances``).  Each backend is deterministic on
its own — identical inputs give bit-identical outputs — but the two are not
bit-identical to each other (summation order and libm details differ at the
last few ulps), so a run should not mix backends mid-stream.  The integrator
never does.
"""

from __future__ import annotations

from . import _pure

try:  # extension may be absent: source checkout without build, or no compiler
    from . import _kernel as _compiled
except ImportError:
    _compiled = None

__all__ = ["has_compiled", "active_name", "get_backend", "BACKEND_NAMES"]

BACKEND_NAMES = ("auto", "compiled", "python")


def has_compiled() -> bool:
    """True when the compiled kernel was built and imports cleanly."""
    return _compiled is not None


def active_name() -> str:
    """Name of the backend picked by default: ``compiled`` or ``python``."""
    return "compiled" if has_compiled() else "python"


def get_backend(name: str | None = None):
    """Resolve a backend module by name.

    ``None`` or ``"auto"`` picks the compiled kernel when available;
    ``"compiled"`` insists on it (raising ``RuntimeError`` if unbuilt);
    ``"python"`` always returns the numpy fallback.  A module object passed
    through (anything with a ``velocity_field``) is returned unchanged, which
    is how the tests pin a specific backend.
    """
    if name is None or name == "auto":
        return _compiled if _compiled is not None else _pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError(
                "compiled backend requested but the extension is not built"
            )
        return _compiled
    if name == "python":
        return _pure
    if hasattr(name, "velocity_field"):
        return name
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKEND_NAMES}")
