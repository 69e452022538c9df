"""Stepper backend selection: compiled extension when built, numpy otherwise."""

from __future__ import annotations

import os

from . import _stepper_np

try:
    from . import _stepper as _stepper_compiled
except ImportError:
    _stepper_compiled = None

HAVE_COMPILED = _stepper_compiled is not None

_ENV_VAR = "EITMEM_BACKEND"


def available_backends() -> tuple[str, ...]:
    return ("compiled", "numpy") if HAVE_COMPILED else ("numpy",)


def get_stepper(backend: str | None = None):
    """Resolve a stepper function by name ("compiled", "numpy" or None for best).

    The EITMEM_BACKEND environment variable overrides the default choice.
    """
    if backend is None:
        backend = os.environ.get(_ENV_VAR) or ("compiled" if HAVE_COMPILED else "numpy")
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled stepper extension is not built")
        return _stepper_compiled.run_stepper
    if backend == "numpy":
        return _stepper_np.run_stepper
    raise ValueError(f"unknown backend {backend!r}; choose from {available_backends()}")
