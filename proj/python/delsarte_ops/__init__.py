"""Delsarte transmutation operators: dressings, Lax pairs, soliton generation.

Thin re-export of the compiled extension. When installed as a wheel the
extension lives inside this package; in a plain CMake build tree it sits on
the PYTHONPATH as a top-level module.
"""

try:
    from ._delsarte import (
        DelsarteError,
        dress_schrodinger,
        kdv_soliton,
        run,
        sweep,
    )
except ImportError:  # CMake build tree layout
    from _delsarte import (
        DelsarteError,
        dress_schrodinger,
        kdv_soliton,
        run,
        sweep,
    )

__all__ = ["DelsarteError", "dress_schrodinger", "kdv_soliton", "run", "sweep"]
