"""Optional Numba acceleration.

The hot inner loops (per-candidate variance-reduction evaluations inside
the greedy searches) are written as plain Python-over-ndarray functions
and compiled with ``numba.njit`` when it is installed.  Without Numba the
same code runs uncompiled: slow, but identical results.
"""

try:
    from numba import njit
except ModuleNotFoundError:  # pragma: no cover - exercised only on bare installs

    def njit(*args, **kwargs):
        def decorate(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return decorate


__all__ = ["njit"]
