"""Hot kernels with a compiled implementation and a pure-Python fallback.

The compiled extension is used when it imports; set ``INOCULATION_BACKEND``
to ``python`` to force the fallback (``cython`` makes a missing extension an
error instead of a silent downgrade).
"""
import os
from fractions import Fraction

from . import _pykernels

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

INT64_LIMIT = 1 << 62


def get_backend(name=None):
    name = name or os.environ.get("INOCULATION_BACKEND", "auto")
    if name == "python":
        return _pykernels
    if name == "cython":
        if _kernels is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _kernels
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}")
    return _kernels if _kernels is not None else _pykernels


backend = get_backend()


def scaled_weights(n, C, L, F):
    """Integer weights such that cost comparisons become integer comparisons.

    Every actual cost is multiplied by ``n * den(C) * den(L)``: a secure
    player then costs ``w_sec`` and an insecure one ``w_loss * k``.
    """
    C, L, F = Fraction(C), Fraction(L), Fraction(F)
    w_sec = C.numerator * n * L.denominator
    w_loss = L.numerator * C.denominator
    return w_sec, w_loss, F.numerator, F.denominator


def scale_factor(n, C, L):
    return n * Fraction(C).denominator * Fraction(L).denominator


def pick_backend(n, weights, preferred=None):
    """Return the requested backend, downgrading to Python if int64 could overflow."""
    chosen = get_backend(preferred) if preferred else backend
    if chosen is _pykernels:
        return chosen
    w_sec, w_loss, f_num, f_den = weights
    top = max(w_sec, w_loss * n)
    if (f_den + f_num) * (n + 1) * (n + 1) * top >= INT64_LIMIT:
        return _pykernels
    return chosen
