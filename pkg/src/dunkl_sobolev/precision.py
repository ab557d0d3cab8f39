"""Scalar backends: binary64 floats or mpmath extended-precision numbers.

Extended numbers live in a private :class:`mpmath.MPContext`, so selecting
extended precision never touches mpmath's global state.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from mpmath import MPContext

EXTENDED_DPS = 50

EXT = MPContext()
EXT.dps = EXTENDED_DPS


@dataclass(frozen=True)
class Precision:
    name: str

    @property
    def extended(self) -> bool:
        return self.name == "extended"

    def num(self, x):
        """Convert ``x`` to the active scalar type.

        Floats are routed through ``repr`` in extended mode so that a
        user-supplied ``1.2`` means the decimal 1.2, not its binary image.
        """
        if self.extended:
            if isinstance(x, float):
                return EXT.mpf(repr(x))
            if isinstance(x, complex):
                return EXT.mpc(x)
            return EXT.convert(x)
        if isinstance(x, (str, int, float)):
            return float(x)
        if isinstance(x, complex) or hasattr(x, "imag") and x.imag != 0:
            return complex(x)
        return float(x)

    def sqrt(self, x):
        return EXT.sqrt(x) if self.extended else math.sqrt(x)

    def gammafn(self, x):
        return EXT.gamma(x) if self.extended else math.gamma(x)

    def array(self, values) -> np.ndarray:
        if self.extended:
            return np.array([self.num(v) for v in values], dtype=object)
        return np.asarray([complex(v) if isinstance(v, complex) else float(v) for v in values])

    # Elementwise transcendental functions for arrays of scalars.
    def exp(self, x):
        return _EXT_EXP(x) if self.extended else np.exp(x)

    def sin(self, x):
        return _EXT_SIN(x) if self.extended else np.sin(x)

    def cos(self, x):
        return _EXT_COS(x) if self.extended else np.cos(x)

    def eps(self) -> float:
        return float(EXT.eps) if self.extended else float(np.finfo(float).eps)


_EXT_EXP = np.frompyfunc(EXT.exp, 1, 1)
_EXT_SIN = np.frompyfunc(EXT.sin, 1, 1)
_EXT_COS = np.frompyfunc(EXT.cos, 1, 1)

DOUBLE = Precision("double")
EXTENDED = Precision("extended")


def get_precision(name: str | Precision | None = None) -> Precision:
    """Resolve a precision name; ``None`` falls back to ``$DUNKL_PRECISION``."""
    if isinstance(name, Precision):
        return name
    if name is None:
        name = os.environ.get("DUNKL_PRECISION", "double")
    if name == "double":
        return DOUBLE
    if name == "extended":
        return EXTENDED
    raise ValueError(f"unknown precision {name!r} (expected 'double' or 'extended')")


def to_float(x) -> float:
    return float(x.real) if isinstance(x, complex) else float(x)
