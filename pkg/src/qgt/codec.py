"""Uniform encode/decode entry points over the three code families."""

from __future__ import annotations

import numpy as np

from .basic import BasicCode, decode_basic, encode_basic
from .combined import CombinedCode, decode_combined, encode_combined
from .scqgt import ScqgtCode, decode_scqgt, encode_scqgt

Code = BasicCode | ScqgtCode | CombinedCode


def encode(code: Code, x) -> np.ndarray:
    if isinstance(code, BasicCode):
        return encode_basic(code, x)
    if isinstance(code, ScqgtCode):
        return encode_scqgt(code, x)
    if isinstance(code, CombinedCode):
        return encode_combined(code, x)
    raise TypeError(f"unknown code type {type(code).__name__}")


def decode(code: Code, y) -> np.ndarray:
    if isinstance(code, BasicCode):
        return decode_basic(code, y)
    if isinstance(code, ScqgtCode):
        return decode_scqgt(code, y)
    if isinstance(code, CombinedCode):
        return decode_combined(code, y)
    raise TypeError(f"unknown code type {type(code).__name__}")


def kind(code: Code) -> str:
    return code.describe()["kind"]


def error_bound(code: Code) -> int:
    """Hamming error each decoder promises inside its noise budget."""
    if isinstance(code, BasicCode):
        return code.params.d0
    return 4 * code.params.d0


def sparsity(code: Code) -> int | None:
    """Sparsity promise on the data vector, if any."""
    return code.params.k if isinstance(code, ScqgtCode) else None


def noise_budget(code: Code) -> float:
    """Largest noise bound at which :func:`error_bound` is promised."""
    if isinstance(code, ScqgtCode):
        return code.detect_scale * code.params.e
    return code.noise_budget
