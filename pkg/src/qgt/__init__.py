"""Quantitative group testing codes that tolerate bounded adversarial noise.

Three code families share one interface in :mod:`qgt.codec`: the
Hadamard-Kronecker ``basic`` code, the expander-based sparse code
(``scqgt``) and their ``combined`` stack.
"""

from .basic import BasicCode, build_basic
from .codec import decode, encode, error_bound, noise_budget
from .combined import CombinedCode, build_combined
from .params import CodeParams, ParameterError
from .scqgt import ScqgtCode, build_scqgt

__all__ = [
    "BasicCode",
    "CodeParams",
    "CombinedCode",
    "ParameterError",
    "ScqgtCode",
    "build_basic",
    "build_combined",
    "build_scqgt",
    "decode",
    "encode",
    "error_bound",
    "noise_budget",
]
