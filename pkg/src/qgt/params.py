from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """Parameters outside the valid (kappa, delta, lambda) domain."""


@dataclass(frozen=True)
class CodeParams:
    """Problem size, distance threshold ``d0``, noise bound ``e``, sparsity ``k``.

    The exponent form derives ``d0 = ceil(n**kappa)``, ``e = n**delta`` and
    ``k = ceil(n**lam)``. At desk scale those degenerate, so :meth:`direct`
    takes the thresholds themselves and back-fills effective exponents.
    """

    n: int
    d0: int
    e: float
    k: int
    kappa: float
    delta: float
    lam: float = 1.0

    @property
    def epsilon(self) -> float:
        return self.kappa - 2 * self.delta

    @property
    def boundary(self) -> bool:
        """True on the ``kappa == 2 delta`` boundary."""
        return math.isclose(self.kappa, 2 * self.delta, abs_tol=1e-12)

    @classmethod
    def from_exponents(cls, n: int, kappa: float, delta: float, lam: float = 1.0) -> "CodeParams":
        if n < 2:
            raise ParameterError("n must be at least 2")
        if delta < 0 or 2 * delta > kappa + 1e-12:
            raise ParameterError(f"need 0 <= 2*delta <= kappa, got delta={delta}, kappa={kappa}")
        if not 0 < kappa < 1:
            raise ParameterError(f"kappa must lie in (0, 1), got {kappa}")
        if not kappa < lam <= 1:
            raise ParameterError(f"need kappa < lambda <= 1, got kappa={kappa}, lambda={lam}")
        return cls(
            n=n,
            d0=math.ceil(n**kappa - 1e-9),
            e=float(n**delta),
            k=min(n, math.ceil(n**lam - 1e-9)),
            kappa=kappa,
            delta=delta,
            lam=lam,
        )

    @classmethod
    def direct(cls, n: int, d0: int, e: float, k: int | None = None) -> "CodeParams":
        if n < 2:
            raise ParameterError("n must be at least 2")
        if not 1 <= d0 <= n:
            raise ParameterError(f"d0 must lie in [1, n], got {d0}")
        if e < 0:
            raise ParameterError("noise bound must be nonnegative")
        k = n if k is None else k
        if not d0 <= k <= n:
            raise ParameterError(f"need d0 <= k <= n, got d0={d0}, k={k}")
        ln = math.log(n)
        kappa = math.log(d0) / ln
        delta = min(math.log(e) / ln, kappa / 2) if e > 1 else 0.0
        return cls(n=n, d0=d0, e=float(e), k=k, kappa=kappa, delta=delta, lam=math.log(k) / ln)
