"""Closed-form pooling-complexity bounds and an empirical achievability probe.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .oracle import is_detecting
from .params import ParameterError

LOG_BASE = 2


@dataclass
class BoundSheet:
    n: float
    kappa: float
    delta: float
    lam: float | None = None
    regime: str = "2d<k"
    cqgt_lower: float | None = None
    cqgt_upper: float | None = None
    basic_height: float | None = None
    scqgt_lower: float | None = None
    scqgt_upper: float | None = None
    scqgt_constr_height: float | None = None
    combined_height: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        out["log_base"] = LOG_BASE
        return {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in out.items()}


def _regime(kappa: float, delta: float) -> str:
    return "2d=k" if math.isclose(2 * delta, kappa, abs_tol=1e-12) else "2d<k"


def _check(n, kappa, delta, lam=None):
    if n < 2:
        raise ParameterError("n must be at least 2")
    if delta < 0 or 2 * delta > kappa + 1e-12 or not kappa < 1:
        raise ParameterError(f"need 0 <= 2*delta <= kappa < 1, got delta={delta}, kappa={kappa}")
    if lam is not None and not kappa < lam < 1:
        raise ParameterError(f"need kappa < lambda < 1, got kappa={kappa}, lambda={lam}")


def cqgt_bounds(n: float, kappa: float, delta: float) -> BoundSheet:
    """Converse ``2/(1-2d) n/log n``, achievability ``8/(1-2d) n/log n`` and
    the basic construction's ``48/(k-2d) n/log n``."""
    _check(n, kappa, delta)
    base = n / math.log2(n)
    eps = kappa - 2 * delta
    regime = _regime(kappa, delta)
    return BoundSheet(
        n=n,
        kappa=kappa,
        delta=delta,
        regime=regime,
        cqgt_lower=2 / (1 - 2 * delta) * base,
        cqgt_upper=8 / (1 - 2 * delta) * base,
        basic_height=math.inf if regime == "2d=k" else 48 / eps * base,
    )


def _design_terms(n: float, lam: float, eps: float):
    log_n = math.log2(n)
    ratio = lam * log_n**2 / eps
    spread = lam * log_n * math.log2(ratio)
    return ratio, spread


def constr_height(n: float, kappa: float, delta: float, lam: float) -> float:
    """``n^l (l log^2 n / eps)^3 4^sqrt(3 l log n log(l log^2 n / eps))``."""
    eps = kappa - 2 * delta
    if eps <= 0:
        return math.inf
    ratio, spread = _design_terms(n, lam, eps)
    return n**lam * ratio**3 * 4 ** math.sqrt(3 * spread)


def chosen_parameters(n: float, kappa: float, delta: float, lam: float) -> dict:
    """Expander parameters ``(N, D, M, K, A)`` of the explicit design."""
    eps = kappa - 2 * delta
    if eps <= 0:
        raise ParameterError("the explicit design needs kappa > 2 delta")
    ratio, spread = _design_terms(n, lam, eps)
    d = ratio * 2 ** math.sqrt(spread / 3)
    m = d**2 * n**lam * 2 ** math.sqrt(3 * spread)
    return {"N": n, "D": d, "M": m, "K": n**lam, "A": (1 - eps) * d}


def scqgt_bounds(n: float, kappa: float, delta: float, lam: float) -> BoundSheet:
    _check(n, kappa, delta, lam)
    regime = _regime(kappa, delta)
    scale = n**lam * (math.log2(n) if regime == "2d=k" else 1.0)
    coef = (1 - lam) / (lam - 2 * delta)
    return BoundSheet(
        n=n,
        kappa=kappa,
        delta=delta,
        lam=lam,
        regime=regime,
        scqgt_lower=2 * coef * scale,
        scqgt_upper=4 * coef * scale,
        scqgt_constr_height=constr_height(n, kappa, delta, lam),
    )


def bound_sheet(n: float, kappa: float, delta: float, lam: float | None = None) -> BoundSheet:
    sheet = cqgt_bounds(n, kappa, delta)
    if lam is None:
        return sheet
    sparse = scqgt_bounds(n, kappa, delta, lam)
    sheet.lam = lam
    sheet.scqgt_lower = sparse.scqgt_lower
    sheet.scqgt_upper = sparse.scqgt_upper
    sheet.scqgt_constr_height = sparse.scqgt_constr_height
    # basic code for threshold n^lambda plus the sparse design
    sheet.combined_height = 48 / (lam - 2 * delta) * n / math.log2(n) + sparse.scqgt_constr_height
    return sheet


SWEEP_COLUMNS = (
    "n", "kappa", "delta", "lambda", "regime", "lower", "upper",
    "basic", "constr", "combined", "scqgt_lower", "scqgt_upper",
)  # fmt: skip


def sweep_rows(ns, kappas, deltas, lams):
    """One CSV-ready row per valid parameter combination."""
    for n in ns:
        for kappa in kappas:
            for delta in deltas:
                for lam in lams:
                    try:
                        s = bound_sheet(n, kappa, delta, lam)
                    except ParameterError:
                        continue
                    yield {
                        "n": n,
                        "kappa": kappa,
                        "delta": delta,
                        "lambda": "" if lam is None else lam,
                        "regime": s.regime,
                        "lower": s.cqgt_lower,
                        "upper": s.cqgt_upper,
                        "basic": s.basic_height,
                        "constr": "" if s.scqgt_constr_height is None else s.scqgt_constr_height,
                        "combined": "" if s.combined_height is None else s.combined_height,
                        "scqgt_lower": "" if s.scqgt_lower is None else s.scqgt_lower,
                        "scqgt_upper": "" if s.scqgt_upper is None else s.scqgt_upper,
                    }


def random_achievability_probe(n: int, d0: int, e: float, height: int, trials: int, seed=None) -> float:
    """Fraction of i.i.d. uniform 0/1 ``height x n`` matrices that are ``(n, d0, e)``-detecting."""
    return float(random_achievability_sweep(n, d0, e, [height], trials, seed)[0])


def random_achievability_sweep(n: int, d0: int, e: float, heights, trials: int, seed=None) -> np.ndarray:
    """Paired sweep: each trial draws one tall matrix and tests its row prefixes.

    A prefix that detects keeps detecting when rows are added, so the
    per-trial outcomes (and the fractions) are non-decreasing in height.
    """
    if n > 14:
        raise ParameterError("the probe is limited to n <= 14 (oracle size)")
    heights = list(heights)
    rng = np.random.default_rng(seed)
    top = max(heights)
    passed = np.zeros(len(heights))
    order = np.argsort(heights)
    for _ in range(trials):
        q = rng.integers(0, 2, (top, n))
        ok = False
        for i in order:
            ok = ok or (2 * e <= heights[i] and is_detecting(q[: heights[i]], d0, e))
            passed[i] += ok
    return passed / trials
