"""Seeded experiment runs over a saved code file.

A config is a flat ``key=value`` text file::

    code = combined.qgt
    noise = segment-attack:0.5
    trials = 500
    seed = 7

Optional keys: ``density`` (Bernoulli rate of the data, default 0.5,
ignored for sparse codes), ``results_csv`` and ``threads``. ``noise`` may
name ``all`` as the strategy to run every strategy in turn.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import codec
from .adversary import STRATEGIES, NoiseSpec, gen_noise
from .codefile import load_code
from .combined import CombinedCode, decode_combined_detailed
from .scqgt import ScqgtCode

TIMING_FIELDS = ("decode_ms", "wall_ms")
CSV_COLUMNS = (
    "run_id", "kind", "n", "height", "d0", "k", "strategy", "bound", "budget",
    "trials", "max_error", "mean_error", "bound_d0", "violations", "wall_ms", "code_sha256",
)  # fmt: skip
_KNOWN_KEYS = {"code", "noise", "trials", "seed", "density", "results_csv", "threads"}


class ConfigError(ValueError):
    pass


def parse_config(text: str, overrides=()) -> dict:
    """Parse ``key=value`` lines (``#`` starts a comment), then apply overrides."""
    config = {}
    for number, raw in enumerate([*text.splitlines(), *overrides], 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {number}: expected key=value, got {raw!r}")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {number}: unknown key {key!r}")
        config[key] = value.strip()
    return config


def load_config(path, overrides=()) -> dict:
    config = parse_config(Path(path).read_text(), overrides)
    if "code" in config:
        # code paths are relative to the config file
        config["code"] = str(Path(path).parent / config["code"])
    return config


def expand_noise(config: dict) -> list[dict]:
    """One config per strategy when the noise spec names ``all``."""
    strategy, _, rest = config.get("noise", "zero:0").partition(":")
    if strategy != "all":
        return [config]
    return [{**config, "noise": f"{s}:{rest}"} for s in STRATEGIES]


@dataclass
class ExperimentReport:
    run_id: str
    code: dict
    code_sha256: str
    params: dict
    noise: str
    noise_budget: float
    within_budget: bool
    trials: int
    records: list = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("wall_ms")
            for rec in out["records"]:
                rec.pop("decode_ms", None)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)

    def csv_row(self) -> dict:
        agg = self.aggregate
        spec = NoiseSpec.parse(self.noise)
        return {
            "run_id": self.run_id,
            "kind": self.code["kind"],
            "n": self.params["n"],
            "height": self.code["height"],
            "d0": self.params["d0"],
            "k": self.params["k"],
            "strategy": spec.strategy,
            "bound": spec.bound,
            "budget": self.noise_budget,
            "trials": self.trials,
            "max_error": agg["max_error"],
            "mean_error": agg["mean_error"],
            "bound_d0": agg["bound_d0"],
            "violations": agg["violations"],
            "wall_ms": round(self.wall_ms, 3),
            "code_sha256": self.code_sha256,
        }


def append_csv(path, row: dict) -> None:
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if fresh:
            writer.writeheader()
        writer.writerow(row)


def _draw_x(code, rng, density: float) -> np.ndarray:
    n = code.params.n
    if isinstance(code, ScqgtCode):
        x = np.zeros(n, dtype=np.int64)
        weight = int(rng.integers(0, code.params.k + 1))
        x[rng.choice(n, size=weight, replace=False)] = 1
        return x
    return (rng.random(n) < density).astype(np.int64)


def _run_trial(code, spec: NoiseSpec, master: int, index: int, density: float) -> dict:
    # counter-mode split: trial i always gets the stream of (master, i)
    rng = np.random.default_rng(np.random.SeedSequence([master, index]))
    x = _draw_x(code, rng, density)
    seed = int(rng.integers(0, 2**63 - 1))
    noise = gen_noise(NoiseSpec(spec.bound, spec.strategy, seed), code, x)
    y = codec.encode(code, x) + noise
    start = time.perf_counter()
    if isinstance(code, CombinedCode):
        info = decode_combined_detailed(code, y)
        x_hat = info.x
    else:
        x_hat = codec.decode(code, y)
    rec = {
        "seed": seed,
        "hamming_error": int(np.count_nonzero(x_hat != x)),
        "decode_ms": (time.perf_counter() - start) * 1e3,
    }
    if isinstance(code, CombinedCode):
        residual = int(np.count_nonzero(info.x_step_a != x))
        rec["step_a_error"] = residual
        rec["step_b_corrections"] = info.step_b_corrections
    return rec


def _threads(config: dict) -> int:
    raw = config.get("threads") or os.environ.get("QGT_THREADS") or os.cpu_count() or 1
    return max(1, int(raw))


def _run_id(config: dict, code_hash: str) -> str:
    keys = {k: config[k] for k in ("noise", "trials", "seed", "density") if k in config}
    blob = json.dumps({"config": keys, "code": code_hash}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_experiment(config: dict, code=None, code_sha256: str | None = None) -> ExperimentReport:
    """Run the trials described by ``config``; deterministic given its seed.

    ``code`` and ``code_sha256`` may be passed to reuse an already loaded file.
    """
    if code is None:
        if "code" not in config:
            raise ConfigError("config needs a 'code' entry")
        code, code_sha256 = load_code(config["code"])
    try:
        spec = NoiseSpec.parse(config.get("noise", "zero:0"))
        trials = int(config.get("trials", 100))
        master = int(config.get("seed", spec.seed))
        density = float(config.get("density", 0.5))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if trials < 1:
        raise ConfigError("trials must be positive")
    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_threads(config)) as pool:
        records = list(pool.map(lambda i: _run_trial(code, spec, master, i, density), range(trials)))
    wall_ms = (time.perf_counter() - start) * 1e3
    errors = np.array([r["hamming_error"] for r in records])
    bound = codec.error_bound(code)
    budget = codec.noise_budget(code)
    aggregate = {
        "max_error": int(errors.max()),
        "mean_error": float(errors.mean()),
        "bound_d0": bound,
        "violations": int((errors > bound).sum()),
    }
    if isinstance(code, CombinedCode):
        step_a = max(r["step_a_error"] for r in records)
        aggregate["max_step_a_error"] = step_a
        aggregate["step_a_sparse"] = bool(step_a <= code.params.k)
    report = ExperimentReport(
        run_id=_run_id(config, code_sha256 or ""),
        code=code.describe(),
        code_sha256=code_sha256 or "",
        params=asdict(code.params),
        noise=str(spec),
        noise_budget=budget,
        within_budget=bool(spec.bound <= budget + 1e-12),
        trials=trials,
        records=records,
        aggregate=aggregate,
        wall_ms=wall_ms,
    )
    if config.get("results_csv"):
        append_csv(config["results_csv"], report.csv_row())
    return report
