"""``qgt`` command-line entry point.

Exit codes: 0 success, 1 domain error, 2 I/O or file-format error,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import codec, limits, oracle
from .adversary import NoiseSpec, gen_noise
from .basic import build_basic
from .codefile import load_code, save_code
from .combined import CombinedCode, build_combined, decode_combined_detailed
from .expander import format_graph, parse_graph, random_expander, search_expander
from .harness import expand_noise, load_config, parse_config, run_experiment
from .linalg import FormatError, parse_matrix
from .noiseless import SCHEMES
from .params import CodeParams
from .scqgt import build_scqgt

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(text: str, path=None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_vector(path, dtype=float) -> np.ndarray:
    values = Path(path).read_text().split()
    try:
        return np.array([dtype(v) for v in values])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _format_vector(v) -> str:
    return "".join(f"{x:g}\n" if isinstance(x, float) else f"{x}\n" for x in np.asarray(v).tolist())


# -- parameters and graphs ----------------------------------------------------


def _params(args) -> CodeParams:
    if args.d0 is not None:
        k = getattr(args, "k", None)
        return CodeParams.direct(args.n, args.d0, 0.0 if args.e is None else args.e, k)
    if args.kappa is None or args.delta is None:
        raise UsageError("give either --d0 [--e --k] or --kappa --delta [--lambda]")
    lam = args.lam if args.lam is not None else 1.0
    return CodeParams.from_exponents(args.n, args.kappa, args.delta, lam)


def _add_graph(p):
    p.add_argument("--graph", help="QGTEXP file with a verified expander")
    p.add_argument("--m-log2", type=int, help="right side 2^m when generating a graph")
    p.add_argument("--degree", type=int)
    p.add_argument("--expansion", type=float)
    p.add_argument("--k-bound", type=int, help="expansion set-size bound (default 2k)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--search", action="store_true", help="use local search instead of sampling")


def _graph(args, n: int, k: int):
    if args.graph:
        return parse_graph(Path(args.graph).read_text())
    if None in (args.m_log2, args.degree, args.expansion):
        raise UsageError("give --graph or --m-log2 --degree --expansion")
    k_bound = args.k_bound or min(2 * k, n)
    make = search_expander if args.search else random_expander
    return make(n, 1 << args.m_log2, args.degree, k_bound, args.expansion, seed=args.seed)


# -- subcommands ----------------------------------------------------------------


def cmd_build(args) -> int:
    if args.kind == "expander":
        g = _graph(args, args.n, args.k_bound or args.n)
        _emit(format_graph(g), args.output)
        return EXIT_OK
    params = _params(args)
    inner = dict(inner=args.inner, inner_width=args.inner_width, hadamard_log2=args.hadamard_log2)
    if args.kind == "basic":
        code = build_basic(params, **inner)
    else:
        graph = _graph(args, params.n, params.k)
        if args.kind == "scqgt":
            code = build_scqgt(params, graph=graph)
        else:
            code = build_combined(params, graph=graph, **inner)
    digest = save_code(code, args.output)
    print(_json({**code.describe(), "file": args.output, "sha256": digest}), end="")
    return EXIT_OK


def _matrix_from(path):
    text = Path(path).read_text()
    if text.startswith("QGTMAT"):
        return parse_matrix(text), None
    code, _ = load_code(path)
    return code, code


def cmd_verify(args) -> int:
    q, code = _matrix_from(args.code)
    report = oracle.min_margin(q, args.d0, args.cap)
    out = report.to_dict()
    out["detecting"] = bool(report.min_linf >= 2 * args.e - 1e-12)
    out["d0"], out["e"] = args.d0, args.e
    print(_json(out), end="")
    return EXIT_OK


def _check_kind(args, code):
    if args.kind and args.kind != codec.kind(code):
        raise ValueError(f"{args.code} holds a {codec.kind(code)} code, not {args.kind}")


def cmd_encode(args) -> int:
    code, _ = load_code(args.code)
    _check_kind(args, code)
    x = _read_vector(args.x, int)
    if x.shape != (code.n,):
        raise ValueError(f"expected {code.n} entries, got {len(x)}")
    y = codec.encode(code, x).astype(np.float64)
    if args.noise:
        y = y + gen_noise(NoiseSpec.parse(args.noise), code, x)
    _emit(_format_vector(y), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    code, _ = load_code(args.code)
    _check_kind(args, code)
    y = _read_vector(args.y, float)
    if y.shape != (code.height,):
        raise ValueError(f"expected {code.height} measurements, got {len(y)}")
    truth = _read_vector(args.truth, int) if args.truth else None
    if isinstance(code, CombinedCode):
        info = decode_combined_detailed(code, y)
        x = info.x
        report = {
            "hamming_error": None if truth is None else int(np.count_nonzero(x != truth)),
            "step_a_error": None if truth is None else int(np.count_nonzero(info.x_step_a != truth)),
            "step_b_corrections": info.step_b_corrections,
            "measurements_used": code.height,
        }
        _emit(_format_vector(x), args.output)
        if args.output:
            print(_json(report), end="")
        else:
            sys.stderr.write(_json(report))
        return EXIT_OK
    x = codec.decode(code, y)
    _emit(_format_vector(x), args.output)
    if truth is not None:
        sys.stderr.write(_json({"hamming_error": int(np.count_nonzero(x != truth))}))
    return EXIT_OK


def cmd_bounds(args) -> int:
    print(_json(limits.bound_sheet(args.n, args.kappa, args.delta, args.lam).to_dict()), end="")
    return EXIT_OK


def cmd_sweep(args) -> int:
    lams = args.lam or [None]
    rows = limits.sweep_rows(args.n, args.kappa, args.delta, lams)
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=limits.SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.output:
            fh.close()
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.config:
        config = load_config(args.config, args.set)
    else:
        config = parse_config("", args.set)
    if args.results_csv:
        config["results_csv"] = args.results_csv
    reports = []
    code = digest = None
    for cfg in expand_noise(config):
        if code is None:
            if "code" not in cfg:
                raise ValueError("config needs a 'code' entry")
            code, digest = load_code(cfg["code"])
        reports.append(run_experiment(cfg, code, digest).to_dict())
    _emit(_json(reports[0] if len(reports) == 1 else reports), args.output)
    return EXIT_OK


def cmd_probe(args) -> int:
    frac = limits.random_achievability_probe(args.n, args.d0, args.e, args.height, args.trials, args.seed)
    print(_json({"n": args.n, "d0": args.d0, "e": args.e, "height": args.height,
                 "trials": args.trials, "seed": args.seed, "fraction": frac}), end="")  # fmt: skip
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qgt", description="Quantitative group testing codes under bounded noise.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("build", help="build a code (or an expander) and save it")
    p.add_argument("kind", choices=("basic", "scqgt", "combined", "expander"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--d0", type=int)
    p.add_argument("--e", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--inner", choices=SCHEMES, default="recursive-split")
    p.add_argument("--inner-width", type=int)
    p.add_argument("--hadamard-log2", type=int)
    _add_graph(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="exact detecting-property check")
    p.add_argument("--code", required=True, help="QGTCODE or QGTMAT file")
    p.add_argument("--d0", type=int, required=True)
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--cap", type=int, help="largest difference weight to enumerate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("encode", help="measure a 0/1 vector")
    p.add_argument("kind", nargs="?", choices=("basic", "scqgt", "combined"))
    p.add_argument("--code", required=True)
    p.add_argument("--x", required=True, help="one entry per line")
    p.add_argument("--noise", help="strategy:e[:seed]")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a measurement vector")
    p.add_argument("kind", nargs="?", choices=("basic", "scqgt", "combined"))
    p.add_argument("--code", required=True)
    p.add_argument("--y", required=True, help="one measurement per line")
    p.add_argument("--truth", help="true vector, to report the Hamming error")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bounds", help="print the bound sheet as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="bound sheets over a parameter grid, as CSV")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--kappa", type=float, nargs="+", required=True)
    p.add_argument("--delta", type=float, nargs="+", required=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("experiment", help="seeded decoding trials")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--set", nargs="*", default=[], metavar="KEY=VALUE", help="config overrides")
    p.add_argument("--results-csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("probe", help="random-matrix achievability probe")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d0", type=int, required=True)
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        sys.stderr.write(f"qgt: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        sys.stderr.write(f"qgt: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
