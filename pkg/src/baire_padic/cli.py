"""Command-line driver.

Exit codes: 0 success, 2 input/argument parse failure, 3 bad configuration,
4 a processing stage failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import formats, plotting
from .baire import build_prefix_index, layer_cluster_counts, query_prefix
from .errors import (
    ConfigError,
    CorruptFileError,
    InvalidArgumentError,
    InvalidStateError,
    ParseError,
    StageError,
    UndefinedCorrelationError,
)
from .evaluate import digit_histogram
from .ingest import (
    DEFAULT_AXES,
    DEFAULT_LEVELS,
    consensus_projection,
    extract_digits,
    generate_axes,
    load_matrix,
    read_consensus,
    write_consensus,
)
from .pipeline import RunConfig, evaluation_report, run_pipeline, synthetic_matrix, write_report
from .quantize import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, decode_reals, encode_array
from .reduce import approximation_errors, reduce_chain

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONFIG = 3
EXIT_STAGE = 4

log = logging.getLogger("baire_padic")


def _load(args):
    return load_matrix(args.input, args.format, dims=args.dims)


def cmd_synth(args):
    X = synthetic_matrix(args.objects, args.dims, seed=args.seed)
    np.savetxt(args.output, X.values, delimiter=",", fmt="%.17g")
    print(f"wrote {args.objects}x{args.dims} matrix to {args.output}")


def cmd_ingest(args):
    X = _load(args)
    nnz = X.values.nnz if X.is_sparse else int(np.count_nonzero(X.values))
    print(f"objects={X.rows} dims={X.dims} nonzeros={nnz} sparse={X.is_sparse}")


def cmd_project(args):
    X = _load(args)
    cv = consensus_projection(X, generate_axes(X.dims, args.axes, args.seed))
    write_consensus(args.output, cv)
    print(f"wrote consensus of {X.rows} objects to {args.output}")


def cmd_digits(args):
    cv = read_consensus(args.consensus)
    A = extract_digits(cv, args.levels)
    formats.write_digit_array(args.output, A, seed=cv.seed)
    print(f"wrote {A.n_objects}x{A.n_levels} base-10 digits to {args.output}")


def cmd_encode(args):
    A = formats.read_digit_array(args.digits)
    q = encode_array(A, args.base, restarts=args.restarts, max_iter=args.max_iter,
                     seed=args.seed)
    formats.write_digit_array(args.output, q.encoded, seed=args.seed)
    if args.codebook:
        formats.write_codebook(args.codebook, q.codebook)
    print("level,mse")
    for j, m in enumerate(q.mse_per_level, start=1):
        print(f"{j},{m:.17g}")


def cmd_reduce(args):
    A = formats.read_digit_array(args.digits)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    chain = reduce_chain(A, args.to)
    for arr, step in chain:
        formats.write_digit_array(out / f"reduced_base{arr.base}.bair", arr)
        print(f"base {step.base_before} -> {step.base_after}: merge w={step.merge_value}"
              + (" (fallback)" if step.fallback_used else ""))
    trace = approximation_errors(chain, A, normalization=args.normalization)
    plotting.emit_error_curves(trace, out / "errors.csv", out / "errors.png")


def cmd_index(args):
    order = read_consensus(args.consensus).sort_order if args.consensus else None
    A = formats.read_digit_array(args.digits, order=order)
    idx = build_prefix_index(A, args.depth)
    formats.write_index(args.output, idx)
    print(f"wrote {len(idx)} buckets at depth {idx.depth} to {args.output}")


def cmd_query(args):
    idx = formats.read_index(args.index)
    ids = sorted(query_prefix(idx, args.prefix))
    print(" ".join(str(i) for i in ids))


def cmd_stats(args):
    A = formats.read_digit_array(args.digits)
    counts = layer_cluster_counts(A)
    if args.output:
        formats.write_layer_stats(args.output, counts)
    print("level,count")
    for j, c in enumerate(counts, start=1):
        print(f"{j},{c}")


def cmd_eval(args):
    cv = read_consensus(args.consensus)
    A = extract_digits(cv, args.levels)
    q = encode_array(A, args.base, restarts=args.restarts, max_iter=args.max_iter,
                     seed=args.seed)
    report = evaluation_report(cv.values, decode_reals(q), cap=args.cap, seed=args.seed)
    if args.output:
        write_report(args.output, report)
    for key, value in report.items():
        print(f"{key},{value:.17g}" if isinstance(value, float) else f"{key},{value}")


def cmd_report(args):
    A = formats.read_digit_array(args.digits)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    plotting.emit_heatstrip(A, out / f"heatstrip_base{A.base}.png")
    hist = digit_histogram(A)
    formats.write_histogram(out / "histogram.csv", hist)
    plotting.emit_histogram_plot(hist, out / "histogram.png")
    formats.write_layer_stats(out / "layer_stats.csv", layer_cluster_counts(A))
    print(f"wrote report for {A.n_objects}x{A.n_levels} base-{A.base} array to {out}")


def cmd_pipeline(args):
    cfg = RunConfig.from_file(args.config)
    if args.output:
        cfg = RunConfig(**{**cfg.__dict__, "output": args.output}).validate()
    result = run_pipeline(cfg)
    print(f"wrote {len(result['files'])} files to {cfg.output}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="baire-padic", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def matrix_args(sp):
        sp.add_argument("input")
        sp.add_argument("--format", default="dense-csv", choices=["dense-csv", "sparse-triplet"])
        sp.add_argument("--dims", type=int, default=None, help="column count for triplet input")

    def kmeans_args(sp):
        sp.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
        sp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("synth", help="write a seeded synthetic dense CSV matrix")
    sp.add_argument("--objects", type=int, default=10_000)
    sp.add_argument("--dims", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("ingest", help="validate a data file and print its shape")
    matrix_args(sp)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("project", help="consensus random projection into [0,1)")
    matrix_args(sp)
    sp.add_argument("--axes", type=int, default=DEFAULT_AXES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("digits", help="decimal Baire array from a consensus file")
    sp.add_argument("consensus")
    sp.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_digits)

    sp = sub.add_parser("encode", help="per-level K-means quantization to base K")
    sp.add_argument("digits")
    sp.add_argument("--base", type=int, required=True)
    kmeans_args(sp)
    sp.add_argument("--codebook")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("reduce", help="stepwise base reduction with error curves")
    sp.add_argument("digits")
    sp.add_argument("--to", type=int, required=True)
    sp.add_argument("--normalization", default="fixed", choices=["fixed", "per-array"])
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("index", help="build a depth-c prefix index")
    sp.add_argument("digits")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--consensus", help="map rows back to object ids")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("query", help="objects sharing a digit prefix")
    sp.add_argument("index")
    sp.add_argument("--prefix", required=True)
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("stats", help="distinct prefixes per level")
    sp.add_argument("digits")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("eval", help="Ward/cophenetic correlation report")
    sp.add_argument("consensus")
    sp.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    sp.add_argument("--base", type=int, default=2)
    sp.add_argument("--cap", type=int, default=2000)
    kmeans_args(sp)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("report", help="heat strip, histogram and layer stats")
    sp.add_argument("digits")
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("pipeline", help="run every stage from a key=value config")
    sp.add_argument("--config", required=True)
    sp.add_argument("-o", "--output", help="override the config's output directory")
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ParseError, CorruptFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, (ParseError, CorruptFileError)):
            return EXIT_PARSE
        return EXIT_STAGE
    except (InvalidArgumentError, InvalidStateError,
            UndefinedCorrelationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
