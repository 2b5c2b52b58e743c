"""Run configuration, synthetic data and the end-to-end pipeline."""

from __future__ import annotations

import contextlib
import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formats, plotting
from .baire import build_prefix_index, layer_cluster_counts
from .errors import ConfigError, StageError, UndefinedCorrelationError
from .evaluate import (
    absolute_differences,
    condensed,
    cophenetic_distances,
    digit_histogram,
    pearson,
    ultrametric_violations,
    ward_cluster,
)
from .ingest import (
    GENERATOR_ID,
    DataMatrix,
    consensus_projection,
    extract_digits,
    generate_axes,
    load_matrix,
    make_rng,
    write_consensus,
)
from .quantize import decode_reals, encode_array
from .reduce import approximation_errors, reduce_chain

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    axes: int = 99
    levels: int = 8
    base: int = 2
    target: int = 2
    depth: int = 3
    restarts: int = 50
    max_iter: int = 500
    input: str = ""
    input_format: str = "dense-csv"
    output: str = "bundle"
    synthetic_objects: int = 10_000
    synthetic_dims: int = 20
    eval_cap: int = 2000
    violation_cap: int = 200

    def validate(self) -> "RunConfig":
        checks = [
            (self.seed >= 0, "seed must be >= 0"),
            (self.axes >= 1, "axes must be >= 1"),
            (1 <= self.levels <= 15, "levels must be in 1..15"),
            (2 <= self.base <= 10, "base must be in 2..10"),
            (2 <= self.target <= 9, "target must be in 2..9"),
            (1 <= self.depth <= self.levels, "depth must be in 1..levels"),
            (self.restarts >= 1, "restarts must be >= 1"),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.input_format in ("dense-csv", "sparse-triplet"),
             "input_format must be dense-csv or sparse-triplet"),
            (bool(self.output), "output must be set"),
            (self.synthetic_objects >= 2, "synthetic_objects must be >= 2"),
            (self.synthetic_dims >= 1, "synthetic_dims must be >= 1"),
            (2 <= self.eval_cap <= 20_000, "eval_cap must be in 2..20000"),
            (3 <= self.violation_cap <= 2000, "violation_cap must be in 3..2000"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in dataclasses.fields(self))

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise ConfigError(f"line {lineno}: expected key=value")
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if types[key] in ("int", int):
                try:
                    values[key] = int(value)
                except ValueError:
                    raise ConfigError(f"line {lineno}: {key} must be an integer") from None
            else:
                values[key] = value
        return cls(**values).validate()

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)


def synthetic_matrix(n_objects: int, dims: int, seed: int = 0, clusters: int = 6) -> DataMatrix:
    """Non-negative Gaussian mixture; cluster sizes are uneven on purpose."""
    rng = make_rng(seed)
    centres = rng.uniform(0.0, 10.0, size=(clusters, dims))
    weights = rng.dirichlet(np.ones(clusters))
    labels = rng.choice(clusters, size=n_objects, p=weights)
    spread = rng.uniform(0.5, 2.0, size=clusters)
    x = centres[labels] + rng.normal(size=(n_objects, dims)) * spread[labels, None]
    return DataMatrix(np.abs(x))


@contextlib.contextmanager
def stage(name):
    log.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _safe_pearson(a, b):
    try:
        return pearson(a, b)
    except UndefinedCorrelationError:
        return float("nan")


def evaluation_report(values, decoded, cap: int = 2000, violation_cap: int = 200, seed: int = 0):
    """Correlations between the consensus values, their decoded approximation
    and the Ward cophenetic distances of each; objects are subsampled to
    ``cap`` (seeded) before the O(I^2) steps.
    """
    values = np.asarray(values, dtype=np.float64)
    decoded = np.asarray(decoded, dtype=np.float64)
    n = values.size
    if n > cap:
        sample = np.sort(make_rng(seed).choice(n, size=cap, replace=False))
    else:
        sample = np.arange(n)
    v, q = values[sample], decoded[sample]
    dist_v, dist_q = absolute_differences(v), absolute_differences(q)
    coph_v = cophenetic_distances(ward_cluster(v))
    coph_q = cophenetic_distances(ward_cluster(q))
    m = min(violation_cap, sample.size)
    report = {
        "objects": n,
        "sampled_objects": int(sample.size),
        "sample_seed": seed,
        "corr_values": _safe_pearson(values, decoded),
        "corr_input_vs_cophenetic_original": _safe_pearson(condensed(dist_v), condensed(coph_v)),
        "corr_input_vs_cophenetic_decoded": _safe_pearson(condensed(dist_q), condensed(coph_q)),
        "corr_input_distances": _safe_pearson(condensed(dist_v), condensed(dist_q)),
        "corr_cophenetic": _safe_pearson(condensed(coph_v), condensed(coph_q)),
        "violation_objects": m,
        "violations_cophenetic_original": ultrametric_violations(coph_v[:m, :m], 1e-12),
        "violations_cophenetic_decoded": ultrametric_violations(coph_q[:m, :m], 1e-12),
        "violations_input_original": ultrametric_violations(dist_v[:m, :m], 1e-12),
    }
    return report


def write_report(path, report) -> None:
    lines = ["key,value"]
    for key, value in report.items():
        text = f"{value:.17g}" if isinstance(value, float) else str(value)
        lines.append(f"{key},{text}")
    Path(path).write_text("\n".join(lines) + "\n")


def summary_text(cfg, counts, q, trace, report) -> str:
    lines = [
        f"objects: {report['objects']}",
        f"levels: {cfg.levels}  axes: {cfg.axes}  seed: {cfg.seed}",
        "layer cluster counts: " + " ".join(str(int(c)) for c in counts),
        f"{cfg.base}-adic quantizer MSE per level: "
        + " ".join(f"{x:.4f}" for x in q.mse_per_level),
        "reduction error vs original: "
        + " ".join(f"{int(m)}:{e:.5f}" for m, e in zip(trace.bases, trace.err_vs_original)),
        f"correlation of consensus values with decoded {cfg.base}-adic reals: "
        f"{report['corr_values']:.6f}",
        f"correlation input vs cophenetic (original): "
        f"{report['corr_input_vs_cophenetic_original']:.6f}",
        f"correlation input vs cophenetic (decoded): "
        f"{report['corr_input_vs_cophenetic_decoded']:.6f}",
    ]
    return "\n".join(lines) + "\n"


def run_pipeline(cfg: RunConfig) -> dict:
    """Run every stage and write the bundle to ``cfg.output``; returns the file map."""
    cfg.validate()
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    files = {}

    def emit(name):
        path = out / name
        files[name] = path
        return path

    emit("config.txt").write_text(cfg.to_text())

    with stage("ingest"):
        if cfg.input:
            X = load_matrix(cfg.input, cfg.input_format)
        else:
            X = synthetic_matrix(cfg.synthetic_objects, cfg.synthetic_dims, seed=cfg.seed)
    with stage("project"):
        axes = generate_axes(X.dims, cfg.axes, cfg.seed)
        cv = consensus_projection(X, axes)
        write_consensus(emit("consensus.txt"), cv)
    with stage("digits"):
        A = extract_digits(cv, cfg.levels)
        formats.write_digit_array(emit("digits_base10.bair"), A, seed=cfg.seed,
                                  generator=GENERATOR_ID)
        counts = layer_cluster_counts(A)
        formats.write_layer_stats(emit("layer_stats.csv"), counts)
        hist = digit_histogram(A)
        formats.write_histogram(emit("histogram.csv"), hist)
    with stage("index"):
        idx = build_prefix_index(A, cfg.depth)
        formats.write_index(emit(f"index_depth{cfg.depth}.txt"), idx)
    with stage("encode"):
        q = encode_array(A, cfg.base, restarts=cfg.restarts, max_iter=cfg.max_iter,
                         seed=cfg.seed)
        formats.write_digit_array(emit(f"encoded_base{cfg.base}.bair"), q.encoded,
                                  seed=cfg.seed)
        formats.write_codebook(emit("codebook.txt"), q.codebook)
        emit("quantizer_mse.csv").write_text(
            "level,mse\n"
            + "".join(f"{j},{m:.17g}\n" for j, m in enumerate(q.mse_per_level, start=1))
        )
    with stage("reduce"):
        chain = reduce_chain(A, cfg.target)
        step_rows = ["base_before,base_after,merge_value,fallback_used,candidates"]
        for arr, step in chain:
            formats.write_digit_array(emit(f"reduced_base{arr.base}.bair"), arr,
                                      seed=cfg.seed)
            cands = " ".join(f"{lo}-{hi}:{n}" for (lo, hi), n in sorted(step.candidate_counts.items()))
            step_rows.append(f"{step.base_before},{step.base_after},{step.merge_value},"
                             f"{int(step.fallback_used)},{cands}")
        emit("reduction_steps.csv").write_text("\n".join(step_rows) + "\n")
        trace = approximation_errors(chain, A)
        plotting.emit_error_curves(trace, emit("errors.csv"), emit("errors.png"))
        formats.write_error_trace(emit("errors_per_array.csv"),
                                  approximation_errors(chain, A, normalization="per-array"))
    with stage("eval"):
        decoded = decode_reals(q)
        report = evaluation_report(cv.values, decoded, cap=cfg.eval_cap,
                                   violation_cap=cfg.violation_cap, seed=cfg.seed)
        write_report(emit("evaluation.csv"), report)
        emit("summary.txt").write_text(summary_text(cfg, counts, q, trace, report))
    with stage("report"):
        plotting.emit_heatstrip(A, emit("heatstrip_base10.png"))
        plotting.emit_heatstrip(q.encoded, emit(f"heatstrip_encoded_base{cfg.base}.png"))
        for arr, _ in chain:
            plotting.emit_heatstrip(arr, emit(f"heatstrip_reduced_base{arr.base}.png"))
        plotting.emit_histogram_plot(hist, emit("histogram.png"))
    return {
        "files": files,
        "consensus": cv,
        "digits": A,
        "quantized": q,
        "chain": chain,
        "trace": trace,
        "report": report,
        "layer_counts": counts,
    }
