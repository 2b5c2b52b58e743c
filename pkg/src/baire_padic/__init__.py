"""Sparse p-adic coding of numeric data via Baire (longest common prefix) hierarchies."""

from .errors import (
    ConfigError,
    CorruptFileError,
    InvalidArgumentError,
    InvalidStateError,
    ParseError,
    StageError,
    UndefinedCorrelationError,
)
from .ingest import (
    ConsensusVector,
    DataMatrix,
    ProjectionEnsemble,
    consensus_projection,
    extract_digits,
    generate_axes,
    load_matrix,
)
from .baire import (
    DigitArray,
    PrefixIndex,
    baire_distance,
    baire_distance_matrix,
    build_prefix_index,
    layer_cluster_counts,
    query_prefix,
)
from .quantize import (
    Codebook,
    KMeansResult,
    QuantizationResult,
    decode_reals,
    encode_array,
    exact_quantize_1d,
    kmeans_1d,
)
from .reduce import (
    ErrorTrace,
    ReductionStep,
    approximation_errors,
    candidate_pairs,
    merge_values,
    reduce_base_once,
    reduce_chain,
)
from .evaluate import (
    Dendrogram,
    cophenetic_distances,
    digit_histogram,
    pearson,
    ultrametric_violations,
    ward_cluster,
)

__version__ = "0.1.0"
