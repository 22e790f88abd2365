"""Argumentative concession detection for but/though/however/while."""

from ._core import (
    BootstrapNonConvergence,
    Comment,
    DataError,
    MarkerInstance,
    NonConvergenceError,
    SvmModel,
    VersionMismatchError,
    bootstrap_patterns,
    chi2_independence,
    chi2_sf,
    extract_marker_instances,
    fleiss_kappa,
    ingest,
    jaccard,
    majority_vote,
    marker_census,
    match_pattern,
    prf,
    run_cli,
    segment_sentences,
    tokenize,
    train_svm,
)

__all__ = [
    "BootstrapNonConvergence",
    "Comment",
    "DataError",
    "MarkerInstance",
    "NonConvergenceError",
    "SvmModel",
    "VersionMismatchError",
    "bootstrap_patterns",
    "chi2_independence",
    "chi2_sf",
    "extract_marker_instances",
    "fleiss_kappa",
    "ingest",
    "jaccard",
    "majority_vote",
    "marker_census",
    "match_pattern",
    "prf",
    "run_cli",
    "segment_sentences",
    "tokenize",
    "train_svm",
]
