"""Python bindings for the collective-knowledge engine."""

from ._core import (
    Api,
    CkError,
    classify,
    cohens_kappa,
    cosine,
    coverage_study,
    dbscan_texts,
    distribution_report,
    embed,
    extract_keyword,
    process,
    scroll_spec,
    validate_bundle,
    wilcoxon,
)

__all__ = [
    "Api",
    "CkError",
    "classify",
    "cohens_kappa",
    "cosine",
    "coverage_study",
    "dbscan_texts",
    "distribution_report",
    "embed",
    "extract_keyword",
    "process",
    "scroll_spec",
    "validate_bundle",
    "wilcoxon",
]
