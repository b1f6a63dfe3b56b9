"""Dimension-importance reranking for dense retrieval."""

from ._core import (
    CandidatePool,
    DegenerateInputError,
    DimensionMask,
    EclipseError,
    EmbeddingMatrix,
    Experiment,
    ParseError,
    TestOutcome,
    compare_systems,
    dime_score_standard,
    eclipse_score,
    evaluate_run,
    holm_bonferroni,
    load_config,
    load_matrix,
    paired_t_test,
    parse_qrels,
    parse_run,
    rerank,
    retained_count,
    save_matrix,
    select_dimensions,
    shapiro_wilk,
    synth_generate,
    top_k,
    wilcoxon_signed_rank,
    write_run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
