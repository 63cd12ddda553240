"""Evaluate MT metric robustness on non-standardized dialects.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from dialeval._core import (  # noqa: F401
    Alphabet,
    BleuConfig,
    ChallengeTriple,
    ChrfConfig,
    CorrelationResult,
    EquivalentPair,
    EvalDataset,
    IoError,
    JudgmentSet,
    MetricScore,
    NoiseConfig,
    PairwiseComparison,
    PairwisePlotPoint,
    PairwiseResult,
    ScoreTable,
    Segment,
    SuccessReport,
    TieOptimizedResult,
    TripleOutcome,
    ValidationError,
    WorksheetRow,
    __version__,
    average_judgments,
    bleu_corpus,
    bleu_sentence,
    build_alphabet,
    char_ngrams,
    chrf_corpus,
    chrf_sentence,
    extract_perfect_pairs,
    kendall_segment,
    load_dataset,
    load_judgments,
    load_scores,
    load_triples,
    make_worksheet,
    nfc_normalize,
    noise_dataset,
    noise_sentence,
    pairwise_accuracy,
    pairwise_plot_data,
    parse_bleu_signature,
    parse_chrf_signature,
    pearson,
    perm_significance,
    plot_data_to_tsv,
    score_dataset,
    success_rate,
    success_rate_from_scores,
    system_average,
    tie_optimized_accuracy,
    tokenize_13a,
    whitespace_tokenize,
    wilcoxon_two_sided,
    word_ngrams,
    write_dataset,
    write_scores,
    write_worksheet,
)
