"""Click-log mining, relevance pseudo-labeling, and ranking evaluation.

Thin python surface over the C++ core: label formulas, ranking metrics,
significance testing, scoring kernels, and the file-level pipeline stages
(simulate / curate / aggregate / label / eval).
"""

from clicklab._core import (  # noqa: F401
    Activation,
    AggregatedPair,
    DataError,
    InteractionHead,
    LabelConfig,
    UsageError,
    aggregate,
    bm25_score,
    click_dwell_rank_label,
    click_label,
    clip01,
    contrastive_loss,
    correlate,
    cosine_sim,
    curate,
    dwell_label,
    eval_files,
    label,
    loss_weight,
    make_label_config,
    mc_permutation_test,
    ndcg_at_10,
    precision_at_10,
    rank_label,
    simulate,
    spearman,
    stats,
    weighted_clicks,
)

__version__ = "0.1.0"
