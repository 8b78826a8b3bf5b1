"""Two-stage demonstration selection for in-context learning.

Stage one retrieves the TopK most cosine-similar training examples for a
test input; stage two reranks them by a hybrid of semantic similarity and
label-distribution alignment (1 minus the Jensen-Shannon divergence between
predicted label distributions) and picks the n-shot prompt demonstrations.
"""

from .corpus import (
    ARBITRARY_SYMBOLS,
    Corpus,
    Example,
    LabelClass,
    LabelMap,
    OodPair,
    load_corpus,
    load_label_map,
    make_ood_pair,
    perturb_labels,
    save_corpus,
    save_label_map,
    split_corpus,
)
from .divergence import (
    LabelDistribution,
    js_divergence,
    kl_divergence,
    label_match_score,
    midpoint,
)
from .embeddings import (
    CandidatePool,
    EmbeddingStore,
    EmbeddingVector,
    cosine_similarity,
    retrieve_topk,
)
from .errors import (
    AbsoluteContinuityError,
    ClassCountError,
    ConfigError,
    DemoselectError,
    FormatError,
    ProtocolError,
    RequestError,
    RunAbortedError,
    ValidationError,
)
from .harness import (
    METHODS,
    ProviderSet,
    RunConfig,
    RunReport,
    SweepPoint,
    TTestResult,
    ablate,
    paired_t_test,
    rank_candidates,
    run_pipeline,
    sweep,
)
from .prompts import (
    ABSTAIN,
    PromptTemplate,
    builtin_template,
    load_template,
    parse_prediction,
    render_prompt,
)
from .providers import (
    PROB_FLOOR,
    LabelDistributionStore,
    ProviderConfig,
    load_embeddings,
    load_label_distributions,
    one_hot_oracle,
    remote_classify,
    remote_embed,
    sanitize_probs,
    save_embeddings,
    save_label_distributions,
    uniform_distributions,
)
from .reranker import (
    Candidate,
    SelectionConfig,
    hybrid_score,
    rerank,
    select_demonstrations,
)
from .selector import DemonstrationSelector
from .synthetic import SyntheticBundle, SyntheticSpec, generate_synthetic, write_synthetic

__version__ = "0.1.0"

__all__ = [
    "ABSTAIN",
    "ARBITRARY_SYMBOLS",
    "AbsoluteContinuityError",
    "Candidate",
    "CandidatePool",
    "ClassCountError",
    "ConfigError",
    "Corpus",
    "DemoselectError",
    "DemonstrationSelector",
    "EmbeddingStore",
    "EmbeddingVector",
    "Example",
    "FormatError",
    "LabelClass",
    "LabelDistribution",
    "LabelDistributionStore",
    "LabelMap",
    "METHODS",
    "OodPair",
    "PROB_FLOOR",
    "PromptTemplate",
    "ProtocolError",
    "ProviderConfig",
    "ProviderSet",
    "RequestError",
    "RunAbortedError",
    "RunConfig",
    "RunReport",
    "SelectionConfig",
    "SweepPoint",
    "SyntheticBundle",
    "SyntheticSpec",
    "TTestResult",
    "ValidationError",
    "ablate",
    "builtin_template",
    "cosine_similarity",
    "generate_synthetic",
    "hybrid_score",
    "js_divergence",
    "kl_divergence",
    "label_match_score",
    "load_corpus",
    "load_embeddings",
    "load_label_distributions",
    "load_label_map",
    "load_template",
    "make_ood_pair",
    "midpoint",
    "one_hot_oracle",
    "paired_t_test",
    "parse_prediction",
    "perturb_labels",
    "rank_candidates",
    "remote_classify",
    "remote_embed",
    "render_prompt",
    "rerank",
    "retrieve_topk",
    "run_pipeline",
    "sanitize_probs",
    "save_corpus",
    "save_embeddings",
    "save_label_distributions",
    "save_label_map",
    "select_demonstrations",
    "split_corpus",
    "sweep",
    "uniform_distributions",
    "write_synthetic",
]
