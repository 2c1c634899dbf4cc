"""Partial-paraphrase discovery: pseudo-labeled span data, a trainable
span-pointer model, the best-clause-run baseline, and the comparison
harness."""

from .pseudo import (  # noqa: F401
    PseudoExample,
    SpanDataConfig,
    build_pseudo_dataset,
    build_pseudo_example,
    read_pseudo_dataset,
    write_pseudo_dataset,
)
from .model import (  # noqa: F401
    DiscoveryResult,
    RejectionReason,
    SpanModelConfig,
    TrainedSpanModel,
    predict_span,
    train_span_model,
)
from .baseline import best_clause_baseline, select_best_clause_run, split_clauses  # noqa: F401
from .discovery import discover_partial, evaluate_discovery  # noqa: F401
