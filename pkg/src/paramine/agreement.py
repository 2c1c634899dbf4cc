"""Chance-corrected agreement between one worker and the majority of the
others."""

from __future__ import annotations

from collections import Counter
from typing import Sequence


class AgreementError(Exception):
    pass


def cohens_kappa(labels_w: Sequence[int], labels_m: Sequence[int]) -> float:
    """Unweighted Cohen's kappa: (p_o - p_e) / (1 - p_e).

    p_o is the observed agreement rate; p_e the chance rate from the two
    marginal label distributions. Degenerate marginals (p_e == 1) return
    1.0 when agreement is also perfect and are an error otherwise.
    """
    if len(labels_w) != len(labels_m):
        raise AgreementError("label sequences differ in length")
    n = len(labels_w)
    if n == 0:
        raise AgreementError("empty label sequences")

    observed = sum(1 for a, b in zip(labels_w, labels_m) if a == b) / n
    marg_w = Counter(labels_w)
    marg_m = Counter(labels_m)
    expected = sum(
        (marg_w[label] / n) * (marg_m[label] / n)
        for label in set(marg_w) | set(marg_m)
    )
    if expected == 1.0:
        if observed == 1.0:
            return 1.0
        raise AgreementError("degenerate marginals")
    return (observed - expected) / (1.0 - expected)


def majority_vote(labels: Sequence[int]) -> int | None:
    """Modal label of the other workers; ties break toward the lower label
    (the stricter reading). Returns None when fewer than two labels exist,
    excluding that item from kappa."""
    if len(labels) < 2:
        return None
    counts = Counter(labels)
    top = max(counts.values())
    return min(label for label, count in counts.items() if count == top)
