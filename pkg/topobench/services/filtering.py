"""
Undermanned logistic regression filtering.

Items are split into n folds; n rounds train on m consecutive folds
(round-robin) and validate on the other n - m, so every item is validated
exactly n - m times. Items the feature-starved classifier got wrong at
least once are preferred when sampling the final balanced splits, and
both classes are drawn from matching ranges of its out-of-fold score.
"""

import logging
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from core.exceptions import FilterConfigError, InfeasibleSelectionError
from models.schemas import DatasetItem, ErrorBiasPolicy, FilterConfig, LogRegHyper
from services.features import FeatureVocabulary, extract_features, graphs_of, labels_of, vectorize
from services.logreg import train_logreg


logger = logging.getLogger(__name__)


class FilterResult(BaseModel):
    """
    Outcome of filter_dataset.

    Args:
        train: Balanced train split
        test: Balanced test split, disjoint from train
        warnings: Degenerate conditions met while sampling
        hard_counts: Items with at least one error per class label, before sampling
    """
    train: List[DatasetItem] = Field(default_factory=list)
    test: List[DatasetItem] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    hard_counts: Dict[str, int] = Field(default_factory=dict)


def assign_folds(rng: np.random.Generator, count: int, folds: int) -> np.ndarray:
    """
    Fold id per item from a seeded shuffle; fold sizes differ by at most one.

    Raises:
        FilterConfigError: If some fold would be empty
    """
    if count < folds:
        raise FilterConfigError(
            f"{count} items cannot fill {folds} folds",
            field_errors={"folds": f"needs at least {folds} items, got {count}"},
        )
    fold_of = np.empty(count, dtype=np.int64)
    for fold, members in enumerate(np.array_split(rng.permutation(count), folds)):
        fold_of[members] = fold
    return fold_of


class CVResult(NamedTuple):
    """Per-item error counts and mean out-of-fold probability of label 1."""
    errors: np.ndarray
    scores: np.ndarray


def overlapping_cv(
    items: Sequence[DatasetItem],
    cfg: FilterConfig,
    hyper: Optional[LogRegHyper] = None,
    seed: int = 0,
    vocab: Optional[FeatureVocabulary] = None,
) -> CVResult:
    """
    Run the undermanned classifier through the overlapping folds.

    Args:
        items: Candidate items
        cfg: Fold configuration (n folds, m training folds)
        hyper: Logistic regression hyperparameters
        seed: Seed of the fold assignment
        vocab: Frozen vocabulary; built from ``items`` when omitted

    Returns:
        Error counts in [0, n - m] and scores averaged over the n - m validations
    """
    hyper = hyper or LogRegHyper()
    vocab = vocab or FeatureVocabulary.build(graphs_of(items), cfg.degree_cap)
    x = vectorize([extract_features(item.graph, vocab) for item in items], vocab)
    y = labels_of(items)
    fold_of = assign_folds(np.random.default_rng(seed), len(items), cfg.folds)

    errors = np.zeros(len(items), dtype=np.int64)
    scores = np.zeros(len(items), dtype=np.float64)
    logger.info(
        f"Overlapping CV on {len(items)} items: {cfg.folds} folds, {cfg.train_folds} train folds, "
        f"{len(vocab)} features"
    )
    for r in range(cfg.folds):
        train_folds = [(r + j) % cfg.folds for j in range(cfg.train_folds)]
        train_mask = np.isin(fold_of, train_folds)
        model = train_logreg(x[train_mask], y[train_mask], hyper)
        validate = ~train_mask
        wrong = model.predict(x[validate]) != y[validate].astype(np.int64)
        errors[validate] += wrong
        scores[validate] += model.predict_proba(x[validate])
        logger.debug(f"CV round {r}: {int(wrong.sum())} errors on {int(validate.sum())} items")
    return CVResult(errors=errors, scores=scores / cfg.validations_per_item)


def overlapping_cv_error_counts(
    items: Sequence[DatasetItem],
    cfg: FilterConfig,
    hyper: Optional[LogRegHyper] = None,
    seed: int = 0,
    vocab: Optional[FeatureVocabulary] = None,
) -> np.ndarray:
    """Per-item misclassification counts of the undermanned classifier."""
    return overlapping_cv(items, cfg, hyper, seed, vocab).errors


def cv_accuracy(error_counts: np.ndarray, cfg: FilterConfig) -> float:
    """Mean validation accuracy over all n - m validations of every item."""
    if error_counts.size == 0:
        return 0.0
    return float(1.0 - error_counts.sum() / (error_counts.size * cfg.validations_per_item))


def _hard_first(rng: np.random.Generator, members: np.ndarray, hard: np.ndarray) -> np.ndarray:
    """``members`` reordered with hard items first, each group shuffled."""
    return np.concatenate([rng.permutation(members[hard[members]]), rng.permutation(members[~hard[members]])])


def _allocate(capacity: np.ndarray, need: int) -> np.ndarray:
    """Split ``need`` pairs over bins proportionally to capacity (largest remainder)."""
    share = need * capacity / capacity.sum()
    take = np.floor(share).astype(np.int64)
    for b in np.argsort(take - share, kind="stable")[: need - int(take.sum())]:
        take[b] += 1
    return take


def _score_matched_pairs(
    rng: np.random.Generator,
    labels: np.ndarray,
    hard: np.ndarray,
    scores: np.ndarray,
    bins: int,
    need: int,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Draw label-0 and label-1 items pairwise from shared score bins.

    Bins are equal-count chunks of the pool sorted by score. Each bin gives
    up to min(class sizes) pairs, hard-first within the bin; the pair budget
    is spread over bins in proportion to that capacity.

    Returns:
        Aligned index arrays for class 0 and class 1, and the pair capacity
    """
    order = np.argsort(scores, kind="stable")
    ranked = []
    for chunk in np.array_split(order, min(bins, len(order))):
        ranked.append(tuple(_hard_first(rng, np.sort(chunk[labels[chunk] == c]), hard) for c in (0, 1)))
    capacity = np.array([min(len(zero), len(one)) for zero, one in ranked], dtype=np.int64)
    total = int(capacity.sum())
    take = _allocate(capacity, need) if total >= need else capacity

    zeros = np.concatenate([zero[:t] for (zero, _), t in zip(ranked, take)])
    ones = np.concatenate([one[:t] for (_, one), t in zip(ranked, take)])
    return zeros, ones, total


def filter_dataset(
    rng: np.random.Generator,
    items: Sequence[DatasetItem],
    error_counts: np.ndarray,
    cfg: FilterConfig,
    scores: Optional[np.ndarray] = None,
) -> FilterResult:
    """
    Sample balanced, disjoint train/test splits biased towards hard items.

    Score-matched selection draws both classes pairwise from the same
    quantile bins of the pool classifier's out-of-fold score, hard-first
    within a bin, so the selected classes share one score distribution.
    Without scores every item shares one bin. When the bins hold fewer
    pairs than required, the remainder is filled hard-first per class.

    With the hard-first policy, items with at least one error are taken
    first within each class and the remainder is filled uniformly from
    zero-error items. One shuffle of pair positions divides the selection
    between train and test; both splits keep pool order.

    Args:
        rng: Selection generator
        items: Candidate pool
        error_counts: Per-item error counts from overlapping_cv
        cfg: Split sizes and bias policy
        scores: Per-item out-of-fold scores from overlapping_cv

    Raises:
        InfeasibleSelectionError: If a class has fewer items than required
    """
    if len(items) != len(error_counts) or (scores is not None and len(scores) != len(items)):
        raise FilterConfigError("error_counts and scores must align with items")

    train_per_class, test_per_class = cfg.train_size // 2, cfg.test_size // 2
    need = train_per_class + test_per_class
    labels = np.array([item.label for item in items])
    hard = np.asarray(error_counts) >= 1

    shortfall = {c: need - int((labels == c).sum()) for c in (0, 1) if (labels == c).sum() < need}
    if shortfall:
        logger.error(f"Infeasible class balance, shortfall per class: {shortfall}")
        raise InfeasibleSelectionError(
            f"not enough items for {need} per class", shortfall=shortfall
        )

    result = FilterResult(hard_counts={str(c): int((hard & (labels == c)).sum()) for c in (0, 1)})
    if not hard.any():
        message = "no items with classification errors; sampled uniformly"
        logger.warning(message)
        result.warnings.append(message)

    if cfg.bias_policy == ErrorBiasPolicy.SCORE_MATCHED:
        if scores is None:
            pool_scores, bins = np.zeros(len(items)), 1
        else:
            pool_scores, bins = np.asarray(scores, dtype=np.float64), cfg.score_bins
        zeros, ones, capacity = _score_matched_pairs(rng, labels, hard, pool_scores, bins, need)
        if capacity < need:
            message = f"score bins hold {capacity} matched pairs of {need}; filled the rest hard-first"
            logger.warning(message)
            result.warnings.append(message)
            rest = [
                _hard_first(rng, np.setdiff1d(np.flatnonzero(labels == c), taken), hard)[: need - len(taken)]
                for c, taken in ((0, zeros), (1, ones))
            ]
            zeros, ones = np.concatenate([zeros, rest[0]]), np.concatenate([ones, rest[1]])
        chosen = [zeros, ones]
    elif cfg.bias_policy == ErrorBiasPolicy.HARD_FIRST:
        chosen = [_hard_first(rng, np.flatnonzero(labels == c), hard)[:need] for c in (0, 1)]
    else:
        chosen = [rng.permutation(np.flatnonzero(labels == c))[:need] for c in (0, 1)]

    # matched pairs stay on the same side of the split
    positions = rng.permutation(need)
    train_idx = [int(i) for c in (0, 1) for i in chosen[c][positions[:train_per_class]]]
    test_idx = [int(i) for c in (0, 1) for i in chosen[c][positions[train_per_class:]]]

    result.train = [items[i] for i in sorted(train_idx)]
    result.test = [items[i] for i in sorted(test_idx)]
    logger.info(
        f"Filtered {len(items)} items into {len(result.train)} train / {len(result.test)} test "
        f"with {cfg.bias_policy.value} selection (hard items per class: {result.hard_counts})"
    )
    return result
