"""Aggregate statistics for the cloze-test protocol.

Accuracy uses the Wilson score interval at 95% (z = 1.96); translation-length
intervals use a seeded percentile bootstrap; emoji-usage entropy is in natural
log units. All of these are deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .emojitext import EmojiSequence, emoji_count

WILSON_Z = 1.96
BOOTSTRAP_RESAMPLES = 10_000


class StatsError(ValueError):
    pass


class EmptyRecords(StatsError):
    pass


class EmptyInput(StatsError):
    pass


class InsufficientData(StatsError):
    pass


class DegenerateMargins(StatsError):
    pass


@dataclass(frozen=True)
class AccuracyStat:
    successes: int
    trials: int
    accuracy: float
    ci_low: float
    ci_high: float

    def to_json(self) -> dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "accuracy": round(self.accuracy, 6),
            "ci_low": round(self.ci_low, 6),
            "ci_high": round(self.ci_high, 6),
        }


@dataclass(frozen=True)
class EmojiUsageStats:
    counts: tuple[tuple[str, int], ...]  # cluster -> frequency, most common first
    distinct: int
    entropy: float

    def to_json(self) -> dict:
        return {"distinct": self.distinct, "entropy": round(self.entropy, 6), "counts": dict(self.counts)}


@dataclass(frozen=True)
class LengthStat:
    mean: float
    ci_low: float
    ci_high: float

    def to_json(self) -> dict:
        return {
            "mean": round(self.mean, 6),
            "ci_low": round(self.ci_low, 6),
            "ci_high": round(self.ci_high, 6),
        }


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    # clamp float rounding so the interval always brackets p within [0, 1]
    return min(max(0.0, center - half), p), max(min(1.0, center + half), p)


def accuracy(outcomes: list[bool] | tuple[int, int]) -> AccuracyStat:
    """Proportion of correct guesses with a 95% Wilson score interval.

    Accepts either per-record matched booleans or a (successes, trials) pair.
    """
    if isinstance(outcomes, tuple):
        successes, trials = outcomes
    else:
        successes, trials = sum(bool(o) for o in outcomes), len(outcomes)
    if trials < 1:
        raise EmptyRecords("no trials")
    if not 0 <= successes <= trials:
        raise StatsError("successes out of range")
    lo, hi = wilson_interval(successes, trials)
    return AccuracyStat(successes=successes, trials=trials, accuracy=successes / trials, ci_low=lo, ci_high=hi)


def emoji_usage_stats(translations: list[EmojiSequence]) -> EmojiUsageStats:
    """Per-cluster frequencies across all translations and their entropy."""
    if not translations:
        raise EmptyInput("no translations")
    counts = Counter(cluster.text for seq in translations for cluster in seq.clusters)
    total = sum(counts.values())
    entropy = -sum((c / total) * math.log(c / total) for c in counts.values())
    return EmojiUsageStats(counts=tuple(counts.most_common()), distinct=len(counts), entropy=entropy)


def mean_length(
    translations: list[EmojiSequence],
    bootstrap_resamples: int = BOOTSTRAP_RESAMPLES,
    seed: int = 0,
) -> LengthStat:
    """Mean emoji count with a seeded percentile-bootstrap 95% CI."""
    if len(translations) < 2:
        raise InsufficientData("need at least 2 translations")
    lengths = np.array([emoji_count(seq) for seq in translations], dtype=float)
    rng = np.random.default_rng(seed)
    samples = rng.choice(lengths, size=(bootstrap_resamples, len(lengths)), replace=True)
    means = samples.mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return LengthStat(mean=float(lengths.mean()), ci_low=float(lo), ci_high=float(hi))


def correlation(pairs: list[tuple[bool, bool]]) -> float:
    """Pearson correlation of paired binary outcomes (the phi coefficient)."""
    if len(pairs) < 2:
        raise InsufficientData("need at least 2 pairs")
    a = np.array([float(x) for x, _ in pairs])
    b = np.array([float(y) for _, y in pairs])
    if a.std() == 0 or b.std() == 0:
        raise DegenerateMargins("a margin is constant")
    return float(np.corrcoef(a, b)[0, 1])
