"""Interpolated modified Kneser-Ney estimation.

The top order uses raw counts; lower orders use continuation counts (the
number of distinct words seen to the left), except for n-grams starting
with ``<s>``, which cannot be extended to the left and keep their raw
counts.  Each order has three discounts, for counts of 1, 2 and 3 or
more, derived from the count-of-counts of that order's (modified) counts.

For a context h with modified counts c(h w)::

    P(w | h) = max(c(h w) - D(c(h w)), 0) / c(h .) + gamma(h) * P(w | h')
    gamma(h) = (D1 N1(h .) + D2 N2(h .) + D3+ N3+(h .)) / c(h .)

where h' drops the oldest word of h.  The recursion ends in a uniform
distribution over every predictable token: the vocabulary without
``<s>``, plus ``</s>`` and ``<unk>``.  In ARPA terms the stored
probability of h w is the interpolated value and the back-off weight of
h is gamma(h).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from .arpa import NON_EVENT, ArpaModel
from .counts import BOS, EOS, UNK, CountTable, Ngram, VocabPolicy, limit_vocab


class InsufficientStatistics(ValueError):
    pass


@dataclass(frozen=True)
class Discounts:
    D1: float
    D2: float
    D3plus: float
    n: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __call__(self, count: float) -> float:
        if count <= 0:
            return 0.0
        if count == 1:
            return self.D1
        if count == 2:
            return self.D2
        return self.D3plus


@dataclass
class ModelConfig:
    order: int = 5
    vocab_policy: VocabPolicy = field(default_factory=VocabPolicy)
    # minimum unigram probability for <unk>; None leaves it as estimated
    unk_floor: float | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.unk_floor is not None and not 0 < self.unk_floor < 1:
            raise ValueError("unk_floor must lie in (0, 1)")


def count_of_counts(counts) -> tuple[int, int, int, int]:
    n = [0, 0, 0, 0]
    for c in counts:
        if 1 <= c <= 4:
            n[c - 1] += 1
    return n[0], n[1], n[2], n[3]


def compute_discounts(n1: int, n2: int, n3: int, n4: int) -> Discounts:
    """Closed-form modified Kneser-Ney discounts from count-of-counts.

    Raises InsufficientStatistics when ``n1`` or ``n2`` is zero.  When
    ``n3`` or ``n4`` is zero D3+ falls back to D2.  All values are clamped
    to ``[0, tier]``.
    """
    if n1 == 0 or n2 == 0:
        raise InsufficientStatistics(f"count-of-counts n1={n1}, n2={n2}")
    y = n1 / (n1 + 2 * n2)
    d1 = 1 - 2 * y * n2 / n1
    d2 = 2 - 3 * y * n3 / n2
    d3 = 3 - 4 * y * n4 / n3 if n3 > 0 and n4 > 0 else d2
    return Discounts(
        min(max(d1, 0.0), 1.0),
        min(max(d2, 0.0), 2.0),
        min(max(d3, 0.0), 3.0),
        (n1, n2, n3, n4),
    )


def discounts_with_fallback(n1: int, n2: int, n3: int, n4: int) -> Discounts:
    """Like compute_discounts, but n2 = 0 degrades D2 and D3+ to D1."""
    if n1 == 0:
        raise InsufficientStatistics(f"no singleton n-grams (n1=0, n2={n2})")
    if n2 > 0:
        return compute_discounts(n1, n2, n3, n4)
    # y = 1 and D1 = 1 when there are no doubletons
    d3 = 3 - 4 * n4 / n3 if n3 > 0 and n4 > 0 else 1.0
    return Discounts(1.0, 1.0, min(max(d3, 0.0), 3.0), (n1, n2, n3, n4))


def modified_counts(table: CountTable) -> dict[int, dict[Ngram, int]]:
    """Raw counts at the top order and continuation counts below it."""
    order = table.order
    out = {order: dict(table.tables[order])}
    for k in range(order - 1, 0, -1):
        left_ext: dict[Ngram, int] = defaultdict(int)
        for g in table.tables[k + 1]:
            left_ext[g[1:]] += 1
        out[k] = {
            g: (c if g[0] == BOS else left_ext[g])
            for g, c in table.tables[k].items()
        }
    return out


def order_discounts(mcounts: dict[int, dict[Ngram, int]]) -> dict[int, Discounts]:
    result = {}
    for k, counts in mcounts.items():
        values = [c for g, c in counts.items() if g != (BOS,)]
        if not values:
            continue
        try:
            result[k] = discounts_with_fallback(*count_of_counts(values))
        except InsufficientStatistics as exc:
            raise InsufficientStatistics(f"order {k}: {exc}") from None
    return result


def event_vocab(table: CountTable) -> list[str]:
    """Tokens the model can predict, in canonical order."""
    vocab = table.vocab - {BOS}
    vocab |= {EOS, UNK}
    return sorted(vocab)


def _log10(p: float) -> float:
    if p <= 0:
        return NON_EVENT
    return min(math.log10(p), 0.0)


def estimate_probs(table: CountTable, config: ModelConfig | None = None):
    """Linear-space probabilities and back-off weights.

    Returns ``(probs, gammas, discounts)`` where ``probs[k][g]`` is the
    interpolated P(g[-1] | g[:-1]) for every stored k-gram (unigrams over
    the event vocabulary) and ``gammas[h]`` the leftover mass of context h.
    """
    config = config or ModelConfig(order=table.order)
    if table.order != config.order:
        raise ValueError(f"count table has order {table.order}, config asks for {config.order}")
    table = limit_vocab(table, config.vocab_policy)
    if table.is_empty():
        raise InsufficientStatistics("empty count table")
    mcounts = modified_counts(table)
    discounts = order_discounts(mcounts)

    probs: dict[int, dict[Ngram, float]] = {}
    gammas: dict[Ngram, float] = {}

    events = event_vocab(table)
    uni = mcounts[1]
    d = discounts[1]
    weights = [uni.get((w,), 0) for w in events]
    total = math.fsum(weights)
    removed = math.fsum(min(d(c), c) for c in weights)
    gamma0 = removed / total
    base = gamma0 / len(events)
    probs[1] = {(w,): (c - min(d(c), c)) / total + base for w, c in zip(events, weights)}
    if config.unk_floor is not None and probs[1][(UNK,)] < config.unk_floor:
        scale = (1 - config.unk_floor) / (1 - probs[1][(UNK,)])
        probs[1] = {g: p * scale for g, p in probs[1].items()}
        probs[1][(UNK,)] = config.unk_floor
    gammas[()] = gamma0

    for k in range(2, table.order + 1):
        d = discounts.get(k)
        by_context: dict[Ngram, list[tuple[str, int]]] = defaultdict(list)
        for g, c in mcounts[k].items():
            by_context[g[:-1]].append((g[-1], c))
        lower = probs[k - 1]
        probs[k] = {}
        for h in sorted(by_context):
            followers = sorted(by_context[h])
            total = math.fsum(c for _, c in followers)
            gamma = math.fsum(min(d(c), c) for _, c in followers) / total
            gammas[h] = gamma
            for w, c in followers:
                p_low = lower[h[1:] + (w,)]
                probs[k][h + (w,)] = (c - min(d(c), c)) / total + gamma * p_low
    return probs, gammas, discounts


def estimate(table: CountTable, config: ModelConfig | None = None) -> ArpaModel:
    """Estimate an ARPA model from counts.

    ``<s>`` is stored with the non-event log probability -99; it carries a
    back-off weight like any other context.
    """
    probs, gammas, _ = estimate_probs(table, config)
    order = table.order
    entries: dict[int, dict] = {k: {} for k in range(1, order + 1)}
    for k in range(1, order + 1):
        for g, p in probs[k].items():
            bow = _log10(gammas[g]) if k < order and g in gammas else None
            entries[k][g] = (_log10(p), bow)
    if order >= 1:
        bow = _log10(gammas[(BOS,)]) if order > 1 and (BOS,) in gammas else None
        entries[1][(BOS,)] = (NON_EVENT, bow)
    return ArpaModel(order, entries)
