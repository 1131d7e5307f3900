"""Perplexity and word error rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from .arpa import BOS, EOS


class EmptyCorpus(ValueError):
    pass


class EmptyReference(ValueError):
    pass


class Scorer(Protocol):
    order: int
    vocab: set[str]

    def score(self, word: str, context: Sequence[str] = ()) -> float: ...


@dataclass
class SentenceScore:
    log10_prob: float
    scored: int
    oovs: int


@dataclass
class EvalReport:
    token_count: int  # words, excluding </s>
    oov_count: int
    scored_count: int  # words + </s> events, minus skipped OOVs
    log10_prob_total: float
    perplexity: float
    sentences: list[SentenceScore] = field(default_factory=list, repr=False)

    def as_pairs(self) -> list[tuple[str, str]]:
        return [
            ("sentences", str(len(self.sentences))),
            ("tokens", str(self.token_count)),
            ("oovs", str(self.oov_count)),
            ("scored", str(self.scored_count)),
            ("log10_prob", f"{self.log10_prob_total:.6f}"),
            ("perplexity", f"{self.perplexity:.6f}"),
        ]


def perplexity(model: Scorer, corpus: Iterable[Sequence[str]], skip_oov: bool = False) -> EvalReport:
    """Score every word and the closing ``</s>`` of each sentence.

    Out-of-vocabulary words are scored as ``<unk>`` by default (the models
    are open-vocabulary); with ``skip_oov`` they are left out of the total
    and of the event count, as several external toolkits do.
    """
    vocab = model.vocab
    per_sentence = []
    tokens = oovs = 0
    for sentence in corpus:
        history = [BOS]
        lp_parts = []
        n_scored = n_oov = 0
        for w in list(sentence) + [EOS]:
            is_oov = w != EOS and w not in vocab
            if w != EOS:
                tokens += 1
            if is_oov:
                n_oov += 1
            if not (is_oov and skip_oov):
                lp_parts.append(model.score(w, history))
                n_scored += 1
            history.append(w)
        oovs += n_oov
        per_sentence.append(SentenceScore(math.fsum(lp_parts), n_scored, n_oov))
    if not per_sentence:
        raise EmptyCorpus("nothing to score")
    total = math.fsum(s.log10_prob for s in per_sentence)
    scored = sum(s.scored for s in per_sentence)
    if scored == 0:
        raise EmptyCorpus("every token was skipped")
    ppl = 10.0 ** (-total / scored) if total != -math.inf else math.inf
    return EvalReport(tokens, oovs, scored, total, ppl, per_sentence)


@dataclass
class WerReport:
    substitutions: int
    insertions: int
    deletions: int
    ref_len: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def wer(self) -> float:
        return self.errors / self.ref_len

    def __add__(self, other: "WerReport") -> "WerReport":
        return WerReport(
            self.substitutions + other.substitutions,
            self.insertions + other.insertions,
            self.deletions + other.deletions,
            self.ref_len + other.ref_len,
        )

    def as_pairs(self) -> list[tuple[str, str]]:
        return [
            ("substitutions", str(self.substitutions)),
            ("insertions", str(self.insertions)),
            ("deletions", str(self.deletions)),
            ("ref_len", str(self.ref_len)),
            ("wer", f"{self.wer:.6f}"),
        ]


def align(reference: Sequence[str], hypothesis: Sequence[str]) -> tuple[int, int, int]:
    """Minimal (S, I, D) under unit-cost Levenshtein alignment.

    The backtrace prefers the diagonal (match or substitution), then
    insertion, then deletion, so equal-cost alignments resolve the same
    way every time.
    """
    n, m = len(reference), len(hypothesis)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        r = reference[i - 1]
        for j in range(1, m + 1):
            cost = 0 if r == hypothesis[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, row[j - 1] + 1, prev[j] + 1)
    s = ins = dels = 0
    i, j = n, m
    while i or j:
        if i and j:
            cost = 0 if reference[i - 1] == hypothesis[j - 1] else 1
            if dist[i][j] == dist[i - 1][j - 1] + cost:
                s += cost
                i, j = i - 1, j - 1
                continue
        if j and dist[i][j] == dist[i][j - 1] + 1:
            ins += 1
            j -= 1
        else:
            dels += 1
            i -= 1
    return s, ins, dels


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> WerReport:
    if not reference:
        raise EmptyReference("reference has no tokens")
    s, i, d = align(reference, hypothesis)
    return WerReport(s, i, d, len(reference))


def corpus_wer(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> WerReport:
    """Pool S, I, D and reference length over aligned sentence pairs."""
    total = WerReport(0, 0, 0, 0)
    for ref, hyp in pairs:
        s, i, d = align(ref, hyp)
        total = total + WerReport(s, i, d, len(ref))
    if total.ref_len == 0:
        raise EmptyReference("references have no tokens")
    return total


def write_report(path: str | Path, pairs: list[tuple[str, str]]) -> None:
    """Write ``metric<TAB>value`` lines."""
    Path(path).write_text("".join(f"{k}\t{v}\n" for k, v in pairs), encoding="utf-8")
