"""N-gram counting and count files.

Each sentence is padded with exactly one ``<s>`` and one ``</s>``.  Every
window of length 1..N of the padded sentence is counted, so ``<s>`` is a
unigram and a context but never the predicted (last) token of a longer
n-gram.

Count files hold one n-gram per line, ``tok1 tok2 ... tokk<TAB>count``,
all orders in one file, sorted by order and then by token sequence.
"""

from __future__ import annotations

import gzip
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

Ngram = tuple[str, ...]


class EmptySentence(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


class MalformedCountLine(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


@dataclass
class CountTable:
    """Per-order n-gram counts; ``tables[k]`` maps k-token tuples to counts."""

    order: int
    tables: dict[int, dict[Ngram, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        for k in range(1, self.order + 1):
            self.tables.setdefault(k, {})
        extra = set(self.tables) - set(range(1, self.order + 1))
        if extra:
            raise OrderMismatch(f"tables for orders {sorted(extra)} exceed order {self.order}")

    def __getitem__(self, k: int) -> dict[Ngram, int]:
        return self.tables[k]

    @property
    def vocab(self) -> set[str]:
        return {g[0] for g in self.tables[1]}

    @property
    def num_sentences(self) -> int:
        return self.tables[1].get((BOS,), 0)

    def total(self, k: int) -> int:
        return sum(self.tables[k].values())

    def is_empty(self) -> bool:
        return not self.tables[1]

    def items(self):
        """All (ngram, count) pairs in canonical order."""
        for k in range(1, self.order + 1):
            table = self.tables[k]
            for g in sorted(table):
                yield g, table[g]


def pad(sentence: Sequence[str]) -> list[str]:
    return [BOS, *sentence, EOS]


def count_ngrams(corpus: Iterable[Sequence[str]], order: int) -> CountTable:
    """Count all n-grams up to ``order`` in tokenized sentences."""
    table = CountTable(order)
    tables = table.tables
    for sentence in corpus:
        if isinstance(sentence, str):
            sentence = sentence.split()
        if not sentence:
            raise EmptySentence("sentences must contain at least one token")
        padded = pad(sentence)
        n = len(padded)
        for i in range(n):
            for k in range(1, min(order, n - i) + 1):
                g = tuple(padded[i:i + k])
                tables[k][g] = tables[k].get(g, 0) + 1
    return table


def merge(*tables: CountTable) -> CountTable:
    """Pointwise sum of count tables of the same order."""
    if not tables:
        raise ValueError("nothing to merge")
    order = tables[0].order
    out = CountTable(order)
    for t in tables:
        if t.order != order:
            raise OrderMismatch(f"cannot merge order {t.order} into order {order}")
        for k, table in t.tables.items():
            dest = out.tables[k]
            for g, c in table.items():
                dest[g] = dest.get(g, 0) + c
    return out


@dataclass(frozen=True)
class VocabPolicy:
    mode: str = "open-full"  # or "open-capped"
    cap: int | None = None
    unk_token: str = UNK

    def __post_init__(self):
        if self.mode not in ("open-full", "open-capped"):
            raise ValueError(f"unknown vocabulary mode {self.mode!r}")
        if self.mode == "open-capped" and (self.cap is None or self.cap < 1):
            raise ValueError("open-capped vocabulary needs cap >= 1")

    @classmethod
    def capped(cls, cap: int) -> "VocabPolicy":
        return cls("open-capped", cap)


def limit_vocab(table: CountTable, policy: VocabPolicy) -> CountTable:
    """Keep the ``cap`` most frequent words and map the rest to ``<unk>``.

    Ties are broken by ascending token order.  ``<s>``, ``</s>`` and the
    unknown token are always kept and do not use up slots.  Counts of
    n-grams that become identical after rewriting are summed.
    """
    if policy.mode == "open-full":
        return table
    unk = policy.unk_token
    special = {BOS, EOS, unk}
    unigrams = table.tables[1]
    ranked = sorted((g[0] for g in unigrams if g[0] not in special),
                    key=lambda w: (-unigrams[(w,)], w))
    if len(ranked) <= policy.cap:
        return table
    keep = set(ranked[:policy.cap]) | special
    out = CountTable(table.order)
    for k, src in table.tables.items():
        dest = out.tables[k]
        for g, c in src.items():
            g2 = tuple(w if w in keep else unk for w in g)
            dest[g2] = dest.get(g2, 0) + c
    return out


def _open(path: str | Path, mode: str):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def write_counts(table: CountTable, path: str | Path) -> None:
    with _open(path, "w") as f:
        for g, c in table.items():
            f.write(f"{' '.join(g)}\t{c}\n")


def read_counts(path: str | Path, order: int | None = None) -> CountTable:
    """Read a count file.

    The order is the longest n-gram in the file unless given explicitly
    (a table whose sentences are all shorter than its order has empty top
    sections, which the file cannot express).
    """
    tables: dict[int, dict[Ngram, int]] = {}
    with _open(path, "r") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            ngram, sep, count = line.rpartition("\t")
            if not sep:
                raise MalformedCountLine(lineno, "missing tab before count")
            try:
                c = int(count)
            except ValueError:
                raise MalformedCountLine(lineno, f"count {count!r} is not an integer") from None
            if c < 1:
                raise MalformedCountLine(lineno, f"count {c} is not positive")
            g = tuple(ngram.split())
            if not g:
                raise MalformedCountLine(lineno, "empty n-gram")
            tables.setdefault(len(g), {})
            if g in tables[len(g)]:
                raise MalformedCountLine(lineno, f"duplicate n-gram {ngram!r}")
            tables[len(g)][g] = c
    found = max(tables, default=1)
    if order is None:
        order = found
    elif found > order:
        raise OrderMismatch(f"{path} holds {found}-grams but order {order} was requested")
    return CountTable(order, tables)
