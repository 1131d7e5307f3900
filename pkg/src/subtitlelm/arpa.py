"""ARPA back-off model files.

The writer is canonical: sections are sorted by n-gram, log10 values use
seven decimals, fields are tab separated, so the same model always gives
the same bytes.  The reader also accepts space separated files, extra
blank lines and gzip input (``.gz``).
"""

from __future__ import annotations

import gzip
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

# log10 probability written for events that are never predicted (<s>)
NON_EVENT = -99.0

Ngram = tuple[str, ...]
Entry = tuple[float, "float | None"]

_NGRAM_HEADER_RE = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
_SECTION_RE = re.compile(r"^\\(\d+)-grams:$")


class MalformedArpa(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class InvariantViolation(ValueError):
    pass


@dataclass
class ArpaModel:
    """A back-off n-gram model.

    ``entries[k]`` maps each k-gram to ``(log10 prob, log10 backoff or None)``.
    """

    order: int
    entries: dict[int, dict[Ngram, Entry]] = field(default_factory=dict)

    def __post_init__(self):
        for k in range(1, self.order + 1):
            self.entries.setdefault(k, {})

    def counts(self) -> dict[int, int]:
        return {k: len(self.entries[k]) for k in range(1, self.order + 1)}

    @property
    def vocab(self) -> set[str]:
        return {g[0] for g in self.entries[1]}

    def sorted_entries(self, k: int) -> list[tuple[float, Ngram, float | None]]:
        table = self.entries[k]
        return [(table[g][0], g, table[g][1]) for g in sorted(table)]

    def validate(self) -> None:
        for k in range(1, self.order + 1):
            for g, (lp, bow) in self.entries[k].items():
                if len(g) != k:
                    raise InvariantViolation(f"{g!r} stored in the {k}-gram section")
                if any(not w or any(c.isspace() for c in w) for w in g):
                    raise InvariantViolation(f"token with whitespace in {g!r}")
                if math.isnan(lp) or lp > 0:
                    raise InvariantViolation(f"log10 probability {lp} > 0 for {g!r}")
                if bow is not None:
                    if k == self.order:
                        raise InvariantViolation(f"backoff weight on top-order n-gram {g!r}")
                    if math.isnan(bow) or math.isinf(bow):
                        raise InvariantViolation(f"backoff weight {bow} for {g!r}")

    def map_token(self, word: str) -> str:
        if (word,) in self.entries[1]:
            return word
        return UNK

    def logprob(self, word: str, context: Sequence[str] = ()) -> float:
        """log10 P(word | context) by standard back-off lookup.

        Tokens are used as given; use :meth:`score` to map OOVs to
        ``<unk>``.  Returns ``-inf`` for a word the model cannot predict.
        """
        context = tuple(context)[-(self.order - 1):] if self.order > 1 else ()
        penalty = 0.0
        while True:
            hit = self.entries[len(context) + 1].get(context + (word,))
            if hit is not None:
                return penalty + hit[0]
            if not context:
                return -math.inf
            ctx = self.entries[len(context)].get(context)
            if ctx is not None and ctx[1] is not None:
                penalty += ctx[1]
            context = context[1:]

    def score(self, word: str, context: Sequence[str] = ()) -> float:
        """log10 probability with out-of-vocabulary tokens mapped to ``<unk>``."""
        return self.logprob(self.map_token(word), [self.map_token(w) for w in context])

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        if word == BOS:
            return 0.0
        lp = self.logprob(word, context)
        return 0.0 if lp == -math.inf else 10.0 ** lp


def _open(path: str | Path, mode: str):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def _fmt(value: float) -> str:
    if value <= NON_EVENT:
        return "-99"
    return f"{value:.7f}"


def format_arpa(model: ArpaModel) -> str:
    model.validate()
    lines = ["\\data\\"]
    for k, n in model.counts().items():
        lines.append(f"ngram {k}={n}")
    lines.append("")
    for k in range(1, model.order + 1):
        lines.append(f"\\{k}-grams:")
        for lp, g, bow in model.sorted_entries(k):
            row = f"{_fmt(lp)}\t{' '.join(g)}"
            if bow is not None:
                row += f"\t{_fmt(bow)}"
            lines.append(row)
        lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


def write_arpa(model: ArpaModel, path: str | Path) -> None:
    text = format_arpa(model)
    with _open(path, "w") as f:
        f.write(text)


def parse_arpa(lines: Iterable[str]) -> ArpaModel:
    header: dict[int, int] = {}
    entries: dict[int, dict[Ngram, Entry]] = {}
    state = "start"  # start -> data -> section k -> end
    current = 0
    lineno = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if state == "start":
            if line == "\\data\\":
                state = "data"
            # anything before \data\ is free-form commentary
            continue
        if line == "\\end\\":
            state = "end"
            break
        m = _SECTION_RE.match(line)
        if m:
            k = int(m.group(1))
            if k != current + 1:
                raise MalformedArpa(lineno, f"section \\{k}-grams: out of order")
            if k not in header:
                raise MalformedArpa(lineno, f"section \\{k}-grams: missing from \\data\\ header")
            current = k
            entries[k] = {}
            state = "section"
            continue
        if state == "data":
            m = _NGRAM_HEADER_RE.match(line)
            if not m:
                raise MalformedArpa(lineno, f"unexpected line in \\data\\ header: {line!r}")
            k, n = int(m.group(1)), int(m.group(2))
            if k != len(header) + 1:
                raise MalformedArpa(lineno, f"header entry for order {k} out of order")
            header[k] = n
            continue
        fields = line.split()
        k = current
        if len(fields) not in (k + 1, k + 2):
            raise MalformedArpa(lineno, f"expected {k}-gram entry, got {len(fields)} fields")
        try:
            lp = float(fields[0])
        except ValueError:
            raise MalformedArpa(lineno, f"unparsable log probability {fields[0]!r}") from None
        bow = None
        if len(fields) == k + 2:
            if k == max(header):
                raise MalformedArpa(lineno, "backoff weight on a top-order n-gram")
            try:
                bow = float(fields[-1])
            except ValueError:
                raise MalformedArpa(lineno, f"unparsable backoff weight {fields[-1]!r}") from None
        g = tuple(fields[1:k + 1])
        if g in entries[k]:
            raise MalformedArpa(lineno, f"duplicate n-gram {' '.join(g)!r}")
        entries[k][g] = (lp, bow)
    if state != "end":
        raise MalformedArpa(lineno, "missing \\end\\ marker" if state != "start" else "no \\data\\ header")
    if not header:
        raise MalformedArpa(lineno, "empty \\data\\ header")
    for k, n in header.items():
        got = len(entries.get(k, {}))
        if got != n:
            raise MalformedArpa(lineno, f"header says ngram {k}={n} but the section has {got} entries")
    return ArpaModel(max(header), entries)


def read_arpa(path: str | Path) -> ArpaModel:
    with _open(path, "r") as f:
        return parse_arpa(f)
