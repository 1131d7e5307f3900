"""Subtitle text normalization.

Three macro steps are applied in order: normalization proper
(resegmentation, script-line removal, abbreviation and number expansion,
punctuation removal), sentence-initial decapitalization, and spelling
correction.  Each stage is a plain function over a whitespace-tokenized
sentence string so it can be tested and reused on its own.
"""

from __future__ import annotations

import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import numbers
from .ingest import RawSubtitleDoc
from .rules import NormRuleSet

BOS = "<s>"
EOS = "</s>"

TERMINATORS = ".!?…"
_CLOSERS = "\"')]}»”’"
_OPENERS = "\"'([{«“„‘"
_HYPHENS = "-‐‑"
_APOSTROPHES = "'’"
_CURRENCIES = "€$£"

_NUMERIC_RE = re.compile(r"^\d[\d.,]*$")
_NUMBER_UNIT_RE = re.compile(r"^(\d[\d.,]*)([^\W\d_]+)$")
_DIGIT_RUN_RE = re.compile(r"\d+|\D+")
_AFFIX_RE = re.compile(r"^(\W*?)(.*?)(\W*)$", re.S)
_PURE_DIGITS_RE = re.compile(r"^[0-9]+$")


class EmptyAfterStrip(ValueError):
    """Nothing but punctuation was left of a sentence."""


@dataclass
class NormReport:
    source_id: str = ""
    dropped: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class NormalizedCorpus:
    """One token tuple per sentence; boundary tokens are not stored."""

    sentences: list[tuple[str, ...]] = field(default_factory=list)
    bos_token: str = BOS
    eos_token: str = EOS
    report: NormReport = field(default_factory=NormReport, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.sentences)

    def render(self) -> str:
        """One sentence per line, single spaces, LF endings."""
        return "".join(" ".join(s) + "\n" for s in self.sentences)

    @classmethod
    def from_text(cls, text: str) -> "NormalizedCorpus":
        return cls([tuple(line.split()) for line in text.splitlines() if line.strip()])

    def extend(self, other: "NormalizedCorpus") -> None:
        self.sentences.extend(other.sentences)


def _letters(token: str) -> int:
    return sum(1 for c in token if c.isalpha())


def _is_caps(token: str) -> bool:
    letters = [c for c in token if c.isalpha()]
    return bool(letters) and all(c.isupper() for c in letters)


def _is_terminal(token: str, rules: NormRuleSet) -> bool:
    core = token.rstrip(_CLOSERS)
    if not core or core[-1] not in TERMINATORS:
        return False
    if core.endswith(".") and not core.endswith(".."):
        if rules.is_abbreviation(core.lstrip(_OPENERS)):
            return False
    return True


def resegment(doc: RawSubtitleDoc, rules: NormRuleSet | None = None) -> list[str]:
    """Split multi-sentence lines and merge sentences spread over lines.

    A token ending in ``.``, ``!`` or ``?`` closes a sentence unless it is
    a known abbreviation.  A line without a terminator is continued on the
    next line; the end of the document flushes whatever is pending.  For
    ``sentences`` documents each line end is also a boundary.
    """
    rules = rules or NormRuleSet.default()
    out: list[str] = []
    pending: list[str] = []
    for line in doc.lines:
        for token in line.split():
            pending.append(token)
            if _is_terminal(token, rules):
                out.append(" ".join(pending))
                pending = []
        if doc.source_format == "sentences" and pending:
            out.append(" ".join(pending))
            pending = []
    if pending:
        out.append(" ".join(pending))
    return out


def drop_script_lines(sentence: str, caps_word_max_len: int = 4) -> str | None:
    """Remove script information written in capitals.

    Returns None when every word is fully uppercase.  Otherwise uppercase
    words with more than ``caps_word_max_len`` letters are dropped; shorter
    ones are probably acronyms and stay.
    """
    tokens = sentence.split()
    words = [t for t in tokens if any(c.isalpha() for c in t)]
    if words and all(_is_caps(t) for t in words):
        return None
    kept = [t for t in tokens if not (_is_caps(t) and _letters(t) > caps_word_max_len)]
    return " ".join(kept)


def _split_affixes(token: str) -> tuple[str, str, str]:
    m = _AFFIX_RE.match(token)
    return m.group(1), m.group(2), m.group(3)


def _expand_symbols(core: str, rules: NormRuleSet) -> list[str]:
    char_symbols = {k: v for k, v in rules.symbols.items() if not k.isalpha()}
    if core and core[0] in _CURRENCIES and core[0] in char_symbols and _NUMERIC_RE.match(core[1:]):
        # "€5" is spoken as "5 euro"
        return [core[1:], char_symbols[core[0]]]
    if not any(c in char_symbols for c in core):
        return [core]
    pieces: list[str] = []
    buf = ""
    for c in core:
        if c in char_symbols:
            if buf:
                pieces.append(buf)
                buf = ""
            pieces.append(char_symbols[c])
        else:
            buf += c
    if buf:
        pieces.append(buf)
    return pieces


def expand_abbreviations(sentence: str, rules: NormRuleSet) -> str:
    """Write abbreviations, contractions, symbols and units in full."""
    units = {k: v for k, v in rules.symbols.items() if k.isalpha()}
    out: list[str] = []
    for token in sentence.split():
        lead = token[: len(token) - len(token.lstrip(_OPENERS.replace("'", "")))]
        rest = token[len(lead):]
        core = rest.rstrip(",;:!?)]}\"»”")
        trail = rest[len(core):]
        full = rules.lookup_abbreviation(core)
        if full is None and core.endswith(".") and core.count(".") == 1:
            full = rules.lookup_abbreviation(core[:-1])
            if full is not None:
                trail = "." + trail
        if full is None and core.endswith(".") and core[:-1] in units:
            core = core[:-1]
            trail = "." + trail
        if full is not None:
            pieces = list(full)
        else:
            m = _NUMBER_UNIT_RE.match(core)
            if m and m.group(2) in units:
                pieces = [m.group(1), units[m.group(2)]]
            elif core in units and out and _NUMERIC_RE.match(out[-1]):
                pieces = [units[core]]
            else:
                pieces = _expand_symbols(core, rules)
        if lead:
            pieces[0] = lead + pieces[0]
        if trail:
            pieces[-1] = pieces[-1] + trail
        out.extend(p for p in pieces if p)
    return " ".join(out)


def verbalize_numbers(sentence: str, warnings: list[str] | None = None,
                      too_large: str = "keep") -> str:
    """Replace digit-bearing tokens by split Dutch number words.

    Tokens without digits are returned unchanged.  Numbers of 10**12 and
    up are kept as they are (``too_large="keep"``) or read digit by digit
    (``too_large="digits"``); either way a warning is appended.
    """
    out: list[str] = []
    for token in sentence.split():
        if not any(c.isdigit() for c in token):
            out.append(token)
            continue
        prefix, core, suffix = _split_affixes(token)
        try:
            words = numbers.verbalize(core)
            if words is None:
                words = []
                for run in _DIGIT_RUN_RE.findall(core):
                    words += numbers.integer(run) if run.isdigit() and run.isascii() else [run]
        except numbers.NumberTooLarge as exc:
            if warnings is not None:
                warnings.append(f"number too large: {token} ({exc})")
            if too_large == "digits":
                words = [w for run in _DIGIT_RUN_RE.findall(core)
                         for w in (numbers.digits(run) if run.isdigit() else [run])]
            else:
                out.append(token)
                continue
        out.extend(([prefix] if prefix else []) + words + ([suffix] if suffix else []))
    return " ".join(out)


def _is_punct(c: str) -> bool:
    return unicodedata.category(c)[0] in "PSC"


def _strip_token(token: str) -> list[str]:
    chars: list[str] = []
    for i, c in enumerate(token):
        if not _is_punct(c):
            chars.append(c)
            continue
        inside = 0 < i < len(token) - 1 and token[i - 1].isalnum() and token[i + 1].isalnum()
        if inside and c in _HYPHENS:
            chars.append("-")
        elif inside and c in _APOSTROPHES:
            chars.append("'")
        elif c == ".":
            continue
        else:
            chars.append(" ")
    return "".join(chars).split()


def strip_punctuation(sentence: str) -> str:
    """Remove punctuation, keeping word-internal hyphens and apostrophes.

    Raises EmptyAfterStrip if nothing is left.
    """
    tokens = [t for token in sentence.split() for t in _strip_token(token)]
    if not tokens:
        raise EmptyAfterStrip(sentence)
    return " ".join(tokens)


def decapitalize_initial(sentence: str, case_freq: dict[str, int]) -> str:
    """Lowercase the first word if its lowercase form is more frequent.

    Missing entries and ties keep the original form.
    """
    first, sep, rest = sentence.partition(" ")
    lower = first.lower()
    if lower != first and first in case_freq and lower in case_freq:
        if case_freq[first] < case_freq[lower]:
            return lower + sep + rest
    return sentence


def apply_spelling_map(sentence: str, rules: NormRuleSet) -> str:
    out = []
    for token in sentence.split():
        if token in rules.spelling_map:
            token = rules.spelling_map[token]
        else:
            lowered = token[:1].lower() + token[1:]
            if lowered != token and lowered in rules.spelling_map:
                canon = rules.spelling_map[lowered]
                token = canon[:1].upper() + canon[1:]
        out.append(token)
    return " ".join(out)


def normalize_sentence(sentence: str, rules: NormRuleSet,
                       report: NormReport | None = None) -> tuple[str, ...] | None:
    """Run the per-sentence stages; None if the sentence is dropped."""
    kept = drop_script_lines(sentence, rules.caps_word_max_len)
    if kept is None:
        if report is not None:
            report.dropped.append(sentence)
        return None
    text = expand_abbreviations(kept, rules)
    warnings = report.warnings if report is not None else None
    # digit-wise fallback keeps bare digit strings out of the output
    text = verbalize_numbers(text, warnings, too_large="digits")
    try:
        text = strip_punctuation(text)
    except EmptyAfterStrip:
        if report is not None:
            report.dropped.append(sentence)
        return None
    text = decapitalize_initial(text, rules.case_freq)
    text = apply_spelling_map(text, rules)
    tokens = tuple(t for t in text.split() if not _PURE_DIGITS_RE.match(t))
    return tokens or None


def normalize(doc: RawSubtitleDoc, rules: NormRuleSet | None = None) -> NormalizedCorpus:
    """Turn a raw document into one-sentence-per-line training text.

    Source lines written entirely in capitals are removed before
    resegmentation so that script lines never merge into speech.
    """
    rules = rules or NormRuleSet.default()
    report = NormReport(source_id=doc.source_id, warnings=list(doc.warnings))
    lines = []
    for line in doc.lines:
        kept = drop_script_lines(line, rules.caps_word_max_len)
        if kept is None:
            report.dropped.append(line)
        elif kept:
            lines.append(kept)
    filtered = RawSubtitleDoc(lines, doc.source_format, doc.source_id)
    sentences = []
    for sentence in resegment(filtered, rules):
        tokens = normalize_sentence(sentence, rules, report)
        if tokens:
            sentences.append(tokens)
    return NormalizedCorpus(sentences, report=report)


def build_case_freq(sentences: Iterable[Iterable[str]]) -> dict[str, int]:
    """Count word forms outside sentence-initial position."""
    freq: Counter[str] = Counter()
    for sentence in sentences:
        freq.update(list(sentence)[1:])
    return dict(freq)
