"""Editable normalization tables.

Every table is a UTF-8 ``key<TAB>value`` file.  The shipped defaults live
next to this module in ``data/``; a rules directory may override any of
them by providing a file with the same name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

ABBREVIATIONS_FILE = "abbreviations.tsv"
SPELLING_FILE = "spelling.tsv"
CASE_FREQ_FILE = "case_freq.tsv"
SYMBOLS_FILE = "symbols.tsv"


class RuleError(ValueError):
    pass


def parse_table(text: str, source: str = "<table>") -> list[tuple[str, str]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        key, sep, value = line.partition("\t")
        if not sep or not key or not value.strip():
            raise RuleError(f"{source}:{lineno}: expected key<TAB>value")
        rows.append((key, value.strip()))
    return rows


@dataclass
class NormRuleSet:
    abbreviations: dict[str, tuple[str, ...]] = field(default_factory=dict)
    spelling_map: dict[str, str] = field(default_factory=dict)
    case_freq: dict[str, int] = field(default_factory=dict)
    # symbol characters ("%") are always expanded; alphabetic units ("km")
    # only directly after a number
    symbols: dict[str, str] = field(default_factory=dict)
    caps_word_max_len: int = 4
    locale: str = "nl"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for key in self.abbreviations:
            if "." not in key and "'" not in key:
                raise RuleError(f"abbreviation {key!r} has no dot or apostrophe")
        for key, value in self.spelling_map.items():
            if value in self.spelling_map and self.spelling_map[value] != value:
                raise RuleError(
                    f"spelling map is not idempotent: {key!r} -> {value!r} -> "
                    f"{self.spelling_map[value]!r}"
                )
        for form, count in self.case_freq.items():
            if count < 0:
                raise RuleError(f"negative frequency for {form!r}")
        if self.caps_word_max_len < 0:
            raise RuleError("caps_word_max_len must be >= 0")
        if self.locale != "nl":
            raise RuleError(f"unsupported number grammar {self.locale!r}")

    @classmethod
    def from_tables(cls, abbreviations: str = "", spelling: str = "",
                    case_freq: str = "", symbols: str = "", **kwargs) -> "NormRuleSet":
        freq = {}
        for form, count in parse_table(case_freq, CASE_FREQ_FILE):
            try:
                freq[form] = int(count)
            except ValueError:
                raise RuleError(f"{CASE_FREQ_FILE}: non-integer count for {form!r}") from None
        return cls(
            abbreviations={k: tuple(v.split()) for k, v in parse_table(abbreviations, ABBREVIATIONS_FILE)},
            spelling_map=dict(parse_table(spelling, SPELLING_FILE)),
            case_freq=freq,
            symbols=dict(parse_table(symbols, SYMBOLS_FILE)),
            **kwargs,
        )

    @classmethod
    def default(cls, **kwargs) -> "NormRuleSet":
        """The shipped Dutch tables."""
        return load_rules(None, **kwargs)

    def lookup_abbreviation(self, token: str) -> tuple[str, ...] | None:
        """Exact match first, then a sentence-initial capitalized variant."""
        if token in self.abbreviations:
            return self.abbreviations[token]
        lowered = token[:1].lower() + token[1:]
        if lowered != token and lowered in self.abbreviations:
            full = self.abbreviations[lowered]
            return (full[0][:1].upper() + full[0][1:],) + full[1:]
        return None

    def is_abbreviation(self, token: str) -> bool:
        return self.lookup_abbreviation(token) is not None


def _read_default(name: str) -> str:
    return resources.files(__package__).joinpath("data", name).read_text(encoding="utf-8")


def load_rules(rules_dir: str | Path | None = None, **kwargs) -> NormRuleSet:
    """Load tables from ``rules_dir``; missing files fall back to the defaults."""
    texts = {}
    for name in (ABBREVIATIONS_FILE, SPELLING_FILE, CASE_FREQ_FILE, SYMBOLS_FILE):
        path = Path(rules_dir, name) if rules_dir is not None else None
        if path is not None and path.exists():
            texts[name] = path.read_text(encoding="utf-8")
        else:
            texts[name] = _read_default(name)
    return NormRuleSet.from_tables(
        abbreviations=texts[ABBREVIATIONS_FILE],
        spelling=texts[SPELLING_FILE],
        case_freq=texts[CASE_FREQ_FILE],
        symbols=texts[SYMBOLS_FILE],
        **kwargs,
    )
