"""Normalization of subtitle text into language-model training sentences."""

from .ingest import FORMATS, MalformedSrt, RawSubtitleDoc, UnreadableFile, ingest, parse_srt
from .numbers import NumberTooLarge
from .pipeline import (
    BOS,
    EOS,
    EmptyAfterStrip,
    NormalizedCorpus,
    NormReport,
    apply_spelling_map,
    build_case_freq,
    decapitalize_initial,
    drop_script_lines,
    expand_abbreviations,
    normalize,
    normalize_sentence,
    resegment,
    strip_punctuation,
    verbalize_numbers,
)
from .rules import NormRuleSet, RuleError, load_rules

__all__ = [
    "BOS", "EOS", "FORMATS", "EmptyAfterStrip", "MalformedSrt", "NormRuleSet",
    "NormReport", "NormalizedCorpus", "NumberTooLarge", "RawSubtitleDoc",
    "RuleError", "UnreadableFile", "apply_spelling_map", "build_case_freq",
    "decapitalize_initial", "drop_script_lines", "expand_abbreviations",
    "ingest", "load_rules", "normalize", "normalize_sentence", "parse_srt",
    "resegment", "strip_punctuation", "verbalize_numbers",
]
