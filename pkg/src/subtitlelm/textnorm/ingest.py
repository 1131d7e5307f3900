from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

FORMATS = ("plain", "srt", "sentences")

_INDEX_RE = re.compile(r"^\d+$")
_TIMESTAMP_RE = re.compile(
    r"^\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}\s*-->\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}"
)
_TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")
_BRACE_RE = re.compile(r"\{[^{}]*\}")
_SPACE_RE = re.compile(r"\s+")


class UnreadableFile(OSError):
    pass


class MalformedSrt(ValueError):
    def __init__(self, source: str, lineno: int):
        super().__init__(f"{source}:{lineno}: timestamp line without a preceding cue index")
        self.source = source
        self.lineno = lineno


@dataclass
class RawSubtitleDoc:
    """Text lines of one source, in source order.

    ``source_format`` is ``plain``, ``srt`` (cue numbers, timestamps and
    markup already stripped) or ``sentences`` (already one sentence per
    line, e.g. the output of a previous normalization run).
    """

    lines: list[str]
    source_format: str = "plain"
    source_id: str = ""
    warnings: list[str] = field(default_factory=list, compare=False)


def strip_markup(line: str) -> str:
    line = _TAG_RE.sub("", line)
    line = _BRACE_RE.sub("", line)
    return _SPACE_RE.sub(" ", line).strip()


def parse_srt(text: str, source: str = "<srt>") -> list[str]:
    """Return the cue text lines of a SubRip document."""
    raw = text.splitlines()
    lines: list[str] = []
    after_index = False
    for i, line in enumerate(raw):
        stripped = line.strip()
        if _TIMESTAMP_RE.match(stripped):
            if not after_index:
                raise MalformedSrt(source, i + 1)
            after_index = False
            continue
        after_index = False
        if not stripped:
            continue
        if _INDEX_RE.match(stripped):
            # only an index if a timestamp follows; otherwise cue text such as "274"
            nxt = raw[i + 1].strip() if i + 1 < len(raw) else ""
            if _TIMESTAMP_RE.match(nxt):
                after_index = True
                continue
        cleaned = strip_markup(stripped)
        if cleaned:
            lines.append(cleaned)
    return lines


def ingest(path: str | Path, format: str = "plain", errors: str = "strict") -> RawSubtitleDoc:
    """Read a subtitle source.

    ``errors`` is passed to the UTF-8 decoder; use ``"replace"`` to accept
    damaged files with U+FFFD substitutions.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}")
    path = Path(path)
    try:
        data = path.read_bytes()
        text = data.decode("utf-8", errors=errors)
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    if text.startswith("\ufeff"):
        text = text[1:]
    if format == "srt":
        lines = parse_srt(text, str(path))
    else:
        lines = [_SPACE_RE.sub(" ", line).strip() for line in text.splitlines()]
        lines = [line for line in lines if line]
    return RawSubtitleDoc(lines=lines, source_format=format, source_id=str(path))
