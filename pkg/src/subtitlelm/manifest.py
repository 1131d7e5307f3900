"""Corpus manifests: subtitle sources labeled by show type and domain.

A manifest is a JSON Lines file, one source per line::

    {"path": "soap/ep0001.srt", "show_id": "soap", "type": "fiction",
     "domains": ["general fiction"]}

``path`` is resolved relative to the manifest.  ``format`` may be given
explicitly; otherwise ``.srt`` files are read as SubRip and everything
else as plain text.  A show may carry several domain tags.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

SHOW_TYPES = ("fiction", "documentary", "talkshow", "quiz", "lifestyle", "news/weather")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    show_id: str
    show_type: str
    domains: tuple[str, ...] = ()
    format: str | None = None

    @property
    def source_format(self) -> str:
        if self.format:
            return self.format
        return "srt" if self.path.suffix.lower() == ".srt" else "plain"


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.path in seen:
                raise ManifestError(f"duplicate path {e.path}")
            seen.add(e.path)

    def groups(self, by: str) -> dict[str, list[int]]:
        """Entry indices per show type or per domain, in manifest order."""
        if by not in ("type", "domain"):
            raise ValueError(f"cannot group by {by!r}")
        groups: dict[str, list[int]] = {}
        for i, e in enumerate(self.entries):
            labels = [e.show_type] if by == "type" else list(e.domains)
            for label in labels:
                groups.setdefault(label, []).append(i)
        return groups


def read_manifest(path: str | Path) -> CorpusManifest:
    path = Path(path)
    base = path.parent
    entries = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}:{lineno}: {exc}") from None
        if not isinstance(rec, dict) or "path" not in rec:
            raise ManifestError(f"{path}:{lineno}: record needs a 'path' key")
        domains = rec.get("domains", [])
        if isinstance(domains, str):
            domains = [domains]
        entries.append(ManifestEntry(
            path=(base / rec["path"]),
            show_id=str(rec.get("show_id", Path(rec["path"]).stem)),
            show_type=str(rec.get("type", "")),
            domains=tuple(str(d) for d in domains),
            format=rec.get("format"),
        ))
    try:
        return CorpusManifest(entries)
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from None


def group_filename(label: str) -> str:
    """File-system safe name for a group label ("news/weather" -> "news_weather")."""
    name = re.sub(r"[^\w.-]+", "_", label.strip()).strip("_")
    return name or "unnamed"
