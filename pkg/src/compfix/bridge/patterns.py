"""Message-pattern table mapping compiler messages to error IDs."""
from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

UNKNOWN_ID = "E_UNK"
PLACEHOLDER = "□"


def _compile(pattern: str):
    parts = [re.escape(p) for p in pattern.strip().split(PLACEHOLDER)]
    return re.compile(".+?".join(parts), re.IGNORECASE)


class DiagnosticPatternTable:
    """Ordered ``(error_id, pattern)`` rules; the first full match wins."""

    def __init__(self, rules=()):
        self.rules = [(eid, pat, _compile(pat)) for eid, pat in rules]

    @classmethod
    def parse(cls, text: str) -> "DiagnosticPatternTable":
        rules = []
        for raw in text.splitlines():
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            eid, _, pat = raw.partition("\t")
            if not pat:
                raise ValueError(f"pattern line without a tab: {raw!r}")
            rules.append((eid.strip(), pat))
        return cls(rules)

    @classmethod
    def load(cls, path) -> "DiagnosticPatternTable":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "DiagnosticPatternTable":
        return cls.parse(resources.files(__package__).joinpath("patterns.tsv").read_text(encoding="utf-8"))

    def classify(self, message: str) -> str:
        msg = message.strip()
        for eid, _, rx in self.rules:
            if rx.fullmatch(msg):
                return eid
        return UNKNOWN_ID

    @property
    def error_ids(self):
        seen = dict.fromkeys(eid for eid, _, _ in self.rules)
        return list(seen)
