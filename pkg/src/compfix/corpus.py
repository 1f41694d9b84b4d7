"""Mining repair classes and repair profiles from (buggy, fixed) program pairs."""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .lang import (EOL, AbstractedLine, LexError, abstract_line, build_symbol_table,
                   split_program, tokenize)

log = logging.getLogger(__name__)

KINDS = ("Insert", "Delete", "Replace", "Misc")


class MiningError(ValueError):
    pass


@dataclass(frozen=True)
class TrainPair:
    source: str
    target: str
    error_id: str
    error_line: int
    pair_id: Optional[str] = None

    @property
    def differing(self) -> list[int]:
        """Indices of lines that differ; ``None``-free only for equal line counts."""
        src, tgt = split_program(self.source), split_program(self.target)
        if len(src) != len(tgt):
            return []
        return [i for i, (a, b) in enumerate(zip(src, tgt)) if a != b]

    @property
    def source_line(self) -> Optional[int]:
        d = self.differing
        return d[0] if len(d) == 1 else None

    @property
    def target_line(self) -> Optional[str]:
        ln = self.source_line
        return None if ln is None else split_program(self.target)[ln]

    @property
    def single_line(self) -> bool:
        return self.source_line is not None


@dataclass(frozen=True)
class RepairClass:
    error_id: str
    deletions: tuple
    insertions: tuple
    kind: str
    class_id: int = -1
    count: int = 1

    @property
    def key(self):
        return (self.error_id, self.deletions, self.insertions)

    def __str__(self):
        dels = " ".join(self.deletions) or "-"
        ins = " ".join(self.insertions) or "-"
        return f"<{self.error_id} | {dels} | {ins}>"


def _tags(seq) -> list[str]:
    if isinstance(seq, AbstractedLine):
        return list(seq.tags)
    return [getattr(t, "tag", t) for t in seq]


def edit_script(src, tgt):
    """Minimal insert/delete script turning ``src`` into ``tgt``.

    Returns a list of ``(op, position, tag)`` where ``op`` is ``"="``, ``"-"``
    or ``"+"``; positions index the source (``+`` uses the insertion point).
    Equal tokens are matched as early as possible and, on ties, deletions are
    emitted before insertions.
    """
    a, b = _tags(src), _tags(tgt)
    n, m = len(a), len(b)
    lcs = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, nxt = lcs[i], lcs[i + 1]
        for j in range(m - 1, -1, -1):
            row[j] = nxt[j + 1] + 1 if a[i] == b[j] else max(nxt[j], row[j + 1])
    ops = []
    i = j = 0
    while i < n or j < m:
        if i < n and j < m and a[i] == b[j]:
            ops.append(("=", i, a[i]))
            i += 1
            j += 1
        elif i < n and (j == m or lcs[i + 1][j] >= lcs[i][j + 1]):
            ops.append(("-", i, a[i]))
            i += 1
        else:
            ops.append(("+", i, b[j]))
            j += 1
    return ops


def diff_lines(src, tgt):
    """``(deletions, insertions)`` as lists of ``(position, tag)``, left to right."""
    ops = edit_script(src, tgt)
    dels = [(p, t) for op, p, t in ops if op == "-"]
    ins = [(p, t) for op, p, t in ops if op == "+"]
    return dels, ins


def classify(ops) -> str:
    dels = sum(op == "-" for op, _, _ in ops)
    ins = sum(op == "+" for op, _, _ in ops)
    if dels == 0 and ins == 0:
        raise MiningError("no-op pair: source and target lines are identical")
    if dels == 0:
        return "Insert"
    if ins == 0:
        return "Delete"
    hunk = [0, 0]
    balanced = True
    for op, _, _ in ops + [("=", -1, None)]:
        if op == "=":
            if hunk != [0, 0] and hunk[0] != hunk[1]:
                balanced = False
            hunk = [0, 0]
        else:
            hunk[op == "+"] += 1
    return "Replace" if balanced else "Misc"


def bigrams(tags: Sequence[str]) -> list[tuple]:
    """Bigrams of a line including the end-of-line bigram; bigram ``k`` starts at token ``k``."""
    tags = list(tags)
    return [(tags[k], tags[k + 1] if k + 1 < len(tags) else EOL) for k in range(len(tags))]


def edited_positions(ops, n_tokens) -> set[int]:
    """Bigram indices touched by an edit script over a line of ``n_tokens`` tokens."""
    out = set()
    for op, p, _ in ops:
        if op == "-":
            out.add(p)
        elif op == "+" and n_tokens:
            out.add(max(p - 1, 0))
    return out


def profile_from_script(src, ops) -> frozenset:
    tags = _tags(src)
    grams = bigrams(tags)
    return frozenset(grams[k] for k in edited_positions(ops, len(tags)))


def abstract_pair(pair: TrainPair):
    """Abstracted source line and abstracted target line of a single-line pair."""
    ln = pair.source_line
    if ln is None:
        raise MiningError("pair does not differ in exactly one line")
    src_lines, tgt_lines = split_program(pair.source), split_program(pair.target)
    try:
        src_toks = tokenize(src_lines[ln])
        tgt_toks = tokenize(tgt_lines[ln])
    except LexError as exc:
        raise MiningError(f"abstraction failed: {exc}") from exc
    src = abstract_line(src_toks, build_symbol_table(src_lines), ln)
    tgt = abstract_line(tgt_toks, build_symbol_table(tgt_lines), ln)
    return src, tgt


def mine_repair_class(pair: TrainPair) -> RepairClass:
    src, tgt = abstract_pair(pair)
    ops = edit_script(src, tgt)
    kind = classify(ops)
    dels = tuple(t for op, _, t in ops if op == "-")
    ins = tuple(t for op, _, t in ops if op == "+")
    return RepairClass(pair.error_id, dels, ins, kind)


def mine_repair_profile(pair: TrainPair) -> frozenset:
    src, tgt = abstract_pair(pair)
    ops = edit_script(src, tgt)
    classify(ops)
    return profile_from_script(src, ops)


@dataclass
class MinedPair:
    pair: TrainPair
    line: AbstractedLine
    target: tuple
    repair_class: RepairClass
    profile: frozenset

    @property
    def error_id(self):
        return self.pair.error_id


def mine_pair(pair: TrainPair) -> MinedPair:
    src, tgt = abstract_pair(pair)
    ops = edit_script(src, tgt)
    kind = classify(ops)
    rc = RepairClass(pair.error_id,
                     tuple(t for op, _, t in ops if op == "-"),
                     tuple(t for op, _, t in ops if op == "+"), kind)
    return MinedPair(pair, src, tgt.tags, rc, profile_from_script(src, ops))


class ClassCatalog:
    """Repair classes ordered by descending training count (ties: first seen)."""

    def __init__(self, classes: Iterable[RepairClass] = ()):
        self.classes: list[RepairClass] = list(classes)
        self._index = {c.key: c.class_id for c in self.classes}

    @classmethod
    def from_classes(cls, mined: Iterable[RepairClass]) -> "ClassCatalog":
        counts: Counter = Counter()
        first: dict = {}
        for rc in mined:
            counts[rc.key] += 1
            first.setdefault(rc.key, rc)
        order = sorted(first, key=lambda k: -counts[k])  # sort is stable: ties keep first-seen order
        classes = [RepairClass(*k, kind=first[k].kind, class_id=i, count=counts[k])
                   for i, k in enumerate(order)]
        return cls(classes)

    def __len__(self):
        return len(self.classes)

    def __getitem__(self, class_id) -> RepairClass:
        return self.classes[class_id]

    def __iter__(self):
        return iter(self.classes)

    def lookup(self, key) -> Optional[int]:
        if isinstance(key, RepairClass):
            key = key.key
        return self._index.get(key)

    def counts(self):
        return [c.count for c in self.classes]

    def to_records(self):
        return [{"class_id": c.class_id, "error_id": c.error_id, "deletions": list(c.deletions),
                 "insertions": list(c.insertions), "kind": c.kind, "count": c.count}
                for c in self.classes]

    @classmethod
    def from_records(cls, records):
        return cls(RepairClass(r["error_id"], tuple(r["deletions"]), tuple(r["insertions"]),
                               r["kind"], r["class_id"], r["count"]) for r in records)


@dataclass
class MinedCorpus:
    examples: list
    catalog: ClassCatalog
    dropped: int = 0
    labels: list = field(default_factory=list)


def mine_corpus(pairs: Iterable[TrainPair]) -> MinedCorpus:
    """Mine every single-line pair; pairs that fail to abstract are dropped and counted."""
    examples = []
    dropped = 0
    for pair in pairs:
        try:
            examples.append(mine_pair(pair))
        except MiningError as exc:
            log.debug("dropping pair %s: %s", pair.pair_id, exc)
            dropped += 1
    catalog = ClassCatalog.from_classes(ex.repair_class for ex in examples)
    labels = [catalog.lookup(ex.repair_class) for ex in examples]
    for ex, cid in zip(examples, labels):
        ex.repair_class = catalog[cid]
    return MinedCorpus(examples, catalog, dropped, labels)


# ---------------------------------------------------------------------------
# corpus files

class Corpus(list):
    """List of :class:`TrainPair` that remembers how many records were skipped."""

    skipped = 0


_REQUIRED = {"source": str, "target": str, "error_id": str, "error_line": int}


def _record_to_pair(rec, default_id):
    if not isinstance(rec, dict):
        raise ValueError("record is not an object")
    for key, typ in _REQUIRED.items():
        if not isinstance(rec.get(key), typ) or isinstance(rec.get(key), bool):
            raise ValueError(f"field {key!r} missing or not {typ.__name__}")
    return TrainPair(rec["source"], rec["target"], rec["error_id"], rec["error_line"],
                     str(rec.get("id", default_id)))


def load_corpus(path) -> Corpus:
    """Load pairs from a JSONL file or a ``pairs/NNN/{source.c,target.c,diag.json}`` tree.

    Malformed records are skipped with a warning; ``Corpus.skipped`` counts them.
    """
    path = Path(path)
    out = Corpus()
    if path.is_dir():
        root = path / "pairs" if (path / "pairs").is_dir() else path
        for d in sorted(p for p in root.iterdir() if p.is_dir()):
            try:
                diag = json.loads((d / "diag.json").read_text(encoding="utf-8"))
                rec = dict(diag, source=(d / "source.c").read_text(encoding="utf-8"),
                           target=(d / "target.c").read_text(encoding="utf-8"))
                out.append(_record_to_pair(rec, d.name))
            except (OSError, ValueError) as exc:
                log.warning("skipping %s: %s", d, exc)
                out.skipped += 1
        return out
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh):
            if not raw.strip():
                continue
            try:
                out.append(_record_to_pair(json.loads(raw), lineno))
            except ValueError as exc:
                log.warning("skipping record %d: %s", lineno, exc)
                out.skipped += 1
    return out


def write_corpus(pairs: Iterable[TrainPair], path):
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            rec = {"source": p.source, "target": p.target, "error_id": p.error_id,
                   "error_line": p.error_line}
            if p.pair_id is not None:
                rec["id"] = p.pair_id
            fh.write(json.dumps(rec) + "\n")
