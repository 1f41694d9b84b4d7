"""Apply predicted repair classes at predicted locations and keep what compiles better.

Edited lines are built as *index lists*: each item is either an ``int``
(a token kept from the source line) or a ``str`` (an inserted tag).  That
keeps the original lexemes around for concretization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .corpus import RepairClass, bigrams
from .features import encode
from .lang import (AbstractedLine, ConcretizationError, LexError, Recency, abstract_line,
                   abstract_program, build_symbol_table, concretize_token, render, split_program,
                   tokenize)
from .localizer import localize


@dataclass
class RepairCandidate:
    line_index: int
    line: AbstractedLine
    x: np.ndarray
    ranked: list
    profiles: dict = field(default_factory=dict)


@dataclass
class RepairSuggestion:
    abstract_line: tuple
    concrete_line: Optional[str]
    class_id: int
    rank: int
    compiled: bool
    line_index: int = -1
    error_count: Optional[int] = None
    partial: bool = False


@dataclass
class RepairOutcome:
    program: str
    initial_errors: int
    final_errors: int
    suggestions: list
    accepted: list

    @property
    def repaired(self):
        return self.final_errors == 0


def _tags(line) -> tuple:
    if isinstance(line, AbstractedLine):
        return line.tags
    return tuple(getattr(t, "tag", t) for t in line)


# ---------------------------------------------------------------------------
# location helpers

def candidate_lines(program, diagnostics) -> list[int]:
    """Each diagnostic line followed by its neighbours above and below, de-duplicated."""
    n = len(split_program(program))
    out: dict = {}
    for d in diagnostics:
        ln = getattr(d, "line", d)
        for c in (ln, ln - 1, ln + 1):
            if 0 <= c < n:
                out.setdefault(c, None)
    return list(out)


def flagged_bigram_set(line, profile) -> list[tuple[int, tuple]]:
    """Every occurrence ``(k, bigram)`` of a flagged bigram type, left to right."""
    if not profile:
        return []
    return [(k, b) for k, b in enumerate(bigrams(_tags(line))) if b in profile]


# ---------------------------------------------------------------------------
# class application (index-list form)

def _insert_points(n, occurrences) -> Iterator[int]:
    for k, _ in occurrences:
        yield k
        yield min(k + 1, n)
        yield min(k + 2, n)


def _insert_idx(n, insertions, occurrences) -> Iterator[list]:
    base = list(range(n))
    for p in _insert_points(n, occurrences):
        yield base[:p] + list(insertions) + base[p:]


def _scan_right_to_left(tags, tokens, occurrences, taken):
    """Positions hit by ``tokens`` scanned right to left; ``None`` where nothing matches."""
    n = len(tags)
    hits = []
    for tok in reversed(tokens):
        hit = None
        for k, _ in reversed(occurrences):
            for pos in (k, k + 1):
                if pos < n and pos not in taken and tags[pos] == tok:
                    hit = pos
                    break
            if hit is not None:
                break
        if hit is not None:
            taken.add(hit)
        hits.append(hit)
    hits.reverse()
    return hits


def _delete_idx(tags, deletions, occurrences):
    taken: set = set()
    hits = _scan_right_to_left(tags, deletions, occurrences, taken)
    partial = any(h is None for h in hits)
    return [i for i in range(len(tags)) if i not in taken], partial


def _replace_idx(tags, deletions, insertions, occurrences):
    taken: set = set()
    hits = _scan_right_to_left(tags, deletions, occurrences, taken)
    sub = {h: t for h, t in zip(hits, insertions) if h is not None}
    partial = any(h is None for h in hits)
    return [sub.get(i, i) for i in range(len(tags))], partial


def _misc_idx(tags, rc, occurrences) -> Iterator[tuple[list, bool]]:
    kept, partial = _delete_idx(tags, rc.deletions, occurrences)
    if not rc.insertions:
        yield kept, partial
        return
    # flagged occurrences re-located on the edited line: an original insertion
    # point p maps to the number of surviving tokens left of p
    kept_arr = np.array(kept, dtype=int)
    for p in _insert_points(len(tags), occurrences):
        q = int(np.searchsorted(kept_arr, p))
        yield kept[:q] + list(rc.insertions) + kept[q:], partial


def application_stream(line, rc: RepairClass, profile) -> Iterator[tuple[list, bool]]:
    """Candidate edits of ``line`` for class ``rc`` at flagged bigrams of ``profile``.

    Yields ``(index_list, partial)`` pairs; Insert and Misc classes give up
    to three candidates per flagged occurrence, Delete and Replace exactly one.
    """
    tags = _tags(line)
    occ = flagged_bigram_set(tags, profile)
    if not occ:
        return
    if rc.kind == "Insert":
        for idx in _insert_idx(len(tags), rc.insertions, occ):
            yield idx, False
    elif rc.kind == "Delete":
        yield _delete_idx(tags, rc.deletions, occ)
    elif rc.kind == "Replace":
        yield _replace_idx(tags, rc.deletions, rc.insertions, occ)
    else:
        yield from _misc_idx(tags, rc, occ)


def materialize(tags, idx) -> tuple:
    return tuple(tags[i] if isinstance(i, int) else i for i in idx)


# public tag-level wrappers -------------------------------------------------

def apply_insert(line, rc: RepairClass, occurrences) -> Iterator[tuple]:
    tags = _tags(line)
    for idx in _insert_idx(len(tags), rc.insertions, occurrences):
        yield materialize(tags, idx)


def apply_delete(line, rc: RepairClass, occurrences) -> tuple[tuple, bool]:
    """Edited line and whether some deletion token found no flagged occurrence."""
    tags = _tags(line)
    idx, partial = _delete_idx(tags, rc.deletions, occurrences)
    return materialize(tags, idx), partial


def apply_replace(line, rc: RepairClass, occurrences) -> tuple[tuple, bool]:
    tags = _tags(line)
    idx, partial = _replace_idx(tags, rc.deletions, rc.insertions, occurrences)
    return materialize(tags, idx), partial


def apply_misc(line, rc: RepairClass, occurrences) -> Iterator[tuple]:
    tags = _tags(line)
    for idx, _ in _misc_idx(tags, rc, occurrences):
        yield materialize(tags, idx)


def apply_class(line, rc: RepairClass, profile) -> list[tuple]:
    """All abstract candidate lines, in attempt order."""
    tags = _tags(line)
    return [materialize(tags, idx) for idx, _ in application_stream(tags, rc, profile)]


# ---------------------------------------------------------------------------
# concretization and substitution

class ProgramView:
    """A program with its symbol table and abstraction, rebuilt on demand."""

    def __init__(self, program):
        self.lines = split_program(program)
        self.table = build_symbol_table(self.lines)
        self.abstracted = abstract_program(self.lines, self.table)
        self.recency = Recency(self.abstracted)

    @property
    def text(self):
        return "\n".join(self.lines)

    def line(self, i) -> Optional[AbstractedLine]:
        return self.abstracted[i]

    def concretize(self, i, idx) -> Optional[str]:
        al = self.abstracted[i]
        lexemes = []
        for item in idx:
            if isinstance(item, int):
                lexemes.append(al.concrete[item].lexeme)
            else:
                try:
                    lexemes.append(concretize_token(item, self.table, self.recency, i))
                except ConcretizationError:
                    return None
        raw = self.lines[i]
        indent = raw[:len(raw) - len(raw.lstrip())]
        return indent + render(lexemes)

    def substitute(self, i, text) -> str:
        lines = list(self.lines)
        lines[i] = text
        return "\n".join(lines)


def _error_ids_by_line(diagnostics) -> dict:
    out: dict = {}
    for d in diagnostics:
        out.setdefault(d.line, d.error_id)
    return out


def _try_class(view, i, rc, profile, bridge, current_errors):
    """First candidate that lowers the error count, else the first candidate tried."""
    al = view.line(i)
    first = None
    for idx, partial in application_stream(al, rc, profile):
        concrete = view.concretize(i, idx)
        abstract = materialize(al.tags, idx)
        if concrete is None:
            if first is None:
                first = (abstract, None, None, partial)
            continue
        res = bridge(view.substitute(i, concrete))
        if res.error_count < current_errors:
            return (abstract, concrete, res, partial), True
        if first is None:
            first = (abstract, concrete, res, partial)
    return first, False


def prepare_candidate(view, i, error_id, bundle, k, rerank=True) -> Optional[RepairCandidate]:
    al = view.line(i)
    if al is None or len(al) == 0:
        return None
    x = encode(al, error_id, bundle.vocab)
    ranked = bundle.ranker(rerank).rank(x, k)
    return RepairCandidate(i, al, x, ranked)


def repair_program(program, bundle, bridge, k=5, rerank=True) -> RepairOutcome:
    """Iteratively repair ``program`` with the top-``k`` classes per candidate line.

    A substitution is accepted only if it strictly lowers the error count;
    after each acceptance diagnostics are refreshed and the search restarts.
    """
    view = ProgramView(program)
    res = bridge(view.text)
    initial = res.error_count
    suggestions, accepted = [], []
    while res.error_count > 0:
        eids = _error_ids_by_line(res.diagnostics)
        progress = False
        for i in candidate_lines(view.lines, res.diagnostics):
            eid = eids.get(i) or eids.get(i + 1) or eids.get(i - 1)
            cand = prepare_candidate(view, i, eid, bundle, k, rerank)
            if cand is None:
                continue
            for rank, rcl in enumerate(cand.ranked, 1):
                rc = bundle.catalog[rcl.class_id]
                profile = localize(cand.x, cand.line, rc.class_id, bundle.localizers, bundle.vocab)
                cand.profiles[rc.class_id] = profile
                got, ok = _try_class(view, i, rc, profile, bridge, res.error_count)
                if got is None:
                    continue
                abstract, concrete, cres, partial = got
                sug = RepairSuggestion(abstract, concrete, rc.class_id, rank,
                                       bool(cres is not None and cres.error_count == 0), i,
                                       None if cres is None else cres.error_count, partial)
                suggestions.append(sug)
                if ok:
                    accepted.append(sug)
                    view = ProgramView(view.substitute(i, concrete))
                    res = cres
                    progress = True
                    break
            if progress:
                break
        if not progress:
            break
    return RepairOutcome(view.text, initial, res.error_count, suggestions, accepted)


def suggest(program, line_index, error_id, bundle, bridge, k=5, rerank=True,
            gold_class: Optional[int] = None, gold_profile=None) -> list[Optional[RepairSuggestion]]:
    """One suggestion per top-``k`` class at a known repair line (the Pred@k protocol).

    ``gold_class`` (an ID or a :class:`RepairClass`, possibly unseen) replaces
    the ranking by that single class; ``gold_profile`` replaces localization.  Entries are ``None`` when a class yields no
    candidate at all.
    """
    view = ProgramView(program)
    al = view.line(line_index)
    if al is None:
        return []
    errors = bridge(view.text).error_count
    x = encode(al, error_id, bundle.vocab)
    if gold_class is not None:
        classes = [gold_class if isinstance(gold_class, RepairClass) else bundle.catalog[gold_class]]
    else:
        classes = [bundle.catalog[r.class_id] for r in bundle.ranker(rerank).rank(x, k)]
    out = []
    for rank, rc in enumerate(classes, 1):
        cid = rc.class_id
        profile = gold_profile if gold_profile is not None else localize(
            x, al, cid, bundle.localizers, bundle.vocab)
        got, _ = _try_class(view, line_index, rc, profile, bridge, errors)
        if got is None:
            out.append(None)
            continue
        abstract, concrete, cres, partial = got
        out.append(RepairSuggestion(abstract, concrete, cid, rank,
                                    bool(cres is not None and cres.error_count == 0), line_index,
                                    None if cres is None else cres.error_count, partial))
    return out


def gold_round_trip(line, rc: RepairClass, profile, target, view=None, line_index=None, bridge=None):
    """Whether gold class + gold profile reproduces ``target`` (abstract tags).

    With a ``view`` and ``bridge`` the candidate is chosen the way the engine
    chooses it (first compile-improving one); otherwise any candidate counts.
    """
    target = tuple(_tags(target))
    if view is None or bridge is None:
        return target in apply_class(line, rc, profile)
    errors = bridge(view.text).error_count
    got, _ = _try_class(view, line_index, rc, profile, bridge, errors)
    return got is not None and got[0] == target


def abstract_text_line(text: str, program, line_index) -> Optional[tuple]:
    """Abstract tags of ``text`` placed at ``line_index`` of ``program``."""
    try:
        toks = tokenize(text)
    except LexError:
        return None
    return abstract_line(toks, build_symbol_table(program), line_index).tags


__all__ = ["RepairCandidate", "RepairSuggestion", "RepairOutcome", "candidate_lines",
           "flagged_bigram_set", "apply_insert", "apply_delete", "apply_replace", "apply_misc",
           "apply_class", "application_stream", "ProgramView", "repair_program", "suggest",
           "gold_round_trip", "abstract_text_line"]
