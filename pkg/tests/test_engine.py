import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compfix.corpus import RepairClass, bigrams, mine_pair
from compfix.engine import (ProgramView, apply_class, apply_delete, apply_insert, apply_misc, apply_replace,
                            candidate_lines, flagged_bigram_set, gold_round_trip, repair_program, suggest)
from compfix.lang import EOL, tokenize
from compfix.synth import generate_program

VI = "VARIABLE_INT"
LI = "LITERAL_INT"


def same_tokens(a, b):
    return [[t.lexeme for t in tokenize(x)] for x in a.split("\n")] == \
        [[t.lexeme for t in tokenize(x)] for x in b.split("\n")]


def rc(kind, dels=(), ins=(), eid="E1"):
    return RepairClass(eid, tuple(dels), tuple(ins), kind)


# ---------------------------------------------------------------------------
# candidate lines

def test_candidate_lines_examples():
    prog = [""] * 10
    assert candidate_lines(prog, [3]) == [3, 2, 4]
    assert candidate_lines(prog, [0]) == [0, 1]
    assert candidate_lines(prog, [2, 3]) == [2, 1, 3, 4]
    assert candidate_lines(prog, [9]) == [9, 8]


# ---------------------------------------------------------------------------
# flagged bigrams

FIG1_LOOP = ("for", "(", VI, "=", LI, ",", VI, "<", VI, ",", VI, "++", ")")


def test_flagged_occurrences_repeat():
    occ = flagged_bigram_set(FIG1_LOOP, {(",", VI)})
    assert [k for k, _ in occ] == [5, 9]


def test_flagged_empty_and_absent():
    assert flagged_bigram_set(FIG1_LOOP, set()) == []
    assert flagged_bigram_set(FIG1_LOOP, {(";", ";")}) == []


def test_flagged_includes_eol():
    assert flagged_bigram_set((VI, "=", VI), {(VI, EOL)}) == [(2, (VI, EOL))]


# ---------------------------------------------------------------------------
# insert

def test_insert_for_header():
    line = ("for", "(", VI, "=", LI, ";", VI, "<", LI, ")")
    cls = rc("Insert", ins=(";", VI, "++"), eid="E6")
    cands = list(apply_insert(line, cls, flagged_bigram_set(line, {(LI, ")")})))
    assert len(cands) == 3
    assert ("for", "(", VI, "=", LI, ";", VI, "<", LI, ";", VI, "++", ")") in cands


def test_insert_missing_semicolon():
    line = (VI, "=", VI)
    cands = apply_class(line, rc("Insert", ins=(";",)), {(VI, EOL)})
    assert (VI, "=", VI, ";") in cands


def test_insert_single_token_line_gives_three():
    assert len(apply_class(("break",), rc("Insert", ins=(";",)), {("break", EOL)})) == 3


def test_insert_without_flags_gives_nothing():
    assert apply_class((VI, "=", VI), rc("Insert", ins=(";",)), set()) == []


# ---------------------------------------------------------------------------
# delete

TAB6_ROW3 = ("if", "(", VI, "==", VI, ")", "printf", "(", "LITERAL_STRING", ")", ";", "break", ";")


def test_delete_trailing_break():
    occ = flagged_bigram_set(TAB6_ROW3, {("break", ";")})
    out, partial = apply_delete(TAB6_ROW3, rc("Delete", dels=("break", ";")), occ)
    assert out == TAB6_ROW3[:11] and not partial


def test_delete_absent_token_is_partial():
    line = (VI, "=", VI, ";", ";")
    out, partial = apply_delete(line, rc("Delete", dels=(")",)), flagged_bigram_set(line, {(";", ";")}))
    assert out == line and partial


def test_delete_rightmost_occurrence():
    line = (VI, "=", VI, ";", VI, ";")
    occ = flagged_bigram_set(line, {(VI, ";")})
    out, _ = apply_delete(line, rc("Delete", dels=(";",)), occ)
    assert out == (VI, "=", VI, ";", VI)


# ---------------------------------------------------------------------------
# replace

def test_replace_assignment_in_condition():
    line = ("if", "(", VI, "=", LI, ")")
    out, partial = apply_replace(line, rc("Replace", ("=",), ("==",), "E45"),
                                 flagged_bigram_set(line, {(VI, "=")}))
    assert out == ("if", "(", VI, "==", LI, ")") and not partial


def test_replace_both_commas():
    out, _ = apply_replace(FIG1_LOOP, rc("Replace", (",", ","), (";", ";"), "E6"),
                           flagged_bigram_set(FIG1_LOOP, {(",", VI)}))
    assert out == tuple(";" if t == "," else t for t in FIG1_LOOP)


def test_replace_identity():
    line = (VI, "=", VI, ";")
    out, _ = apply_replace(line, rc("Replace", ("=",), ("=",)), flagged_bigram_set(line, {("=", VI)}))
    assert out == line


# ---------------------------------------------------------------------------
# misc

def test_misc_is_delete_then_insert():
    line = (VI, "=", "=", VI, ";")
    cls = rc("Misc", dels=("=", "="), ins=("==",))
    occ = flagged_bigram_set(line, {("=", "=")})
    deleted, _ = apply_delete(line, rc("Delete", dels=cls.deletions), occ)
    got = list(apply_misc(line, cls, occ))
    assert len(got) == 3
    assert (VI, "==", VI, ";") in got
    for cand in got:
        assert [t for t in cand if t != "=="] == list(deleted)


def test_misc_without_deletions_matches_insert():
    line = (VI, "=", VI)
    occ = flagged_bigram_set(line, {(VI, EOL)})
    assert list(apply_misc(line, rc("Misc", ins=(";",)), occ)) == list(apply_insert(line, rc("Insert", ins=(";",)), occ))


def test_misc_power_rewrite_does_not_compile(bridge):
    prog = "int main() {\n  int a, b, c;\n  c = a^2+b^2;\n  c = c 1;\n  return 0;\n}"
    view = ProgramView(prog)
    cls = rc("Misc", dels=("^", LI, "^", LI), ins=("*", VI, "*", VI), eid="E1")
    profile = {("^", LI), (VI, "^")}
    for cand in apply_class(view.line(2), cls, profile):
        assert cand != (VI, "=", VI, "*", VI, "+", VI, "*", VI, ";")


_TAGS = st.sampled_from([VI, LI, "=", ";", ",", "(", ")", "+"])


@settings(max_examples=150)
@given(st.lists(_TAGS, min_size=1, max_size=8), st.lists(_TAGS, max_size=3), st.lists(_TAGS, max_size=3),
       st.sampled_from(["Insert", "Delete", "Replace", "Misc"]), st.data())
def test_application_never_invents_tokens(line, dels, ins, kind, data):
    grams = bigrams(line)
    profile = set(data.draw(st.lists(st.sampled_from(grams), max_size=3)))
    if kind == "Replace":
        ins = ins[:len(dels)] + dels[len(ins):]
    allowed = set(line) | set(ins)
    for cand in apply_class(tuple(line), rc(kind, dels, ins), profile):
        assert set(cand) <= allowed
        assert len(cand) <= len(line) + len(ins)


# ---------------------------------------------------------------------------
# closed loop

def test_view_concretize_keeps_indent():
    view = ProgramView("int main() {\n    int n;\n    n = 1\n}")
    al = view.line(2)
    assert view.concretize(2, list(range(len(al))) + [";"]) == "    n=1;"


def test_gold_round_trip_on_training_pairs(buggy):
    hits = 0
    for b in buggy[:80]:
        m = mine_pair(b.pair)
        hits += gold_round_trip(m.line, m.repair_class, m.profile, m.target)
    assert hits == 80


def test_single_error_repaired(bundle, bridge):
    prog = generate_program(random.Random(3))
    lines = list(prog.lines)
    i = prog.kinds.index("zero")
    lines[i] = lines[i].rstrip(";")
    out = repair_program("\n".join(lines), bundle, bridge, k=5)
    assert out.initial_errors == 1 and out.repaired
    assert len(out.accepted) == 1 and out.accepted[0].compiled
    assert same_tokens(out.program, prog.text)


def test_two_independent_errors(bundle, bridge):
    prog = generate_program(random.Random(3))
    lines = list(prog.lines)
    a = prog.kinds.index("zero")
    b = len(prog.kinds) - 1 - prog.kinds[::-1].index("inc")
    assert abs(a - b) > 2
    lines[a] = lines[a].rstrip(";")
    lines[b] = lines[b].rstrip(";")
    out = repair_program("\n".join(lines), bundle, bridge, k=5)
    assert out.initial_errors >= 2 and out.repaired
    assert len(out.accepted) == 2
    counts = [out.initial_errors] + [s.error_count for s in out.accepted]
    assert all(x > y for x, y in zip(counts, counts[1:]))


def test_error_free_program_is_untouched(bundle, bridge):
    prog = generate_program(random.Random(5)).text
    out = repair_program(prog, bundle, bridge)
    assert out.repaired and out.suggestions == [] and out.program == prog


def test_suggest_gold_class_and_unseen_class(bundle, bridge, buggy):
    b = buggy[0]
    m = mine_pair(b.pair)
    cid = bundle.catalog.lookup(m.repair_class)
    sug = suggest(b.pair.source, b.pair.source_line, b.pair.error_id, bundle, bridge, gold_class=cid,
                  gold_profile=m.profile)
    assert len(sug) == 1 and sug[0].abstract_line == m.target
    unseen = rc("Insert", ins=("while",), eid="E99")
    sug = suggest(b.pair.source, b.pair.source_line, b.pair.error_id, bundle, bridge, gold_class=unseen,
                  gold_profile=m.profile)
    assert len(sug) == 1 and sug[0].class_id == -1


def test_suggest_top_k_length(bundle, bridge, buggy):
    b = buggy[1]
    sug = suggest(b.pair.source, b.pair.source_line, b.pair.error_id, bundle, bridge, k=3)
    assert len(sug) <= 3
    assert [s.rank for s in sug if s is not None] == sorted(s.rank for s in sug if s is not None)
