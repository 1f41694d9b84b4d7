import json

import pytest

from compfix.corpus import mine_pair
from compfix.engine import ProgramView, RepairSuggestion, gold_round_trip
from compfix.evaluate import (baseline_kali, evaluate, metric_map, metric_pred_at_k, metric_rep_at_k,
                              stratum)


def sug(tags, concrete=None, line=0, rank=1):
    return RepairSuggestion(tuple(tags), concrete, 0, rank, False, line)


GOLD = ("VARIABLE_INT", "=", "LITERAL_INT", ";")
OTHER = ("VARIABLE_INT", "=", "VARIABLE_INT", ";")


def test_pred_rank_one_hit():
    assert metric_pred_at_k([sug(GOLD)], GOLD, 1)


def test_pred_rank_four():
    s = [sug(OTHER)] * 3 + [sug(GOLD)]
    assert not metric_pred_at_k(s, GOLD, 3)
    assert metric_pred_at_k(s, GOLD, 5)


def test_compiling_but_different_fix(bridge):
    prog = "int main() {\n  int n;\n  n = \n  return 0;\n}"
    s = [sug(OTHER, "  n = n;", line=2)]
    assert not metric_pred_at_k(s, GOLD, 1)
    assert metric_rep_at_k(s, bridge, prog, 1)


def test_rep_skips_missing_concretization(bridge):
    prog = "int main() {\n  int n;\n  n = \n  return 0;\n}"
    s = [None, sug(OTHER, None, line=2), sug(GOLD, "  n = 0;", line=2, rank=3)]
    assert not metric_rep_at_k(s, bridge, prog, 2)
    assert metric_rep_at_k(s, bridge, prog, 3)


def test_map_examples():
    assert metric_map([[3, 1], [3, 1]], [3, 3]) == 1.0
    assert metric_map([[3, 1], [3, 1]], [3, 1]) == 0.75
    assert metric_map([[3, 1]], [9]) == 0.0
    assert metric_map([], []) == 0.0


def test_kali_lone_printf_line(bridge):
    prog = 'int main() {\n  int a = 1;\n  printf("%d\\n", a;\n  return 0;\n}'
    res = bridge(prog)
    out = baseline_kali(prog, res.diagnostics, bridge)
    assert out.repaired and out.deleted == (2,)
    # deleting the line is never the student's fix
    m_target = ("printf", "(", "LITERAL_STRING_FMT_INT", ",", "VARIABLE_INT", ")", ";")
    assert ProgramView(out.program).line(2).tags != m_target


def test_kali_brace_line(bridge):
    prog = "int main() {\n  int a = 1;\n  if (a > 0 {\n    a = 2;\n  }\n  return 0;\n}"
    res = bridge(prog)
    assert res.error_count >= 1
    assert not baseline_kali(prog, res.diagnostics, bridge).repaired


def test_kali_error_free(bridge):
    prog = "int main() {\n  return 0;\n}"
    out = baseline_kali(prog, bridge(prog).diagnostics, bridge)
    assert out.repaired and out.deleted == ()


@pytest.mark.parametrize("cid,name", [(None, "unseen"), (0, "head"), (59, "head"), (60, "torso"),
                                      (119, "torso"), (120, "tail")])
def test_strata(cid, name):
    assert stratum(cid) == name


@pytest.fixture(scope="module")
def report(bundle, buggy, bridge):
    return evaluate(bundle, [b.pair for b in buggy[:60]], bridge)


def test_report_rates_and_monotonicity(report):
    for table in (report.pred_at_k, report.rep_at_k, report.top_at_k):
        vals = [table[k] for k in sorted(table)]
        assert all(0 <= v <= 1 for v in vals)
        assert vals == sorted(vals)
    assert report.n_programs == 60


def test_memorization_on_training_inputs(report):
    assert report.pred_at_k[1] >= 0.9
    assert report.kali_pred_at_1 <= 0.1


def test_report_is_deterministic(bundle, buggy, bridge, report):
    again = evaluate(bundle, [b.pair for b in buggy[:60]], bridge)
    a = json.dumps(report.to_dict(timing=False), sort_keys=True)
    b = json.dumps(again.to_dict(timing=False), sort_keys=True)
    assert a == b
    assert "timing" in report.to_dict() and "timing" not in report.to_dict(timing=False)


def test_tables_render(report):
    text = report.tables()
    assert "Pred" in text and "MAP" in text and "head" in text


def test_rerank_off_map_not_better(bundle, buggy, bridge, report):
    off = evaluate(bundle, [b.pair for b in buggy[:60]], bridge, rerank=False)
    assert report.map >= off.map


def test_gold_mode_equals_round_trip_oracle(bundle, buggy, bridge):
    pairs = [b.pair for b in buggy[:40]]
    rep = evaluate(bundle, pairs, bridge, ks=(1,), gold_class=True, gold_profile=True)
    oracle = 0
    for p in pairs:
        m = mine_pair(p)
        oracle += gold_round_trip(m.line, m.repair_class, m.profile, m.target, ProgramView(p.source),
                                  p.source_line, bridge)
    assert rep.pred_at_k[1] == pytest.approx(oracle / len(pairs))


def test_dropped_pairs_are_counted(bundle, buggy, bridge):
    p = buggy[0].pair
    noop = type(p)(p.source, p.source, p.error_id, p.error_line)
    rep = evaluate(bundle, [p, noop], bridge, ks=(1,))
    assert rep.n_programs == 1 and rep.n_dropped == 1
