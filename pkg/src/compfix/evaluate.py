"""Metrics, the line-deletion baseline and the evaluation driver."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import MiningError, mine_pair
from .engine import ProgramView, repair_program, suggest
from .features import encode
from .localizer import hamming_loss, localize
from .ranker import order_classes

KS = (1, 3, 5)
HEAD_CUT = 60
TORSO_CUT = 120


def metric_pred_at_k(suggestions, gold_target, k) -> bool:
    gold = tuple(gold_target)
    return any(s is not None and tuple(s.abstract_line) == gold for s in list(suggestions)[:k])


def metric_rep_at_k(suggestions, bridge, program, k) -> bool:
    """True when one of the first ``k`` concrete suggestions compiles cleanly once substituted."""
    view = ProgramView(program)
    for s in list(suggestions)[:k]:
        if s is None or s.concrete_line is None:
            continue
        if bridge(view.substitute(s.line_index, s.concrete_line)).error_count == 0:
            return True
    return False


def metric_map(ranked_lists, gold_ids) -> float:
    """Mean reciprocal rank of the gold class; absent golds contribute 0."""
    rr = []
    for ranked, gold in zip(ranked_lists, gold_ids):
        ranked = list(ranked)
        rr.append(1.0 / (ranked.index(gold) + 1) if gold in ranked else 0.0)
    return float(np.mean(rr)) if rr else 0.0


@dataclass(frozen=True)
class KaliResult:
    repaired: bool
    deleted: tuple
    program: str


def baseline_kali(program, diagnostics, bridge) -> KaliResult:
    """Blank out every line that carries a diagnostic and recompile."""
    view = ProgramView(program)
    flagged = sorted({d.line for d in diagnostics})
    lines = [("" if i in flagged else ln) for i, ln in enumerate(view.lines)]
    text = "\n".join(lines)
    return KaliResult(bridge(text).error_count == 0, tuple(flagged), text)


def stratum(class_id: Optional[int]) -> str:
    if class_id is None:
        return "unseen"
    if class_id < HEAD_CUT:
        return "head"
    if class_id < TORSO_CUT:
        return "torso"
    return "tail"


@dataclass
class EvalReport:
    n_programs: int = 0
    n_dropped: int = 0
    pred_at_k: dict = field(default_factory=dict)
    rep_at_k: dict = field(default_factory=dict)
    top_at_k: dict = field(default_factory=dict)
    top_error_id_at_k: dict = field(default_factory=dict)
    top_tokens_at_k: dict = field(default_factory=dict)
    map: float = 0.0
    hamming: float = 0.0
    kali_pred_at_1: float = 0.0
    kali_rep: float = 0.0
    per_class: list = field(default_factory=list)
    class_counts: list = field(default_factory=list)
    strata: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def to_dict(self, timing=True) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "timing"}
        for key in ("pred_at_k", "rep_at_k", "top_at_k", "top_error_id_at_k", "top_tokens_at_k"):
            d[key] = {str(k): v for k, v in d[key].items()}
        if timing:
            d["timing"] = dict(self.timing)
        return d

    def tables(self) -> str:
        rows = [f"programs evaluated: {self.n_programs} (dropped {self.n_dropped})",
                "metric        " + "".join(f"   @{k}" for k in sorted(self.pred_at_k))]
        for name, table in (("Pred", self.pred_at_k), ("Rep", self.rep_at_k), ("Top class", self.top_at_k),
                            ("Top errorID", self.top_error_id_at_k), ("Top tokens", self.top_tokens_at_k)):
            if table:
                rows.append(f"{name:<14}" + "".join(f" {table[k]:.3f}" for k in sorted(table)))
        rows.append(f"MAP {self.map:.3f}   mean Hamming {self.hamming:.3f}")
        rows.append(f"line-deletion baseline: Pred@1 {self.kali_pred_at_1:.3f}  Rep {self.kali_rep:.3f}")
        for name in ("head", "torso", "tail", "unseen"):
            s = self.strata.get(name)
            if s and s["n"]:
                rates = "  ".join(f"{k.replace('_at_', '@').capitalize()} {v:.3f}"
                                  for k, v in s.items() if k != "n")
                rows.append(f"{name:<7} n={s['n']:<5} {rates}")
        if self.timing:
            rows.append("timing: " + ", ".join(f"{k} {v:.4f}s" for k, v in sorted(self.timing.items())))
        return "\n".join(rows)


def evaluate(bundle, pairs, bridge, ks=KS, rerank=True, gold_class=False, gold_profile=False) -> EvalReport:
    """Score ``bundle`` on single-line test ``pairs``.

    Pred@k uses the gold repair line; Rep@k runs the full repair loop once
    with the largest ``k`` and counts a hit at ``k`` when the program ends
    error-free using only classes ranked at most ``k``.
    """
    ks = tuple(sorted(ks))
    kmax = ks[-1]
    ranker = bundle.ranker(rerank)
    pred = {k: [] for k in ks}
    rep = {k: [] for k in ks}
    top = {k: [] for k in ks}
    top_eid = {k: [] for k in ks}
    top_tok = {k: [] for k in ks}
    rr, ham, kali_pred, kali_rep = [], [], [], []
    per_class: dict = {}
    dropped = 0
    t_pred = []
    for pair in pairs:
        try:
            mined = mine_pair(pair)
        except MiningError:
            dropped += 1
            continue
        line = pair.source_line
        gold = mined.repair_class
        gold_id = bundle.catalog.lookup(gold)
        t0 = time.perf_counter()
        x = encode(mined.line, pair.error_id, bundle.vocab)
        S = ranker.score_matrices(x)[0][0]
        order = order_classes(S, ranker.counts)
        rr.append(1.0 / (order.index(gold_id) + 1) if gold_id is not None else 0.0)
        for k in ks:
            head = [bundle.catalog[c] for c in order[:k]]
            top[k].append(gold_id is not None and gold_id in order[:k])
            top_eid[k].append(any(c.error_id == gold.error_id for c in head))
            top_tok[k].append(any((c.deletions, c.insertions) == (gold.deletions, gold.insertions)
                                  for c in head))
        if gold_id is not None:
            prof = localize(x, mined.line, gold_id, bundle.localizers, bundle.vocab)
            ham.append(hamming_loss(prof, mined.profile))
        gc = (gold if gold_id is None else gold_id) if gold_class else None
        sugg = suggest(pair.source, line, pair.error_id, bundle, bridge, kmax, rerank,
                       gold_class=gc, gold_profile=mined.profile if gold_profile else None)
        outcome = repair_program(pair.source, bundle, bridge, kmax, rerank)
        t_pred.append(time.perf_counter() - t0)
        need = max((s.rank for s in outcome.accepted), default=0)
        for k in ks:
            pred[k].append(metric_pred_at_k(sugg, mined.target, k))
            rep[k].append(outcome.repaired and need <= k)
        diags = bridge(pair.source).diagnostics
        kali = baseline_kali(pair.source, diags, bridge)
        kali_rep.append(kali.repaired)
        kali_pred.append(() == mined.target if line in kali.deleted else mined.line.tags == mined.target)
        rec = per_class.setdefault(gold_id, {"class_id": gold_id, "label": str(gold),
                                             "train_count": bundle.catalog[gold_id].count if gold_id is not None else 0,
                                             "n": 0, "pred_hits": 0, "rep_hits": 0})
        rec["n"] += 1
        rec["pred_hits"] += int(pred[ks[0]][-1])
        rec["rep_hits"] += int(rep[kmax][-1])

    rate = lambda v: float(np.mean(v)) if v else 0.0  # noqa: E731
    rep_out = EvalReport(
        n_programs=len(rr), n_dropped=dropped,
        pred_at_k={k: rate(pred[k]) for k in ks}, rep_at_k={k: rate(rep[k]) for k in ks},
        top_at_k={k: rate(top[k]) for k in ks}, top_error_id_at_k={k: rate(top_eid[k]) for k in ks},
        top_tokens_at_k={k: rate(top_tok[k]) for k in ks},
        map=rate(rr), hamming=rate(ham), kali_pred_at_1=rate(kali_pred), kali_rep=rate(kali_rep),
        settings={"rerank": rerank, "gold_class": gold_class, "gold_profile": gold_profile, "ks": list(ks)},
        timing={"train_seconds": float(bundle.train_seconds), "predict_seconds_mean": rate(t_pred)},
    )
    rows = sorted(per_class.values(), key=lambda r: (r["class_id"] is None, r["class_id"] or 0))
    rep_out.per_class = rows
    rep_out.class_counts = list(bundle.catalog.counts())
    strata: dict = {}
    for r in rows:
        s = strata.setdefault(stratum(r["class_id"]), {"n": 0, "pred": 0, "rep": 0})
        s["n"] += r["n"]
        s["pred"] += r["pred_hits"]
        s["rep"] += r["rep_hits"]
    rep_out.strata = {name: {"n": s["n"], f"pred_at_{ks[0]}": s["pred"] / s["n"],
                             f"rep_at_{kmax}": s["rep"] / s["n"]} for name, s in strata.items()}
    return rep_out


__all__ = ["metric_pred_at_k", "metric_rep_at_k", "metric_map", "baseline_kali", "KaliResult",
           "EvalReport", "evaluate", "stratum", "KS"]
