"""Command-line entry points: synth, mine, train, repair, eval, report."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from .bridge import BridgeError, make_bridge

EXIT_OK, EXIT_USAGE, EXIT_BRIDGE = 0, 2, 3

log = logging.getLogger("compfix")


class UsageError(Exception):
    pass


def _need(path, what):
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{what} not found: {p}")
    return p


def _bridge(spec):
    try:
        return make_bridge(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load_bundle(path):
    from .bundle import ModelBundle
    return ModelBundle.load(_need(path, "bundle"))


def _ks(kmax):
    if kmax < 1:
        raise UsageError("--k must be at least 1")
    return tuple(sorted({k for k in (1, 3, 5) if k <= kmax} | {kmax}))


def _ablate(values):
    rr = True
    for v in values or []:
        key, _, val = v.partition("=")
        if key != "rr" or val not in ("on", "off"):
            raise UsageError(f"bad --ablate value {v!r}; expected rr=on or rr=off")
        rr = val == "on"
    return rr


# ---------------------------------------------------------------------------
# commands

def cmd_synth(args):
    from .corpus import write_corpus
    from .synth import generate_pairs
    pairs = generate_pairs(args.n, seed=args.seed, bridge=_bridge(args.compiler))
    write_corpus(pairs, args.out)
    print(f"wrote {len(pairs)} pairs to {args.out}")


def cmd_mine(args):
    from .corpus import load_corpus, mine_corpus
    pairs = load_corpus(_need(args.corpus, "corpus"))
    mined = mine_corpus(pairs)
    kinds = Counter(c.kind for c in mined.catalog)
    print(f"pairs {len(pairs)} (skipped {pairs.skipped}), mined {len(mined.examples)}, "
          f"dropped {mined.dropped}, classes {len(mined.catalog)}")
    print("kinds: " + ", ".join(f"{k} {kinds[k]}" for k in ("Insert", "Delete", "Replace", "Misc")))
    for c in mined.catalog.classes[:args.top]:
        print(f"{c.class_id:>5} {c.count:>6}  {c.kind:<8} {c}")
    if args.out:
        Path(args.out).write_text(json.dumps(mined.catalog.to_records(), indent=1), encoding="utf-8")


def cmd_train(args):
    from .bundle import train_bundle
    from .corpus import load_corpus
    from .ranker import TrainConfig
    cfg = {}
    if args.config:
        cfg = json.loads(_need(args.config, "config").read_text(encoding="utf-8"))
    cfg["seed"] = args.seed
    pairs = load_corpus(_need(args.corpus, "corpus"))
    if not pairs:
        raise UsageError("corpus has no usable records")
    bundle = train_bundle(pairs, TrainConfig.from_dict(cfg))
    bundle.save(args.bundle)
    print(f"trained on {len(pairs)} pairs: {len(bundle.catalog)} classes, "
          f"{bundle.vocab.size} features, {bundle.train_seconds:.1f}s -> {args.bundle}")


def cmd_repair(args):
    from .engine import repair_program
    bundle = _load_bundle(args.bundle)
    bridge = _bridge(args.compiler)
    rerank = _ablate(args.ablate)
    log_fh = open(args.log, "w", encoding="utf-8") if args.log else None
    try:
        for path in args.programs:
            text = _need(path, "program").read_text(encoding="utf-8").rstrip("\n")
            out = repair_program(text, bundle, bridge, args.k, rerank)
            status = "repaired" if out.repaired else f"{out.final_errors} error(s) left"
            print(f"== {path}: {out.initial_errors} -> {out.final_errors} errors ({status})")
            if args.print_program:
                print(out.program)
            for s in out.suggestions:
                rec = {"program_id": str(path), "line": s.line_index, "rank": s.rank,
                       "class": str(bundle.catalog[s.class_id]), "abstract_fix": " ".join(s.abstract_line),
                       "concrete_fix": s.concrete_line, "compiled": s.compiled}
                if log_fh:
                    log_fh.write(json.dumps(rec) + "\n")
            if args.write and out.accepted:
                Path(path).with_suffix(".fixed.c").write_text(out.program + "\n", encoding="utf-8")
    finally:
        if log_fh:
            log_fh.close()


def cmd_eval(args):
    from .corpus import load_corpus
    from .evaluate import evaluate
    bundle = _load_bundle(args.bundle)
    bridge = _bridge(args.compiler)
    pairs = load_corpus(_need(args.corpus, "corpus"))
    report = evaluate(bundle, pairs, bridge, _ks(args.k), _ablate(args.ablate),
                      args.gold_class, args.gold_profile)
    report.settings["seed"] = args.seed
    print(report.tables())
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=1, sort_keys=True), encoding="utf-8")


def cmd_report(args):
    from .plots import write_plots
    data = json.loads(_need(args.eval, "evaluation report").read_text(encoding="utf-8"))
    for p in write_plots(data, args.out):
        print(p)


def build_parser():
    ap = argparse.ArgumentParser(prog="compfix", description="Repair single-line compilation errors.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, bundle=False, compiler=False):
        p.add_argument("--seed", type=int, default=42)
        if bundle:
            p.add_argument("--bundle", required=True, help="model bundle directory")
        if compiler:
            p.add_argument("--compiler", default="mock", help="mock or external:<command>")

    p = sub.add_parser("synth", help="generate a fixture corpus of buggy/fixed pairs")
    common(p, compiler=True)
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("mine", help="mine repair classes and print the catalog")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--top", type=int, default=40)
    p.add_argument("--out", help="write the class catalog as JSON")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("train", help="train a model bundle")
    common(p, bundle=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", help="JSON file with training settings")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("repair", help="repair C programs")
    common(p, bundle=True, compiler=True)
    p.add_argument("programs", nargs="+")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--ablate", action="append", metavar="rr=on|off")
    p.add_argument("--log", help="JSONL suggestion log")
    p.add_argument("--write", action="store_true", help="write <name>.fixed.c next to each input")
    p.add_argument("--print-program", action="store_true")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("eval", help="evaluate a bundle on a test corpus")
    common(p, bundle=True, compiler=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--ablate", action="append", metavar="rr=on|off")
    p.add_argument("--gold-class", action="store_true")
    p.add_argument("--gold-profile", action="store_true")
    p.add_argument("--report", help="write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="plot an evaluation report as SVG")
    p.add_argument("--eval", required=True, help="report JSON written by eval --report")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BridgeError as exc:
        print(f"compiler error: {exc}", file=sys.stderr)
        return EXIT_BRIDGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
