"""
Training a repairer and fixing a program
========================================

Generates a fixture corpus with the built-in C checker, trains a model
bundle and repairs a program with two broken lines.
"""

import random

from compfix import repair_program, train_bundle
from compfix.bridge import MockCompiler
from compfix.synth import generate_buggy, generate_program

compiler = MockCompiler()

# 600 single-line buggy/fixed pairs; every diagnostic sits near the broken line
buggy = generate_buggy(600, seed=1, bridge=compiler)
print(buggy[0].pair.source.split("\n")[buggy[0].line], "->", buggy[0].pair.target_line)

# mining, vocabularies, ranking tree, prototypes and localizers in one call
bundle = train_bundle([b.pair for b in buggy])
print(f"{len(bundle.catalog)} repair classes, {bundle.vocab.size} features, {bundle.train_seconds:.2f}s")
for c in bundle.catalog.classes[:5]:
    print(f"  {c.count:4d}  {c}")

# break two statements of a fresh program
prog = generate_program(random.Random(21))
lines = list(prog.lines)
a = prog.kinds.index("zero")
b = prog.kinds.index("if_head")
lines[a] = lines[a].rstrip(";")
lines[b] = lines[b].replace(") {", " {")
broken = "\n".join(lines)
for d in compiler(broken).diagnostics:
    print(f"line {d.line}: {d.error_id} {d.message}")

# each accepted edit must lower the error count
out = repair_program(broken, bundle, compiler, k=5)
for s in out.accepted:
    print(f"line {s.line_index} rank {s.rank}: {s.concrete_line.strip()}  ({s.error_count} errors left)")
print("repaired:", out.repaired)

# a comma dropped from printf arguments is a class the corpus never shows
lines = list(prog.lines)
c = prog.kinds.index("printf_float")
lines[c] = lines[c].replace(", ", " ")
out = repair_program("\n".join(lines), bundle, compiler, k=5)
print("unseen class repaired:", out.repaired)
