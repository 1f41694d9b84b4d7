"""Synthetic C programs with one injected single-line bug each.

Programs are assembled from statement templates whose placeholders name
typed variables (``{S}`` is an int accumulator, ``{F}`` a float, ...).  A
mutation swaps one line for a broken variant of its template; the gold fix
is the original line.  Contexts are type-consistent so that classes stay
separable from the abstracted line alone.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .corpus import ClassCatalog, RepairClass, TrainPair

NAME_POOLS = {
    "N": ["n", "num", "len", "size", "total"],
    "I": ["i", "j", "k", "idx", "p"],
    "S": ["s", "sum", "acc", "res", "tot"],
    "X": ["x", "m", "val", "cur", "lo"],
    "Y": ["y", "q", "w", "z", "hi"],
    "F": ["f", "avg", "mean", "r", "ratio"],
    "G": ["g", "h", "scale", "step", "dx"],
    "C": ["c", "ch", "key", "op", "sym"],
    "D": ["d", "e", "letter", "grade", "t"],
    "A": ["a", "arr", "v", "nums", "data"],
}

# kind -> (template, {mutation name: broken template})
LINES = {
    "decl_int": ("int {N}, {I}, {S} = 0, {X}, {Y};", {"semi": "int {N}, {I}, {S} = 0, {X}, {Y}"}),
    "decl_float": ("float {F} = 0.0, {G} = 1.5;", {}),
    "decl_char": ("char {C} = 'a', {D} = 'b';", {}),
    "decl_arr": ("int {A}[100];", {}),
    "scanf_n": ('scanf("%d", &{N});', {"semi": 'scanf("%d", &{N})', "rparen": 'scanf("%d", &{N};'}),
    "for_head": ("for ({I} = 0; {I} < {N}; {I}++) {{", {
        "commas2": "for ({I} = 0, {I} < {N}, {I}++) {{",
        "comma1": "for ({I} = 0, {I} < {N}; {I}++) {{",
        "noinc": "for ({I} = 0; {I} < {N}) {{",
        "nosemi": "for ({I} = 0 {I} < {N}; {I}++) {{",
        "nolit": "for ({I} = ; {I} < {N}; {I}++) {{",
    }),
    "scanf_arr": ('scanf("%d", &{A}[{I}]);', {"nobracket": 'scanf("%d", &{A}[{I});'}),
    "sum_arr": ("{S} = {S} + {A}[{I}];", {
        "typo_arr": "{S} = {S} + {tA}[{I}];",
        "bracket_paren": "{S} = {S} + {A}[{I});",
        "double_bracket": "{S} = {S} + {A}[[{I}];",
    }),
    "if_head": ("if ({S} > {X}) {{", {
        "noopen": "if {S} > {X}) {{",
        "noclose": "if ({S} > {X} {{",
        "extraopen": "if (({S} > {X}) {{",
        "nooperand": "if ({S} > ) {{",
    }),
    "printf_int": ('printf("%d\\n", {S});', {
        "semi": 'printf("%d\\n", {S})',
        "typo": 'printf("%d\\n", {tS});',
        "nocomma": 'printf("%d\\n" {S});',
        "extrarparen": 'printf("%d\\n", {S}));',
        "extracomma": 'printf("%d\\n", , {S});',
    }),
    "while_head": ("while ({X} < {N}) {{", {"noopen": "while {X} < {N}) {{"}),
    "inc": ("{X} = {X} + 1;", {
        "typo": "{X} = {tX} + 1;",
        "trailing_plus": "{X} = {X} + 1 +;",
        "eqeq": "{X} == {X} + 1;",
        "noplus": "{X} = {X} 1;",
    }),
    "zero": ("{Y} = 0;", {"swap": "0 = {Y};"}),
    "float_sum": ("{F} = {F} + {G};", {
        "semi": "{F} = {F} + {G}",
        "typo": "{F} = {F} + {tG};",
        "nooperand": "{F} = {F} + ;",
    }),
    "float_mul": ("{G} = {G} * 2.5;", {"nolit": "{G} = {G} * ;", "trailing_star": "{G} = {G} * 2.5 *;",
                                       "nostar": "{G} = {G} 2.5;"}),
    "char_copy": ("{C} = {D};", {"typo": "{C} = {tD};"}),
    "char_if": ("if ({C} == 'x') {{", {"nolit": "if ({C} == ) {{"}),
    "sum_plain": ("{S} = {S} + {X};", {"nooperand": "{S} = {S} + ;"}),
    "paren": ("{Y} = ({S} + {X}) * 2;", {
        "extrarparen": "{Y} = ({S} + {X}) * 2);",
        "noclose": "{Y} = ({S} + {X} * 2;",
        "doubleeq": "{Y} = = ({S} + {X}) * 2;",
    }),
    "break": ("break;", {"semi": "break"}),
    "tail": ("{Y} = {Y} - 1;", {"stray_break": "{Y} = {Y} - 1; break;",
                                "stray_continue": "{Y} = {Y} - 1; continue;"}),
    "case": ("case 1:", {"semi": "case 1;"}),
    "do_tail": ("}} while ({X} > 0);", {"semi": "}} while ({X} > 0)"}),
    "return": ("return 0;", {"semi": "return 0"}),
    "if_and": ("if ({X} > 0 && {Y} < {N}) {{", {"noand": "if ({X} > 0 {Y} < {N}) {{"}),
    "printf_float": ('printf("%f\\n", {F});', {}),
    "printf_char": ('printf("%c\\n", {C});', {}),
}

MUTATIONS = [(kind, name) for kind, (_, muts) in LINES.items() for name in muts]

# body blocks: lists of (depth offset, kind); "}" closes a block
BLOCKS = [
    [(0, "for_head"), (1, "scanf_arr"), (0, "}")],
    [(0, "for_head"), (1, "sum_arr"), (0, "}")],
    [(0, "if_head"), (1, "printf_int"), (0, "}")],
    [(0, "while_head"), (1, "inc"), (1, "if_and"), (2, "break"), (1, "}"), (0, "}")],
    [(0, "float_sum"), (0, "float_mul"), (0, "printf_float")],
    [(0, "char_copy"), (0, "char_if"), (1, "printf_char"), (0, "}")],
    [(0, "sum_plain"), (0, "paren"), (0, "zero")],
    [(0, "switch"), (1, "case"), (2, "inc"), (2, "break"), (1, "default"), (2, "zero"), (0, "}")],
    [(0, "do"), (1, "inc"), (0, "do_tail")],
    [(0, "tail")],
]
_FIXED = {"switch": "switch ({X}) {{", "default": "default:", "do": "do {{", "}": "}}"}


@dataclass
class Program:
    lines: list
    kinds: list
    names: dict

    @property
    def text(self):
        return "\n".join(self.lines)


def _typo(name, taken):
    for cand in (name[:-1] if len(name) > 1 else "", name + "1", name + "_v", name + "zz"):
        if cand and cand not in taken:
            return cand
    raise ValueError(f"no free typo for {name}")


def _names(rng: random.Random) -> dict:
    used: set = set()
    names = {}
    for role, pool in NAME_POOLS.items():
        choice = rng.choice([p for p in pool if p not in used])
        used.add(choice)
        names[role] = choice
    for role in list(names):
        names["t" + role] = _typo(names[role], used)
    return names


def generate_program(rng: random.Random) -> Program:
    """A compiling program containing every line kind at least once."""
    names = _names(rng)
    lines, kinds = ["#include <stdio.h>", "int main() {"], [None, None]
    header = ["decl_int", "decl_float", "decl_char", "decl_arr", "scanf_n"]
    body = list(BLOCKS)
    rng.shuffle(body)
    for k in header:
        lines.append("    " + LINES[k][0].format(**names))
        kinds.append(k)
    for block in body:
        for depth, k in block:
            tmpl = _FIXED.get(k) or LINES[k][0]
            lines.append("    " * (depth + 1) + tmpl.format(**names))
            kinds.append(k if k in LINES else None)
    lines += ["    " + LINES["return"][0], "}"]
    kinds += ["return", None]
    return Program(lines, kinds, names)


def mutate(program: Program, kind, name, rng: random.Random):
    """Program text with one ``kind`` line broken by mutation ``name``; ``(text, line)``."""
    sites = [i for i, k in enumerate(program.kinds) if k == kind]
    i = rng.choice(sites)
    raw = program.lines[i]
    indent = raw[:len(raw) - len(raw.lstrip())]
    lines = list(program.lines)
    lines[i] = indent + LINES[kind][1][name].format(**program.names)
    return "\n".join(lines), i


@dataclass
class BuggyProgram:
    pair: TrainPair
    mutation: tuple
    line: int


def generate_buggy(n, seed=0, bridge=None, mutations=None, weights=None) -> list[BuggyProgram]:
    """``n`` single-line buggy programs whose diagnostics all fall near the broken line.

    The first diagnostic supplies ``error_id`` and ``error_line``.  Mutations
    whose diagnostics land elsewhere are resampled.
    """
    from .bridge import MockCompiler
    bridge = bridge or MockCompiler()
    rng = random.Random(seed)
    mutations = list(mutations or MUTATIONS)
    out = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 50 * n + 100:
            raise RuntimeError("mutations keep producing unusable programs")
        prog = generate_program(rng)
        kind, name = rng.choices(mutations, weights=weights)[0]
        text, line = mutate(prog, kind, name, rng)
        res = bridge(text)
        if res.error_count == 0 or any(abs(d.line - line) > 1 for d in res.diagnostics):
            continue
        d0 = res.diagnostics[0]
        pair = TrainPair(text, prog.text, d0.error_id, d0.line, f"{seed}-{len(out)}")
        out.append(BuggyProgram(pair, (kind, name), line))
    return out


def generate_pairs(n, seed=0, bridge=None, **kw) -> list[TrainPair]:
    return [b.pair for b in generate_buggy(n, seed, bridge, **kw)]


# ---------------------------------------------------------------------------
# heavy-tailed feature-level corpus (for reranking experiments)

@dataclass
class SyntheticSet:
    catalog: ClassCatalog
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray


def zipf_counts(n_classes, n_head, exponent=1.1, tail_max=3):
    """Zipf-shaped class counts from ``n_head`` down; the last 40% capped at ``tail_max``."""
    ranks = np.arange(1, n_classes + 1)
    counts = np.maximum(np.round(n_head / ranks ** exponent), 1).astype(int)
    cut = int(n_classes * 0.6)
    counts[cut:] = np.minimum(counts[cut:], tail_max)
    return counts


def heavy_tailed_set(n_classes=100, n_head=300, dim=120, n_error_ids=6, shared_bits=8,
                     own_bits=3, flips=3, test_per_class=10, seed=0) -> SyntheticSet:
    """Binary feature vectors drawn around overlapping per-class patterns.

    Classes sharing an error ID share ``shared_bits`` token bits and differ
    in ``own_bits`` more, mimicking lines that look alike but need different
    edits.  Each point flips ``flips`` random token bits.  Test points come
    from the same generator, ``test_per_class`` per class.
    """
    rng = np.random.default_rng(seed)
    counts = zipf_counts(n_classes, n_head)
    kinds = ["Insert", "Delete", "Replace"]
    vocab = [f"T{i}" for i in range(12)]
    n_tok = dim - n_error_ids
    bases = [n_error_ids + rng.choice(n_tok, shared_bits, replace=False) for _ in range(n_error_ids)]
    classes, patterns, seen = [], [], set()
    for c in range(n_classes):
        while True:
            eid = int(rng.integers(n_error_ids))
            kind = kinds[int(rng.integers(3))]
            nd = 0 if kind == "Insert" else int(rng.integers(1, 3))
            ni = 0 if kind == "Delete" else (nd if kind == "Replace" else int(rng.integers(1, 3)))
            dels = tuple(rng.choice(vocab, nd).tolist())
            ins = tuple(rng.choice(vocab, ni).tolist())
            key = (f"E{eid}", dels, ins)
            if key not in seen:
                seen.add(key)
                break
        classes.append(RepairClass(key[0], dels, ins, kind, c, int(counts[c])))
        p = np.zeros(dim)
        p[eid] = 1
        p[bases[eid]] = 1
        p[n_error_ids + rng.choice(n_tok, own_bits, replace=False)] = 1
        patterns.append(p)

    def sample(c, m):
        base = np.repeat(patterns[c][None, :], m, axis=0)
        for row in base:
            idx = n_error_ids + rng.choice(n_tok, flips, replace=False)
            row[idx] = 1 - row[idx]
        return base

    Xtr = np.vstack([sample(c, counts[c]) for c in range(n_classes)])
    ytr = np.concatenate([np.full(counts[c], c) for c in range(n_classes)])
    Xte = np.vstack([sample(c, test_per_class) for c in range(n_classes)])
    yte = np.repeat(np.arange(n_classes), test_per_class)
    return SyntheticSet(ClassCatalog(classes), Xtr, ytr, Xte, yte)


__all__ = ["LINES", "MUTATIONS", "Program", "generate_program", "mutate", "BuggyProgram",
           "generate_buggy", "generate_pairs", "SyntheticSet", "zipf_counts", "heavy_tailed_set"]
