"""Lexing, declaration-type inference and token abstraction for a C subset.

A source line is lexed into :class:`ConcreteToken` objects, then every
identifier and literal is replaced by a type-tagged abstract token::

    int abc = 0;   ->   int VARIABLE_INT = LITERAL_INT ;

Identifiers with no visible declaration become ``INVALID``.  The reverse
direction (picking a concrete lexeme for an abstract tag) is
:func:`concretize_token`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

KEYWORDS = frozenset("""
    auto break case char const continue default do double else enum extern
    float for goto if int long register return short signed sizeof static
    struct switch typedef union unsigned void volatile while
""".split())

TYPE_WORDS = frozenset("int float double char void long short signed unsigned".split())
QUALIFIERS = frozenset("const static extern register volatile auto".split())

# Names kept verbatim by the abstraction: they are resolved by headers the
# C subset does not parse.
LIBRARY_NAMES = frozenset("""
    printf scanf puts gets getchar putchar fgets fprintf sprintf sscanf
    malloc calloc realloc free exit abs labs fabs sqrt pow floor ceil
    sin cos tan log exp strlen strcpy strncpy strcmp strncmp strcat
    memset memcpy isdigit isalpha isspace toupper tolower atoi atof rand srand
    main NULL EOF stdin stdout stderr
""".split())

INVALID = "INVALID"
UNK = "UNK"
EOL = "EOL"
FIELD = "FIELD"

_ABSTRACT_RE = re.compile(r"^(?:(?:VARIABLE|LITERAL|FUNCTION)_[A-Z_]+|INVALID|UNK|FIELD)$")

FORMAT_TAGS = {
    "d": "FMT_INT", "i": "FMT_INT", "u": "FMT_INT", "x": "FMT_INT",
    "X": "FMT_INT", "o": "FMT_INT", "ld": "FMT_INT", "lld": "FMT_INT",
    "lu": "FMT_INT", "hd": "FMT_INT",
    "f": "FMT_FLOAT", "lf": "FMT_FLOAT", "e": "FMT_FLOAT", "g": "FMT_FLOAT",
    "c": "FMT_CHAR", "s": "FMT_STR",
}
_FMT_RE = re.compile(r"%(?:%|[-+ #0]*\d*(?:\.\d+)?(ll|l|h)?([diuxXofegcs]))")

_OPERATORS = sorted("""
    <<= >>= ... -> ++ -- << >> <= >= == != && || += -= *= /= %= &= |= ^=
    + - * / % < > = ! & | ^ ~ ? : .
""".split(), key=len, reverse=True)
_PUNCTUATION = "(){}[];,#"

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+|//.*|/\*.*?\*/)"
    r"|(?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)"
    r"|(?P<int>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<char>'(?:\\.|[^\\'])*')"
    r"|(?P<string>\"(?:\\.|[^\\\"])*\")"
    r"|(?P<op>" + "|".join(re.escape(o) for o in _OPERATORS) + ")"
    r"|(?P<punct>[" + re.escape(_PUNCTUATION) + "])"
)

_KIND_BY_GROUP = {
    "float": "float-literal", "int": "integer-literal", "char": "char-literal",
    "string": "string-literal", "op": "operator", "punct": "punctuation",
}


class LexError(ValueError):
    """Raised for an unterminated string or character literal."""

    def __init__(self, message, column):
        super().__init__(f"{message} at column {column}")
        self.column = column


@dataclass(frozen=True)
class ConcreteToken:
    lexeme: str
    kind: str
    column: int = 0

    def __repr__(self):
        return f"Tok({self.lexeme!r})"


@dataclass(frozen=True)
class AbstractToken:
    tag: str
    origin: Optional[int] = None


@dataclass(frozen=True)
class AbstractedLine:
    tokens: tuple
    concrete: tuple
    line: int = 0

    @property
    def tags(self):
        return tuple(t.tag for t in self.tokens)

    def __len__(self):
        return len(self.tokens)


def tokenize(line: str) -> list[ConcreteToken]:
    """Split one source line into tokens using maximal munch.

    Comments and whitespace are skipped.  Characters outside the C alphabet
    become single-character punctuation tokens so garbage still lexes.
    """
    if "\n" in line:
        raise ValueError("tokenize expects a single line")
    out = []
    pos = 0
    n = len(line)
    while pos < n:
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            ch = line[pos]
            if ch in "'\"":
                what = "string" if ch == '"' else "char"
                raise LexError(f"unterminated {what} literal", pos)
            if line.startswith("/*", pos):
                raise LexError("unterminated comment", pos)
            out.append(ConcreteToken(ch, "punctuation", pos))
            pos += 1
            continue
        group = m.lastgroup
        if group != "ws":
            text = m.group()
            if group == "ident":
                kind = "keyword" if text in KEYWORDS else "identifier"
            else:
                kind = _KIND_BY_GROUP[group]
            out.append(ConcreteToken(text, kind, pos))
        pos = m.end()
    return out


def _needs_space(left: str, right: str) -> bool:
    try:
        toks = tokenize(left + right)
    except LexError:
        return True
    return [t.lexeme for t in toks] != [left, right]


def render(lexemes: Iterable[str]) -> str:
    """Join lexemes, inserting a space only where gluing would re-lex differently."""
    parts: list[str] = []
    prev = None
    for lex in lexemes:
        if prev is not None and _needs_space(prev, lex):
            parts.append(" ")
        parts.append(lex)
        prev = lex
    return "".join(parts)


def format_tags(string_literal: str) -> list[str]:
    """Ordered format-specifier tags of a string literal (``%%`` ignored)."""
    tags = []
    for m in _FMT_RE.finditer(string_literal):
        if m.group(0) == "%%":
            continue
        conv = (m.group(1) or "") + m.group(2)
        tags.append(FORMAT_TAGS.get(conv, FORMAT_TAGS[m.group(2)]))
    return tags


def string_tag(string_literal: str) -> str:
    return "_".join(["LITERAL_STRING", *format_tags(string_literal)])


def is_abstract_tag(text: str) -> bool:
    return bool(_ABSTRACT_RE.match(text))


# ---------------------------------------------------------------------------
# symbol table

@dataclass(frozen=True)
class Symbol:
    name: str
    type: str  # int, float, double, char, struct, void, unknown
    line: int
    pointer: int = 0
    array: bool = False
    function: bool = False

    @property
    def tag(self) -> str:
        base = self.type.upper()
        if self.function:
            return f"FUNCTION_{base}"
        mods = ("ARRAY_" if self.array else "") + "PTR_" * self.pointer
        return f"VARIABLE_{mods}{base}"


@dataclass
class Scope:
    start: int
    end: int
    depth: int
    parent: Optional[int]
    symbols: dict = field(default_factory=dict)


class SymbolTable:
    """Scopes of a program, each spanning a range of lines.

    Scope 0 is the global scope and always exists.
    """

    def __init__(self, n_lines=0):
        self.scopes = [Scope(0, max(n_lines - 1, 0), 0, None)]

    def chain(self, line=None):
        """Scopes enclosing ``line``, innermost first."""
        if line is None:
            return sorted(self.scopes, key=lambda s: -s.depth)
        inner = None
        for idx, sc in enumerate(self.scopes):
            if sc.start <= line <= sc.end and (inner is None or sc.depth >= self.scopes[inner].depth):
                inner = idx
        out = []
        while inner is not None:
            out.append(self.scopes[inner])
            inner = self.scopes[inner].parent
        return out

    def lookup(self, name, line=None) -> Optional[Symbol]:
        for sc in self.chain(line):
            sym = sc.symbols.get(name)
            if sym is not None and (line is None or sym.line <= line):
                return sym
        return None

    def visible(self, line):
        """Symbols visible at ``line`` as ``(symbol, depth)``, inner scopes shadowing outer."""
        seen = {}
        for sc in self.chain(line):
            for name, sym in sc.symbols.items():
                if name not in seen and sym.line <= line:
                    seen[name] = (sym, sc.depth)
        return list(seen.values())

    def declare(self, scope_idx, sym: Symbol):
        self.scopes[scope_idx].symbols.setdefault(sym.name, sym)

    def __contains__(self, name):
        return self.lookup(name) is not None


class _DeclScanner:
    """Best-effort declaration finder over a flat token stream."""

    def __init__(self, toks, table, last_line):
        self.toks = toks  # list of (ConcreteToken, line)
        self.table = table
        self.last_line = last_line
        self.stack = [0]
        self.pending = []  # parameters waiting for a function body
        self.typedefs = set()

    def peek(self, i):
        return self.toks[i][0].lexeme if i < len(self.toks) else None

    def run(self):
        i = 0
        prev = prev2 = None
        pdepth = 0
        headers = []  # paren depths of open for-headers
        for_mode = {}  # for-scope index -> "header" | "brace" | "stmt"
        while i < len(self.toks):
            tok, line = self.toks[i]
            lex = tok.lexeme
            if lex == "(":
                pdepth += 1
                if prev == "for":
                    headers.append(pdepth)
            elif lex == ")":
                if headers and headers[-1] == pdepth:
                    headers.pop()
                    top = self.stack[-1]
                    if for_mode.get(top) == "header":
                        for_mode[top] = "brace" if self.peek(i + 1) == "{" else "stmt"
                pdepth = max(pdepth - 1, 0)
            if lex == "{":
                self._open(line)
            elif lex == "}":
                if len(self.stack) > 1 and self.stack[-1] not in for_mode:
                    self.table.scopes[self.stack.pop()].end = line
                    if self.stack[-1] in for_mode and for_mode[self.stack[-1]] == "brace":
                        self.table.scopes[self.stack.pop()].end = line
            elif (self._at_statement_start(prev, prev2) or self._line_start(i)) and self._starts_type(i):
                if prev == "(" and prev2 == "for":
                    for_mode[self._open(line)] = "header"
                j = self._declaration(i)
                if j > i:
                    prev2 = prev = None
                    i = j
                    continue
            elif lex == ";":
                self.pending = []
                while for_mode.get(self.stack[-1]) == "stmt":
                    self.table.scopes[self.stack.pop()].end = line
            prev2, prev = prev, lex
            i += 1

    def _open(self, line):
        self.table.scopes.append(Scope(line, self.last_line, len(self.stack), self.stack[-1]))
        idx = len(self.table.scopes) - 1
        for sym in self.pending:
            self.table.declare(idx, sym)
        self.pending = []
        self.stack.append(idx)
        return idx

    def _line_start(self, i):
        # recovery: a type word opening a line after a garbled line still declares
        return i > 0 and self.toks[i - 1][1] != self.toks[i][1] and self.peek(i - 1) not in (",", "(", "=")

    @staticmethod
    def _at_statement_start(prev, prev2):
        return prev in (None, ";", "{", "}") or (prev == "(" and prev2 == "for")

    def _starts_type(self, i):
        lex = self.peek(i)
        return lex in TYPE_WORDS or lex in QUALIFIERS or lex == "struct" or lex in self.typedefs

    def _specifiers(self, i):
        base = None
        while True:
            lex = self.peek(i)
            if lex in QUALIFIERS:
                i += 1
            elif lex in ("long", "short", "signed", "unsigned"):
                base = base or "int"
                i += 1
            elif lex in ("int", "char", "void"):
                base = lex
                i += 1
            elif lex in ("float", "double"):
                base = lex
                i += 1
            elif lex == "struct":
                base = "struct"
                i += 1
                if self.peek(i) and self.toks[i][0].kind == "identifier":
                    i += 1
                if self.peek(i) == "{":
                    return base, i
            elif lex in self.typedefs and base is None:
                base = "struct"
                i += 1
            else:
                return base, i

    def _declarator(self, i):
        pointer = 0
        while self.peek(i) == "*":
            pointer += 1
            i += 1
        if i >= len(self.toks) or self.toks[i][0].kind != "identifier":
            return None, i
        return (self.toks[i][0].lexeme, pointer, self.toks[i][1]), i + 1

    def _skip_balanced(self, i, stops):
        depth = 0
        while i < len(self.toks):
            lex = self.peek(i)
            if depth == 0 and lex in stops:
                return i
            if lex in "([{":
                depth += 1
            elif lex in ")]}":
                if depth == 0:
                    return i
                depth -= 1
            i += 1
        return i

    def _declaration(self, start):
        base, i = self._specifiers(start)
        if base is None:
            return start
        if self.peek(i) == "{":  # struct definition body: let the scope logic see it
            return i
        scope = self.stack[-1]
        while True:
            decl, j = self._declarator(i)
            if decl is None:
                return i if i > start else start
            name, pointer, line = decl
            i = j
            if self.peek(i) == "(":
                params, i = self._params(i + 1)
                self.table.declare(scope, Symbol(name, base, line, pointer, function=True))
                if self.peek(i) == "{":
                    self.pending = params
                return i
            array = False
            while self.peek(i) == "[":
                array = True
                i = self._skip_balanced(i + 1, ("]",))
                if self.peek(i) == "]":
                    i += 1
            self.table.declare(scope, Symbol(name, base, line, pointer, array))
            if self.peek(i) == "=":
                i = self._skip_balanced(i + 1, (",", ";"))
            if self.peek(i) == ",":
                i += 1
                continue
            if self.peek(i) == ";":
                return i + 1
            return i

    def _params(self, i):
        params = []
        while i < len(self.toks) and self.peek(i) != ")":
            base, j = self._specifiers(i)
            if base is None:
                i = self._skip_balanced(i, (",", ")"))
            else:
                decl, j = self._declarator(j)
                if decl is not None:
                    name, pointer, line = decl
                    array = False
                    while self.peek(j) == "[":
                        array = True
                        j = self._skip_balanced(j + 1, ("]",)) + 1
                    params.append(Symbol(name, base, line, pointer, array))
                i = self._skip_balanced(j, (",", ")"))
            if self.peek(i) == ",":
                i += 1
        return params, min(i + 1, len(self.toks))


def _program_tokens(program: Sequence[str]):
    toks = []
    for ln, text in enumerate(program):
        if text.lstrip().startswith("#"):
            continue
        try:
            toks.extend((t, ln) for t in tokenize(text))
        except LexError:
            continue
    return toks


def split_program(program) -> list[str]:
    if isinstance(program, str):
        return program.split("\n")
    return list(program)


def build_symbol_table(program) -> SymbolTable:
    """Infer declarations from a possibly uncompilable program.

    Lines that fail to lex or parse are skipped; this never raises.
    """
    lines = split_program(program)
    table = SymbolTable(len(lines))
    _DeclScanner(_program_tokens(lines), table, max(len(lines) - 1, 0)).run()
    return table


# ---------------------------------------------------------------------------
# abstraction

_LITERAL_TAGS = {
    "integer-literal": "LITERAL_INT",
    "float-literal": "LITERAL_FLOAT",
    "char-literal": "LITERAL_CHAR",
}


def abstract_token(tok: ConcreteToken, prev: Optional[ConcreteToken], table: SymbolTable, line=None) -> str:
    if tok.kind in _LITERAL_TAGS:
        return _LITERAL_TAGS[tok.kind]
    if tok.kind == "string-literal":
        return string_tag(tok.lexeme)
    if tok.kind != "identifier":
        return tok.lexeme
    name = tok.lexeme
    if is_abstract_tag(name) or name in LIBRARY_NAMES:
        return name
    if prev is not None and prev.lexeme in (".", "->"):
        return FIELD
    sym = table.lookup(name, line)
    return sym.tag if sym is not None else INVALID


def abstract_line(tokens: Sequence[ConcreteToken], table: SymbolTable, line=None) -> AbstractedLine:
    """Abstract one lexed line; ``line`` selects the enclosing scopes."""
    tags = []
    prev = None
    for i, tok in enumerate(tokens):
        tags.append(AbstractToken(abstract_token(tok, prev, table, line), i))
        prev = tok
    return AbstractedLine(tuple(tags), tuple(tokens), 0 if line is None else line)


def abstract_program(program, table=None) -> list[Optional[AbstractedLine]]:
    """Abstract every line; lines that fail to lex are ``None``."""
    lines = split_program(program)
    if table is None:
        table = build_symbol_table(lines)
    out = []
    for ln, text in enumerate(lines):
        try:
            toks = tokenize(text)
        except LexError:
            out.append(None)
            continue
        out.append(abstract_line(toks, table, ln))
    return out


# ---------------------------------------------------------------------------
# concretization

class ConcretizationError(LookupError):
    pass


_ZERO_LITERALS = {
    "LITERAL_INT": "0", "LITERAL_FLOAT": "0.0", "LITERAL_CHAR": "'\\0'",
}
_FMT_TEXT = {"FMT_INT": "%d", "FMT_FLOAT": "%f", "FMT_CHAR": "%c", "FMT_STR": "%s"}


class Recency:
    """Latest textual occurrence of each lexeme per abstract tag.

    Built from abstracted program lines; positions are ``(line, column)``.
    """

    def __init__(self, lines: Iterable[Optional[AbstractedLine]]):
        self.by_tag: dict[str, dict[str, list]] = {}
        for al in lines:
            if al is None:
                continue
            for at in al.tokens:
                if at.origin is None:
                    continue
                ct = al.concrete[at.origin]
                if ct.kind in ("keyword", "punctuation", "operator"):
                    continue
                self.by_tag.setdefault(at.tag, {}).setdefault(ct.lexeme, []).append((al.line, ct.column))

    def latest(self, tag, lexeme, line):
        """Latest position of ``lexeme`` under ``tag`` at or before ``line``."""
        best = None
        for pos in self.by_tag.get(tag, {}).get(lexeme, ()):
            if pos[0] <= line and (best is None or pos > best):
                best = pos
        return best

    def candidates(self, tag, line):
        out = []
        for lexeme in self.by_tag.get(tag, {}):
            pos = self.latest(tag, lexeme, line)
            if pos is not None:
                out.append((pos, lexeme))
        return out


def concretize_token(tag: str, table: SymbolTable, recency: Recency, line: int) -> str:
    """Pick a concrete lexeme for an abstract tag at ``line``.

    Variables resolve to the most recently used in-scope symbol with the same
    tag; ties go to the innermost scope.  Literals resolve to the most recent
    literal with the same tag, else a zero literal.  Non-abstract tags
    (keywords, punctuation, library names) are returned unchanged.
    """
    if not is_abstract_tag(tag) and not tag.startswith("LITERAL_"):
        return tag
    if tag.startswith("VARIABLE_") or tag.startswith("FUNCTION_"):
        best = None
        for sym, depth in table.visible(line):
            if sym.tag != tag:
                continue
            pos = recency.latest(tag, sym.name, line) or (sym.line, -1)
            key = (pos, depth)
            if best is None or key > best[0]:
                best = (key, sym.name)
        if best is None:
            raise ConcretizationError(f"no in-scope symbol for {tag} at line {line}")
        return best[1]
    if tag.startswith("LITERAL_") or tag == FIELD:
        cands = recency.candidates(tag, line)
        if cands:
            return max(cands)[1]
        if tag.startswith("LITERAL_STRING"):
            fmts = tag.split("_")[2:]
            specs = ["_".join(fmts[i:i + 2]) for i in range(0, len(fmts), 2)]
            return '"' + " ".join(_FMT_TEXT.get(s, "") for s in specs) + '"'
        if tag in _ZERO_LITERALS:
            return _ZERO_LITERALS[tag]
    raise ConcretizationError(f"cannot concretize {tag}")
