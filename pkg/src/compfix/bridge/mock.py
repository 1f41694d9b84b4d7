"""A small C-subset checker that reports clang-style error messages.

It covers declarations, expressions, the usual statements and printf/scanf
style calls, and reports the high-frequency syntax errors (missing ``;``,
undeclared identifiers, malformed expressions and parentheses, bad ``for``
headers, non-assignable left-hand sides, unterminated statements after
``return``).  Recovery mimics clang closely enough that a single-line bug
usually yields a single diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..lang import LIBRARY_NAMES, LexError, split_program, tokenize

_TYPE_START = {"int", "float", "double", "char", "void", "long", "short", "signed", "unsigned",
               "const", "static", "extern", "register", "volatile", "auto", "struct"}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
_BINARY = [
    {"||"}, {"&&"}, {"|"}, {"^"}, {"&"}, {"==", "!="}, {"<", ">", "<=", ">="},
    {"<<", ">>"}, {"+", "-"}, {"*", "/", "%"},
]
_UNARY = {"-", "+", "!", "~", "*", "&", "++", "--"}


@dataclass(frozen=True)
class _Tok:
    lex: str
    kind: str
    line: int
    col: int


class _Abort(Exception):
    """Unwinds a statement after a syntax error has been reported."""


@dataclass(frozen=True)
class _Expr:
    lvalue: bool
    top: str = ""  # outermost operator, for the unused-comparison check


class MockParser:
    def __init__(self, program):
        self.lines = split_program(program)
        self.errors: list[tuple[int, int, str]] = []
        self.toks: list[_Tok] = []
        for ln, text in enumerate(self.lines):
            if text.lstrip().startswith("#"):
                continue
            try:
                toks = tokenize(text)
            except LexError as exc:
                quote = '"' if "string" in str(exc) else "'"
                self.errors.append((ln, exc.column, f"missing terminating {quote} character"))
                toks = tokenize(text[:exc.column]) if exc.column else []
            self.toks.extend(_Tok(t.lexeme, t.kind, ln, t.column) for t in toks)
        self.pos = 0
        self.scopes: list[set] = [set(LIBRARY_NAMES)]
        self.loops = 0
        self.switches = 0

    # token helpers -------------------------------------------------------
    def peek(self, k=0):
        i = self.pos + k
        return self.toks[i].lex if i < len(self.toks) else None

    def tok(self, k=0):
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def advance(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, lex):
        return self.peek() == lex

    def accept(self, lex):
        if self.at(lex):
            self.pos += 1
            return True
        return False

    def here(self):
        t = self.tok()
        if t is not None:
            return t.line, t.col
        if self.toks:
            last = self.toks[-1]
            return last.line, last.col + len(last.lex)
        return max(len(self.lines) - 1, 0), 0

    def after_prev(self):
        if self.pos == 0:
            return self.here()
        t = self.toks[self.pos - 1]
        return t.line, t.col + len(t.lex)

    def error(self, where, msg):
        self.errors.append((where[0], where[1], msg))

    def fail(self, where, msg):
        self.error(where, msg)
        raise _Abort

    def declared(self, name):
        return any(name in s for s in self.scopes)

    def declare(self, name):
        self.scopes[-1].add(name)

    def is_type_start(self, k=0):
        return self.peek(k) in _TYPE_START

    def sync(self):
        """Skip to just past the next ``;`` or up to the next ``}``/``{`` at depth 0."""
        depth = 0
        while self.tok() is not None:
            lex = self.peek()
            if lex in "([":
                depth += 1
            elif lex in ")]":
                depth = max(depth - 1, 0)
            elif lex == ";" and depth == 0:
                self.pos += 1
                return
            elif lex in "{}" and depth == 0:
                return
            self.pos += 1

    # top level -----------------------------------------------------------
    def parse(self):
        while self.tok() is not None:
            start = self.pos
            try:
                if self.at(";"):
                    self.advance()
                elif self.at("}"):
                    self.error(self.here(), "extraneous closing brace ('}')")
                    self.advance()
                elif self.is_type_start():
                    self.declaration(top_level=True)
                elif self.tok().kind == "identifier" and self.peek(1) in ("=", ";", ","):
                    # implicit int at file scope is only a warning in clang
                    self.declaration(top_level=True, unknown_type=True)
                else:
                    self.fail(self.here(), "expected identifier or '('")
            except _Abort:
                self.sync()
                if self.pos == start:
                    self.pos += 1
        return self.errors

    # declarations ----------------------------------------------------------
    def specifiers(self):
        seen = False
        while self.tok() is not None and self.is_type_start():
            lex = self.advance().lex
            seen = True
            if lex == "struct":
                if self.tok() is not None and self.tok().kind == "identifier":
                    self.advance()
                if self.at("{"):
                    self.struct_body()
        return seen

    def struct_body(self):
        self.advance()
        while self.tok() is not None and not self.at("}"):
            self.advance()
        if not self.accept("}"):
            self.fail(self.here(), "expected '}'")

    def declaration(self, top_level=False, unknown_type=False):
        if not unknown_type:
            self.specifiers()
        if self.at(";"):
            self.advance()
            return
        while True:
            while self.accept("*"):
                pass
            t = self.tok()
            if t is None or t.kind != "identifier":
                self.fail(self.here(), "expected identifier or '('")
            self.advance()
            if self.at("("):
                self.declare(t.lex)
                self.function_rest(top_level)
                return
            while self.accept("["):
                if not self.at("]"):
                    self.expression()
                if not self.accept("]"):
                    self.fail(self.here(), "expected ']'")
            self.declare(t.lex)
            if self.accept("="):
                if self.at("{"):
                    self.initializer_list()
                else:
                    self.assignment()
            if self.accept(","):
                continue
            if self.accept(";"):
                return
            self.error(self.after_prev(), "expected ';' after top level declarator" if top_level
                       else "expected ';' at end of declaration")
            return

    def initializer_list(self):
        self.advance()
        while not self.at("}"):
            if self.tok() is None:
                self.fail(self.here(), "expected '}'")
            if self.at("{"):
                self.initializer_list()
            else:
                self.assignment()
            if not self.accept(","):
                break
        if not self.accept("}"):
            self.fail(self.here(), "expected '}'")

    def function_rest(self, top_level):
        self.advance()  # (
        params = []
        while not self.at(")"):
            if self.tok() is None:
                self.fail(self.here(), "expected ')'")
            if self.accept("..."):
                continue
            if not self.specifiers():
                self.fail(self.here(), "expected parameter declarator")
            while self.accept("*"):
                pass
            t = self.tok()
            if t is not None and t.kind == "identifier":
                params.append(t.lex)
                self.advance()
            while self.accept("["):
                while self.tok() is not None and not self.at("]"):
                    self.advance()
                if not self.accept("]"):
                    self.fail(self.here(), "expected ']'")
            if not self.accept(","):
                break
        if not self.accept(")"):
            self.fail(self.here(), "expected ')'")
        if self.at("{") and top_level:
            self.scopes.append(set(params))
            try:
                self.block(new_scope=False)
            finally:
                self.scopes.pop()
        elif not self.accept(";"):
            self.error(self.after_prev(), "expected ';' after top level declarator")

    # statements ------------------------------------------------------------
    def block(self, new_scope=True):
        self.advance()  # {
        if new_scope:
            self.scopes.append(set())
        try:
            while not self.at("}"):
                if self.tok() is None:
                    self.error(self.here(), "expected '}'")
                    return
                self.statement_guarded()
            self.advance()
        finally:
            if new_scope:
                self.scopes.pop()

    def statement_guarded(self):
        start = self.pos
        try:
            self.statement()
        except _Abort:
            self.sync()
            if self.pos == start:
                self.pos += 1

    def statement(self):
        lex = self.peek()
        t = self.tok()
        if t is None:
            self.fail(self.here(), "expected statement")
        if lex == "{":
            self.block()
        elif lex == ";":
            self.advance()
        elif self.is_type_start():
            self.declaration()
        elif (t.kind == "identifier" and not self.declared(lex) and self.tok(1) is not None
              and self.tok(1).kind == "identifier"):
            self.error((t.line, t.col), f"use of undeclared identifier '{lex}'")
            self.advance()
            self.declaration(unknown_type=True)
        elif lex == "if":
            self.advance()
            self.condition("if")
            self.statement_guarded()
            if self.accept("else"):
                self.statement_guarded()
        elif lex == "while":
            self.advance()
            self.condition("while")
            self.loop_body()
        elif lex == "do":
            self.advance()
            self.loop_body()
            if not self.accept("while"):
                self.fail(self.here(), "expected 'while' in do/while loop")
            self.condition("while")
            if not self.accept(";"):
                self.error(self.after_prev(), "expected ';' after do/while statement")
        elif lex == "for":
            self.for_statement()
        elif lex == "switch":
            self.advance()
            self.condition("switch")
            self.switches += 1
            try:
                self.statement_guarded()
            finally:
                self.switches -= 1
        elif lex in ("case", "default"):
            self.advance()
            if lex == "case":
                self.conditional()
            if not self.accept(":"):
                self.error(self.here(), f"expected ':' after '{lex}'")
                self.accept(";")
        elif lex in ("break", "continue"):
            self.advance()
            if lex == "continue" and self.loops == 0:
                self.error((t.line, t.col), "'continue' statement not in loop statement")
            elif self.loops == 0 and self.switches == 0:
                self.error((t.line, t.col), "'break' statement not in loop or switch statement")
            if not self.accept(";"):
                self.error(self.after_prev(), f"expected ';' after {lex} statement")
        elif lex == "return":
            self.advance()
            if not self.accept(";"):
                self.expression()
                if not self.accept(";"):
                    self.error(self.after_prev(), "expected ';' after return statement")
        elif lex == "else":
            self.fail(self.here(), "expected expression")
        else:
            e = self.expression()
            if e.top in ("==", "!="):
                self.error((t.line, t.col), "equality comparison result unused")
            if self.accept(";"):
                return
            if self.at(")") and self.peek(1) == ";":
                self.error(self.here(), "extraneous ')' before ';'")
                self.advance()
                self.advance()
                return
            self.error(self.after_prev(), "expected ';' after expression")

    def loop_body(self):
        self.loops += 1
        try:
            self.statement_guarded()
        finally:
            self.loops -= 1

    def condition(self, keyword):
        if not self.accept("("):
            self.error(self.here(), f"expected '(' after '{keyword}'")
            self.expression()
            self.accept(")")
            return
        self.expression()
        if not self.accept(")"):
            self.fail(self.here(), "expected ')'")

    def for_statement(self):
        self.advance()
        if not self.accept("("):
            self.fail(self.here(), "expected '(' after 'for'")
        self.scopes.append(set())
        try:
            if self.is_type_start():
                self.specifiers()
                self.for_declarators()
            elif not self.accept(";"):
                self.for_clause()
                if not self.accept(";"):
                    self.error(self.here(), "expected ';' in 'for' statement specifier")
            if self.at(")"):
                self.error(self.here(), "expected ';' in 'for' statement specifier")
            else:
                if not self.accept(";"):
                    self.for_clause()
                    if not self.accept(";"):
                        self.error(self.here(), "expected ';' in 'for' statement specifier")
                if not self.at(")"):
                    self.for_clause()
            if not self.accept(")"):
                self.fail(self.here(), "expected ')'")
            self.loop_body()
        finally:
            self.scopes.pop()

    def for_clause(self):
        """One header expression; after an error skip to the next ``;`` or ``)``."""
        try:
            self.expression()
        except _Abort:
            depth = 0
            while self.tok() is not None:
                lex = self.peek()
                if lex == "(":
                    depth += 1
                elif lex == ")":
                    if depth == 0:
                        return
                    depth -= 1
                elif lex == ";" and depth == 0 or lex in "{}":
                    return
                self.pos += 1

    def for_declarators(self):
        while True:
            while self.accept("*"):
                pass
            t = self.tok()
            if t is None or t.kind != "identifier":
                self.fail(self.here(), "expected identifier or '('")
            self.advance()
            self.declare(t.lex)
            if self.accept("="):
                self.assignment()
            if not self.accept(","):
                break
        if not self.accept(";"):
            self.error(self.here(), "expected ';' in 'for' statement specifier")

    # expressions -----------------------------------------------------------
    def expression(self) -> _Expr:
        e = self.assignment()
        while self.accept(","):
            e = _Expr(False, ",")
            self.assignment()
        return e

    def assignment(self) -> _Expr:
        lhs = self.conditional()
        if self.peek() in _ASSIGN_OPS:
            op = self.advance()
            if not lhs.lvalue:
                self.error((op.line, op.col), "expression is not assignable")
            self.assignment()
            return _Expr(False, "=")
        return lhs

    def conditional(self) -> _Expr:
        e = self.binary(0)
        if self.accept("?"):
            self.expression()
            if not self.accept(":"):
                self.fail(self.here(), "expected ':'")
            self.conditional()
            return _Expr(False, "?")
        return e

    def binary(self, level) -> _Expr:
        if level == len(_BINARY):
            return self.unary()
        e = self.binary(level + 1)
        while self.peek() in _BINARY[level]:
            op = self.advance().lex
            self.binary(level + 1)
            e = _Expr(False, op)
        return e

    def unary(self) -> _Expr:
        lex = self.peek()
        if lex in _UNARY:
            op = self.advance()
            e = self.unary()
            if lex in ("++", "--") and not e.lvalue:
                self.error((op.line, op.col), "expression is not assignable")
            return _Expr(lex == "*", lex)
        if lex == "sizeof":
            self.advance()
            if self.at("(") and self.peek(1) in _TYPE_START:
                self.advance()
                self.specifiers()
                while self.accept("*"):
                    pass
                if not self.accept(")"):
                    self.fail(self.here(), "expected ')'")
            else:
                self.unary()
            return _Expr(False, "sizeof")
        if lex == "(" and self.peek(1) in _TYPE_START:
            self.advance()
            self.specifiers()
            while self.accept("*"):
                pass
            if not self.accept(")"):
                self.fail(self.here(), "expected ')'")
            self.unary()
            return _Expr(False, "cast")
        return self.postfix()

    def postfix(self) -> _Expr:
        e = self.primary()
        while True:
            lex = self.peek()
            if lex == "[":
                self.advance()
                self.expression()
                if not self.accept("]"):
                    self.fail(self.here(), "expected ']'")
                e = _Expr(True)
            elif lex == "(":
                self.advance()
                if not self.at(")"):
                    self.assignment()
                    while self.accept(","):
                        self.assignment()
                if not self.accept(")"):
                    self.fail(self.here(), "expected ')'")
                e = _Expr(False, "call")
            elif lex in (".", "->"):
                self.advance()
                t = self.tok()
                if t is None or t.kind != "identifier":
                    self.fail(self.here(), "expected identifier")
                self.advance()
                e = _Expr(True)
            elif lex in ("++", "--"):
                op = self.advance()
                if not e.lvalue:
                    self.error((op.line, op.col), "expression is not assignable")
                e = _Expr(False, lex)
            else:
                return e

    def primary(self) -> _Expr:
        t = self.tok()
        if t is None:
            self.fail(self.here(), "expected expression")
        if t.kind == "identifier":
            self.advance()
            if not self.declared(t.lex):
                self.error((t.line, t.col), f"use of undeclared identifier '{t.lex}'")
            return _Expr(True)
        if t.kind in ("integer-literal", "float-literal", "char-literal"):
            self.advance()
            return _Expr(False)
        if t.kind == "string-literal":
            self.advance()
            while self.tok() is not None and self.tok().kind == "string-literal":
                self.advance()
            return _Expr(False)
        if t.lex == "(":
            self.advance()
            e = self.expression()
            if not self.accept(")"):
                self.fail(self.here(), "expected ')'")
            return _Expr(e.lvalue, "()" if e.top not in ("==", "!=") else "(==)")
        self.fail((t.line, t.col), "expected expression")


def mock_errors(program) -> list[tuple[int, int, str]]:
    """``(line, column, message)`` for every error, sorted by position."""
    errs = MockParser(program).parse()
    return sorted(errs, key=lambda e: (e[0], e[1]))
