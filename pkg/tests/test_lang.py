import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compfix.lang import (INVALID, ConcretizationError, LexError, Recency, abstract_line,
                          abstract_program, build_symbol_table, concretize_token, format_tags,
                          render, string_tag, tokenize)


def lexemes(line):
    return [t.lexeme for t in tokenize(line)]


def tags(line, program=None, ln=None):
    program = program or [line]
    table = build_symbol_table(program)
    return abstract_line(tokenize(line), table, ln if ln is not None else program.index(line)).tags


# ---------------------------------------------------------------------------
# tokenize

def test_tokenize_declaration():
    assert lexemes("int abc = 0;") == ["int", "abc", "=", "0", ";"]


def test_tokenize_maximal_munch_on_swapped_operator():
    assert lexemes("i=<N") == ["i", "=", "<", "N"]


def test_tokenize_empty_line():
    assert tokenize("") == []


def test_tokenize_kinds_and_columns():
    toks = tokenize('for (i = 0; i <= 2.5; i++) printf("%d", c);')
    kinds = {t.lexeme: t.kind for t in toks}
    assert kinds["for"] == "keyword"
    assert kinds["i"] == "identifier"
    assert kinds["0"] == "integer-literal"
    assert kinds["2.5"] == "float-literal"
    assert kinds['"%d"'] == "string-literal"
    assert kinds["<="] == "operator" and kinds["++"] == "operator"
    cols = [t.column for t in toks]
    assert cols == sorted(set(cols))


def test_tokenize_multichar_operators():
    assert lexemes("a->b == c && d++ <<= 1") == ["a", "->", "b", "==", "c", "&&", "d", "++", "<<=", "1"]


@pytest.mark.parametrize("line,col", [('printf("abc);', 7), ("c = 'x;", 4)])
def test_tokenize_unterminated_literal(line, col):
    with pytest.raises(LexError) as exc:
        tokenize(line)
    assert exc.value.column == col


def test_tokenize_rejects_newline():
    with pytest.raises(ValueError):
        tokenize("a;\nb;")


_LEX = st.sampled_from(["int", "x", "y1", "_t", "0", "42", "3.5", "'a'", '"%d\\n"', "+", "++", "-", "--",
                        "=", "==", "<", "<=", "<<", "&", "&&", "(", ")", "[", "]", "{", "}", ";", ",", "->",
                        ".", "!", "!=", "*", "/", "%"])


@given(st.lists(_LEX, max_size=12))
def test_render_then_tokenize_round_trip(seq):
    assert lexemes(render(seq)) == seq


@given(st.lists(st.tuples(_LEX, st.integers(0, 3)), max_size=10))
def test_columns_reproduce_line(parts):
    line = "".join(lex + " " * gap for lex, gap in parts)
    toks = tokenize(line)
    rebuilt = [" "] * len(line)
    for t in toks:
        rebuilt[t.column:t.column + len(t.lexeme)] = list(t.lexeme)
    assert "".join(rebuilt).rstrip() == line.rstrip()


# ---------------------------------------------------------------------------
# symbol table

def test_symbol_table_single_declaration():
    sym = build_symbol_table(["int n;"]).lookup("n", 0)
    assert (sym.type, sym.line) == ("int", 0)


def test_symbol_table_comma_declaration():
    t = build_symbol_table(["float x, y;"])
    assert t.lookup("x").type == "float" and t.lookup("y").type == "float"


def test_symbol_table_skips_garbage_line():
    prog = ["int a;", "float b = 1.0;", "@@ ) ( int ; %%", "char c;", "int main() {", "int d[10], *p;",
            "for (int i = 0; i < 3; i++) {", "d[i] = i;", "}", "}"]
    t = build_symbol_table(prog)
    expected = {"a": ("int", 0), "b": ("float", 1), "c": ("char", 3)}
    for name, (typ, line) in expected.items():
        sym = t.lookup(name)
        assert (sym.type, sym.line) == (typ, line)
    assert t.lookup("d", 7).tag == "VARIABLE_ARRAY_INT"
    assert t.lookup("p", 7).tag == "VARIABLE_PTR_INT"
    assert t.lookup("i", 7).type == "int"
    # the for-header variable does not leak past the loop
    assert t.lookup("i", 9) is None


def test_symbol_table_innermost_scope_wins():
    prog = ["int x;", "int main() {", "  float x;", "  x = 1;", "}", "int g() {", "  x = 2;", "}"]
    t = build_symbol_table(prog)
    assert t.lookup("x", 3).type == "float"
    assert t.lookup("x", 6).type == "int"


def test_symbol_table_function_and_params():
    prog = ["float avg(int n, float s) {", "  return s / n;", "}"]
    t = build_symbol_table(prog)
    assert t.lookup("avg").tag == "FUNCTION_FLOAT"
    assert t.lookup("n", 1).type == "int" and t.lookup("s", 1).type == "float"


# ---------------------------------------------------------------------------
# abstraction

def test_abstract_declaration():
    assert " ".join(tags("int abc = 0;")) == "int VARIABLE_INT = LITERAL_INT ;"


def test_abstract_undeclared_identifier():
    assert " ".join(tags("xyz = 5;")) == "INVALID = LITERAL_INT ;"


def test_abstract_punctuation_fixed_point():
    assert tags(";") == (";",)


def test_abstract_string_keeps_format_specifiers_in_order():
    assert format_tags('"%d and %f, %c %s %%"') == ["FMT_INT", "FMT_FLOAT", "FMT_CHAR", "FMT_STR"]
    assert string_tag('"%d %d"') == "LITERAL_STRING_FMT_INT_FMT_INT"
    prog = ["int a;", 'printf("%d\\n", a);']
    assert tags(prog[1], prog) == ("printf", "(", "LITERAL_STRING_FMT_INT", ",", "VARIABLE_INT", ")", ";")


def test_abstract_is_idempotent_on_tags():
    line = "int VARIABLE_INT = LITERAL_INT ; INVALID"
    assert " ".join(tags(line)) == line


def test_alignment_is_lossless():
    prog = ["int a, b;", "a = b + 3 * a;"]
    al = abstract_line(tokenize(prog[1]), build_symbol_table(prog), 1)
    origins = [t.origin for t in al.tokens]
    assert len(al.tokens) == len(al.concrete)
    assert origins == list(range(len(al.concrete)))


@given(st.lists(st.sampled_from(["a", "b", "zz", "q9"]), min_size=1, max_size=6),
       st.sets(st.sampled_from(["a", "b", "zz", "q9"])))
def test_invalid_iff_undeclared(used, declared):
    decl = [f"int {name};" for name in sorted(declared)]
    line = " + ".join(used) + ";"
    prog = decl + [line]
    got = tags(line, prog, len(prog) - 1)
    idents = [g for g in got if g not in ("+", ";")]
    for name, tag in zip(used, idents):
        assert (tag == INVALID) == (name not in declared)


def test_abstract_program_marks_unlexable_lines():
    out = abstract_program(["int a;", 'printf("oops);'])
    assert out[0] is not None and out[1] is None


# ---------------------------------------------------------------------------
# concretization

def _ctx(prog):
    table = build_symbol_table(prog)
    return table, Recency(abstract_program(prog, table))


def test_concretize_picks_most_recent_variable():
    prog = ["int main() {", "  int i, n;", "  n = 1;", "  i = 2;", "  ;", "}"]
    table, rec = _ctx(prog)
    assert concretize_token("VARIABLE_INT", table, rec, 4) == "i"
    assert concretize_token("VARIABLE_INT", table, rec, 2) == "n"


def test_concretize_literal_defaults_to_zero():
    table, rec = _ctx(["int n;", "n = ;"])
    assert concretize_token("LITERAL_INT", table, rec, 1) == "0"
    assert concretize_token("LITERAL_FLOAT", table, rec, 1) == "0.0"


def test_concretize_literal_reuses_recent_literal():
    table, rec = _ctx(["int n;", "n = 7;", "n = ;"])
    assert concretize_token("LITERAL_INT", table, rec, 2) == "7"


def test_concretize_missing_float_fails():
    table, rec = _ctx(["int n;", "n = 1;"])
    with pytest.raises(ConcretizationError):
        concretize_token("VARIABLE_FLOAT", table, rec, 1)


def test_concretize_keeps_plain_tokens():
    table, rec = _ctx(["int n;"])
    assert concretize_token(";", table, rec, 0) == ";"
    assert concretize_token("printf", table, rec, 0) == "printf"


@settings(max_examples=50)
@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=8))
def test_concretized_variable_is_in_scope_with_matching_type(uses):
    prog = ["int a;", "int b;", "float c;"] + [f"{u} = 1;" for u in uses] + [";"]
    table, rec = _ctx(prog)
    ln = len(prog) - 1
    name = concretize_token("VARIABLE_INT", table, rec, ln)
    assert table.lookup(name, ln).tag == "VARIABLE_INT"
    int_uses = [u for u in uses if u != "c"]
    if int_uses:
        assert name == int_uses[-1]
