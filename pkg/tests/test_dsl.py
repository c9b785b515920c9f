from fractions import Fraction

import pytest

from artifact.dsl import DSLError, parse_expr, parse_seq_dsl, pretty


def test_example_sequence():
    s = parse_seq_dsl("1 - pow(1/2, m1+1)")
    assert s.arity == 1
    assert s(3) == Fraction(15, 16)


def test_zero_sequence():
    s = parse_seq_dsl("0")
    assert all(s(m) == 0 for m in range(5))


def test_syntax_error_column():
    with pytest.raises(DSLError) as e:
        parse_seq_dsl("pow(")
    assert (e.value.line, e.value.column) == (1, 5)


def test_multiline_position():
    with pytest.raises(DSLError) as e:
        parse_seq_dsl("1 +\n  2 *\n  )")
    assert (e.value.line, e.value.column) == (3, 3)


@pytest.mark.parametrize(
    "src, fragment",
    [
        ("foo + 1", "unknown identifier"),
        ("bar(1)", "unknown function"),
        ("pow(1)", "takes 2 arguments"),
        ("ite(1, 2, 3)", "comparison"),
        ("pi + 1", "approx(pi"),
        ("1 $ 2", "unexpected character"),
        ("(1 + 2", "expected ')'"),
    ],
)
def test_parse_errors(src, fragment):
    with pytest.raises(DSLError, match=fragment.replace("(", r"\(").replace(")", r"\)")):
        parse_seq_dsl(src)


def test_arity_errors():
    with pytest.raises(DSLError, match="arity"):
        parse_seq_dsl("m1 + m3", arity=2)
    s = parse_seq_dsl("m1 + m2")
    with pytest.raises(DSLError, match="arity"):
        s(1)


def test_division_by_zero_is_positional():
    s = parse_seq_dsl("1 + 1/(m1 - 3)")
    assert s(4) == 2
    with pytest.raises(DSLError) as e:
        s(3)
    assert "division by zero" in str(e.value) and e.value.column == 6


def test_functions():
    s = parse_seq_dsl("ite(m1 <= 2, min(m1, 1/2), max(m2, 3)) + abs(-1) + fact(3)", arity=2)
    assert s(1, 0) == Fraction(1, 2) + 1 + 6
    assert s(5, 7) == 7 + 1 + 6
    assert parse_seq_dsl("ite(m1 = 2, 1, 0)")(2) == 1
    assert parse_seq_dsl("ite(m1 ≤ 2, 1, 0)")(2) == 1
    assert parse_seq_dsl("pow(0, m1)")(0) == 1
    assert parse_seq_dsl("zero + one")(0) == 1
    with pytest.raises(DSLError, match="exponent"):
        parse_seq_dsl("pow(2, 1/2)")(0)


def test_approx_builtin():
    v = parse_seq_dsl("approx(pi, m1)")(20)
    assert abs(v - Fraction(314159265358979, 10**14)) < Fraction(1, 2**20)


@pytest.mark.parametrize(
    "src",
    [
        "1 - pow(1/2, m1+1)",
        "1 - (2 - 3)",
        "(1 - 2) - 3",
        "1 / (2 / m1)",
        "-(m1 + 1) * -m2",
        "2 * (m1 + 1) / 3",
        "ite(m1 < m2, approx(e, m1), min(1, 2, -3))",
        "- - 1",
    ],
)
def test_pretty_roundtrip(src):
    tree = parse_expr(src)
    assert parse_expr(pretty(tree)) == tree


def test_pretty_preserves_value():
    src = "1 - (2 - m1) / (3 * (m1 + 1))"
    s = parse_seq_dsl(src)
    t = parse_seq_dsl(s.pretty())
    assert all(s(m) == t(m) for m in range(6))


def test_parse_is_deterministic():
    assert parse_expr("m1*m1+1") == parse_expr("m1 * m1 + 1")
