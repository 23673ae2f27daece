"""Parser tests: prefix-notation decomposition strings into binary trees.

The ternary rewrite cases are hand-derived.  For ``⿳⿲abcde`` the outer
above-middle-below node has operands (⿲abc, d, e), so it becomes
``⿱(X, ⿱(d, e))`` with the inner left-middle-right node rewriting to
``X = ⿰(a, ⿰(b, c))``; rendered back out that is ``⿱⿰a⿰bc⿱de``.
"""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from conftest import tree_strategy
from treecodec import (
    CodeParams,
    Radical,
    Structure,
    StructureOp,
    depth,
    leaves,
    load_decompositions,
    parse_ids,
    parse_raw,
    read_ids_file,
    render,
    rewrite_ternary,
    validate,
)
from treecodec.errors import (
    DuplicateCharacterError,
    MalformedIdsError,
    UnknownOperatorError,
)
from treecodec.ids import DepthExceeded, RadicalOverflow, RawStructure

LR = StructureOp.LEFT_RIGHT
AB = StructureOp.ABOVE_BELOW


def test_lone_radical():
    tree = parse_ids("a")
    assert tree == Radical("a")
    assert depth(tree) == 1
    assert leaves(tree) == ["a"]


def test_binary_node():
    assert parse_ids("⿰ab") == Structure(LR, Radical("a"), Radical("b"))


def test_nesting_is_prefix_order():
    # ⿱⿰abc groups as ⿱(⿰(a, b), c): the first operand of ⿱ is the
    # complete ⿰ab subtree, the second is the remaining c.
    tree = parse_ids("⿱⿰abc")
    assert tree == Structure(AB, Structure(LR, Radical("a"), Radical("b")), Radical("c"))
    assert depth(tree) == 3
    assert leaves(tree) == ["a", "b", "c"]


@pytest.mark.parametrize("op", list(StructureOp))
def test_each_binary_operator_parses(op):
    tree = parse_ids(f"{op.value}xy")
    assert tree == Structure(op, Radical("x"), Radical("y"))


def test_operator_indices_follow_codepoint_order():
    ops = list(StructureOp)
    assert [op.index for op in ops] == list(range(10))
    codepoints = [ord(op.value) for op in ops]
    assert codepoints == sorted(codepoints)


def test_whitespace_is_skipped():
    assert parse_ids(" ⿰ a\tb\n") == parse_ids("⿰ab")


def test_non_cjk_leaves_are_fine():
    tree = parse_ids("⿰aQ")
    assert leaves(tree) == ["a", "Q"]


def test_ternary_left_middle_right():
    tree = parse_ids("⿲abc")
    assert tree == Structure(LR, Radical("a"), Structure(LR, Radical("b"), Radical("c")))


def test_ternary_above_middle_below():
    tree = parse_ids("⿳abc")
    assert tree == Structure(AB, Radical("a"), Structure(AB, Radical("b"), Radical("c")))


def test_nested_ternary_rewrite():
    tree = parse_ids("⿳⿲abcde")
    assert render(tree) == "⿱⿰a⿰bc⿱de"
    assert tree == Structure(
        AB,
        Structure(LR, Radical("a"), Structure(LR, Radical("b"), Radical("c"))),
        Structure(AB, Radical("d"), Radical("e")),
    )
    assert depth(tree) == 4
    assert leaves(tree) == ["a", "b", "c", "d", "e"]


def test_raw_tree_keeps_ternary_arity():
    raw = parse_raw("⿲abc")
    assert isinstance(raw, RawStructure)
    assert raw.op_char == "⿲"
    assert len(raw.children) == 3
    assert rewrite_ternary(raw) == parse_ids("⿲abc")


@pytest.mark.parametrize("text", ["", "⿰", "⿰a", "⿲ab", "⿳", "⿱⿰ab"])
def test_truncated_input(text):
    with pytest.raises(MalformedIdsError):
        parse_ids(text)


@pytest.mark.parametrize("text", ["ab", "⿰abc", "⿲abcd", "a⿰bc"])
def test_trailing_material(text):
    with pytest.raises(MalformedIdsError):
        parse_ids(text)


@pytest.mark.parametrize("cp", range(0x2FFC, 0x3000))
def test_reserved_idc_codepoints_rejected(cp):
    with pytest.raises(UnknownOperatorError):
        parse_ids(f"{chr(cp)}ab")


def test_unknown_operator_rejected_anywhere():
    with pytest.raises(UnknownOperatorError):
        parse_ids("⿰a⿼bc")


def test_depth_counts_levels():
    assert depth(parse_ids("⿰ab")) == 2
    assert depth(parse_ids("⿰⿰⿰abcd")) == 4


def test_leaves_left_to_right():
    assert leaves(parse_ids("⿱⿰ab⿰cd")) == ["a", "b", "c", "d"]


def test_validate_accepts_in_bounds():
    params = CodeParams(depth=3, struct_bits=4, radical_bits=8, max_radicals=4)
    assert validate(parse_ids("⿱⿰abc"), params) == []


def test_validate_reports_depth():
    params = CodeParams(depth=3, struct_bits=4, radical_bits=8, max_radicals=4)
    issues = validate(parse_ids("⿰⿰⿰abcd"), params)
    assert issues == [DepthExceeded(actual=4, limit=3)]


def test_validate_reports_both_issues():
    params = CodeParams(depth=3, struct_bits=4, radical_bits=8, max_radicals=2)
    issues = validate(parse_ids("⿰⿰ab⿰cd"), params)
    assert DepthExceeded(actual=3, limit=3) not in issues
    assert RadicalOverflow(actual=4, limit=2) in issues
    deep = validate(parse_ids("⿰⿰⿰abcd"), params)
    assert {type(i) for i in deep} == {DepthExceeded, RadicalOverflow}


@given(tree_strategy())
def test_render_parse_round_trip(tree):
    assert parse_ids(render(tree)) == tree


@given(st.text(alphabet="⿰⿱⿲⿳⿴⿵⿶⿷⿸⿹⿺⿻⿼⿽ab ", max_size=12))
def test_parser_is_total(text):
    # Any input either parses or raises one of the two parse errors; no
    # other exception type ever escapes.
    try:
        tree = parse_ids(text)
    except (MalformedIdsError, UnknownOperatorError):
        return
    assert isinstance(tree, (Radical, Structure))


@given(tree_strategy())
def test_rewrite_output_is_binary(tree):
    # parse_ids output never contains ternary nodes, and re-parsing its
    # rendering is a fixpoint.
    text = render(tree)
    assert parse_ids(text) == rewrite_ternary(parse_raw(text))


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_read_ids_file(tmp_path):
    p = _write(
        tmp_path / "chars.tsv",
        "# comment\n\nX\t⿰ab\nY\ta\n",
    )
    assert read_ids_file(p) == [("X", "⿰ab"), ("Y", "a")]


def test_read_ids_file_duplicate_char(tmp_path):
    p = _write(tmp_path / "chars.tsv", "X\t⿰ab\nX\ta\n")
    with pytest.raises(DuplicateCharacterError, match="2"):
        read_ids_file(p)


@pytest.mark.parametrize("line", ["X", "X\t", "\t⿰ab", "X\t⿰ab\tjunk"])
def test_read_ids_file_bad_record(tmp_path, line):
    p = _write(tmp_path / "chars.tsv", f"ok\ta\n{line}\n")
    with pytest.raises(MalformedIdsError, match="2"):
        read_ids_file(p)


def test_load_decompositions(tmp_path):
    p = _write(tmp_path / "chars.tsv", "X\t⿲abc\n")
    entries = load_decompositions(p)
    assert entries == [("X", parse_ids("⿲abc"))]


def test_load_decompositions_names_offender(tmp_path):
    p = _write(tmp_path / "chars.tsv", "X\ta\nBAD\t⿰a\n")
    with pytest.raises(MalformedIdsError, match="BAD"):
        load_decompositions(p)
