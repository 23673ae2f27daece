"""Parsing of Ideographic Description Sequences into binary decomposition trees.

An IDS describes a character in prefix notation: an operator codepoint from
the IDC block (U+2FF0..U+2FFF) followed by its operands, recursively.  Ten
binary operators are kept as-is; the two ternary ones (three-part left-middle-
right and above-middle-below) are rewritten right-associatively into nested
binary nodes, so downstream code only ever sees binary trees.  Any other
non-operator codepoint is an atomic component and becomes a leaf, CJK or not.

A lone radical is a valid tree of depth 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Union

from .errors import DuplicateCharacterError, MalformedIdsError, UnknownOperatorError


class StructureOp(Enum):
    """The ten binary structure operators, in code-table order."""

    LEFT_RIGHT = "⿰"           # ⿰
    ABOVE_BELOW = "⿱"          # ⿱
    FULL_SURROUND = "⿴"        # ⿴
    SURROUND_ABOVE = "⿵"       # ⿵
    SURROUND_BELOW = "⿶"       # ⿶
    SURROUND_LEFT = "⿷"        # ⿷
    SURROUND_UPPER_LEFT = "⿸"  # ⿸
    SURROUND_UPPER_RIGHT = "⿹" # ⿹
    SURROUND_LOWER_LEFT = "⿺"  # ⿺
    OVERLAID = "⿻"             # ⿻

    @property
    def index(self) -> int:
        """Position in declaration order; fixes this operator's code row."""
        return _OP_ORDER[self]


_OP_ORDER = {op: i for i, op in enumerate(StructureOp)}
_OP_BY_CHAR = {op.value: op for op in StructureOp}

# Ternary operators accepted on input only.  Each rewrites to nested copies of
# a binary operator: f(a, b, c) -> f2(a, f2(b, c)).
TERNARY_LEFT_MIDDLE_RIGHT = "⿲"  # ⿲
TERNARY_ABOVE_MIDDLE_BELOW = "⿳" # ⿳
_TERNARY_TO_BINARY = {
    TERNARY_LEFT_MIDDLE_RIGHT: StructureOp.LEFT_RIGHT,
    TERNARY_ABOVE_MIDDLE_BELOW: StructureOp.ABOVE_BELOW,
}

_IDC_FIRST, _IDC_LAST = 0x2FF0, 0x2FFF


@dataclass(frozen=True)
class Radical:
    """A leaf component, named by its codepoint."""

    name: str


@dataclass(frozen=True)
class Structure:
    """An internal node: a binary operator over two subtrees.

    For surround operators the first IDS operand (the surrounding shape)
    is the left child.
    """

    op: StructureOp
    left: "DecompTree"
    right: "DecompTree"


DecompTree = Union[Radical, Structure]


@dataclass(frozen=True)
class RawStructure:
    """Pre-rewrite node: operator codepoint plus two or three children."""

    op_char: str
    children: tuple["RawTree", ...]


RawTree = Union[Radical, RawStructure]


def _token_stream(text: str) -> Iterator[tuple[str, int]]:
    # Whitespace is a separator, never a component.
    for pos, ch in enumerate(text):
        if not ch.isspace():
            yield ch, pos


def parse_raw(text: str) -> RawTree:
    """Parse an IDS into a tree that may still hold ternary nodes."""
    tokens = _token_stream(text)
    tree = _parse_node(tokens, text)
    for ch, pos in tokens:
        raise MalformedIdsError(
            f"trailing material {ch!r} at offset {pos} in {text!r}"
        )
    return tree


def _parse_node(tokens: Iterator[tuple[str, int]], text: str) -> RawTree:
    try:
        ch, pos = next(tokens)
    except StopIteration:
        raise MalformedIdsError(f"truncated IDS {text!r}") from None
    if ch in _OP_BY_CHAR:
        return RawStructure(ch, (_parse_node(tokens, text), _parse_node(tokens, text)))
    if ch in _TERNARY_TO_BINARY:
        kids = tuple(_parse_node(tokens, text) for _ in range(3))
        return RawStructure(ch, kids)
    if _IDC_FIRST <= ord(ch) <= _IDC_LAST:
        raise UnknownOperatorError(
            f"unsupported IDC operator {ch!r} (U+{ord(ch):04X}) at offset {pos}"
        )
    return Radical(ch)


def rewrite_ternary(tree: RawTree) -> DecompTree:
    """Rewrite ternary nodes right-associatively; binary trees pass unchanged."""
    if isinstance(tree, Radical):
        return tree
    if tree.op_char in _OP_BY_CHAR:
        left, right = (rewrite_ternary(c) for c in tree.children)
        return Structure(_OP_BY_CHAR[tree.op_char], left, right)
    op = _TERNARY_TO_BINARY[tree.op_char]
    a, b, c = (rewrite_ternary(ch) for ch in tree.children)
    return Structure(op, a, Structure(op, b, c))


def parse_ids(text: str) -> DecompTree:
    """Parse an IDS string into a binary decomposition tree."""
    return rewrite_ternary(parse_raw(text))


def render(tree: DecompTree) -> str:
    """Prefix-notation IDS for a tree; inverse of :func:`parse_ids` for
    single-codepoint radical names."""
    if isinstance(tree, Radical):
        return tree.name
    return tree.op.value + render(tree.left) + render(tree.right)


def depth(tree: DecompTree) -> int:
    """Number of levels; a lone radical has depth 1."""
    if isinstance(tree, Radical):
        return 1
    return 1 + max(depth(tree.left), depth(tree.right))


def leaves(tree: DecompTree) -> list[str]:
    """Radical names in left-to-right leaf order."""
    if isinstance(tree, Radical):
        return [tree.name]
    return leaves(tree.left) + leaves(tree.right)


@dataclass(frozen=True)
class DepthExceeded:
    """Tree deeper than the full embedding tree allows."""

    actual: int
    limit: int


@dataclass(frozen=True)
class RadicalOverflow:
    """More radical leaves than the code layout has radical blocks."""

    actual: int
    limit: int


ValidationIssue = Union[DepthExceeded, RadicalOverflow]


def validate(tree: DecompTree, params) -> list[ValidationIssue]:
    """Check a tree against code layout bounds; empty list means encodable."""
    issues: list[ValidationIssue] = []
    d = depth(tree)
    if d > params.depth:
        issues.append(DepthExceeded(d, params.depth))
    n = len(leaves(tree))
    if n > params.max_radicals:
        issues.append(RadicalOverflow(n, params.max_radicals))
    return issues


def read_ids_file(path) -> list[tuple[str, str]]:
    """Read ``<character>\\t<IDS>`` records from a UTF-8 file.

    Lines starting with ``#`` and blank lines are skipped.  A repeated
    character is an input error, as is a record without exactly one tab.
    """
    records: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1].strip():
                raise MalformedIdsError(f"{path}:{lineno}: expected <char>\\t<IDS>")
            char, ids = parts
            if char in seen:
                raise DuplicateCharacterError(f"{path}:{lineno}: duplicate entry for {char!r}")
            seen.add(char)
            records.append((char, ids))
    return records


def load_decompositions(path) -> list[tuple[str, DecompTree]]:
    """Read and parse an IDS file into (character, tree) pairs."""
    entries = []
    for char, ids in read_ids_file(path):
        try:
            entries.append((char, parse_ids(ids)))
        except (MalformedIdsError, UnknownOperatorError) as exc:
            raise type(exc)(f"{path}: entry {char!r}: {exc}") from None
    return entries
