"""Code tables and codebook construction.

A character's code vector is ternary (values -1, 0, +1) and splits into two
regions.  The structure region has one ``struct_bits`` block per internal
slot of the embedding grid, filled with that slot's operator code or zeros
when the slot is blank.  The radical region packs the tree's radicals, in
slot order, into the first blocks of ``max_radicals * radical_bits``
positions; remaining blocks stay zero.  Operator and radical codes are
dense (all +-1), so a block is either fully nonzero or fully zero.

Structure operator codes are fixed, not sampled: operator ``k`` (in
:class:`~treecodec.ids.StructureOp` order) takes the ``struct_bits``-bit
binary expansion of ``k + 1``, most significant bit first, with 0 mapped to
-1 and 1 to +1.  Expanding ``k + 1`` rather than ``k`` keeps every operator
code distinct from the all-zero blank block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embed import (
    CodeParams,
    embed_full_tree,
    radical_sequence,
    structure_slots,
)
from .errors import (
    CapacityExceededError,
    CodeCollisionError,
    DuplicateCharacterError,
    DuplicateCodeError,
    DuplicateRadicalError,
    BadFormatError,
    ParamsTooSmallError,
    UnknownRadicalError,
    WrongLengthError,
    ZeroVectorError,
)
from .ids import DecompTree, StructureOp

StructTable = dict[StructureOp, np.ndarray]


def build_struct_table(params: CodeParams) -> StructTable:
    """Fixed +-1 codes for the ten structure operators."""
    bits = params.struct_bits
    if 2 ** bits < len(StructureOp) + 1:
        raise ParamsTooSmallError(
            f"struct_bits={bits} gives {2 ** bits} codes; "
            f"{len(StructureOp)} operators plus blank need more"
        )
    table: StructTable = {}
    for op in StructureOp:
        n = op.index + 1
        row = [1 if (n >> (bits - 1 - b)) & 1 else -1 for b in range(bits)]
        table[op] = np.array(row, dtype=np.int8)
    return table


@dataclass(frozen=True)
class RadicalCodeSet:
    """Immutable radical -> +-1 code map with its provenance.

    ``seed`` is set when the codes were sampled, ``source`` when they were
    loaded from a prototype file; at most one of the two is non-None.
    """

    codes: dict[str, np.ndarray]
    radical_bits: int
    seed: int | None = None
    source: str | None = None
    min_hamming: int = 1

    def __post_init__(self) -> None:
        seen: dict[bytes, str] = {}
        for rid, code in self.codes.items():
            if code.shape != (self.radical_bits,):
                raise WrongLengthError(
                    f"radical {rid!r}: code length {code.shape} != ({self.radical_bits},)"
                )
            if not np.isin(code, (-1, 1)).all():
                if not code.any():
                    raise ZeroVectorError(f"radical {rid!r} has an all-zero code")
                raise ValueError(f"radical {rid!r}: code values must be -1 or +1")
            key = code.tobytes()
            if key in seen:
                raise DuplicateCodeError(
                    f"radicals {seen[key]!r} and {rid!r} share one code"
                )
            seen[key] = rid

    def __getitem__(self, rid: str) -> np.ndarray:
        return self.codes[rid]

    def __contains__(self, rid: str) -> bool:
        return rid in self.codes

    def __len__(self) -> int:
        return len(self.codes)


def gen_radical_codes(
    radicals,
    radical_bits: int,
    seed: int,
    min_hamming: int = 1,
) -> RadicalCodeSet:
    """Sample a distinct +-1 code per radical, seeded and order-independent.

    Radicals are processed in sorted order so the result depends only on the
    set and the seed.  Candidates are drawn uniformly and rejected while any
    accepted code is closer than ``min_hamming``; after ``10 * len(radicals)``
    consecutive rejections the space is declared too tight.
    """
    rids = sorted(set(radicals))
    if min_hamming < 1:
        raise ValueError("min_hamming must be >= 1")
    if len(rids) > 2 ** radical_bits:
        raise CapacityExceededError(
            f"{len(rids)} radicals cannot fit in {2 ** radical_bits} codes "
            f"of {radical_bits} trits"
        )
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    accepted = np.empty((0, radical_bits), dtype=np.int8)
    codes: dict[str, np.ndarray] = {}
    budget = 10 * max(len(rids), 1)
    rejections = 0
    for rid in rids:
        while True:
            cand = rng.choice(np.array([-1, 1], dtype=np.int8), size=radical_bits)
            if accepted.size == 0 or (accepted != cand).sum(axis=1).min() >= min_hamming:
                break
            rejections += 1
            if rejections >= budget:
                raise CapacityExceededError(
                    f"gave up after {rejections} consecutive rejections placing "
                    f"{len(rids)} radicals at radical_bits={radical_bits}, "
                    f"min_hamming={min_hamming}"
                )
        rejections = 0
        accepted = np.vstack([accepted, cand])
        codes[rid] = cand
    return RadicalCodeSet(codes, radical_bits, seed=seed, min_hamming=min_hamming)


def load_prototype_codes(path, radical_bits: int | None = None) -> RadicalCodeSet:
    """Read ``<radical>\\t<code>`` rows, code written as '+' and '-' characters.

    The expected length comes from ``radical_bits`` or, when omitted, from
    the first row.  Lines starting with ``#`` and blank lines are skipped.
    """
    codes: dict[str, np.ndarray] = {}
    by_code: dict[bytes, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise BadFormatError(f"{path}:{lineno}: expected <radical>\\t<code>")
            rid, text = parts
            if set(text) - {"+", "-"}:
                raise BadFormatError(
                    f"{path}:{lineno}: code may contain only '+' and '-'"
                )
            if radical_bits is None:
                radical_bits = len(text)
            if len(text) != radical_bits:
                raise WrongLengthError(
                    f"{path}:{lineno}: code length {len(text)} != {radical_bits}"
                )
            if rid in codes:
                raise DuplicateRadicalError(f"{path}:{lineno}: radical {rid!r} repeated")
            code = np.array([1 if c == "+" else -1 for c in text], dtype=np.int8)
            key = code.tobytes()
            if key in by_code:
                raise DuplicateCodeError(
                    f"{path}:{lineno}: radicals {by_code[key]!r} and {rid!r} "
                    f"share one code"
                )
            by_code[key] = rid
            codes[rid] = code
    if not codes:
        raise BadFormatError(f"{path}: no code rows")
    return RadicalCodeSet(codes, radical_bits, source=str(path))


def encode_char(
    tree: DecompTree,
    struct_table: StructTable,
    radical_codes: RadicalCodeSet,
    params: CodeParams,
) -> np.ndarray:
    """Assemble one character's ternary code vector."""
    slots = embed_full_tree(tree, params)
    code = np.zeros(params.code_length, dtype=np.int8)
    bits = params.struct_bits
    for i, op in enumerate(structure_slots(slots)):
        if op is not None:
            code[i * bits : (i + 1) * bits] = struct_table[op]
    base = params.num_struct_slots * bits
    rbits = params.radical_bits
    for k, rid in enumerate(radical_sequence(slots, params)):
        if rid not in radical_codes:
            raise UnknownRadicalError(f"no code for radical {rid!r}")
        code[base + k * rbits : base + (k + 1) * rbits] = radical_codes[rid]
    return code


@dataclass
class Codebook:
    """Labelled code matrix plus the reserved blank row.

    ``matrix`` is ``(n_chars, code_length)`` int8; ``blank_row`` is a dense
    +-1 row reserved for the no-character output and is never a label.
    ``seed`` records the source of sampled codes (None for prototype files).
    """

    params: CodeParams
    labels: tuple[str, ...]
    matrix: np.ndarray
    blank_row: np.ndarray
    seed: int | None = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.labels = tuple(self.labels)
        if self.matrix.shape != (len(self.labels), self.params.code_length):
            raise ValueError(
                f"matrix shape {self.matrix.shape} != "
                f"({len(self.labels)}, {self.params.code_length})"
            )
        if self.blank_row.shape != (self.params.code_length,):
            raise ValueError("blank_row length does not match code_length")
        if len(set(self.labels)) != len(self.labels):
            raise DuplicateCharacterError("repeated label in codebook")
        rows = {row.tobytes(): i for i, row in enumerate(self.matrix)}
        if len(rows) != len(self.labels):
            raise CodeCollisionError("repeated code row in codebook")
        if self.blank_row.tobytes() in rows:
            raise CodeCollisionError("blank row equals a label row")
        self._index = {label: i for i, label in enumerate(self.labels)}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Codebook):
            return NotImplemented
        return (
            self.params == other.params
            and self.labels == other.labels
            and self.seed == other.seed
            and np.array_equal(self.matrix, other.matrix)
            and np.array_equal(self.blank_row, other.blank_row)
        )

    @property
    def n_chars(self) -> int:
        return len(self.labels)

    @property
    def code_length(self) -> int:
        return self.params.code_length

    @property
    def blank_index(self) -> int:
        """Row index of the blank in the scoring stack."""
        return self.n_chars

    def label_index(self, label: str) -> int:
        return self._index[label]

    def row(self, label: str) -> np.ndarray:
        return self.matrix[self._index[label]]

    def rows_with_blank(self) -> np.ndarray:
        """(n_chars + 1, code_length) stack with the blank row last."""
        return np.vstack([self.matrix, self.blank_row[None, :]])

    def self_scores(self) -> np.ndarray:
        """Per-row nonzero counts; the score of each row against itself."""
        return np.count_nonzero(self.matrix, axis=1).astype(np.int64)


def build_codebook(
    entries,
    struct_table: StructTable,
    radical_codes: RadicalCodeSet,
    params: CodeParams,
    seed: int | None = None,
) -> Codebook:
    """Encode (label, tree) entries into a codebook.

    Identical decompositions encode identically, so they are reported as a
    collision naming both characters rather than silently kept.  The blank
    row is sampled from the radical-code seed (or ``seed`` when the codes
    came from a file) on a separate stream, and resampled until no label row
    can tie with it: a tie would need the blank to agree with a row on that
    row's whole support.
    """
    labels: list[str] = []
    seen: set[str] = set()
    rows: list[np.ndarray] = []
    by_code: dict[bytes, str] = {}
    for label, tree in entries:
        if label in seen:
            raise DuplicateCharacterError(f"character {label!r} listed twice")
        seen.add(label)
        code = encode_char(tree, struct_table, radical_codes, params)
        key = code.tobytes()
        if key in by_code:
            raise CodeCollisionError(
                f"characters {by_code[key]!r} and {label!r} share one code "
                f"(identical decompositions)"
            )
        by_code[key] = label
        labels.append(label)
        rows.append(code)
    if not rows:
        raise ValueError("no entries to encode")
    matrix = np.stack(rows)

    blank_seed = seed if seed is not None else radical_codes.seed
    if blank_seed is None:
        blank_seed = 0
    rng = np.random.default_rng(np.random.SeedSequence(blank_seed, spawn_key=(1,)))
    self_scores = np.count_nonzero(matrix, axis=1)
    wide = matrix.astype(np.int32)
    while True:
        blank = rng.choice(np.array([-1, 1], dtype=np.int8), size=params.code_length)
        if (wide @ blank.astype(np.int32) < self_scores).all():
            break
    return Codebook(params, tuple(labels), matrix, blank, seed=blank_seed)


@dataclass(frozen=True)
class CompressionStats:
    """Classifier parameter counts for one-hot vs ternary-code output layers."""

    feature_dim: int
    one_hot_classes: int
    code_length: int
    one_hot_params: int
    multi_hot_params: int
    ratio: float


def compression_stats(
    params: CodeParams,
    feature_dim: int,
    one_hot_classes: int,
    include_bias: bool = False,
) -> CompressionStats:
    """Output-layer size of a code-emitting head relative to a one-hot head.

    ``ratio`` is the saved fraction, ``1 - multi_hot / one_hot``; it is
    independent of ``feature_dim`` when biases are excluded.
    """
    if feature_dim < 1 or one_hot_classes < 1:
        raise ValueError("feature_dim and one_hot_classes must be positive")
    t = params.code_length
    one_hot = feature_dim * one_hot_classes + (one_hot_classes if include_bias else 0)
    multi = feature_dim * t + (t if include_bias else 0)
    return CompressionStats(
        feature_dim=feature_dim,
        one_hot_classes=one_hot_classes,
        code_length=t,
        one_hot_params=one_hot,
        multi_hot_params=multi,
        ratio=1.0 - multi / one_hot,
    )
