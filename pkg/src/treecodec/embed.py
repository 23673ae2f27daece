"""Embedding of decomposition trees into a fixed-shape full binary tree.

Code layout is fixed by four parameters: a full binary tree of ``depth``
levels provides the slot grid; the first ``2**(depth-1) - 1`` slots (the
internal levels) each contribute ``struct_bits`` positions to the structure
region, and ``max_radicals`` blocks of ``radical_bits`` positions make up the
radical region.  Slots are indexed breadth-first: slot 0 is the root and slot
``i`` has children ``2i + 1`` and ``2i + 2``.  Breadth-first slot order is the
only traversal used anywhere; radical sequences, code assembly, and tests all
share it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RadicalOverflowError, TreeTooDeepError
from .ids import DecompTree, Radical, Structure, StructureOp

# A slot holds a structure operator, a radical name, or nothing (blank).
Slot = StructureOp | str | None
FullTreeSlots = list[Slot]


@dataclass(frozen=True)
class CodeParams:
    """Code layout parameters and the derived vector length."""

    depth: int = 5
    struct_bits: int = 4
    radical_bits: int = 36
    max_radicals: int = 9

    def __post_init__(self) -> None:
        if not 2 <= self.depth <= 8:
            raise ValueError(f"depth must be in [2, 8], got {self.depth}")
        for name in ("struct_bits", "radical_bits", "max_radicals"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_radicals > 2 ** (self.depth - 1):
            raise ValueError(
                f"max_radicals {self.max_radicals} exceeds leaf capacity "
                f"{2 ** (self.depth - 1)} of a depth-{self.depth} tree"
            )

    @property
    def num_struct_slots(self) -> int:
        """Slots on the internal levels; each owns one structure block."""
        return 2 ** (self.depth - 1) - 1

    @property
    def total_slots(self) -> int:
        return 2 ** self.depth - 1

    @property
    def code_length(self) -> int:
        """Total trits: structure region then radical region."""
        return self.num_struct_slots * self.struct_bits + self.max_radicals * self.radical_bits


DEFAULT_PARAMS = CodeParams()


def embed_full_tree(tree: DecompTree, params: CodeParams) -> FullTreeSlots:
    """Place a tree onto the slot grid; unoccupied slots stay blank.

    Nothing is ever placed below a radical: a leaf dominates its whole
    subtree of blank slots.
    """
    slots: FullTreeSlots = [None] * params.total_slots
    _place(tree, 0, slots)
    return slots


def _place(tree: DecompTree, slot: int, slots: FullTreeSlots) -> None:
    if slot >= len(slots):
        raise TreeTooDeepError(
            f"node at slot {slot} falls outside a {len(slots)}-slot grid"
        )
    if isinstance(tree, Radical):
        slots[slot] = tree.name
        return
    slots[slot] = tree.op
    _place(tree.left, 2 * slot + 1, slots)
    _place(tree.right, 2 * slot + 2, slots)


def structure_slots(slots: FullTreeSlots) -> list[StructureOp | None]:
    """Operators on the internal levels, blank where a radical or nothing sits.

    The last level cannot hold a structure (its children would fall off the
    grid), so only the first ``2**(depth-1) - 1`` slots are reported.
    """
    n_internal = (len(slots) + 1) // 2 - 1
    return [s if isinstance(s, StructureOp) else None for s in slots[:n_internal]]


def radical_sequence(slots: FullTreeSlots, params: CodeParams) -> list[str]:
    """Radical names in slot (breadth-first) order."""
    seq = [s for s in slots if isinstance(s, str)]
    if len(seq) > params.max_radicals:
        raise RadicalOverflowError(
            f"{len(seq)} radicals exceed the {params.max_radicals}-block radical region"
        )
    return seq


def embedding_signature(tree: DecompTree, params: CodeParams) -> tuple:
    """Hashable (structure assignment, radical sequence) pair.

    Two trees get the same signature exactly when they embed identically,
    which is exactly when they are the same tree.
    """
    slots = embed_full_tree(tree, params)
    ops = tuple(
        (i, op) for i, op in enumerate(structure_slots(slots)) if op is not None
    )
    return ops, tuple(radical_sequence(slots, params))
