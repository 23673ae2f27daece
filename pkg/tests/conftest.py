from __future__ import annotations

import hypothesis
from hypothesis import strategies as st

from treecodec import Radical, Structure, StructureOp

# The sandboxed CI boxes this runs on have noisy timing; hypothesis deadlines
# would flap there without telling us anything.
hypothesis.settings.register_profile("ci", deadline=None)
hypothesis.settings.load_profile("ci")

LEAF_NAMES = tuple("abcdefgh")


def tree_strategy(names: tuple[str, ...] = LEAF_NAMES, max_leaves: int = 8):
    """Random binary decomposition trees with single-codepoint leaf names."""
    leaf = st.builds(Radical, st.sampled_from(names))
    ops = st.sampled_from(list(StructureOp))
    return st.recursive(
        leaf,
        lambda sub: st.builds(Structure, ops, sub, sub),
        max_leaves=max_leaves,
    )
