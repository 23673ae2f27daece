"""Estimator-style facade over codebook building, encoding, and decoding.

`TreeCodeEncoder` follows the scikit-learn contract: constructor arguments
are stored untouched, `fit` builds the fitted state under trailing-underscore
names and returns `self`, and `get_params`/`set_params`/`clone` behave as the
ecosystem expects.  `fit` consumes (character, decomposition) pairs,
`transform` encodes decompositions into ternary code vectors, and `predict`
recognizes feature frames by code similarity, so the codebook slots into
pipelines as either a target encoder or a frame classifier.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .codebook import (
    RadicalCodeSet,
    build_codebook,
    build_struct_table,
    encode_char,
    gen_radical_codes,
    load_prototype_codes,
)
from .embed import CodeParams
from .errors import DimensionMismatchError
from .ids import DecompTree, Radical, Structure, leaves, parse_ids
from .similarity import binarize


def _as_tree(item) -> DecompTree:
    if isinstance(item, (Radical, Structure)):
        return item
    if isinstance(item, str):
        return parse_ids(item)
    raise TypeError(f"expected an IDS string or a decomposition tree, got {type(item)!r}")


def _as_entries(X) -> list[tuple[str, DecompTree]]:
    pairs = X.items() if isinstance(X, dict) else X
    entries = []
    for pair in pairs:
        label, decomp = pair
        entries.append((label, _as_tree(decomp)))
    return entries


class TreeCodeEncoder(BaseEstimator, TransformerMixin):
    """Ternary code encoder and nearest-code classifier for characters.

    Parameters
    ----------
    depth, struct_bits, radical_bits, max_radicals : int
        Code layout; see :class:`~treecodec.embed.CodeParams`.
    min_hamming : int
        Minimum pairwise Hamming distance between sampled radical codes.
    seed : int or None
        Seed for radical code and blank row sampling; None means 0.
    radical_source : None, str, or RadicalCodeSet
        None samples codes for the radicals observed in ``fit``; a path
        loads a prototype code file; a code set is used as given.
    binarize_mode : {"hard", "soft", "none"}
        Preprocessing applied to frames in ``predict`` and
        ``decision_function``.
    """

    def __init__(
        self,
        depth: int = 5,
        struct_bits: int = 4,
        radical_bits: int = 36,
        max_radicals: int = 9,
        min_hamming: int = 1,
        seed: int | None = None,
        radical_source=None,
        binarize_mode: str = "hard",
    ):
        self.depth = depth
        self.struct_bits = struct_bits
        self.radical_bits = radical_bits
        self.max_radicals = max_radicals
        self.min_hamming = min_hamming
        self.seed = seed
        self.radical_source = radical_source
        self.binarize_mode = binarize_mode

    def fit(self, X, y=None):
        """Build the codebook from (character, decomposition) pairs.

        ``X`` is an iterable of ``(label, ids_or_tree)`` pairs or a dict;
        ``y`` is ignored and accepted for pipeline compatibility.
        """
        entries = _as_entries(X)
        params = CodeParams(self.depth, self.struct_bits, self.radical_bits,
                            self.max_radicals)
        seed = 0 if self.seed is None else self.seed
        if self.radical_source is None:
            radicals = sorted({r for _, tree in entries for r in leaves(tree)})
            codes = gen_radical_codes(radicals, params.radical_bits, seed,
                                      self.min_hamming)
        elif isinstance(self.radical_source, RadicalCodeSet):
            codes = self.radical_source
        else:
            codes = load_prototype_codes(self.radical_source, params.radical_bits)
        self.params_ = params
        self.struct_table_ = build_struct_table(params)
        self.radical_codes_ = codes
        self.codebook_ = build_codebook(entries, self.struct_table_, codes,
                                        params, seed=seed)
        self.classes_ = np.array(self.codebook_.labels)
        return self

    def _require_fitted(self) -> None:
        if not hasattr(self, "codebook_"):
            raise NotFittedError(
                "This TreeCodeEncoder instance is not fitted yet; call fit first."
            )

    def transform(self, X) -> np.ndarray:
        """Encode decompositions into an (n, code_length) int8 matrix.

        Accepts IDS strings, trees, or (label, decomposition) pairs; the
        decomposition may use any radical the fitted code table knows, so
        characters never seen by ``fit`` encode fine.
        """
        self._require_fitted()
        rows = []
        for item in X:
            if isinstance(item, tuple) and len(item) == 2:
                item = item[1]
            tree = _as_tree(item)
            rows.append(encode_char(tree, self.struct_table_, self.radical_codes_,
                                    self.params_))
        if not rows:
            return np.empty((0, self.params_.code_length), dtype=np.int8)
        return np.stack(rows)

    def _frame_matrix(self, X) -> np.ndarray:
        self._require_fitted()
        X = check_array(X, dtype=np.float64, ensure_2d=True)
        if X.shape[1] != self.params_.code_length:
            raise DimensionMismatchError(
                f"frames have {X.shape[1]} features, codebook expects "
                f"{self.params_.code_length}"
            )
        if self.binarize_mode != "none":
            X = binarize(X, mode=self.binarize_mode)
        return X

    def decision_function(self, X) -> np.ndarray:
        """Similarity of each frame row to every fitted character."""
        X = self._frame_matrix(X)
        return X.astype(np.float64) @ self.codebook_.matrix.astype(np.float64).T

    def predict(self, X) -> np.ndarray:
        """Most similar character per frame row; ties pick the first label."""
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]
