"""Inner-product similarity between feature frames and codebook rows.

A frame scores against every label row plus the reserved blank row, which is
always last.  Scoring a codebook row against itself gives its nonzero count,
and no other row of the same codebook can exceed that on its frame, so
argmax decoding with a first-index tie rule recovers rows exactly whenever
no earlier row agrees with the frame's row on its whole support.  Integer
inputs are scored in int64 so results are exact; everything else runs in
float64.
"""

from __future__ import annotations

import numpy as np

from .codebook import Codebook
from .errors import DimensionMismatchError, NonFiniteError


def binarize(frames: np.ndarray, mode: str = "hard") -> np.ndarray:
    """Map real frames to +-1 (``hard``, with sign(0) = +1) or tanh (``soft``)."""
    frames = np.asarray(frames)
    if not np.isfinite(frames).all():
        raise NonFiniteError("frames contain NaN or infinity")
    if mode == "hard":
        return np.where(frames >= 0, 1, -1).astype(np.int8)
    if mode == "soft":
        return np.tanh(frames.astype(np.float64))
    raise ValueError(f"unknown binarize mode {mode!r}")


def _check_frames(cb: Codebook, frames: np.ndarray) -> np.ndarray:
    frames = np.asarray(frames)
    if frames.ndim not in (1, 2) or frames.shape[0] != cb.code_length:
        raise DimensionMismatchError(
            f"frames shape {frames.shape} does not match code length {cb.code_length}"
        )
    if not np.isfinite(frames).all():
        raise NonFiniteError("frames contain NaN or infinity")
    return frames


def score(cb: Codebook, frames: np.ndarray) -> np.ndarray:
    """Inner products of every row (blank last) with each frame.

    ``frames`` is one vector or a (code_length, n_frames) matrix with one
    column per frame; the result has a matching trailing shape.
    """
    frames = _check_frames(cb, frames)
    rows = cb.rows_with_blank()
    if np.issubdtype(frames.dtype, np.integer):
        return rows.astype(np.int64) @ frames.astype(np.int64)
    return rows.astype(np.float64) @ frames.astype(np.float64)


def decode_frame(cb: Codebook, frame: np.ndarray) -> tuple[int, int | float]:
    """Best label index for one frame; ties go to the lowest index.

    The blank row scores but is excluded from the argmax: blank is an output
    of sequence decoding, never a character.
    """
    frame = np.asarray(frame)
    if frame.ndim != 1:
        raise DimensionMismatchError(f"decode_frame wants one frame, got {frame.shape}")
    scores = score(cb, frame)[: cb.n_chars]
    idx = int(np.argmax(scores))
    return idx, scores[idx].item()


def topk(cb: Codebook, frame: np.ndarray, k: int) -> list[tuple[int, int | float]]:
    """Top-``k`` label indices by score, ties ordered by index."""
    frame = np.asarray(frame)
    if frame.ndim != 1:
        raise DimensionMismatchError(f"topk wants one frame, got {frame.shape}")
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score(cb, frame)[: cb.n_chars]
    order = np.argsort(-scores, kind="stable")[: min(k, cb.n_chars)]
    return [(int(i), scores[i].item()) for i in order]


def batch_decode(cb: Codebook, frames: np.ndarray, include_blank: bool = False) -> np.ndarray:
    """Argmax index per frame column; float32 matmul, exact for ternary data.

    Products of ternary values sum to at most the code length, far inside
    float32's exact-integer range, so this matches the int64 path while
    letting BLAS do the work.
    """
    frames = _check_frames(cb, frames)
    if frames.ndim == 1:
        frames = frames[:, None]
    rows = cb.rows_with_blank() if include_blank else cb.matrix
    scores = rows.astype(np.float32) @ frames.astype(np.float32)
    return np.argmax(scores, axis=0)


def score_margins(cb: Codebook) -> np.ndarray:
    """Per-row gap between self-score and the best other row on that frame.

    A zero margin means some other row ties the self-score exactly, which
    happens when one decomposition extends another and agrees on its whole
    support; decode order then decides.
    """
    gram = cb.matrix.astype(np.float32) @ cb.matrix.astype(np.float32).T
    gram = gram.astype(np.int64)
    self_scores = np.diag(gram).copy()
    np.fill_diagonal(gram, np.iinfo(np.int64).min)
    return self_scores - gram.max(axis=0)


def min_score_margin(cb: Codebook) -> int:
    """Smallest per-row margin across the codebook."""
    if cb.n_chars < 2:
        return int(cb.self_scores().min())
    return int(score_margins(cb).min())
