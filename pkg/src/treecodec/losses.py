"""Sequence and per-character losses over similarity scores.

Both losses turn similarity scores into per-frame distributions with a
temperature-scaled softmax and run entirely in float64.  The CTC-style loss
treats the blank row as class ``n_chars`` and marginalizes over all frame
alignments of the label with the usual collapse semantics (merge repeats,
then drop blanks); its lattice recursions stay in the log domain so long and
improbable labels lose mass gracefully instead of underflowing.

Gradients are taken with respect to the frames only.  Codebook rows are
constants here: the code matrix is a fixed target structure, not a trainable
weight, so the chain runs scores -> softmax -> loss and back out through the
score matmul onto the frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax, logsumexp

from .codebook import Codebook
from .errors import (
    BadLabelError,
    InfeasibleLabelError,
    NonFiniteError,
    TooLargeError,
)
from .similarity import score

# Hard ceilings for the brute-force oracle; above them the path count is
# beyond what exhaustive enumeration should ever attempt.
BRUTE_FORCE_MAX_FRAMES = 8
BRUTE_FORCE_MAX_CHARS = 6


@dataclass(frozen=True)
class CtcResult:
    loss: float
    grad_frames: np.ndarray


@dataclass(frozen=True)
class CeResult:
    loss: float
    grad_frame: np.ndarray


def _log_probs(cb: Codebook, frames: np.ndarray, temperature: float) -> tuple[np.ndarray, np.ndarray]:
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    scores = np.asarray(score(cb, frames), dtype=np.float64)
    if scores.ndim == 1:
        scores = scores[:, None]
    logits = scores / temperature
    return log_softmax(logits, axis=0), logits


def _check_label(label, n_chars: int) -> np.ndarray:
    label = np.asarray(label, dtype=np.int64).reshape(-1)
    if label.size and not ((label >= 0) & (label < n_chars)).all():
        raise BadLabelError(
            f"label indices must be in [0, {n_chars}), got {label.tolist()}"
        )
    return label


def min_frames_for(label: np.ndarray) -> int:
    """Fewest frames any alignment of this label needs."""
    if label.size == 0:
        return 0
    return int(label.size + np.count_nonzero(label[1:] == label[:-1]))


def ctc_sim_loss(
    cb: Codebook,
    frames: np.ndarray,
    label,
    temperature: float = 1.0,
) -> CtcResult:
    """Negative log probability of ``label`` with its frame gradient.

    ``frames`` is (code_length, n_frames); ``label`` is a sequence of row
    indices, possibly empty (all-blank).  Raises when no alignment can
    produce the label in the given frame count.
    """
    label = _check_label(label, cb.n_chars)
    lp, _ = _log_probs(cb, frames, temperature)
    n_rows, w = lp.shape
    if w < 1:
        raise ValueError("need at least one frame")
    if w < min_frames_for(label):
        raise InfeasibleLabelError(
            f"label of length {label.size} (with repeats) needs at least "
            f"{min_frames_for(label)} frames, got {w}"
        )
    blank = cb.blank_index

    # Blank-augmented label: blank, l1, blank, l2, ..., blank.
    s_len = 2 * label.size + 1
    aug = np.full(s_len, blank, dtype=np.int64)
    aug[1::2] = label
    # A skip s-2 -> s jumps the blank between two different labels.
    can_skip = np.zeros(s_len, dtype=bool)
    if s_len > 2:
        can_skip[2:] = (aug[2:] != blank) & (aug[2:] != aug[:-2])

    neg = -np.inf
    emit = lp[aug, :]  # (s_len, w) emission log probs along the lattice

    alpha = np.full((s_len, w), neg)
    alpha[0, 0] = emit[0, 0]
    if s_len > 1:
        alpha[1, 0] = emit[1, 0]
    for t in range(1, w):
        prev = alpha[:, t - 1]
        acc = np.logaddexp(prev, np.concatenate(([neg], prev[:-1])))
        skip = np.full(s_len, neg)
        skip[2:][can_skip[2:]] = prev[:-2][can_skip[2:]]
        alpha[:, t] = np.logaddexp(acc, skip) + emit[:, t]

    tail = alpha[s_len - 1, w - 1]
    if s_len > 1:
        tail = np.logaddexp(tail, alpha[s_len - 2, w - 1])
    log_like = tail
    loss = -float(log_like)
    if not np.isfinite(loss):
        raise NonFiniteError("CTC loss is not finite")

    beta = np.full((s_len, w), neg)
    beta[s_len - 1, w - 1] = emit[s_len - 1, w - 1]
    if s_len > 1:
        beta[s_len - 2, w - 1] = emit[s_len - 2, w - 1]
    for t in range(w - 2, -1, -1):
        nxt = beta[:, t + 1]
        acc = np.logaddexp(nxt, np.concatenate((nxt[1:], [neg])))
        skip = np.full(s_len, neg)
        skip[:-2][can_skip[2:]] = nxt[2:][can_skip[2:]]
        beta[:, t] = np.logaddexp(acc, skip) + emit[:, t]

    # Lattice-state occupancy, folded back onto rows.  alpha and beta both
    # include the emission at (s, t), so it is divided out once.
    log_occ = alpha + beta - emit - log_like
    gamma = np.zeros((n_rows, w))
    np.add.at(gamma, aug, np.exp(log_occ))

    probs = np.exp(lp)
    grad_scores = (probs - gamma) / temperature
    rows = cb.rows_with_blank().astype(np.float64)
    grad_frames = rows.T @ grad_scores
    if not np.isfinite(grad_frames).all():
        raise NonFiniteError("CTC gradient is not finite")
    return CtcResult(loss=loss, grad_frames=grad_frames)


def ctc_brute_force(
    cb: Codebook,
    frames: np.ndarray,
    label,
    temperature: float = 1.0,
) -> float:
    """Loss by summing every frame assignment that collapses to ``label``.

    Enumerates all ``(n_chars + 1) ** n_frames`` assignments, so it is an
    oracle for small instances only; bounds are enforced, not trusted.
    """
    label = _check_label(label, cb.n_chars)
    lp, _ = _log_probs(cb, frames, temperature)
    n_rows, w = lp.shape
    if w > BRUTE_FORCE_MAX_FRAMES or cb.n_chars > BRUTE_FORCE_MAX_CHARS:
        raise TooLargeError(
            f"brute force supports up to {BRUTE_FORCE_MAX_FRAMES} frames over "
            f"{BRUTE_FORCE_MAX_CHARS} characters, got {w} over {cb.n_chars}"
        )
    blank = cb.blank_index
    n_paths = n_rows**w

    path_ids = np.arange(n_paths, dtype=np.int64)
    digits = np.empty((n_paths, w), dtype=np.int8)
    for col in range(w):
        digits[:, col] = (path_ids // n_rows ** (w - 1 - col)) % n_rows

    log_p = np.zeros(n_paths)
    for col in range(w):
        log_p += lp[digits[:, col], col]

    # Collapse each path with positional base-(n_rows + 1) keys: a kept
    # symbol is one that differs from its predecessor and is not blank.
    prev = np.empty_like(digits)
    prev[:, 0] = -1
    prev[:, 1:] = digits[:, :-1]
    keep = (digits != prev) & (digits != blank)
    pos = np.cumsum(keep, axis=1) - keep
    base = n_rows + 1
    key = (keep * (digits.astype(np.int64) + 1) * base ** pos.astype(np.int64)).sum(axis=1)
    target = int(((label + 1) * base ** np.arange(label.size, dtype=np.int64)).sum())

    matched = key == target
    if not matched.any():
        raise InfeasibleLabelError(
            f"no {w}-frame assignment collapses to label {label.tolist()}"
        )
    return -float(logsumexp(log_p[matched]))


def ce_sim_loss(
    cb: Codebook,
    frame: np.ndarray,
    label: int,
    temperature: float = 1.0,
) -> CeResult:
    """Per-character cross entropy over label rows only; blank is excluded."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if not 0 <= int(label) < cb.n_chars:
        raise BadLabelError(f"label {label} outside [0, {cb.n_chars})")
    frame = np.asarray(frame)
    if frame.ndim != 1:
        raise ValueError(f"ce_sim_loss wants one frame, got shape {frame.shape}")
    scores = np.asarray(score(cb, frame), dtype=np.float64)[: cb.n_chars]
    lp = log_softmax(scores / temperature)
    loss = -float(lp[int(label)])
    probs = np.exp(lp)
    probs[int(label)] -= 1.0
    grad = cb.matrix.astype(np.float64).T @ (probs / temperature)
    if not (np.isfinite(loss) and np.isfinite(grad).all()):
        raise NonFiniteError("cross-entropy loss is not finite")
    return CeResult(loss=loss, grad_frame=grad)


def best_path_decode(cb: Codebook, frames: np.ndarray, temperature: float = 1.0) -> list[int]:
    """Greedy decode: per-frame argmax, merge repeats, drop blanks.

    The argmax includes the blank row; temperature rescales scores
    monotonically, so it is accepted for signature symmetry but cannot
    change the result.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    frames = np.asarray(frames)
    if frames.ndim == 1:
        frames = frames[:, None]
    raw = np.asarray(score(cb, frames)).argmax(axis=0)
    out: list[int] = []
    prev = -1
    for idx in raw:
        if idx != prev and idx != cb.blank_index:
            out.append(int(idx))
        prev = int(idx)
    return out
