"""Self-contained verification suites for the loss implementations.

Two independent oracles back the lattice code: exhaustive path enumeration
for the loss value, and central finite differences for the gradient.  Both
run on small random instances (toy codebooks, random float frames, random
feasible labels) so the suites stay cheap enough to run in CI and from the
command line.
"""

from __future__ import annotations

import numpy as np

from .codebook import Codebook
from .embed import CodeParams
from .errors import CodeCollisionError, DuplicateCharacterError
from .losses import (
    ce_sim_loss,
    ctc_brute_force,
    ctc_sim_loss,
    min_frames_for,
)

TOY_PARAMS = CodeParams(depth=2, struct_bits=4, radical_bits=4, max_radicals=2)

_TEMPERATURES = (0.5, 1.0, 2.0)


def random_toy_codebook(
    rng: np.random.Generator,
    n_chars: int,
    params: CodeParams = TOY_PARAMS,
) -> Codebook:
    """Dense random +-1 codebook; resamples until rows and blank are distinct."""
    t = params.code_length
    pool = np.array([-1, 1], dtype=np.int8)
    while True:
        matrix = rng.choice(pool, size=(n_chars, t))
        blank = rng.choice(pool, size=t)
        try:
            labels = tuple(chr(ord("a") + i) for i in range(n_chars))
            return Codebook(params, labels, matrix, blank, seed=None)
        except (CodeCollisionError, DuplicateCharacterError):
            continue


def random_ctc_instance(
    rng: np.random.Generator,
    max_chars: int = 6,
    max_frames: int = 8,
    max_paths: int = 1_000_000,
    params: CodeParams = TOY_PARAMS,
):
    """(codebook, frames, label, temperature) with a feasible random label.

    The (n_chars, n_frames) pair is drawn uniformly from the grid where
    exhaustive enumeration stays under ``max_paths`` paths.
    """
    grid = [
        (n, w)
        for n in range(2, max_chars + 1)
        for w in range(1, max_frames + 1)
        if (n + 1) ** w <= max_paths
    ]
    n_chars, w = grid[rng.integers(len(grid))]
    cb = random_toy_codebook(rng, n_chars, params)
    frames = rng.normal(0.0, 1.0, size=(params.code_length, w))
    while True:
        length = int(rng.integers(0, min(w, 4) + 1))
        label = rng.integers(0, n_chars, size=length)
        if min_frames_for(label) <= w:
            break
    temperature = float(_TEMPERATURES[rng.integers(len(_TEMPERATURES))])
    return cb, frames, label, temperature


def check_ctc_equivalence(
    n_instances: int = 500,
    seed: int = 0,
    tolerance: float = 1e-9,
    max_paths: int = 1_000_000,
) -> dict:
    """Compare the lattice forward loss against brute-force enumeration."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(10,)))
    worst = 0.0
    for _ in range(n_instances):
        cb, frames, label, temp = random_ctc_instance(rng, max_paths=max_paths)
        fast = ctc_sim_loss(cb, frames, label, temperature=temp).loss
        slow = ctc_brute_force(cb, frames, label, temperature=temp)
        worst = max(worst, abs(fast - slow))
    return {
        "instances": int(n_instances),
        "max_loss_diff": float(worst),
        "tolerance": float(tolerance),
        "pass": bool(worst <= tolerance),
    }


def fd_gradient(fn, frames: np.ndarray, step: float = 1e-4) -> np.ndarray:
    """Central finite differences of a scalar function of the frames."""
    grad = np.zeros_like(frames, dtype=np.float64)
    it = np.nditer(frames, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        bumped = frames.astype(np.float64).copy()
        bumped[idx] += step
        hi = fn(bumped)
        bumped[idx] -= 2 * step
        lo = fn(bumped)
        grad[idx] = (hi - lo) / (2 * step)
    return grad


def _max_rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    # Floor keeps near-zero coordinates from manufacturing huge ratios out
    # of finite-difference noise.
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-3)
    return float((np.abs(analytic - numeric) / denom).max())


def check_ctc_gradients(
    n_instances: int = 100,
    seed: int = 0,
    step: float = 1e-4,
    tolerance: float = 1e-5,
    max_frames: int = 5,
) -> dict:
    """Analytic vs numeric frame gradients for both losses."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(11,)))
    worst_ctc = 0.0
    worst_ce = 0.0
    for _ in range(n_instances):
        cb, frames, label, temp = random_ctc_instance(rng, max_frames=max_frames)
        analytic = ctc_sim_loss(cb, frames, label, temperature=temp).grad_frames
        numeric = fd_gradient(
            lambda f: ctc_sim_loss(cb, f, label, temperature=temp).loss, frames, step
        )
        worst_ctc = max(worst_ctc, _max_rel_err(analytic, numeric))

        frame = frames[:, 0]
        ce_label = int(rng.integers(cb.n_chars))
        analytic_ce = ce_sim_loss(cb, frame, ce_label, temperature=temp).grad_frame
        numeric_ce = fd_gradient(
            lambda f: ce_sim_loss(cb, f, ce_label, temperature=temp).loss, frame, step
        )
        worst_ce = max(worst_ce, _max_rel_err(analytic_ce, numeric_ce))
    return {
        "instances": int(n_instances),
        "step": float(step),
        "max_ctc_grad_rel_err": float(worst_ctc),
        "max_ce_grad_rel_err": float(worst_ce),
        "tolerance": float(tolerance),
        "pass": bool(worst_ctc <= tolerance and worst_ce <= tolerance),
    }
