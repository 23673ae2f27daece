"""The self-verification suites themselves: report contracts and bounds."""

from __future__ import annotations

import numpy as np

from treecodec import check_ctc_equivalence, check_ctc_gradients
from treecodec.checks import TOY_PARAMS, fd_gradient, random_ctc_instance, random_toy_codebook
from treecodec.losses import min_frames_for


def test_toy_params_length():
    # One structure slot of 4 trits plus two 4-trit radical blocks.
    assert TOY_PARAMS.code_length == 12


def test_random_toy_codebook_is_valid():
    rng = np.random.default_rng(0)
    cb = random_toy_codebook(rng, n_chars=4)
    assert cb.n_chars == 4
    assert np.isin(cb.matrix, (-1, 1)).all()
    assert len({row.tobytes() for row in cb.rows_with_blank()}) == 5


def test_random_instances_respect_bounds():
    rng = np.random.default_rng(1)
    for _ in range(50):
        cb, frames, label, temp = random_ctc_instance(rng, max_paths=100_000)
        n, w = cb.n_chars, frames.shape[1]
        assert 2 <= n <= 6
        assert 1 <= w <= 8
        assert (n + 1) ** w <= 100_000
        assert min_frames_for(label) <= w
        assert ((label >= 0) & (label < n)).all()
        assert temp in (0.5, 1.0, 2.0)


def test_fd_gradient_against_analytic():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 4))
    grad = fd_gradient(lambda v: float(np.sin(v).sum()), x)
    assert np.allclose(grad, np.cos(x), atol=1e-7)


def test_equivalence_report_contract():
    report = check_ctc_equivalence(10, seed=0)
    assert report["instances"] == 10
    assert report["pass"] is True
    assert report["max_loss_diff"] <= report["tolerance"]


def test_gradient_report_contract():
    report = check_ctc_gradients(4, seed=0)
    assert report["pass"] is True
    assert report["max_ctc_grad_rel_err"] <= report["tolerance"]
    assert report["max_ce_grad_rel_err"] <= report["tolerance"]


def test_reports_are_seed_deterministic():
    assert check_ctc_equivalence(5, seed=3) == check_ctc_equivalence(5, seed=3)
    a = check_ctc_equivalence(5, seed=3)
    b = check_ctc_equivalence(5, seed=4)
    assert a["max_loss_diff"] != b["max_loss_diff"]
