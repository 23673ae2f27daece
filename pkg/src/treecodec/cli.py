"""Command line interface.

Exit codes: 0 on success, 1 for domain errors (bad decompositions, capacity,
collisions, unknown labels), 2 for I/O and file-format errors.  Reports go
to stdout as JSON by default; ``--format tsv`` flattens them for shell
pipelines.  When ``--seed`` is omitted, the ``HIERCODE_SEED`` environment
variable is consulted before falling back to 0, so runs stay reproducible
from flags alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .checks import check_ctc_equivalence, check_ctc_gradients
from .codebook import build_codebook, build_struct_table, compression_stats, gen_radical_codes, load_prototype_codes
from .embed import CodeParams
from .errors import (
    BadLabelError,
    CorruptError,
    DimensionMismatchError,
    RadicalOverflowError,
    TreecodecError,
    TreeTooDeepError,
    VersionMismatchError,
)
from .ids import DepthExceeded, leaves, load_decompositions, validate
from .losses import best_path_decode
from .similarity import min_score_margin, topk
from .storage import load_codebook, read_frames, save_codebook, write_frames
from .synth import (
    SynthConfig,
    ZeroShotSplit,
    ablation_sweep,
    build_synthetic_codebook,
    eval_line_zero_shot,
    eval_zero_shot_char,
    synthetic_charset,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

SEED_ENV = "HIERCODE_SEED"


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _tsv_lines(report) -> list[str]:
    def cell(v):
        return json.dumps(v, ensure_ascii=False) if isinstance(v, (list, dict)) else str(v)

    if isinstance(report, list):
        if not report:
            return []
        keys = list(report[0])
        return ["\t".join(keys)] + ["\t".join(cell(row[k]) for k in keys) for row in report]
    table_key = next((k for k in ("rows", "results") if isinstance(report.get(k), list)), None)
    lines = [f"# {k}\t{cell(v)}" for k, v in report.items() if k != table_key]
    if table_key:
        lines += _tsv_lines(report[table_key])
    return lines


def _emit(report, args) -> None:
    if args.format == "json":
        text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(_tsv_lines(report)) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_format_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "tsv"), default="json",
                   help="report format (default json)")
    p.add_argument("--out", help="write the report here instead of stdout")


def _add_layout_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=5, help="full tree depth (default 5)")
    p.add_argument("--struct-bits", type=int, default=4,
                   help="trits per structure block (default 4)")
    p.add_argument("--radical-bits", type=int, default=36,
                   help="trits per radical block (default 36)")
    p.add_argument("--max-radicals", type=int, default=9,
                   help="radical blocks per code (default 9)")
    p.add_argument("--min-hamming", type=int, default=1,
                   help="minimum distance between sampled radical codes")
    p.add_argument("--seed", type=int, default=None,
                   help=f"sampling seed (default: ${SEED_ENV} or 0)")


def _params(args) -> CodeParams:
    return CodeParams(args.depth, args.struct_bits, args.radical_bits, args.max_radicals)


def _trit_text(row) -> str:
    return "".join("+" if v == 1 else "-" if v == -1 else "0" for v in row)


def cmd_build_codebook(args) -> int:
    entries = load_decompositions(args.ids)
    params = _params(args)
    seed = _resolve_seed(args.seed)
    for label, tree in entries:
        for issue in validate(tree, params):
            exc = TreeTooDeepError if isinstance(issue, DepthExceeded) else RadicalOverflowError
            raise exc(
                f"{args.ids}: character {label!r}: "
                f"{type(issue).__name__}(actual={issue.actual}, limit={issue.limit})"
            )
    if args.prototypes:
        codes = load_prototype_codes(args.prototypes, params.radical_bits)
    else:
        radicals = sorted({r for _, tree in entries for r in leaves(tree)})
        codes = gen_radical_codes(radicals, params.radical_bits, seed, args.min_hamming)
    cb = build_codebook(entries, build_struct_table(params), codes, params, seed=seed)
    save_codebook(cb, args.out_path)
    _emit({
        "n_chars": cb.n_chars,
        "code_length": cb.code_length,
        "n_radicals": len(codes),
        "min_margin": int(min_score_margin(cb)),
        "seed": seed if not args.prototypes else None,
        "path": str(args.out_path),
    }, args)
    return EXIT_OK


def cmd_encode(args) -> int:
    cb = load_codebook(args.codebook)
    chars = list(args.text)
    missing = sorted({c for c in chars if c not in cb.labels})
    if missing:
        raise BadLabelError(f"{args.codebook}: characters not in codebook: {missing}")
    frames = cb.matrix[[cb.label_index(c) for c in chars]].T
    if args.frames_out:
        write_frames(args.frames_out, frames, fmt=args.frames_format)
        _emit({"n_frames": len(chars), "code_length": cb.code_length,
               "path": str(args.frames_out)}, args)
    else:
        for c in chars:
            sys.stdout.write(f"{c}\t{_trit_text(cb.row(c))}\n")
    return EXIT_OK


def cmd_decode(args) -> int:
    cb = load_codebook(args.codebook)
    frames = read_frames(args.frames, args.frames_format)
    if frames.shape[0] != cb.code_length:
        raise DimensionMismatchError(
            f"{args.frames}: frames have {frames.shape[0]} rows, "
            f"codebook code length is {cb.code_length}"
        )
    if args.mode == "line":
        indices = best_path_decode(cb, frames)
        _emit({
            "transcript": "".join(cb.labels[i] for i in indices),
            "indices": [int(i) for i in indices],
            "n_frames": int(frames.shape[1]),
        }, args)
        return EXIT_OK
    rows = []
    for w in range(frames.shape[1]):
        best = topk(cb, frames[:, w], args.topk)
        rows.append({
            "frame": w,
            "topk": [{"label": cb.labels[i], "score": s} for i, s in best],
        })
    if args.format == "tsv":
        lines = ["frame\trank\tlabel\tscore"]
        for row in rows:
            for rank, hit in enumerate(row["topk"]):
                lines.append(f"{row['frame']}\t{rank}\t{hit['label']}\t{hit['score']}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(rows, args)
    return EXIT_OK


def cmd_stats(args) -> int:
    if args.codebook:
        params = load_codebook(args.codebook).params
    else:
        params = _params(args)
    st = compression_stats(params, args.feature_dim, args.classes,
                           include_bias=args.bias)
    _emit({
        "feature_dim": st.feature_dim,
        "one_hot_classes": st.one_hot_classes,
        "code_length": st.code_length,
        "one_hot_params": st.one_hot_params,
        "multi_hot_params": st.multi_hot_params,
        "ratio": st.ratio,
    }, args)
    return EXIT_OK


def _synth_setup(args):
    seed = _resolve_seed(args.seed)
    charset = synthetic_charset(args.chars, args.radicals, args.max_depth, seed,
                                max_radicals=args.max_radicals)
    config = SynthConfig(
        noise_sigma=args.sigma,
        flip_rate=args.flip_rate,
        frames_per_char=args.frames_per_char,
        blank_prob=args.blank_prob,
        seed=seed,
    )
    return seed, charset, config


def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chars", type=int, default=500, help="synthetic charset size")
    p.add_argument("--radicals", type=int, default=40, help="radical alphabet size")
    p.add_argument("--max-depth", type=int, default=4, help="max sampled tree depth")
    p.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise level")
    p.add_argument("--flip-rate", type=float, default=0.0, help="trit flip probability")
    p.add_argument("--frames-per-char", type=int, default=2)
    p.add_argument("--blank-prob", type=float, default=0.25)


def cmd_eval_zeroshot(args) -> int:
    t0 = time.perf_counter()
    seed, charset, config = _synth_setup(args)
    params = _params(args)
    cb, _ = build_synthetic_codebook(charset, params, seed=seed,
                                     min_hamming=args.min_hamming)
    ms = args.m or [int(round(cb.n_chars * 0.6))]
    results = []
    for m in ms:
        split = ZeroShotSplit(m, cb.n_chars)
        if args.mode in ("char", "both"):
            results.append(eval_zero_shot_char(cb, split, config, trials=args.trials))
        if args.mode in ("line", "both"):
            results.append(eval_line_zero_shot(cb, split, config,
                                               line_length=args.line_length,
                                               trials=args.line_trials))
    _emit({
        "config": {
            "chars": cb.n_chars, "radicals": args.radicals,
            "max_depth": args.max_depth, "seed": seed,
            "flip_rate": config.flip_rate, "sigma": config.noise_sigma,
            "frames_per_char": config.frames_per_char,
            "blank_prob": config.blank_prob,
            "depth": params.depth, "struct_bits": params.struct_bits,
            "radical_bits": params.radical_bits,
            "max_radicals": params.max_radicals,
            "min_hamming": args.min_hamming,
        },
        "code_length": cb.code_length,
        "min_margin": int(min_score_margin(cb)),
        "results": results,
        "runtime_s": round(time.perf_counter() - t0, 3),
    }, args)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    seed, charset, config = _synth_setup(args)
    grid = {}
    if args.depth_grid:
        grid["depth"] = args.depth_grid
    if args.struct_bits_grid:
        grid["struct_bits"] = args.struct_bits_grid
    if args.radical_bits_grid:
        grid["radical_bits"] = args.radical_bits_grid
    if args.min_hamming_grid:
        grid["min_hamming"] = args.min_hamming_grid
    rows = ablation_sweep(
        charset, grid, config,
        seen_fraction=args.seen_fraction,
        trials=args.trials,
        line_trials=args.line_trials,
        line_length=args.line_length,
        base_params=_params(args),
    )
    _emit({
        "config": {
            "chars": len(charset), "radicals": args.radicals,
            "max_depth": args.max_depth, "seed": seed,
            "flip_rate": config.flip_rate, "sigma": config.noise_sigma,
            "seen_fraction": args.seen_fraction,
            "grid": {k: list(v) for k, v in grid.items()},
        },
        "rows": rows,
        "runtime_s": round(time.perf_counter() - t0, 3),
    }, args)
    return EXIT_OK


def cmd_ctc_check(args) -> int:
    t0 = time.perf_counter()
    seed = _resolve_seed(args.seed)
    eq = check_ctc_equivalence(args.instances, seed=seed, tolerance=args.tolerance)
    gr = check_ctc_gradients(args.grad_instances, seed=seed, step=args.step,
                             tolerance=args.grad_tolerance)
    ok = eq["pass"] and gr["pass"]
    _emit({
        "equivalence": eq,
        "gradients": gr,
        "pass": ok,
        "runtime_s": round(time.perf_counter() - t0, 3),
    }, args)
    return EXIT_OK if ok else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treecodec",
        description="Ternary tree-structured codebooks for CJK character recognition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-codebook", help="encode an IDS file into a codebook")
    p.add_argument("--ids", required=True, help="decomposition file: <char>\\t<IDS> per line")
    p.add_argument("--out", dest="out_path", required=True, help="codebook file to write")
    p.add_argument("--prototypes", help="radical prototype code file (<radical>\\t<+-code>)")
    _add_layout_flags(p)
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_build_codebook, out=None)

    p = sub.add_parser("encode", help="look up code vectors for characters")
    p.add_argument("--codebook", required=True)
    p.add_argument("--text", required=True, help="characters to encode")
    p.add_argument("--frames-out", dest="frames_out",
                   help="write codes as a frames file instead of trit text")
    p.add_argument("--frames-format", choices=("bin", "tsv"), default="bin")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_encode, out=None)

    p = sub.add_parser("decode", help="decode a frames file against a codebook")
    p.add_argument("--codebook", required=True)
    p.add_argument("--frames", required=True)
    p.add_argument("--frames-format", choices=("bin", "tsv"), default=None,
                   help="frames file format (default: by extension)")
    p.add_argument("--mode", choices=("line", "char"), default="line")
    p.add_argument("--topk", type=int, default=1, help="candidates per frame in char mode")
    _add_format_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("stats", help="output-layer size versus a one-hot classifier")
    p.add_argument("--codebook", help="take the code length from this codebook file")
    p.add_argument("--feature-dim", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--bias", action="store_true", help="count per-output biases")
    _add_layout_flags(p)
    _add_format_flags(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval-zeroshot", help="zero-shot decoding on synthetic characters")
    _add_synth_flags(p)
    p.add_argument("--m", type=int, action="append",
                   help="seen-label count; repeatable (default: 60%% of chars)")
    p.add_argument("--mode", choices=("char", "line", "both"), default="char")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--line-trials", type=int, default=100)
    p.add_argument("--line-length", type=int, default=5)
    _add_layout_flags(p)
    _add_format_flags(p)
    p.set_defaults(func=cmd_eval_zeroshot)

    p = sub.add_parser("sweep", help="re-encode one charset under a parameter grid")
    _add_synth_flags(p)
    p.add_argument("--depth-grid", type=_int_list)
    p.add_argument("--struct-bits-grid", type=_int_list)
    p.add_argument("--radical-bits-grid", type=_int_list)
    p.add_argument("--min-hamming-grid", type=_int_list)
    p.add_argument("--seen-fraction", type=float, default=0.6)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--line-trials", type=int, default=100)
    p.add_argument("--line-length", type=int, default=5)
    _add_layout_flags(p)
    _add_format_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ctc-check", help="loss oracle and gradient verification suites")
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--grad-instances", type=int, default=50)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--grad-tolerance", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=None)
    _add_format_flags(p)
    p.set_defaults(func=cmd_ctc_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CorruptError, VersionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TreecodecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
