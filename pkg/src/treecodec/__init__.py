"""Ternary tree-structured codebooks for CJK character recognition.

Characters are described by their component trees (parsed from IDS
strings), embedded into a fixed full binary tree, and encoded as ternary
code vectors whose inner products against feature frames drive decoding,
zero-shot recognition, and sequence losses.
"""

from . import errors
from .checks import check_ctc_equivalence, check_ctc_gradients
from .codebook import (
    Codebook,
    CompressionStats,
    RadicalCodeSet,
    build_codebook,
    build_struct_table,
    compression_stats,
    encode_char,
    gen_radical_codes,
    load_prototype_codes,
)
from .embed import (
    CodeParams,
    DEFAULT_PARAMS,
    embed_full_tree,
    radical_sequence,
    structure_slots,
)
from .estimator import TreeCodeEncoder
from .ids import (
    DecompTree,
    Radical,
    Structure,
    StructureOp,
    depth,
    leaves,
    load_decompositions,
    parse_ids,
    parse_raw,
    read_ids_file,
    render,
    rewrite_ternary,
    validate,
)
from .losses import (
    CeResult,
    CtcResult,
    best_path_decode,
    ce_sim_loss,
    ctc_brute_force,
    ctc_sim_loss,
)
from .similarity import (
    batch_decode,
    binarize,
    decode_frame,
    min_score_margin,
    score,
    score_margins,
    topk,
)
from .storage import (
    load_codebook,
    read_frames,
    save_codebook,
    write_frames,
)
from .synth import (
    SynthConfig,
    ZeroShotSplit,
    ablation_sweep,
    build_synthetic_codebook,
    eval_line_zero_shot,
    eval_zero_shot_char,
    gen_char_sample,
    gen_line_sample,
    synthetic_charset,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Codebook",
    "CodeParams",
    "CompressionStats",
    "CtcResult",
    "CeResult",
    "DecompTree",
    "DEFAULT_PARAMS",
    "Radical",
    "RadicalCodeSet",
    "Structure",
    "StructureOp",
    "SynthConfig",
    "TreeCodeEncoder",
    "ZeroShotSplit",
    "ablation_sweep",
    "batch_decode",
    "best_path_decode",
    "binarize",
    "build_codebook",
    "build_struct_table",
    "build_synthetic_codebook",
    "ce_sim_loss",
    "check_ctc_equivalence",
    "check_ctc_gradients",
    "compression_stats",
    "ctc_brute_force",
    "ctc_sim_loss",
    "decode_frame",
    "depth",
    "embed_full_tree",
    "encode_char",
    "eval_line_zero_shot",
    "eval_zero_shot_char",
    "gen_char_sample",
    "gen_line_sample",
    "gen_radical_codes",
    "leaves",
    "load_codebook",
    "load_decompositions",
    "load_prototype_codes",
    "min_score_margin",
    "parse_ids",
    "parse_raw",
    "radical_sequence",
    "read_frames",
    "read_ids_file",
    "render",
    "rewrite_ternary",
    "save_codebook",
    "score",
    "score_margins",
    "structure_slots",
    "synthetic_charset",
    "topk",
    "validate",
    "write_frames",
]
