"""ASR error correction toolkit.

N-best and lattice constrained decoding with an abstracted error-correction
scorer, the full WER/oracle/cross-WER evaluation stack, ROVER-style system
combination, zero-shot prompting, and a data-contamination quiz harness.
"""

from .core import (
    DEFAULT_SEP,
    EcConfig,
    Hypothesis,
    NBestList,
    Utterance,
    load_dataset,
    save_dataset,
    sep_concat,
)
from .lattice import Lattice
from .metrics import AlignmentCounts, align, corpus_wer, cross_wer, oracle_wer, uniq, werr
from .scorer import ScorerContext, ToyCharBigramScorer

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEP",
    "AlignmentCounts",
    "EcConfig",
    "Hypothesis",
    "Lattice",
    "NBestList",
    "ScorerContext",
    "ToyCharBigramScorer",
    "Utterance",
    "align",
    "corpus_wer",
    "cross_wer",
    "load_dataset",
    "oracle_wer",
    "save_dataset",
    "sep_concat",
    "uniq",
    "werr",
    "__version__",
]
