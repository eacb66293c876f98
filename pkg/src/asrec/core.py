"""Core domain types and JSONL dataset I/O."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import DataError
from .lattice import Lattice

logger = logging.getLogger(__name__)

DEFAULT_SEP = "[SEP]"


@dataclass(frozen=True)
class Hypothesis:
    """One ASR hypothesis: text, natural-log ASR score, and 1-based rank."""

    text: str
    asr_logscore: float
    rank: int


@dataclass(frozen=True)
class NBestList:
    """Ranked ASR hypotheses for one utterance.

    Ranks are unique and contiguous from 1.  Lists loaded from disk are
    sorted by descending ASR score; lists assembled from multiple systems
    (see :mod:`asrec.combine`) may deliberately break that ordering.
    """

    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("an N-best list needs at least one hypothesis")
        ranks = [h.rank for h in self.hypotheses]
        if ranks != list(range(1, len(ranks) + 1)):
            raise ValueError(f"ranks must be contiguous from 1, got {ranks}")

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    @property
    def is_score_sorted(self) -> bool:
        scores = [h.asr_logscore for h in self.hypotheses]
        return all(a >= b for a, b in zip(scores, scores[1:]))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, float]]) -> "NBestList":
        """Build a list from (text, logscore) pairs, ranked in the given order."""
        return cls(
            tuple(
                Hypothesis(text, score, rank)
                for rank, (text, score) in enumerate(pairs, start=1)
            )
        )


@dataclass(frozen=True)
class Utterance:
    """One test item; audio is represented only by the opaque id."""

    id: str
    nbest: NBestList
    reference: Optional[str] = None
    lattice: Optional[Lattice] = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("utterance id must be non-empty")


@dataclass(frozen=True)
class EcConfig:
    """Decoding configuration: interpolation weight, beam width, input size."""

    lam: float = 0.5
    beam_width: int = 1
    n_input: int = 5
    length_normalize: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.n_input < 1:
            raise ValueError("n_input must be >= 1")


def sep_concat(nbest: NBestList, n: int, sep: str = DEFAULT_SEP) -> str:
    """Join the texts of the top-``n`` hypotheses with ``sep``."""
    if not 1 <= n <= len(nbest):
        raise ValueError(f"n must be in [1, {len(nbest)}], got {n}")
    return sep.join(h.text for h in nbest.hypotheses[:n])


def _parse_record(obj: dict, line: int) -> Utterance:
    if not isinstance(obj, dict):
        raise DataError("record is not a JSON object", line=line)
    try:
        utt_id = obj["id"]
        raw_nbest = obj["nbest"]
    except KeyError as exc:
        raise DataError(f"missing field {exc.args[0]!r}", line=line) from exc
    if not isinstance(utt_id, str) or not utt_id:
        raise DataError("'id' must be a non-empty string", line=line)
    ref = obj.get("ref")
    if ref is not None and not isinstance(ref, str):
        raise DataError("'ref' must be a string or null", line=line)
    if not isinstance(raw_nbest, list) or not raw_nbest:
        raise DataError("'nbest' must be a non-empty array", line=line)
    pairs = []
    for k, entry in enumerate(raw_nbest):
        try:
            text = entry["text"]
            score = float(entry["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"bad nbest entry {k}: {exc}", line=line) from exc
        if not isinstance(text, str):
            raise DataError(f"bad nbest entry {k}: text must be a string", line=line)
        if not math.isfinite(score):
            raise DataError(f"bad nbest entry {k}: non-finite score", line=line)
        pairs.append((text, score))
    sorted_pairs = sorted(pairs, key=lambda p: -p[1])
    if sorted_pairs != pairs:
        logger.warning(
            "utterance %r: nbest not sorted by descending score; re-sorting", utt_id
        )
        pairs = sorted_pairs
    lattice = None
    if obj.get("lattice") is not None:
        try:
            lattice = Lattice.from_json(obj["lattice"])
        except DataError as exc:
            raise DataError(f"bad lattice: {exc}", line=line) from exc
    return Utterance(
        id=utt_id, nbest=NBestList.from_pairs(pairs), reference=ref, lattice=lattice
    )


def load_dataset(path: str | Path, format: str = "jsonl") -> list[Utterance]:
    """Load utterances from a JSONL dataset file, in file order.

    Scores are stored as given and interpreted as natural-log
    probabilities; convert linear probabilities before ingestion.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported format {format!r}")
    utterances: list[Utterance] = []
    seen: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"invalid JSON: {exc.msg}", line=line_no) from exc
            utt = _parse_record(obj, line_no)
            if utt.id in seen:
                raise DataError(
                    f"duplicate utterance id {utt.id!r} (first seen on line {seen[utt.id]})",
                    line=line_no,
                )
            seen[utt.id] = line_no
            utterances.append(utt)
    return utterances


def save_dataset(utterances: Sequence[Utterance], path: str | Path) -> None:
    """Write utterances as JSONL in the normalized (score-sorted) form."""
    with open(path, "w", encoding="utf-8") as fh:
        for utt in utterances:
            record: dict = {
                "id": utt.id,
                "ref": utt.reference,
                "nbest": [
                    {"text": h.text, "score": h.asr_logscore}
                    for h in utt.nbest.hypotheses
                ],
            }
            if utt.lattice is not None:
                record["lattice"] = utt.lattice.to_json()
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
