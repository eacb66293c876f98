"""Edit-distance alignment and corpus-level ASR statistics.

Everything here works on token sequences; text is normalized with
:mod:`asrec.textnorm` before tokenization.  Corpus WER is computed from
summed counts, never by averaging per-utterance WERs.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

from .errors import DataError
from .textnorm import normalize_eval, normalize_stats

if TYPE_CHECKING:
    from .core import NBestList, Utterance

# alignment operation labels
COR = "cor"
SUB = "sub"
DEL = "del"
INS = "ins"


def round_half_up(value: float, ndigits: int = 2) -> float:
    """Round with halves going away from zero (report convention)."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class AlignmentCounts:
    """Counts from one or more edit-distance alignments."""

    correct: int = 0
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_len: int = 0

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> Optional[float]:
        """WER as a fraction, or None when the reference is empty."""
        if self.ref_len == 0:
            return None
        return self.errors / self.ref_len

    def __add__(self, other: "AlignmentCounts") -> "AlignmentCounts":
        return AlignmentCounts(
            self.correct + other.correct,
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_len + other.ref_len,
        )

    def to_dict(self) -> dict:
        return {
            "cor": self.correct,
            "sub": self.substitutions,
            "del": self.deletions,
            "ins": self.insertions,
            "ref_len": self.ref_len,
        }


@dataclass(frozen=True)
class Alignment:
    """Minimal edit alignment: counts plus the operation path."""

    counts: AlignmentCounts
    # (op, ref_token | None, hyp_token | None) per step, in sequence order
    ops: tuple[tuple[str, Optional[str], Optional[str]], ...]


def align(ref: Sequence[str], hyp: Sequence[str]) -> Alignment:
    """Align ``hyp`` against ``ref`` with minimal edit distance.

    Among minimal alignments, each DP cell prefers substitution over
    deletion over insertion, which makes the Sub/Del/Ins breakdown
    deterministic.
    """
    m, n = len(ref), len(hyp)
    # cost[i][j]: min edits aligning ref[:i] with hyp[:j]; op records the
    # preferred move into each cell.
    cost = [[0] * (n + 1) for _ in range(m + 1)]
    op = [[COR] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        cost[i][0] = i
        op[i][0] = DEL
    for j in range(1, n + 1):
        cost[0][j] = j
        op[0][j] = INS
    for i in range(1, m + 1):
        ri = ref[i - 1]
        row = cost[i]
        prev = cost[i - 1]
        for j in range(1, n + 1):
            if ri == hyp[j - 1]:
                row[j] = prev[j - 1]
                op[i][j] = COR
                continue
            diag = prev[j - 1] + 1
            up = prev[j] + 1
            left = row[j - 1] + 1
            best = diag if diag <= up else up
            if left < best:
                best = left
            row[j] = best
            if diag == best:
                op[i][j] = SUB
            elif up == best:
                op[i][j] = DEL
            else:
                op[i][j] = INS

    ops: list[tuple[str, Optional[str], Optional[str]]] = []
    i, j = m, n
    cor = sub = dele = ins = 0
    while i > 0 or j > 0:
        move = op[i][j]
        if move == COR:
            ops.append((COR, ref[i - 1], hyp[j - 1]))
            cor += 1
            i, j = i - 1, j - 1
        elif move == SUB:
            ops.append((SUB, ref[i - 1], hyp[j - 1]))
            sub += 1
            i, j = i - 1, j - 1
        elif move == DEL:
            ops.append((DEL, ref[i - 1], None))
            dele += 1
            i -= 1
        else:
            ops.append((INS, None, hyp[j - 1]))
            ins += 1
            j -= 1
    ops.reverse()
    counts = AlignmentCounts(cor, sub, dele, ins, ref_len=m)
    return Alignment(counts, tuple(ops))


@dataclass(frozen=True)
class UtteranceScore:
    id: str
    counts: AlignmentCounts


@dataclass(frozen=True)
class CorpusReport:
    """WER report over a corpus, built from summed alignment counts."""

    totals: AlignmentCounts
    wer: Optional[float]  # percent, rounded to 2 decimals; None if ref empty
    per_utterance: tuple[UtteranceScore, ...]

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "totals": self.totals.to_dict(),
            "utterances": [
                {"id": u.id, **u.counts.to_dict()} for u in self.per_utterance
            ],
        }


def _corpus_report(scored: list[UtteranceScore]) -> CorpusReport:
    totals = AlignmentCounts()
    for u in scored:
        totals = totals + u.counts
    wer = None
    if totals.ref_len > 0:
        wer = round_half_up(100.0 * totals.errors / totals.ref_len, 2)
    return CorpusReport(totals, wer, tuple(scored))


def corpus_wer(utterances: Sequence["Utterance"], chosen_texts: Sequence[str]) -> CorpusReport:
    """Score ``chosen_texts`` (one per utterance) against the references.

    Both sides go through :func:`normalize_eval` before alignment.
    """
    if len(utterances) != len(chosen_texts):
        raise DataError(
            f"got {len(chosen_texts)} hypotheses for {len(utterances)} utterances"
        )
    scored = []
    for utt, text in zip(utterances, chosen_texts):
        if utt.reference is None:
            raise DataError(f"utterance {utt.id!r} has no reference")
        ref = normalize_eval(utt.reference).split()
        hyp = normalize_eval(text).split()
        scored.append(UtteranceScore(utt.id, align(ref, hyp).counts))
    return _corpus_report(scored)


def oracle_wer(utterances: Sequence["Utterance"], n: int) -> CorpusReport:
    """Best achievable WER selecting per utterance among the top-``n`` hypotheses.

    Ties in error count go to the lowest rank.  Lists shorter than ``n``
    use all their hypotheses.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    chosen = []
    for utt in utterances:
        if utt.reference is None:
            raise DataError(f"utterance {utt.id!r} has no reference")
        ref = normalize_eval(utt.reference).split()
        best_text = None
        best_errors = None
        for hyp in utt.nbest.hypotheses[:n]:
            errors = align(ref, normalize_eval(hyp.text).split()).counts.errors
            if best_errors is None or errors < best_errors:
                best_errors = errors
                best_text = hyp.text
        chosen.append(best_text)
    return corpus_wer(utterances, chosen)


@dataclass(frozen=True)
class CrossWerReport:
    """Aggregate pairwise WER among the unique hypotheses of an N-best list."""

    totals: AlignmentCounts
    all_pct: float
    sub_pct: float
    del_pct: float
    ins_pct: float

    def as_row(self) -> str:
        """Render as an "All / Sub / Del / Ins" row, one decimal each."""
        return " / ".join(
            f"{round_half_up(v, 1):.1f}"
            for v in (self.all_pct, self.sub_pct, self.del_pct, self.ins_pct)
        )

    def to_dict(self) -> dict:
        return {
            "all": self.all_pct,
            "sub": self.sub_pct,
            "del": self.del_pct,
            "ins": self.ins_pct,
            "totals": self.totals.to_dict(),
        }


def cross_wer(nbest: "NBestList") -> CrossWerReport:
    """Pairwise WER over every ordered pair of unique hypotheses.

    Texts are normalized with :func:`normalize_stats` and deduplicated
    first.  Because every unordered pair is aligned in both directions,
    the aggregate deletion and insertion counts are equal.
    """
    seen = []
    for hyp in nbest.hypotheses:
        normed = normalize_stats(hyp.text)
        if normed not in seen:
            seen.append(normed)
    totals = AlignmentCounts()
    for i, ref_text in enumerate(seen):
        ref = ref_text.split()
        for j, hyp_text in enumerate(seen):
            if i == j:
                continue
            totals = totals + align(ref, hyp_text.split()).counts
    if totals.ref_len > 0:
        pct = lambda v: 100.0 * v / totals.ref_len  # noqa: E731
        return CrossWerReport(
            totals,
            pct(totals.errors),
            pct(totals.substitutions),
            pct(totals.deletions),
            pct(totals.insertions),
        )
    return CrossWerReport(totals, 0.0, 0.0, 0.0, 0.0)


def uniq(nbest_lists: Iterable["NBestList"]) -> float:
    """Mean number of distinct hypotheses per list after stats normalization."""
    counts = [
        len({normalize_stats(h.text) for h in nbest.hypotheses})
        for nbest in nbest_lists
    ]
    if not counts:
        raise DataError("uniq needs at least one N-best list")
    return sum(counts) / len(counts)


def werr(baseline_wer: float, system_wer: float) -> float:
    """Relative WER reduction of a system against a baseline, in percent."""
    if baseline_wer <= 0:
        raise ValueError("baseline WER must be positive")
    return 100.0 * (baseline_wer - system_wer) / baseline_wer
