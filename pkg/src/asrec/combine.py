"""System combination: ROVER-style voting and multi-model N-best lists."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import NBestList
from .errors import DataError

NULL = None  # null word-transition arc

_EARLY = 10**6  # tie-key offset; matches beat non-matches, early systems beat late


@dataclass
class _Slot:
    """One word slot: symbol -> [accumulated weight, earliest system index]."""

    votes: dict[Optional[str], list]

    @classmethod
    def seeded(cls, word: Optional[str], weight: float, system: int) -> "_Slot":
        return cls({word: [weight, system]})

    def add(self, word: Optional[str], weight: float, system: int) -> None:
        if word in self.votes:
            self.votes[word][0] += weight
        else:
            self.votes[word] = [weight, system]

    def winner(self) -> Optional[str]:
        # max weight; ties go to the symbol contributed by the earliest system
        return min(
            self.votes.items(), key=lambda kv: (-kv[1][0], kv[1][1])
        )[0]


class WordTransitionNetwork:
    """Slot-aligned word network built by iterative edit-distance alignment."""

    def __init__(self, words: Sequence[str], weight: float):
        self.slots = [_Slot.seeded(w, weight, 0) for w in words]
        self.total_weight = weight
        self.n_systems = 1

    def align(self, words: Sequence[str], weight: float) -> None:
        """Merge one hypothesis into the network.

        Minimal edit distance between slots and words.  The alignment is
        reconstructed left to right, preferring at each step a word match,
        then a substitution, then a null arc, then a new slot.
        """
        system = self.n_systems
        m, n = len(self.slots), len(words)

        def diag_step(i: int, j: int) -> tuple[int, int]:
            # (edit cost, tie key): among minimal alignments prefer matches,
            # and among matches prefer words placed by earlier systems; a
            # duplicated hypothesis then re-traces its original slots
            # instead of drifting onto a later system's copy of its words
            vote = self.slots[i].votes.get(words[j])
            if vote is None:
                return (1, 0)
            return (0, vote[1] - _EARLY)

        # suffix[i][j]: lexicographic-minimal (cost, tie key) for slots[i:]
        # against words[j:]
        suffix = [[(0, 0)] * (n + 1) for _ in range(m + 1)]
        for j in range(n + 1):
            suffix[m][j] = (n - j, 0)
        for i in range(m - 1, -1, -1):
            row = suffix[i]
            below = suffix[i + 1]
            row[n] = (m - i, 0)
            for j in range(n - 1, -1, -1):
                dc, dw = diag_step(i, j)
                diag = (below[j + 1][0] + dc, below[j + 1][1] + dw)
                dele = (below[j][0] + 1, below[j][1])
                ins = (row[j + 1][0] + 1, row[j + 1][1])
                row[j] = min(diag, dele, ins)

        assigned: dict[int, str] = {}
        inserts: list[tuple[int, str]] = []  # (slot index to insert before, word)
        i = j = 0
        while i < m or j < n:
            best = suffix[i][j]
            if i < m and j < n:
                dc, dw = diag_step(i, j)
                nxt = suffix[i + 1][j + 1]
                if best == (nxt[0] + dc, nxt[1] + dw):
                    assigned[i] = words[j]
                    i, j = i + 1, j + 1
                    continue
            if i < m:
                nxt = suffix[i + 1][j]
                if best == (nxt[0] + 1, nxt[1]):
                    i += 1  # null arc in this slot
                    continue
            inserts.append((i, words[j]))
            j += 1

        for idx, slot in enumerate(self.slots):
            slot.add(assigned.get(idx, NULL), weight, system)
        # apply right to left so earlier insert positions stay valid
        for idx, word in reversed(inserts):
            slot = _Slot.seeded(word, weight, system)
            slot.add(NULL, self.total_weight, 0)  # all previous systems skip it
            self.slots.insert(idx, slot)

        self.total_weight += weight
        self.n_systems += 1

    def vote(self) -> str:
        out = [slot.winner() for slot in self.slots]
        return " ".join(w for w in out if w is not NULL)


def rover(hyps: Sequence[tuple[str, float]]) -> str:
    """Combine hypotheses by WTN alignment and weighted voting.

    The first hypothesis seeds the network; each following one is aligned
    in by minimal edit distance.  Per slot the highest-weighted symbol wins
    (vote ties go to the earliest-listed system); a winning null arc emits
    nothing.
    """
    if len(hyps) < 2:
        raise DataError("rover needs at least two hypotheses")
    if any(w <= 0 for _, w in hyps):
        raise ValueError("weights must be positive")
    first_text, first_weight = hyps[0]
    wtn = WordTransitionNetwork(first_text.split(), first_weight)
    for text, weight in hyps[1:]:
        wtn.align(text.split(), weight)
    return wtn.vote()


@dataclass(frozen=True)
class CombinedNBest:
    """A pattern-built multi-system list; cross-system scores are kept
    verbatim and are not comparable, so score-interpolating decoders should
    use lambda=1 on these lists."""

    nbest: NBestList
    sources: tuple[str, ...]
    flags: tuple[str, ...] = ("cross-system-scores-not-comparable",)


_PATTERN_ITEM = re.compile(r"([A-Za-z])(\d+)")


def build_multi_nbest(
    list_a: NBestList, list_b: NBestList, pattern: str
) -> CombinedNBest:
    """Assemble a new list from two systems following ``pattern``.

    The pattern is a sequence of (tag letter, rank) items such as
    ``E1E2T1T2T3``; the first tag letter to appear refers to ``list_a``,
    the second to ``list_b``.  Hypotheses are copied verbatim and
    renumbered 1..k in pattern order.
    """
    items = _PATTERN_ITEM.findall(pattern)
    if "".join(f"{t}{r}" for t, r in items) != pattern or not items:
        raise ValueError(f"malformed pattern {pattern!r}")
    tag_order: list[str] = []
    for tag, _ in items:
        if tag not in tag_order:
            tag_order.append(tag)
    if len(tag_order) > 2:
        raise ValueError(f"pattern {pattern!r} uses more than two source tags")
    lists = {tag_order[0]: list_a}
    if len(tag_order) == 2:
        lists[tag_order[1]] = list_b
    pairs = []
    sources = []
    for tag, rank_str in items:
        rank = int(rank_str)
        source = lists[tag]
        if not 1 <= rank <= len(source):
            raise DataError(f"pattern item {tag}{rank}: no rank {rank} in that list")
        hyp = source.hypotheses[rank - 1]
        pairs.append((hyp.text, hyp.asr_logscore))
        sources.append(f"{tag}{rank}")
    return CombinedNBest(NBestList.from_pairs(pairs), tuple(sources))
