"""Correction strategies: unconstrained, N-best constrained, closest mapping,
and lattice-constrained beam search, plus interpolation-weight grid search.

All strategies interpolate ASR and error-correction scores as
``(1 - lambda) * asr_logscore + lambda * ec_logscore`` and break ties
deterministically (lowest rank, or lexicographically smallest token
sequence for lattice paths).
"""

from __future__ import annotations

import dataclasses
import heapq
import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import EcConfig, Hypothesis, NBestList, Utterance
from .errors import DataError
from .lattice import EPS, Lattice, lattice_from_nbest, topo_sort
from .metrics import align, corpus_wer
from .scorer import CachingScorer, Scorer, ScorerContext
from .textnorm import normalize_eval

_QUOTE_PAIRS = (('"', '"'), ("'", "'"), ("“", "”"), ("‘", "’"))
_TAG_WRAP = re.compile(r"^<(\w+)>(.*)</\1>$", re.S)


@dataclass(frozen=True)
class UnconResult:
    text: str
    truncation_suspected: bool


@dataclass(frozen=True)
class ConstrResult:
    hypothesis: Hypothesis
    score: float


@dataclass(frozen=True)
class ClosestResult:
    hypothesis: Hypothesis
    distance: int


@dataclass(frozen=True)
class LatticeResult:
    tokens: tuple[str, ...]
    score: float

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def strip_wrapping(text: str) -> str:
    """Peel symmetric wrapping quotes or a single wrapping XML-ish tag."""
    while True:
        text = text.strip()
        if len(text) >= 2 and (text[0], text[-1]) in _QUOTE_PAIRS:
            text = text[1:-1]
            continue
        m = _TAG_WRAP.match(text)
        if m:
            text = m.group(2)
            continue
        return text


def correct_unconstrained(utt: Utterance, scorer: Scorer, cfg: EcConfig) -> UnconResult:
    """Free generation given the concatenated N-best context.

    Output shorter than half the rank-1 hypothesis (in words) is flagged as
    a suspected truncation; the text itself is never modified.
    """
    if cfg.n_input > len(utt.nbest):
        raise ValueError(f"n_input={cfg.n_input} exceeds list size {len(utt.nbest)}")
    ctx = ScorerContext.from_nbest(utt.nbest, cfg.n_input)
    text = strip_wrapping(scorer.generate(ctx))
    rank1_words = len(utt.nbest.hypotheses[0].text.split())
    suspected = len(text.split()) < 0.5 * rank1_words
    return UnconResult(text, suspected)


def select_constrained(
    utt: Utterance, scorer: Scorer, cfg: EcConfig
) -> ConstrResult:
    """Pick the hypothesis maximizing the interpolated ASR/EC score.

    With lambda=0 this is the ASR argmax (rank 1); with lambda=1 the ASR
    scores are ignored.  Ties go to the lowest rank.
    """
    if cfg.n_input > len(utt.nbest):
        raise ValueError(f"n_input={cfg.n_input} exceeds list size {len(utt.nbest)}")
    candidates = utt.nbest.hypotheses[: cfg.n_input]
    for hyp in candidates:
        if not math.isfinite(hyp.asr_logscore):
            raise ValueError(f"hypothesis {hyp.rank} has non-finite ASR score")
    if cfg.lam > 0.0:
        ctx = ScorerContext.from_nbest(utt.nbest, cfg.n_input)
        ec_scores = scorer.score_sequences(ctx, [h.text for h in candidates])
        if cfg.length_normalize:
            ec_scores = [
                s / max(1, len(h.text.split()))
                for s, h in zip(ec_scores, candidates)
            ]
    else:
        ec_scores = [0.0] * len(candidates)
    best = None
    best_score = None
    for hyp, ec in zip(candidates, ec_scores):
        score = (1.0 - cfg.lam) * hyp.asr_logscore + cfg.lam * ec
        if best_score is None or score > best_score:
            best, best_score = hyp, score
    return ConstrResult(best, best_score)


def closest_map(uncon_output: str, nbest: NBestList, n: int) -> ClosestResult:
    """Map a free-generation output back to the closest hypothesis.

    Distance is word-level Levenshtein on eval-normalized tokens; ties go
    to the lowest rank.
    """
    if not 1 <= n <= len(nbest):
        raise ValueError(f"n must be in [1, {len(nbest)}], got {n}")
    out_tokens = normalize_eval(uncon_output).split()
    best = None
    best_dist = None
    for hyp in nbest.hypotheses[:n]:
        dist = align(out_tokens, normalize_eval(hyp.text).split()).counts.errors
        if best_dist is None or dist < best_dist:
            best, best_dist = hyp, dist
    return ClosestResult(best, best_dist)


def lattice_decode(
    lattice: Lattice, scorer: Scorer, cfg: EcConfig, ctx: ScorerContext
) -> LatticeResult:
    """Beam search over lattice paths with interpolated ASR/EC scores.

    Nodes are processed in topological order, keeping one bounded min-heap
    of partial hypotheses per node (capacity ``cfg.beam_width``).  For each
    partial at node ``v``, one decoder step over the successor token set
    scores every outgoing edge; sentinel (epsilon) targets contribute no EC
    term.  Determinism: heap ties are broken by insertion sequence, final
    ties by lexicographically smallest token sequence.
    """
    order = topo_sort(lattice)
    beam = cfg.beam_width
    lam = cfg.lam
    # heap entries: (score, insertion seq, history tuple)
    heaps: dict[int, list[tuple[float, int, tuple[str, ...]]]] = {
        v: [] for v in lattice.tokens
    }
    seq = 0
    heapq.heappush(heaps[lattice.start], (0.0, seq, ()))
    seq += 1

    for v in order:
        succs = lattice.successors(v)
        if not succs:
            continue
        step_tokens = sorted(
            {lattice.tokens[x] for x, _ in succs if lattice.tokens[x] != EPS}
        )
        for score, _, history in sorted(heaps[v], key=lambda e: e[1]):
            step = None
            if lam > 0.0 and step_tokens:
                step = scorer.decoder_step(ctx, history, step_tokens)
            for x, s_vx in succs:
                token = lattice.tokens[x]
                inc = (1.0 - lam) * s_vx
                new_history = history
                if token != EPS:
                    if step is not None:
                        inc += lam * step[token]
                    new_history = history + (token,)
                new_score = score + inc
                hx = heaps[x]
                if len(hx) >= beam and hx[0][0] < new_score:
                    heapq.heappop(hx)
                if len(hx) < beam:
                    heapq.heappush(hx, (new_score, seq, new_history))
                    seq += 1

    final = heaps[lattice.end]
    assert final, "end node unreachable; lattice invariants violated"
    best = min(final, key=lambda e: (-e[0], e[2]))
    return LatticeResult(best[2], best[0])


@dataclass(frozen=True)
class GridPoint:
    lam: float
    wer: float


@dataclass(frozen=True)
class GridSearchResult:
    lambda_star: float
    wer: float
    curve: tuple[GridPoint, ...]


def grid_search_lambda(
    dev_utterances: Sequence[Utterance],
    scorer: Scorer,
    strategy: str,
    lo: float = 0.0,
    hi: float = 1.0,
    step: float = 0.05,
    cfg: Optional[EcConfig] = None,
) -> GridSearchResult:
    """Search the interpolation weight on a development set.

    Evaluates corpus WER at every grid point (21 points for the default
    [0, 1] range at step 0.05) and returns the argmin; ties prefer the
    smaller lambda.  ``cfg`` supplies beam width and input size; its
    lambda is overridden per grid point.
    """
    if strategy not in ("constrained", "lattice"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not dev_utterances:
        raise DataError("grid search needs a non-empty dev set")
    if cfg is None:
        n_input = min(len(u.nbest) for u in dev_utterances)
        cfg = EcConfig(lam=0.0, beam_width=1, n_input=n_input)
    cached = CachingScorer(scorer)
    n_points = int(round((hi - lo) / step)) + 1
    lams = [round(lo + k * step, 10) for k in range(n_points)]

    points = []
    best: Optional[GridPoint] = None
    for lam in lams:
        cfg_l = dataclasses.replace(cfg, lam=lam)
        texts = []
        for utt in dev_utterances:
            if strategy == "constrained":
                texts.append(select_constrained(utt, cached, cfg_l).hypothesis.text)
            else:
                lattice = utt.lattice
                if lattice is None:
                    top = NBestList(utt.nbest.hypotheses[: cfg_l.n_input])
                    lattice = lattice_from_nbest(top)
                ctx = ScorerContext.from_nbest(utt.nbest, cfg_l.n_input)
                texts.append(lattice_decode(lattice, cached, cfg_l, ctx).text)
        wer = corpus_wer(dev_utterances, texts).wer
        point = GridPoint(lam, wer)
        points.append(point)
        if best is None or point.wer < best.wer:
            best = point
    return GridSearchResult(best.lam, best.wer, tuple(points))
