"""Frozen toy backend: a character bigram model over the request context.

This is the conformance-reference model of the wire protocol, defined as:

* alphabet = characters of the context string plus one boundary symbol
  (``\\x00``); characters outside the alphabet map to the boundary symbol;
* bigram counts taken over the context padded with the boundary symbol on
  both sides; add-1 smoothing over the alphabet;
* a candidate scores the sum of its character log-probabilities starting
  from the boundary symbol, with no terminal boundary term;
* step scoring renders the token history joined by single spaces and
  scores the ``" " + token`` continuation (just the token when the history
  is empty), so chained steps telescope to the full sequence score;
* generation returns the highest-scoring non-empty ``[SEP]`` segment of
  the context, earliest on ties.

Any implementation must reproduce the committed conformance vectors
within 1e-9.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache

BOUNDARY = "\x00"
SEP = "[SEP]"

NAME = "toy-char-bigram"
TOKENIZER = "whitespace"


@lru_cache(maxsize=256)
def _model(context: str):
    padded = BOUNDARY + context + BOUNDARY
    bigrams = Counter(zip(padded, padded[1:]))
    totals = Counter(padded[:-1])
    alphabet = set(context)
    return bigrams, totals, alphabet, len(alphabet) + 1


def _walk(context: str, text: str, prev: str = BOUNDARY) -> float:
    bigrams, totals, alphabet, vocab = _model(context)
    score = 0.0
    for ch in text:
        cur = ch if ch in alphabet else BOUNDARY
        score += math.log((bigrams[(prev, cur)] + 1) / (totals[prev] + vocab))
        prev = cur
    return score


def score(context: str, candidates: list[str]) -> list[float]:
    out = []
    for candidate in candidates:
        if not candidate:
            raise ValueError("candidates must be non-empty strings")
        out.append(_walk(context, candidate))
    return out


def step(context: str, history: list[str], candidates: list[str]) -> list[float]:
    if not candidates:
        raise ValueError("candidate set must be non-empty")
    rendered = " ".join(history)
    _, _, alphabet, _ = _model(context)
    if rendered:
        prev = rendered[-1] if rendered[-1] in alphabet else BOUNDARY
    else:
        prev = BOUNDARY
    out = []
    for token in candidates:
        if not token:
            raise ValueError("candidate tokens must be non-empty")
        piece = (" " + token) if rendered else token
        out.append(_walk(context, piece, prev=prev))
    return out


def generate(context: str) -> str:
    best_text = ""
    best_score = None
    for segment in context.split(SEP):
        if not segment:
            continue
        value = _walk(context, segment)
        if best_score is None or value > best_score:
            best_score = value
            best_text = segment
    return best_text
