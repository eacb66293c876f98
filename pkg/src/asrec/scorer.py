"""Scorer backends: the abstraction over the error-correction language model.

Three operations, shared by every backend and by the HTTP wire protocol:

* ``score_sequence(ctx, candidate)`` — log-probability of a full candidate
  string given the concatenated N-best context.
* ``decoder_step(ctx, history, candidates)`` — log-probability of each
  candidate next token given the token history.  Chaining step scores along
  a sequence must match ``score_sequence`` of that sequence within 1e-6.
* ``generate(ctx)`` — free-running generation.

The built-in toy scorer is a frozen reference model: a character bigram
model estimated from the context string with add-1 smoothing over the
context alphabet plus one boundary symbol.  A candidate's score is the sum
of its character log-probabilities, starting from the boundary symbol (no
terminal boundary term, which is what makes step scores telescope).  Token
histories are rendered by joining tokens with single spaces.  Characters
outside the context alphabet are mapped to the boundary symbol.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Protocol, Sequence

import requests

from .core import DEFAULT_SEP, NBestList, sep_concat
from .errors import ScorerRequestError, TransportError

BOUNDARY = "\x00"


@dataclass(frozen=True)
class ScorerContext:
    """The conditioning input: concatenated top-n hypotheses."""

    text: str
    n_input: int
    sep: str = DEFAULT_SEP

    @classmethod
    def from_nbest(
        cls, nbest: NBestList, n: int, sep: str = DEFAULT_SEP
    ) -> "ScorerContext":
        return cls(sep_concat(nbest, n, sep), n, sep)


@dataclass(frozen=True)
class DecoderStepResult:
    """Log-probabilities for the candidate tokens requested at one step."""

    logprobs: Mapping[str, float]

    def __getitem__(self, token: str) -> float:
        return self.logprobs[token]

    def get(self, token: str, default=None):
        return self.logprobs.get(token, default)


class Scorer(Protocol):
    name: str

    def score_sequence(self, ctx: ScorerContext, candidate: str) -> float: ...

    def score_sequences(
        self, ctx: ScorerContext, candidates: Sequence[str]
    ) -> list[float]: ...

    def decoder_step(
        self, ctx: ScorerContext, history: Sequence[str], candidates: Iterable[str]
    ) -> DecoderStepResult: ...

    def generate(self, ctx: ScorerContext) -> str: ...


@lru_cache(maxsize=256)
def _bigram_model(text: str):
    """Estimate the char bigram model for one context string.

    Returns ``(counts, row_totals, alphabet, vocab_size)`` where counts maps
    (prev, cur) to an integer and alphabet excludes the boundary symbol.
    """
    counts: dict[tuple[str, str], int] = {}
    totals: dict[str, int] = {}
    padded = BOUNDARY + text + BOUNDARY
    for prev, cur in zip(padded, padded[1:]):
        counts[(prev, cur)] = counts.get((prev, cur), 0) + 1
        totals[prev] = totals.get(prev, 0) + 1
    alphabet = frozenset(text)
    return counts, totals, alphabet, len(alphabet) + 1


class ToyCharBigramScorer:
    """Deterministic, stateless reference scorer (see module docstring)."""

    name = "toy-char-bigram"

    def _prefix_score(self, ctx: ScorerContext, text: str, prev: str = BOUNDARY) -> float:
        counts, totals, alphabet, vocab = _bigram_model(ctx.text)
        total = 0.0
        for ch in text:
            cur = ch if ch in alphabet else BOUNDARY
            num = counts.get((prev, cur), 0) + 1
            den = totals.get(prev, 0) + vocab
            total += math.log(num / den)
            prev = cur
        return total

    def score_sequence(self, ctx: ScorerContext, candidate: str) -> float:
        if not candidate:
            raise ValueError("candidate must be non-empty")
        return self._prefix_score(ctx, candidate)

    def score_sequences(
        self, ctx: ScorerContext, candidates: Sequence[str]
    ) -> list[float]:
        return [self.score_sequence(ctx, c) for c in candidates]

    def decoder_step(
        self, ctx: ScorerContext, history: Sequence[str], candidates: Iterable[str]
    ) -> DecoderStepResult:
        candidates = list(candidates)
        if not candidates:
            raise ValueError("candidate set must be non-empty")
        _, _, alphabet, _ = _bigram_model(ctx.text)
        rendered = " ".join(history)
        if rendered:
            last = rendered[-1]
            prev = last if last in alphabet else BOUNDARY
        else:
            prev = BOUNDARY
        logprobs = {}
        for token in candidates:
            if not token:
                raise ValueError("candidate tokens must be non-empty")
            piece = (" " + token) if rendered else token
            logprobs[token] = self._prefix_score(ctx, piece, prev=prev)
        return DecoderStepResult(logprobs)

    def generate(self, ctx: ScorerContext) -> str:
        segments = ctx.text.split(ctx.sep) if ctx.sep else [ctx.text]
        best_text = ""
        best_score = None
        for seg in segments:
            if not seg:
                continue
            score = self._prefix_score(ctx, seg)
            if best_score is None or score > best_score:
                best_score = score
                best_text = seg
        return best_text


class HttpScorer:
    """Client for the scorer wire protocol (JSON over HTTP).

    Safe for concurrent use: requests are independent (HTTP pairs each
    response with its request) and ``max_inflight`` caps how many run at
    once.  Transport failures are retried ``retries`` times with a linear
    backoff; the total number of retries performed is kept in
    ``retries_used`` so run manifests can record it.
    """

    def __init__(
        self,
        base_url: str,
        timeout: float = 10.0,
        retries: int = 3,
        backoff: float = 0.2,
        max_inflight: int = 8,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.retries_used = 0
        self._lock = threading.Lock()
        self._inflight = threading.BoundedSemaphore(max_inflight)
        self.name = f"http:{self.base_url}"

    def _request(self, method: str, path: str, payload=None) -> dict:
        import time

        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt > 0:
                with self._lock:
                    self.retries_used += 1
                time.sleep(self.backoff * attempt)
            try:
                with self._inflight:
                    if method == "GET":
                        resp = requests.get(self.base_url + path, timeout=self.timeout)
                    else:
                        resp = requests.post(
                            self.base_url + path, json=payload, timeout=self.timeout
                        )
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if 400 <= resp.status_code < 500:
                raise ScorerRequestError(
                    f"{path} rejected ({resp.status_code}): {resp.text[:200]}"
                )
            if resp.status_code >= 500:
                last_exc = TransportError(f"{path} failed ({resp.status_code})")
                continue
            try:
                return resp.json()
            except ValueError as exc:
                raise ScorerRequestError(f"{path}: non-JSON response") from exc
        raise TransportError(
            f"{path}: transport failed after {self.retries + 1} attempts: {last_exc}"
        )

    def info(self) -> dict:
        return self._request("GET", "/v1/info")

    def score_sequence(self, ctx: ScorerContext, candidate: str) -> float:
        return self.score_sequences(ctx, [candidate])[0]

    @staticmethod
    def _field(data: dict, name: str, path: str):
        try:
            return data[name]
        except (KeyError, TypeError) as exc:
            raise ScorerRequestError(f"{path}: reply missing {name!r}") from exc

    def score_sequences(
        self, ctx: ScorerContext, candidates: Sequence[str]
    ) -> list[float]:
        if any(not c for c in candidates):
            raise ValueError("candidates must be non-empty")
        data = self._request(
            "POST", "/v1/score", {"context": ctx.text, "candidates": list(candidates)}
        )
        logprobs = [float(v) for v in self._field(data, "logprobs", "/v1/score")]
        if len(logprobs) != len(candidates):
            raise ScorerRequestError(
                f"/v1/score: {len(logprobs)} logprobs for {len(candidates)} candidates"
            )
        return logprobs

    def decoder_step(
        self, ctx: ScorerContext, history: Sequence[str], candidates: Iterable[str]
    ) -> DecoderStepResult:
        candidates = list(candidates)
        if not candidates:
            raise ValueError("candidate set must be non-empty")
        data = self._request(
            "POST",
            "/v1/step",
            {"context": ctx.text, "history": list(history), "candidates": candidates},
        )
        logprobs = [float(v) for v in self._field(data, "logprobs", "/v1/step")]
        if len(logprobs) != len(candidates):
            raise ScorerRequestError(
                f"/v1/step: {len(logprobs)} logprobs for {len(candidates)} candidates"
            )
        return DecoderStepResult(dict(zip(candidates, logprobs)))

    def generate(self, ctx: ScorerContext) -> str:
        data = self._request("POST", "/v1/generate", {"context": ctx.text})
        return str(self._field(data, "text", "/v1/generate"))


class CachingScorer:
    """Memoizing wrapper; batching and caching must not change results."""

    def __init__(self, inner: Scorer):
        self.inner = inner
        self.name = inner.name
        self._seq: dict[tuple[str, str], float] = {}
        self._step: dict[tuple, DecoderStepResult] = {}
        self._gen: dict[str, str] = {}

    def score_sequence(self, ctx: ScorerContext, candidate: str) -> float:
        return self.score_sequences(ctx, [candidate])[0]

    def score_sequences(
        self, ctx: ScorerContext, candidates: Sequence[str]
    ) -> list[float]:
        missing = [c for c in candidates if (ctx.text, c) not in self._seq]
        if missing:
            for c, v in zip(missing, self.inner.score_sequences(ctx, missing)):
                self._seq[(ctx.text, c)] = v
        return [self._seq[(ctx.text, c)] for c in candidates]

    def decoder_step(
        self, ctx: ScorerContext, history: Sequence[str], candidates: Iterable[str]
    ) -> DecoderStepResult:
        key = (ctx.text, tuple(history), tuple(sorted(candidates)))
        if key not in self._step:
            self._step[key] = self.inner.decoder_step(ctx, history, key[2])
        return self._step[key]

    def generate(self, ctx: ScorerContext) -> str:
        if ctx.text not in self._gen:
            self._gen[ctx.text] = self.inner.generate(ctx)
        return self._gen[ctx.text]
