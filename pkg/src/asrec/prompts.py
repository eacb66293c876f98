"""Zero-shot prompt construction/parsing and the data-contamination quiz.

Prompt wording lives in versioned template files under ``templates/``;
prompts are data, not code.  The quiz runs each item twice with the two
option orders to cancel positional bias; an utterance counts as
contaminated only when the responder picks the verbatim sentence in both
orders (an averaging rule is available as an option).
"""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Mapping, Optional, Sequence

import requests

from .core import NBestList
from .decode import closest_map
from .errors import EndpointError, ParseError

ORDERS = ("orig_first", "para_first")
CHOICES = ("A", "B", "C")

_OPTION_BLOCK = re.compile(r"<option(\d+)>.*?</option\1>", re.S)
_CHOICE = re.compile(r"(?<![A-Za-z])([ABC])(?![A-Za-z])")


def _template(name: str) -> str:
    return (
        resources.files("asrec").joinpath("templates", f"{name}.txt").read_text("utf-8")
    )


def build_uncon_prompt(nbest: NBestList, n: int) -> str:
    """Prompt asking for a corrected sentence given tagged hypotheses."""
    if not 1 <= n <= len(nbest):
        raise ValueError(f"n must be in [1, {len(nbest)}], got {n}")
    hypotheses = "\n".join(
        f"<hypothesis{k}>{h.text}</hypothesis{k}>"
        for k, h in enumerate(nbest.hypotheses[:n], start=1)
    )
    return _template("uncon").format(n=n, hypotheses=hypotheses)


def build_constr_prompt(nbest: NBestList, n: int) -> str:
    """Prompt asking the model to select one option, with the reply schema."""
    if not 1 <= n <= len(nbest):
        raise ValueError(f"n must be in [1, {len(nbest)}], got {n}")
    options = "\n".join(
        f"<option{k}>{h.text}</option{k}>"
        for k, h in enumerate(nbest.hypotheses[:n], start=1)
    )
    return _template("constr").format(n=n, options=options)


@dataclass(frozen=True)
class SelectionResult:
    rank: int
    used_fallback: bool


def parse_selection(
    response: str, options: Sequence[str], fallback: bool = True
) -> SelectionResult:
    """Extract the selected option index from a model reply.

    Takes the first well-formed ``<optionK>...</optionK>`` block with K in
    range.  When nothing parses and ``fallback`` is enabled, the raw reply
    is mapped to the closest option text instead (flagged in the result).
    """
    n = len(options)
    if n < 1:
        raise ValueError("options must be non-empty")
    for match in _OPTION_BLOCK.finditer(response):
        k = int(match.group(1))
        if 1 <= k <= n:
            return SelectionResult(k, False)
    if fallback:
        nbest = NBestList.from_pairs([(text, 0.0) for text in options])
        result = closest_map(response, nbest, n)
        return SelectionResult(result.hypothesis.rank, True)
    raise ParseError(f"no option tag found in reply: {response[:80]!r}")


def build_paraphrase_prompt(reference: str, n_candidates: int = 3) -> str:
    """Prompt asking for paraphrase candidates of a reference sentence."""
    return _template("paraphrase").format(k=n_candidates, reference=reference)


def build_quiz(reference: str, paraphrase: str, order: str) -> str:
    """Three-choice quiz with A/B filled according to ``order``."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    if reference == paraphrase:
        raise ValueError("reference and paraphrase must differ")
    if order == "orig_first":
        option_a, option_b = reference, paraphrase
    else:
        option_a, option_b = paraphrase, reference
    return _template("quiz").format(option_a=option_a, option_b=option_b)


def original_choice(order: str) -> str:
    """The choice letter that points at the verbatim sentence."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    return "A" if order == "orig_first" else "B"


def parse_quiz_choice(response: str) -> str:
    """Pull the first standalone A/B/C out of a reply."""
    match = _CHOICE.search(response.upper())
    if not match:
        raise ParseError(f"no A/B/C choice found in reply: {response[:80]!r}")
    return match.group(1)


def score_quiz(
    answers: Mapping[str, tuple[str, str]], rule: str = "both"
) -> float:
    """Contamination rate from per-utterance answers in both orders.

    ``answers`` maps utterance id to (choice with the original first,
    choice with the paraphrase first).  Under the default ``both`` rule an
    utterance is contaminated only if the original was selected in both
    orders; ``average`` credits each order half a point.
    """
    if rule not in ("both", "average"):
        raise ValueError(f"unknown rule {rule!r}")
    if not answers:
        raise ValueError("no answers to score")
    total = 0.0
    for utt_id, pair in answers.items():
        if pair is None or len(pair) != 2 or any(c is None for c in pair):
            raise ValueError(f"utterance {utt_id!r}: answers for both orders required")
        first, second = (c.upper() for c in pair)
        for c in (first, second):
            if c not in CHOICES:
                raise ValueError(f"utterance {utt_id!r}: invalid choice {c!r}")
        hit_first = first == original_choice("orig_first")
        hit_second = second == original_choice("para_first")
        if rule == "both":
            total += 1.0 if (hit_first and hit_second) else 0.0
        else:
            total += (hit_first + hit_second) / 2.0
    return total / len(answers)


@dataclass(frozen=True)
class QuizOutcome:
    rate: float
    answers: dict[str, tuple[str, str]]
    paraphrase_used: dict[str, str]


def run_quiz(
    items: Sequence[tuple[str, str, Sequence[str]]],
    responder: Callable[[str], str],
    rng: random.Random,
    rule: str = "both",
) -> QuizOutcome:
    """Run the full quiz over (id, reference, paraphrase candidates) items.

    One paraphrase is drawn per item with the seeded ``rng`` and both
    option orders are asked.
    """
    answers: dict[str, tuple[str, str]] = {}
    used: dict[str, str] = {}
    for utt_id, reference, candidates in items:
        candidates = [c for c in candidates if c and c != reference]
        if not candidates:
            raise ValueError(f"utterance {utt_id!r}: no usable paraphrase candidate")
        paraphrase = rng.choice(candidates)
        used[utt_id] = paraphrase
        pair = []
        for order in ORDERS:
            reply = responder(build_quiz(reference, paraphrase, order))
            pair.append(parse_quiz_choice(reply))
        answers[utt_id] = (pair[0], pair[1])
    return QuizOutcome(score_quiz(answers, rule=rule), answers, used)


class ChatEndpoint:
    """Minimal client for a chat-completion endpoint.

    Wire shape: ``POST url {"messages": [{"role", "content"}...]}`` returning
    ``{"text": str}``.  Vendor-specific schemas belong in thin adapters in
    front of this; credentials come from the environment, never from config
    files.
    """

    def __init__(
        self,
        url: str,
        api_key: Optional[str] = None,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        rng: Optional[random.Random] = None,
    ):
        self.url = url
        self.api_key = api_key
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.rng = rng or random.Random(0)

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"messages": [{"role": "user", "content": prompt}]}
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt > 0:
                time.sleep(self.backoff * attempt * (1.0 + self.rng.random()))
            try:
                resp = requests.post(
                    self.url, json=payload, headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last = exc
                continue
            if resp.status_code >= 500:
                last = EndpointError(f"endpoint returned {resp.status_code}")
                continue
            if resp.status_code >= 400:
                raise EndpointError(
                    f"endpoint rejected request ({resp.status_code}): {resp.text[:200]}"
                )
            try:
                return str(resp.json()["text"])
            except (ValueError, KeyError) as exc:
                raise EndpointError(f"malformed endpoint reply: {exc}") from exc
        raise EndpointError(f"endpoint failed after {self.retries + 1} attempts: {last}")
