#!/usr/bin/env python3
"""Generate the frozen toy-scorer conformance vectors.

Run once; the output file is committed and every implementation of the
scorer wire protocol must reproduce it within 1e-9.
"""

import json
import random
import sys
from pathlib import Path

from asrec.scorer import ScorerContext, ToyCharBigramScorer

OUT = Path(__file__).parents[1] / "conformance" / "toy_scorer_vectors.jsonl"

WORDS = ["the", "cat", "sat", "kettle", "running", "it's", "2024", "a", "b", "zq"]


def main() -> int:
    rng = random.Random(13)
    toy = ToyCharBigramScorer()
    rows = []
    for _ in range(10):
        n = rng.randint(1, 3)
        hyps = [
            " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 5)))
            for _ in range(n)
        ]
        context = "[SEP]".join(hyps)
        ctx = ScorerContext(context, n)
        candidates = [rng.choice(hyps), " ".join(rng.sample(WORDS, 3))]
        for candidate in candidates:
            rows.append(
                {
                    "context": context,
                    "candidate": candidate,
                    "logprob": toy.score_sequence(ctx, candidate),
                }
            )
    OUT.parent.mkdir(exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(rows)} vectors to {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
