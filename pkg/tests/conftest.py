"""Shared test helpers: seeded random generators and independent oracles."""

from __future__ import annotations

import random

import pytest

from asrec.core import NBestList, Utterance
from asrec.lattice import EPS, Lattice, LatticeError


def recursive_edit_distance(ref, hyp) -> int:
    """Plain recursive edit distance; the independent oracle for align()."""
    memo: dict[tuple[int, int], int] = {}

    def go(i: int, j: int) -> int:
        key = (i, j)
        if key in memo:
            return memo[key]
        if i == len(ref):
            value = len(hyp) - j
        elif j == len(hyp):
            value = len(ref) - i
        else:
            value = min(
                go(i + 1, j + 1) + (ref[i] != hyp[j]),
                go(i + 1, j) + 1,
                go(i, j + 1) + 1,
            )
        memo[key] = value
        return value

    return go(0, 0)


def random_nbest(
    rng: random.Random,
    vocab=("a", "b", "c", "d", "e"),
    max_n: int = 5,
    max_len: int = 6,
) -> NBestList:
    n = rng.randint(1, max_n)
    pairs = []
    score = -rng.uniform(0.5, 1.5)
    for _ in range(n):
        length = rng.randint(1, max_len)
        text = " ".join(rng.choice(vocab) for _ in range(length))
        pairs.append((text, score))
        score -= rng.uniform(0.01, 1.0)
    return NBestList.from_pairs(pairs)


def random_lattice(
    rng: random.Random,
    alphabet=("a", "b", "c", "d"),
    max_layers: int = 5,
    max_width: int = 3,
    max_paths: int = 200,
    allow_skips: bool = True,
) -> Lattice:
    """Random layered token DAG with valid lattice invariants."""
    while True:
        n_layers = rng.randint(1, max_layers)
        layers = []
        next_id = 1
        for _ in range(n_layers):
            width = rng.randint(1, max_width)
            layers.append(list(range(next_id, next_id + width)))
            next_id += width
        end_id = next_id
        tokens = {0: EPS, end_id: EPS}
        for layer in layers:
            for v in layer:
                tokens[v] = rng.choice(alphabet)
        edges: dict[tuple[int, int], float] = {}

        def score() -> float:
            return round(rng.uniform(-3.0, -0.1), 6)

        prev = [0]
        for layer in layers:
            for v in layer:
                edges[(rng.choice(prev), v)] = score()
            for u in prev:
                if not any((u, v) in edges for v in layer):
                    edges[(u, rng.choice(layer))] = score()
            for u in prev:
                for v in layer:
                    if (u, v) not in edges and rng.random() < 0.3:
                        edges[(u, v)] = score()
            prev = layer
        for u in prev:
            edges[(u, end_id)] = score()
        if allow_skips and n_layers >= 2:
            flat = [[0]] + layers + [[end_id]]
            for _ in range(rng.randint(0, 3)):
                i = rng.randint(0, len(flat) - 3)
                j = rng.randint(i + 2, len(flat) - 1)
                if i == 0 and j == len(flat) - 1:
                    continue  # no start->end edge: paths stay non-empty
                u, v = rng.choice(flat[i]), rng.choice(flat[j])
                if (u, v) not in edges:
                    edges[(u, v)] = score()
        lattice = Lattice(tokens, edges, 0, end_id)
        try:
            lattice.validate()
        except LatticeError:
            continue
        if lattice.count_paths() <= max_paths:
            return lattice


def make_utterance(uid: str, pairs, reference=None) -> Utterance:
    return Utterance(uid, NBestList.from_pairs(pairs), reference=reference)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240901)
