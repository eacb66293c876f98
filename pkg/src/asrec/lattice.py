"""Token lattices: validation, conversions, N-best interop, and oracle WER.

Lattices are node-labeled (token on the node, log-score on the edge) with a
single epsilon-labeled start node and a single epsilon-labeled end node.
All construction helpers validate the result; lattices are treated as
immutable after construction.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from .errors import CycleError, DataError, LatticeError, TokenizationError
from .metrics import AlignmentCounts

if TYPE_CHECKING:
    from .core import NBestList

EPS = ""  # sentinel token carried by the start and end nodes


@dataclass(frozen=True)
class Lattice:
    """A directed acyclic word/token graph.

    ``tokens`` maps node id to its token (``EPS`` for the sentinels);
    ``edges`` maps ``(from, to)`` to the edge log-score.
    """

    tokens: dict[int, str]
    edges: dict[tuple[int, int], float]
    start: int
    end: int
    _succ: dict[int, list[tuple[int, float]]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _pred: dict[int, list[tuple[int, float]]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        succ: dict[int, list[tuple[int, float]]] = {v: [] for v in self.tokens}
        pred: dict[int, list[tuple[int, float]]] = {v: [] for v in self.tokens}
        for (u, v), score in self.edges.items():
            # unknown endpoints are tolerated here so validate() can report them
            succ.setdefault(u, []).append((v, score))
            pred.setdefault(v, []).append((u, score))
        for adj in (succ, pred):
            for lst in adj.values():
                lst.sort()
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    # -- structure ---------------------------------------------------------

    def successors(self, v: int) -> list[tuple[int, float]]:
        return self._succ[v]

    def predecessors(self, v: int) -> list[tuple[int, float]]:
        return self._pred[v]

    def validate(self) -> None:
        """Raise :class:`LatticeError` unless all invariants hold."""
        if self.start not in self.tokens or self.end not in self.tokens:
            raise LatticeError("start/end node ids missing from the node set")
        if self.start == self.end:
            raise LatticeError("start and end must be distinct nodes")
        for sentinel in (self.start, self.end):
            if self.tokens[sentinel] != EPS:
                raise LatticeError(f"sentinel node {sentinel} must carry the empty token")
        for v, token in self.tokens.items():
            if v not in (self.start, self.end) and token == EPS:
                raise LatticeError(f"non-sentinel node {v} has an empty token")
        for (u, v), score in self.edges.items():
            if u not in self.tokens or v not in self.tokens:
                raise LatticeError(f"edge ({u}, {v}) references an unknown node")
            if score != score or score in (float("inf"), float("-inf")):
                raise LatticeError(f"edge ({u}, {v}) has a non-finite score")
        topo_sort(self)  # raises CycleError on cycles
        reachable = self._closure(self.start, self.successors)
        coreachable = self._closure(self.end, self.predecessors)
        for v in self.tokens:
            if v not in reachable:
                raise LatticeError(f"node {v} is unreachable from start")
            if v not in coreachable:
                raise LatticeError(f"node {v} cannot reach the end node")

    def _closure(self, root: int, adjacency) -> set[int]:
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for v, _ in adjacency(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    # -- paths ---------------------------------------------------------------

    def count_paths(self) -> int:
        ways = {v: 0 for v in self.tokens}
        ways[self.start] = 1
        for v in topo_sort(self):
            for x, _ in self.successors(v):
                ways[x] += ways[v]
        return ways[self.end]

    def enumerate_paths(
        self, max_paths: Optional[int] = None
    ) -> list[tuple[tuple[str, ...], float]]:
        """All (token sequence, score sum) paths from start to end.

        Deterministic: depth-first in ascending successor id order.
        Sentinel (epsilon) tokens are not part of the token sequence.
        """
        out: list[tuple[tuple[str, ...], float]] = []

        def walk(v: int, tokens: list[str], score: float):
            if v == self.end:
                if max_paths is not None and len(out) >= max_paths:
                    raise LatticeError(f"more than {max_paths} paths")
                out.append((tuple(tokens), score))
                return
            for x, s in self.successors(v):
                token = self.tokens[x]
                if token == EPS:
                    walk(x, tokens, score + s)
                else:
                    tokens.append(token)
                    walk(x, tokens, score + s)
                    tokens.pop()

        walk(self.start, [], 0.0)
        return out

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": v, "token": self.tokens[v]} for v in sorted(self.tokens)
            ],
            "edges": [
                {"from": u, "to": v, "score": s}
                for (u, v), s in sorted(self.edges.items())
            ],
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Lattice":
        try:
            tokens = {int(n["id"]): str(n["token"]) for n in data["nodes"]}
            if len(tokens) != len(data["nodes"]):
                raise LatticeError("duplicate node ids")
            edges: dict[tuple[int, int], float] = {}
            for e in data["edges"]:
                key = (int(e["from"]), int(e["to"]))
                if key in edges:
                    raise LatticeError(f"duplicate edge {key}")
                edges[key] = float(e["score"])
            lattice = cls(tokens, edges, int(data["start"]), int(data["end"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise LatticeError(f"malformed lattice JSON: {exc}") from exc
        lattice.validate()
        return lattice


def topo_sort(lattice: Lattice) -> list[int]:
    """Topological node order, deterministic with ties by node id."""
    indeg = {v: 0 for v in lattice.tokens}
    for _, v in lattice.edges:
        indeg[v] += 1
    ready = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for x, _ in lattice.successors(v):
            indeg[x] -= 1
            if indeg[x] == 0:
                heapq.heappush(ready, x)
    if len(order) < len(lattice.tokens):
        raise CycleError(_find_back_edge(lattice, {v for v in indeg if indeg[v] > 0}))
    return order


def _find_back_edge(lattice: Lattice, remaining: set[int]) -> tuple[int, int]:
    # every remaining node sits on or feeds a cycle; walk inside the
    # remaining set until a node repeats
    v = min(remaining)
    seen: dict[int, int] = {}
    prev = None
    while v not in seen:
        seen[v] = 1
        prev = v
        v = min(x for x, _ in lattice.successors(v) if x in remaining)
    return (prev, v)


# -- marker conventions and tokenizers --------------------------------------


@dataclass(frozen=True)
class MarkerConvention:
    """How subword pieces mark word boundaries.

    ``suffix`` style (e.g. ``@@``): a marked piece continues into the next
    one; words end at unmarked pieces.  ``prefix`` style (e.g. ``▁``):
    a marked piece starts a new word; unmarked pieces extend the current one.
    """

    style: str  # "suffix" | "prefix"
    marker: str

    def __post_init__(self):
        if self.style not in ("suffix", "prefix"):
            raise ValueError(f"unknown marker style {self.style!r}")
        if not self.marker:
            raise ValueError("marker must be non-empty")

    def strip(self, token: str) -> str:
        if self.style == "suffix":
            return token[: -len(self.marker)] if token.endswith(self.marker) else token
        return token[len(self.marker):] if token.startswith(self.marker) else token

    def starts_word(self, token: str) -> bool:
        """Can this piece be the first piece of a word?"""
        return True if self.style == "suffix" else token.startswith(self.marker)

    def word_ends_at(self, token: str) -> bool:
        """Can a word end at this piece?"""
        return not token.endswith(self.marker) if self.style == "suffix" else True

    def continues(self, token: str, next_token: str) -> bool:
        """Does ``next_token`` extend the word currently ending in ``token``?"""
        if self.style == "suffix":
            return token.endswith(self.marker)
        return not next_token.startswith(self.marker)


SUFFIX_AT = MarkerConvention("suffix", "@@")
PREFIX_UNDERSCORE = MarkerConvention("prefix", "▁")


@dataclass(frozen=True)
class TokenizerAdapter:
    """Wraps a subword segmenter together with its marker convention.

    Contract: concatenating the marker-stripped pieces of ``segment(word)``
    reconstructs ``word`` exactly.
    """

    name: str
    convention: MarkerConvention
    segment_fn: Callable[[str], list[str]]

    def segment(self, word: str) -> list[str]:
        pieces = self.segment_fn(word)
        if not pieces:
            raise TokenizationError(f"{self.name}: no pieces for {word!r}")
        rebuilt = "".join(self.convention.strip(p) for p in pieces)
        if rebuilt != word:
            raise TokenizationError(
                f"{self.name}: pieces {pieces!r} rebuild to {rebuilt!r}, not {word!r}"
            )
        return pieces


def identity_tokenizer() -> TokenizerAdapter:
    return TokenizerAdapter("identity", SUFFIX_AT, lambda w: [w])


def char_tokenizer() -> TokenizerAdapter:
    def segment(word: str) -> list[str]:
        if len(word) <= 1:
            return [word]
        return [c + "@@" for c in word[:-1]] + [word[-1]]

    return TokenizerAdapter("char", SUFFIX_AT, segment)


def chunk_tokenizer(size: int = 2) -> TokenizerAdapter:
    """Fixed-size chunks with a word-initial prefix marker (SentencePiece style)."""

    marker = PREFIX_UNDERSCORE.marker

    def segment(word: str) -> list[str]:
        chunks = [word[i : i + size] for i in range(0, len(word), size)] or [word]
        return [marker + chunks[0]] + chunks[1:]

    return TokenizerAdapter(f"chunk{size}", PREFIX_UNDERSCORE, segment)


# -- conversions -------------------------------------------------------------


def word_lattice_from_subword(
    lattice: Lattice, convention: MarkerConvention
) -> Lattice:
    """Collapse a subword lattice into a word lattice.

    Each maximal subword run spelling one word becomes a single word node;
    the collapsed incoming edge carries the entry edge score plus the sum of
    the run-internal edge scores.  Parallel runs between the same boundary
    nodes spelling the same word are merged, keeping the maximum score.
    """
    lattice.validate()
    tok = lattice.tokens

    # word units keyed by (entry boundary node, final subword node, word)
    arcs: dict[tuple[int, int, str], float] = {}
    boundaries = {lattice.start}
    worklist = [lattice.start]
    while worklist:
        b = worklist.pop()
        for s, entry_score in lattice.successors(b):
            if s == lattice.end:
                continue  # direct b -> end edge handled during assembly
            if not convention.starts_word(tok[s]):
                if b == lattice.start:
                    raise LatticeError(
                        f"continuation piece {tok[s]!r} directly after the start node"
                    )
                continue  # word continues through this edge on other paths
            # expand the run starting at s
            stack = [(s, convention.strip(tok[s]), 0.0)]
            while stack:
                v, word, internal = stack.pop()
                if convention.word_ends_at(tok[v]):
                    key = (b, v, word)
                    score = entry_score + internal
                    if key not in arcs or score > arcs[key]:
                        arcs[key] = score
                    if v not in boundaries:
                        boundaries.add(v)
                        worklist.append(v)
                for t, s_vt in lattice.successors(v):
                    if t == lattice.end:
                        if not convention.word_ends_at(tok[v]):
                            raise LatticeError(
                                f"continuation piece {tok[v]!r} dangles at the end node"
                            )
                        continue
                    if convention.continues(tok[v], tok[t]):
                        stack.append((t, word + convention.strip(tok[t]), internal + s_vt))

    # assemble the node-labeled word lattice; one node per arc
    keys = sorted(arcs)
    start_id = 0
    end_id = len(keys) + 1
    node_of = {key: i + 1 for i, key in enumerate(keys)}
    tokens = {start_id: EPS, end_id: EPS}
    edges: dict[tuple[int, int], float] = {}
    by_entry: dict[int, list[tuple[int, int, str]]] = {}
    for key in keys:
        tokens[node_of[key]] = key[2]
        by_entry.setdefault(key[0], []).append(key)
    for key in keys:
        b, e, _ = key
        if b == lattice.start:
            edges[(start_id, node_of[key])] = arcs[key]
        if (e, lattice.end) in lattice.edges:
            edges[(node_of[key], end_id)] = lattice.edges[(e, lattice.end)]
        for nxt in by_entry.get(e, []):
            edges[(node_of[key], node_of[nxt])] = arcs[nxt]
    if (lattice.start, lattice.end) in lattice.edges:
        edges[(start_id, end_id)] = lattice.edges[(lattice.start, lattice.end)]

    tokens, edges = _merge_equivalent(tokens, edges)
    pruned = _prune(tokens, edges, start_id, end_id)
    pruned.validate()
    return pruned


def _merge_equivalent(
    tokens: dict[int, str], edges: dict[tuple[int, int], float]
) -> tuple[dict[int, str], dict[tuple[int, int], float]]:
    """Merge nodes with identical token and identical outgoing edges.

    Collapses parallel spellings of the same word that reconverge
    immediately (keeping the maximum score on combined incoming edges)
    without changing the path string set.
    """
    while True:
        out: dict[int, set[tuple[int, float]]] = {v: set() for v in tokens}
        for (u, v), s in edges.items():
            out[u].add((v, s))
        groups: dict[tuple, int] = {}
        alias: dict[int, int] = {}
        for v in sorted(tokens):
            key = (tokens[v], frozenset(out[v]))
            if key in groups:
                alias[v] = groups[key]
            else:
                groups[key] = v
        if not alias:
            return tokens, edges
        new_edges: dict[tuple[int, int], float] = {}
        for (u, v), s in edges.items():
            key = (alias.get(u, u), alias.get(v, v))
            if key not in new_edges or s > new_edges[key]:
                new_edges[key] = s
        tokens = {v: t for v, t in tokens.items() if v not in alias}
        edges = new_edges


def _prune(
    tokens: dict[int, str],
    edges: dict[tuple[int, int], float],
    start: int,
    end: int,
) -> Lattice:
    """Drop nodes not on any start-to-end path, then renumber densely."""
    succ: dict[int, list[int]] = {v: [] for v in tokens}
    pred: dict[int, list[int]] = {v: [] for v in tokens}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)

    def closure(root, adj):
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    keep = closure(start, succ) & closure(end, pred)
    if start not in keep or end not in keep:
        raise LatticeError("no start-to-end path survives pruning")
    remap = {v: i for i, v in enumerate(sorted(keep))}
    return Lattice(
        {remap[v]: tokens[v] for v in keep},
        {(remap[u], remap[v]): s for (u, v), s in edges.items() if u in keep and v in keep},
        remap[start],
        remap[end],
    )


def retokenize_lattice(word_lattice: Lattice, tok: TokenizerAdapter) -> Lattice:
    """Expand each word node into a chain of subword token nodes.

    The word's incoming edge scores move onto the first piece's incoming
    edges; intra-word edges carry score 0, so path score sums are unchanged.
    """
    word_lattice.validate()
    tokens = {0: EPS}
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    next_id = 1
    for v in sorted(word_lattice.tokens):
        if v in (word_lattice.start, word_lattice.end):
            continue
        pieces = tok.segment(word_lattice.tokens[v])
        ids = list(range(next_id, next_id + len(pieces)))
        next_id += len(pieces)
        for i, piece in zip(ids, pieces):
            tokens[i] = piece
        first[v], last[v] = ids[0], ids[-1]
    end_id = next_id
    tokens[end_id] = EPS
    first[word_lattice.start] = last[word_lattice.start] = 0
    first[word_lattice.end] = last[word_lattice.end] = end_id

    edges: dict[tuple[int, int], float] = {}
    for v in first:
        if v in (word_lattice.start, word_lattice.end):
            continue
        a, b = first[v], last[v]
        for i in range(a, b):
            edges[(i, i + 1)] = 0.0
    for (u, v), score in word_lattice.edges.items():
        edges[(last[u], first[v])] = score

    out = Lattice(tokens, edges, 0, end_id)
    out.validate()
    return out


def lattice_from_nbest(nbest: "NBestList") -> Lattice:
    """Merge an N-best list into a lattice.

    Builds a prefix trie over the word sequences, then merges states with
    identical token and identical continuation set (suffix merging).  Each
    hypothesis contributes its full score on its first edge and 0 elsewhere;
    merged edges keep the maximum.  Every hypothesis string stays a path.
    """
    seqs = []
    for hyp in nbest.hypotheses:
        words = hyp.text.split()
        if not words:
            raise DataError(f"hypothesis {hyp.rank} has empty text")
        seqs.append((words, hyp.asr_logscore))

    # trie: node 0 is the root/start; -1 is the shared end
    trie_tokens: dict[int, str] = {0: EPS, -1: EPS}
    children: dict[int, dict[str, int]] = {0: {}, -1: {}}
    escore: dict[tuple[int, int], float] = {}
    next_id = 1
    for words, score in seqs:
        node = 0
        for i, word in enumerate(words):
            child = children[node].get(word)
            if child is None:
                child = next_id
                next_id += 1
                trie_tokens[child] = word
                children[child] = {}
                children[node][word] = child
            edge = (node, child)
            placed = score if i == 0 else 0.0
            if edge not in escore or placed > escore[edge]:
                escore[edge] = placed
            node = child
        edge = (node, -1)
        if edge not in escore or 0.0 > escore[edge]:
            escore[edge] = 0.0

    # continuation signatures, computed leaves-first via memoized recursion
    sig: dict[int, frozenset] = {-1: frozenset({()})}

    def suffixes(v: int) -> frozenset:
        if v in sig:
            return sig[v]
        out = set()
        for word, child in children[v].items():
            for s in suffixes(child):
                out.add((word,) + s)
        if (v, -1) in escore:
            out.add(())
        sig[v] = frozenset(out)
        return sig[v]

    groups: dict[object, int] = {}
    group_of: dict[int, int] = {}
    for v in trie_tokens:
        if v == 0:
            key = ("__start__",)
        elif v == -1:
            key = ("__end__",)
        else:
            key = (trie_tokens[v], suffixes(v))
        if key not in groups:
            groups[key] = v
        group_of[v] = groups[key]

    merged_edges: dict[tuple[int, int], float] = {}
    for (u, v), s in escore.items():
        key = (group_of[u], group_of[v])
        if key not in merged_edges or s > merged_edges[key]:
            merged_edges[key] = s

    # densify ids with a deterministic BFS from the root
    rep_tokens = {rep: trie_tokens[rep] for rep in set(group_of.values())}
    succ: dict[int, set[int]] = {rep: set() for rep in rep_tokens}
    for u, v in merged_edges:
        succ[u].add(v)
    remap: dict[int, int] = {group_of[0]: 0}
    queue = [group_of[0]]
    while queue:
        u = queue.pop(0)
        for v in sorted(succ[u], key=lambda x: (rep_tokens[x], x)):
            if v not in remap:
                remap[v] = len(remap)
                queue.append(v)

    lattice = Lattice(
        {remap[v]: rep_tokens[v] for v in rep_tokens},
        {(remap[u], remap[v]): s for (u, v), s in merged_edges.items()},
        remap[group_of[0]],
        remap[group_of[-1]],
    )
    lattice.validate()
    return lattice


def lattice_oracle_wer(lattice: Lattice, ref: Sequence[str]) -> AlignmentCounts:
    """Minimum edit errors between ``ref`` and any lattice path.

    Dynamic program over (node, reference position) states; no path
    enumeration.  Tie-breaks mirror :func:`asrec.metrics.align`:
    match/substitution preferred over deletion over insertion.
    """
    if not ref:
        raise ValueError("reference must be non-empty")
    m = len(ref)
    order = topo_sort(lattice)
    INF = float("inf")
    dist: dict[int, list[float]] = {}
    # back[v][i] = (kind, pred_node, pred_i); kind in {cor, sub, del, ins, eps}
    back: dict[int, list[Optional[tuple[str, int, int]]]] = {}

    for v in order:
        token = lattice.tokens[v]
        is_eps = token == EPS
        d = [INF] * (m + 1)
        bk: list[Optional[tuple[str, int, int]]] = [None] * (m + 1)
        preds = [u for u, _ in lattice.predecessors(v)]
        if v == lattice.start:
            d[0] = 0.0
        for i in range(m + 1):
            best = d[i]
            choice = bk[i]
            if is_eps:
                for u in preds:
                    val = dist[u][i]
                    if val < best:
                        best, choice = val, ("eps", u, i)
            else:
                if i >= 1:
                    match = token == ref[i - 1]
                    for u in preds:
                        val = dist[u][i - 1] + (0 if match else 1)
                        if val < best:
                            best = val
                            choice = ("cor" if match else "sub", u, i - 1)
            if i >= 1 and d[i - 1] + 1 < best:
                best, choice = d[i - 1] + 1, ("del", v, i - 1)
            if not is_eps:
                for u in preds:
                    val = dist[u][i] + 1
                    if val < best:
                        best, choice = val, ("ins", u, i)
            d[i], bk[i] = best, choice
        dist[v] = d
        back[v] = bk

    if dist[lattice.end][m] == INF:
        raise LatticeError("end node unreachable in oracle DP")

    cor = sub = dele = ins = 0
    v, i = lattice.end, m
    while not (v == lattice.start and i == 0):
        step = back[v][i]
        assert step is not None
        kind, pv, pi = step
        if kind == "cor":
            cor += 1
        elif kind == "sub":
            sub += 1
        elif kind == "del":
            dele += 1
        elif kind == "ins":
            ins += 1
        v, i = pv, pi
    return AlignmentCounts(cor, sub, dele, ins, ref_len=m)
