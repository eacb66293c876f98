"""Exception types shared across the toolkit."""

from __future__ import annotations


class AsrecError(Exception):
    """Base class for all toolkit errors."""


class DataError(AsrecError):
    """A dataset or record is malformed.

    ``line`` carries the 1-based line number when the problem was found
    while reading a JSONL file.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LatticeError(DataError):
    """A lattice violates its structural invariants."""


class CycleError(LatticeError):
    """The edge set contains a cycle; ``back_edge`` names one offending edge."""

    def __init__(self, back_edge: tuple[int, int]):
        super().__init__(f"cycle detected: back edge {back_edge[0]} -> {back_edge[1]}")
        self.back_edge = back_edge


class TokenizationError(AsrecError):
    """A tokenizer failed its round-trip contract."""


class ScorerError(AsrecError):
    """Base class for scorer backend failures."""


class TransportError(ScorerError):
    """Transient transport failure talking to a scorer service; retryable."""


class ScorerRequestError(ScorerError):
    """The scorer rejected the request (e.g. tokenization failure); not retryable."""


class EndpointError(AsrecError):
    """A chat-completion endpoint call failed after retries."""


class ParseError(AsrecError):
    """A model reply did not follow the expected format."""
