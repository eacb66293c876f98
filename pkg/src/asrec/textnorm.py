"""Text normalization applied before WER computation and N-best statistics.

Two modes with frozen, documented rules (results are bit-reproducible):

* :func:`normalize_eval` — used on references and hypotheses before any WER
  computation: lowercase, drop punctuation and symbols (keeping apostrophes
  between word characters), treat hyphens/dashes as word separators, collapse
  whitespace.
* :func:`normalize_stats` — used for N-best list statistics: lowercase and
  keep only ``[a-z0-9 ]``; apostrophes are removed as well.

Both functions are total and idempotent.  Numerals are kept verbatim; no
inverse text normalization is attempted.
"""

from __future__ import annotations

import re
import unicodedata

_WS = re.compile(r"\s+")
_NON_STATS = re.compile(r"[^a-z0-9 ]")
# apostrophes lacking a word character on either side are plain punctuation
_LOOSE_APOS = re.compile(r"(?<!\w)'|'(?!\w)")


def normalize_eval(text: str) -> str:
    """Normalize ``text`` for WER scoring."""
    out = []
    for ch in text.lower():
        if ch in ("'", "’"):
            out.append("'")
            continue
        if ch.isspace():
            out.append(" ")
            continue
        cat = unicodedata.category(ch)
        if cat == "Pd":  # hyphens and dashes separate words
            out.append(" ")
        elif cat[0] in ("P", "S", "C"):
            continue
        else:
            out.append(ch)
    cleaned = _LOOSE_APOS.sub("", "".join(out))
    return _WS.sub(" ", cleaned).strip()


def normalize_stats(text: str) -> str:
    """Normalize ``text`` for N-best statistics: only ``[a-z0-9 ]`` survives."""
    text = _WS.sub(" ", text.lower())
    text = _NON_STATS.sub("", text)
    return _WS.sub(" ", text).strip()
