import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from asrec.textnorm import normalize_eval, normalize_stats


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("The pot, and the kettle.", "the pot and the kettle"),
        ("", ""),
        ("it's  A  TEST!", "it's a test"),
        ("well-known fact", "well known fact"),
        ("'quoted' words", "quoted words"),
        ("don’t stop", "don't stop"),
        ("Hello, 世界 2024!", "hello 世界 2024"),
    ],
)
def test_normalize_eval(raw, expected):
    assert normalize_eval(raw) == expected


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("it's a test", "its a test"),
        ("Hello, 世界 2024!", "hello 2024"),
        ("a   b", "a b"),
        ("", ""),
        ("a\tb\nc", "a b c"),
    ],
)
def test_normalize_stats(raw, expected):
    assert normalize_stats(raw) == expected


@given(st.text(max_size=80))
def test_eval_idempotent(text):
    once = normalize_eval(text)
    assert normalize_eval(once) == once


@given(st.text(max_size=80))
def test_stats_idempotent(text):
    once = normalize_stats(text)
    assert normalize_stats(once) == once


@given(st.text(max_size=80))
def test_stats_alphabet_closure(text):
    assert re.fullmatch(r"[a-z0-9 ]*", normalize_stats(text))
