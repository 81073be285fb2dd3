# tests/test_text_processor.py

"""
Tests for tokenization and stopword loading.
"""

import pytest

from src.processing.text_processor import TextProcessor, load_stopwords, tokenize


# --- Test Cases ---

def test_tokenize_lowercases_and_splits():
    """Punctuation, whitespace and underscores separate tokens."""
    assert tokenize("The Boat, is_sailing!! 42x") == ["the", "boat", "is", "sailing", "42x"]


def test_tokenize_drops_stopwords_and_short_tokens():
    assert tokenize("The boat is on the sea", {"the", "is", "on"}) == ["boat", "sea"]
    assert tokenize("a bb ccc", min_token_len=2) == ["bb", "ccc"]


def test_tokenize_keeps_unicode_letters():
    assert tokenize("Ça va, naïve café") == ["ça", "va", "naïve", "café"]


def test_tokenize_keeps_combining_marks_in_the_token():
    """Lower-casing 'İ' yields i plus a combining dot; the word stays whole."""
    assert tokenize("İstanbul") == ["i̇stanbul"]
    assert tokenize("café au lait") == ["café", "au", "lait"], "decomposed accents are composed"
    hindi = "हिन्दी"
    assert tokenize(f"{hindi} text") == [hindi, "text"]
    assert tokenize("́alone") == ["alone"], "a leading mark is a separator"


def test_tokenize_empty_input():
    assert tokenize("") == []
    assert tokenize("!!! ...") == []


def test_tokenize_is_idempotent():
    """Re-tokenizing joined tokens gives the same tokens."""
    tokens = tokenize("Hello, WORLD -- straße 3D")
    assert tokenize(" ".join(tokens)) == tokens


def test_default_stopword_list_is_smart():
    """The vendored list drops the function words of the demo sentences."""
    stop = load_stopwords()
    assert {"the", "is", "on", "was", "a"} <= stop
    assert "boat" not in stop
    assert len(stop) > 500


def test_stopword_file_ignores_comments(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# comment\nFoo\n\nbar\n", encoding="utf-8")
    assert load_stopwords(path) == {"foo", "bar"}


def test_missing_stopword_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_stopwords(tmp_path / "none.txt")


def test_text_processor_validates_length():
    with pytest.raises(ValueError):
        TextProcessor(stopwords=[], min_token_len=0)
    assert TextProcessor(stopwords=["The"]).tokenize("the cat") == ["cat"]
