import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnpolarity.errors import CorpusError
from bnpolarity.preprocess import (
    default_stopwords,
    load_stopwords,
    preprocess_review,
    remove_stopwords,
    strip_redundant,
    tokenize,
)

SAMPLE = "ইহা এক অসাধারণ বই।। ...!!"
SAMPLE_STOPS = frozenset({"ইহা", "এক"})

# Bengali letters, signs, digits and danda mixed with Latin and punctuation.
mixed_text = st.text(
    alphabet=st.sampled_from(list("অআইকখগঘচছজটঠডণতথদনপফবভমযরলশসহড়য়ৎািীুূেৈোৌ্ংঃঁ০১২৩৯।॥ \t\n.,!?#@-abcXYZ1234‌")),
    max_size=40,
)
any_text = st.one_of(mixed_text, st.text(max_size=40))


class TestStripRedundant:
    def test_reference_sample(self):
        assert strip_redundant(SAMPLE) == "ইহা এক অসাধারণ বই"

    def test_empty(self):
        assert strip_redundant("") == ""

    def test_digits_and_symbols(self):
        assert strip_redundant("বই ১২৩ #@! good") == "বই good"

    def test_latin_lowercased(self):
        assert strip_redundant("Good BOOK!") == "good book"

    def test_vowel_signs_survive(self):
        # vowel signs and virama are combining marks, not letters
        assert strip_redundant("চমৎকার, উপস্থাপনা!") == "চমৎকার উপস্থাপনা"

    def test_composed_form(self):
        decomposed = "য়"  # YA + NUKTA
        assert strip_redundant(decomposed) == unicodedata.normalize("NFC", decomposed)

    @settings(max_examples=500)
    @given(any_text)
    def test_idempotent(self, text):
        once = strip_redundant(text)
        assert strip_redundant(once) == once


class TestTokenize:
    def test_reference_sample(self):
        assert tokenize("ইহা এক অসাধারণ বই") == ["ইহা", "এক", "অসাধারণ", "বই"]

    def test_empty(self):
        assert tokenize("") == []

    def test_repeated_whitespace(self):
        assert tokenize("বেশ  চমৎকার") == ["বেশ", "চমৎকার"]


class TestStopwords:
    def test_reference_sample(self):
        assert remove_stopwords(["ইহা", "এক", "অসাধারণ", "বই"], SAMPLE_STOPS) == ["অসাধারণ", "বই"]

    def test_empty_list_is_identity(self):
        tokens = ["ক", "খ", "ক"]
        assert remove_stopwords(tokens, set()) == tokens

    def test_all_removed(self):
        assert remove_stopwords(["ইহা", "এক"], SAMPLE_STOPS) == []

    @given(st.lists(st.sampled_from(["ক", "খ", "গ", "ঘ"])), st.sets(st.sampled_from(["ক", "খ", "গ", "ঘ"])))
    def test_idempotent_and_shrinking(self, tokens, stops):
        once = remove_stopwords(tokens, stops)
        assert remove_stopwords(once, stops) == once
        assert len(once) <= len(tokens)

    def test_load_file(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("ইহা\n# comment\nএক\n\nএক\n", encoding="utf-8")
        assert load_stopwords(path) == {"ইহা", "এক"}

    def test_load_empty_file(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("", encoding="utf-8")
        assert load_stopwords(path) == frozenset()

    def test_whitespace_in_entry(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_text("ইহা\nদুই শব্দ\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="line 2"):
            load_stopwords(path)

    def test_non_utf8(self, tmp_path):
        path = tmp_path / "stops.txt"
        path.write_bytes(b"\xc3\x28\n")
        with pytest.raises(CorpusError, match="UTF-8"):
            load_stopwords(path)

    def test_default_list(self):
        stops = default_stopwords()
        assert 40 <= len(stops) <= 80
        assert SAMPLE_STOPS <= stops
        assert all(w and not any(c.isspace() for c in w) for w in stops)


class TestPipeline:
    def test_reference_sample(self):
        assert preprocess_review(SAMPLE, SAMPLE_STOPS) == ["অসাধারণ", "বই"]

    def test_nothing_survives(self):
        assert preprocess_review("!!! ??? ১২৩", default_stopwords()) == []

    def test_four_word_review(self):
        assert len(preprocess_review("লেখকের উপস্থাপনা বেশ চমৎকার", frozenset())) == 4

    @settings(max_examples=300)
    @given(any_text, st.sets(st.sampled_from(["ইহা", "এক", "বই", "a", "good"])))
    def test_composition_and_token_properties(self, text, stops):
        tokens = preprocess_review(text, stops)
        assert tokens == remove_stopwords(tokenize(strip_redundant(text)), stops)
        for token in tokens:
            assert token and not any(c.isspace() for c in token)
            assert all(unicodedata.category(c)[0] in "LM" or c in "‌‍" for c in token)
            assert not set(token) & set("০১২৩৯0123456789।.,!?#@")
