"""Review cleaning: redundant-character removal, tokenization, stopwords."""

from __future__ import annotations

import unicodedata
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from bnpolarity.errors import CorpusError

__all__ = [
    "strip_redundant",
    "tokenize",
    "remove_stopwords",
    "load_stopwords",
    "parse_stopwords",
    "default_stopwords",
    "preprocess_review",
]

# ZWNJ/ZWJ shape Bengali conjuncts inside a word.
_WORD_JOINERS = frozenset("‌‍")


def _keep(ch: str) -> bool:
    # Bengali vowel signs and virama are combining marks (Mc/Mn), so marks are
    # kept alongside letters or words like "অসাধারণ" would be torn apart.
    return ch.isspace() or unicodedata.category(ch)[0] in "LM" or ch in _WORD_JOINERS


def _clean(text: str) -> str:
    text = unicodedata.normalize("NFC", unicodedata.normalize("NFC", text).lower())
    text = "".join(ch if _keep(ch) else " " for ch in text)
    return " ".join(text.split())


def strip_redundant(text: str) -> str:
    """Drop punctuation, symbols and digits; normalize to NFC; lowercase Latin.

    Every character that is neither a letter, a combining mark nor whitespace
    becomes a space, then whitespace runs collapse and the ends are trimmed.

    >>> strip_redundant("ইহা এক অসাধারণ বই।। ...!!")
    'ইহা এক অসাধারণ বই'
    """
    previous, current = None, _clean(text)
    # Removing characters can leave a sequence NFC would recompose; iterate to
    # the fixed point so the function is idempotent.
    while current != previous:
        previous, current = current, _clean(current)
    return current


def tokenize(text: str) -> list[str]:
    return text.split()


def remove_stopwords(tokens: Iterable[str], stops: Iterable[str]) -> list[str]:
    stops = stops if isinstance(stops, (set, frozenset)) else frozenset(stops)
    return [t for t in tokens if t not in stops]


def parse_stopwords(text: str, origin: str = "<string>") -> frozenset[str]:
    words = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        if any(ch.isspace() for ch in word):
            raise CorpusError(f"{origin}: stopword {word!r} contains whitespace", line=lineno)
        words.add(unicodedata.normalize("NFC", word))
    return frozenset(words)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword file: one word per line, ``#`` comments, UTF-8.

    Entries are NFC-normalized so they match the output of
    :func:`strip_redundant`.
    """
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    except OSError as exc:
        raise CorpusError(f"{path}: {exc.strerror or exc}") from None
    return parse_stopwords(text, str(path))


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The bundled list of common Bengali conjunctions, pronouns and postpositions."""
    text = resources.files("bnpolarity").joinpath("data/stopwords_bn.txt").read_text(encoding="utf-8")
    return parse_stopwords(text, "stopwords_bn.txt")


def preprocess_review(text: str, stops: Iterable[str] = frozenset()) -> list[str]:
    return remove_stopwords(tokenize(strip_redundant(text)), stops)
