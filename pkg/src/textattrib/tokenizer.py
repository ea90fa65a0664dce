"""Deterministic word tokenization and sentence segmentation.

All feature extractors share this single definition of a token and a
sentence so that features stay consistent with each other:

* a token is a maximal run of Unicode letters/digits, optionally joined
  by internal apostrophes (' or ’) or hyphens, lowercased;
* a sentence ends at '.', '!', '?' or '…' when followed by whitespace
  or end of text; a trailing fragment without terminal punctuation forms
  a final sentence.

No abbreviation lexicon is applied, so "Dr. Smith arrived." segments
into two sentences; this is a documented limitation of the rule.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[^\W_]+(?:['’\-][^\W_]+)*", re.UNICODE)
_TERMINALS = frozenset(".!?…")

EN_VOWELS = frozenset("aeiouy")
ES_VOWELS = frozenset("aeiouáéíóúü")


@dataclass(frozen=True)
class TokenizedText:
    """Lowercased word tokens with sentence spans and punctuation tallies.

    ``sentences`` holds half-open token-index ranges; they are disjoint,
    ordered, and their lengths sum to ``len(tokens)``.  ``punct_counts``
    has the keys ``comma``, ``exclamation``, ``question`` and ``all``.
    """

    tokens: tuple
    sentences: tuple
    char_count: int
    punct_counts: dict

    @property
    def word_count(self) -> int:
        return len(self.tokens)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)

    def sentence_lengths(self) -> list:
        return [stop - start for start, stop in self.sentences]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> TokenizedText:
    """Split ``text`` into lowercased word tokens and sentence spans.

    Pure function; whitespace-only input yields zero tokens and a single
    empty sentence range so that downstream extractors can apply their
    documented degenerate defaults.
    """
    spans = [(m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]
    tokens = tuple(text[a:b].lower() for a, b in spans)

    n_chars = len(text)
    boundaries = []
    commas = bangs = questions = all_punct = 0
    for i, ch in enumerate(text):
        if ch == ",":
            commas += 1
        elif ch == "!":
            bangs += 1
        elif ch == "?":
            questions += 1
        if _is_punct(ch):
            all_punct += 1
        if ch in _TERMINALS and (i + 1 == n_chars or text[i + 1].isspace()):
            boundaries.append(i)

    sentences = []
    tok_i = 0
    for b in boundaries:
        start = tok_i
        while tok_i < len(spans) and spans[tok_i][0] < b:
            tok_i += 1
        if tok_i > start:
            sentences.append((start, tok_i))
    if tok_i < len(tokens):
        sentences.append((tok_i, len(tokens)))
    if not sentences:
        sentences.append((0, len(tokens)))  # empty range when no tokens

    return TokenizedText(
        tokens=tokens,
        sentences=tuple(sentences),
        char_count=n_chars,
        punct_counts={
            "comma": commas,
            "exclamation": bangs,
            "question": questions,
            "all": all_punct,
        },
    )


def syllable_count(token: str, lang: str = "en") -> int:
    """Heuristic syllable count: maximal vowel-group runs, minimum 1.

    English subtracts one for a word-final silent 'e' when more than one
    vowel group is present ("cake" -> 1).  This replaces an external
    readability library; counts are a stated approximation, not a
    reproduction of any particular library.
    """
    if not token:
        raise ValueError("syllable_count needs a non-empty token")
    vowels = ES_VOWELS if lang == "es" else EN_VOWELS
    token = token.lower()
    groups = 0
    prev_vowel = False
    for ch in token:
        is_vowel = ch in vowels
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if lang == "en" and groups > 1 and token.endswith("e"):
        groups -= 1
    return max(groups, 1)
