"""Document-level stylometric features.

Computes 26 features over a :class:`~textattrib.tokenizer.TokenizedText`
covering lexical diversity, sentence structure, repetition, word-level
statistics, marker-word usage, readability, and punctuation.  The output
order is fixed (see FEATURE_NAMES) so feature matrices are comparable
across runs.

Conventions:

* standard deviations are population standard deviations;
* hapax/dis-legomena ratios count token occurrences belonging to types
  of frequency 1 resp. 2, divided by the token count;
* a zero-token document maps to the all-zero vector and is logged.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DataError
from .tokenizer import TokenizedText, syllable_count

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "ttr",
    "root_ttr",
    "log_ttr",
    "hapax_ratio",
    "dis_legomena_ratio",
    "rare_word_burstiness",
    "avg_sentence_length",
    "sentence_length_std",
    "sentence_length_cv",
    "sentence_count",
    "bigram_repetition",
    "trigram_repetition",
    "avg_word_length",
    "word_length_std",
    "word_count",
    "function_word_ratio",
    "transition_word_ratio",
    "hedge_word_ratio",
    "first_person_ratio",
    "formal_word_ratio",
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "punctuation_ratio",
    "comma_ratio",
    "exclamation_ratio",
    "question_ratio",
)

_LEXICON_SETS = ("function", "transitions", "hedges", "first_person", "formal")


@dataclass(frozen=True)
class MarkerLexicon:
    """Lowercased single-token marker sets for one language."""

    function_words: frozenset
    transition_words: frozenset
    hedge_words: frozenset
    first_person_pronouns: frozenset
    formal_words: frozenset


def _read_wordlist(path: Path) -> frozenset:
    words = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if not word:
            continue
        if any(ch.isspace() for ch in word):
            raise DataError(f"multi-token lexicon entry {word!r} in {path.name}")
        words.add(word)
    if not words:
        raise DataError(f"empty lexicon file {path}")
    return frozenset(words)


def load_lexicon(directory, lang: str) -> MarkerLexicon:
    """Load the five marker lists for ``lang`` from ``directory``.

    Files are named ``function_<lang>.txt``, ``transitions_<lang>.txt``,
    ``hedges_<lang>.txt``, ``first_person_<lang>.txt``,
    ``formal_<lang>.txt``: UTF-8, one token per line.
    """
    directory = Path(directory)
    sets = []
    for stem in _LEXICON_SETS:
        path = directory / f"{stem}_{lang}.txt"
        if not path.is_file():
            raise DataError(f"missing lexicon file {path}")
        sets.append(_read_wordlist(path))
    return MarkerLexicon(*sets)


def default_lexicon(lang: str) -> MarkerLexicon:
    """The lexicon shipped with the package for ``lang`` (en or es)."""
    if lang not in ("en", "es"):
        raise DataError(f"unsupported language {lang!r}")
    root = resources.files("textattrib").joinpath("data/lexicons")
    with resources.as_file(root) as directory:
        return load_lexicon(directory, lang)


def _pop_std(values) -> float:
    n = len(values)
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / n)


def _burstiness(positions) -> float:
    # Goh-Barabasi coefficient over inter-occurrence gaps; needs >= 2 gaps.
    if len(positions) < 3:
        return 0.0
    gaps = [b - a for a, b in zip(positions, positions[1:])]
    mu = sum(gaps) / len(gaps)
    sigma = _pop_std(gaps)
    return (sigma - mu) / (sigma + mu)


def _ngram_repetition(tokens, n: int) -> float:
    total = len(tokens) - (n - 1)
    if total < 1:
        return 0.0
    unique = len({tuple(tokens[i : i + n]) for i in range(total)})
    return (total - unique) / total


def extract_stylo(tok: TokenizedText, lex: MarkerLexicon, lang: str = "en") -> list:
    """Compute the 26 features for one document, in FEATURE_NAMES order."""
    n = tok.word_count
    if n == 0:
        log.warning("zero-token document mapped to all-zero feature vector")
        return [0.0] * len(FEATURE_NAMES)

    tokens = tok.tokens
    freqs = Counter(tokens)
    vocab = len(freqs)

    hapax_tokens = sum(1 for t in tokens if freqs[t] == 1)
    dis_tokens = sum(1 for t in tokens if freqs[t] == 2)
    rare_positions = [i for i, t in enumerate(tokens) if freqs[t] <= 2]

    sentence_lengths = tok.sentence_lengths()
    s = len(sentence_lengths)
    sent_mean = n / s
    sent_std = _pop_std(sentence_lengths)

    word_lengths = [len(t) for t in tokens]
    syllables = sum(syllable_count(t, lang) for t in tokens)
    words_per_sentence = n / s
    syllables_per_word = syllables / n

    punct = tok.punct_counts
    return [
        vocab / n,
        vocab / math.sqrt(n),
        1.0 if n == 1 else math.log(vocab) / math.log(n),
        hapax_tokens / n,
        dis_tokens / n,
        _burstiness(rare_positions),
        sent_mean,
        sent_std,
        sent_std / sent_mean if sent_mean > 0 else 0.0,
        float(s),
        _ngram_repetition(tokens, 2),
        _ngram_repetition(tokens, 3),
        sum(word_lengths) / n,
        _pop_std(word_lengths),
        float(n),
        sum(1 for t in tokens if t in lex.function_words) / n,
        sum(1 for t in tokens if t in lex.transition_words) / n,
        sum(1 for t in tokens if t in lex.hedge_words) / n,
        sum(1 for t in tokens if t in lex.first_person_pronouns) / n,
        sum(1 for t in tokens if t in lex.formal_words) / n,
        206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word,
        0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59,
        punct["all"] / tok.char_count if tok.char_count else 0.0,
        punct["comma"] / s,
        punct["exclamation"] / s,
        punct["question"] / s,
    ]
