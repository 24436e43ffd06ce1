"""Vocabulary construction and TF-IDF document vectors for the classical models.

Terms are word unigrams and bigrams (bigrams joined with ``_``) over the
normalized, whitespace-tokenized text. Weights use the smoothed idf

    idf(t) = ln((1 + n_documents) / (1 + df(t))) + 1

followed by L2 normalization of each document vector. Out-of-vocabulary terms
are ignored; an all-OOV document is the zero vector.
"""

from __future__ import annotations

from collections import Counter
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus
from .errors import DataError
from .textprep import DEFAULT_CONFIG, NormalizationConfig, TokenSequence, normalize, tokenize

DEFAULT_MIN_DF = 2
DEFAULT_MAX_FEATURES = 50_000


def ngrams(tokens: Sequence[str]) -> list[str]:
    """Unigrams followed by bigrams, in token order."""
    terms = list(tokens)
    terms.extend(f"{a}_{b}" for a, b in zip(tokens, tokens[1:]))
    return terms


class Vocabulary:
    """Immutable term index with per-term document frequencies.

    Indices are dense [0, V) assigned in lexicographic term order, so fitting
    is a pure function of corpus order and config.
    """

    def __init__(
        self,
        terms: Sequence[str],
        document_frequency: Sequence[int],
        n_documents: int,
        min_df: int = 1,
        max_features: int | None = None,
    ):
        if len(terms) != len(document_frequency):
            raise DataError("terms and document_frequency lengths differ")
        if min_df < 1:
            raise DataError(f"min_df must be >= 1, got {min_df}")
        if max_features is not None and len(terms) > max_features:
            raise DataError(f"{len(terms)} terms exceed max_features={max_features}")
        self.terms = tuple(terms)
        self.document_frequency = np.asarray(document_frequency, dtype=np.int64)
        if len(self.terms) and int(self.document_frequency.min()) < min_df:
            raise DataError("a retained term has document frequency below min_df")
        self.n_documents = int(n_documents)
        self.min_df = int(min_df)
        self.max_features = max_features
        self.term_to_index = {t: i for i, t in enumerate(self.terms)}
        if len(self.term_to_index) != len(self.terms):
            raise DataError("vocabulary terms must be unique")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Vocabulary)
            and self.terms == other.terms
            and np.array_equal(self.document_frequency, other.document_frequency)
            and self.n_documents == other.n_documents
            and self.min_df == other.min_df
            and self.max_features == other.max_features
        )

    @cached_property
    def idf(self) -> np.ndarray:
        return np.log((1.0 + self.n_documents) / (1.0 + self.document_frequency)) + 1.0


def fit_vocabulary(
    docs: Corpus | Iterable[str],
    config: NormalizationConfig = DEFAULT_CONFIG,
    min_df: int = DEFAULT_MIN_DF,
    max_features: int | None = DEFAULT_MAX_FEATURES,
) -> Vocabulary:
    """Count document frequencies and retain terms by min_df / max_features.

    When max_features caps the size, the highest-df terms win and df ties
    break lexicographically.
    """
    texts = docs.texts() if isinstance(docs, Corpus) else list(docs)
    if not texts:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    if min_df < 1:
        raise DataError(f"min_df must be >= 1, got {min_df}")
    df: Counter[str] = Counter()
    for text in texts:
        df.update(set(ngrams(tokenize(normalize(text, config)))))
    kept = [(term, count) for term, count in df.items() if count >= min_df]
    if max_features is not None and len(kept) > max_features:
        kept.sort(key=lambda item: (-item[1], item[0]))
        kept = kept[:max_features]
    kept.sort(key=lambda item: item[0])
    return Vocabulary(
        terms=[t for t, _ in kept],
        document_frequency=[c for _, c in kept],
        n_documents=len(texts),
        min_df=min_df,
        max_features=max_features,
    )


class DocumentVector:
    """Sparse TF-IDF vector: strictly increasing indices, unit L2 norm unless empty."""

    __slots__ = ("indices", "weights")

    def __init__(self, indices, weights):
        self.indices = np.asarray(indices, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        if self.indices.shape != self.weights.shape:
            raise DataError("indices and weights lengths differ")
        if len(self.indices) and not np.all(np.diff(self.indices) > 0):
            raise DataError("vector indices must be strictly increasing")
        if not np.all(np.isfinite(self.weights)):
            raise DataError("vector weights must be finite")

    def __len__(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return float(np.linalg.norm(self.weights))

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(w) for i, w in zip(self.indices, self.weights)}


def vectorize(tokens: TokenSequence, vocab: Vocabulary) -> DocumentVector:
    """tf . idf over in-vocabulary unigrams+bigrams, then L2-normalized."""
    counts: Counter[int] = Counter()
    for term in ngrams(tokens):
        idx = vocab.term_to_index.get(term)
        if idx is not None:
            counts[idx] += 1
    if not counts:
        return DocumentVector([], [])
    indices = np.array(sorted(counts), dtype=np.int64)
    tf = np.array([counts[int(i)] for i in indices], dtype=np.float64)
    weights = tf * vocab.idf[indices]
    norm = np.linalg.norm(weights)
    if norm > 0:
        weights = weights / norm
    return DocumentVector(indices, weights)


def vectorize_text(
    text: str, vocab: Vocabulary, config: NormalizationConfig = DEFAULT_CONFIG
) -> DocumentVector:
    return vectorize(tokenize(normalize(text, config)), vocab)


def vectorize_corpus(
    docs: Corpus | Iterable[str], vocab: Vocabulary, config: NormalizationConfig = DEFAULT_CONFIG
) -> list[DocumentVector]:
    texts = docs.texts() if isinstance(docs, Corpus) else list(docs)
    return [vectorize_text(text, vocab, config) for text in texts]


def vectors_to_csr(vectors: Sequence[DocumentVector], n_features: int) -> sp.csr_matrix:
    """Stack sparse vectors into one CSR matrix for training."""
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, vec in enumerate(vectors):
        if len(vec.indices) and int(vec.indices[-1]) >= n_features:
            raise DataError(
                f"vector index {int(vec.indices[-1])} out of range for {n_features} features"
            )
        indptr[i + 1] = indptr[i] + len(vec)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0, np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), n_features))
