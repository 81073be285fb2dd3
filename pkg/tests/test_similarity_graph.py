# tests/test_similarity_graph.py

"""
Tests for the thresholded similarity graph and the propagation matrix.
"""

import logging

import numpy as np
import pytest

from src.embeddings.loader import EmbeddingTable
from src.exceptions import DatasetError, ParameterError, VocabularyMismatchError
from src.processing.corpus import Corpus, Document, build_corpus
from src.propagation.similarity_graph import (
    MIN_TAU,
    build_propagation,
    build_similarity,
    resolve_tau,
    row_normalize,
)


# --- Test Data Fixtures ---

@pytest.fixture
def random_setup():
    """60 random 5-d embeddings and a corpus using 50 of them plus 2 unknown words."""
    rng = np.random.default_rng(11)
    words = [f"w{i}" for i in range(60)]
    table = EmbeddingTable(words, rng.standard_normal((60, 5)))
    vocab = words[:50] + ["unknown1", "unknown2"]
    docs = [Document(id=str(i), tokens=tuple(vocab[i::4]), label=str(i % 2)) for i in range(4)]
    return table, Corpus.from_documents(docs)


# --- Test Cases ---

def test_toy_edges_and_alphas(toy_embeddings, toy_corpus):
    """At tau=0.5 the edges are a-b (0.8) and b-c (0.6); a-c is dropped."""
    sim = build_similarity(toy_embeddings, toy_corpus, 0.5)
    expected = np.array([[1.0, 0.8, 0.0], [0.8, 1.0, 0.6], [0.0, 0.6, 1.0]])
    assert np.allclose(sim.matrix.toarray(), expected)

    p = row_normalize(sim)
    assert np.allclose(p.alphas, [1 / 1.8, 1 / 2.4, 1 / 1.6]), f"alphas were {p.alphas}"
    assert np.isclose(p.alphas[2], 0.625)


def test_tau_one_gives_identity(toy_embeddings, toy_corpus):
    p = build_propagation(toy_embeddings, toy_corpus, 1.0)
    assert np.array_equal(p.matrix.toarray(), np.eye(3))


def test_unknown_word_keeps_self_loop(toy_embeddings, caplog):
    """A vocabulary word without an embedding propagates only to itself."""
    corpus = build_corpus([("d0", "x", "a zzz b")], stopwords=())
    with caplog.at_level(logging.WARNING):
        sim = build_similarity(toy_embeddings, corpus, 0.5)
    j = corpus.word_index["zzz"]
    assert sim.oov_rows == frozenset({j})
    row = sim.matrix.getrow(j)
    assert row.indices.tolist() == [j] and row.data.tolist() == [1.0]
    assert "no embedding" in caplog.text


def test_rows_sum_to_one_and_similarity_is_symmetric(random_setup):
    table, corpus = random_setup
    sim = build_similarity(table, corpus, 0.3)
    assert (sim.matrix != sim.matrix.T).nnz == 0, "similarity must be exactly symmetric"
    assert np.array_equal(sim.matrix.diagonal(), np.ones(corpus.m))
    p = row_normalize(sim)
    assert np.abs(np.asarray(p.matrix.sum(axis=1)).ravel() - 1.0).max() <= 1e-9
    assert np.all(p.matrix.data > 0)


def test_rows_sum_to_one_over_random_instances():
    """100 random embeddings, vocabularies (some words unembedded) and thresholds."""
    rng = np.random.default_rng(2024)
    for instance in range(100):
        m = int(rng.integers(3, 501))
        dim = int(rng.integers(2, 17))
        embedded = int(rng.integers(1, m + 1))
        tau = float(rng.uniform(0.01, 1.0))
        words = [f"w{i}" for i in range(m)]
        table = EmbeddingTable(words[:embedded], rng.standard_normal((embedded, dim)))
        docs = [Document(id=str(i), tokens=tuple(words[i::3]), label=str(i % 2)) for i in range(3)]
        p = row_normalize(build_similarity(table, Corpus.from_documents(docs), tau))
        sums = np.asarray(p.matrix.sum(axis=1)).ravel()
        assert sums.shape == (m,)
        assert np.abs(sums - 1.0).max() <= 1e-9, f"instance {instance} (m={m}, tau={tau:.3f})"


def test_matches_brute_force(random_setup):
    """Block-wise construction equals the dense thresholded cosine matrix."""
    table, corpus = random_setup
    tau = 0.4
    sim = build_similarity(table, corpus, tau, block_size=7)

    m = corpus.m
    dense = np.eye(m)
    for j, wj in enumerate(corpus.vocabulary):
        for k, wk in enumerate(corpus.vocabulary):
            if j != k and wj in table and wk in table:
                c = float(table.vector(wj) @ table.vector(wk))
                if c >= tau:
                    dense[j, k] = c
    assert np.abs(sim.matrix.toarray() - dense).max() <= 1e-12


def test_edge_count_is_monotone_in_tau(random_setup):
    table, corpus = random_setup
    counts = [build_similarity(table, corpus, tau).nnz for tau in (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)]
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == corpus.m


def test_result_does_not_depend_on_threads(random_setup):
    table, corpus = random_setup
    single = build_propagation(table, corpus, 0.2, block_size=8, threads=1)
    pooled = build_propagation(table, corpus, 0.2, block_size=8, threads=4)
    assert single.equals(pooled)


def test_restrict_equals_direct_build(random_setup):
    """Deriving a larger tau from a smaller one is exact."""
    table, corpus = random_setup
    base = build_similarity(table, corpus, 0.2, block_size=16)
    direct = build_similarity(table, corpus, 0.6, block_size=16)
    assert row_normalize(base.restrict(0.6)).equals(row_normalize(direct))
    with pytest.raises(ParameterError):
        direct.restrict(0.2)


def test_resolve_tau(caplog):
    with caplog.at_level(logging.WARNING):
        assert resolve_tau(0) == MIN_TAU
    assert "tau=0" in caplog.text
    assert resolve_tau(0.35) == 0.35
    for bad in (-0.1, 1.5):
        with pytest.raises(ParameterError):
            resolve_tau(bad)


def test_invalid_arguments(toy_embeddings, toy_corpus):
    with pytest.raises(ParameterError):
        build_similarity(toy_embeddings, toy_corpus, 0.5, block_size=0)
    with pytest.raises(ParameterError):
        build_similarity(toy_embeddings, toy_corpus, 0.5, threads=0)
    empty = build_corpus([("d0", "x", "the")], stopwords={"the"})
    with pytest.raises(DatasetError):
        build_similarity(toy_embeddings, empty, 0.5)


def test_vocabulary_check(toy_propagation, toy_corpus):
    toy_propagation.ensure_vocabulary(toy_corpus.vocabulary_hash)
    other = build_corpus([("d0", "x", "c b a")], stopwords=())
    with pytest.raises(VocabularyMismatchError):
        toy_propagation.ensure_vocabulary(other.vocabulary_hash)
