# tests/test_embedding_average.py

"""
Tests for the averaged-embedding representations (WE-AVG and SIF).
"""

import logging

import numpy as np
import pytest

from src.embeddings.loader import EmbeddingTable
from src.exceptions import DatasetError, ParameterError
from src.processing.corpus import build_corpus
from src.weighting.embedding_average import (
    SifModel,
    power_iteration,
    sif_vectors,
    we_avg_matrix,
    we_avg_vector,
    word_probabilities,
)


# --- Test Cases ---

def test_we_avg_of_orthogonal_words(toy_embeddings):
    assert np.allclose(we_avg_vector(["a", "c"], toy_embeddings), [0.5, 0.5])
    assert np.allclose(we_avg_vector(["a", "a"], toy_embeddings), [1.0, 0.0])


def test_we_avg_unknown_tokens(toy_embeddings, caplog):
    """Unknown tokens are skipped; a document of only unknown tokens is zero."""
    assert np.allclose(we_avg_vector(["a", "zzz"], toy_embeddings), [1.0, 0.0])
    with caplog.at_level(logging.WARNING):
        v = we_avg_vector(["zzz"], toy_embeddings)
    assert np.array_equal(v, [0.0, 0.0])
    assert "zero vector" in caplog.text


def test_we_avg_matrix_respects_multiplicity(toy_embeddings, toy_corpus):
    rows = we_avg_matrix(toy_corpus, toy_embeddings)
    assert np.allclose(rows[1], [2 / 3, 1 / 3])
    assert np.allclose(rows[0], [0.9, 0.3])


def test_word_probabilities(toy_corpus):
    assert np.allclose(word_probabilities(toy_corpus), [3 / 5, 1 / 5, 1 / 5])
    assert np.allclose(word_probabilities(toy_corpus, [0]), [0.5, 0.5, 0.0])


def test_sif_single_document_projects_to_zero(toy_embeddings, toy_corpus):
    """Removing the only training direction annihilates that document."""
    out = sif_vectors(toy_corpus, toy_embeddings, alpha=1e-3, train_indices=[1], apply_indices=[1])
    assert np.allclose(out, 0.0, atol=1e-8)


def test_power_iteration_picks_larger_axis():
    """Two orthogonal vectors of unequal norm: the direction is the larger one."""
    x = np.array([[3.0, 0.0], [0.0, 1.0]])
    u = power_iteration(x, seed=5)
    assert np.isclose(abs(u[0]), 1.0, atol=1e-6)
    assert np.isclose(u[1], 0.0, atol=1e-6)


def test_power_iteration_is_seeded():
    x = np.random.default_rng(0).standard_normal((6, 4))
    assert np.array_equal(power_iteration(x, seed=1), power_iteration(x, seed=1))


def test_sif_zero_probabilities_reduce_to_average(toy_embeddings, toy_corpus):
    """With p(w)=0 every weight is 1, so SIF is WE-AVG minus the projection."""
    probs = np.zeros(toy_corpus.m)
    model = SifModel.fit(toy_corpus, toy_embeddings, 1e-3, word_probs=probs)
    avg = we_avg_matrix(toy_corpus, toy_embeddings)
    u = model.direction
    expected = avg - np.outer(avg @ u, u)
    assert np.allclose(model.transform(toy_corpus, toy_embeddings), expected)


def test_sif_validation(toy_embeddings, toy_corpus):
    with pytest.raises(ParameterError):
        SifModel.fit(toy_corpus, toy_embeddings, 0.0)
    with pytest.raises(DatasetError):
        SifModel.fit(toy_corpus, toy_embeddings, 1e-3, train_indices=[])


def test_sif_output_orthogonal_to_direction():
    rng = np.random.default_rng(2)
    table = EmbeddingTable([f"w{i}" for i in range(8)], rng.standard_normal((8, 3)))
    corpus = build_corpus(
        [(str(i), "x", " ".join(rng.choice(table.words, size=5))) for i in range(6)], stopwords=()
    )
    model = SifModel.fit(corpus, table, 1e-2, train_indices=[0, 1, 2, 3])
    out = model.transform(corpus, table)
    assert np.allclose(out @ model.direction, 0.0, atol=1e-10)
