# tests/test_cross_validation.py

"""
Tests for fold assignment, validation draws and the cross-validated search.
"""

import json
import logging

import numpy as np
import pytest

from src.config import ConfigManager
from src.evaluation.cross_validation import cross_validate, make_split
from src.exceptions import EvaluationError
from src.processing.corpus import build_corpus
from src.weighting.schemes import SchemeContext
from tests.conftest import synonym_setup

SMALL_GRIDS = {"k": [1, 3], "tau": [0.5], "k1": [1.2], "b": [0.75], "alpha": [1e-3]}


# --- Test Data Fixtures ---

@pytest.fixture
def topic_context(topic_corpus, topic_table):
    return SchemeContext(corpus=topic_corpus, emb=topic_table)


# --- Test Cases ---

def test_folds_are_stratified_and_cover_everything():
    labels = ["a"] * 10 + ["b"] * 15
    split = make_split(labels, 5, seed=1)
    assert sorted(np.concatenate([split.test_indices(f) for f in range(5)]).tolist()) == list(range(25))
    for fold in range(5):
        test_labels = [labels[i] for i in split.test_indices(fold)]
        assert test_labels.count("a") == 2 and test_labels.count("b") == 3


def test_small_classes_warn_once(caplog):
    labels = ["a"] * 12 + ["b"] * 2
    with caplog.at_level(logging.WARNING):
        split = make_split(labels, 5, seed=0)
    assert len(set(split.folds.tolist())) == 5
    warnings = [r for r in caplog.records if "not stratified" in r.getMessage()]
    assert len(warnings) == 1


def test_validation_draws_partition_the_pool():
    labels = np.array(["a"] * 10 + ["b"] * 10, dtype=object)
    split = make_split(labels, 5, seed=3)
    for fold in range(5):
        pool = set(split.pool_indices(fold).tolist())
        draws = split.validation_draws(fold, labels, draws=3, fraction=0.3)
        assert len(draws) == 3
        for train, val in draws:
            assert not set(train) & set(val)
            assert set(train) | set(val) == pool
        assert not all(np.array_equal(draws[0][1], d[1]) for d in draws[1:]), "draws should differ"


def test_fixed_assignments():
    split = make_split(["a", "b", "a", "b"], 5, seed=0, assignments=[0, 0, 1, 1])
    assert split.n_folds == 2
    assert split.test_indices(1).tolist() == [2, 3]
    with pytest.raises(EvaluationError):
        make_split(["a", "b"], 5, seed=0, assignments=[0, 0])


def test_separable_topics_are_classified(topic_context):
    """Disjoint topic vocabularies give perfect propagated-weight accuracy."""
    report = cross_validate(topic_context, ["bow", "cptw"], SMALL_GRIDS, seed=0, progress=False)
    assert report.n_folds == 5
    assert report.scheme("cptw").mean_micro_f1 == 1.0
    assert report.scheme("bow").mean_micro_f1 >= 0.9
    for result in report.schemes:
        assert sum(f.n_test for f in result.folds) == 24, "every document is tested exactly once"
        assert all(f.k in (1, 3) for f in result.folds)
        assert all(f.params == ({"tau": 0.5} if result.scheme == "cptw" else {}) for f in result.folds)


def test_report_is_deterministic_across_threads(topic_corpus, topic_table):
    """Same seed at 1 and 8 threads: byte-identical JSON."""
    grids = dict(SMALL_GRIDS, tau=[0.3, 0.6])
    outputs = []
    for threads in (1, 8):
        context = SchemeContext(corpus=topic_corpus, emb=topic_table, threads=threads)
        report = cross_validate(context, ["cptw-idf", "tfidf"], grids, seed=7, threads=threads, progress=False)
        outputs.append(report.to_json({"seed": 7}).encode("utf-8"))
    assert outputs[0] == outputs[1]
    document = json.loads(outputs[0])
    assert "timings" not in document
    assert document["provenance"]["seed"] == 7


def test_dense_schemes_run(topic_context):
    report = cross_validate(topic_context, ["we-avg", "sif", "bm25"], SMALL_GRIDS, seed=1, n_folds=3, progress=False)
    assert [r.scheme for r in report.schemes] == ["we-avg", "sif", "bm25"]
    assert report.scheme("we-avg").mean_micro_f1 == 1.0


def test_oversized_k_is_skipped(topic_context, caplog):
    grids = dict(SMALL_GRIDS, k=[1, 500])
    with caplog.at_level(logging.WARNING):
        report = cross_validate(topic_context, ["bow"], grids, seed=0, progress=False)
    assert report.scheme("bow").chosen_ks() == [1] * 5
    assert "skipping k" in caplog.text


def test_rejects_tiny_or_single_class_corpora(topic_table):
    tiny = build_corpus([(str(i), str(i % 2), "boat cat") for i in range(6)], stopwords=())
    with pytest.raises(EvaluationError, match="10 documents"):
        cross_validate(SchemeContext(corpus=tiny), ["bow"], SMALL_GRIDS, progress=False)
    single = build_corpus([(str(i), "same", "boat") for i in range(12)], stopwords=())
    with pytest.raises(EvaluationError, match="classes"):
        cross_validate(SchemeContext(corpus=single), ["bow"], SMALL_GRIDS, progress=False)


def test_timings_only_on_request(topic_context):
    report = cross_validate(topic_context, ["bow"], SMALL_GRIDS, seed=0, n_folds=2, progress=False)
    with_timings = json.loads(report.to_json({}, include_timings=True))
    assert "bow" in with_timings["timings"]
    assert "seconds" in with_timings["schemes"][0]["folds"][0]


def test_propagated_idf_beats_bow_on_synonym_split_topics(tmp_path):
    """
    Full default protocol: every document uses one synonym of each topic
    pair plus a topic-neutral word, so merging synonyms can only help.
    """
    table, corpus = synonym_setup(per_class=15, seed=4, split=True, generic=1)
    grids = ConfigManager(tmp_path / "absent.json").GRIDS
    report = cross_validate(SchemeContext(corpus=corpus, emb=table), ["cptw-idf", "bow"], grids, seed=0, progress=False)
    assert report.n_folds == 5
    assert all(len(f.params) == 1 and 0.0 < f.params["tau"] <= 1.0 for f in report.scheme("cptw-idf").folds)
    assert report.scheme("cptw-idf").mean_micro_f1 >= report.scheme("bow").mean_micro_f1
