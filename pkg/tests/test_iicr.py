# tests/test_iicr.py

"""
Tests for the inter-vs-intra class ratio and its tau sweep.
"""

import numpy as np
import pytest

from src.evaluation.iicr import iicr, tau_sweep, write_sweep_csv
from src.exceptions import DegenerateIicrError, IicrError, ParameterError
from src.processing.corpus import build_corpus
from src.weighting.schemes import SchemeContext, apply_normalization
from tests.conftest import synonym_setup


# --- Test Data Fixtures ---

@pytest.fixture
def line_points():
    """Class A = {0, 0.1}, class B = {10, 10.1} on a line."""
    return np.array([[0.0], [0.1], [10.0], [10.1]]), ["A", "A", "B", "B"]


# --- Test Cases ---

def test_line_example(line_points):
    vectors, labels = line_points
    result = iicr(vectors, labels, k=1)
    assert np.isclose(result.intra["A"], 0.1, rtol=1e-9)
    assert np.isclose(result.inter["A"], 9.95, rtol=1e-9)
    assert np.isclose(result.ratios["A"], 99.5, rtol=1e-9)
    assert np.isclose(result.ratios["B"], 99.5, rtol=1e-9)
    assert abs(result.iicr - 99.5) < 1e-9
    assert result.clamped_points == 0


def test_sums_are_not_divided_by_k(line_points):
    """With k=2 the intra side is clamped to the one other member."""
    vectors, labels = line_points
    result = iicr(vectors, labels, k=2)
    assert result.clamped_points == 4
    assert np.isclose(result.inter["A"], (10 + 10.1 + 9.9 + 10.0) / 2)


def test_identical_distributions_give_ratio_near_one():
    rng = np.random.default_rng(42)
    vectors = rng.standard_normal((400, 2))
    labels = ["p"] * 200 + ["q"] * 200
    value = iicr(vectors, labels, k=5).iicr
    assert 0.8 <= value <= 1.25, f"IICR was {value}"


def test_scale_and_relabel_invariance():
    rng = np.random.default_rng(5)
    vectors = np.vstack([rng.normal(0, 1, (30, 3)), rng.normal(2, 1, (30, 3))])
    labels = ["a"] * 30 + ["b"] * 30
    base = iicr(vectors, labels, k=4).iicr
    assert abs(iicr(vectors * 7.5, labels, k=4).iicr - base) < 1e-9
    relabelled = ["z" if label == "a" else "y" for label in labels]
    assert abs(iicr(vectors, relabelled, k=4).iicr - base) < 1e-9


def test_separated_classes_exceed_one():
    vectors = np.array([[0.0], [1.0], [2.0], [10.0], [11.0], [12.0]])
    assert iicr(vectors, list("aaabbb"), k=2).iicr > 1.0


def test_matches_brute_force():
    rng = np.random.default_rng(8)
    vectors = rng.standard_normal((40, 3))
    labels = np.array(rng.choice(["a", "b", "c"], size=40), dtype=object)
    k = 3
    result = iicr(vectors, labels, k=k)
    dist = np.linalg.norm(vectors[:, None, :] - vectors[None, :, :], axis=2)
    for c in sorted(set(labels)):
        members = np.flatnonzero(labels == c)
        inter, intra = [], []
        for i in members:
            same = [j for j in members if j != i]
            other = np.flatnonzero(labels != c)
            intra.append(np.sort(dist[i, same])[:k].sum())
            inter.append(np.sort(dist[i, other])[:k].sum())
        assert np.isclose(result.intra[c], np.mean(intra))
        assert np.isclose(result.inter[c], np.mean(inter))


def test_errors():
    with pytest.raises(IicrError, match="solo"):
        iicr(np.array([[0.0], [1.0], [2.0]]), ["pair", "pair", "solo"], k=1)
    with pytest.raises(DegenerateIicrError):
        iicr(np.array([[0.0], [0.0], [5.0], [5.0]]), ["a", "a", "b", "b"], k=1)
    with pytest.raises(IicrError):
        iicr(np.array([[0.0], [1.0]]), ["a", "a"], k=1)
    with pytest.raises(ParameterError):
        iicr(np.array([[0.0], [1.0]]), ["a", "b"], k=0)


@pytest.mark.parametrize("scheme", ["cptw", "cptw-idf"])
def test_sweep_rises_when_synonyms_merge(scheme):
    """Propagation over synonyms tightens classes at tau=0.5 but not at tau=1."""
    table, corpus = synonym_setup()
    sweep = tau_sweep(SchemeContext(corpus=corpus, emb=table), scheme, [0.5, 1.0], k=3)
    assert all(entry.error is None for entry in sweep.entries)
    low, high = (entry.result.iicr for entry in sweep.entries)
    assert low > high


def test_single_tau_sweep_equals_direct_call():
    table, corpus = synonym_setup(seed=2)
    context = SchemeContext(corpus=corpus, emb=table)
    sweep = tau_sweep(context, "cptw", [0.5], k=2)
    vectors = apply_normalization(context.vectorize("cptw", {"tau": 0.5}, None, np.arange(corpus.n_docs)), "l2")
    assert sweep.entries[0].result.iicr == iicr(vectors, corpus.labels, k=2).iicr


def test_sweep_records_errors_and_continues(tmp_path):
    """Identical documents make every tau degenerate; each is reported."""
    table, _ = synonym_setup()
    corpus = build_corpus([(str(i), "ab"[i % 2], "p0x p1y") for i in range(6)], stopwords=())
    sweep = tau_sweep(SchemeContext(corpus=corpus, emb=table), "cptw-idf", [0.5, 1.0], k=1)
    assert [e.error is not None for e in sweep.entries] == [True, True]

    path = write_sweep_csv(tmp_path / "sweep.csv", sweep, {"seed": 0})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# tool=cptw")
    assert "tau,iicr,class,inter,intra,ratio" in lines
    assert "0.5,nan,*,,,nan" in lines


def test_sweep_csv_rows(tmp_path):
    table, corpus = synonym_setup()
    sweep = tau_sweep(SchemeContext(corpus=corpus, emb=table), "cptw", [0.5], k=3)
    sweep.notes["idf_scope"] = "all"
    lines = write_sweep_csv(tmp_path / "s.csv", sweep, {"seed": 3}).read_text(encoding="utf-8").splitlines()
    assert "# idf_scope=all" in lines
    rows = lines[lines.index("tau,iicr,class,inter,intra,ratio") + 1:]
    assert [row.split(",")[2] for row in rows] == ["*", "left", "right"]


def test_sweep_rejects_other_schemes(toy_corpus, toy_embeddings):
    with pytest.raises(ParameterError):
        tau_sweep(SchemeContext(corpus=toy_corpus, emb=toy_embeddings), "bow", [0.5], k=1)
