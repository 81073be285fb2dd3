# tests/conftest.py

"""
Shared fixtures: a three-word toy embedding with hand-computable similarities,
the two-document corpus built over it, and a seeded two-topic corpus large
enough for cross-validation, plus helpers writing them to disk.
"""

import numpy as np
import pytest

from src.embeddings.loader import EmbeddingTable
from src.processing.corpus import build_corpus
from src.propagation.similarity_graph import build_propagation

SEA_WORDS = ("boat", "ship", "sea", "ocean", "sail", "wave")
HOME_WORDS = ("cat", "couch", "sofa", "dog", "rug", "lamp")


def topic_embeddings(seed: int = 7) -> EmbeddingTable:
    """Sea words cluster around one axis, home words around another."""
    rng = np.random.default_rng(seed)
    words, rows = [], []
    for axis, group in ((0, SEA_WORDS), (1, HOME_WORDS)):
        for word in group:
            v = 0.15 * rng.standard_normal(4)
            v[axis] += 1.0
            words.append(word)
            rows.append(v)
    return EmbeddingTable(words, np.vstack(rows))


def topic_documents(per_class: int = 12, seed: int = 3):
    """(id, label, text) records: each document draws 4 words of its topic."""
    rng = np.random.default_rng(seed)
    docs = []
    for label, group in (("sea", SEA_WORDS), ("home", HOME_WORDS)):
        for i in range(per_class):
            words = rng.choice(group, size=4, replace=True)
            docs.append((f"{label}/{i:02d}.txt", label, " ".join(words)))
    return docs


GENERIC_WORDS = ("g0", "g1")


def synonym_setup(per_class: int = 10, seed: int = 0, split: bool = False, generic: int = 0):
    """
    Two topics over disjoint synonym pairs; synonyms sit at cosine 0.9.

    With `split` a document uses one synonym of every pair throughout,
    otherwise each token picks its synonym independently. `generic` adds
    that many topic-neutral tokens shared by both classes.
    """
    dim = 8 + len(GENERIC_WORDS)
    words, rows = [], []
    for pair in range(4):
        u = np.zeros(dim)
        w = np.zeros(dim)
        u[2 * pair] = 1.0
        w[2 * pair + 1] = 1.0
        words += [f"p{pair}x", f"p{pair}y"]
        rows += [u, 0.9 * u + np.sqrt(1 - 0.81) * w]
    for i, word in enumerate(GENERIC_WORDS):
        g = np.zeros(dim)
        g[8 + i] = 1.0
        words.append(word)
        rows.append(g)
    table = EmbeddingTable(words, np.vstack(rows))

    rng = np.random.default_rng(seed)
    docs = []
    for label, pairs in (("left", (0, 1)), ("right", (2, 3))):
        for i in range(per_class):
            if split:
                variant = rng.choice(["x", "y"])
                tokens = [f"p{p}{variant}" for p in pairs for _ in range(2)]
            else:
                tokens = [f"p{p}{rng.choice(['x', 'y'])}" for p in pairs for _ in range(2)]
            if generic:
                tokens += [str(g) for g in rng.choice(GENERIC_WORDS, size=generic)]
            docs.append((f"{label}{i}", label, " ".join(tokens)))
    return table, build_corpus(docs, stopwords=())


def write_text_embeddings(path, table: EmbeddingTable, header: bool = True):
    lines = [f"{len(table)} {table.dim}"] if header else []
    for word, vector in zip(table.words, table.vectors):
        lines.append(word + " " + " ".join(repr(float(x)) for x in vector))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_dataset_dir(root, docs):
    for doc_id, _, text in docs:
        target = root / doc_id
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    return root


# --- Test Data Fixtures ---

@pytest.fixture
def toy_embeddings():
    """a=(1,0), b=(0.8,0.6), c=(0,1): cos(a,b)=0.8, cos(b,c)=0.6, cos(a,c)=0."""
    return EmbeddingTable(["a", "b", "c"], np.array([[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]]))


@pytest.fixture
def toy_corpus():
    """Vocabulary (a, b, c), N=2, df a:2 b:1 c:1; document 1 has tf (2, 0, 1)."""
    return build_corpus([("d0", "x", "a b"), ("d1", "y", "a a c")], stopwords=())


@pytest.fixture
def toy_propagation(toy_embeddings, toy_corpus):
    """Propagation matrix of the toy corpus at tau=0.5."""
    return build_propagation(toy_embeddings, toy_corpus, 0.5)


@pytest.fixture
def topic_table():
    return topic_embeddings()


@pytest.fixture
def topic_corpus():
    """24 documents in two well separated topics."""
    return build_corpus(topic_documents(), stopwords=())


@pytest.fixture
def topic_files(tmp_path):
    """The topic corpus as a class-per-directory dataset plus a text embedding file."""
    dataset = write_dataset_dir(tmp_path / "dataset", topic_documents())
    embeddings = write_text_embeddings(tmp_path / "vectors.txt", topic_embeddings())
    stopwords = tmp_path / "stop.txt"
    stopwords.write_text("the\n", encoding="utf-8")
    return {"dataset": dataset, "embeddings": embeddings, "stopwords": stopwords, "root": tmp_path}
