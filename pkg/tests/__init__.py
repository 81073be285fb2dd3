# tests/__init__.py

"""
Initializes the 'tests' directory as a Python package.

One test module per source module (`test_<module>.py`); shared toy
embeddings, corpora and temporary files live in `conftest.py`. Property
checks are seeded loops or parametrized seeds so every run is reproducible.
"""
