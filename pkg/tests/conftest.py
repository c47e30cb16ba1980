import pytest

from hopespeech.embedding import EmbeddingConfig, train_embeddings
from hopespeech.resources import demo_lexicon

from helpers import synthetic_language_corpus


@pytest.fixture(scope="session")
def lexicon():
    return demo_lexicon()


@pytest.fixture(scope="session")
def two_lang_docs():
    docs, labels = synthetic_language_corpus(400, seed=7, languages=("alpha", "beta"))
    return docs, labels


@pytest.fixture(scope="session")
def small_model(two_lang_docs):
    """Small shared embedding model; enough structure for feature tests."""
    docs, _ = two_lang_docs
    cfg = EmbeddingConfig(
        dim=16, window=3, negatives=3, epochs=3, min_count=2, bucket_count=20_000, seed=11
    )
    return train_embeddings(docs, cfg)
