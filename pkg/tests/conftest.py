import pytest

from polytopic.cooccur import build_index
from polytopic.corpus import BilingualDictionary, MultilingualTopic, corpus_from_token_lists


@pytest.fixture
def toy_corpus():
    """Four aligned documents; hand-countable statistics."""
    return corpus_from_token_lists(
        [["dog", "cat"], ["dog"], ["cat", "fish"], ["fish"]],
        [["hund", "katt"], ["hund"], ["katt"], ["fisk"]],
        "en",
        "xx",
    )


@pytest.fixture
def toy_index(toy_corpus):
    return build_index(toy_corpus)


@pytest.fixture
def toy_topic():
    return MultilingualTopic(("dog", "cat"), ("hund", "katt"), "en", "xx")


@pytest.fixture
def toy_dictionary():
    return BilingualDictionary.from_pairs([("dog", "hund"), ("cat", "katt")])
