"""Property tests over randomly generated corpora and topics."""

import hypothesis.strategies as st
from hypothesis import assume, given, settings

from polytopic.cooccur import build_index
from polytopic.corpus import (
    MultilingualTopic,
    corpus_from_token_lists,
    swap_corpus_sides,
)
from polytopic.metrics import cnpmi, mta, npmi_pair, topic_npmi, twc
from polytopic.corpus import BilingualDictionary

VOCAB_A = [f"a{i}" for i in range(10)]
VOCAB_B = [f"b{i}" for i in range(10)]


def documents(vocab):
    return st.lists(
        st.lists(st.sampled_from(vocab), min_size=0, max_size=6),
        min_size=1,
        max_size=12,
    )


@st.composite
def corpora(draw):
    docs_a = draw(documents(VOCAB_A))
    docs_b = draw(
        st.lists(
            st.lists(st.sampled_from(VOCAB_B), min_size=0, max_size=6),
            min_size=len(docs_a),
            max_size=len(docs_a),
        )
    )
    return corpus_from_token_lists(docs_a, docs_b)


@st.composite
def corpora_with_topics(draw, max_cardinality=4):
    corpus = draw(corpora())
    c = draw(st.integers(min_value=1, max_value=max_cardinality))
    words_a = draw(
        st.lists(st.sampled_from(VOCAB_A + ["oovA"]), min_size=c, max_size=c, unique=True)
    )
    words_b = draw(
        st.lists(st.sampled_from(VOCAB_B + ["oovB"]), min_size=c, max_size=c, unique=True)
    )
    return corpus, MultilingualTopic(tuple(words_a), tuple(words_b))


@given(corpora(), st.sampled_from(VOCAB_A), st.sampled_from(VOCAB_B))
def test_joint_bounded_by_marginals(corpus, wa, wb):
    index = build_index(corpus)
    p_a, p_b, p_joint = index.pair_probability(wa, wb)
    assert 0.0 <= p_joint <= min(p_a, p_b) <= 1.0


@given(corpora(), st.sampled_from(VOCAB_A), st.sampled_from(VOCAB_B))
def test_pair_score_range(corpus, wa, wb):
    index = build_index(corpus)
    assert -1.0 <= npmi_pair(index, wa, wb, "cross") <= 1.0


@given(corpora_with_topics())
def test_cnpmi_range(pair):
    corpus, topic = pair
    index = build_index(corpus)
    assert -1.0 <= cnpmi(index, topic) <= 1.0


@given(corpora_with_topics())
def test_topic_npmi_range(pair):
    corpus, topic = pair
    assume(topic.cardinality >= 2)
    index = build_index(corpus)
    assert -1.0 <= topic_npmi(index, topic.words_a, side="a") <= 1.0


@given(corpora_with_topics())
def test_twc_range(pair):
    corpus, topic = pair
    index = build_index(corpus)
    assert 0.0 <= twc(index, topic.words_a, "a") <= 1.0
    assert 0.0 <= twc(index, topic.words_b, "b") <= 1.0


@given(corpora_with_topics())
@settings(max_examples=60)
def test_cnpmi_side_swap_symmetry(pair):
    corpus, topic = pair
    forward = cnpmi(build_index(corpus), topic)
    backward = cnpmi(build_index(swap_corpus_sides(corpus)), topic.swapped())
    assert abs(forward - backward) <= 1e-12


@given(corpora_with_topics())
def test_zero_convention_when_nothing_cooccurs(pair):
    corpus, topic = pair
    index = build_index(corpus)
    if all(
        index.joint_cross(wa, wb) == 0
        for wa in topic.words_a
        for wb in topic.words_b
    ):
        assert cnpmi(index, topic) == 0.0


@given(corpora_with_topics(), st.integers(min_value=1, max_value=5))
def test_appending_absent_words_never_increases_nonnegative_cnpmi(pair, extra):
    corpus, topic = pair
    index = build_index(corpus)
    base = cnpmi(index, topic)
    assume(base >= 0.0)
    grown = MultilingualTopic(
        topic.words_a + tuple(f"absentA{i}" for i in range(extra)),
        topic.words_b + tuple(f"absentB{i}" for i in range(extra)),
    )
    assert cnpmi(index, grown) <= base + 1e-15


@given(
    st.lists(
        st.tuples(st.sampled_from(VOCAB_A), st.sampled_from(VOCAB_B)),
        min_size=0,
        max_size=12,
    )
)
def test_mta_range(pairs):
    dictionary = BilingualDictionary.from_pairs(pairs)
    topic = MultilingualTopic(tuple(VOCAB_A[:4]), tuple(VOCAB_B[:4]))
    value = mta(dictionary, topic)
    assert 0.0 <= value <= 1.0
