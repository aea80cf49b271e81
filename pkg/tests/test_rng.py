import numpy as np

from edgeentropy import RngStream, as_generator


def test_same_key_same_sequence():
    a = RngStream(seed=7, stream_id=3).generator().random(100)
    b = RngStream(seed=7, stream_id=3).generator().random(100)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngStream(seed=7, stream_id=0).generator().random(100)
    b = RngStream(seed=7, stream_id=1).generator().random(100)
    assert not np.array_equal(a, b)


def test_distinct_seeds_differ():
    a = RngStream(seed=0).generator().random(100)
    b = RngStream(seed=1).generator().random(100)
    assert not np.array_equal(a, b)


def test_subkeys_select_derived_streams():
    s = RngStream(seed=11, stream_id=2)
    base = s.generator().random(10)
    sub0 = s.generator(0).random(10)
    sub1 = s.generator(1).random(10)
    assert not np.array_equal(base, sub0)
    assert not np.array_equal(sub0, sub1)
    assert np.array_equal(sub0, RngStream(11, 2).generator(0).random(10))


def test_child_changes_stream_only():
    s = RngStream(seed=5, stream_id=0)
    c = s.child(9)
    assert c.seed == 5
    assert c.stream_id == 9
    assert np.array_equal(
        c.generator().random(8), RngStream(5, 9).generator().random(8)
    )


def test_as_generator_accepts_both():
    stream = RngStream(seed=3)
    via_stream = as_generator(stream).random(5)
    assert np.array_equal(via_stream, stream.generator().random(5))
    gen = np.random.default_rng(3)
    assert as_generator(gen) is gen
