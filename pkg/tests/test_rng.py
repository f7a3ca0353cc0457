import numpy as np

from fairmmd._rng import rng_for, subseed


def test_same_stream_reproduces():
    a = rng_for(3, 1, 4).standard_normal(8)
    b = rng_for(3, 1, 4).standard_normal(8)
    np.testing.assert_array_equal(a, b)


def test_distinct_streams_differ():
    draws = {
        tuple(np.round(rng_for(0, *stream).standard_normal(4), 12))
        for stream in [(0,), (1,), (0, 0), (0, 1), (1, 0), (2, 7)]
    }
    assert len(draws) == 6


def test_subseed_is_a_stable_int():
    a = subseed(5, 2, 9)
    assert isinstance(a, int)
    assert a == subseed(5, 2, 9)
    assert a != subseed(5, 2, 10)
    assert a != subseed(6, 2, 9)
