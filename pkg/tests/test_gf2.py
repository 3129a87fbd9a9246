import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from heavyhex.gf2 import RowBasis, in_span, independent_subset, rank


def span(rows):
    out = {0}
    for r in rows:
        out |= {v ^ r for v in out}
    return out


vectors = st.lists(st.integers(0, 2**7 - 1), max_size=8)


@settings(max_examples=300, deadline=None)
@given(vectors)
def test_rank_matches_span_size(rows):
    assert 2 ** rank(rows) == len(span(rows))


@settings(max_examples=200, deadline=None)
@given(vectors, st.integers(0, 2**7 - 1))
def test_membership(rows, v):
    assert in_span(v, rows) == (v in span(rows))


@settings(max_examples=200, deadline=None)
@given(vectors, st.integers(0, 2**7 - 1))
def test_decompose_reconstructs(rows, v):
    basis = RowBasis()
    for r in rows:
        basis.add(r)
    parts = basis.decompose(v)
    if v in span(rows):
        acc = 0
        for k in parts:
            acc ^= rows[k]
        assert acc == v
    else:
        assert parts is None


def test_independent_subset_keeps_rank():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rows = [int(x) for x in rng.integers(0, 64, size=6)]
        keep = independent_subset(rows)
        assert rank(rows[i] for i in keep) == len(keep) == rank(rows)


def test_full_space():
    assert rank(1 << i for i in range(10)) == 10
    assert rank([3, 5, 6]) == 2
    assert all(in_span(v, [1, 2, 4]) for v in range(8))
    assert not any(in_span(v, []) for v in range(1, 4))
    for combo in itertools.product([0, 1], repeat=3):
        assert in_span(combo[0] | combo[1] << 1, [1, 2])
