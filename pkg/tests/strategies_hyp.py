"""Hypothesis strategies for small label / prediction / score fixtures."""
import numpy as np
from hypothesis import strategies as st


@st.composite
def binary(draw, n, min_ones=0):
    bits = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    a = np.array(bits, dtype=np.int8)
    if a.sum() < min_ones:
        a[draw(st.integers(0, n - 1))] = 1
    return a


@st.composite
def fixture(draw, max_len=24, min_len=1):
    """(y, yhat, scores) with coarse score levels so ties are common."""
    T = draw(st.integers(min_len, max_len))
    y = draw(binary(T))
    p = draw(binary(T))
    levels = draw(st.sampled_from([3, 10, 1000]))
    s = np.array(draw(st.lists(st.integers(0, levels), min_size=T, max_size=T)), dtype=np.float64) / levels
    return y, p, s
