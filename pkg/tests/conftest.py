import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest

from netgames.networks import Network
from netgames.strategies import MemoryOneStrategy, PayoffMatrix

hypothesis.settings.register_profile(
    "netgames", deadline=None, max_examples=50, derandomize=True
)
hypothesis.settings.load_profile("netgames")


@st.composite
def payoff_matrices(draw):
    """Strictly ordered (t, r, p, s) with comfortable gaps."""
    s = draw(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
    gaps = [
        draw(st.floats(min_value=0.1, max_value=5.0, allow_nan=False))
        for _ in range(3)
    ]
    p = s + gaps[0]
    r = p + gaps[1]
    t = r + gaps[2]
    return PayoffMatrix(t=t, r=r, p=p, s=s)


@st.composite
def memory_one_strategies(draw):
    probs = [
        draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
        for _ in range(4)
    ]
    return MemoryOneStrategy(*probs, label="drawn")


@st.composite
def connected_graphs(draw, min_n=4, max_n=24):
    """Random connected simple graph: spanning tree plus extra random edges."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**31))
    rng = np.random.default_rng(seed)
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(v))
        edges.add((u, v))
    extra = int(rng.integers(0, 2 * n))
    for _ in range(extra):
        u, v = sorted(rng.choice(n, size=2, replace=False).tolist())
        edges.add((u, v))
    return Network(n, edges)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
