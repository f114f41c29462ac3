"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from inoculation.graph import Graph


@st.composite
def graphs(draw, min_n=1, max_n=8, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if connected:
        # random spanning tree first, then extra edges
        order = draw(st.permutations(range(n)))
        tree = []
        for k in range(1, n):
            parent = order[draw(st.integers(0, k - 1))]
            tree.append(tuple(sorted((parent, order[k]))))
        chosen = sorted(set(chosen) | set(tree))
    return Graph.from_edges(n, chosen)


@st.composite
def profiles(draw, n):
    return tuple(draw(st.lists(st.booleans(), min_size=n, max_size=n)))


@st.composite
def admissible_params(draw, n):
    """(C, L) with L/n < C <= L, L drawn from small rationals."""
    L = Fraction(draw(st.integers(1, 8)), draw(st.integers(1, 4)))
    k = draw(st.integers(1, 8 * n - 1))
    C = L * Fraction(8 * n - k, 8 * n)  # strictly above L/n, at most L
    if C <= L / n:
        C = L
    return C, L


fractions_01 = st.builds(Fraction, st.integers(0, 16), st.just(16))
models = st.sampled_from(["selfish", "absolute", "relative"])
