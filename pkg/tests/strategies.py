"""Hypothesis strategies built on the package's seeded generators."""

import numpy as np
from hypothesis import strategies as st

from conetda.generators import random_filtered_complex, random_mm_space

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def filtered_complexes(draw, max_cells=40):
    return random_filtered_complex(np.random.default_rng(draw(seeds)), max_cells=max_cells)


@st.composite
def mm_spaces(draw, max_points=6):
    n = draw(st.integers(1, max_points))
    return random_mm_space(np.random.default_rng(draw(seeds)), n)


finite_values = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def diagram_pairs(draw, max_points=5, allow_inf=True):
    pts = []
    for _ in range(draw(st.integers(0, max_points))):
        b = draw(st.integers(0, 6))
        if allow_inf and draw(st.booleans()) and draw(st.booleans()):
            pts.append((float(b), float("inf")))
        else:
            pts.append((float(b), float(b + draw(st.integers(1, 6)))))
    return pts
