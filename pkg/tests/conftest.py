from __future__ import annotations

import pytest
from hypothesis import settings, strategies as st

from dendrorho.generators import gen_example41, gen_random_ultrametric

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def spaces(draw, min_n=1, max_n=7, heights=(0, 1, 2, "5/2")):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return gen_random_ultrametric(seed, n, heights)


@pytest.fixture
def ex41():
    return gen_example41(1)
