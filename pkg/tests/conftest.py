import sys
from pathlib import Path

import hypothesis.strategies as st
import numpy as np
from hypothesis.extra.numpy import arrays

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def mask_strategy(max_side: int = 12):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(lambda s: arrays(np.bool_, s))


def saliency_strategy(max_side: int = 8):
    shapes = st.tuples(st.integers(1, max_side), st.integers(1, max_side))
    return shapes.flatmap(
        lambda s: arrays(
            np.float64,
            s,
            elements=st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False),
        )
    )
