import numpy as np

from coversketch import CoverageInstance


def random_instance(seed, max_n=12, max_m=30):
    """Random instance where every element has degree >= 1."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(2, max_m + 1))
    set_ids, elem_ids = [], []
    for v in range(m):
        deg = int(rng.integers(1, n + 1))
        for s in rng.choice(n, size=deg, replace=False):
            set_ids.append(int(s))
            elem_ids.append(v)
    return CoverageInstance.from_edges(n, m, set_ids, elem_ids)
