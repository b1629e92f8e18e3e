"""
Counter-based random streams split by index from one root seed.
"""
import numpy as np


def generator(root_seed, index):
    """Returns the random generator of stream ``index`` under ``root_seed``.

    Streams are Philox generators keyed by SeedSequence(root_seed, spawn_key=(index,)),
    so the stream of an index does not depend on which other indices were drawn
    or on the worker that draws it.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(root_seed), spawn_key=(int(index),))))
