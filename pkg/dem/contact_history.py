"""
Contact History

Tangential spring displacements keyed by contact. Keys are int64
(i * stride + j for particle pairs, i * n_walls + w for walls), kept sorted
so lookups are a single searchsorted.
"""

import numpy as np


class ContactHistory:
    """Sorted key -> tangential displacement store"""

    def __init__(self):
        self.keys = np.empty(0, dtype=np.int64)
        self.displacements = np.empty((0, 3))

    def __len__(self):
        return len(self.keys)

    def lookup(self, keys):
        """Stored displacement per key, zero for new contacts"""
        keys = np.asarray(keys, dtype=np.int64)
        out = np.zeros((len(keys), 3))
        if len(self.keys) == 0 or len(keys) == 0:
            return out
        index = np.searchsorted(self.keys, keys)
        clipped = np.minimum(index, len(self.keys) - 1)
        found = (index < len(self.keys)) & (self.keys[clipped] == keys)
        out[found] = self.displacements[clipped[found]]
        return out

    def replace(self, keys, displacements):
        """Keep exactly the given contacts (dropped keys are separated contacts)"""
        keys = np.asarray(keys, dtype=np.int64)
        displacements = np.asarray(displacements, dtype=float).reshape(-1, 3)
        order = np.argsort(keys, kind='stable')
        self.keys = keys[order]
        self.displacements = displacements[order]

    def clear(self):
        self.keys = np.empty(0, dtype=np.int64)
        self.displacements = np.empty((0, 3))
