"""Disjoint-set forest with union by rank and path compression."""

import numpy as np


class UnionFind:
    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.intp)
        self.rank = np.zeros(n, dtype=np.intp)
        self.n_components = n

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    def union(self, a, b):
        """Merge the sets containing a and b; True if they were distinct."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        rank = self.rank
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1
        self.n_components -= 1
        return True

    def component_labels(self):
        """Root id for every element, without mutating the structure."""
        labels = self.parent.copy()
        while True:
            hops = labels[labels]
            if np.array_equal(hops, labels):
                return labels
            labels = hops
