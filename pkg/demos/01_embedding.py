"""Where a point lands in the sparse embedding.

Each point of the unit cube touches only a handful of coordinates: one per
(k, r, shape) slot.  Print them for a single point in three dimensions, then
check that every row has the same norm and that the columns are orthogonal.
"""

import numpy as np

from mixholder import embed, embedding_dim, embedding_nnz, enumerate_triples, gram_matrix

d, m = 3, 4
idx = enumerate_triples(d, m)
print(f"d={d}, m={m}: p={embedding_dim(d, m)} coordinates, {embedding_nnz(d, m)} nonzero per point")

x = np.array([0.3, 0.8, 0.55])
e = embed(x, idx)
for i, v in zip(e.indices, e.values):
    t = idx.triple(int(i))
    print(f"  {int(i):4d}  k={t.k} r={t.r} levels={t.box.levels} offsets={t.box.offsets}  {v:+.4f}")
print(f"squared norm {e.norm_sq:.4f} (expected {idx.norm_sq:.4f})")

# Orthogonality: summing over all finest cells gives a scaled identity.
G = gram_matrix(3, 3)
print("Gram over all cells is 2**6 * I:", np.array_equal(G, 64.0 * np.eye(len(G))))
