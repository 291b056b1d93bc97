"""The four propagation normalizations side by side.

Small enough to print whole matrices: a triangle and a 4-node path. The
interesting bits are the diagonals (self-loop handling differs per scheme)
and the spectra: the symmetric augmented normalization keeps every
eigenvalue in [-1, 1] with the top one exactly 1.
"""

import numpy as np

from dropgcn import SCHEMES, SparseMatrix, analyze, normalize

np.set_printoptions(precision=4, suppress=True)

triangle = SparseMatrix.from_dense([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
path4 = SparseMatrix.from_dense(
    [[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]])

for name, a in (("triangle", triangle), ("4-node path", path4)):
    print(f"=== {name} ===")
    for scheme in SCHEMES:
        mat = normalize(a, scheme)
        print(f"\n{scheme}:")
        print(mat.to_dense())
        rowsums = mat.to_dense().sum(axis=1)
        print(f"  row sums: {rowsums}")
    print()

# Spectra of the symmetric scheme. The triangle normalizes to the rank-1
# averaging matrix (all entries 1/3), so everything except the top
# eigenvalue is 0 and convergence to the constant vector is immediate.
# The path keeps a large second eigenvalue: slow mixing.
for name, a in (("triangle", triangle), ("4-node path", path4)):
    rep = analyze(normalize(a, "AugNormAdj"))
    print(f"{name}: eigenvalues {np.round(rep.eigenvalues, 4)}, "
          f"second largest magnitude {rep.second_largest:.4f}")
