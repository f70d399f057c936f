"""Shared numerical helpers: symmetric eigensolves, sign fixing, PCA bases."""

from __future__ import annotations

import numpy as np


def orient_columns(V: np.ndarray) -> np.ndarray:
    """Fix the sign of each column so its first nonzero component is positive.

    Eigenvectors and singular vectors are only defined up to sign; this makes
    every decomposition in the package deterministic.
    """
    V = np.array(V, dtype=float)
    for c in range(V.shape[1]):
        col = V[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        pivot = nz[0] if nz.size else int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            V[:, c] = -col
    return V


def sym_eigh(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a (symmetrized) matrix, eigenvalues ascending."""
    M = np.asarray(M, dtype=float)
    if not np.isfinite(M).all():
        raise ValueError("eigendecomposition input contains non-finite values")
    sym = (M + M.T) / 2.0
    return np.linalg.eigh(sym)


def pca_basis(features: np.ndarray, k: int) -> np.ndarray:
    """Orthonormal basis of the top-k principal directions of ``features``.

    The rows are locally mean-centered before the SVD, so the result does not
    depend on whether the caller centered already.  When k exceeds the number
    of right singular vectors available, the basis is completed with
    deterministic orthonormal directions.
    """
    X = np.asarray(features, dtype=float)
    n, d = X.shape
    if not 1 <= k <= d:
        raise ValueError(f"pca basis size must be in [1, {d}], got {k}")
    Xc = X - X.mean(axis=0)
    _, _, Vt = np.linalg.svd(Xc, full_matrices=False)
    V = Vt.T
    if V.shape[1] < k:
        V = complete_basis(V, k)
    return orient_columns(V[:, :k])


def complete_basis(V: np.ndarray, k: int) -> np.ndarray:
    """Extend orthonormal columns of V to k columns using identity directions.

    Candidate axes are tried in index order and orthogonalized against the
    accepted columns, so the completion is deterministic.
    """
    d = V.shape[0]
    if k > d:
        raise ValueError(f"cannot build {k} orthonormal columns in dimension {d}")
    cols = [V[:, i] for i in range(V.shape[1])]
    for axis in range(d):
        if len(cols) >= k:
            break
        e = np.zeros(d)
        e[axis] = 1.0
        for c in cols:
            e = e - (c @ e) * c
        norm = np.linalg.norm(e)
        if norm > 1e-8:
            cols.append(e / norm)
    return np.column_stack(cols[:k])
