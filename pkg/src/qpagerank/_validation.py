"""Input validation helpers shared by the library and the estimators."""

from __future__ import annotations

import numpy as np

from .graphs import Digraph

COLUMN_SUM_TOL = 1e-12


def as_digraph(X) -> Digraph:
    """Coerce estimator input to a :class:`Digraph`.

    Accepts a Digraph, or a square adjacency matrix (array-like) with
    rows as sources: a nonzero entry (i, j) is the edge i -> j.
    """
    if isinstance(X, Digraph):
        return X
    a = np.asarray(X)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(
            f"expected a Digraph or a square adjacency matrix, got shape {a.shape}"
        )
    if a.shape[0] == 0:
        raise ValueError("adjacency matrix must be at least 1x1")
    return Digraph(
        a.shape[0],
        tuple(tuple(np.flatnonzero(row).tolist()) for row in a),
    )


def check_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def check_column_stochastic(m, substochastic: bool = False) -> np.ndarray:
    """Validate a column-stochastic matrix (entries >= 0, column sums 1).

    With ``substochastic=True`` all-zero (dangling) columns are also
    accepted; any other deviation of a column sum from 1 is rejected.
    """
    m = check_square(m)
    if np.any(m < 0):
        raise ValueError("stochastic matrix must be entrywise nonnegative")
    sums = m.sum(axis=0)
    ok = np.abs(sums - 1.0) <= COLUMN_SUM_TOL
    if substochastic:
        ok |= sums <= COLUMN_SUM_TOL
    if not np.all(ok):
        bad = int(np.flatnonzero(~ok)[0])
        raise ValueError(
            f"column {bad} sums to {sums[bad]!r}, expected 1"
            + (" (or 0 for a dangling column)" if substochastic else "")
        )
    return m


def check_probability_vector(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if n is not None and v.shape[0] != n:
        raise ValueError(f"expected a vector of length {n}, got {v.shape[0]}")
    if np.any(v < 0):
        raise ValueError("probability vector must be entrywise nonnegative")
    if abs(v.sum() - 1.0) > COLUMN_SUM_TOL:
        raise ValueError(f"probability vector sums to {v.sum()!r}, expected 1")
    return v


def check_unit_norm(v, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm is {norm!r}, expected 1 within {tol}")
    return v
