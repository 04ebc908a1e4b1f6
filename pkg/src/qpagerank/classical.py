"""Classical PageRank: hyperlink/patched/Google matrices and their solvers.

All matrices are dense, column-stochastic ndarrays: entry ``(i, j)`` is the
weight of the edge j -> i, so ranks evolve as ``v <- M @ v``. Dense is the
right trade-off at the desk scale this package targets (graphs are capped
at :data:`qpagerank.graphs.MAX_NODES` nodes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_column_stochastic, check_probability_vector
from .errors import AmbiguousStationaryError
from .graphs import Digraph

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10_000

# Eigenvalues within this distance of 1 count as members of the
# stationary eigenspace when checking uniqueness.
_EIGENSPACE_TOL = 1e-8


@dataclass(frozen=True)
class PowerMethodReport:
    """Final iterate of the power method plus convergence bookkeeping.

    ``residual`` is the L1 distance between the last two iterates;
    ``converged`` records whether it dropped below the tolerance before
    ``max_iters`` multiplications.
    """

    vector: np.ndarray
    iterations: int
    converged: bool
    residual: float


def build_hyperlink(g: Digraph) -> np.ndarray:
    """Hyperlink matrix: column j holds 1/outdeg(j) at each out-neighbor.

    Dangling nodes produce all-zero columns, so the result is only
    substochastic; run it through :func:`build_patched` before use.
    """
    h = np.zeros((g.n, g.n))
    for j, targets in enumerate(g.out_edges):
        if targets:
            h[list(targets), j] = 1.0 / len(targets)
    return h


def build_patched(h: np.ndarray) -> np.ndarray:
    """Replace every all-zero (dangling) column with uniform 1/n."""
    h = check_column_stochastic(h, substochastic=True)
    e = h.copy()
    n = e.shape[0]
    dangling = e.sum(axis=0) <= 1e-12
    e[:, dangling] = 1.0 / n
    return e


def build_google(e: np.ndarray, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Damped matrix alpha*E + (1-alpha)/n: follow a link with probability
    alpha, teleport uniformly otherwise. Strictly positive for alpha < 1,
    hence primitive and irreducible."""
    e = check_column_stochastic(e)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    n = e.shape[0]
    return alpha * e + (1.0 - alpha) / n


def google_matrix(g: Digraph, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Full pipeline hyperlink -> patched -> damped for a digraph."""
    return build_google(build_patched(build_hyperlink(g)), alpha)


def power_method(
    m: np.ndarray,
    i0=None,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> PowerMethodReport:
    """Iterate ``v <- M v`` until the L1 residual drops below ``tol``.

    ``i0`` defaults to the uniform distribution and must be a probability
    vector. There is no renormalization step: a stochastic M preserves L1
    mass on its own, and for a substochastic M the leaked mass is part of
    the story (a dangling column legitimately drives the iterates to the
    null vector). Non-convergence is reported, not raised, because
    periodic matrices genuinely cycle forever.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if i0 is None:
        i0 = np.full(n, 1.0 / n)
    v = check_probability_vector(i0, n)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iters + 1):
        nxt = m @ v
        residual = float(np.abs(nxt - v).sum())
        v = nxt
        if residual < tol:
            return PowerMethodReport(v, iterations, True, residual)
    return PowerMethodReport(v, iterations, False, residual)


def stationary_solve(m: np.ndarray) -> np.ndarray:
    """Stationary vector of a column-stochastic matrix by direct solve.

    Returns the nonnegative, L1-normalized v with ``M v = v`` (residual
    below 1e-10 in the max norm), computed from the SVD null space of
    M - I. Serves as the oracle of record when power iteration cycles.
    Raises :class:`AmbiguousStationaryError` when the eigenvalue-1
    eigenspace is degenerate (reducible M with several closed classes).
    """
    m = check_column_stochastic(m)
    n = m.shape[0]
    eigenvalues = np.linalg.eigvals(m)
    dim = int(np.sum(np.abs(eigenvalues - 1.0) <= _EIGENSPACE_TOL))
    if dim > 1:
        raise AmbiguousStationaryError(dim)
    _, _, vh = np.linalg.svd(m - np.eye(n))
    v = vh[-1].real
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    v /= v.sum()
    residual = float(np.abs(m @ v - v).max())
    if residual > 1e-10:
        raise RuntimeError(
            f"stationary solve residual {residual:.3e} exceeds 1e-10"
        )
    return v


def second_eigenvalue_modulus(m: np.ndarray) -> float:
    """Modulus of the second-largest-modulus eigenvalue (0 for n = 1)."""
    m = check_column_stochastic(m)
    mods = np.sort(np.abs(np.linalg.eigvals(m)))[::-1]
    return float(mods[1]) if mods.size > 1 else 0.0


def matrix_to_csv(m: np.ndarray) -> str:
    """CSV rendering (one row per line, 17 significant digits) for
    cross-checking against external tools."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return "\n".join(",".join(f"{x:.17g}" for x in row) for row in m) + "\n"
