"""Quantization of a column-stochastic matrix into an edge-space walk.

A stochastic matrix G on n vertices lifts to a unitary walk operator on
the n**2-dimensional space of directed edges, C^n (x) C^n. Basis vector
``|j>_1 |k>_2`` (edge j -> k) sits at flat index ``j * n + k``; the first
tensor factor is the source, the second the target.

Construction:

* ``psi_j = |j>_1 (x) sum_k sqrt(G[k, j]) |k>_2`` - the unit-norm
  superposition of edges leaving j, weighted by the walk probabilities.
  The psi_j are orthonormal (disjoint first-factor support).
* ``U = S (2 Pi - 1)`` with Pi the projector onto span{psi_j} and S the
  swap of the two factors. U is unitary; a naive one-factor quantization
  is not (see :func:`naive_step_is_nonunitary`).
* The symmetric matrix ``D[i, j] = sqrt(G[i, j] * G[j, i])`` generates the
  spectrum: sigma(U) = {+-1} union {exp(+-i arccos(lambda))} over the
  eigenvalues lambda of D.
* The two-step operator ``U^2 = (2 S Pi S - 1)(2 Pi - 1)`` acts as the
  identity outside the dynamical subspace H_dyn = span{psi_j, S psi_j}
  (dimension at most 2n), so time evolution only ever needs coordinates
  in H_dyn.

:func:`build_walk_spectrum` orthonormalizes H_dyn explicitly and
diagonalizes the restriction of U^2 there, which handles the degenerate
eigenvalues (lambda = +-1, rank-deficient psi sets) that break the
closed-form eigenvector ansatz. :func:`dense_walk_operator` builds U
without any of this machinery and is the brute-force oracle the spectral
path is tested against.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import check_column_stochastic
from .errors import ResourceLimitError

# EdgeState: complex amplitude vector of length n**2 over directed edges.
EdgeState = np.ndarray

DEFAULT_DENSE_CAP = 64
DENSE_CAP_ENV = "QRANK_DENSE_CAP"

# Columns of the candidate dyn-basis whose pivoted-QR diagonal falls below
# this are linearly dependent on earlier ones and get discarded.
RANK_TOL = 1e-10

_CLOSURE_TOL = 1e-10


@dataclass(frozen=True)
class WalkSpectrum:
    """Spectral decomposition of the two-step walk on its dynamical subspace.

    ``dyn_basis`` is a real orthonormal (n**2, d) basis of H_dyn with
    d <= 2n; ``u2_restricted`` is U^2 expressed in that basis;
    ``u2_eigenphases``/``u2_modes`` diagonalize it (modes are orthonormal
    in dyn coordinates, phases lie on the unit circle).
    """

    n: int
    g_matrix: np.ndarray
    d_eigenvalues: np.ndarray
    d_eigenvectors: np.ndarray
    dyn_basis: np.ndarray
    u2_restricted: np.ndarray
    u2_eigenphases: np.ndarray
    u2_modes: np.ndarray

    @property
    def dyn_dimension(self) -> int:
        return self.dyn_basis.shape[1]


def edge_index(j: int, k: int, n: int) -> int:
    """Flat index of the directed edge j -> k."""
    return j * n + k


def swap_permutation(n: int) -> np.ndarray:
    """Index permutation realizing the factor swap S on flat edge vectors."""
    j, k = np.divmod(np.arange(n * n), n)
    return k * n + j


def psi_matrix(g_matrix: np.ndarray) -> np.ndarray:
    """The isometry A = sum_j |psi_j><j| as a dense (n**2, n) array.

    Column j is psi_j. Satisfies A^T A = 1, A A^T = Pi and A^T S A = D.
    """
    g = check_column_stochastic(g_matrix)
    n = g.shape[0]
    a = np.zeros((n * n, n))
    root = np.sqrt(g)
    for j in range(n):
        a[j * n : (j + 1) * n, j] = root[:, j]
    return a


def psi_vectors(g_matrix: np.ndarray) -> list[EdgeState]:
    """The n orthonormal edge states psi_j, as complex vectors."""
    a = psi_matrix(g_matrix)
    return [a[:, j].astype(complex) for j in range(a.shape[1])]


def build_d_matrix(g_matrix: np.ndarray) -> np.ndarray:
    """Entrywise D[i, j] = sqrt(G[i, j] * G[j, i]); symmetric by construction."""
    g = check_column_stochastic(g_matrix)
    return np.sqrt(g * g.T)


def _apply_u2(root_t: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Apply U^2 = (2 S Pi S - 1)(2 Pi - 1) to stacked flat states.

    ``root_t`` is sqrt(G).T, so row j holds the amplitudes of psi_j over
    the second factor. Works columnwise on an (n**2, k) block in O(n**2 k)
    without ever forming a dense operator.
    """
    n = root_t.shape[0]
    v = states.reshape(n, n, -1)

    def reflect(block):
        # 2 Pi - 1 with Pi = A A^T: coefficients c_j = <psi_j| block>.
        coeff = np.einsum("jk,jkl->jl", root_t, block)
        return 2.0 * np.einsum("jk,jl->jkl", root_t, coeff) - block

    v = reflect(v)
    v = reflect(v.transpose(1, 0, 2))  # S . reflect . S
    return v.transpose(1, 0, 2).reshape(states.shape)


def build_walk_spectrum(g_matrix: np.ndarray) -> WalkSpectrum:
    """Quantize G and diagonalize the two-step walk on H_dyn.

    The dynamical basis comes from a column-pivoted QR of the 2n
    candidate vectors {psi_j} union {S psi_j} (rank threshold
    :data:`RANK_TOL`); U^2 is then applied columnwise and re-expressed in
    the basis. H_dyn is exactly invariant, so a closure residual above
    tolerance means the input was not stochastic and is reported as an
    internal-consistency failure.
    """
    g = check_column_stochastic(g_matrix)
    n = g.shape[0]

    d_matrix = build_d_matrix(g)
    lam, d_vecs = np.linalg.eigh(d_matrix)
    # |lambda| <= 1 holds exactly in exact arithmetic; clamp the
    # floating-point excursions so arccos stays defined.
    lam = np.clip(lam, -1.0, 1.0)

    a = psi_matrix(g)
    perm = swap_permutation(n)
    candidates = np.hstack([a, a[perm, :]])
    q, r, _ = scipy.linalg.qr(candidates, mode="economic", pivoting=True)
    rank = int(np.sum(np.abs(np.diag(r)) > RANK_TOL))
    basis = np.ascontiguousarray(q[:, :rank])

    root_t = np.sqrt(g).T
    image = _apply_u2(root_t, basis)
    u2_restricted = basis.T @ image
    closure = np.linalg.norm(image - basis @ u2_restricted, axis=0).max()
    if closure > _CLOSURE_TOL:
        raise RuntimeError(
            f"dynamical subspace is not closed under U^2 (residual "
            f"{closure:.3e}); the input matrix is not column-stochastic"
        )
    unitarity = np.abs(u2_restricted @ u2_restricted.T - np.eye(rank)).max()
    if unitarity > _CLOSURE_TOL:
        raise RuntimeError(
            f"restricted two-step operator is not unitary (defect "
            f"{unitarity:.3e})"
        )

    # U^2 restricted is orthogonal, hence normal: its complex Schur form
    # is diagonal up to roundoff, giving orthonormal eigenvectors even at
    # degenerate eigenphases (plain eig does not).
    t, modes = scipy.linalg.schur(u2_restricted.astype(complex), output="complex")
    phases = np.diag(t).copy()
    off = np.abs(t - np.diag(phases)).max() if rank else 0.0
    if off > _CLOSURE_TOL:
        raise RuntimeError(
            f"Schur form of the restricted walk is not diagonal "
            f"(off-diagonal {off:.3e})"
        )
    phases /= np.abs(phases)

    return WalkSpectrum(
        n=n,
        g_matrix=g,
        d_eigenvalues=lam,
        d_eigenvectors=d_vecs,
        dyn_basis=basis,
        u2_restricted=u2_restricted,
        u2_eigenphases=phases,
        u2_modes=modes,
    )


def expected_u2_phases(d_eigenvalues: np.ndarray) -> np.ndarray:
    """The admissible two-step eigenphases exp(+-2i arccos(lambda))."""
    theta = np.arccos(np.clip(d_eigenvalues, -1.0, 1.0))
    return np.concatenate([np.exp(2j * theta), np.exp(-2j * theta)])


def to_dyn_coords(spectrum: WalkSpectrum, state: EdgeState, tol: float = 1e-8):
    """Coordinates of an edge state in the dynamical basis.

    Rejects states with a projection residual above ``tol``: evolution is
    only defined inside H_dyn (outside it the two-step walk is trivial).
    """
    state = np.asarray(state, dtype=complex).ravel()
    if state.shape[0] != spectrum.n ** 2:
        raise ValueError(
            f"edge state has length {state.shape[0]}, expected {spectrum.n ** 2}"
        )
    coords = spectrum.dyn_basis.T @ state
    residual = np.linalg.norm(state - spectrum.dyn_basis @ coords)
    if residual > tol:
        raise ValueError(
            f"state lies outside the dynamical subspace (projection "
            f"residual {residual:.3e} > {tol})"
        )
    return coords


def from_dyn_coords(spectrum: WalkSpectrum, coords: np.ndarray) -> EdgeState:
    return spectrum.dyn_basis @ np.asarray(coords, dtype=complex)


def evolve_coords(spectrum: WalkSpectrum, coords: np.ndarray, steps) -> np.ndarray:
    """Apply (U^2)^m in dyn coordinates via eigenphase powers.

    ``steps`` may be a scalar or an array of step counts; the result has
    one row of coordinates per requested m. O(d**2) per evaluation.
    """
    steps = np.atleast_1d(np.asarray(steps))
    if steps.ndim != 1 or not np.issubdtype(steps.dtype, np.integer):
        raise ValueError("step counts must be integers")
    if np.any(steps < 0):
        raise ValueError("step counts must be >= 0")
    modal = spectrum.u2_modes.conj().T @ coords
    powered = spectrum.u2_eigenphases[None, :] ** steps[:, None]
    return (spectrum.u2_modes @ (powered * modal[None, :]).T).T


def evolve(spectrum: WalkSpectrum, state0: EdgeState, steps: int) -> EdgeState:
    """(U^2)^steps applied to a unit-norm state in the dynamical subspace."""
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise ValueError(f"step count must be a nonnegative integer, got {steps}")
    coords = to_dyn_coords(spectrum, state0)
    out = evolve_coords(spectrum, coords, np.array([steps]))[0]
    return from_dyn_coords(spectrum, out)


def _dense_cap(cap: int | None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(DENSE_CAP_ENV)
    return int(env) if env else DEFAULT_DENSE_CAP


def dense_swap(n: int) -> np.ndarray:
    s = np.zeros((n * n, n * n))
    s[np.arange(n * n), swap_permutation(n)] = 1.0
    return s


def dense_projector(g_matrix: np.ndarray) -> np.ndarray:
    """Pi = sum_j |psi_j><psi_j| as a dense edge-space matrix."""
    a = psi_matrix(g_matrix)
    return a @ a.T

def dense_walk_operator(g_matrix: np.ndarray, cap: int | None = None) -> np.ndarray:
    """Explicit dense U = S (2 Pi - 1): the brute-force oracle.

    Costs n**4 entries, so it refuses graphs above the cap (default
    :data:`DEFAULT_DENSE_CAP`, overridable via the QRANK_DENSE_CAP
    environment variable or the ``cap`` argument).
    """
    g = check_column_stochastic(g_matrix)
    n = g.shape[0]
    limit = _dense_cap(cap)
    if n > limit:
        raise ResourceLimitError(
            f"dense walk operator needs {n}**4 entries; n={n} exceeds the "
            f"cap of {limit} ({DENSE_CAP_ENV} to override)"
        )
    reflection = 2.0 * dense_projector(g) - np.eye(n * n)
    return (reflection[swap_permutation(n), :]).astype(complex)


def naive_line_step(p: float, sites: int = 5) -> np.ndarray:
    """Single-factor quantization of the biased hop on a line segment:
    sqrt(p) |i+1><i| + sqrt(1-p) |i-1><i|, boundary terms dropped."""
    u = np.zeros((sites, sites))
    for i in range(sites):
        if i + 1 < sites:
            u[i + 1, i] = np.sqrt(p)
        if i - 1 >= 0:
            u[i - 1, i] = np.sqrt(1.0 - p)
    return u


def naive_step_is_nonunitary(p: float) -> bool:
    """Check the negative result that motivates the edge-space lift.

    Quantizing the hop amplitudes directly on the vertex space gives
    <0| U^+ U |2> = sqrt(p (1-p)) != 0, so the step cannot be unitary for
    any genuine 0 < p < 1 (the p = 1 deterministic shift on a ring is a
    permutation and is unitary, which is why p is restricted to the open
    interval here).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"hop probability must be in (0, 1), got {p}")
    u = naive_line_step(p)
    defect = np.abs(u.T @ u - np.eye(u.shape[0])).max()
    return bool(defect > 1e-6)


def spectrum_to_dict(spectrum: WalkSpectrum) -> dict:
    """JSON-ready dump: D eigenvalues, two-step eigenphases, dyn dimension."""
    return {
        "lambda": spectrum.d_eigenvalues.tolist(),
        "eigenphases": [
            {"re": float(z.real), "im": float(z.imag)}
            for z in spectrum.u2_eigenphases
        ],
        "dyn_dimension": spectrum.dyn_dimension,
    }
