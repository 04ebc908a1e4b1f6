"""Time-dependent quantum page importances and their temporal statistics.

The protocol: build the Google matrix of the digraph, quantize it
(:mod:`qpagerank.szegedy`), start from the uniform superposition of the
psi_j states, and evolve with the two-step walk operator. After m double
steps the instantaneous importance of page i is the probability weight on
second-factor node i; it oscillates coherently, so fixed rankings come
from temporal means, standard deviations, and coarse-grained segment
means over an M-step window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import google_matrix, power_method, stationary_solve
from .graphs import Digraph
from .szegedy import (
    EdgeState,
    WalkSpectrum,
    build_walk_spectrum,
    evolve_coords,
    psi_matrix,
    to_dyn_coords,
)

DEFAULT_STEPS = 2048
DEFAULT_SEGMENTS = 64

# Temporal means are only quotable once they have stabilized: the
# first-half mean must agree with the full mean to this tolerance per
# node, else the series carries a warning.
STABILITY_TOL = 1e-3

# Values closer than this are treated as tied when ranking (symmetric
# nodes agree only to solver precision, not bitwise).
TIE_TOL = 1e-9

_CHUNK_STEPS = 512


@dataclass(frozen=True)
class RankSeries:
    """Instantaneous importances over time plus summary statistics.

    ``values[m, i]`` is the importance of node i after m double steps
    (every row sums to 1); ``classical`` is the classical PageRank of the
    same Google matrix, kept as the reference for hierarchy analysis.
    ``coarse`` holds segment means when coarse graining was requested.
    """

    n: int
    m_steps: int
    alpha: float
    values: np.ndarray
    classical: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    coarse: np.ndarray | None
    warnings: tuple[str, ...]

    @property
    def stable(self) -> bool:
        return not self.warnings


@dataclass(frozen=True)
class HierarchyReport:
    """How the quantum ranking relates to the classical one.

    Orders are permutations of the node ids, most important first, ties
    broken by ascending id. ``outperform_instants[i]`` lists the steps at
    which node i's instantaneous importance exceeded its classical value;
    ``crossings`` counts adjacent steps whose instantaneous orders differ.
    """

    classical_order: tuple[int, ...]
    quantum_order: tuple[int, ...]
    weak_preserving: bool
    strong_preserving: bool
    outperform_instants: tuple[tuple[int, ...], ...]
    average_outperforming: tuple[bool, ...]
    crossings: int


def initial_state(spectrum: WalkSpectrum) -> EdgeState:
    """Equal superposition of the psi_j; unit norm, inside H_dyn."""
    a = psi_matrix(spectrum.g_matrix)
    return (a @ np.full(spectrum.n, 1.0 / np.sqrt(spectrum.n))).astype(complex)


def _second_factor_weights(states: np.ndarray, n: int) -> np.ndarray:
    """Squared norms of the second-factor projections.

    ``states`` is an (n**2, k) block of flat edge states; returns (k, n)
    with row m holding the importance of each target node.
    """
    v = states.reshape(n, n, -1)
    return np.sum(np.abs(v) ** 2, axis=0).T


def instantaneous_rank(
    spectrum: WalkSpectrum, state0: EdgeState, m: int
) -> np.ndarray:
    """Importance vector after m double steps; sums to 1 for every m."""
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ValueError(f"step count must be a nonnegative integer, got {m}")
    coords = to_dyn_coords(spectrum, state0)
    evolved = evolve_coords(spectrum, coords, np.array([m]))
    states = spectrum.dyn_basis @ evolved.T
    return _second_factor_weights(states, spectrum.n)[0]


def _rank_values(spectrum: WalkSpectrum, coords0: np.ndarray, m_steps: int):
    """Importance rows for m = 0 .. m_steps-1, evaluated in chunks."""
    rows = np.empty((m_steps, spectrum.n))
    for start in range(0, m_steps, _CHUNK_STEPS):
        steps = np.arange(start, min(start + _CHUNK_STEPS, m_steps))
        evolved = evolve_coords(spectrum, coords0, steps)
        states = spectrum.dyn_basis @ evolved.T
        rows[steps] = _second_factor_weights(states, spectrum.n)
    return rows


def run_protocol(
    g: Digraph,
    alpha: float = 0.85,
    m_steps: int = DEFAULT_STEPS,
    segments: int | None = None,
) -> RankSeries:
    """Execute the full quantum ranking protocol on a digraph.

    Google matrix -> D-matrix eigensystem -> two-step eigendecomposition
    on the dynamical subspace -> importance time series for
    m = 0 .. m_steps-1 with per-node mean, standard deviation and,
    if ``segments`` is given, coarse-grained segment means. The classical
    PageRank of the same matrix is computed alongside.
    """
    if m_steps < 1:
        raise ValueError(f"m_steps must be >= 1, got {m_steps}")
    google = google_matrix(g, alpha)
    spectrum = build_walk_spectrum(google)
    coords0 = to_dyn_coords(spectrum, initial_state(spectrum))
    values = _rank_values(spectrum, coords0, m_steps)

    mean = values.mean(axis=0)
    std = np.sqrt(np.clip((values ** 2).mean(axis=0) - mean ** 2, 0.0, None))

    report = power_method(google)
    warnings = []
    if report.converged:
        classical = report.vector
    else:
        classical = stationary_solve(google)
        warnings.append(
            "classical power iteration did not converge; stationary solve "
            "used as the reference"
        )

    if m_steps >= 2:
        drift = np.abs(values[: m_steps // 2].mean(axis=0) - mean).max()
        if drift > STABILITY_TOL:
            warnings.append(
                f"temporal means not stabilized: half-window drift "
                f"{drift:.3e} exceeds {STABILITY_TOL}; consider more steps"
            )

    series = RankSeries(
        n=g.n,
        m_steps=m_steps,
        alpha=alpha,
        values=values,
        classical=classical,
        mean=mean,
        std=std,
        coarse=None,
        warnings=tuple(warnings),
    )
    if segments is not None:
        series = RankSeries(
            **{**series.__dict__, "coarse": coarse_grain(series, segments)}
        )
    return series


def coarse_grain(series: RankSeries, segments: int) -> np.ndarray:
    """Segment means: split the M steps into ``segments`` equal blocks and
    average inside each, integrating out the coherent oscillations."""
    if segments < 1:
        raise ValueError(f"segment count must be >= 1, got {segments}")
    if series.m_steps % segments != 0:
        raise ValueError(
            f"segment count {segments} does not divide m_steps {series.m_steps}"
        )
    block = series.m_steps // segments
    return series.values.reshape(segments, block, series.n).mean(axis=1)


def ranking_order(values, tie_tol: float = TIE_TOL) -> tuple[int, ...]:
    """Node ids sorted by descending value, ties (within ``tie_tol``,
    chained) broken by ascending id."""
    values = np.asarray(values, dtype=float)
    order = sorted(range(values.size), key=lambda i: (-values[i], i))
    result: list[int] = []
    group = [order[0]]
    for prev, cur in zip(order, order[1:]):
        if values[prev] - values[cur] <= tie_tol:
            group.append(cur)
        else:
            result.extend(sorted(group))
            group = [cur]
    result.extend(sorted(group))
    return tuple(result)


def analyze_hierarchy(series: RankSeries) -> HierarchyReport:
    """Compare the quantum ranking against the classical reference.

    Strong preservation means the full average order matches the
    classical order; weak preservation only requires the top node to
    survive. Outperformance is per page: instants (and averages) where
    the quantum importance strictly exceeds that page's classical value.
    """
    classical_order = ranking_order(series.classical)
    quantum_order = ranking_order(series.mean)
    exceed = series.values > series.classical[None, :]
    instants = tuple(
        tuple(int(m) for m in np.flatnonzero(exceed[:, i]))
        for i in range(series.n)
    )
    orders = [ranking_order(row) for row in series.values]
    crossings = sum(a != b for a, b in zip(orders, orders[1:]))
    return HierarchyReport(
        classical_order=classical_order,
        quantum_order=quantum_order,
        weak_preserving=quantum_order[0] == classical_order[0],
        strong_preserving=quantum_order == classical_order,
        outperform_instants=instants,
        average_outperforming=tuple(
            bool(series.mean[i] > series.classical[i]) for i in range(series.n)
        ),
        crossings=crossings,
    )


def series_to_csv(series: RankSeries) -> str:
    """Per-step CSV: header ``step,node_1,...,node_N``, 17 significant digits."""
    header = "step," + ",".join(f"node_{i + 1}" for i in range(series.n))
    lines = [header]
    for m, row in enumerate(series.values):
        lines.append(f"{m}," + ",".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def coarse_to_csv(series: RankSeries) -> str:
    """Segment-mean CSV, same layout with a ``segment`` index column."""
    if series.coarse is None:
        raise ValueError("series has no coarse-grained data")
    header = "segment," + ",".join(f"node_{i + 1}" for i in range(series.n))
    lines = [header]
    for s, row in enumerate(series.coarse):
        lines.append(f"{s}," + ",".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def summary_dict(series: RankSeries, report: HierarchyReport) -> dict:
    """JSON-ready summary mirroring the series and hierarchy report."""
    return {
        "schema": "qpagerank-summary/1",
        "n": series.n,
        "alpha": series.alpha,
        "steps": series.m_steps,
        "classical": series.classical.tolist(),
        "mean": series.mean.tolist(),
        "std": series.std.tolist(),
        "coarse": None if series.coarse is None else series.coarse.tolist(),
        "orders": {
            "classical": [i + 1 for i in report.classical_order],
            "quantum": [i + 1 for i in report.quantum_order],
        },
        "flags": {
            "weak_preserving": report.weak_preserving,
            "strong_preserving": report.strong_preserving,
            "stable_mean": series.stable,
        },
        "outperform_counts": [len(s) for s in report.outperform_instants],
        "average_outperforming": list(report.average_outperforming),
        "crossings": report.crossings,
        "warnings": list(series.warnings),
    }
