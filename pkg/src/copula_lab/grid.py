"""Uniform-grid discretization and the fold-product algebra.

A copula measure restricted to the n x n uniform grid is an n x n
matrix of cell masses with uniform marginals (every row and column sums
to 1/n). Scaling by n gives a doubly stochastic matrix D, and the fold
product of two grids is exactly n * (D1 @ D2) / n at the mass level,
so the Markov-operator semantics of the chain reduce to matrix algebra.

Discretization uses CDF inclusion-exclusion, which is exact for every
family including purely singular ones. Frechet members and mixtures are
expanded linearly instead (same values mathematically, and it keeps
cell masses float-exact where the components have closed-form grids).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .families import (
    CopulaSpec,
    Frechet,
    GridSpec,
    HoeffdingLower,
    HoeffdingUpper,
    Independence,
    Mardia,
    Mixture,
    eval_cdf,
    read_mass_csv,
    validate_cell_masses,
)

__all__ = [
    "GridCopula",
    "discretize",
    "fold_product",
    "fold_power",
    "mix_grids",
    "coarsen",
    "write_grid_csv",
    "read_grid_csv",
]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GridCopula:
    """Cell masses of a copula on the uniform n x n grid.

    ``masses[i][j]`` is the measure of (i/n, (i+1)/n] x (j/n, (j+1)/n]
    (zero-based cells). Immutable; the mass array is read-only.
    """

    resolution: int
    masses: np.ndarray

    def __post_init__(self) -> None:
        arr = validate_cell_masses(self.masses, self.resolution)
        object.__setattr__(self, "masses", arr)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridCopula)
            and self.resolution == other.resolution
            and np.array_equal(self.masses, other.masses)
        )

    def densities(self) -> np.ndarray:
        """Cell densities n^2 * masses (the discrete stand-in for c(x, y))."""
        n = self.resolution
        return (n * n) * self.masses


def _require_resolution(n) -> int:
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValidationError(f"resolution must be an integer >= 2 (got {n!r})")
    return n


def _pi_masses(n: int) -> np.ndarray:
    return np.full((n, n), 1.0 / (n * n))


def _m_masses(n: int) -> np.ndarray:
    return np.eye(n) / n


def _w_masses(n: int) -> np.ndarray:
    return np.fliplr(np.eye(n)) / n


def _cell_masses(spec: CopulaSpec, n: int) -> np.ndarray:
    if isinstance(spec, Independence):
        return _pi_masses(n)
    if isinstance(spec, HoeffdingLower):
        return _w_masses(n)
    if isinstance(spec, HoeffdingUpper):
        return _m_masses(n)
    if isinstance(spec, Mardia):
        return _cell_masses(spec.as_frechet(), n)
    if isinstance(spec, Frechet):
        a, b = spec.a, spec.b
        out = np.zeros((n, n))
        for w, part in ((a, _w_masses), (b, _m_masses), (1.0 - a - b, _pi_masses)):
            if w != 0.0:
                out += w * part(n)
        return out
    if isinstance(spec, Mixture):
        out = np.zeros((n, n))
        for w, comp in zip(spec.weights, spec.components):
            out += w * _cell_masses(comp, n)
        return out
    if isinstance(spec, GridSpec) and spec.resolution == n:
        return spec.masses.copy()
    edges = np.arange(n + 1) / n
    cdf = eval_cdf(spec, edges[:, None], edges[None, :])
    return cdf[1:, 1:] - cdf[:-1, 1:] - cdf[1:, :-1] + cdf[:-1, :-1]


def discretize(spec: CopulaSpec, n: int) -> GridCopula:
    """Project a copula spec onto the uniform n x n grid.

    Cell masses come from CDF inclusion-exclusion, so singular parts are
    captured exactly; Frechet members and mixtures expand linearly over
    their components.
    """
    n = _require_resolution(n)
    return GridCopula(resolution=n, masses=_cell_masses(spec, n))


def fold_product(g1: GridCopula, g2: GridCopula) -> GridCopula:
    """Fold product of two grids: masses = n * (M1 @ M2).

    This is the grid transcription of C1*C2(x, y) = integral of
    d/dt C1(x, t) * d/dt C2(t, y) dt, and the transition rule for
    composing lag-1 transition matrices.
    """
    if g1.resolution != g2.resolution:
        raise ValidationError(
            f"resolution mismatch: {g1.resolution} vs {g2.resolution}"
        )
    n = g1.resolution
    return GridCopula(resolution=n, masses=n * (g1.masses @ g2.masses))


def fold_power(g: GridCopula, m: int) -> GridCopula:
    """m-fold product of g with itself (exponentiation by squaring)."""
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValidationError(f"fold power must be a positive integer (got {m!r})")
    result: GridCopula | None = None
    base = g
    while m:
        if m & 1:
            result = base if result is None else fold_product(result, base)
        m >>= 1
        if m:
            base = fold_product(base, base)
    assert result is not None
    return result


def mix_grids(weights, grids) -> GridCopula:
    """Cellwise convex combination of equally sized grids."""
    weights = [float(w) for w in weights]
    grids = list(grids)
    if len(grids) == 0:
        raise ValidationError("mix_grids needs at least one grid")
    if len(weights) != len(grids):
        raise ValidationError(
            f"weights and grids length mismatch ({len(weights)} vs {len(grids)})"
        )
    for w in weights:
        if w <= 0.0:
            raise ValidationError(f"weights strictly positive violated (got {w})")
    total = sum(weights)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise ValidationError(f"weights sum to 1 violated (got {total!r})")
    n = grids[0].resolution
    for g in grids[1:]:
        if g.resolution != n:
            raise ValidationError(
                f"resolution mismatch: {n} vs {g.resolution}"
            )
    out = np.zeros((n, n))
    for w, g in zip(weights, grids):
        out += w * g.masses
    return GridCopula(resolution=n, masses=out)


def coarsen(g: GridCopula, factor: int) -> GridCopula:
    """Merge factor x factor blocks of cells; resolution must divide evenly."""
    if not isinstance(factor, int) or isinstance(factor, bool) or factor < 1:
        raise ValidationError(f"coarsen factor must be a positive integer (got {factor!r})")
    n = g.resolution
    if n % factor != 0:
        raise ValidationError(f"coarsen factor {factor} does not divide resolution {n}")
    m = n // factor
    if m < 2:
        raise ValidationError(f"coarsened resolution {m} would fall below 2")
    blocks = g.masses.reshape(m, factor, m, factor).sum(axis=(1, 3))
    return GridCopula(resolution=m, masses=blocks)


def write_grid_csv(g: GridCopula, path: str) -> None:
    """Write the CSV grid format: first line n, then n rows of n masses.

    Masses are printed with 17 significant digits, enough for a bit-exact
    float64 round trip.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{g.resolution}\n")
        for row in g.masses:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")


def read_grid_csv(path: str) -> GridCopula:
    """Load a grid written by :func:`write_grid_csv` (revalidates invariants)."""
    n, masses = read_mass_csv(path)
    return GridCopula(resolution=n, masses=masses)
