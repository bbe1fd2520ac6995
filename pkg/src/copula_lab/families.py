"""Bivariate copula families on the unit square.

This module is the symbolic half of the library: immutable parameter
containers for the supported families, pointwise CDF evaluation, the
density of the absolutely continuous part, the conditional CDF that
acts as the transition kernel of the induced stationary chain, and the
closed-form lag-n parameters of the Frechet family.

Supported families
------------------
* ``Independence``            Pi(x, y) = x * y
* ``HoeffdingLower``          W(x, y) = max(x + y - 1, 0), mass on y = 1 - x
* ``HoeffdingUpper``          M(x, y) = min(x, y), mass on y = x
* ``Frechet(a, b)``           a*W + b*M + (1 - a - b)*Pi
* ``Mardia(theta)``           the Frechet member with a = theta^2*(1-theta)/2,
                              b = theta^2*(1+theta)/2
* ``MarshallOlkin(a, b)``     min(x * y^(1-a), y * x^(1-b))
* ``Mixture(weights, comps)`` convex combination of other specs
* ``GridSpec(n, masses)``     piecewise-uniform measure loaded from a CSV
                              cell-mass file (see copula_lab.grid)

Density queries that land exactly on a singular support line return the
marker ``ON_SINGULAR`` instead of a number. All measure-level work goes
through CDF inclusion-exclusion, never through pointwise densities, so
the marker never propagates into grids or reports.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "ON_SINGULAR",
    "Independence",
    "HoeffdingLower",
    "HoeffdingUpper",
    "Frechet",
    "Mardia",
    "MarshallOlkin",
    "Mixture",
    "GridSpec",
    "CopulaSpec",
    "FrechetParams",
    "eval_cdf",
    "eval_ac_density",
    "conditional_cdf",
    "frechet_fold_params",
    "parse_spec",
    "serialize_spec",
    "spec_to_json",
    "canonical_spec_json",
    "spec_digest",
]

# Marker returned by eval_ac_density on a singular support set.
ON_SINGULAR = math.inf

# Tolerance for user-entered convex weights (decimals, so exact sums
# cannot be demanded).
WEIGHT_TOL = 1e-12

# Cell masses more negative than this signal a broken (non-2-increasing)
# input; anything in (-CLAMP_TOL, 0) is rounding dust and is clamped.
CLAMP_TOL = 1e-15
MARGINAL_TOL = 1e-12


def _require_number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    v = float(value)
    if math.isnan(v) or math.isinf(v):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return v


@dataclass(frozen=True)
class Independence:
    """The independence copula Pi(x, y) = x*y."""


@dataclass(frozen=True)
class HoeffdingLower:
    """The countermonotone copula W; all mass on the line y = 1 - x."""


@dataclass(frozen=True)
class HoeffdingUpper:
    """The comonotone copula M; all mass on the diagonal y = x."""


@dataclass(frozen=True)
class Frechet:
    """Convex combination a*W + b*M + (1 - a - b)*Pi.

    Requires a >= 0, b >= 0 and a + b <= 1. The family is closed under
    fold products; see :func:`frechet_fold_params`.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        a = _require_number(self.a, "a")
        b = _require_number(self.b, "b")
        if a < 0.0:
            raise ValidationError(f"a >= 0 violated (got {a})")
        if b < 0.0:
            raise ValidationError(f"b >= 0 violated (got {b})")
        if a + b > 1.0 + WEIGHT_TOL:
            raise ValidationError(f"a + b <= 1 violated (got {a + b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Mardia:
    """One-parameter Frechet subfamily with weight sum a + b = theta^2."""

    theta: float

    def __post_init__(self) -> None:
        theta = _require_number(self.theta, "theta")
        if abs(theta) > 1.0:
            raise ValidationError(f"|theta| <= 1 violated (got {theta})")
        object.__setattr__(self, "theta", theta)

    def as_frechet(self) -> Frechet:
        t = self.theta
        return Frechet(a=t * t * (1.0 - t) / 2.0, b=t * t * (1.0 + t) / 2.0)


@dataclass(frozen=True)
class MarshallOlkin:
    """C(x, y) = min(x * y^(1-a), y * x^(1-b)) with 0 <= a, b <= 1.

    Absolutely continuous off the curve y^a = x^b, where a singular
    component lives whenever both parameters are positive. The AC
    density is (1-a)*y^(-a) where y^a > x^b and (1-b)*x^(-b) where
    y^a < x^b, hence bounded below by min(1-a, 1-b).
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        a = _require_number(self.a, "a")
        b = _require_number(self.b, "b")
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"0 <= a <= 1 violated (got {a})")
        if not 0.0 <= b <= 1.0:
            raise ValidationError(f"0 <= b <= 1 violated (got {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Mixture:
    """Convex mixture of component copulas.

    Weights must be strictly positive and sum to 1 within 1e-12;
    components may nest (finitely).
    """

    weights: tuple[float, ...]
    components: tuple["CopulaSpec", ...]

    def __post_init__(self) -> None:
        weights = tuple(_require_number(w, "weight") for w in self.weights)
        components = tuple(self.components)
        if len(components) == 0:
            raise ValidationError("mixture components must be nonempty")
        if len(weights) != len(components):
            raise ValidationError(
                f"weights and components length mismatch "
                f"({len(weights)} vs {len(components)})"
            )
        for w in weights:
            if w <= 0.0:
                raise ValidationError(f"weights strictly positive violated (got {w})")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"weights sum to 1 violated (got {total!r})")
        for c in components:
            if not isinstance(c, _SPEC_TYPES):
                raise ValidationError(f"mixture component is not a copula spec: {c!r}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", components)


def validate_cell_masses(masses, resolution: int) -> np.ndarray:
    """Validate and normalize an n x n cell-mass matrix.

    Clamps rounding dust in (-1e-15, 0) to zero, rejects anything more
    negative, and checks total mass 1 and row/column sums 1/n within
    1e-12. Returns a read-only float64 copy.
    """
    n = resolution
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValidationError(f"resolution must be an integer >= 2 (got {resolution!r})")
    arr = np.array(masses, dtype=float)
    if arr.shape != (n, n):
        raise ValidationError(f"mass matrix shape {arr.shape} does not match n={n}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("mass matrix contains non-finite entries")
    low = float(arr.min())
    if low < -CLAMP_TOL:
        raise ValidationError(
            f"cell mass below -1e-15 (got {low!r}); input is not 2-increasing"
        )
    np.maximum(arr, 0.0, out=arr)
    total = float(arr.sum())
    if abs(total - 1.0) > MARGINAL_TOL:
        raise ValidationError(f"total mass = 1 violated (got {total!r})")
    target = 1.0 / n
    row_err = float(np.abs(arr.sum(axis=1) - target).max())
    col_err = float(np.abs(arr.sum(axis=0) - target).max())
    if row_err > MARGINAL_TOL or col_err > MARGINAL_TOL:
        raise ValidationError(
            f"uniform marginals violated (row dev {row_err!r}, col dev {col_err!r})"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridSpec:
    """A copula given by cell masses on a uniform n x n grid.

    Cell (i, j), zero-indexed, covers (i/n, (i+1)/n] x (j/n, (j+1)/n].
    The measure is treated as uniform within each cell, so the CDF is
    the bilinear interpolation of the cumulative node values. ``path``
    records the CSV origin when loaded from disk (needed to serialize).
    """

    resolution: int
    masses: np.ndarray
    path: str | None = None

    def __post_init__(self) -> None:
        arr = validate_cell_masses(self.masses, self.resolution)
        object.__setattr__(self, "masses", arr)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridSpec)
            and self.resolution == other.resolution
            and np.array_equal(self.masses, other.masses)
        )


CopulaSpec = (
    Independence
    | HoeffdingLower
    | HoeffdingUpper
    | Frechet
    | Mardia
    | MarshallOlkin
    | Mixture
    | GridSpec
)

_SPEC_TYPES = (
    Independence,
    HoeffdingLower,
    HoeffdingUpper,
    Frechet,
    Mardia,
    MarshallOlkin,
    Mixture,
    GridSpec,
)


# ---------------------------------------------------------------------------
# CDF evaluation


def _check_unit_range(arr: np.ndarray, name: str) -> None:
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValidationError(f"{name} must lie in [0, 1]")


def _grid_nodes(spec: GridSpec) -> np.ndarray:
    n = spec.resolution
    nodes = np.zeros((n + 1, n + 1))
    nodes[1:, 1:] = spec.masses.cumsum(axis=0).cumsum(axis=1)
    return nodes


def _cdf(spec: CopulaSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if isinstance(spec, Independence):
        return x * y
    if isinstance(spec, HoeffdingLower):
        return np.maximum(x + y - 1.0, 0.0)
    if isinstance(spec, HoeffdingUpper):
        return np.minimum(x, y)
    if isinstance(spec, Frechet):
        a, b = spec.a, spec.b
        return (
            a * np.maximum(x + y - 1.0, 0.0)
            + b * np.minimum(x, y)
            + (1.0 - a - b) * x * y
        )
    if isinstance(spec, Mardia):
        return _cdf(spec.as_frechet(), x, y)
    if isinstance(spec, MarshallOlkin):
        return np.minimum(x * y ** (1.0 - spec.a), y * x ** (1.0 - spec.b))
    if isinstance(spec, Mixture):
        out = np.zeros(np.broadcast(x, y).shape)
        for w, comp in zip(spec.weights, spec.components):
            out = out + w * _cdf(comp, x, y)
        return out
    if isinstance(spec, GridSpec):
        n = spec.resolution
        nodes = _grid_nodes(spec)
        xb, yb = np.broadcast_arrays(x, y)
        tx = xb * n
        ty = yb * n
        i = np.clip(np.floor(tx).astype(int), 0, n - 1)
        j = np.clip(np.floor(ty).astype(int), 0, n - 1)
        u = tx - i
        v = ty - j
        return (
            nodes[i, j] * (1.0 - u) * (1.0 - v)
            + nodes[i + 1, j] * u * (1.0 - v)
            + nodes[i, j + 1] * (1.0 - u) * v
            + nodes[i + 1, j + 1] * u * v
        )
    raise ValidationError(f"not a copula spec: {spec!r}")


def eval_cdf(spec: CopulaSpec, x, y):
    """Evaluate C(x, y). Accepts scalars or broadcastable arrays in [0, 1]."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    _check_unit_range(xa, "x")
    _check_unit_range(ya, "y")
    out = np.asarray(_cdf(spec, xa, ya))
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Density of the absolutely continuous part (pointwise, scalar only)


def _ac_density(spec: CopulaSpec, x: float, y: float) -> float:
    if isinstance(spec, Independence):
        return 1.0
    if isinstance(spec, HoeffdingLower):
        return ON_SINGULAR if x + y == 1.0 else 0.0
    if isinstance(spec, HoeffdingUpper):
        return ON_SINGULAR if x == y else 0.0
    if isinstance(spec, Frechet):
        if spec.b > 0.0 and x == y:
            return ON_SINGULAR
        if spec.a > 0.0 and x + y == 1.0:
            return ON_SINGULAR
        return 1.0 - spec.a - spec.b
    if isinstance(spec, Mardia):
        return _ac_density(spec.as_frechet(), x, y)
    if isinstance(spec, MarshallOlkin):
        a, b = spec.a, spec.b
        p = x**b
        q = y**a
        if p == q:
            # On the singular curve when it carries mass; otherwise the
            # parameters degenerate to independence along this locus.
            if a > 0.0 and b > 0.0:
                return ON_SINGULAR
            return 1.0
        if q > p:
            return (1.0 - a) * y ** (-a)
        return (1.0 - b) * x ** (-b)
    if isinstance(spec, Mixture):
        total = 0.0
        for w, comp in zip(spec.weights, spec.components):
            d = _ac_density(comp, x, y)
            if d == ON_SINGULAR:
                return ON_SINGULAR
            total += w * d
        return total
    if isinstance(spec, GridSpec):
        raise ValidationError(
            "density of a grid spec is piecewise by construction; "
            "read cell masses from copula_lab.grid instead"
        )
    raise ValidationError(f"not a copula spec: {spec!r}")


def eval_ac_density(spec: CopulaSpec, x: float, y: float) -> float:
    """Density of the absolutely continuous part at an interior point.

    Returns ``ON_SINGULAR`` when (x, y) lands exactly on a singular
    support line (the diagonals for Frechet-type families, the curve
    y^a = x^b for Marshall-Olkin).
    """
    x = _require_number(x, "x")
    y = _require_number(y, "y")
    if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
        raise ValidationError("(x, y) must lie in the open unit square")
    return _ac_density(spec, x, y)


# ---------------------------------------------------------------------------
# Conditional CDF (transition kernel)


def _cond_scalar(spec: CopulaSpec, x: float, y: float) -> float:
    # Scalar fast path; semantics identical to the array branch below.
    if isinstance(spec, Independence):
        return y
    if isinstance(spec, HoeffdingLower):
        return 1.0 if y >= 1.0 - x else 0.0
    if isinstance(spec, HoeffdingUpper):
        return 1.0 if y >= x else 0.0
    if isinstance(spec, Frechet):
        # Same operation order as the array branch so both agree bitwise.
        a, b = spec.a, spec.b
        ind_w = 1.0 if y >= 1.0 - x else 0.0
        ind_m = 1.0 if y >= x else 0.0
        return a * ind_w + b * ind_m + (1.0 - a - b) * y
    if isinstance(spec, Mardia):
        return _cond_scalar(spec.as_frechet(), x, y)
    if isinstance(spec, MarshallOlkin):
        # numpy's pow kernel can differ from libm pow by an ulp, so run
        # scalars through the array branch to keep both calls bitwise equal.
        return float(_cond_array(spec, np.asarray(x, float), np.asarray(y, float)))
    if isinstance(spec, Mixture):
        out = 0.0
        for w, comp in zip(spec.weights, spec.components):
            out = out + w * _cond_scalar(comp, x, y)
        return out
    if isinstance(spec, GridSpec):
        n = spec.resolution
        i = min(max(math.ceil(x * n) - 1, 0), n - 1)
        j = min(int(y * n), n - 1)
        row = spec.masses[i]
        base = float(row[:j + 1].cumsum()[j - 1]) if j else 0.0
        v = y * n - j
        return min(n * (base + v * float(row[j])), 1.0)
    raise ValidationError(f"not a copula spec: {spec!r}")


def _cond_array(spec: CopulaSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if isinstance(spec, Independence):
        return np.broadcast_arrays(x, y)[1].astype(float) + 0.0 * x
    if isinstance(spec, HoeffdingLower):
        return (y >= 1.0 - x).astype(float)
    if isinstance(spec, HoeffdingUpper):
        return (y >= x).astype(float)
    if isinstance(spec, Frechet):
        a, b = spec.a, spec.b
        return (
            a * (y >= 1.0 - x)
            + b * (y >= x)
            + (1.0 - a - b) * (y + 0.0 * x)
        )
    if isinstance(spec, Mardia):
        return _cond_array(spec.as_frechet(), x, y)
    if isinstance(spec, MarshallOlkin):
        a, b = spec.a, spec.b
        # On the curve y^a == x^b this takes the right limit: the single
        # atom of the conditional law at y* = x^(b/a) is included (cadlag).
        upper = y ** (1.0 - a) + 0.0 * x
        lower = (1.0 - b) * x ** (-b) * y
        return np.where(y**a >= x**b, upper, lower)
    if isinstance(spec, Mixture):
        out = np.zeros(np.broadcast(x, y).shape)
        for w, comp in zip(spec.weights, spec.components):
            out = out + w * _cond_array(comp, x, y)
        return out
    if isinstance(spec, GridSpec):
        n = spec.resolution
        xb, yb = np.broadcast_arrays(x, y)
        i = np.clip(np.ceil(xb * n).astype(int) - 1, 0, n - 1)
        j = np.clip((yb * n).astype(int), 0, n - 1)
        rowcum = np.zeros((n, n + 1))
        rowcum[:, 1:] = spec.masses.cumsum(axis=1)
        v = yb * n - j
        out = n * (rowcum[i, j] + v * spec.masses[i, j])
        return np.minimum(out, 1.0)
    raise ValidationError(f"not a copula spec: {spec!r}")


def conditional_cdf(spec: CopulaSpec, x, y):
    """P(X1 <= y | X0 = x), nondecreasing and right-continuous in y.

    ``x`` must lie in the open interval (0, 1); ``y`` in [0, 1]. Scalar
    inputs get a pure-scalar evaluation (the chain sampler bisects this
    in a tight loop); array inputs broadcast.
    """
    if isinstance(x, float) and isinstance(y, float):
        if not 0.0 < x < 1.0:
            raise ValidationError("x must lie in (0, 1)")
        if not 0.0 <= y <= 1.0:
            raise ValidationError("y must lie in [0, 1]")
        return _cond_scalar(spec, x, y)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if not np.all((xa > 0.0) & (xa < 1.0)):
        raise ValidationError("x must lie in (0, 1)")
    _check_unit_range(ya, "y")
    out = np.asarray(_cond_array(spec, xa, ya))
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Frechet fold-power parameters


@dataclass(frozen=True)
class FrechetParams:
    """Lag-n parameters (a_n, b_n) of a Frechet family member."""

    a_n: float
    b_n: float
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ValidationError(f"lag n must be a positive integer (got {self.n!r})")
        if self.a_n < 0.0 or self.b_n < 0.0:
            raise ValidationError(
                f"a_n, b_n >= 0 violated (got {self.a_n!r}, {self.b_n!r})"
            )
        if self.a_n + self.b_n > 1.0 + WEIGHT_TOL:
            raise ValidationError(
                f"a_n + b_n <= 1 violated (got {self.a_n + self.b_n!r})"
            )


def frechet_fold_params(a: float, b: float, n: int) -> FrechetParams:
    """Parameters of the n-step fold power of Frechet(a, b).

    a_n = ((a+b)^n - (b-a)^n) / 2 and b_n = ((a+b)^n + (b-a)^n) / 2,
    the closed form of the recursion a_{k+1} = a*b_k + b*a_k,
    b_{k+1} = a*a_k + b*b_k; in particular a_n + b_n = (a+b)^n.
    """
    Frechet(a, b)  # parameter validation
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValidationError(f"lag n must be a positive integer (got {n!r})")
    s = (a + b) ** n
    d = (b - a) ** n
    a_n = max(0.0, (s - d) / 2.0)
    b_n = (s + d) / 2.0
    return FrechetParams(a_n=a_n, b_n=b_n, n=n)


# ---------------------------------------------------------------------------
# JSON serialization
#
# Schema: {"type": "independence"|"w"|"m"|"frechet"|"mardia"|
#          "marshall-olkin"|"mixture"|"grid"} with parameters as sibling
# fields ("a"/"b", "theta", "weights"+"components", "path"). Unknown
# fields are rejected.

_TYPE_FIELDS = {
    "independence": frozenset(),
    "w": frozenset(),
    "m": frozenset(),
    "frechet": frozenset({"a", "b"}),
    "mardia": frozenset({"theta"}),
    "marshall-olkin": frozenset({"a", "b"}),
    "mixture": frozenset({"weights", "components"}),
    "grid": frozenset({"path"}),
}


def serialize_spec(spec: CopulaSpec) -> dict:
    """Spec as a plain JSON-ready dict (inverse of :func:`parse_spec`)."""
    if isinstance(spec, Independence):
        return {"type": "independence"}
    if isinstance(spec, HoeffdingLower):
        return {"type": "w"}
    if isinstance(spec, HoeffdingUpper):
        return {"type": "m"}
    if isinstance(spec, Frechet):
        return {"type": "frechet", "a": spec.a, "b": spec.b}
    if isinstance(spec, Mardia):
        return {"type": "mardia", "theta": spec.theta}
    if isinstance(spec, MarshallOlkin):
        return {"type": "marshall-olkin", "a": spec.a, "b": spec.b}
    if isinstance(spec, Mixture):
        return {
            "type": "mixture",
            "weights": list(spec.weights),
            "components": [serialize_spec(c) for c in spec.components],
        }
    if isinstance(spec, GridSpec):
        if spec.path is None:
            raise ValidationError("in-memory grid spec has no file path to serialize")
        return {"type": "grid", "path": spec.path}
    raise ValidationError(f"not a copula spec: {spec!r}")


def read_mass_csv(path: str) -> tuple[int, np.ndarray]:
    """Read the grid CSV format: first line n, then n rows of n masses."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [line.strip() for line in fh if line.strip() != ""]
    except OSError as exc:
        raise ValidationError(f"cannot read grid file {path!r}: {exc}") from exc
    if not lines:
        raise ValidationError(f"grid file {path!r} is empty")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValidationError(
            f"grid file {path!r}: first line must be the resolution"
        ) from exc
    if len(lines) != n + 1:
        raise ValidationError(
            f"grid file {path!r}: expected {n} mass rows, found {len(lines) - 1}"
        )
    rows = []
    for k, line in enumerate(lines[1:], start=1):
        parts = line.split(",")
        if len(parts) != n:
            raise ValidationError(
                f"grid file {path!r}: row {k} has {len(parts)} entries, expected {n}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ValidationError(
                f"grid file {path!r}: row {k} has a non-numeric entry"
            ) from exc
    return n, np.array(rows)


def _spec_from_obj(obj) -> CopulaSpec:
    if not isinstance(obj, dict):
        raise ValidationError(f"spec must be a JSON object, got {type(obj).__name__}")
    kind = obj.get("type")
    if kind is None:
        raise ValidationError("spec is missing the 'type' field")
    if kind not in _TYPE_FIELDS:
        raise ValidationError(
            f"unknown spec type {kind!r}; expected one of {sorted(_TYPE_FIELDS)}"
        )
    extra = set(obj) - {"type"} - _TYPE_FIELDS[kind]
    if extra:
        raise ValidationError(f"unknown field(s) for type {kind!r}: {sorted(extra)}")
    missing = _TYPE_FIELDS[kind] - set(obj)
    if missing:
        raise ValidationError(f"missing field(s) for type {kind!r}: {sorted(missing)}")
    if kind == "independence":
        return Independence()
    if kind == "w":
        return HoeffdingLower()
    if kind == "m":
        return HoeffdingUpper()
    if kind == "frechet":
        return Frechet(a=_require_number(obj["a"], "a"), b=_require_number(obj["b"], "b"))
    if kind == "mardia":
        return Mardia(theta=_require_number(obj["theta"], "theta"))
    if kind == "marshall-olkin":
        return MarshallOlkin(
            a=_require_number(obj["a"], "a"), b=_require_number(obj["b"], "b")
        )
    if kind == "mixture":
        weights = obj["weights"]
        components = obj["components"]
        if not isinstance(weights, list) or not isinstance(components, list):
            raise ValidationError("mixture 'weights' and 'components' must be lists")
        return Mixture(
            weights=tuple(_require_number(w, "weight") for w in weights),
            components=tuple(_spec_from_obj(c) for c in components),
        )
    path = obj["path"]
    if not isinstance(path, str):
        raise ValidationError("grid 'path' must be a string")
    n, masses = read_mass_csv(path)
    return GridSpec(resolution=n, masses=masses, path=path)


def parse_spec(text: str) -> CopulaSpec:
    """Parse and validate a JSON copula spec document."""
    obj = json.loads(text)
    return _spec_from_obj(obj)


def spec_to_json(spec: CopulaSpec) -> str:
    return json.dumps(serialize_spec(spec), indent=2) + "\n"


def canonical_spec_json(spec: CopulaSpec) -> str:
    """Canonical form: sorted keys, no insignificant whitespace."""
    return json.dumps(serialize_spec(spec), sort_keys=True, separators=(",", ":"))


def spec_digest(spec: CopulaSpec) -> str:
    """SHA-256 of the canonical JSON; stable across re-serialization."""
    return hashlib.sha256(canonical_spec_json(spec).encode("ascii")).hexdigest()
