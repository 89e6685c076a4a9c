"""Metric spaces, points and deterministic sampling.

Three carrier kinds are supported:

* ``interval`` -- a closed real interval ``[a, b]`` with ``d(x, y) = |x - y|``;
  points are Python floats.
* ``box`` -- an axis-aligned box in R^n with the Euclidean metric; points are
  tuples of floats.
* ``finite`` -- ``{0, ..., m-1}`` with an explicit ``m x m`` distance matrix;
  points are integer indices.

The built-in kinds are complete. A user-supplied matrix always describes a
complete space (finite), but nothing checks that it is a metric until
:func:`verify_metric_axioms` is run on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InvalidParameterError, InvalidPlanError, MapFormatError

Point = Union[float, tuple, int]

METRIC_TOL = 1e-12
TRIPLE_BUDGET = 10**6

KINDS = ("interval", "box", "finite")


@dataclass(frozen=True, eq=False)
class MetricSpace:
    kind: str
    lower: tuple = ()
    upper: tuple = ()
    matrix: np.ndarray | None = field(default=None, repr=False)
    # Optional replacement distance; used for user metrics at library level.
    metric: Callable[[Point, Point], float] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"kind: unknown space kind {self.kind!r}")
        if self.kind == "finite":
            m = np.array(self.matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
                raise InvalidParameterError("matrix: must be a non-empty square matrix")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        else:
            if len(self.lower) != len(self.upper) or not self.lower:
                raise InvalidParameterError("bounds: lower and upper must have equal, nonzero length")
            for lo, hi in zip(self.lower, self.upper):
                if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                    raise InvalidParameterError(f"bounds: invalid axis [{lo}, {hi}]")
            if self.kind == "interval" and len(self.lower) != 1:
                raise InvalidParameterError("bounds: an interval has exactly one axis")

    @property
    def dim(self) -> int:
        return len(self.lower) if self.kind != "finite" else 1

    @property
    def size(self) -> int | None:
        """Carrier size for finite spaces, ``None`` otherwise."""
        return self.matrix.shape[0] if self.kind == "finite" else None

    def contains(self, x: Point) -> bool:
        if self.kind == "finite":
            return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and 0 <= x < self.size
        if self.kind == "interval":
            try:
                v = float(x)
            except (TypeError, ValueError):
                return False
            return self.lower[0] <= v <= self.upper[0]
        try:
            vals = tuple(float(v) for v in x)
        except (TypeError, ValueError):
            return False
        if len(vals) != self.dim:
            return False
        return all(lo <= v <= hi for v, lo, hi in zip(vals, self.lower, self.upper))

    def distance(self, x: Point, y: Point) -> float:
        if self.metric is not None:
            return float(self.metric(x, y))
        if self.kind == "interval":
            return abs(float(x) - float(y))
        if self.kind == "finite":
            return float(self.matrix[x, y])
        # Routed through the vectorised path so scalar and batch results agree bitwise.
        return float(self.pair_distances(self.as_array([x]), self.as_array([y]))[0])

    def as_array(self, points: Sequence[Point]) -> np.ndarray:
        if self.kind == "finite":
            return np.asarray(points, dtype=np.int64).reshape(-1)
        if self.kind == "interval":
            return np.asarray(points, dtype=float).reshape(-1)
        return np.asarray(points, dtype=float).reshape(-1, self.dim)

    def to_point(self, value) -> Point:
        if self.kind == "finite":
            return int(value)
        if self.kind == "interval":
            return float(value)
        return tuple(float(v) for v in value)

    def to_points(self, arr: np.ndarray) -> list:
        return [self.to_point(v) for v in arr]

    def pair_distances(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Elementwise distances ``d(P[k], Q[k])`` for two equal-length point arrays."""
        if self.metric is not None:
            return np.array(
                [self.metric(self.to_point(p), self.to_point(q)) for p, q in zip(P, Q)],
                dtype=float,
            )
        if self.kind == "interval":
            return np.abs(P - Q)
        if self.kind == "finite":
            return self.matrix[P, Q]
        diff = P - Q
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def same(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Elementwise point equality mask."""
        if self.kind == "box":
            return np.all(P == Q, axis=1)
        return P == Q


def interval(a: float = 0.0, b: float = 1.0) -> MetricSpace:
    return MetricSpace("interval", (float(a),), (float(b),))


def box(bounds: Sequence[tuple[float, float]]) -> MetricSpace:
    bounds = list(bounds)
    return MetricSpace("box", tuple(float(lo) for lo, _ in bounds), tuple(float(hi) for _, hi in bounds))


def finite(matrix) -> MetricSpace:
    return MetricSpace("finite", matrix=np.asarray(matrix, dtype=float))


def load_distance_matrix(path: str | Path) -> np.ndarray:
    """Read ``m`` followed by ``m`` rows of ``m`` whitespace-separated reals."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MapFormatError(f"{path}: empty distance-matrix file")
    try:
        m = int(lines[0].strip())
    except ValueError:
        raise MapFormatError(f"{path}: first line must be the integer size m") from None
    if m < 1 or len(lines) != m + 1:
        raise MapFormatError(f"{path}: expected {m} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        try:
            row = [float(v) for v in ln.split()]
        except ValueError:
            raise MapFormatError(f"{path}: line {k}: non-numeric entry") from None
        if len(row) != m:
            raise MapFormatError(f"{path}: line {k}: expected {m} entries, found {len(row)}")
        rows.append(row)
    return np.array(rows, dtype=float)


def write_distance_matrix(path: str | Path, matrix) -> None:
    m = np.asarray(matrix, dtype=float)
    lines = [str(m.shape[0])]
    lines += [" ".join(format(v, ".17g") for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def load_finite_space(path: str | Path) -> MetricSpace:
    return finite(load_distance_matrix(path))


@dataclass(frozen=True)
class SamplePlan:
    mode: str = "grid"
    count: int = 101
    seed: int = 42

    def __post_init__(self):
        if self.mode not in ("grid", "random"):
            raise InvalidPlanError(f"mode: expected 'grid' or 'random', got {self.mode!r}")
        if int(self.count) != self.count or self.count < 1:
            raise InvalidPlanError(f"count: must be a positive integer, got {self.count!r}")
        if not (0 <= self.seed < 2**64):
            raise InvalidPlanError(f"seed: must be a 64-bit unsigned integer, got {self.seed!r}")


def sample_array(space: MetricSpace, plan: SamplePlan) -> np.ndarray:
    """Like :func:`sample_points` but returns the raw array form."""
    n = plan.count
    if plan.mode == "grid":
        if space.kind == "interval":
            return np.linspace(space.lower[0], space.upper[0], n)
        if space.kind == "finite":
            if n > space.size:
                raise InvalidPlanError(
                    f"count: grid of {n} points exceeds finite carrier size {space.size}"
                )
            return np.rint(np.linspace(0, space.size - 1, n)).astype(np.int64)
        k = 1
        while k**space.dim < n:
            k += 1
        axes = [np.linspace(lo, hi, k) for lo, hi in zip(space.lower, space.upper)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, space.dim)
        pick = np.rint(np.linspace(0, mesh.shape[0] - 1, n)).astype(np.int64)
        return mesh[pick]

    rng = np.random.default_rng(plan.seed)
    if space.kind == "finite":
        return rng.integers(0, space.size, n)
    lo = np.array(space.lower)
    hi = np.array(space.upper)
    vals = rng.uniform(lo, hi, (n, space.dim))
    return vals[:, 0] if space.kind == "interval" else vals


def sample_points(space: MetricSpace, plan: SamplePlan) -> list:
    """Deterministic list of ``plan.count`` points of ``space``.

    Grid mode spaces points evenly and includes both endpoints of an
    interval; on a box it thins a tensor grid evenly, and on a finite
    carrier it spreads indices over ``0..m-1`` (full enumeration when
    ``count == m``). Random mode draws uniformly from a generator seeded
    with ``plan.seed``.
    """
    return space.to_points(sample_array(space, plan))


@dataclass(frozen=True)
class AxiomResult:
    name: str
    passed: bool
    max_violation: float
    witness: tuple | None
    checked: int

    def to_dict(self) -> dict:
        return {
            "axiom": self.name,
            "passed": self.passed,
            "max_violation": self.max_violation,
            "witness": None if self.witness is None else [_jsonable(p) for p in self.witness],
            "checked": self.checked,
        }


@dataclass(frozen=True)
class AxiomReport:
    results: tuple
    points: int
    triples_subsampled: bool

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "points": self.points,
            "triples_subsampled": self.triples_subsampled,
            "axioms": [r.to_dict() for r in self.results],
        }


def _jsonable(p):
    if isinstance(p, tuple):
        return [float(v) for v in p]
    return p


def distance_matrix(space: MetricSpace, arr: np.ndarray) -> np.ndarray:
    """Full (not symmetrised) matrix ``D[i, j] = d(arr[i], arr[j])``."""
    n = len(arr)
    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return space.pair_distances(arr[I.ravel()], arr[J.ravel()]).reshape(n, n)


def _worst(values: np.ndarray, index_rows: np.ndarray, pts: list, tol: float, name: str) -> AxiomResult:
    if values.size == 0:
        return AxiomResult(name, True, 0.0, None, 0)
    k = int(np.argmax(values))
    worst = float(values[k])
    witness = tuple(pts[int(i)] for i in index_rows[k])
    if worst <= 0.0:
        witness = None
    return AxiomResult(name, worst <= tol, max(worst, 0.0), witness, int(values.size))


def verify_metric_axioms(
    space: MetricSpace,
    plan: SamplePlan,
    tol: float = METRIC_TOL,
    triple_budget: int = TRIPLE_BUDGET,
) -> AxiomReport:
    """Check identity, symmetry, positivity and the triangle inequality on samples.

    Violation magnitudes: ``|d(x,x)|``; ``|d(x,y) - d(y,x)|``; for distinct
    ``x, y`` the shortfall ``max(0, tol - d(x,y))`` (so positivity passes
    only when distinct points sit at least ``tol`` apart); and the excess
    ``d(x,z) - d(x,y) - d(y,z)``, counted only when it exceeds the rounding
    error of evaluating it. Witnesses are sample points; ties go to the
    lexicographically smallest sample indices.
    """
    arr = sample_array(space, plan)
    n = len(arr)
    need = 3 if space.kind != "finite" else min(3, space.size)
    if n < need:
        raise InvalidPlanError(f"count: axiom checks need at least {need} sample points")
    pts = space.to_points(arr)
    D = distance_matrix(space, arr)

    diag = np.arange(n)
    identity = _worst(np.abs(D[diag, diag]), np.stack([diag], axis=1), pts, tol, "identity")

    iu, ju = np.triu_indices(n, k=1)
    sym_vals = np.abs(D[iu, ju] - D[ju, iu])
    symmetry = _worst(sym_vals, np.stack([iu, ju], axis=1), pts, tol, "symmetry")

    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    I, J = I.ravel(), J.ravel()
    distinct = ~space.same(arr[I], arr[J])
    I, J = I[distinct], J[distinct]
    short = np.maximum(0.0, tol - D[I, J])
    pos = _worst(short, np.stack([I, J], axis=1), pts, 0.0, "positivity")

    subsampled = n**3 > triple_budget
    if subsampled:
        rng = np.random.default_rng(plan.seed)
        rows = rng.integers(0, n, (triple_budget, 3))
    else:
        rows = np.stack(np.unravel_index(np.arange(n**3), (n, n, n)), axis=1)
    d_xz = D[rows[:, 0], rows[:, 2]]
    d_xy = D[rows[:, 0], rows[:, 1]]
    d_yz = D[rows[:, 1], rows[:, 2]]
    tri_vals = d_xz - d_xy - d_yz
    # Excess within the rounding error of computing three distances and two
    # sums is indistinguishable from equality and is not a violation.
    slack = (space.dim + 3) * np.finfo(float).eps * (d_xz + d_xy + d_yz)
    tri_vals = np.where(tri_vals > slack, tri_vals, 0.0)
    triangle = _worst(tri_vals, rows, pts, tol, "triangle")

    return AxiomReport((identity, symmetry, pos, triangle), n, subsampled)
