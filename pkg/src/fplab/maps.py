"""Self-maps on metric spaces and the gallery of reference maps.

``SelfMap.apply`` must be a pure function of its argument. Nothing enforces
this, but every estimator and solver in the package assumes it.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameterError, MapFormatError
from .space import MetricSpace, Point, interval


@dataclass(frozen=True)
class SelfMap:
    space: MetricSpace
    apply: Callable[[Point], Point] = field(repr=False)
    name: str = "map"
    fixed_point: Point | None = None
    banach_constant: float | None = None
    notes: str = ""

    def __call__(self, x: Point) -> Point:
        return self.apply(x)

    def power(self, p: int) -> "SelfMap":
        """The map ``x -> T^p x`` as a SelfMap of its own."""
        if p < 1:
            raise InvalidParameterError(f"p: must be >= 1, got {p}")
        lam = None if self.banach_constant is None else self.banach_constant**p
        return SelfMap(self.space, lambda x: iterate(self, x, p), f"{self.name}^{p}",
                       self.fixed_point, lam)


def iterate(T: SelfMap, x: Point, p: int) -> Point:
    """Apply ``T`` to ``x`` exactly ``p`` times."""
    if p < 1:
        raise InvalidParameterError(f"p: must be >= 1, got {p}")
    for _ in range(p):
        x = T.apply(x)
    return x


def closure_violations(T: SelfMap, points: Sequence[Point]) -> list:
    """Sample points whose image leaves the space."""
    return [x for x in points if not T.space.contains(T.apply(x))]


def _paper_piecewise(x):
    return 1.0 - x if x <= 0.5 else 0.5


def gallery_paper_piecewise() -> SelfMap:
    """``T(x) = 1 - x`` on ``[0, 1/2]`` and ``1/2`` on ``(1/2, 1]``.

    Lipschitz constant 1 (the first branch is an isometry), yet ``T o T`` is
    identically ``1/2``.
    """
    return SelfMap(
        interval(0.0, 1.0),
        _paper_piecewise,
        name="paper-piecewise",
        fixed_point=0.5,
        notes="Singh-Chatterjea for p = 2, not Banach",
    )


def gallery_linear_scale(lam: float, a: float = -1.0, b: float = 1.0) -> SelfMap:
    if not (0.0 <= lam < 1.0):
        raise InvalidParameterError(f"lambda: must lie in [0, 1), got {lam}")
    if not (a <= 0.0 <= b):
        raise InvalidParameterError(f"bounds: [{a}, {b}] must contain 0 to be invariant under scaling")
    lam = float(lam)
    return SelfMap(
        interval(a, b),
        lambda x: lam * x,
        name=f"linear-scale({lam!r})",
        fixed_point=0.0,
        banach_constant=lam,
        notes=f"Banach with constant {lam!r}",
    )


def gallery_constant(c: Point, space: MetricSpace | None = None) -> SelfMap:
    space = interval(0.0, 1.0) if space is None else space
    if not space.contains(c):
        raise InvalidParameterError(f"c: {c!r} is not a point of the space")
    c = space.to_point(c)
    return SelfMap(space, lambda x: c, name=f"constant({c!r})", fixed_point=c,
                   banach_constant=0.0, notes="constant map")


GALLERY = ("paper-piecewise", "linear-scale", "constant")


def table_map(space: MetricSpace, table: Sequence[int], name: str = "table") -> SelfMap:
    """Self-map of a finite space given by its image table ``i -> table[i]``."""
    if space.kind != "finite":
        raise InvalidParameterError("table: a map table needs a finite space")
    table = tuple(int(t) for t in table)
    if len(table) != space.size:
        raise InvalidParameterError(f"table: expected {space.size} entries, got {len(table)}")
    bad = [t for t in table if not 0 <= t < space.size]
    if bad:
        raise InvalidParameterError(f"table: image index {bad[0]} outside 0..{space.size - 1}")
    return SelfMap(space, lambda i: table[i], name=name)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Callable ``x -> slope_k * x + intercept_k`` on piece ``k``.

    Pieces are half-open ``[lo, hi)`` except the last, which is closed.
    """

    a: float
    b: float
    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise MapFormatError("pieces: at least one piece is required")
        if not self.a < self.b:
            raise MapFormatError(f"interval: need a < b, got [{self.a}, {self.b}]")
        if self.pieces[0][0] != self.a:
            raise MapFormatError(f"pieces: first piece starts at {self.pieces[0][0]}, not {self.a}")
        if self.pieces[-1][1] != self.b:
            raise MapFormatError(f"pieces: last piece ends at {self.pieces[-1][1]}, not {self.b}")
        for k, (lo, hi, slope, icpt) in enumerate(self.pieces):
            if not lo < hi:
                raise MapFormatError(f"pieces: piece {k} has empty range [{lo}, {hi})")
            if not all(math.isfinite(v) for v in (slope, icpt)):
                raise MapFormatError(f"pieces: piece {k} has a non-finite coefficient")
            if k and self.pieces[k - 1][1] != lo:
                raise MapFormatError(f"pieces: gap or overlap between pieces {k - 1} and {k}")
        object.__setattr__(self, "_starts", [p[0] for p in self.pieces])

    def piece_index(self, x: float) -> int:
        k = bisect.bisect_right(self._starts, x) - 1
        return min(max(k, 0), len(self.pieces) - 1)

    def __call__(self, x):
        _, _, slope, icpt = self.pieces[self.piece_index(x)]
        return slope * x + icpt

    def breakpoints(self) -> list:
        return [p[0] for p in self.pieces] + [self.b]


def piecewise_map(pw: PiecewiseLinear, name: str = "piecewise", check_closure: bool = True) -> SelfMap:
    T = SelfMap(interval(pw.a, pw.b), pw, name=name)
    if check_closure:
        # Each piece is affine, so its range is spanned by the endpoint values.
        for k, (lo, hi, slope, icpt) in enumerate(pw.pieces):
            for x in (lo, hi):
                y = slope * x + icpt
                if not pw.a <= y <= pw.b:
                    raise MapFormatError(f"pieces: piece {k} maps {x!r} to {y!r}, outside [{pw.a}, {pw.b}]")
    return T


def parse_piecewise(text: str, source: str = "<string>") -> PiecewiseLinear:
    """Parse ``interval a b`` followed by ``x_lo x_hi slope intercept`` lines."""
    lines = [(k, ln.split("#", 1)[0].strip()) for k, ln in enumerate(text.splitlines(), start=1)]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise MapFormatError(f"{source}: empty map file")
    k, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[0] != "interval":
        raise MapFormatError(f"{source}: line {k}: expected 'interval a b'")
    try:
        a, b = float(parts[1]), float(parts[2])
    except ValueError:
        raise MapFormatError(f"{source}: line {k}: interval bounds must be numbers") from None
    pieces = []
    for k, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise MapFormatError(f"{source}: line {k}: expected 'x_lo x_hi slope intercept'")
        try:
            pieces.append(tuple(float(v) for v in parts))
        except ValueError:
            raise MapFormatError(f"{source}: line {k}: non-numeric field") from None
    try:
        return PiecewiseLinear(a, b, tuple(pieces))
    except MapFormatError as exc:
        raise MapFormatError(f"{source}: {exc}") from None


def format_piecewise(pw: PiecewiseLinear) -> str:
    g = lambda v: format(v, ".17g")
    lines = [f"interval {g(pw.a)} {g(pw.b)}"]
    lines += [" ".join(g(v) for v in piece) for piece in pw.pieces]
    return "\n".join(lines) + "\n"


def load_piecewise_map(path: str | Path) -> SelfMap:
    path = Path(path)
    pw = parse_piecewise(path.read_text(), source=str(path))
    return piecewise_map(pw, name=path.stem)


def random_piecewise(seed: int, n_pieces: int = 4, a: float = 0.0, b: float = 1.0) -> PiecewiseLinear:
    """Random, possibly discontinuous, piecewise-linear self-map of ``[a, b]``.

    Each piece interpolates two independent uniform values in ``[a, b]``
    between its endpoints, so the map is closed by construction.
    """
    rng = np.random.default_rng(seed)
    # Images stay this far inside [a, b] so rounding in slope*x + icpt cannot escape.
    margin = 1e-9 * (b - a)
    inner = np.sort(rng.uniform(a, b, n_pieces - 1))
    knots = [a, *[float(v) for v in inner], b]
    pieces = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        if not lo < hi:
            continue
        y0, y1 = (float(v) for v in rng.uniform(a + margin, b - margin, 2))
        slope = (y1 - y0) / (hi - lo)
        icpt = y0 - slope * lo
        pieces.append((lo, hi, slope, icpt))
    return PiecewiseLinear(a, b, tuple(pieces))
