"""Picard iteration on ``S = T^p`` with geometric error bounds.

With ``alpha`` the cross-condition constant of ``S``, successive
displacements ``delta_n = d(x_{n+1}, x_n)`` shrink at least by the factor
``r = alpha / (1 - alpha)``:

    delta_n <= r**n * delta_0            (a priori)
    d(x_n, x*) <= delta_0 * r**n / (1 - r)  (tail of the geometric series)
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .contraction import TAU_DEN
from .errors import InvalidParameterError, MissingParameterError
from .maps import SelfMap, iterate
from .space import Point

TAU_FP = 1e-9

DISPLACEMENT = "displacement"
BOUND = "bound"
CAP_ONLY = "cap"
MODES = (DISPLACEMENT, BOUND, CAP_ONLY)

CONVERGED = "CONVERGED"
CAP_REACHED = "CAP_REACHED"


def rate_from_alpha(alpha: float) -> float:
    if not (0.0 <= alpha < 0.5):
        raise InvalidParameterError(f"alpha: must lie in [0, 1/2), got {alpha}")
    return alpha / (1.0 - alpha)


def tail_bound(delta0: float, r: float, n: int) -> float:
    """``delta0 * r**n / (1 - r)``, an upper bound on ``d(x_n, x*)``."""
    return delta0 * r**n / (1.0 - r)


def iterations_needed(delta0: float, r: float, eps: float) -> int:
    """Smallest ``n >= 0`` with ``tail_bound(delta0, r, n) <= eps``."""
    if not (0.0 <= r < 1.0):
        raise InvalidParameterError(f"r: must lie in [0, 1), got {r}")
    if not eps > 0.0:
        raise InvalidParameterError(f"eps: must be positive, got {eps}")
    if delta0 < 0.0:
        raise InvalidParameterError(f"delta0: must be nonnegative, got {delta0}")
    if tail_bound(delta0, r, 0) <= eps:
        return 0
    if r == 0.0:
        return 1
    n = max(1, math.ceil(math.log(eps * (1.0 - r) / delta0) / math.log(r)))
    # The logarithm only seeds n; the bound as evaluated in floats decides.
    while tail_bound(delta0, r, n) > eps:
        n += 1
    while n > 1 and tail_bound(delta0, r, n - 1) <= eps:
        n -= 1
    return n


@dataclass(frozen=True)
class StopRule:
    eps: float = 1e-10
    max_iters: int = 10_000
    mode: str = DISPLACEMENT

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode: expected one of {MODES}, got {self.mode!r}")
        if not self.eps > 0.0:
            raise InvalidParameterError(f"eps: must be positive, got {self.eps}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidParameterError(f"max_iters: must be a positive integer, got {self.max_iters}")


@dataclass(frozen=True)
class TraceRow:
    n: int
    x: Point
    delta: float
    ratio: float | None = None
    bound: float | None = None
    bound_ok: bool | None = None


@dataclass(frozen=True)
class IterationTrace:
    rows: tuple
    status: str
    final: Point
    iterations: int
    p: int
    alpha: float | None = None
    eps: float = 0.0
    map_name: str = ""
    start: Point | None = field(default=None)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def deltas(self) -> list:
        return [row.delta for row in self.rows]

    @property
    def points(self) -> list:
        return [row.x for row in self.rows]

    @property
    def empirical_rate(self) -> float | None:
        """Median of the defined successive-displacement ratios."""
        ratios = [row.ratio for row in self.rows if row.ratio is not None]
        return statistics.median(ratios) if ratios else None

    @property
    def bounds_hold(self) -> bool | None:
        if self.alpha is None:
            return None
        return all(row.bound_ok for row in self.rows)

    def summary(self) -> dict:
        return {
            "map": self.map_name,
            "p": self.p,
            "start": _json_point(self.start),
            "status": self.status,
            "final": _json_point(self.final),
            "iterations": self.iterations,
            "final_delta": self.rows[-1].delta,
            "empirical_rate": self.empirical_rate,
            "alpha": self.alpha,
            "rate": None if self.alpha is None else rate_from_alpha(self.alpha),
            "bounds_hold": self.bounds_hold,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "x", "delta", "ratio", "bound"])
        for row in self.rows:
            w.writerow([row.n, format_point(row.x), fmt(row.delta), fmt(row.ratio), fmt(row.bound)])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())


def fmt(v: float | None) -> str:
    return "" if v is None else format(v, ".17g")


def format_point(x: Point) -> str:
    if isinstance(x, tuple):
        return ";".join(format(v, ".17g") for v in x)
    if isinstance(x, int):
        return str(x)
    return format(x, ".17g")


def _json_point(x):
    return list(x) if isinstance(x, tuple) else x


def picard(T: SelfMap, p: int, x0: Point, stop: StopRule | None = None,
           alpha: float | None = None) -> IterationTrace:
    """Iterate ``S = T^p`` from ``x0``.

    Row ``n`` holds ``x_n`` and ``delta_n = d(S x_n, x_n)``, so the final point
    always has a recorded residual. DISPLACEMENT stops at the first
    ``delta_n <= eps``; BOUND stops once the tail bound is ``<= eps``;
    CAP_ONLY runs exactly ``max_iters`` steps. A zero displacement stops
    every mode. Hitting the cap is a status, not an error.
    """
    stop = StopRule() if stop is None else stop
    space = T.space
    if not space.contains(x0):
        raise InvalidParameterError(f"x0: {x0!r} is not a point of the space")
    if stop.mode == BOUND and alpha is None:
        raise MissingParameterError("alpha: BOUND stopping needs a known contraction constant")
    x0 = space.to_point(x0)
    r = None if alpha is None else rate_from_alpha(alpha)

    rows = []
    x = x0
    nxt = iterate(T, x, p)
    delta0 = space.distance(nxt, x)
    prev = None
    status = CAP_REACHED
    for n in range(stop.max_iters + 1):
        delta = delta0 if n == 0 else space.distance(nxt, x)
        ratio = delta / prev if prev is not None and prev > TAU_DEN else None
        bound = bound_ok = None
        if r is not None:
            bound = r**n * delta0
            bound_ok = delta <= bound + TAU_FP
        rows.append(TraceRow(n, x, delta, ratio, bound, bound_ok))

        if delta == 0.0:
            status = CONVERGED
            break
        if stop.mode == DISPLACEMENT and delta <= stop.eps:
            status = CONVERGED
            break
        if stop.mode == BOUND and tail_bound(delta0, r, n) <= stop.eps:
            status = CONVERGED
            break
        if n == stop.max_iters:
            if stop.mode == CAP_ONLY and delta <= stop.eps:
                status = CONVERGED
            break
        prev = delta
        x = nxt
        nxt = iterate(T, x, p)

    return IterationTrace(
        rows=tuple(rows),
        status=status,
        final=rows[-1].x,
        iterations=rows[-1].n,
        p=p,
        alpha=alpha,
        eps=stop.eps,
        map_name=T.name,
        start=x0,
    )


def max_spread(T: SelfMap, points: Sequence[Point]) -> float:
    pts = list(points)
    return max((T.space.distance(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]), default=0.0)


@dataclass(frozen=True)
class ProbeResult:
    finals: tuple
    spread: float
    traces: tuple = field(repr=False)

    def summary(self) -> dict:
        return {
            "finals": [_json_point(x) for x in self.finals],
            "spread": self.spread,
            "statuses": [t.status for t in self.traces],
            "iterations": [t.iterations for t in self.traces],
        }


def uniqueness_probe(T: SelfMap, p: int, starts: Sequence[Point], stop: StopRule | None = None,
                     alpha: float | None = None) -> ProbeResult:
    """Run Picard from several starts; a unique fixed point keeps the spread small."""
    if len(starts) < 2:
        raise InvalidParameterError("starts: at least two starting points are required")
    traces = tuple(picard(T, p, x0, stop, alpha) for x0 in starts)
    finals = tuple(t.final for t in traces)
    return ProbeResult(finals, max_spread(T, finals), traces)


def full_orbit_check(T: SelfMap, p: int, x0: Point, n_steps: int) -> ProbeResult:
    """Follow the ``p`` residue subsequences ``T^{pn+k} x0 = S^n(T^k x0)``.

    Each subsequence runs for exactly ``n_steps`` applications of ``S`` (or
    until it lands on a point fixed under ``S``); ``finals[k]`` is its last
    term.
    """
    if n_steps < 1:
        raise InvalidParameterError(f"n_steps: must be >= 1, got {n_steps}")
    if not T.space.contains(x0):
        raise InvalidParameterError(f"x0: {x0!r} is not a point of the space")
    stop = StopRule(eps=TAU_FP, max_iters=n_steps, mode=CAP_ONLY)
    starts = [x0] + [iterate(T, x0, k) for k in range(1, p)]
    traces = tuple(picard(T, p, s, stop) for s in starts)
    finals = tuple(t.final for t in traces)
    return ProbeResult(finals, max_spread(T, finals), traces)


def bridge_residual(T: SelfMap, x: Point) -> float:
    """``d(T x, x)``: how far a fixed point of ``T^p`` is from being fixed by ``T``."""
    return T.space.distance(T.apply(x), x)
