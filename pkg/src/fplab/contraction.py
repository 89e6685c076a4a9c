"""Empirical contraction constants over sampled pairs.

Every condition has the shape ``numerator <= alpha * denominator`` with the
numerator ``d(T^p x, T^p y)``. The tightest alpha on a sample is the largest
quotient over the evaluated pairs:

=================  =================================
condition          denominator
=================  =================================
Banach             ``d(x, y)``
Kannan / Singh     ``d(x, T^p x) + d(y, T^p y)``
Chatterjea / SC    ``d(x, T^p y) + d(y, T^p x)``
=================  =================================

Kannan and Chatterjea are the ``p = 1`` cases of Singh and Singh-Chatterjea.
All quotients are symmetric in ``(x, y)``, so only index pairs ``i <= j`` are
evaluated; the diagonal is kept because a single non-fixed point is a valid
(if trivial) witness for the displacement conditions.

Estimates are sound only on the sample: a failing pair is a genuine
counterexample, a passing estimate is evidence rather than proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientSamplesError, InvalidParameterError
from .maps import SelfMap, iterate
from .space import SamplePlan, sample_points

TAU_DEN = 1e-12
TAU_NUM = 1e-12
TAU_MARGIN = 1e-9
PAIR_BUDGET = 5 * 10**6
DEFAULT_P_MAX = 16

KINDS = ("banach", "kannan", "chatterjea", "singh", "singh_chatterjea")
_LABELS = {
    "banach": "Banach",
    "kannan": "Kannan",
    "chatterjea": "Chatterjea",
    "singh": "Singh",
    "singh_chatterjea": "Singh-Chatterjea",
}


@dataclass(frozen=True)
class Condition:
    kind: str
    p: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError(f"class: unknown condition {self.kind!r}")
        if self.p < 1 or (self.kind in ("banach", "kannan", "chatterjea") and self.p != 1):
            raise InvalidParameterError(f"p: invalid iterate {self.p} for {self.kind}")

    @property
    def threshold(self) -> float:
        """Upper end of the admissible constant range (exclusive)."""
        return 1.0 if self.kind == "banach" else 0.5

    @property
    def label(self) -> str:
        if self.kind in ("singh", "singh_chatterjea"):
            return f"{_LABELS[self.kind]}(p={self.p})"
        return _LABELS[self.kind]


@dataclass(frozen=True)
class AlphaEstimate:
    condition: Condition
    value: float  # math.inf when infeasible
    feasible: bool
    witness: tuple | None
    pairs_evaluated: int
    pairs_skipped_vacuous: int
    subsampled: bool = False

    @property
    def holds(self) -> bool:
        return self.feasible and self.value < self.condition.threshold - TAU_MARGIN

    @property
    def verdict(self) -> str:
        return self.condition.label if self.holds else f"not {self.condition.label}"

    def to_dict(self) -> dict:
        return {
            "class": self.condition.kind,
            "p": self.condition.p,
            "alpha": self.value if self.feasible else None,
            "feasible": self.feasible,
            "holds": self.holds,
            "verdict": self.verdict,
            "witness": None if self.witness is None else [_jsonable(x) for x in self.witness],
            "pairs": self.pairs_evaluated,
            "vacuous": self.pairs_skipped_vacuous,
            "subsampled": self.subsampled,
        }


def _jsonable(x):
    return [float(v) for v in x] if isinstance(x, tuple) else x


def _pairs(n: int, seed: int, budget: int = PAIR_BUDGET):
    """Index pairs ``i <= j`` in lexicographic order, subsampled past the budget."""
    if n * (n + 1) // 2 <= budget:
        I, J = np.triu_indices(n)
        return I, J, False
    rng = np.random.default_rng(seed)
    A = rng.integers(0, n, budget)
    B = rng.integers(0, n, budget)
    I, J = np.minimum(A, B), np.maximum(A, B)
    order = np.lexsort((J, I))
    return I[order], J[order], True


def _estimate(cond, num, den, I, J, points, subsampled) -> AlphaEstimate:
    small = den <= TAU_DEN
    vacuous = small & (num <= TAU_NUM)
    infeasible = small & (num > TAU_NUM)
    n_vac = int(vacuous.sum())
    n_eval = int(num.size) - n_vac
    if infeasible.any():
        k = int(np.argmax(infeasible))
        return AlphaEstimate(cond, math.inf, False, (points[I[k]], points[J[k]]), n_eval, n_vac, subsampled)
    if n_eval == 0:
        return AlphaEstimate(cond, 0.0, True, None, 0, n_vac, subsampled)
    live = ~vacuous
    ratio = np.full(num.shape, -np.inf)
    np.divide(num, den, out=ratio, where=live)
    # argmax returns the first maximiser, i.e. the lexicographically smallest pair.
    k = int(np.argmax(ratio))
    return AlphaEstimate(cond, float(ratio[k]), True, (points[I[k]], points[J[k]]),
                         n_eval, n_vac, subsampled)


class _PairData:
    """Sample array, pair indices and cached distances shared by estimators."""

    def __init__(self, T: SelfMap, samples: Sequence, seed: int):
        if len(samples) == 0:
            raise InsufficientSamplesError("samples: at least one sample point is required")
        self.T = T
        self.space = T.space
        self.points = list(samples)
        self.X = self.space.as_array(self.points)
        self.I, self.J, self.subsampled = _pairs(len(self.points), seed)
        self.Xi, self.Xj = self.X[self.I], self.X[self.J]

    def images(self, pts):
        return self.space.as_array([self.T.apply(x) for x in pts])

    def d(self, P, Q):
        return self.space.pair_distances(P, Q)

    def banach(self, Y, cond):
        num = self.d(Y[self.I], Y[self.J])
        den = self.d(self.Xi, self.Xj)
        return _estimate(cond, num, den, self.I, self.J, self.points, self.subsampled)

    def displacement(self, Y, cond):
        num = self.d(Y[self.I], Y[self.J])
        disp = self.d(self.X, Y)
        den = disp[self.I] + disp[self.J]
        return _estimate(cond, num, den, self.I, self.J, self.points, self.subsampled)

    def cross(self, Y, cond):
        num = self.d(Y[self.I], Y[self.J])
        den = self.d(self.Xi, Y[self.J]) + self.d(self.Xj, Y[self.I])
        return _estimate(cond, num, den, self.I, self.J, self.points, self.subsampled)


def _iterated_images(data: _PairData, p: int) -> np.ndarray:
    return data.space.as_array([iterate(data.T, x, p) for x in data.points])


def _distinct_count(data: _PairData) -> int:
    return len(np.unique(data.X, axis=0))


def alpha_banach(T: SelfMap, samples: Sequence, seed: int = 42) -> AlphaEstimate:
    """Tightest ``alpha`` with ``d(Tx, Ty) <= alpha d(x, y)`` on the sample."""
    data = _PairData(T, samples, seed)
    if _distinct_count(data) < 2:
        raise InsufficientSamplesError("samples: need at least 2 distinct points for a Banach estimate")
    return data.banach(data.images(data.points), Condition("banach"))


def alpha_kannan(T: SelfMap, samples: Sequence, seed: int = 42) -> AlphaEstimate:
    data = _PairData(T, samples, seed)
    return data.displacement(data.images(data.points), Condition("kannan"))


def alpha_chatterjea(T: SelfMap, samples: Sequence, seed: int = 42) -> AlphaEstimate:
    data = _PairData(T, samples, seed)
    return data.cross(data.images(data.points), Condition("chatterjea"))


def alpha_singh(T: SelfMap, p: int, samples: Sequence, seed: int = 42) -> AlphaEstimate:
    """Tightest ``alpha`` with ``d(T^p x, T^p y) <= alpha (d(x, T^p x) + d(y, T^p y))``."""
    cond = Condition("singh", p)
    data = _PairData(T, samples, seed)
    return data.displacement(_iterated_images(data, p), cond)


def alpha_singh_chatterjea(T: SelfMap, p: int, samples: Sequence, seed: int = 42) -> AlphaEstimate:
    """Tightest ``alpha`` with ``d(T^p x, T^p y) <= alpha (d(x, T^p y) + d(y, T^p x))``.

    A pair whose denominator vanishes is skipped when its numerator vanishes
    too, and makes the estimate infeasible otherwise.
    """
    cond = Condition("singh_chatterjea", p)
    data = _PairData(T, samples, seed)
    return data.cross(_iterated_images(data, p), cond)


def minimal_p_singh_chatterjea(T: SelfMap, samples: Sequence, p_max: int = DEFAULT_P_MAX,
                               seed: int = 42) -> tuple[int | None, list]:
    """Smallest ``p <= p_max`` whose SC estimate is admissible, plus the estimates tried."""
    if p_max < 1:
        raise InvalidParameterError(f"p_max: must be >= 1, got {p_max}")
    data = _PairData(T, samples, seed)
    Y = data.X
    tried = []
    for p in range(1, p_max + 1):
        Y = data.images(data.space.to_points(Y))
        est = data.cross(Y, Condition("singh_chatterjea", p))
        tried.append(est)
        if est.holds:
            return p, tried
    return None, tried


@dataclass(frozen=True)
class ContractionReport:
    map_name: str
    plan: SamplePlan
    sample_count: int
    banach: AlphaEstimate
    kannan: AlphaEstimate
    chatterjea: AlphaEstimate
    singh: tuple
    singh_chatterjea: tuple
    minimal_p: int | None
    p_max: int
    banach_constant: float | None = None
    banach_constant_source: str | None = None
    p_min_formula: int | None = None
    subsampled: bool = False

    def verdicts(self) -> dict:
        out = {e.condition.label: e.verdict for e in (self.banach, self.kannan, self.chatterjea)}
        for e in self.singh + self.singh_chatterjea:
            out[e.condition.label] = e.verdict
        return out

    def estimates(self) -> list[AlphaEstimate]:
        return [self.banach, self.kannan, self.chatterjea, *self.singh, *self.singh_chatterjea]

    def to_dict(self) -> dict:
        entries = self.estimates()
        return {
            "map": self.map_name,
            "sample": {"mode": self.plan.mode, "count": self.plan.count, "seed": self.plan.seed,
                       "points": self.sample_count, "subsampled": self.subsampled},
            "p_max": self.p_max,
            "classes": [e.to_dict() for e in entries],
            "minimal_p_singh_chatterjea": self.minimal_p,
            "banach_constant": self.banach_constant,
            "banach_constant_source": self.banach_constant_source,
            "p_min_formula": self.p_min_formula,
        }


def classify(T: SelfMap, plan: SamplePlan, p_max: int = DEFAULT_P_MAX) -> ContractionReport:
    """Run every estimator on one shared sample.

    Alongside the empirically certified minimal ``p`` the report carries the
    worst-case closed-form ``p`` implied by the Banach constant (from the
    map's metadata if known, otherwise the sampled estimate when it is < 1).
    The sampled value can be smaller since the closed form is only sufficient.
    """
    from .analysis import minimal_p_for_banach

    if p_max < 1:
        raise InvalidParameterError(f"p_max: must be >= 1, got {p_max}")
    samples = sample_points(T.space, plan)
    data = _PairData(T, samples, plan.seed)
    if _distinct_count(data) < 2:
        raise InsufficientSamplesError("samples: need at least 2 distinct points to classify")

    Y = data.images(data.points)
    banach = data.banach(Y, Condition("banach"))
    kannan = data.displacement(Y, Condition("kannan"))
    chatterjea = data.cross(Y, Condition("chatterjea"))
    singh, sc = [], []
    Yp = Y
    for p in range(1, p_max + 1):
        if p > 1:
            Yp = data.images(data.space.to_points(Yp))
        singh.append(data.displacement(Yp, Condition("singh", p)))
        sc.append(data.cross(Yp, Condition("singh_chatterjea", p)))
    minimal_p = next((e.condition.p for e in sc if e.holds), None)

    if T.banach_constant is not None:
        lam, source = T.banach_constant, "metadata"
    elif banach.holds:
        lam, source = banach.value, "estimate"
    else:
        lam, source = None, None
    p_formula = None
    if lam is not None:
        p_formula = 1 if lam == 0.0 else minimal_p_for_banach(lam)

    return ContractionReport(
        map_name=T.name,
        plan=plan,
        sample_count=len(samples),
        banach=banach,
        kannan=kannan,
        chatterjea=chatterjea,
        singh=tuple(singh),
        singh_chatterjea=tuple(sc),
        minimal_p=minimal_p,
        p_max=p_max,
        banach_constant=lam,
        banach_constant_source=source,
        p_min_formula=p_formula,
        subsampled=data.subsampled,
    )
