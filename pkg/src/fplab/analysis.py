"""From a Banach constant to the iterate where the cross condition kicks in.

A Banach contraction with constant ``lam`` has ``T^p`` Banach with constant
``lam**p``; once that power drops to 1/3 the iterate satisfies the
Chatterjea-type cross inequality. The smallest such ``p`` is
``ceil(ln 3 / -ln lam)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .contraction import (
    DEFAULT_P_MAX,
    TAU_MARGIN,
    alpha_banach,
    alpha_chatterjea,
    minimal_p_singh_chatterjea,
)
from .errors import InconsistentInputError, InvalidParameterError, MissingParameterError
from .maps import SelfMap
from .space import SamplePlan, sample_points

THIRD = 1.0 / 3.0


def minimal_p_for_banach(lam: float) -> int:
    """Smallest ``p >= 1`` with ``lam**p <= 1/3``.

    The closed form only seeds the answer; direct powering decides it, so a
    ratio that lands next to an integer cannot be pushed off by the ceiling.
    ``lam = 0`` (a constant map) gives 1.
    """
    if lam == 0.0:
        return 1
    if not (0.0 < lam < 1.0):
        raise InvalidParameterError(f"lambda: must lie in (0, 1), got {lam}")
    p = max(1, math.ceil(math.log(3.0) / -math.log(lam)))
    while lam**p > THIRD:
        p += 1
    while p > 1 and lam ** (p - 1) <= THIRD:
        p -= 1
    return p


@dataclass(frozen=True)
class BridgeReport:
    lam: float
    p_min_formula: int
    power_at_pmin: float
    power_before: float
    empirical_p: int | None = None
    chatterjea_alpha_at_p1: float | None = None
    map_name: str | None = None

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "p_min": self.p_min_formula,
            "power_at_pmin": self.power_at_pmin,
            "power_before": self.power_before,
            "empirical_p": self.empirical_p,
            "chatterjea_alpha_at_p1": self.chatterjea_alpha_at_p1,
            "map": self.map_name,
        }


def bridge_report(lam: float, T: SelfMap | None = None, plan: SamplePlan | None = None,
                  p_max: int | None = None) -> BridgeReport:
    """Closed-form minimal ``p`` for ``lam``, optionally compared against a map.

    With a map, its Banach constant must be consistent with ``lam``: either
    the metadata says so or the sampled Banach estimate does not exceed it.
    The empirical ``p`` is searched up to ``max(p_max, p_min)``.
    """
    if not (0.0 < lam < 1.0):
        raise InvalidParameterError(f"lambda: must lie in (0, 1), got {lam}")
    p_min = minimal_p_for_banach(lam)
    report = dict(
        lam=float(lam),
        p_min_formula=p_min,
        power_at_pmin=lam**p_min,
        power_before=lam ** (p_min - 1),
    )
    if T is None:
        return BridgeReport(**report)
    if plan is None:
        raise MissingParameterError("plan: a sample plan is required when a map is given")

    samples = sample_points(T.space, plan)
    if T.banach_constant is not None:
        if abs(T.banach_constant - lam) > TAU_MARGIN:
            raise InconsistentInputError(
                f"lambda: {lam!r} disagrees with the map's Banach constant {T.banach_constant!r}"
            )
    else:
        est = alpha_banach(T, samples, seed=plan.seed)
        if not est.feasible or est.value > lam + TAU_MARGIN:
            raise InconsistentInputError(
                f"lambda: sampled Banach constant {est.value!r} exceeds {lam!r}"
            )

    limit = max(p_max or DEFAULT_P_MAX, p_min)
    empirical, _ = minimal_p_singh_chatterjea(T, samples, limit, seed=plan.seed)
    cross = alpha_chatterjea(T, samples, seed=plan.seed)
    return BridgeReport(
        **report,
        empirical_p=empirical,
        chatterjea_alpha_at_p1=cross.value if cross.feasible else None,
        map_name=T.name,
    )
