"""Closed-form shift objectives and the incentive-alignment classification.

On a valid scenario the dispatch prices take exactly two regimes as the
flexible block moves from bus 2 to bus 1: below the shift threshold the
bus-1 price is zero (surplus renewable is marginal), above it the bus-1
generator sets the price.  That makes both settlement objectives linear on
each side of the threshold, so they can be written down directly and
optimized by comparing two candidate points — no LP required.  The numeric
dispatch path in :mod:`gridshift.dispatch` recomputes the same quantities
independently; the two must agree, and the test suite holds them to that.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

from .dispatch import csv_number
from .grid_model import ThreeBusScenario, ValidityReport, eta, tau, validate

#: Two candidate optima closer than this are considered the same choice, and
#: an exact tie between them resolves to the threshold.
DECISION_TOL = 1e-9


class ScenarioInvalidError(ValueError):
    """The scenario fails the setting conditions; carries the full report."""

    def __init__(self, report: ValidityReport):
        self.report = report
        failed = ", ".join(c.name for c in report.failures())
        super().__init__(f"scenario outside the modeled setting: {failed}")


class DegenerateWeightsError(ValueError):
    """The blended bus-2 rate is zero, so shifting is costless in this
    objective and the optimal shift is not meaningfully defined."""


@dataclasses.dataclass(frozen=True)
class PiecewiseObjective:
    """A two-segment linear function of the shift with its breakpoint.

    The left segment applies for ``delta <= breakpoint`` (the breakpoint
    itself settles at zero bus-1 price), the right segment beyond it.  The
    function may jump upward at the breakpoint: the bus-1 price snaps from
    zero to the generator offer, instantly repricing whatever that segment's
    settlement covers at bus 1.
    """

    breakpoint: float
    left_intercept: float
    left_slope: float
    right_intercept: float
    right_slope: float
    domain: float  # evaluation allowed on [0, domain]

    def evaluate(self, delta: float) -> float:
        if not -DECISION_TOL <= delta <= self.domain + DECISION_TOL:
            raise ValueError(
                f"delta={delta!r} outside the shiftable block [0, {self.domain}]"
            )
        if delta <= self.breakpoint:
            return self.left_intercept + self.left_slope * delta
        return self.right_intercept + self.right_slope * delta

    def discontinuity(self) -> float:
        """Jump at the breakpoint: right-limit value minus the (left-branch)
        value attained there."""
        left = self.left_intercept + self.left_slope * self.breakpoint
        right = self.right_intercept + self.right_slope * self.breakpoint
        return right - left


class Shift(NamedTuple):
    """An optimal shift choice and its objective value."""

    delta: float
    value: float


def _validated(s: ThreeBusScenario) -> None:
    report = validate(s)
    if not report.valid:
        raise ScenarioInvalidError(report)


def objective_dc(s: ThreeBusScenario) -> PiecewiseObjective:
    """Data-center bill as a function of the shift.

    Below the threshold the shifted megawatts are free (zero bus-1 price) and
    every shifted unit saves the blended bus-2 rate; above it each extra unit
    trades the bus-2 rate for the bus-1 rate.
    """
    _validated(s)
    eta1 = eta(s, 1, "dc")
    eta2 = eta(s, 2, "dc")
    return PiecewiseObjective(
        breakpoint=tau(s).value,
        left_intercept=eta2 * s.L,
        left_slope=-eta2,
        right_intercept=eta2 * s.L,
        right_slope=eta1 - eta2,
        domain=s.L,
    )


def objective_sw(s: ThreeBusScenario) -> PiecewiseObjective:
    """System-wide settlement cost as a function of the shift: same regime
    structure as the bill, but covering the full bus-1 and bus-2 loads."""
    _validated(s)
    eta1 = eta(s, 1, "sw")
    eta2 = eta(s, 2, "sw")
    return PiecewiseObjective(
        breakpoint=tau(s).value,
        left_intercept=eta2 * s.l2,
        left_slope=-eta2,
        right_intercept=eta1 * s.l1 + eta2 * s.l2,
        right_slope=eta1 - eta2,
        domain=s.L,
    )


def _prefers_threshold(threshold_value: float, cutoff: float) -> bool:
    # Stop-at-threshold wins at the cutoff itself (ties resolve to the
    # threshold, the physically distinguished point).
    return threshold_value - cutoff >= -DECISION_TOL


def optimal_shift_dc(s: ThreeBusScenario) -> Shift:
    """Bill-minimizing shift: the threshold or the whole block.

    Only two candidates exist because the bill is linear on both sides and
    strictly decreasing on the left.  The threshold wins exactly when it is
    at least ``L - (eta1/eta2) L`` (with the blended data-center rates).
    """
    _validated(s)
    eta1 = eta(s, 1, "dc")
    eta2 = eta(s, 2, "dc")
    if eta2 <= DECISION_TOL:
        raise DegenerateWeightsError(
            "blended bus-2 rate is zero for the data center; every shift "
            "costs the same and no optimum is defined"
        )
    objective = objective_dc(s)
    t = objective.breakpoint
    cutoff = s.L - (eta1 / eta2) * s.L
    if _prefers_threshold(t, cutoff):
        return Shift(t, objective.evaluate(t))
    return Shift(s.L, objective.evaluate(s.L))


def optimal_shift_sw(s: ThreeBusScenario) -> Shift:
    """System-optimal shift: the threshold or the whole block.

    Same two candidates as the bill, but the cutoff shifts to
    ``L - (eta1/eta2)(L + l1)`` because crossing the threshold also reprices
    the base bus-1 load ``l1`` in the system settlement.
    """
    _validated(s)
    eta1 = eta(s, 1, "sw")
    eta2 = eta(s, 2, "sw")
    if eta2 <= DECISION_TOL:
        raise DegenerateWeightsError(
            "blended bus-2 rate is zero in the system objective; every shift "
            "costs the same and no optimum is defined"
        )
    objective = objective_sw(s)
    t = objective.breakpoint
    cutoff = s.L - (eta1 / eta2) * (s.L + s.l1)
    if _prefers_threshold(t, cutoff):
        return Shift(t, objective.evaluate(t))
    return Shift(s.L, objective.evaluate(s.L))


@dataclasses.dataclass(frozen=True)
class AlignmentReport:
    """Do private and system incentives pick the same shift?

    ``verdict`` compares the two optima directly.  ``binding_case`` names the
    choice pair: ``both-threshold`` and ``both-full`` are the two aligned
    cases, ``dc-full-sw-threshold`` is the classic split (the data center
    shifts everything while the system would stop at the threshold), and the
    reverse split ``dc-threshold-sw-full`` can only appear when the two
    agents blend price and emissions with different weights.
    """

    delta_star_dc: float
    delta_star_sw: float
    verdict: str  # "aligned" | "misaligned"
    binding_case: str
    sw_at_dc_choice: float
    sw_at_sw_choice: float
    externality_at_dc_choice: float
    suboptimality_ratio: float
    residual_at_dc_choice: float
    residual_at_sw_choice: float

    CSV_HEADER = (
        "delta_star_dc,delta_star_sw,verdict,binding_case,"
        "sw_at_dc_choice,sw_at_sw_choice,externality_at_dc_choice,"
        "suboptimality_ratio,residual_at_dc_choice,residual_at_sw_choice"
    )

    def to_csv_row(self) -> str:
        return ",".join(
            (
                csv_number(self.delta_star_dc),
                csv_number(self.delta_star_sw),
                self.verdict,
                self.binding_case,
                csv_number(self.sw_at_dc_choice),
                csv_number(self.sw_at_sw_choice),
                csv_number(self.externality_at_dc_choice),
                csv_number(self.suboptimality_ratio),
                csv_number(self.residual_at_dc_choice),
                csv_number(self.residual_at_sw_choice),
            )
        )

    def to_text(self) -> str:
        aligned = self.verdict == "aligned"
        bill_at_dc_choice = self.sw_at_dc_choice - self.residual_at_dc_choice
        lines = [
            f"data-center optimum:  shift {self.delta_star_dc:.6f} "
            f"(bill {bill_at_dc_choice:.6f})",
            f"system optimum:       shift {self.delta_star_sw:.6f} "
            f"(system cost {self.sw_at_sw_choice:.6f})",
            f"verdict: {'ALIGNED' if aligned else 'MISALIGNED'} ({self.binding_case})",
            f"system cost at the data-center choice: {self.sw_at_dc_choice:.6f}",
            f"externality of the private choice:     {self.externality_at_dc_choice:.6f}",
            f"suboptimality ratio:                   {self.suboptimality_ratio:.6f}",
            "residual (system cost minus bill) at dc/system optima: "
            f"{self.residual_at_dc_choice:.6f} / {self.residual_at_sw_choice:.6f}",
        ]
        return "\n".join(lines)


def classify_alignment(s: ThreeBusScenario) -> AlignmentReport:
    """Compare the two optima and quantify what the private choice costs.

    ``externality_at_dc_choice`` is the extra system cost caused by the
    data-center's shift relative to the system optimum, and
    ``suboptimality_ratio`` the same gap as a ratio (1 exactly when aligned;
    never below 1, since the system optimum minimizes over the same two
    candidates).
    """
    dc = optimal_shift_dc(s)
    sw = optimal_shift_sw(s)
    sw_objective = objective_sw(s)
    dc_objective = objective_dc(s)

    aligned = abs(dc.delta - sw.delta) <= DECISION_TOL
    t = sw_objective.breakpoint
    dc_at_threshold = abs(dc.delta - t) <= DECISION_TOL
    sw_at_threshold = abs(sw.delta - t) <= DECISION_TOL
    if dc_at_threshold and sw_at_threshold:
        case = "both-threshold"
    elif not dc_at_threshold and not sw_at_threshold:
        case = "both-full"
    elif sw_at_threshold:
        case = "dc-full-sw-threshold"
    else:
        case = "dc-threshold-sw-full"

    sw_at_dc_choice = sw_objective.evaluate(dc.delta)
    return AlignmentReport(
        delta_star_dc=dc.delta,
        delta_star_sw=sw.delta,
        verdict="aligned" if aligned else "misaligned",
        binding_case=case,
        sw_at_dc_choice=sw_at_dc_choice,
        sw_at_sw_choice=sw.value,
        externality_at_dc_choice=sw_at_dc_choice - sw.value,
        suboptimality_ratio=sw_at_dc_choice / sw.value,
        residual_at_dc_choice=sw_at_dc_choice - dc.value,
        residual_at_sw_choice=sw_objective.evaluate(sw.delta)
        - dc_objective.evaluate(sw.delta),
    )
