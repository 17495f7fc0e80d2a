"""Economic dispatch of the three-bus system and its marginal signals.

Builds the dispatch LP for a given shift ``delta`` of the flexible block from
bus 2 to bus 1, solves it with :mod:`gridshift.lp_core`, and reads the bus
prices (equality duals) and marginal emission rates (prices mapped through the
generator table) off the optimal basis.  Also provides the two settlement-style
cost evaluations — the data-center bill and the system-wide cost — used to
cross-check the closed-form objectives numerically.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import lp_core
from .grid_model import ThreeBusScenario

#: Variable order of the dispatch LP.
VARIABLE_NAMES = ("y0", "y1", "y2", "f01", "f02", "f12")

# Nodal balance rows (generation plus net inflow equals load).  y0 enters
# negatively: it is renewable *curtailment*, absorbing whatever part of the
# bus-0 supply the lines do not carry away.
_BALANCE = np.array(
    [
        [-1.0, 0.0, 0.0, -1.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0, 1.0, 1.0],
    ]
)
_BALANCE.setflags(write=False)

#: Price must land within this distance of a generator offer (or zero) to be
#: mapped to an emission rate.
PRICE_MATCH_TOL = 1e-6

# A basic variable this close to one of its bounds marks the vertex (and
# possibly the duals) as degenerate.
_DEGENERACY_TOL = 1e-7


class DeltaRangeError(ValueError):
    """Requested shift lies outside the block [0, L]."""


class UnmappedPriceError(ValueError):
    """A bus price matches neither zero nor a generator offer, so no marginal
    emission rate can be attributed; the scenario is outside the modeled
    setting."""


class DispatchInfeasibleError(RuntimeError):
    """No dispatch satisfies the balances; names the limits that cut it off."""

    def __init__(self, message: str, binding: tuple[str, ...]):
        super().__init__(message)
        self.binding = binding


def csv_number(x: float) -> str:
    """Fixed 12-significant-digit rendering used by every CSV writer."""
    return f"{x:.12g}"


@dataclasses.dataclass(frozen=True)
class DispatchOutcome:
    """Optimal dispatch at one shift value.

    ``lmp`` holds the bus prices ($/MWh, duals of the nodal balances) and
    ``lme`` the matching marginal emission rates (tCO2/MWh), both indexed by
    bus 0..2.  ``degenerate`` records that the vertex was degenerate and the
    duals were therefore taken from the left limit (one solve at a nudged
    ``delta``)."""

    delta: float
    y0: float
    y1: float
    y2: float
    f01: float
    f02: float
    f12: float
    lmp: tuple[float, float, float]
    lme: tuple[float, float, float]
    total_cost: float
    degenerate: bool = False

    CSV_HEADER = (
        "delta,y0,y1,y2,f01,f02,f12,"
        "lambda0,lambda1,lambda2,pi1,pi2,total_cost"
    )

    def to_csv_row(self) -> str:
        cells = (
            self.delta,
            self.y0,
            self.y1,
            self.y2,
            self.f01,
            self.f02,
            self.f12,
            self.lmp[0],
            self.lmp[1],
            self.lmp[2],
            self.lme[1],
            self.lme[2],
            self.total_cost,
        )
        return ",".join(csv_number(v) for v in cells)


def build_ed(s: ThreeBusScenario, delta: float) -> lp_core.LinearProgram:
    """Dispatch LP at shift ``delta``: cost-minimal generation subject to the
    three nodal balances, nonnegative generation, and line limits."""
    if not 0.0 <= delta <= s.L:
        raise DeltaRangeError(f"delta={delta!r} outside the shiftable block [0, {s.L}]")
    rhs = np.array([s.l0, s.l1 + delta, s.l2 - delta])
    lower = np.array([0.0, 0.0, 0.0, -s.F01, -s.F02, -s.F12])
    upper = np.array([np.inf, np.inf, np.inf, s.F01, s.F02, s.F12])
    objective = np.array([0.0, s.c1, s.c2, 0.0, 0.0, 0.0])
    return lp_core.LinearProgram(
        objective=objective,
        eq_matrix=_BALANCE,
        eq_rhs=rhs,
        lower_bounds=lower,
        upper_bounds=upper,
    )


def lme_from_lmp(s: ThreeBusScenario, price: float) -> float:
    """Marginal emission rate implied by a bus price.

    A zero price means surplus renewable is marginal (rate 0); a price at a
    generator's offer means that generator is marginal (its emission rate).
    Anything else cannot be attributed and raises :class:`UnmappedPriceError`.
    """
    candidates = ((0.0, 0.0), (s.c1, s.e1), (s.c2, s.e2))
    best = min(range(3), key=lambda i: abs(price - candidates[i][0]))
    anchor, rate = candidates[best]
    if abs(price - anchor) <= PRICE_MATCH_TOL:
        return rate
    raise UnmappedPriceError(
        f"price {price!r} is not within {PRICE_MATCH_TOL} of 0, c1={s.c1}, or "
        f"c2={s.c2}; marginal emissions undefined"
    )


def _degenerate_vertex(lp: lp_core.LinearProgram, sol: lp_core.LpSolution) -> bool:
    for j in sol.basis:
        x = sol.primal[j]
        lo = lp.lower_bounds[j]
        hi = lp.upper_bounds[j]
        if np.isfinite(lo) and x - lo <= _DEGENERACY_TOL:
            return True
        if np.isfinite(hi) and hi - x <= _DEGENERACY_TOL:
            return True
    return False


def _diagnose_infeasible(s: ThreeBusScenario, delta: float) -> DispatchInfeasibleError:
    binding = []
    if s.l0 > s.F01 + s.F02:
        binding.append(
            f"bus-0 load {s.l0:g} exceeds import capacity F01+F02={s.F01 + s.F02:g}"
        )
    if -(s.l1 + delta) > s.F01 + s.F12:
        binding.append(
            f"bus-1 surplus {-(s.l1 + delta):g} exceeds export capacity "
            f"F01+F12={s.F01 + s.F12:g}"
        )
    if -(s.l2 - delta) > s.F02 + s.F12:
        binding.append(
            f"bus-2 surplus {-(s.l2 - delta):g} exceeds export capacity "
            f"F02+F12={s.F02 + s.F12:g}"
        )
    if -(s.l1 + s.l2) > s.F01 + s.F02:
        binding.append(
            f"combined bus-1/2 surplus {-(s.l1 + s.l2):g} exceeds capacity "
            f"toward bus 0 F01+F02={s.F01 + s.F02:g}"
        )
    if not binding:
        binding.append("no single cut identified; balances jointly unsatisfiable")
    return DispatchInfeasibleError(
        f"dispatch infeasible at delta={delta:g}: " + "; ".join(binding),
        binding=tuple(binding),
    )


def solve_ed_detailed(
    s: ThreeBusScenario, delta: float
) -> tuple[DispatchOutcome, lp_core.LpSolution]:
    """Like :func:`solve_ed` but also returns the raw LP solution, so callers
    can run independent optimality checks on it."""
    lp = build_ed(s, delta)
    sol = lp_core.solve(lp)
    if sol.status == lp_core.INFEASIBLE:
        raise _diagnose_infeasible(s, delta)
    if sol.status != lp_core.OPTIMAL:  # objective >= 0 rules unboundedness out
        raise lp_core.SolverFailure(f"unexpected dispatch status {sol.status!r}")

    duals = sol.duals
    degenerate = _degenerate_vertex(lp, sol)
    if degenerate:
        # At a degenerate vertex (several optimal bases) the duals depend on
        # where the pivoting happened to stop.  The reported prices follow the
        # left-limit convention: take them from a solve nudged below delta.
        epsilon = 1e-7 * max(1.0, s.L)
        if delta > epsilon:
            nudged = lp_core.solve(build_ed(s, delta - epsilon))
            if nudged.status == lp_core.OPTIMAL:
                duals = nudged.duals

    # "+ 0.0" folds IEEE negative zeros into plain zeros for clean output.
    lmp = (float(duals[0]) + 0.0, float(duals[1]) + 0.0, float(duals[2]) + 0.0)
    lme = tuple(lme_from_lmp(s, price) for price in lmp)
    y0, y1, y2, f01, f02, f12 = (float(v) for v in sol.primal)
    outcome = DispatchOutcome(
        delta=delta,
        y0=y0,
        y1=y1,
        y2=y2,
        f01=f01,
        f02=f02,
        f12=f12,
        lmp=lmp,
        lme=lme,
        total_cost=float(sol.objective_value),
        degenerate=degenerate,
    )
    return outcome, sol


def solve_ed(s: ThreeBusScenario, delta: float) -> DispatchOutcome:
    """Solve the dispatch at ``delta`` and report flows, prices, and marginal
    emissions, with left-limit duals at degenerate (threshold) points."""
    outcome, _ = solve_ed_detailed(s, delta)
    return outcome


def dc_cost_numeric(s: ThreeBusScenario, out: DispatchOutcome) -> float:
    """Data-center bill for its own load split: ``delta`` at bus 1 and the
    rest of the block at bus 2, each settled at the bus price blended with the
    bus marginal-emission rate by ``alpha_dc``."""
    a = s.alpha_dc
    price_part = out.lmp[1] * out.delta + out.lmp[2] * (s.L - out.delta)
    emission_part = out.lme[1] * out.delta + out.lme[2] * (s.L - out.delta)
    return a * price_part + (1.0 - a) * emission_part


def sw_cost_numeric(s: ThreeBusScenario, out: DispatchOutcome) -> float:
    """System-wide settlement over the *entire* generator-bus loads (base plus
    shifted), blended by ``alpha_sw``; bus 0 carries no generator offer."""
    a = s.alpha_sw
    load1 = s.l1 + out.delta
    load2 = s.l2 - out.delta
    price_part = out.lmp[1] * load1 + out.lmp[2] * load2
    emission_part = out.lme[1] * load1 + out.lme[2] * load2
    return a * price_part + (1.0 - a) * emission_part
