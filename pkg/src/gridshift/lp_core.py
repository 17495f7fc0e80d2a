"""Dense two-phase simplex for small linear programs with variable bounds.

Solves ``min c.x  subject to  A x = b,  lo <= x <= hi`` and reports the
optimal point together with the equality-constraint duals and reduced costs
of the terminating basis.  Nonbasic variables are kept explicitly at their
lower or upper bound (no slack reformulation), so bound flips are ordinary
pivots and the duals come straight out of the final basis factorization.

The implementation favours determinism and transparency over large-scale
performance: dense numpy algebra, Dantzig pricing with a switch to Bland's
rule after a run of degenerate pivots, and absolute tolerances suited to
well-scaled inputs of at most a few hundred variables.
"""

from __future__ import annotations

import dataclasses

import numpy as np

# Solution status labels.
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# Absolute tolerance for feasibility, pricing, and degeneracy decisions.
TOLERANCE = 1e-9
# Consecutive degenerate pivots tolerated before switching to Bland's rule.
BLAND_TRIGGER = 20
# Phase-1 residual above this (scaled by max |rhs|) means infeasible.
_INFEASIBILITY_CUTOFF = 1e-7
# Entries of a direction vector smaller than this cannot block or pivot.
_PIVOT_FLOOR = 1e-11
# Slack used when deciding whether a variable sits on one of its bounds.
_ACTIVE_BOUND_TOL = 1e-7


class LpInputError(ValueError):
    """Malformed problem data: shape mismatch, NaN entries, or lo > hi."""


class SolverFailure(RuntimeError):
    """The solver gave up: iteration budget exhausted or numerical breakdown."""


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclasses.dataclass(frozen=True)
class LinearProgram:
    """``min objective . x`` with ``eq_matrix @ x == eq_rhs`` and box bounds.

    Arrays are copied and frozen at construction; bounds may be +/-inf but
    never NaN, and every lower bound must not exceed its upper bound.
    """

    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray

    def __post_init__(self) -> None:
        A = np.atleast_2d(np.array(self.eq_matrix, dtype=float))
        c = np.array(self.objective, dtype=float)
        b = np.array(self.eq_rhs, dtype=float)
        lo = np.array(self.lower_bounds, dtype=float)
        hi = np.array(self.upper_bounds, dtype=float)
        if A.ndim != 2:
            raise LpInputError("constraint matrix must be two-dimensional")
        m, n = A.shape
        if n == 0 or m == 0:
            raise LpInputError("need at least one variable and one constraint row")
        for name, arr, shape in (
            ("objective", c, (n,)),
            ("eq_rhs", b, (m,)),
            ("lower_bounds", lo, (n,)),
            ("upper_bounds", hi, (n,)),
        ):
            if arr.shape != shape:
                raise LpInputError(
                    f"{name} has shape {arr.shape}, expected {shape} "
                    f"for a {m}x{n} constraint matrix"
                )
        if not (np.isfinite(A).all() and np.isfinite(c).all() and np.isfinite(b).all()):
            raise LpInputError("objective, matrix, and rhs must be finite")
        if np.isnan(lo).any() or np.isnan(hi).any():
            raise LpInputError("bounds may be infinite but not NaN")
        if (lo > hi + TOLERANCE).any():
            bad = int(np.argmax(lo - hi))
            raise LpInputError(f"lower bound exceeds upper bound for variable {bad}")
        object.__setattr__(self, "objective", _as_readonly(c))
        object.__setattr__(self, "eq_matrix", _as_readonly(A))
        object.__setattr__(self, "eq_rhs", _as_readonly(b))
        object.__setattr__(self, "lower_bounds", _as_readonly(lo))
        object.__setattr__(self, "upper_bounds", _as_readonly(hi))

    @property
    def n_variables(self) -> int:
        return self.eq_matrix.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.eq_matrix.shape[0]


@dataclasses.dataclass(frozen=True)
class LpSolution:
    """Result of :func:`solve`.

    ``duals`` are the simplex multipliers of the terminating basis, i.e. the
    sensitivity of the optimal objective to each equality right-hand side.
    ``reduced_costs`` are ``objective - duals @ eq_matrix`` with basic entries
    zeroed; ``basis`` is the sorted index set of basic structural variables.
    For non-optimal statuses the numeric fields are ``None``.
    """

    status: str
    primal: np.ndarray | None
    duals: np.ndarray | None
    reduced_costs: np.ndarray | None
    basis: tuple[int, ...]
    objective_value: float | None
    iterations: int


def solve(lp: LinearProgram) -> LpSolution:
    """Run the two-phase bounded-variable simplex method on ``lp``.

    Phase 1 minimizes the total artificial infeasibility from a deterministic
    starting point (every variable at its lower bound when finite, otherwise
    its upper bound, otherwise zero).  Phase 2 reoptimizes the true objective
    with the artificials pinned to zero.  Raises :class:`SolverFailure` if the
    iteration budget ``max(200, 10 * (variables + rows))`` is exhausted.
    """
    c = lp.objective
    A = lp.eq_matrix
    b = lp.eq_rhs
    m, n = A.shape

    lo = np.concatenate([lp.lower_bounds, np.zeros(m)])
    hi = np.concatenate([lp.upper_bounds, np.full(m, np.inf)])

    x = np.zeros(n + m)
    at_upper = np.zeros(n + m, dtype=bool)
    lo_finite = np.isfinite(lo[:n])
    hi_finite = np.isfinite(hi[:n])
    x[:n] = np.where(lo_finite, lo[:n], np.where(hi_finite, hi[:n], 0.0))
    at_upper[:n] = ~lo_finite & hi_finite

    residual = b - A @ x[:n]
    signs = np.where(residual >= 0.0, 1.0, -1.0)
    Aaug = np.hstack([A, np.diag(signs)])
    AaugT = Aaug.T.copy()
    x[n:] = np.abs(residual)

    basis = np.arange(n, n + m, dtype=np.intp)
    in_basis = np.zeros(n + m, dtype=bool)
    in_basis[n:] = True
    free_var = np.isinf(lo) & np.isinf(hi)
    fixed = (hi - lo) <= TOLERANCE

    max_iterations = max(200, 10 * (n + m))
    iterations = 0
    use_bland = False
    degenerate_run = 0

    def run_phase(cost: np.ndarray) -> str:
        nonlocal iterations, use_bland, degenerate_run
        while True:
            BT = AaugT[basis]
            y = np.linalg.solve(BT, cost[basis])
            d = cost - y @ Aaug
            score = np.where(at_upper, d, -d)
            score[free_var] = np.abs(d[free_var])
            score[in_basis] = -np.inf
            score[fixed] = -np.inf
            if use_bland:
                eligible = np.flatnonzero(score > TOLERANCE)
                if eligible.size == 0:
                    return "optimal"
                t = int(eligible[0])
            else:
                t = int(np.argmax(score))
                if score[t] <= TOLERANCE:
                    return "optimal"
            if free_var[t]:
                step_sign = 1.0 if d[t] < 0.0 else -1.0
            elif at_upper[t]:
                step_sign = -1.0
            else:
                step_sign = 1.0
            w = np.linalg.solve(BT.T, Aaug[:, t])
            sw = step_sign * w

            theta = hi[t] - lo[t]  # own-range limit: reaching it flips the bound
            block = -1
            block_to_upper = False
            for i in range(m):
                swi = sw[i]
                v = basis[i]
                if swi > _PIVOT_FLOOR:
                    bound = lo[v]
                    if bound == -np.inf:
                        continue
                    limit = (x[v] - bound) / swi
                    hits_upper = False
                elif swi < -_PIVOT_FLOOR:
                    bound = hi[v]
                    if bound == np.inf:
                        continue
                    limit = (bound - x[v]) / -swi
                    hits_upper = True
                else:
                    continue
                if limit < 0.0:
                    limit = 0.0
                if limit < theta - 1e-12:
                    theta = limit
                    block = i
                    block_to_upper = hits_upper
                elif block >= 0 and limit <= theta + 1e-12:
                    if use_bland:
                        better = basis[i] < basis[block]
                    else:
                        better = abs(sw[i]) > abs(sw[block]) + 1e-12
                    if better:
                        block = i
                        block_to_upper = hits_upper
            if not np.isfinite(theta):
                return "unbounded"

            iterations += 1
            if iterations > max_iterations:
                raise SolverFailure(
                    f"iteration budget {max_iterations} exhausted "
                    f"({n} variables, {m} rows)"
                )

            x[basis] -= theta * sw
            if block < 0:
                at_upper[t] = not at_upper[t]
                x[t] = hi[t] if at_upper[t] else lo[t]
                degenerate_run = 0
            else:
                x[t] += step_sign * theta
                leaving = basis[block]
                x[leaving] = hi[leaving] if block_to_upper else lo[leaving]
                at_upper[leaving] = block_to_upper
                in_basis[leaving] = False
                basis[block] = t
                in_basis[t] = True
                if theta <= TOLERANCE:
                    degenerate_run += 1
                    if degenerate_run >= BLAND_TRIGGER:
                        use_bland = True
                else:
                    degenerate_run = 0

    def refresh_basics() -> None:
        # Re-solve for the basic values from the exactly-held nonbasic bounds,
        # clearing the drift accumulated by incremental updates.
        x_nonbasic = x.copy()
        x_nonbasic[basis] = 0.0
        x[basis] = np.linalg.solve(Aaug[:, basis], b - Aaug @ x_nonbasic)

    failed = LpSolution(
        status=INFEASIBLE,
        primal=None,
        duals=None,
        reduced_costs=None,
        basis=(),
        objective_value=None,
        iterations=0,
    )

    phase1_cost = np.zeros(n + m)
    phase1_cost[n:] = 1.0
    if run_phase(phase1_cost) == "unbounded":
        raise SolverFailure("phase-1 objective diverged; numerical breakdown")
    refresh_basics()
    infeasibility = float(np.abs(x[n:]).sum())
    if infeasibility > _INFEASIBILITY_CUTOFF * (1.0 + float(np.abs(b).max())):
        return dataclasses.replace(failed, iterations=iterations)

    # Drive leftover artificials out of the basis; a row whose artificial
    # cannot be exchanged for any structural column is linearly dependent and
    # keeps its (zero-valued, now fixed) artificial as a placeholder.
    for p in range(m):
        if basis[p] < n:
            continue
        unit = np.zeros(m)
        unit[p] = 1.0
        multipliers = np.linalg.solve(AaugT[basis], unit)
        row = multipliers @ A
        row[in_basis[:n]] = 0.0
        entering = int(np.argmax(np.abs(row)))
        if abs(row[entering]) > TOLERANCE:
            leaving = basis[p]
            basis[p] = entering
            in_basis[leaving] = False
            in_basis[entering] = True

    lo[n:] = 0.0
    hi[n:] = 0.0
    fixed = (hi - lo) <= TOLERANCE
    use_bland = False
    degenerate_run = 0

    phase2_cost = np.concatenate([c, np.zeros(m)])
    if run_phase(phase2_cost) == "unbounded":
        return dataclasses.replace(
            failed, status=UNBOUNDED, iterations=iterations
        )
    refresh_basics()

    y = np.linalg.solve(AaugT[basis], phase2_cost[basis])
    reduced = c - y @ A
    reduced[in_basis[:n]] = 0.0
    primal = x[:n].copy()
    return LpSolution(
        status=OPTIMAL,
        primal=primal,
        duals=y,
        reduced_costs=reduced,
        basis=tuple(sorted(int(j) for j in basis if j < n)),
        objective_value=float(c @ primal),
        iterations=iterations,
    )


@dataclasses.dataclass(frozen=True)
class KktReport:
    """Worst-case optimality-condition residuals for a claimed solution.

    ``violations`` lists every check whose residual exceeds ``tolerance``;
    an empty list certifies the solution to that tolerance.
    """

    primal_feasibility: float
    dual_feasibility: float
    complementary_slackness: float
    violations: tuple[tuple[str, float], ...]
    tolerance: float

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_kkt(lp: LinearProgram, sol: LpSolution, tolerance: float = 1e-8) -> KktReport:
    """Check primal feasibility, dual sign conditions, and complementarity.

    The reduced costs are recomputed from ``sol.duals`` rather than trusted
    from the solution, so this is an independent certificate of optimality:
    all three residuals within ``tolerance`` proves ``sol`` optimal for ``lp``
    up to that tolerance.  Requires ``sol.status == OPTIMAL``.
    """
    if sol.status != OPTIMAL:
        raise LpInputError("KKT verification needs an optimal solution")
    x = sol.primal
    y = sol.duals
    lo = lp.lower_bounds
    hi = lp.upper_bounds

    residual = float(np.max(np.abs(lp.eq_matrix @ x - lp.eq_rhs)))
    below = float(np.max(lo - x, initial=0.0))
    above = float(np.max(x - hi, initial=0.0))
    primal = max(residual, below, above)

    d = lp.objective - y @ lp.eq_matrix
    at_lo = (x - lo) <= _ACTIVE_BOUND_TOL
    at_hi = (hi - x) <= _ACTIVE_BOUND_TOL
    dual_viol = np.zeros_like(d)
    interior = ~(at_lo | at_hi)
    dual_viol[interior] = np.abs(d[interior])
    only_lo = at_lo & ~at_hi
    dual_viol[only_lo] = np.maximum(0.0, -d[only_lo])
    only_hi = at_hi & ~at_lo
    dual_viol[only_hi] = np.maximum(0.0, d[only_hi])
    dual = float(dual_viol.max(initial=0.0))

    # A nonzero reduced cost must pin its variable to the matching bound;
    # the residual is |reduced cost| times the distance left to that bound.
    gap = np.where(d > 0.0, x - lo, hi - x)
    gap = np.where(np.isfinite(gap), np.maximum(gap, 0.0), 0.0)
    comp_viol = np.abs(d) * gap
    comp_viol[np.abs(d) <= tolerance] = 0.0
    comp = float(comp_viol.max(initial=0.0))

    violations = tuple(
        (name, value)
        for name, value in (
            ("primal feasibility", primal),
            ("dual feasibility", dual),
            ("complementary slackness", comp),
        )
        if value > tolerance
    )
    return KktReport(
        primal_feasibility=primal,
        dual_feasibility=dual,
        complementary_slackness=comp,
        violations=violations,
        tolerance=tolerance,
    )


def dual_objective(lp: LinearProgram, sol: LpSolution) -> float:
    """Lagrangian dual value at ``sol.duals``; equals the primal objective at
    a true optimum (strong duality), making it a handy one-number check."""
    if sol.status != OPTIMAL:
        raise LpInputError("dual objective needs an optimal solution")
    y = sol.duals
    d = lp.objective - y @ lp.eq_matrix
    d = np.where(np.abs(d) <= TOLERANCE, 0.0, d)
    # A positive reduced cost pushes its variable to the lower bound, a
    # negative one to the upper bound; zero reduced cost contributes nothing,
    # so mask the bound arrays first to keep 0 * inf out of the arithmetic.
    lower = np.where(d > 0.0, lp.lower_bounds, 0.0)
    upper = np.where(d < 0.0, lp.upper_bounds, 0.0)
    contribution = np.where(d > 0.0, d * lower, d * upper)
    return float(y @ lp.eq_rhs + contribution.sum())


def format_lp(lp: LinearProgram) -> str:
    """Plain-text dump of an LP for bug reports.

    Line 1: ``<rows> <variables>``.  Line 2: objective coefficients.  Then one
    line per constraint row (coefficients followed by the right-hand side),
    then the lower-bound line and the upper-bound line, all space-separated
    ``repr`` values so the dump round-trips exactly.
    """
    m, n = lp.eq_matrix.shape

    def fmt(values) -> str:
        return " ".join(repr(float(v)) for v in values)

    lines = [f"{m} {n}", fmt(lp.objective)]
    for i in range(m):
        lines.append(fmt(list(lp.eq_matrix[i]) + [lp.eq_rhs[i]]))
    lines.append(fmt(lp.lower_bounds))
    lines.append(fmt(lp.upper_bounds))
    return "\n".join(lines) + "\n"
