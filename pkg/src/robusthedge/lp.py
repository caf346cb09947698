"""Exact rational linear programming.

Two-phase primal simplex over ``Fraction`` entries with Bland's
anti-cycling pivot rule. Deterministic for a fixed input, terminates on
every instance, and returns exact optimality certificates: the primal
point, per-constraint dual multipliers, and (when unbounded) an
improving ray. No floating point anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import CapacityError

Vector = Tuple[Fraction, ...]
# (coefficients, relation, rhs); relation is one of "<=", "=", ">="
Constraint = Tuple[Sequence[Fraction], str, Fraction]

MAX_PIVOTS = 200_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    sense: str  # "min" or "max"
    objective: Vector
    constraints: Tuple[Constraint, ...]
    # per-variable (lower, upper); None means unbounded on that side.
    bounds: Tuple[Tuple[Optional[Fraction], Optional[Fraction]], ...]

    @staticmethod
    def build(sense, objective, constraints, bounds=None) -> "LinearProgram":
        objective = tuple(Fraction(c) for c in objective)
        n = len(objective)
        rows = []
        for coeffs, rel, rhs in constraints:
            coeffs = tuple(Fraction(c) for c in coeffs)
            if len(coeffs) != n:
                raise ValueError("constraint width differs from objective width")
            if rel not in ("<=", "=", ">="):
                raise ValueError(f"bad relation {rel!r}")
            rows.append((coeffs, rel, Fraction(rhs)))
        if bounds is None:
            bounds = tuple((None, None) for _ in range(n))
        else:
            bounds = tuple(
                (None if lo is None else Fraction(lo),
                 None if hi is None else Fraction(hi))
                for lo, hi in bounds
            )
            if len(bounds) != n:
                raise ValueError("bounds width differs from objective width")
        if sense not in ("min", "max"):
            raise ValueError(f"bad sense {sense!r}")
        return LinearProgram(sense, objective, tuple(rows), bounds)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Optional[Fraction] = None
    primal: Optional[Vector] = None
    duals: Optional[Vector] = None  # one multiplier per constraint row
    ray: Optional[Vector] = None  # improving direction when unbounded


def solve(lp: LinearProgram, max_pivots: int = MAX_PIVOTS) -> LpOutcome:
    """Solve an exact LP; see LpOutcome for the certificate contract."""
    if lp.sense == "max":
        flipped = LinearProgram(
            "min", tuple(-c for c in lp.objective), lp.constraints, lp.bounds)
        out = solve(flipped, max_pivots)
        if out.status == OPTIMAL:
            return LpOutcome(OPTIMAL, -out.value, out.primal,
                             tuple(-d for d in out.duals), None)
        return out

    n = len(lp.objective)

    # Substitute every variable by nonnegatives. transforms[j] describes how
    # to recover x_j from the standard variables.
    transforms = []  # (kind, y_index, constant)
    n_y = 0
    extra_rows: List[Tuple[List[Fraction], str, Fraction]] = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            if hi is not None and hi < lo:
                return LpOutcome(INFEASIBLE)
            transforms.append(("shift", n_y, lo))
            if hi is not None:
                extra_rows.append((("ub", n_y), "<=", hi - lo))
            n_y += 1
        elif hi is not None:
            transforms.append(("neg", n_y, hi))
            n_y += 1
        else:
            transforms.append(("split", n_y, Fraction(0)))
            n_y += 2

    def to_y_row(coeffs: Sequence[Fraction], rhs: Fraction):
        """Rewrite a row over x as a row over y, shifting the rhs."""
        yrow = [Fraction(0)] * n_y
        for j, a in enumerate(coeffs):
            if a == 0:
                continue
            kind, k, const = transforms[j]
            if kind == "shift":
                yrow[k] += a
                rhs -= a * const
            elif kind == "neg":
                yrow[k] -= a
                rhs -= a * const
            else:
                yrow[k] += a
                yrow[k + 1] -= a
        return yrow, rhs

    std_rows: List[List[Fraction]] = []
    std_rels: List[str] = []
    std_rhs: List[Fraction] = []
    for coeffs, rel, rhs in lp.constraints:
        yrow, adj = to_y_row(coeffs, rhs)
        std_rows.append(yrow)
        std_rels.append(rel)
        std_rhs.append(adj)
    for marker, rel, rhs in extra_rows:
        yrow = [Fraction(0)] * n_y
        yrow[marker[1]] = Fraction(1)
        std_rows.append(yrow)
        std_rels.append(rel)
        std_rhs.append(rhs)

    m = len(std_rows)
    n_slack = sum(1 for r in std_rels if r != "=")
    n_cols = n_y + n_slack + m  # structural + slack + artificial

    # Assemble the tableau: [A | b] with slack and artificial identity blocks.
    tab: List[List[Fraction]] = []
    flipped_rows = [False] * m
    slack_col = n_y
    for i in range(m):
        row = std_rows[i] + [Fraction(0)] * (n_slack + m) + [std_rhs[i]]
        if std_rels[i] == "<=":
            row[slack_col] = Fraction(1)
            slack_col += 1
        elif std_rels[i] == ">=":
            row[slack_col] = Fraction(-1)
            slack_col += 1
        if row[-1] < 0:
            flipped_rows[i] = True
            row = [-v for v in row]
        row[n_y + n_slack + i] = Fraction(1)
        tab.append(row)

    basis = [n_y + n_slack + i for i in range(m)]
    artificial_start = n_y + n_slack
    pivots = 0

    def reduced_costs(costs: List[Fraction]) -> List[Fraction]:
        r = list(costs) + [Fraction(0)]
        for i, b in enumerate(basis):
            cb = costs[b]
            if cb != 0:
                row = tab[i]
                for j in range(n_cols + 1):
                    if row[j] != 0:
                        r[j] -= cb * row[j]
        return r

    def pivot(p: int, q: int, r: List[Fraction]) -> None:
        nonlocal pivots
        pivots += 1
        if pivots > max_pivots:
            raise CapacityError(f"simplex exceeded {max_pivots} pivots")
        piv = tab[p][q]
        if piv != 1:
            tab[p] = [v / piv if v else v for v in tab[p]]
        prow = tab[p]
        for i in range(m):
            if i != p and tab[i][q] != 0:
                f = tab[i][q]
                tab[i] = [v - f * w if w else v for v, w in zip(tab[i], prow)]
        if r[q] != 0:
            f = r[q]
            for j in range(n_cols + 1):
                if prow[j]:
                    r[j] -= f * prow[j]
        basis[p] = q

    # Dantzig's rule for speed until the fallback threshold, then Bland's
    # rule, which cannot cycle; the switch point is deterministic.
    bland_after = 16 * (m + n_cols)

    def run_simplex(r: List[Fraction], barred: int) -> Optional[int]:
        """Pivot to optimality; returns the entering column if unbounded."""
        while True:
            q = None
            if pivots < bland_after:
                best_rc = Fraction(0)
                for j in range(barred):
                    if r[j] < best_rc:
                        best_rc, q = r[j], j
            else:
                q = next((j for j in range(barred) if r[j] < 0), None)
            if q is None:
                return None
            best, best_ratio = None, None
            for i in range(m):
                if tab[i][q] > 0:
                    ratio = tab[i][-1] / tab[i][q]
                    if (best is None or ratio < best_ratio
                            or (ratio == best_ratio and basis[i] < basis[best])):
                        best, best_ratio = i, ratio
            if best is None:
                return q
            pivot(best, q, r)

    # Phase 1: drive the artificials to zero.
    phase1_costs = [Fraction(0)] * (n_y + n_slack) + [Fraction(1)] * m
    r1 = reduced_costs(phase1_costs)
    if run_simplex(r1, artificial_start) is not None:
        raise AssertionError("phase-1 objective is bounded below by zero")
    if sum(tab[i][-1] for i in range(m) if basis[i] >= artificial_start) > 0:
        return LpOutcome(INFEASIBLE)
    # Pivot remaining zero-level artificials out of the basis when possible.
    for i in range(m):
        if basis[i] >= artificial_start:
            q = next((j for j in range(artificial_start) if tab[i][j] != 0), None)
            if q is not None:
                pivot(i, q, r1)

    # Phase 2: the real objective, written over the y variables.
    phase2_costs = [Fraction(0)] * n_cols
    const_part = Fraction(0)
    for j, c in enumerate(lp.objective):
        if c == 0:
            continue
        kind, k, const = transforms[j]
        if kind == "shift":
            phase2_costs[k] += c
            const_part += c * const
        elif kind == "neg":
            phase2_costs[k] -= c
            const_part += c * const
        else:
            phase2_costs[k] += c
            phase2_costs[k + 1] -= c
    r2 = reduced_costs(phase2_costs)
    entering = run_simplex(r2, artificial_start)

    if entering is not None:
        ray_y = [Fraction(0)] * n_y
        if entering < n_y:
            ray_y[entering] = Fraction(1)
        for i in range(m):
            if basis[i] < n_y:
                ray_y[basis[i]] -= tab[i][entering]
        return LpOutcome(UNBOUNDED, ray=_from_y(ray_y, transforms, homogeneous=True))

    y_vals = [Fraction(0)] * n_y
    for i in range(m):
        if basis[i] < n_y:
            y_vals[basis[i]] = tab[i][-1]
    primal = _from_y(y_vals, transforms, homogeneous=False)
    value = sum((c * x for c, x in zip(lp.objective, primal)), Fraction(0))

    # Row duals read off the artificial columns: r2[art_i] = -y_i.
    duals = []
    for i in range(len(lp.constraints)):
        d = -r2[artificial_start + i]
        if flipped_rows[i]:
            d = -d
        duals.append(d)
    return LpOutcome(OPTIMAL, value, primal, tuple(duals), None)


def _from_y(y_vals, transforms, homogeneous: bool) -> Vector:
    out = []
    for kind, k, const in transforms:
        if kind == "shift":
            x = y_vals[k] + (0 if homogeneous else const)
        elif kind == "neg":
            x = -y_vals[k] + (0 if homogeneous else const)
        else:
            x = y_vals[k] - y_vals[k + 1]
        out.append(x)
    return tuple(out)


def verify_optimal(lp: LinearProgram, out: LpOutcome) -> bool:
    """Exact KKT check of an optimal outcome in the original variables.

    Confirms primal feasibility row by row, dual sign conditions, reduced
    cost signs against active bounds, complementary slackness, and exact
    equality of primal and dual objective values. No tolerances.
    """
    if out.status != OPTIMAL:
        return False
    if lp.sense == "max":
        flipped = LinearProgram(
            "min", tuple(-c for c in lp.objective), lp.constraints, lp.bounds)
        neg = LpOutcome(OPTIMAL, -out.value, out.primal,
                        tuple(-d for d in out.duals), None)
        return verify_optimal(flipped, neg)

    x = out.primal
    y = out.duals
    for (coeffs, rel, rhs), yi in zip(lp.constraints, y):
        lhs = sum((a * v for a, v in zip(coeffs, x)), Fraction(0))
        if rel == "<=" and (lhs > rhs or yi > 0):
            return False
        if rel == ">=" and (lhs < rhs or yi < 0):
            return False
        if rel == "=" and lhs != rhs:
            return False
        if yi * (lhs - rhs) != 0:  # complementary slackness
            return False
    dual_value = sum((yi * rhs for (_, _, rhs), yi in zip(lp.constraints, y)),
                     Fraction(0))
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None and x[j] < lo:
            return False
        if hi is not None and x[j] > hi:
            return False
        mu = lp.objective[j] - sum(
            (yi * coeffs[j] for (coeffs, _, _), yi in zip(lp.constraints, y)),
            Fraction(0))
        at_lo = lo is not None and x[j] == lo
        at_hi = hi is not None and x[j] == hi
        if not at_lo and not at_hi and mu != 0:
            return False
        if at_lo and not at_hi and mu < 0:
            return False
        if at_hi and not at_lo and mu > 0:
            return False
        dual_value += mu * x[j]
    primal_value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return primal_value == out.value and primal_value == dual_value


def strictly_feasible_point(
    rows: Sequence[Tuple[Sequence[Fraction], Fraction]],
    strict: Sequence[int],
) -> Optional[Vector]:
    """A point with a_i . x >= b_i on all rows, strictly on the given ones.

    Found by maximizing a common slack on the strict rows (capped at 1 to
    keep the LP bounded); returns None when the maximal slack is <= 0.
    """
    if not rows:
        return ()
    n = len(rows[0][0])
    strict_set = set(strict)
    constraints = []
    for i, (coeffs, rhs) in enumerate(rows):
        ext = tuple(coeffs) + ((Fraction(-1),) if i in strict_set else (Fraction(0),))
        constraints.append((ext, ">=", rhs))
    objective = tuple([Fraction(0)] * n + [Fraction(1)])
    bounds = tuple([(None, None)] * n + [(None, Fraction(1))])
    lp = LinearProgram.build("max", objective, constraints, bounds)
    out = solve(lp)
    if out.status != OPTIMAL or out.primal[-1] <= 0:
        return None
    return out.primal[:-1]
