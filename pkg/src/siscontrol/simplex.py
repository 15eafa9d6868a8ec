"""Bounded-variable two-phase primal simplex with Bland's rule.

Variables live in boxes [0, u_j] (u_j may be None for unbounded), which keeps
box constraints out of the tableau.  Arithmetic is exact `Fraction` by
default; float mode with a small pivot tolerance is available for inputs
whose denominators would make exact pivoting expensive.  Bland's rule makes
the exact mode terminate on every input, degenerate or not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import SolverError

_LOWER, _UPPER, _BASIC = 0, 1, 2

#: Inputs with a weight/rhs denominator above this use float mode.
EXACT_DENOMINATOR_LIMIT = 10**4


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Optional[Fraction]
    x: Optional[list]
    iterations: int


def _should_use_exact(values) -> bool:
    return all(Fraction(v).denominator <= EXACT_DENOMINATOR_LIMIT for v in values)


def solve_lp(objective: Sequence, rows: Sequence[Sequence], senses: Sequence[str],
             rhs: Sequence, upper: Sequence, *, exact: bool = True,
             max_iterations: int = 50_000) -> LpResult:
    """Minimize objective . x subject to rows {<=,>=,=} rhs, 0 <= x <= upper.

    `upper[j]` may be None for an unbounded variable.  Returns an LpResult;
    raises SolverError only if the iteration cap is hit (cannot happen in
    exact mode short of a bug, since Bland's rule forbids cycling).
    """
    num = Fraction if exact else float
    zero = num(0)
    tol = zero if exact else 1e-9

    n = len(objective)
    m = len(rows)
    cost = [num(c) for c in objective]
    ub: list = [None if u is None else num(u) for u in upper]
    mat = [[num(v) for v in row] for row in rows]
    b = [num(v) for v in rhs]
    sense = list(senses)
    for i in range(m):
        if b[i] < zero:
            b[i] = -b[i]
            mat[i] = [-v for v in mat[i]]
            sense[i] = {"<=": ">=", ">=": "<=", "=": "="}[sense[i]]

    # Augment with slack/surplus and artificial columns.
    total = n
    col_kind = ["x"] * n
    basis = [-1] * m
    for i in range(m):
        if sense[i] == "<=":
            for r in range(m):
                mat[r].append(num(1) if r == i else zero)
            ub.append(None)
            col_kind.append("s")
            basis[i] = total
            total += 1
        elif sense[i] == ">=":
            for r in range(m):
                mat[r].append(num(-1) if r == i else zero)
            ub.append(None)
            col_kind.append("s")
            total += 1
    for i in range(m):
        if basis[i] == -1:
            for r in range(m):
                mat[r].append(num(1) if r == i else zero)
            ub.append(None)
            col_kind.append("a")
            basis[i] = total
            total += 1

    status = [_LOWER] * total
    for i in range(m):
        status[basis[i]] = _BASIC
    values = list(b)  # basic variable values (all nonbasic start at 0)
    iterations = 0

    def reduced_costs(c_full):
        d = list(c_full)
        obj = zero
        for i in range(m):
            cb = c_full[basis[i]]
            obj += cb * values[i]
            if cb != zero:
                row = mat[i]
                for j in range(total):
                    d[j] -= cb * row[j]
        for j in range(total):
            if status[j] == _UPPER:
                obj += c_full[j] * ub[j]
        return d, obj

    def run(c_full, allowed):
        nonlocal iterations
        d, obj = reduced_costs(c_full)
        while True:
            iterations += 1
            if iterations > max_iterations:
                raise SolverError("simplex iteration cap exceeded",
                                  {"iterations": iterations})
            enter = -1
            direction = 1
            for j in range(total):
                if status[j] == _BASIC or not allowed[j]:
                    continue
                if ub[j] is not None and ub[j] == zero:
                    continue  # fixed variable, can never move
                if status[j] == _LOWER and d[j] < -tol:
                    enter, direction = j, 1
                    break
                if status[j] == _UPPER and d[j] > tol:
                    enter, direction = j, -1
                    break
            if enter == -1:
                return "optimal", d, obj

            # Ratio test over basic rows plus the entering variable's own box.
            # leave_row == -1 with finite t_best means a bound flip.
            t_best = ub[enter]
            leave_row, leave_to = -1, None
            for i in range(m):
                coef = direction * mat[i][enter]
                if coef > tol:
                    t = values[i] / coef
                    hit = _LOWER
                elif coef < -tol and ub[basis[i]] is not None:
                    t = (ub[basis[i]] - values[i]) / (-coef)
                    hit = _UPPER
                else:
                    continue
                if t_best is None or t < t_best:
                    t_best, leave_row, leave_to = t, i, hit
                elif t == t_best and leave_row != -1 and basis[i] < basis[leave_row]:
                    leave_row, leave_to = i, hit
            if t_best is None:
                return "unbounded", d, obj

            step = direction * t_best
            obj += d[enter] * step
            if leave_row == -1:
                # bound flip: the entering variable crosses its own box
                for i in range(m):
                    values[i] -= step * mat[i][enter]
                status[enter] = _UPPER if direction == 1 else _LOWER
                continue

            col = [mat[i][enter] for i in range(m)]
            for i in range(m):
                values[i] -= step * col[i]
            new_value = t_best if direction == 1 else ub[enter] - t_best
            leaving = basis[leave_row]
            status[leaving] = leave_to
            status[enter] = _BASIC
            basis[leave_row] = enter
            values[leave_row] = new_value

            piv = mat[leave_row][enter]
            inv = num(1) / piv
            mat[leave_row] = [v * inv for v in mat[leave_row]]
            pivot_row = mat[leave_row]
            for i in range(m):
                if i != leave_row and mat[i][enter] != zero:
                    f = mat[i][enter]
                    mat[i] = [v - f * p for v, p in zip(mat[i], pivot_row)]
            if d[enter] != zero:
                f = d[enter]
                for j in range(total):
                    d[j] -= f * pivot_row[j]

    # Phase 1: minimize the sum of artificials.
    has_artificial = any(kind == "a" for kind in col_kind)
    if has_artificial:
        phase1_cost = [num(1) if kind == "a" else zero for kind in col_kind]
        allowed = [True] * total
        state, _, obj1 = run(phase1_cost, allowed)
        if state != "optimal" or (obj1 > tol if not exact else obj1 > zero):
            return LpResult("infeasible", None, None, iterations)
        # Drive artificials out of the basis (or drop redundant rows).
        drop = []
        for i in range(m):
            if col_kind[basis[i]] != "a":
                continue
            pivoted = False
            for j in range(total):
                if col_kind[j] != "a" and status[j] != _BASIC and (
                        mat[i][j] > tol or mat[i][j] < -tol):
                    new_value = ub[j] if status[j] == _UPPER else num(0)
                    piv = mat[i][j]
                    inv = num(1) / piv
                    mat[i] = [v * inv for v in mat[i]]
                    pivot_row = mat[i]
                    for r in range(m):
                        if r != i and mat[r][j] != zero:
                            f = mat[r][j]
                            mat[r] = [v - f * p for v, p in zip(mat[r], pivot_row)]
                    status[basis[i]] = _LOWER
                    status[j] = _BASIC
                    values[i] = new_value  # the solution itself is unchanged
                    basis[i] = j
                    pivoted = True
                    break
            if not pivoted:
                drop.append(i)
        for i in reversed(drop):
            del mat[i], basis[i], values[i]
            m -= 1

    # Phase 2: original objective, artificials banned.
    phase2_cost = cost + [zero] * (total - n)
    allowed = [kind != "a" for kind in col_kind]
    state, _, obj = run(phase2_cost, allowed)
    if state != "optimal":
        return LpResult(state, None, None, iterations)
    x = []
    for j in range(n):
        if status[j] == _BASIC:
            x.append(values[basis.index(j)])
        elif status[j] == _UPPER:
            x.append(ub[j])
        else:
            x.append(num(0))
    return LpResult("optimal", obj, x, iterations)
