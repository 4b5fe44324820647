"""Dense simplex for the small coverage LPs, plus a vertex-enumeration check.

The solver maximizes c·x subject to Ax <= b and 0 <= x <= u.  Upper
bounds are folded in as explicit rows, leaving a standard-form tableau
whose slack basis is feasible because every right-hand side here is
nonnegative.  Pivoting uses Bland's rule, so degenerate LPs cannot cycle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, KindError, PreconditionError

RESIDUAL_TOL = 1e-9
PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class DenseLp:
    c: np.ndarray       # objective (maximize)
    a: np.ndarray       # m x n rows, sense <=
    b: np.ndarray
    upper: np.ndarray   # per-variable upper bounds, >= 0

    def __post_init__(self):
        if (self.b < 0).any():
            raise PreconditionError("right-hand sides must be nonnegative")
        if (self.upper < 0).any():
            raise PreconditionError("variable bounds must be nonnegative")


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    value: float
    status: str


def solve(lp: DenseLp) -> LpSolution:
    """Bounded-variable simplex (bounds as rows) with Bland's rule."""
    n = len(lp.c)
    a = np.vstack([lp.a.reshape(-1, n), np.eye(n)])
    b = np.concatenate([lp.b, lp.upper])
    m = len(b)
    # Tableau: columns [x | slacks | rhs]; start at the slack basis x=0.
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -lp.c
    basis = list(range(n, n + m))
    while True:
        enter = -1
        for j in range(n + m):  # Bland: smallest eligible index
            if tab[m, j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, np.inf
        for i in range(m):
            if tab[i, enter] > PIVOT_TOL:
                ratio = tab[i, -1] / tab[i, enter]
                if ratio < best - PIVOT_TOL or (
                    abs(ratio - best) <= PIVOT_TOL
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    leave, best = i, ratio
        if leave < 0:
            raise InvariantError("LP unbounded; impossible with box constraints")
        pivot = tab[leave, enter]
        tab[leave] /= pivot
        for i in range(m + 1):
            if i != leave and tab[i, enter] != 0.0:
                tab[i] -= tab[i, enter] * tab[leave]
        basis[leave] = enter
    x = np.zeros(n + m)
    for i, j in enumerate(basis):
        x[j] = tab[i, -1]
    xsol = x[:n]
    residuals = a @ xsol - b
    if residuals.max(initial=0.0) > RESIDUAL_TOL or xsol.min(initial=0.0) < -RESIDUAL_TOL:
        raise InvariantError("simplex solution violates feasibility tolerance")
    return LpSolution(xsol, float(lp.c @ xsol), "optimal")


def vertex_enumeration_value(lp: DenseLp):
    """Brute-force optimum over all basic feasible points (n <= 8).

    Enumerates every choice of n active constraints among the rows, the
    upper bounds, and the nonnegativity facets, keeping the best feasible
    intersection point.
    """
    n = len(lp.c)
    if n > 8:
        raise PreconditionError("vertex enumeration capped at 8 variables")
    rows = np.vstack([lp.a.reshape(-1, n), np.eye(n), -np.eye(n)])
    rhs = np.concatenate([lp.b, lp.upper, np.zeros(n)])
    combos = np.array(list(itertools.combinations(range(len(rows)), n)))
    mats = rows[combos]                      # (k, n, n)
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-10
    if not ok.any():
        return 0.0, np.zeros(n)
    sols = np.linalg.solve(mats[ok], rhs[combos[ok]][..., None])[..., 0]
    feas = (sols @ rows.T <= rhs + 1e-9).all(axis=1)
    if not feas.any():
        raise InvariantError("no feasible vertex found; x=0 should be feasible")
    vals = sols @ lp.c
    vals[~feas] = -np.inf
    best = int(np.argmax(vals))
    return float(vals[best]), sols[best]


def build_coverage_lp(inst):
    """The coverage relaxation: max sum_j y_j with
    y_j <= sum_{i: j in A_i} x_i, y_j <= 1, x_i <= p, x in the compact
    matroid polytope (cardinality row for uniform, per-block rows for
    partition)."""
    from .objectives import Coverage

    if not isinstance(inst.objective, Coverage):
        raise KindError("coverage LP needs a coverage objective")
    sys = inst.system
    if sys.kind != "matroid" or not sys.matroid.is_base_view:
        raise KindError("coverage LP supports uniform/partition matroid systems")
    fam = sys.matroid.family
    n_x = len(sys.ground)
    n_u = inst.objective.universe
    n = n_x + n_u
    rows, rhs = [], []
    for j in range(n_u):
        row = np.zeros(n)
        row[n_x + j] = 1.0
        for i, e in enumerate(sys.ground):
            if j in inst.objective.sets[e]:
                row[i] = -1.0
        rows.append(row)
        rhs.append(0.0)
    if fam.kind == "uniform":
        row = np.zeros(n)
        row[:n_x] = 1.0
        rows.append(row)
        rhs.append(float(fam.r))
    elif fam.kind == "partition":
        for blk, cap in zip(fam.blocks, fam.caps):
            row = np.zeros(n)
            for i, e in enumerate(sys.ground):
                if e in blk:
                    row[i] = 1.0
            rows.append(row)
            rhs.append(float(cap))
    else:
        raise KindError("coverage LP supports uniform/partition matroid systems")
    c = np.concatenate([np.zeros(n_x), np.ones(n_u)])
    upper = np.concatenate([np.full(n_x, inst.p), np.ones(n_u)])
    lp = DenseLp(c, np.array(rows), np.array(rhs), upper)
    return lp, {"n_x": n_x, "n_y": n_u}


def random_lp(rng, n_vars: int | None = None, n_rows: int | None = None) -> DenseLp:
    """Random bounded LP with a feasible origin (b >= 0), for solver checks."""
    n = int(rng.integers(2, 9)) if n_vars is None else n_vars
    if n_rows is None:
        # Keep the cross-check cheap: vertex enumeration looks at
        # C(m + 2n, n) bases, so allow fewer rows as n grows.
        m = 1 + int(rng.integers(0, max(1, 9 - n)))
    else:
        m = n_rows
    a = rng.normal(size=(m, n))
    b = np.abs(rng.normal(size=m)) + 0.1
    upper = rng.uniform(0.2, 2.0, size=n)
    c = rng.normal(size=n)
    return DenseLp(c, a, b, upper)


def dump(lp: DenseLp) -> str:
    """Plain textual rendering of the LP, for debugging."""
    lines = ["max " + " + ".join(f"{ci:g}*x{i}" for i, ci in enumerate(lp.c) if ci)]
    for row, bi in zip(lp.a, lp.b):
        terms = " + ".join(f"{aij:g}*x{j}" for j, aij in enumerate(row) if aij)
        lines.append(f"  {terms or '0'} <= {bi:g}")
    for i, ui in enumerate(lp.upper):
        lines.append(f"  0 <= x{i} <= {ui:g}")
    return "\n".join(lines)
