"""Small conic solver kernel: maximize one variable under convex constraints.

Every block update in this package reduces to the same shape of problem:
maximize a designated scalar variable subject to affine inequalities, convex
quadratic inequalities, norm balls and variable boxes. This module lifts that
description to a second-order cone program and solves it with Clarabel,
re-checking feasibility of the returned point independently of the solver's
own bookkeeping. Callers are expected to pre-scale constraints to O(1).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import clarabel
import numpy as np
from scipy import sparse


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class SolverSettings:
    feasibility_tol: float = 1e-9    # residual bound re-checked on the returned point
    optimality_tol: float = 1e-8     # duality gap target handed to the solver
    max_iterations: int = 200


@dataclass
class SolveResult:
    status: SolveStatus
    x: np.ndarray | None
    objective: float
    detail: str = ""


@dataclass
class _Affine:
    coeffs: np.ndarray
    offset: float


@dataclass
class _Quadratic:
    factor: np.ndarray   # (p, n); constraint is 0.5 ||factor x||^2 + linear.x + offset <= 0
    linear: np.ndarray
    offset: float


@dataclass
class _NormBall:
    matrix: np.ndarray   # (p, n); constraint is ||matrix x + offset|| <= radius
    offset: np.ndarray
    radius: float


@dataclass
class ConicProgram:
    """Maximize x[objective_index] under the recorded convex constraints."""

    n_vars: int
    objective_index: int
    affine: list[_Affine] = field(default_factory=list)
    quadratics: list[_Quadratic] = field(default_factory=list)
    norm_balls: list[_NormBall] = field(default_factory=list)
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        if not (0 <= self.objective_index < self.n_vars):
            raise ValueError("objective index out of range")
        if self.lower is None:
            self.lower = np.full(self.n_vars, -np.inf)
        if self.upper is None:
            self.upper = np.full(self.n_vars, np.inf)

    def add_affine(self, coeffs, offset: float) -> None:
        """coeffs . x + offset <= 0"""
        self.affine.append(_Affine(np.asarray(coeffs, dtype=float), float(offset)))

    def add_quadratic(self, factor, linear, offset: float) -> None:
        """0.5 ||factor x||^2 + linear . x + offset <= 0 (factor may have 0 rows)."""
        factor = np.atleast_2d(np.asarray(factor, dtype=float))
        linear = np.asarray(linear, dtype=float)
        if factor.size == 0 or not factor.any():
            self.add_affine(linear, offset)
            return
        self.quadratics.append(_Quadratic(factor, linear, float(offset)))

    def add_quadratic_matrix(self, q_matrix, linear, offset: float,
                             eig_floor: float = 1e-12) -> None:
        """Same constraint from a PSD matrix: 0.5 x^T Q x + linear.x + offset <= 0."""
        q_matrix = np.asarray(q_matrix, dtype=float)
        vals, vecs = np.linalg.eigh(0.5 * (q_matrix + q_matrix.T))
        top = float(vals.max(initial=0.0))
        if vals.min(initial=0.0) < -1e-9 * max(top, 1.0):
            raise ValueError("quadratic constraint matrix is not PSD")
        keep = vals > eig_floor * max(top, 1.0)
        factor = (np.sqrt(vals[keep])[:, None] * vecs[:, keep].T)
        self.add_quadratic(factor, linear, offset)

    def add_norm_ball(self, matrix, offset, radius: float) -> None:
        """||matrix x + offset|| <= radius"""
        if radius < 0:
            raise ValueError("norm ball radius must be nonnegative")
        self.norm_balls.append(_NormBall(np.atleast_2d(np.asarray(matrix, dtype=float)),
                                         np.atleast_1d(np.asarray(offset, dtype=float)),
                                         float(radius)))

    def set_box(self, index: int, lower: float, upper: float) -> None:
        self.lower[index] = lower
        self.upper[index] = upper

    # --- feasibility bookkeeping ------------------------------------------

    def max_violation(self, x: np.ndarray) -> float:
        """Largest relative constraint violation at x, 0 when feasible.

        Each violation is divided by the magnitude of the constraint's own
        terms (floored at 1) so the tolerance means the same number of
        digits regardless of how a constraint happens to be scaled.
        """
        worst = 0.0
        for con in self.affine:
            scale = max(1.0, float(np.abs(con.coeffs * x).sum()) + abs(con.offset))
            worst = max(worst, (con.coeffs @ x + con.offset) / scale)
        for con in self.quadratics:
            quad = 0.5 * float(((con.factor @ x) ** 2).sum())
            lin = float(con.linear @ x)
            scale = max(1.0, quad + abs(lin) + abs(con.offset))
            worst = max(worst, (quad + lin + con.offset) / scale)
        for con in self.norm_balls:
            scale = max(1.0, con.radius)
            norm = float(np.linalg.norm(con.matrix @ x + con.offset))
            worst = max(worst, (norm - con.radius) / scale)
        finite_lo = np.isfinite(self.lower)
        finite_hi = np.isfinite(self.upper)
        if finite_lo.any():
            scale = np.maximum(1.0, np.abs(self.lower[finite_lo]))
            worst = max(worst, float(((self.lower[finite_lo] - x[finite_lo]) / scale).max()))
        if finite_hi.any():
            scale = np.maximum(1.0, np.abs(self.upper[finite_hi]))
            worst = max(worst, float(((x[finite_hi] - self.upper[finite_hi]) / scale).max()))
        return float(worst)

    def dump(self, path) -> None:
        """Debug dump of the full problem to a JSON file."""
        doc = {
            "n_vars": self.n_vars,
            "objective_index": self.objective_index,
            "affine": [{"coeffs": c.coeffs.tolist(), "offset": c.offset}
                       for c in self.affine],
            "quadratics": [{"factor": c.factor.tolist(), "linear": c.linear.tolist(),
                            "offset": c.offset} for c in self.quadratics],
            "norm_balls": [{"matrix": c.matrix.tolist(), "offset": c.offset.tolist(),
                            "radius": c.radius} for c in self.norm_balls],
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)


def _assemble(problem: ConicProgram):
    """Stack all constraints into Clarabel's Ax + s = b, s in K form."""
    n = problem.n_vars
    rows, offsets, cones = [], [], []

    # nonnegative block: affine rows and finite box bounds
    nn_rows, nn_off = [], []
    for con in problem.affine:
        nn_rows.append(con.coeffs)
        nn_off.append(-con.offset)
    for i in range(n):
        if np.isfinite(problem.lower[i]):
            row = np.zeros(n)
            row[i] = -1.0
            nn_rows.append(row)
            nn_off.append(-problem.lower[i])
        if np.isfinite(problem.upper[i]):
            row = np.zeros(n)
            row[i] = 1.0
            nn_rows.append(row)
            nn_off.append(problem.upper[i])
    if nn_rows:
        rows.append(np.vstack(nn_rows))
        offsets.append(np.asarray(nn_off))
        cones.append(clarabel.NonnegativeConeT(len(nn_rows)))

    for con in problem.norm_balls:
        p = con.matrix.shape[0]
        block = np.vstack([np.zeros((1, n)), -con.matrix])
        rows.append(block)
        offsets.append(np.concatenate([[con.radius], con.offset]))
        cones.append(clarabel.SecondOrderConeT(p + 1))

    for con in problem.quadratics:
        # 0.5||Fx||^2 + q.x + c <= 0 as ||(2Fx, w-1)|| <= w+1, w = -2(q.x + c)
        p = con.factor.shape[0]
        block = np.vstack([2.0 * con.linear, -2.0 * con.factor, 2.0 * con.linear])
        rows.append(block)
        offsets.append(np.concatenate([[1.0 - 2.0 * con.offset],
                                       np.zeros(p),
                                       [-1.0 - 2.0 * con.offset]]))
        cones.append(clarabel.SecondOrderConeT(p + 2))

    if not rows:
        raise ValueError("problem has no constraints; objective is unbounded")
    a_mat = sparse.csc_matrix(np.vstack(rows))
    b_vec = np.concatenate(offsets)
    return a_mat, b_vec, cones


_ACCEPT = {"Solved", "AlmostSolved"}
_INFEASIBLE = {"PrimalInfeasible", "AlmostPrimalInfeasible"}


def solve(problem: ConicProgram, settings: SolverSettings | None = None,
          warm_start: np.ndarray | None = None) -> SolveResult:
    """Maximize x[objective_index]; statuses OPTIMAL/INFEASIBLE/NUMERICAL_FAILURE.

    The returned point is re-checked against every recorded constraint; a
    solver-accepted point whose relative violation exceeds 1e3x the
    feasibility tolerance is downgraded to NUMERICAL_FAILURE so callers can
    fall back to their incumbent. Callers needing hard guarantees (power
    budgets, spacing, boxes) must re-impose them on the returned point. A
    warm start is not fed to the interior-point iteration; it serves as a
    monotone certificate: a solve that comes back below the warm start's
    objective is also downgraded.
    """
    settings = settings or SolverSettings()
    a_mat, b_vec, cones = _assemble(problem)
    q = np.zeros(problem.n_vars)
    q[problem.objective_index] = -1.0
    p_mat = sparse.csc_matrix((problem.n_vars, problem.n_vars))

    # the interior point targets feasibility_tol on its scaled residuals; the
    # re-check below measures the original constraints, where scaling and
    # cancellation can cost up to three digits, hence the wider accept band
    accept_tol = 1e3 * settings.feasibility_tol

    opts = clarabel.DefaultSettings()
    opts.verbose = False
    opts.max_iter = settings.max_iterations
    opts.tol_feas = settings.feasibility_tol
    opts.tol_gap_abs = settings.optimality_tol
    opts.tol_gap_rel = settings.optimality_tol
    opts.reduced_tol_feas = 1e-7
    opts.reduced_tol_gap_abs = 1e-7
    opts.reduced_tol_gap_rel = 1e-7

    try:
        solution = clarabel.DefaultSolver(p_mat, q, a_mat, b_vec, cones, opts).solve()
    except BaseException as exc:  # the rust extension can raise on bad data
        return SolveResult(SolveStatus.NUMERICAL_FAILURE, None, np.nan, str(exc))

    name = str(solution.status)
    if name in _INFEASIBLE:
        return SolveResult(SolveStatus.INFEASIBLE, None, np.nan, name)
    if name not in _ACCEPT:
        return SolveResult(SolveStatus.NUMERICAL_FAILURE, None, np.nan, name)

    x = np.asarray(solution.x, dtype=float)
    violation = problem.max_violation(x)
    if violation > accept_tol:
        return SolveResult(SolveStatus.NUMERICAL_FAILURE, x, np.nan,
                           f"residual {violation:.2e} above tolerance")
    objective = float(x[problem.objective_index])
    if warm_start is not None:
        reference = float(np.asarray(warm_start)[problem.objective_index])
        if objective < reference - 1e-7 * max(1.0, abs(reference)):
            return SolveResult(SolveStatus.NUMERICAL_FAILURE, x, objective,
                               "solve fell below the warm-start objective")
    return SolveResult(SolveStatus.OPTIMAL, x, objective, name)
