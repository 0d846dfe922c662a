"""Thin cone-program adapter over cvxpy.

Every convex subproblem in the package goes through this seam so solver
choice, tolerances, and the complex-to-real PSD embedding live in one place.
Complex Hermitian PSD variables and constraints are modeled explicitly via
the real embedding [[Re, -Im], [Im, Re]] >= 0, which is exact.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from enum import Enum

import cvxpy as cp
import numpy as np

DEFAULT_TOL = 1e-8


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_LIMIT = "numerical_limit"


class ConicError(RuntimeError):
    """A subproblem did not return a usable solution."""

    def __init__(self, status: SolveStatus, message: str = ""):
        self.status = status
        super().__init__(message or f"cone program ended with status {status.value}")


@dataclass(frozen=True)
class ConicSolution:
    status: SolveStatus
    objective: float | None
    solve_time: float

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


class HermitianVar:
    """Complex Hermitian matrix variable backed by two real blocks.

    The PSD constraint on the complex matrix is enforced through the real
    embedding; `expr` is the complex cvxpy expression, `value` the solved
    complex matrix.
    """

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self._re = cp.Variable((order, order), symmetric=True)
        self._im = cp.Variable((order, order))
        self.expr = self._re + 1j * self._im
        self.structure_constraints = [self._im == -self._im.T]

    def psd_constraint(self):
        return cp.bmat([[self._re, -self._im], [self._im, self._re]]) >> 0

    @property
    def value(self) -> np.ndarray:
        if self._re.value is None:
            raise ValueError("variable has no value; solve the program first")
        v = self._re.value + 1j * self._im.value
        return 0.5 * (v + v.conj().T)


def psd_constraint(expr):
    """Real-embedding PSD constraint for a complex Hermitian cvxpy expression."""
    re, im = cp.real(expr), cp.imag(expr)
    return cp.bmat([[re, -im], [im, re]]) >> 0


class ConeProgram:
    """Accumulates objective/constraints and solves with a pinned backend."""

    def __init__(self):
        self._objective = None
        self._constraints: list = []

    def minimize(self, expr) -> "ConeProgram":
        self._objective = cp.Minimize(expr)
        return self

    def maximize(self, expr) -> "ConeProgram":
        self._objective = cp.Maximize(expr)
        return self

    def add(self, *constraints) -> "ConeProgram":
        for c in constraints:
            if isinstance(c, (list, tuple)):
                self._constraints.extend(c)
            else:
                self._constraints.append(c)
        return self

    def hermitian_psd_var(self, order: int) -> HermitianVar:
        var = HermitianVar(order)
        self.add(var.structure_constraints)
        self.add(var.psd_constraint())
        return var

    def solve(self, tol: float = DEFAULT_TOL) -> ConicSolution:
        if self._objective is None:
            raise ValueError("no objective set")
        problem = cp.Problem(self._objective, self._constraints)
        start = time.perf_counter()
        status = self._solve_with_fallback(problem, tol)
        elapsed = time.perf_counter() - start
        objective = (
            float(problem.value)
            if status is SolveStatus.OPTIMAL and problem.value is not None
            else None
        )
        return ConicSolution(status=status, objective=objective, solve_time=elapsed)

    @staticmethod
    def _solve_with_fallback(problem: cp.Problem, tol: float) -> SolveStatus:
        # inaccurate solves are surfaced through the mapped status instead
        warnings.filterwarnings(
            "ignore", message="Solution may be inaccurate", category=UserWarning
        )
        try:
            problem.solve(
                solver=cp.CLARABEL,
                tol_gap_abs=tol,
                tol_gap_rel=tol,
                tol_feas=tol,
            )
            status = _map_status(problem.status)
        except cp.error.SolverError:
            status = SolveStatus.NUMERICAL_LIMIT
        if status is SolveStatus.NUMERICAL_LIMIT:
            try:
                problem.solve(solver=cp.SCS, eps=max(tol, 1e-9), max_iters=100_000)
            except cp.error.SolverError as exc:
                raise ConicError(
                    SolveStatus.NUMERICAL_LIMIT, f"all backends failed: {exc}"
                ) from exc
            status = _map_status(problem.status)
        return status


def _map_status(status: str | None) -> SolveStatus:
    if status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        return SolveStatus.OPTIMAL
    if status == cp.INFEASIBLE:
        return SolveStatus.INFEASIBLE
    if status == cp.UNBOUNDED:
        return SolveStatus.UNBOUNDED
    return SolveStatus.NUMERICAL_LIMIT


def solve_or_raise(program: ConeProgram, tol: float = DEFAULT_TOL) -> ConicSolution:
    """Solve and convert any non-optimal terminal status into ConicError."""
    solution = program.solve(tol)
    if not solution.ok:
        raise ConicError(solution.status)
    return solution
