"""Solver-adapter tests: toy programs with known optima and status mapping."""

import cvxpy as cp
import numpy as np
import pytest

from irs_isac.conic import (
    ConeProgram,
    ConicError,
    SolveStatus,
    psd_constraint,
    solve_or_raise,
)


class TestScalarPrograms:
    def test_simple_bound(self):
        x = cp.Variable()
        sol = ConeProgram().minimize(x).add(x >= 3).solve()
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.objective == pytest.approx(3.0, abs=1e-7)

    def test_infeasible(self):
        x = cp.Variable()
        sol = ConeProgram().minimize(x).add(x >= 1, x <= 0).solve()
        assert sol.status is SolveStatus.INFEASIBLE

    def test_unbounded(self):
        x = cp.Variable()
        sol = ConeProgram().minimize(x).add(x <= 0).solve()
        assert sol.status is SolveStatus.UNBOUNDED

    def test_solve_or_raise(self):
        x = cp.Variable()
        with pytest.raises(ConicError) as err:
            solve_or_raise(ConeProgram().minimize(x).add(x >= 1, x <= 0))
        assert err.value.status is SolveStatus.INFEASIBLE


class TestHermitianVar:
    def test_order_one_scalar(self):
        prog = ConeProgram()
        x = prog.hermitian_psd_var(1)
        prog.minimize(cp.real(x.expr[0, 0])).add(cp.real(x.expr[0, 0]) >= 2)
        sol = prog.solve()
        assert sol.ok
        assert x.value[0, 0].real == pytest.approx(2.0, abs=1e-6)
        assert abs(x.value[0, 0].imag) < 1e-8

    def test_trace_constrained_rank_one_max(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        p0 = 2.5
        prog = ConeProgram()
        x = prog.hermitian_psd_var(3)
        prog.maximize(cp.real(a.conj() @ x.expr @ a)).add(
            cp.real(cp.trace(x.expr)) <= p0
        )
        sol = prog.solve()
        assert sol.ok
        assert sol.objective == pytest.approx(
            p0 * np.linalg.norm(a) ** 2, rel=1e-6
        )

    def test_psd_feasible_fixed_matrix(self):
        target = np.array([[1.0, 1j], [-1j, 1.0]])  # eigenvalues 0, 2
        prog = ConeProgram()
        x = prog.hermitian_psd_var(2)
        prog.minimize(cp.Constant(0.0)).add(x.expr == target)
        sol = prog.solve()
        assert sol.ok
        np.testing.assert_allclose(x.value, target, atol=1e-6)

    def test_psd_infeasible_fixed_matrix(self):
        target = np.array([[1.0, 2j], [-2j, 1.0]])  # eigenvalues -1, 3
        prog = ConeProgram()
        x = prog.hermitian_psd_var(2)
        prog.minimize(cp.Constant(0.0)).add(x.expr == target)
        sol = prog.solve()
        assert sol.status is SolveStatus.INFEASIBLE

    def test_value_before_solve_rejected(self):
        prog = ConeProgram()
        x = prog.hermitian_psd_var(2)
        with pytest.raises(ValueError):
            _ = x.value


class TestPsdConstraintOnExpression:
    def test_loewner_ordering(self):
        # find the smallest t with t*I >= H in the PSD order: t = lambda_max
        rng = np.random.default_rng(1)
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h = g + g.conj().T
        t = cp.Variable()
        prog = ConeProgram().minimize(t)
        prog.add(psd_constraint(t * np.eye(3) - h))
        sol = prog.solve()
        assert sol.ok
        assert sol.objective == pytest.approx(
            float(np.linalg.eigvalsh(h)[-1]), rel=1e-6
        )


class TestDeterminism:
    def test_repeat_solve_matches(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        values = []
        for _ in range(2):
            prog = ConeProgram()
            x = prog.hermitian_psd_var(4)
            prog.maximize(cp.real(a.conj() @ x.expr @ a)).add(
                cp.real(cp.trace(x.expr)) <= 1.0
            )
            values.append(prog.solve().objective)
        assert abs(values[0] - values[1]) < 1e-9
