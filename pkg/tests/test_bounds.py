"""Closed-form bound values, their algebraic identities, and Monte Carlo checks."""

import math

import numpy as np
import pytest

from sparselqr import (
    AssumptionViolatedError,
    SystemModel,
    compute_bound_report,
    riccati_backward,
    theorem3_bound,
    theorem4_bound,
    theorem5_bound,
    verify_bounds,
)
from sparselqr.experiments import builtin_double_integrator


def stable_scalar(T=40):
    model = SystemModel(A=[[0.5]], B=[[1.0]], Q=[[1.0]], Q_T=[[1.0]], R=[[1.0]], T=T)
    return model, riccati_backward(model)


class TestClosedForms:
    def test_hand_values(self):
        assert theorem4_bound(1, 1.0, 0.0, 1.0) == 4.0
        assert theorem5_bound(1, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0) == 12.0
        assert theorem3_bound(1, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0) == 18.0

    def test_triangle_identity(self):
        # thm3 is algebraically thm4 + thm5 after expanding both products.
        rng = np.random.default_rng(4)
        for _ in range(200):
            D = int(rng.integers(0, 12))
            w = float(rng.uniform(0, 3))
            x0n = float(rng.uniform(0, 5))
            p = float(rng.uniform(1, 20))
            g = float(rng.uniform(0.05, 0.99))
            nb = float(rng.uniform(0, 4))
            lr = float(rng.uniform(0.01, 5))
            t3 = theorem3_bound(D, w, x0n, p, g, nb, lr)
            t45 = theorem4_bound(D, w, x0n, p) + theorem5_bound(D, w, x0n, p, g, nb, lr)
            assert t3 == pytest.approx(t45, rel=1e-12, abs=1e-12)

    def test_monotonicity(self):
        base4 = theorem4_bound(3, 0.5, 1.0, 2.0)
        assert theorem4_bound(4, 0.5, 1.0, 2.0) > base4
        assert theorem4_bound(3, 0.6, 1.0, 2.0) > base4
        assert theorem4_bound(3, 0.5, 1.5, 2.0) > base4
        assert theorem4_bound(3, 0.5, 1.0, 2.5) > base4
        loose = theorem5_bound(3, 0.5, 1.0, 2.0, 0.2, 1.0, 1.0)
        tight = theorem5_bound(3, 0.5, 1.0, 2.0, 0.8, 1.0, 1.0)
        assert loose > tight

    def test_zero_disturbances_zero_bound(self):
        assert theorem4_bound(0, 0.5, 1.0, 2.0) == 0.0
        assert theorem3_bound(0, 0.5, 1.0, 2.0, 0.5, 1.0, 1.0) == 0.0

    def test_argument_validation(self):
        with pytest.raises(ValueError, match="D"):
            theorem4_bound(-1, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError, match="D"):
            theorem4_bound(1.5, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError, match="w_hat"):
            theorem4_bound(1, -0.1, 0.0, 1.0)
        with pytest.raises(ValueError, match="x0_norm"):
            theorem4_bound(1, 1.0, -0.1, 1.0)
        with pytest.raises(ValueError, match="p_hat"):
            theorem4_bound(1, 1.0, 0.0, 0.99)
        with pytest.raises(AssumptionViolatedError):
            theorem5_bound(1, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)
        with pytest.raises(AssumptionViolatedError):
            theorem3_bound(1, 1.0, 1.0, 1.0, -0.2, 1.0, 1.0)
        with pytest.raises(ValueError, match="lambda_min_R"):
            theorem5_bound(1, 1.0, 1.0, 1.0, 0.5, 1.0, 0.0)
        with pytest.raises(ValueError, match="norm_B"):
            theorem5_bound(1, 1.0, 1.0, 1.0, 0.5, -1.0, 1.0)


class TestQuadraticScaling:
    def fit_slope(self, xs, ys):
        return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])

    def test_slope_in_disturbance_count(self):
        Ds = [8, 16, 32, 64]
        ys = [theorem3_bound(D, 0.3, 1.0, 2.0, 0.5, 1.0, 1.0) for D in Ds]
        assert self.fit_slope(Ds, ys) == pytest.approx(2.0, abs=0.1)

    def test_slope_in_magnitude_cap(self):
        ws = [8.0, 16.0, 32.0, 64.0]
        ys = [theorem3_bound(4, w, 1.0, 2.0, 0.5, 1.0, 1.0) for w in ws]
        assert self.fit_slope(ws, ys) == pytest.approx(2.0, abs=0.1)


class TestBoundReport:
    def test_builtin_model_violates_contraction(self):
        model, cfg = builtin_double_integrator(400)
        rd = riccati_backward(model)
        rep = compute_bound_report(model, rd, D=2, w_hat=0.3, x0=cfg.x0)
        assert not rep.assumption1_ok
        assert rep.gamma_hat < 0
        assert rep.unstable_steps > 0
        assert math.isnan(rep.thm3) and math.isnan(rep.thm5)
        assert math.isfinite(rep.thm4) and rep.thm4 > 0
        assert rep.norm_x0 == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert rep.lambda_min_R == pytest.approx(0.01, rel=1e-12)

    def test_stable_model_all_bounds_finite(self):
        model, rd = stable_scalar()
        rep = compute_bound_report(model, rd, D=3, w_hat=0.5, x0=np.ones(1))
        assert rep.assumption1_ok
        assert rep.unstable_steps == 0
        assert rep.thm3 == pytest.approx(rep.thm4 + rep.thm5, rel=1e-12)

    def test_margins_horizon_independent(self):
        # The backward recursion settles far from the terminal step, so the
        # margin and curvature summaries stop moving once T is large.
        m1, _ = builtin_double_integrator(2000)
        m2, _ = builtin_double_integrator(4000)
        r1, r2 = riccati_backward(m1), riccati_backward(m2)
        assert r1.gamma_hat == pytest.approx(r2.gamma_hat, abs=1e-12)
        assert r1.p_hat == pytest.approx(r2.p_hat, rel=1e-12)


class TestVerifyBounds:
    def test_requires_override_when_margin_fails(self):
        model, cfg = builtin_double_integrator(300)
        rd = riccati_backward(model)
        with pytest.raises(AssumptionViolatedError, match="override"):
            verify_bounds(model, rd, trials=3, D=1, w_hat=0.3, x0=cfg.x0, rng_seed=0)

    def test_override_checks_disturbance_gap_only(self):
        model, cfg = builtin_double_integrator(300)
        rd = riccati_backward(model)
        rows = verify_bounds(
            model, rd, trials=40, D=2, w_hat=0.3, x0=cfg.x0, rng_seed=7,
            override_assumption_check=True,
        )
        assert len(rows) == 41
        summary = rows[-1]
        assert summary["trial"] == "summary"
        assert summary["ratio4"] <= 1.0
        assert math.isnan(summary["ratio3"]) and math.isnan(summary["ratio5"])
        for row in rows[:-1]:
            assert 0.0 <= row["ratio4"] <= 1.0
            assert math.isnan(row["thm3"]) and math.isnan(row["thm5"])
            assert not row["assumption1_ok"]
            assert not row["degenerate"]

    def test_stable_model_all_ratios_below_one(self):
        model, rd = stable_scalar(60)
        rows = verify_bounds(
            model, rd, trials=100, D=2, w_hat=0.4, x0=np.array([1.0]), rng_seed=3
        )
        for row in rows:
            assert row["assumption1_ok"]
            for key in ("ratio3", "ratio4", "ratio5"):
                assert 0.0 <= row[key] <= 1.0

    def test_zero_disturbances_degenerate(self):
        model, rd = stable_scalar(30)
        rows = verify_bounds(
            model, rd, trials=5, D=0, w_hat=0.4, x0=np.array([1.0]), rng_seed=3
        )
        for row in rows[:-1]:
            assert row["emp_blind_vs_offline"] == 0.0
            assert row["emp_blind_vs_nominal"] == 0.0
            assert row["emp_nominal_vs_offline"] == 0.0
            assert row["ratio4"] == 0.0
            assert row["degenerate"]

    def test_deterministic_given_seed(self):
        model, rd = stable_scalar(40)
        kwargs = dict(trials=8, D=2, w_hat=0.4, x0=np.array([1.0]), rng_seed=12)
        a = verify_bounds(model, rd, **kwargs)
        b = verify_bounds(model, rd, **kwargs)
        assert a == b

    def test_trials_validation(self):
        model, rd = stable_scalar(20)
        with pytest.raises(ValueError, match="trials"):
            verify_bounds(model, rd, trials=-1, D=1, w_hat=0.4, x0=np.array([1.0]), rng_seed=0)
