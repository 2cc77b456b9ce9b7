import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adigelab import (
    Dry, Max, Power, QuadraticForm, Sum, Viscous,
    avd_exact_family, adige_v_exact_family, catalog, flatbottom, illcond2d,
    lookup, moreau_grad, moreau_value, phi_min_section, phi_value, pow_gamma,
    prox_phi, quad1d, strongquad, validate_damping_potential,
)
from adigelab.errors import ConditionError, DomainError, NotFoundError

ALL_PHIS = [
    Viscous(1.0), Viscous(3.0), Dry(0.5), Dry(2.0),
    Power(1.0, 1.0), Power(1.0, 1.5), Power(1.0, 2.0), Power(2.0, 3.0),
    Power(1.0, 3.5), Sum(Viscous(1.0), Dry(1.0)), Sum(Viscous(0.5), Power(1.0, 3.0)),
    Max(Viscous(1.0), Dry(1.0)), QuadraticForm([[2.0, 0.5], [0.5, 1.0]]),
]


def grid_prox_oracle(phi, lam, x, n=20001):
    """Dense search for argmin lam*phi(xi) + ||x - xi||^2/2 along the ray of x."""
    m = np.linalg.norm(x)
    if m == 0:
        return np.zeros_like(x)
    best_s, best_val = 0.0, lam * phi.value(np.zeros_like(x)) + 0.5 * m * m
    for s in np.linspace(0.0, m, n):
        xi = (s / m) * x
        val = lam * phi.value(xi) + 0.5 * np.sum((x - xi) ** 2)
        if val < best_val:
            best_s, best_val = s, val
    return (best_s / m) * x


def central_diff(fn, u, eps=1e-6):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for i in range(len(u)):
        e = np.zeros_like(u)
        e[i] = eps
        out[i] = (fn(u + e) - fn(u - e)) / (2 * eps)
    return out


class TestPhiValue:
    def test_power_half_norm_squared(self):
        # r=1, p=2 is the plain half squared norm
        assert phi_value(Power(1.0, 2.0), [3.0, 4.0]) == pytest.approx(12.5, abs=1e-15)

    def test_dry_zero_at_origin(self):
        assert phi_value(Dry(2.0), [0.0, 0.0]) == 0.0

    def test_sum_viscous_dry(self):
        phi = Sum(Viscous(1.0), Dry(1.0))
        assert phi_value(phi, [1.0, 0.0]) == pytest.approx(1.5, abs=1e-15)

    def test_max_picks_larger_branch(self):
        phi = Max(Viscous(2.0), Dry(1.0))
        # at small radius the dry branch dominates, at large the viscous one
        assert phi_value(phi, [0.5, 0.0]) == pytest.approx(0.5)
        assert phi_value(phi, [3.0, 0.0]) == pytest.approx(9.0)

    def test_quadratic_form(self):
        phi = QuadraticForm([[2.0, 0.0], [0.0, 4.0]])
        assert phi_value(phi, [1.0, 1.0]) == pytest.approx(3.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            phi_value(Viscous(1.0), [np.nan, 0.0])

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_nonnegative_and_zero_at_origin(self, phi, rng):
        dim = 2
        assert phi.value(np.zeros(dim)) == pytest.approx(0.0, abs=1e-15)
        for _ in range(20):
            assert phi.value(rng.normal(size=dim) * 3) >= 0.0

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_validator_accepts_all_kinds(self, phi):
        validate_damping_potential(phi, dim=2, rng=7)

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_convexity_on_random_segments(self, phi, rng):
        for _ in range(40):
            u = rng.normal(size=2) * 3
            w = rng.normal(size=2) * 3
            th = rng.uniform()
            lhs = phi.value(th * u + (1 - th) * w)
            assert lhs <= th * phi.value(u) + (1 - th) * phi.value(w) + 1e-12


class TestMinSection:
    def test_dry_zero_at_origin(self):
        assert np.allclose(phi_min_section(Dry(3.0), [0.0, 0.0]), 0.0)

    def test_dry_on_sphere(self):
        np.testing.assert_allclose(phi_min_section(Dry(3.0), [0.0, 2.0]), [0.0, 3.0])

    def test_power_cubic_matches_finite_differences(self):
        phi = Power(1.0, 3.0)
        u = np.array([2.0, 0.0])
        got = phi_min_section(phi, u)
        np.testing.assert_allclose(got, [4.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(got, central_diff(phi.value, u), rtol=1e-6)

    def test_power_subquadratic_zero_at_origin(self):
        # 1 < p < 2 has unbounded gradient slope at 0 but the least-norm
        # subgradient there is still 0
        assert np.allclose(phi_min_section(Power(1.0, 1.5), [0.0]), 0.0)

    @pytest.mark.parametrize("phi", [Viscous(2.0), Power(1.0, 3.0), Power(2.0, 2.0),
                                     Sum(Viscous(1.0), Power(1.0, 3.0))], ids=repr)
    def test_smooth_kinds_match_finite_differences(self, phi, rng):
        for _ in range(10):
            u = rng.normal(size=2) * 2
            np.testing.assert_allclose(
                phi_min_section(phi, u), central_diff(phi.value, u),
                rtol=1e-5, atol=1e-7)

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_subdifferential_inequality_at_zero(self, phi, rng):
        # <g, u> >= phi(u) for g in dphi(u), from phi(0) = 0
        for _ in range(25):
            u = rng.normal(size=2) * 3
            g = phi.min_section(u)
            assert g @ u >= phi.value(u) - 1e-10

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_min_section_bounded_on_ball(self, phi):
        norms = [np.linalg.norm(phi.min_section(np.array([s, 0.0])))
                 for s in np.linspace(0, 5, 41)]
        assert np.all(np.isfinite(norms))


class TestProx:
    def test_viscous_closed_form(self):
        np.testing.assert_allclose(
            prox_phi(Viscous(2.0), 0.5, [4.0, 0.0]), [2.0, 0.0], atol=1e-15)

    def test_power_quartic_root(self):
        # s + s^3 = 2 has the root s = 1
        got = prox_phi(Power(1.0, 4.0), 1.0, [2.0, 0.0])
        np.testing.assert_allclose(got, [1.0, 0.0], atol=1e-13)
        # optimality: xi + lam * grad phi(xi) = x
        phi = Power(1.0, 4.0)
        np.testing.assert_allclose(got + phi.min_section(got), [2.0, 0.0], atol=1e-12)

    def test_dry_shrinkage_against_grid_oracle(self):
        got = prox_phi(Dry(1.0), 0.5, [2.0, 0.0])
        np.testing.assert_allclose(got, [1.5, 0.0], atol=1e-12)
        oracle = grid_prox_oracle(Dry(1.0), 0.5, np.array([2.0, 0.0]))
        np.testing.assert_allclose(got, oracle, atol=1e-3)

    def test_dry_sticks_inside_threshold(self):
        assert np.allclose(prox_phi(Dry(1.0), 0.5, [0.3, 0.0]), 0.0)

    def test_quadratic_form_linear_solve(self):
        A = np.array([[2.0, 0.0], [0.0, 4.0]])
        x = np.array([3.0, 5.0])
        got = prox_phi(QuadraticForm(A), 0.5, x)
        np.testing.assert_allclose((np.eye(2) + 0.5 * A) @ got, x, atol=1e-12)

    def test_sum_mixing_quadform_refused(self):
        with pytest.raises(DomainError):
            Sum(Viscous(1.0), QuadraticForm([[1.0]]))
        with pytest.raises(DomainError):
            Max(QuadraticForm([[1.0]]), Dry(1.0))

    @pytest.mark.parametrize(
        "phi", [p for p in ALL_PHIS if not isinstance(p, QuadraticForm)], ids=repr)
    def test_prox_against_grid_oracle(self, phi, rng):
        # the ray search is an oracle for the radially symmetric kinds only
        for _ in range(5):
            lam = float(rng.uniform(0.1, 2.0))
            x = rng.normal(size=2) * 3
            got = prox_phi(phi, lam, x)
            oracle = grid_prox_oracle(phi, lam, x, n=4001)
            assert np.linalg.norm(got - oracle) <= 2e-3 * (1 + np.linalg.norm(x))

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_prox_optimality_inclusion(self, phi, rng):
        # there is g in dphi(xi) with ||xi + lam g - x|| <= 1e-10 (1 + ||x||)
        for _ in range(12):
            lam = float(rng.uniform(0.05, 3.0))
            x = rng.normal(size=2) * 4
            xi = prox_phi(phi, lam, x)
            tol = 1e-10 * (1 + np.linalg.norm(x))
            resid = _inclusion_residual(phi, lam, x, xi)
            assert resid <= tol

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_firm_nonexpansiveness(self, phi, rng):
        for _ in range(20):
            lam = float(rng.uniform(0.1, 2.0))
            x = rng.normal(size=2) * 3
            y = rng.normal(size=2) * 3
            px = prox_phi(phi, lam, x)
            py = prox_phi(phi, lam, y)
            assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12

    @given(st.floats(0.05, 5.0), st.floats(-8.0, 8.0), st.floats(-8.0, 8.0),
           st.floats(1.1, 4.0), st.floats(0.1, 3.0))
    @settings(max_examples=60, deadline=None)
    def test_power_prox_optimality_property(self, lam, x0, x1, p, r):
        phi = Power(r, p)
        x = np.array([x0, x1])
        xi = prox_phi(phi, lam, x)
        assert _inclusion_residual(phi, lam, x, xi) <= 1e-9 * (1 + np.linalg.norm(x))


def _inclusion_residual(phi, lam, x, xi):
    """Distance of x - xi to lam * dphi(xi), via the radial subdifferential."""
    s = np.linalg.norm(xi)
    if s > 0:
        if hasattr(phi, "_rslope_interval"):
            lo, hi = phi._rslope_interval(s)
            ray = xi / s
            proj = float((x - xi) @ ray)
            ortho = np.linalg.norm((x - xi) - proj * ray)
            dist = max(0.0, proj - lam * hi, lam * lo - proj)
            return math.hypot(dist, ortho)
        return float(np.linalg.norm(xi + lam * phi.min_section(xi) - x))
    r0 = phi._rorigin_radius() if hasattr(phi, "_rorigin_radius") else 0.0
    return max(0.0, float(np.linalg.norm(x)) - lam * r0)


class TestMoreau:
    def test_zero_at_origin(self):
        for phi in ALL_PHIS:
            dim = 2 if not isinstance(phi, QuadraticForm) or phi.A.shape[0] == 2 else 1
            assert moreau_value(phi, 1.0, np.zeros(dim)) == pytest.approx(0.0, abs=1e-15)
            assert np.allclose(moreau_grad(phi, 1.0, np.zeros(dim)), 0.0)

    def test_dry_huber_far_zone(self):
        # r ||u|| - lam r^2 / 2 beyond the threshold
        got = moreau_value(Dry(1.0), 1.0, [3.0, 0.0])
        assert got == pytest.approx(2.5, abs=1e-12)
        # grid-minimization oracle
        xi = grid_prox_oracle(Dry(1.0), 1.0, np.array([3.0, 0.0]))
        val = Dry(1.0).value(xi) + 0.5 * np.sum((np.array([3.0, 0.0]) - xi) ** 2)
        assert got == pytest.approx(val, abs=1e-6)

    def test_viscous_scaling(self):
        assert moreau_value(Viscous(1.0), 1.0, [2.0, 0.0]) == pytest.approx(1.0, abs=1e-12)

    def test_dry_quadratic_zone_gradient(self):
        np.testing.assert_allclose(
            moreau_grad(Dry(1.0), 1.0, [0.5, 0.0]), [0.5, 0.0], atol=1e-12)

    def test_viscous_gradient(self):
        np.testing.assert_allclose(
            moreau_grad(Viscous(3.0), 1.0, [4.0, 0.0]), [3.0, 0.0], atol=1e-12)

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_gradient_matches_finite_differences(self, phi, rng):
        for _ in range(8):
            lam = float(rng.uniform(0.2, 2.0))
            u = rng.normal(size=2) * 3
            fd = central_diff(lambda w: moreau_value(phi, lam, w), u)
            np.testing.assert_allclose(moreau_grad(phi, lam, u), fd, rtol=1e-4, atol=1e-6)

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_envelope_below_value_and_monotone(self, phi, rng):
        for _ in range(10):
            u = rng.normal(size=2) * 3
            vals = [moreau_value(phi, lam, u) for lam in (1.0, 0.1, 0.01)]
            target = phi.value(u)
            assert 0.0 <= vals[0] <= target + 1e-12
            # nonincreasing in lam means increasing toward phi as lam drops
            assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12
            assert vals[2] <= target + 1e-12
            assert target - vals[2] <= max(0.2, 0.2 * target)

    @pytest.mark.parametrize("phi", ALL_PHIS, ids=repr)
    def test_gradient_norm_below_min_section(self, phi, rng):
        for _ in range(15):
            lam = float(rng.uniform(0.05, 2.0))
            u = rng.normal(size=2) * 3
            lhs = np.linalg.norm(moreau_grad(phi, lam, u))
            rhs = np.linalg.norm(phi.min_section(u))
            assert lhs <= rhs + 1e-9


class TestConstructors:
    def test_power_requires_p_at_least_one(self):
        with pytest.raises(DomainError):
            Power(1.0, 0.5)

    def test_positive_parameters_required(self):
        for bad in (0.0, -1.0):
            with pytest.raises(DomainError):
                Viscous(bad)
            with pytest.raises(DomainError):
                Dry(bad)

    def test_quadratic_form_must_be_spd(self):
        with pytest.raises(DomainError):
            QuadraticForm([[1.0, 2.0], [0.0, 1.0]])  # not symmetric
        with pytest.raises(DomainError):
            QuadraticForm([[1.0, 0.0], [0.0, -2.0]])  # not positive definite

    def test_quadratic_gamma_extraction(self):
        assert Viscous(2.0).quadratic_gamma() == 2.0
        assert Power(3.0, 2.0).quadratic_gamma() == 3.0
        assert Power(1.0, 3.0).quadratic_gamma() is None
        assert Sum(Viscous(1.0), Dry(0.1)).quadratic_gamma() == 1.0
        assert QuadraticForm([[2.0, 0.0], [0.0, 5.0]]).quadratic_gamma() == pytest.approx(2.0)


class TestCatalog:
    def test_contains_expected_entries(self):
        ids = [e.id for e in catalog()]
        assert "quad1d" in ids and "illcond2d" in ids and "flatbottom" in ids
        assert any(i.startswith("powgamma") for i in ids)
        assert any(i.startswith("strongquad") for i in ids)

    def test_lookup_unknown_id(self):
        with pytest.raises(NotFoundError):
            lookup("nope")

    def test_lookup_parameterized(self):
        e = lookup("strongquad:mu=2,dim=3")
        assert e.objective.dim == 3
        assert e.objective.mu == 2.0
        e = lookup("powgamma:c=0.5,gamma=6")
        assert e.params["gamma"] == 6.0

    def test_flatbottom_values(self):
        fb = flatbottom().objective
        assert fb.eval(np.array([0.5])) == 0.0
        assert fb.grad(np.array([2.0]))[0] == pytest.approx(1.0)
        assert fb.grad(np.array([-2.0]))[0] == pytest.approx(-1.0)
        assert fb.hvp(np.array([0.5]), np.array([1.0]))[0] == 0.0
        assert fb.hvp(np.array([1.0]), np.array([1.0]))[0] == 1.0

    def test_illcond_gradient(self):
        np.testing.assert_allclose(
            illcond2d().objective.grad(np.array([1.0, 1.0])), [1.0, 1000.0])

    def test_gradients_vanish_at_minimizers(self):
        for entry in catalog():
            for point in entry.minimizer_points:
                assert np.linalg.norm(entry.objective.grad(point)) <= 1e-10
            if entry.minimizer_interval is not None:
                a, b = entry.minimizer_interval
                for xv in np.linspace(a + 1e-9, b - 1e-9, 5):
                    assert abs(entry.objective.grad(np.array([xv]))[0]) <= 1e-10

    @pytest.mark.parametrize("entry_fn", [quad1d, illcond2d, pow_gamma, flatbottom,
                                          lambda: strongquad(2.0, 2)])
    def test_grad_matches_finite_differences(self, entry_fn, rng):
        obj = entry_fn().objective
        for _ in range(15):
            x = rng.normal(size=obj.dim) * 2
            if entry_fn is flatbottom and min(abs(abs(x[0]) - 1.0), abs(x[0])) < 1e-3:
                continue
            fd = central_diff(obj.eval, x)
            rel = np.linalg.norm(obj.grad(x) - fd) / max(1e-12, np.linalg.norm(fd) + 1e-9)
            assert rel <= 1e-6 or np.linalg.norm(obj.grad(x) - fd) <= 1e-8

    @pytest.mark.parametrize("entry_fn", [quad1d, illcond2d, pow_gamma, flatbottom,
                                          lambda: strongquad(2.0, 2)])
    def test_hvp_matches_grad_differences(self, entry_fn, rng):
        obj = entry_fn().objective
        for _ in range(10):
            x = rng.normal(size=obj.dim) * 2
            if entry_fn is flatbottom and abs(abs(x[0]) - 1.0) < 1e-3:
                continue  # curvature jumps at the kinks
            v = rng.normal(size=obj.dim)
            eps = 1e-6
            fd = (obj.grad(x + eps * v) - obj.grad(x - eps * v)) / (2 * eps)
            got = obj.hvp(x, v)
            assert np.linalg.norm(got - fd) <= 1e-5 * (1 + np.linalg.norm(fd))

    def test_strong_convexity_inequality(self, rng):
        entry = strongquad(2.0, 2)
        obj = entry.objective
        for _ in range(20):
            x = rng.normal(size=2) * 3
            y = rng.normal(size=2) * 3
            lhs = obj.eval(y)
            rhs = obj.eval(x) + obj.grad(x) @ (y - x) + obj.mu / 2 * np.sum((y - x) ** 2)
            assert lhs >= rhs - 1e-10


class TestExactFamilies:
    def test_avd_constants(self):
        e = avd_exact_family(4.0, 4.0)
        assert e.params["c"] == pytest.approx(0.5, abs=1e-15)
        assert e.params["theta"] == pytest.approx(1.0)
        e = avd_exact_family(5.0, 3.0)
        assert e.params["c"] == pytest.approx(4.0 / 3.0, abs=1e-14)
        assert e.params["theta"] == pytest.approx(2.0)

    def test_avd_requires_alpha_above_threshold(self):
        with pytest.raises(ConditionError):
            avd_exact_family(2.0, 4.0)  # alpha must exceed gamma/(gamma-2) = 2

    def test_autonomous_family_constants(self):
        e = adige_v_exact_family(6.0, 4.0)
        assert e.params["p"] == pytest.approx(8.0 / 3.0)
        assert e.params["theta"] == pytest.approx(0.5)
        # c = (theta/gamma) (theta^(p-2) r - (theta+1)), rederived numerically
        th, p, r, g = 0.5, 8.0 / 3.0, 4.0, 6.0
        c = (th / g) * (th ** (p - 2.0) * r - (th + 1.0))
        assert e.params["c"] == pytest.approx(c, rel=1e-15)
        assert e.params["c"] == pytest.approx(0.0849868416, rel=1e-8)

    def test_autonomous_family_boundary_refused(self):
        # at r = (theta+1)/theta^(p-2) the closed form degenerates (c = 0)
        th = 0.5
        p = (3 * 6.0 - 2) / 6.0
        r_crit = (th + 1.0) / th ** (p - 2.0)
        with pytest.raises(ConditionError) as exc:
            adige_v_exact_family(6.0, r_crit)
        assert "theta" in str(exc.value.condition)
