import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from helpers import random_curve, random_reparam
from srvf.curves import (
    Partition,
    Reparametrisation,
    SampledCurve,
    Srvf,
    ac_norm,
    compose,
    constant_speed,
    l2_distance,
    l2_norm,
    max_curve_difference,
    probe_nondifferentiability,
    refine,
    resample,
    srvf_action,
    srvt,
    srvt_inverse,
    v_map,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def line(direction, n=8):
    direction = np.asarray(direction, dtype=float)
    return SampledCurve.from_function(lambda t: t[:, None] * direction, n)


class TestVMap:
    def test_examples(self):
        np.testing.assert_array_equal(v_map([1.0, 0.0]), [1.0, 0.0])
        np.testing.assert_array_equal(v_map([0.0, 0.0]), [0.0, 0.0])
        np.testing.assert_array_equal(v_map([4.0, 0.0]), [2.0, 0.0])

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            v_map([np.nan, 1.0])

    @given(arrays(float, st.integers(1, 4), elements=finite))
    def test_norm_squared_is_norm(self, x):
        # math.hypot scales internally, so tiny inputs keep their digits
        assert math.hypot(*v_map(x)) ** 2 == pytest.approx(math.hypot(*x), rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_holder_constant(self, d):
        rng = np.random.default_rng(d)
        x = rng.uniform(-10, 10, size=(100_000, d))
        y = rng.uniform(-10, 10, size=(100_000, d))
        # antipodal pairs are where the constant sqrt(2) is attained
        y[:1000] = -x[:1000] * rng.uniform(0, 2, size=(1000, 1))
        ratio = np.linalg.norm(v_map(x) - v_map(y), axis=1) / np.sqrt(np.linalg.norm(x - y, axis=1))
        assert ratio.max() <= math.sqrt(2) * (1 + 1e-12)
        if d == 1:
            assert ratio.max() > math.sqrt(2) * (1 - 1e-3)


class TestTypes:
    def test_curve_must_start_at_origin(self):
        with pytest.raises(ValueError):
            SampledCurve([[1.0], [2.0]])
        c = SampledCurve.anchored([[1.0], [2.0]])
        np.testing.assert_array_equal(c.samples, [[0.0], [1.0]])

    def test_curve_rejects_nan(self):
        with pytest.raises(ValueError):
            SampledCurve([[0.0], [np.nan]])

    def test_knots_validated(self):
        with pytest.raises(ValueError):
            SampledCurve([[0.0], [1.0], [2.0]], [0.0, 0.6, 0.5])
        with pytest.raises(ValueError):
            Partition([0.0, 0.5])

    def test_reparam_clamps_tiny_violations(self):
        g = Reparametrisation([0.0, 0.5, 0.5 - 1e-13, 1.0])
        assert np.all(np.diff(g.values) >= 0)
        assert not g.strict

    def test_reparam_rejects_decrease(self):
        with pytest.raises(ValueError):
            Reparametrisation([0.0, 0.6, 0.4, 1.0])
        with pytest.raises(ValueError):
            Reparametrisation([0.0, 0.5, 0.9])

    def test_strict_flag(self):
        assert Reparametrisation.identity(4).strict
        assert not Reparametrisation([0.0, 0.5, 0.5, 1.0]).strict

    def test_immutable(self):
        c = line([1.0, 0.0])
        with pytest.raises(ValueError):
            c.samples[0, 0] = 1.0


class TestTransform:
    def test_line(self):
        q = srvt(line([1.0, 0.0]))
        np.testing.assert_allclose(q.values, np.tile([1.0, 0.0], (8, 1)), rtol=0, atol=1e-15)

    def test_zero_curve(self):
        q = srvt(SampledCurve(np.zeros((5, 2))))
        np.testing.assert_array_equal(q.values, 0.0)
        np.testing.assert_array_equal(srvt_inverse(q).samples, 0.0)

    def test_parabola_matches_closed_form(self):
        n = 1000
        c = SampledCurve.from_function(lambda t: np.stack([t**2, 0 * t], -1), n)
        q = srvt(c)
        mid = (np.arange(n) + 0.5) / n
        assert np.max(np.abs(q.values[:, 0] - np.sqrt(2 * mid))) <= 1e-3
        # L2 distance to the continuous transform sqrt(2t), cell by cell
        err2 = sum(quad(lambda t, v=v: (math.sqrt(2 * t) - v) ** 2, k / n, (k + 1) / n)[0]
                   for k, v in enumerate(q.values[:, 0]))
        assert math.sqrt(err2) < 1e-2

    def test_inverse_of_constant(self):
        c = srvt_inverse(Srvf(np.tile([1.0, 0.0], (4, 1))))
        np.testing.assert_allclose(c.samples[:, 0], np.linspace(0, 1, 5), atol=1e-15)

    def test_roundtrip_random(self, rng):
        for _ in range(50):
            c = random_curve(rng, flat_cells=int(rng.integers(0, 3)))
            np.testing.assert_allclose(srvt_inverse(srvt(c)).samples, c.samples, rtol=0, atol=1e-12)
            q = Srvf(rng.normal(size=(c.n_cells, c.dim)), c.knots)
            np.testing.assert_allclose(srvt(srvt_inverse(q)).values, q.values, rtol=0, atol=1e-12)

    @settings(max_examples=200)
    @given(arrays(float, st.tuples(st.integers(1, 40), st.integers(1, 3)), elements=st.floats(-50, 50)))
    def test_norm_identity(self, steps):
        c = SampledCurve(np.vstack([np.zeros((1, steps.shape[1])), np.cumsum(steps, axis=0)]))
        L = ac_norm(c)
        assert abs(l2_norm(srvt(c)) ** 2 - L) <= 1e-10 * (1 + L)

    def test_ac_norm_examples(self):
        assert ac_norm(line([1.0, 0.0])) == pytest.approx(1.0, abs=1e-15)
        assert ac_norm(SampledCurve(np.zeros((3, 2)))) == 0.0


class TestDistance:
    def test_l2_examples(self):
        p = Srvf(np.tile([1.0, 0.0], (4, 1)))
        q = Srvf(np.tile([0.0, 1.0], (4, 1)))
        assert l2_distance(p, p) == 0.0
        assert l2_distance(p, q) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            l2_distance(Srvf(np.ones((4, 1))), Srvf(np.ones((4, 2))))

    def test_different_partitions_refined(self, rng):
        q = Srvf(rng.normal(size=(6, 2)))
        r = refine(q, [0.1, 0.33])
        assert r.n_cells == 8
        assert l2_distance(q, r) == 0.0


class TestAction:
    def test_identity(self, rng):
        c = random_curve(rng)
        ident = Reparametrisation.identity(3)
        cg = compose(c, ident)
        assert max_curve_difference(cg, c) <= 1e-12
        qa = srvf_action(srvt(c), ident)
        assert l2_distance(qa, srvt(c)) <= 1e-12

    def test_parabola_reparam(self):
        c = line([1.0, 0.0], 16)
        g = Reparametrisation.from_function(lambda t: t**2, 16)
        cg = compose(c, g)
        np.testing.assert_allclose(cg.samples[:, 0], g(cg.knots), atol=1e-15)
        np.testing.assert_allclose(cg(g.knots)[:, 0], g.values, atol=1e-15)

    def test_isometry_including_flat(self, rng):
        for strict in (True, False):
            for _ in range(30):
                c = random_curve(rng)
                g = random_reparam(rng, strict=strict)
                L = ac_norm(c)
                assert abs(ac_norm(compose(c, g)) - L) <= 1e-10 * (1 + L)

    def test_srvf_isometry_strict(self, rng):
        for _ in range(30):
            q = srvt(random_curve(rng))
            g = random_reparam(rng)
            assert abs(l2_norm(srvf_action(q, g)) ** 2 - l2_norm(q) ** 2) <= 1e-12 * (1 + l2_norm(q) ** 2)

    def test_flat_stretch_gives_zero_cell(self):
        q = Srvf(np.ones((4, 1)))
        g = Reparametrisation([0.0, 0.5, 0.5, 1.0])
        qa = srvf_action(q, g)
        flat = (qa.knots[:-1] >= 1 / 3) & (qa.knots[1:] <= 2 / 3)
        np.testing.assert_array_equal(qa.values[flat], 0.0)

    def test_equivariance(self, rng):
        for strict in (True, False):
            for _ in range(30):
                c = random_curve(rng, flat_cells=1)
                g = random_reparam(rng, strict=strict)
                lhs = srvt(compose(c, g))
                rhs = srvf_action(srvt(c), g)
                assert np.array_equal(lhs.knots, rhs.knots)
                assert l2_distance(lhs, rhs) <= 1e-10

    def test_reparam_composition_and_inverse(self, rng):
        g = random_reparam(rng)
        h = g.compose(g.inverse())
        np.testing.assert_allclose(h.values, h.knots, atol=1e-12)


class TestInversionConvergence:
    def test_gamma_delta_inverse_to_identity(self, rng):
        gamma = random_reparam(rng, n=24, strict=False)
        ident = Reparametrisation.identity()
        dists = []
        for n in range(1, 5):
            w = 2.0**-n
            # strict approximant with ||gamma - delta||_AC = w ||gamma - Id||_AC
            delta = Reparametrisation((1 - w) * gamma.values + w * gamma.knots, gamma.knots)
            assert delta.strict
            assert gamma.ac_distance(delta) == pytest.approx(w * gamma.ac_distance(ident), rel=1e-9)
            dists.append(gamma.compose(delta.inverse()).ac_distance(ident))
        assert all(b < a for a, b in zip(dists, dists[1:]))
        np.testing.assert_allclose(dists, [2.0**-n * gamma.ac_distance(ident) for n in range(1, 5)], rtol=1e-9)


class TestContinuity:
    def test_residuals_decrease(self, rng):
        c = random_curve(rng, n=64, dim=2)
        h = random_curve(rng, n=64, dim=2)
        res = []
        for k in range(4):
            eps = 10.0 ** (-k - 1)
            ck = SampledCurve(c.samples + eps * h.samples, c.knots)
            assert ac_norm(SampledCurve(ck.samples - c.samples, c.knots)) == pytest.approx(eps * ac_norm(h))
            res.append(l2_distance(srvt(ck), srvt(c)))
        assert all(b < a for a, b in zip(res, res[1:]))


class TestConstantSpeed:
    def test_already_constant(self):
        c = line([1.0, 1.0])
        ct, g = constant_speed(c)
        assert max_curve_difference(ct, c) <= 1e-15
        np.testing.assert_allclose(g.values, g.knots, atol=1e-15)

    def test_parabola(self):
        n = 64
        c = SampledCurve.from_function(lambda t: np.stack([t**2, 0 * t], -1), n)
        ct, g = constant_speed(c)
        np.testing.assert_allclose(g.values, c.knots**2, atol=1e-14)
        np.testing.assert_allclose(ct.samples[:, 0], ct.knots, atol=1e-14)

    def test_factorisation_and_length(self, rng):
        for _ in range(20):
            c = random_curve(rng, flat_cells=2)
            ct, g = constant_speed(c)
            assert abs(ac_norm(ct) - ac_norm(c)) <= 1e-10
            assert max_curve_difference(compose(ct, g), c) <= 1e-10
            speed = np.linalg.norm(ct.velocities(), axis=1)
            np.testing.assert_allclose(speed, ac_norm(c), rtol=1e-9)

    def test_zero_curve(self):
        z = SampledCurve(np.zeros((4, 2)))
        ct, g = constant_speed(z)
        assert ac_norm(ct) == 0.0
        assert g.strict


class TestResample:
    def test_line_any_n(self):
        c = line([2.0, -1.0], 5)
        for n in (1, 3, 17):
            r = resample(c, n)
            np.testing.assert_allclose(r.samples, r.knots[:, None] * [2.0, -1.0], atol=1e-14)

    def test_dyadic_roundtrip(self, rng):
        for _ in range(20):
            c = random_curve(rng)
            back = resample(resample(c, 2 * c.n_cells), c.n_cells)
            assert np.max(np.abs(back.samples - c.samples)) <= 1e-12

    def test_srvf_keeps_norm_identity(self, rng):
        q = srvt(random_curve(rng, n=16, dim=2))
        r = resample(q, 48)
        assert l2_norm(r) ** 2 == pytest.approx(ac_norm(srvt_inverse(r)), rel=1e-12)


class TestProbe:
    def setup_method(self):
        n = 16
        t = np.linspace(0, 1, n + 1)
        # c is stationary on [0, 1/2]; h moves only there
        self.c = SampledCurve(np.stack([np.maximum(t - 0.5, 0), np.zeros_like(t)], -1))
        self.h = SampledCurve(np.stack([np.minimum(t, 0.5), np.zeros_like(t)], -1))

    def test_closed_form(self):
        eps = [1e-1, 1e-2, 1e-3]
        vals = probe_nondifferentiability(self.c, self.h, eps)
        np.testing.assert_allclose(vals, [e**-0.5 * math.sqrt(0.5) for e in eps], rtol=1e-12)

    def test_scaling(self):
        eps = [10.0**-k for k in range(1, 7)]
        v = probe_nondifferentiability(self.c, self.h, eps)
        v4 = probe_nondifferentiability(self.c, self.h, [e / 4 for e in eps])
        for a, b in zip(v, v4):
            assert abs(b / a - 2.0) <= 1e-9

    def test_zero_direction(self):
        z = SampledCurve(np.zeros((17, 2)))
        assert probe_nondifferentiability(self.c, z, [0.1, 0.01]) == [0.0, 0.0]

    def test_support_condition(self):
        bad = SampledCurve(np.stack([np.linspace(0, 1, 17), np.zeros(17)], -1))
        with pytest.raises(ValueError):
            probe_nondifferentiability(self.c, bad, [0.1])


class TestExactVelocity:
    def test_inverse_keeps_exact_derivative(self, rng):
        q = Srvf(rng.normal(size=(50, 2)) * np.logspace(-6, 0, 50)[:, None])
        np.testing.assert_array_equal(srvt(srvt_inverse(q)).values, v_map(q.values * np.linalg.norm(q.values, axis=1, keepdims=True)))
        assert np.max(np.abs(srvt(srvt_inverse(q)).values - q.values)) <= 1e-15

    def test_velocity_must_match_samples(self):
        with pytest.raises(ValueError, match="does not match"):
            SampledCurve(np.array([[0.0], [1.0]]), velocity=np.array([[2.0]]))
        with pytest.raises(ValueError, match="shape"):
            SampledCurve(np.array([[0.0], [1.0]]), velocity=np.array([[1.0, 0.0]]))

    def test_derived_curves_fall_back_to_differences(self, rng):
        c = srvt_inverse(srvt(random_curve(rng, 12, 2)))
        assert c.velocity is not None
        assert c.scaled(2.0).velocity is None
        np.testing.assert_allclose(c.scaled(2.0).velocities(), 2 * c.velocities(), rtol=1e-12)
