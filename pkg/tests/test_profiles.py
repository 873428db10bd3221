import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import brentq

from helpers import fd2
from ringchain.profiles import (
    Profile,
    deviation_bound_check,
    eval_profile,
    fluctuation_constants,
    gamma_constant,
    load_profile,
    profile_from_json,
    profile_to_json,
    save_profile,
    trig_profile,
    uniform_profile,
    v_antiderivative,
    x_of_z,
    z_of_x,
)

TWO_PI = 2.0 * math.pi


@st.composite
def admissible_profiles(draw):
    n_max = draw(st.integers(1, 3))
    amp = draw(st.floats(0.01, 0.25))
    x_cos = {}
    x_sin = {}
    v_cos = {}
    v_sin = {}
    for n in range(1, n_max + 1):
        x_cos[n] = amp * draw(st.floats(-1, 1)) / n**2
        x_sin[n] = amp * draw(st.floats(-1, 1)) / n**2
        v_cos[n] = draw(st.floats(-1, 1)) / n**2
        v_sin[n] = draw(st.floats(-1, 1)) / n**2
    return trig_profile(L=1.0, x_cos=x_cos, x_sin=x_sin, v_cos=v_cos, v_sin=v_sin)


class TestEval:
    def test_constant_profile(self, uniform):
        for x in (0.0, 0.37, 1.9, -2.2):
            assert eval_profile(uniform, "X", x) == pytest.approx(1.0, abs=1e-14)
            assert eval_profile(uniform, "V", x) == pytest.approx(0.0, abs=1e-14)

    def test_cosine_peak(self, cos01):
        assert eval_profile(cos01, "X", 0.0) == pytest.approx(1.1, abs=1e-13)

    def test_second_derivative_against_finite_differences(self, cos01):
        # independent check of the coefficient route: central stencil on X itself
        exact = eval_profile(cos01, "X''", 0.0)
        approx = fd2(lambda x: eval_profile(cos01, "X", x), 0.0, 1e-4)
        assert exact == pytest.approx(-0.1 * TWO_PI**2, rel=1e-12)
        assert approx == pytest.approx(exact, abs=1e-5)

    def test_first_derivative_supported(self, cos01):
        assert eval_profile(cos01, "X'", 0.25) == pytest.approx(
            -0.1 * TWO_PI * math.sin(TWO_PI * 0.25), rel=1e-12
        )

    def test_unknown_component_rejected(self, uniform):
        with pytest.raises(ValueError):
            eval_profile(uniform, "W", 0.0)

    def test_vectorized(self, cos01):
        xs = np.linspace(0, 1, 7)
        vals = eval_profile(cos01, "X", xs)
        assert vals.shape == xs.shape
        assert vals[0] == pytest.approx(1.1)


class TestValidation:
    def test_mean_of_x_must_be_one(self):
        with pytest.raises(ValueError, match="mean of X"):
            Profile(L=1.0, x_hat={0: 1.01}, v_hat={})

    def test_mean_of_v_must_be_zero(self):
        with pytest.raises(ValueError, match="mean of V"):
            Profile(L=1.0, x_hat={0: 1.0}, v_hat={0: 0.1})

    def test_conjugate_symmetry_required(self):
        with pytest.raises(ValueError, match="conjugate-symmetric"):
            Profile(L=1.0, x_hat={0: 1.0, 1: 0.1 + 0.05j, -1: 0.1 - 0.01j}, v_hat={})

    def test_positivity_enforced(self):
        with pytest.raises(ValueError):
            trig_profile(L=1.0, x_cos={1: 1.2})

    def test_bad_length(self):
        with pytest.raises(ValueError):
            Profile(L=0.0, x_hat={0: 1.0}, v_hat={})


class TestFluctuationConstants:
    def test_uniform_is_zero(self, uniform):
        assert fluctuation_constants(uniform) == (0.0, 0.0)

    def test_cosine_01(self, cos01):
        # L * int |X''| = 0.1 (2 pi)^2 * (2/pi) = 0.8 pi
        c1, c2 = fluctuation_constants(cos01)
        assert c1 == pytest.approx(0.8 * math.pi, rel=1e-10)
        assert c2 == 0.0

    def test_linear_scaling(self, cos001):
        c1, _ = fluctuation_constants(cos001)
        assert c1 == pytest.approx(0.08 * math.pi, rel=1e-10)

    def test_against_adaptive_quadrature(self, bump):
        c1, c2 = fluctuation_constants(bump)

        def absxpp(u):
            return abs(eval_profile(bump, "X''", u))

        def absvpp(u):
            return abs(eval_profile(bump, "V''", u))

        ref1, _ = quad(absxpp, 0.0, 1.0, limit=400)
        ref2, _ = quad(absvpp, 0.0, 1.0, limit=400)
        assert c1 == pytest.approx(1.0 * ref1, rel=1e-8)
        assert c2 == pytest.approx(1.0 * ref2, rel=1e-8)


class TestGamma:
    def test_trivial_profile(self, uniform):
        rep = gamma_constant(uniform, alpha=3.0, omega0=2.0)
        assert rep.gamma == 0.0
        assert rep.satisfied

    def test_cos01_value(self, cos01):
        rep = gamma_constant(cos01, alpha=0.0, omega0=1.0)
        assert rep.gamma == pytest.approx(1.6 * math.pi, rel=1e-10)
        assert not rep.satisfied

    def test_cos001_value(self, cos001):
        rep = gamma_constant(cos001, alpha=0.0, omega0=1.0)
        assert rep.gamma == pytest.approx(0.16 * math.pi, rel=1e-10)
        assert rep.satisfied  # 0.5027 < 0.6

    def test_formula(self, bump, rng):
        c1, c2 = fluctuation_constants(bump)
        for _ in range(10):
            alpha = rng.uniform(0, 4)
            om = rng.uniform(0.3, 3)
            C1, C2 = rng.uniform(0, 2, size=2)
            rep = gamma_constant(bump, alpha, om, C1, C2, delta=0.9)
            expect = (1 + alpha / (8 * om)) * (2 * c1 + C1) + (2 * c2 + C2) / (4 * om)
            assert rep.gamma == pytest.approx(expect, rel=1e-12)

    def test_monotone_in_each_argument(self, bump, rng):
        base = dict(alpha=1.0, omega0=1.0, C1=0.5, C2=0.5)
        g0 = gamma_constant(bump, **base).gamma
        for key in ("alpha", "C1", "C2"):
            kw = dict(base)
            kw[key] = kw[key] + rng.uniform(0.1, 1.0)
            assert gamma_constant(bump, **kw).gamma >= g0

    def test_monotone_in_fluctuation_constants(self):
        # scaling the profile amplitudes scales c1, c2 and raises gamma
        small = trig_profile(L=1.0, x_cos={1: 0.005}, v_sin={1: 0.01})
        large = trig_profile(L=1.0, x_cos={1: 0.02}, v_sin={1: 0.04})
        c_small = fluctuation_constants(small)
        c_large = fluctuation_constants(large)
        assert c_large[0] > c_small[0] and c_large[1] > c_small[1]
        kw = dict(alpha=0.7, omega0=1.3, C1=0.1, C2=0.1)
        assert gamma_constant(large, **kw).gamma > gamma_constant(small, **kw).gamma

    def test_rejects_bad_arguments(self, uniform):
        with pytest.raises(ValueError):
            gamma_constant(uniform, alpha=1.0, omega0=0.0)
        with pytest.raises(ValueError):
            gamma_constant(uniform, alpha=-1.0, omega0=1.0)
        with pytest.raises(ValueError):
            gamma_constant(uniform, alpha=1.0, omega0=1.0, delta=1.5)


class TestDeviationBound:
    def test_uniform(self, uniform):
        assert deviation_bound_check(uniform)

    def test_cosine(self, cos01):
        assert deviation_bound_check(cos01)

    @settings(max_examples=20, deadline=None)
    @given(admissible_profiles())
    def test_holds_for_random_profiles(self, p):
        # the sup-norm bound holds for every admissible profile, so a
        # failure here flags a library bug rather than bad input
        assert deviation_bound_check(p)


class TestCoordinateMaps:
    def test_identity_map(self, uniform):
        assert z_of_x(uniform, 0.37) == pytest.approx(0.37, abs=1e-12)
        assert x_of_z(uniform, 2.5) == pytest.approx(2.5, abs=1e-12)

    def test_odd_symmetry_point(self, cos001):
        assert z_of_x(cos001, 0.5) == pytest.approx(0.5, abs=1e-12)

    def test_full_period(self, cos001):
        assert x_of_z(cos001, 1.0) == pytest.approx(1.0, abs=1e-13)

    def test_against_quadrature_root_oracle(self, cos001):
        # solve int_0^z X = x with scipy quadrature + brentq, then compare
        def h(z):
            return quad(lambda u: eval_profile(cos001, "X", u), 0.0, z, limit=200)[0]

        for x in (0.25, 0.6, 0.93):
            z_ref = brentq(lambda z: h(z) - x, 0.0, 1.0, xtol=1e-13)
            assert z_of_x(cos001, x) == pytest.approx(z_ref, abs=1e-10)
        assert z_of_x(cos001, 0.25) == pytest.approx(0.25 - 0.01 / TWO_PI, abs=1e-5)

    def test_periodic_shift(self, cos001):
        z = z_of_x(cos001, 0.3)
        assert z_of_x(cos001, 0.3 + 1.0) == pytest.approx(z + 1.0, abs=1e-11)

    def test_roundtrip_dense(self, bump, rng):
        xs = rng.uniform(0.0, 1.0, size=1000)
        for x in xs:
            z = z_of_x(bump, float(x))
            assert x_of_z(bump, z) == pytest.approx(x, abs=1e-10)

    def test_strictly_increasing(self, bump, rng):
        pairs = rng.uniform(0.0, 1.0, size=(50, 2))
        for a, b in pairs:
            lo, hi = min(a, b), max(a, b)
            if lo == hi:
                continue
            assert z_of_x(bump, float(lo)) < z_of_x(bump, float(hi))

    @settings(max_examples=15, deadline=None)
    @given(admissible_profiles(), st.floats(0.0, 0.999))
    def test_inverse_pair_property(self, p, x):
        z = z_of_x(p, x)
        assert abs(x_of_z(p, z) - x) <= 1e-10

    def test_v_antiderivative_period(self, bump):
        # V has zero mean, so its antiderivative is L-periodic
        assert v_antiderivative(bump, 1.0) == pytest.approx(0.0, abs=1e-13)
        assert v_antiderivative(bump, 1.3) == pytest.approx(
            v_antiderivative(bump, 0.3), abs=1e-13
        )


class TestMeans:
    @settings(max_examples=20, deadline=None)
    @given(admissible_profiles())
    def test_means_exact(self, p):
        grid = np.linspace(0.0, 1.0, 2048, endpoint=False)
        assert abs(np.mean(eval_profile(p, "X", grid)) - 1.0) <= 1e-12
        assert abs(np.mean(eval_profile(p, "V", grid))) <= 1e-12


class TestJson:
    def test_roundtrip(self, bump):
        d = profile_to_json(bump)
        q = profile_from_json(d)
        assert q.x_hat == bump.x_hat
        assert q.v_hat == bump.v_hat
        assert q.L == bump.L

    def test_file_roundtrip(self, cos001, tmp_path):
        path = tmp_path / "profile.json"
        save_profile(cos001, path)
        q = load_profile(path)
        assert q == cos001

    def test_schema_shape(self, cos001):
        d = profile_to_json(cos001)
        assert set(d) == {"L", "x_hat", "v_hat"}
        assert all(len(row) == 3 for row in d["x_hat"])
