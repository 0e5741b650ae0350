"""Darboux chain: closed-form sech^2 ladders and operator identities.

The solvable family V = -s(s+1) sech^2 steps down to -(s-1)s sech^2 when the
ground state (proportional to sech^s) is removed, which anchors every
potential in the chain to a closed form.
"""

import math

import numpy as np
import pytest

from nlkglab.darboux import (build_chain, check_repulsive_potential,
                             ground_state, tail_window)
from nlkglab.errors import ChainError
from nlkglab.grid import Grid, StatePair, quadrature
from nlkglab.spectral import SchrodingerOperator, discrete_spectrum


def sech(x):
    return 1.0 / np.cosh(x)


@pytest.fixture(scope="module")
def grid():
    return Grid(30.0, 2048, "periodic")


@pytest.fixture(scope="module")
def canonical(grid):
    """Shallow well with one bound state at lambda^2 = 0.36."""
    op = SchrodingerOperator(grid, -1.44 * sech(grid.x) ** 2, 1.0)
    return build_chain(op)


@pytest.fixture(scope="module")
def integrable(grid):
    """Reflectionless well whose transformed potential vanishes."""
    op = SchrodingerOperator(grid, -2.0 * sech(grid.x) ** 2, 4.0)
    return build_chain(op)


def _random_bumps(grid, rng, count=1, width_lo=1.5, width_hi=3.5):
    x = grid.x
    f = np.zeros(grid.n)
    for _ in range(count):
        f += rng.standard_normal() * np.exp(
            -((x - rng.uniform(-5, 5)) / rng.uniform(width_lo, width_hi)) ** 2)
    return f


class TestGroundState:
    def test_integrable_closed_form(self, grid):
        op = SchrodingerOperator(grid, -2.0 * sech(grid.x) ** 2, 4.0)
        psi, _ = ground_state(op)
        assert np.max(np.abs(psi - sech(grid.x) / math.sqrt(2.0))) < 1e-5

    def test_fractional_power_closed_form(self, grid):
        op = SchrodingerOperator(grid, -1.44 * sech(grid.x) ** 2, 1.0)
        psi, _ = ground_state(op)
        ref = sech(grid.x) ** 0.8
        ref /= math.sqrt(quadrature(grid, ref * ref))
        assert np.max(np.abs(psi - ref)) < 1e-4

    def test_positivity(self, canonical):
        assert canonical.ground_states[0].min() > 0

    def test_no_bound_state_error(self, grid):
        op = SchrodingerOperator(grid, +sech(grid.x) ** 2, 1.0)
        with pytest.raises(ChainError):
            ground_state(op)


class TestFirstOrderFactors:
    def test_kernel_of_A_star(self, canonical):
        psi = canonical.ground_states[0]
        out = canonical.apply_A_star(1, psi)
        assert np.linalg.norm(out) < 1e-8 * np.linalg.norm(psi)

    def test_adjointness(self, canonical, grid):
        rng = np.random.default_rng(21)
        for _ in range(5):
            f, g = _random_bumps(grid, rng), _random_bumps(grid, rng)
            a = quadrature(grid, canonical.apply_A(1, f) * g)
            b = quadrature(grid, f * canonical.apply_A_star(1, g))
            assert a == pytest.approx(b, rel=1e-8, abs=1e-10)

    def test_AAstar_is_shifted_operator(self, canonical, grid):
        rng = np.random.default_rng(22)
        f = _random_bumps(grid, rng)
        lhs = canonical.apply_A(1, canonical.apply_A_star(1, f))
        mu = canonical.removed[0]
        rhs = canonical.op.apply(f) - mu * f
        assert np.linalg.norm(lhs - rhs) < 1e-6 * np.linalg.norm(f)

    def test_AstarA_is_next_operator(self, canonical, grid):
        rng = np.random.default_rng(23)
        f = _random_bumps(grid, rng)
        lhs = canonical.apply_A_star(1, canonical.apply_A(1, f))
        mu = canonical.removed[0]
        rhs = canonical.operator(2).apply(f) - mu * f
        assert np.linalg.norm(lhs - rhs) < 1e-6 * np.linalg.norm(f)


class TestChainPotentials:
    def test_integrable_becomes_free(self, integrable):
        assert np.max(np.abs(integrable.V_D)) < 1e-5

    def test_canonical_closed_form(self, canonical, grid):
        # s = 0.8 ladder: V_D = s(1 - s) * 1.8... = 0.16 sech^2
        ref = 0.16 * sech(grid.x) ** 2
        assert np.max(np.abs(canonical.V_D - ref)) < 1e-4

    def test_two_step_ladder(self, grid):
        op = SchrodingerOperator(grid, -6.0 * sech(grid.x) ** 2, 6.25)
        chain = build_chain(op)
        assert chain.N == 2
        # the faster-decaying s = 2 ladder carries larger O(h^4)
        # eigenvector discretization error than the shallow canonical well
        assert np.max(np.abs(chain.potentials[1] + 2.0 * sech(grid.x) ** 2)) < 5e-5
        assert np.max(np.abs(chain.V_D)) < 5e-5

    def test_final_spectrum_empty(self, canonical):
        assert canonical.spectra[-1].N == 0

    def test_log_derivative_consistency(self, canonical, grid):
        # independent second-derivative route to (log psi)'' on the core
        from nlkglab.grid import derivative_array
        psi = canonical.ground_states[0]
        core = np.abs(psi) > 1e-5 * psi.max()
        d1 = derivative_array(grid, psi, 1)
        d2 = derivative_array(grid, psi, 2)
        direct = (d2 * psi - d1 * d1)[core] / psi[core] ** 2
        V2 = canonical.potentials[1]
        chained = ((canonical.op.potential - V2) / 2.0)[core]
        assert np.max(np.abs(direct - chained)) < 2e-5

    def test_decay_rate(self, canonical):
        # V_D inherits the sech^2 decay; far faster than the 10 kappa floor
        assert canonical.decay_rate_at_edge() > 0.4


class TestOperatorIdentities:
    def test_conjugation_random_fields(self, canonical, grid):
        rng = np.random.default_rng(24)
        for _ in range(20):
            f = _random_bumps(grid, rng, count=2)
            assert canonical.check_conjugation(f) < 1e-6

    def test_conjugation_kernel(self, canonical):
        psi = canonical.ground_states[0]
        lhs = canonical.apply_calA_star(canonical.op.apply(psi))
        assert np.linalg.norm(lhs) < 1e-6 * np.linalg.norm(psi)

    def test_factorization_random_fields(self, canonical, grid):
        rng = np.random.default_rng(25)
        for _ in range(20):
            f = _random_bumps(grid, rng, count=2)
            assert canonical.check_factorization(f) < 1e-6

    def test_factorization_two_modes(self, grid):
        op = SchrodingerOperator(grid, -6.0 * sech(grid.x) ** 2, 6.25)
        chain = build_chain(op)
        rng = np.random.default_rng(26)
        f = _random_bumps(grid, rng)
        assert chain.check_factorization(f) < 1e-4


class TestRepulsiveness:
    def test_canonical_passes(self, canonical):
        rep = canonical.check_repulsive()
        assert rep.ok, rep.summary()

    def test_integrable_fails_nondegeneracy(self, integrable):
        rep = integrable.check_repulsive()
        assert rep.sign_ok
        assert not rep.nonzero_ok

    def test_constructed_well_fails_sign(self, grid):
        V = 0.16 * sech(grid.x) ** 2 - 0.05 * sech((grid.x - 6.0) / 1.5) ** 2
        rep = check_repulsive_potential(grid, V)
        assert not rep.sign_ok


class TestSmoothingConjugation:
    def test_empty_chain_is_identity(self, grid):
        op = SchrodingerOperator(grid, +0.1 * sech(grid.x) ** 2, 1.0)
        chain = build_chain(op)
        assert chain.N == 0
        rng = np.random.default_rng(27)
        f = _random_bumps(grid, rng)
        pair = StatePair.from_arrays(grid, f, 0 * f)
        out = chain.T_apply(0.25, pair)
        assert np.array_equal(out.f1, f)
        assert chain.check_conjugation(f) == 0.0
        assert chain.check_factorization(f) < 1e-12

    def test_bound_state_in_kernel(self, canonical, grid):
        phi = canonical.ground_states[0]
        pair = StatePair.from_arrays(grid, phi, 0 * phi)
        v = canonical.T_apply(0.25, pair)
        assert np.linalg.norm(v.f1) < 1e-6 * np.linalg.norm(phi)

    def test_left_inverse_round_trip(self, canonical, grid):
        spec = canonical.spectra[0]
        rng = np.random.default_rng(28)
        for _ in range(20):
            u = spec.project_Pc_array(_random_bumps(grid, rng, count=2))
            v = canonical.T_apply_array(0.25, u)
            back = canonical.T_left_inverse_array(spec, 0.25, v)
            assert np.linalg.norm(back - u) < 1e-6 * np.linalg.norm(u)

    def test_left_inverse_kills_bound_state(self, canonical, grid):
        spec = canonical.spectra[0]
        phi = canonical.ground_states[0]
        v = canonical.T_apply_array(0.25, phi)
        back = canonical.T_left_inverse_array(spec, 0.25, v)
        assert np.linalg.norm(back) < 1e-6

    def test_weighted_smoothing_bound(self, canonical, grid):
        # || sech(4x/A) T u || <= C eps^{-N} || sech(2x/A) u ||, C moderate
        rng = np.random.default_rng(29)
        A = 40.0
        wo = sech(4.0 * grid.x / A)
        wi = sech(2.0 * grid.x / A)
        for eps in (0.4, 0.2, 0.1):
            worst = 0.0
            for _ in range(10):
                u = _random_bumps(grid, rng, count=3)
                v = canonical.T_apply_array(eps, u)
                num = math.sqrt(quadrature(grid, np.abs(wo * v) ** 2))
                den = math.sqrt(quadrature(grid, np.abs(wi * u) ** 2))
                worst = max(worst, num / den * eps ** canonical.N)
            assert worst < 20.0


class TestCommutator:
    def test_eps_zero(self, canonical, grid):
        f = np.exp(-(grid.x / 3) ** 2)
        assert np.linalg.norm(canonical.commutator_VD_array(0.0, f)) == 0.0

    def test_vanishing_potential(self, integrable, grid):
        f = np.exp(-(grid.x / 3) ** 2)
        out = integrable.commutator_VD_array(0.25, f)
        # V_D is numerically zero so the commutator is at noise level
        assert np.linalg.norm(out) < 1e-5 * np.linalg.norm(f)

    def test_eps_scaling_at_least_linear(self, canonical, grid):
        rng = np.random.default_rng(30)
        kappa = 0.04
        wk = sech(kappa * grid.x)
        ratios = []
        for eps in (0.4, 0.2, 0.1):
            worst = 0.0
            for _ in range(10):
                u = _random_bumps(grid, rng, count=2)
                com = canonical.commutator_VD_array(eps, u)
                tv = canonical.T_apply_array(eps, u)
                num = math.sqrt(quadrature(grid, com * com))
                den = math.sqrt(quadrature(grid, (wk * tv) ** 2))
                worst = max(worst, num / den)
            ratios.append(worst)
        assert ratios[1] <= 0.65 * ratios[0]
        assert ratios[2] <= 0.65 * ratios[1]


def test_tail_window_profile(grid):
    w = tail_window(grid)
    x = np.abs(grid.x)
    assert np.all(w[x <= 0.8 * grid.half_width] == 1.0)
    assert np.all(w[x >= 0.9 * grid.half_width] == 0.0)
