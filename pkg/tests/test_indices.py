"""Resonance combinatorics against a raw brute-force enumerator."""

import itertools

import numpy as np
import pytest

from nlkglab.errors import DegenerateInputError, GenericityError
from nlkglab.indices import (MultiIndex, build_tables, check_generic,
                             compute_M, dot_lambda, enumerate_indices,
                             precedes, unit_index, z_power)


def mi(plus, minus):
    return MultiIndex(tuple(plus), tuple(minus))


# ----------------------------------------------------------------------
# independent oracle, written directly from the set definitions with plain
# tuples; shares nothing with the implementation beyond arithmetic


def oracle_tables(lambdas, mass):
    N = len(lambdas)
    lam1 = min(lambdas)
    # largest M with (M - 1) lam1 < mass
    M = 1
    while M * lam1 < mass:
        M += 1

    def all_of_order(top):
        ranges = [range(top + 1)] * (2 * N)
        for tup in itertools.product(*ranges):
            if sum(tup) <= top:
                yield tup[:N], tup[N:]

    def omega(p, q):
        return sum((a - b) * l for a, b, l in zip(p, q, lambdas))

    def norm(p, q):
        return sum(p) + sum(q)

    def prec(n, m):
        (np_, nm), (mp, mm) = n, m
        if norm(np_, nm) >= norm(mp, mm):
            return False
        return all(a + b <= c + d for a, b, c, d in zip(np_, nm, mp, mm))

    univ = list(all_of_order(M))
    R = [m for m in univ if abs(omega(*m)) > mass]
    Rmin = [m for m in R if not any(prec(n, m) for n in R)]
    I = [m for m in univ if any(prec(n, m) for n in Rmin)]
    NR = [m for m in univ if m not in I and m not in Rmin]
    L0 = [m for m in NR if norm(*m) > 0 and abs(omega(*m)) < 1e-12]
    Lj = [[m for m in NR if abs(omega(*m) - lambdas[j]) < 1e-12]
          for j in range(N)]
    return M, set(NR), set(Rmin), set(L0), [set(s) for s in Lj]


def as_tuple_set(ms):
    return {(m.plus, m.minus) for m in ms}


# ----------------------------------------------------------------------


class TestDotLambda:
    def test_single_mode(self):
        assert dot_lambda(mi([2], [0]), [0.6]) == pytest.approx(1.2)

    def test_balanced(self):
        assert dot_lambda(mi([1], [1]), [0.6]) == 0.0

    def test_two_modes(self):
        assert dot_lambda(mi([1, 1], [0, 0]), [0.4, 0.7]) == pytest.approx(1.1)


class TestPrecedes:
    def test_strict_domination(self):
        assert precedes(mi([2], [0]), mi([3], [1]))

    def test_equal_norm_fails(self):
        assert not precedes(mi([2], [0]), mi([1], [1]))

    def test_irreflexive(self):
        m = mi([2], [1])
        assert not precedes(m, m)


class TestComputeM:
    @pytest.mark.parametrize("lam,mass,M", [
        ((0.6,), 1.0, 2),
        ((0.9,), 1.0, 2),
        ((0.4, 0.7), 1.0, 3),
        ((0.3,), 1.0, 4),
    ])
    def test_values(self, lam, mass, M):
        assert compute_M(lam, mass) == M

    def test_boundary_degenerate(self):
        with pytest.raises(DegenerateInputError):
            compute_M((0.5,), 1.0)


class TestCheckGeneric:
    def test_canonical_ok(self):
        assert check_generic((0.6,), 1.0).ok

    def test_square_resonance_detected(self):
        rep = check_generic((0.5,), 1.0)
        assert not rep.ok
        assert any(m == mi([2], [0]) for m, _, _ in rep.violations)

    def test_unbalanced_zero_frequency(self):
        rep = check_generic((0.3, 0.6), 1.0)
        viol = [m for m, rule, _ in rep.violations if "zero frequency" in rule]
        assert mi([2, 0], [0, 1]) in viol

    def test_mixed_sign_square_resonance(self):
        # 2 * 0.7 - 0.4 = 1.0 hits the threshold with norm 3 <= M
        rep = check_generic((0.4, 0.7), 1.0)
        assert any(m == mi([0, 2], [1, 0]) for m, _, _ in rep.violations)


class TestBuildTables:
    def test_canonical_explicit(self):
        t = build_tables((0.6,), 1.0)
        assert t.M == 2
        assert as_tuple_set(t.nr) == {((0,), (0,)), ((1,), (0,)),
                                      ((0,), (1,)), ((1,), (1,))}
        assert as_tuple_set(t.r_min) == {((2,), (0,)), ((0,), (2,))}
        assert as_tuple_set(t.lambda_j[0]) == {((1,), (0,))}
        assert as_tuple_set(t.lambda0) == {((1,), (1,))}

    def test_deep_single_mode(self):
        t = build_tables((0.3,), 1.0)
        assert as_tuple_set(t.r_min) == {((4,), (0,)), ((0,), (4,))}
        assert ((2,), (1,)) in as_tuple_set(t.nr)
        assert ((2,), (1,)) in as_tuple_set(t.lambda_j[0])

    def test_two_mode_rmin_members(self):
        t = build_tables((0.4, 0.7), 1.0, require_generic=False)
        r = as_tuple_set(t.r_min)
        for member in [((1, 1), (0, 0)), ((3, 0), (0, 0)), ((0, 2), (0, 0))]:
            assert member in r
            assert (member[1], member[0]) in r

    def test_refuses_nongeneric(self):
        with pytest.raises(GenericityError):
            build_tables((0.4, 0.7), 1.0)

    @pytest.mark.parametrize("lam,mass,generic", [
        ((0.6,), 1.0, True),
        ((0.3,), 1.0, True),
        ((0.4, 0.7), 1.0, False),
        ((0.23,), 1.0, True),
        ((0.35, 0.8), 1.0, True),
    ])
    def test_oracle_equivalence(self, lam, mass, generic):
        t = build_tables(lam, mass, require_generic=generic)
        M, NR, Rmin, L0, Lj = oracle_tables(list(lam), mass)
        assert t.M == M
        assert as_tuple_set(t.nr) == NR
        assert as_tuple_set(t.r_min) == Rmin
        assert as_tuple_set(t.lambda0) == L0
        for j in range(len(lam)):
            assert as_tuple_set(t.lambda_j[j]) == Lj[j]

    def test_nr_has_no_rmin_predecessor(self):
        t = build_tables((0.3,), 1.0)
        for m in t.nr:
            assert not any(precedes(n, m) for n in t.r_min)

    def test_conjugation_closure(self):
        t = build_tables((0.35, 0.8), 1.0)
        nr = set(t.nr)
        assert all(m.conjugate() in nr for m in t.nr)
        for j in range(t.N):
            assert as_tuple_set(t.lambda_j_bar[j]) == \
                {(m.minus, m.plus) for m in t.lambda_j[j]}

    def test_lambda_j_decomposition(self):
        # every frequency-matching index splits off one unit index with the
        # remainder either zero or frequency-free
        for lam in [(0.3,), (0.35, 0.8)]:
            t = build_tables(lam, 1.0)
            zero_ok = set(t.lambda0) | {mi([0] * t.N, [0] * t.N)}
            for j in range(t.N):
                for m in t.lambda_j[j]:
                    n = m.try_sub(unit_index(t.N, j))
                    assert n is not None and n in zero_ok

    def test_report_roundtrip(self):
        t = build_tables((0.6,), 1.0)
        rep = t.to_report()
        assert rep["M"] == 2
        assert [[1], [0]] in rep["NR"]


class TestZPower:
    def test_square(self):
        assert z_power([0.1], mi([2], [0])) == pytest.approx(0.01)

    def test_conjugate_square(self):
        assert z_power([0.1j], mi([0], [2])) == pytest.approx(-0.01)

    def test_empty_index(self):
        assert z_power([0.3 + 0.7j], mi([0], [0])) == 1.0

    def test_conjugation_identity(self):
        rng = np.random.default_rng(7)
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        m = mi([2, 1], [0, 3])
        assert np.conj(z_power(z, m)) == pytest.approx(z_power(z, m.conjugate()))


def test_enumerate_indices_count():
    # number of multi-indices of order <= M in N_0^{2N} is C(M + 2N, 2N)
    got = sum(1 for _ in enumerate_indices(2, 3))
    assert got == 35
