"""Resonance combinatorics for N discrete frequencies.

A multi-index m = (m_+, m_-) in N_0^{2N} carries the monomial
z^m = prod z_j^{m_+j} conj(z_j)^{m_-j} and the frequency
m . lam = sum_j (m_+j - m_-j) lam_j.  The tables below classify all
multi-indices up to the maximal order M into resonant-minimal, interior and
non-resonant sets, together with the frequency-matching subsets feeding the
profile recursion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegenerateInputError, GenericityError

__all__ = [
    "MultiIndex", "IndexTables", "GenericityReport",
    "dot_lambda", "precedes", "compute_M", "check_generic", "build_tables",
    "z_power", "enumerate_indices",
]

_EQ_TOL = 1e-12   # frequency coincidence tolerance inside table construction
_GEN_TOL = 1e-9   # near-violation tolerance of the genericity scan


@dataclass(frozen=True, order=True)
class MultiIndex:
    plus: tuple
    minus: tuple

    def __post_init__(self):
        if len(self.plus) != len(self.minus):
            raise ValueError("plus and minus parts must have equal length")
        if any(k < 0 for k in self.plus + self.minus):
            raise ValueError("multi-index entries must be nonnegative")

    @property
    def N(self) -> int:
        return len(self.plus)

    def norm(self) -> int:
        return sum(self.plus) + sum(self.minus)

    def conjugate(self) -> "MultiIndex":
        return MultiIndex(self.minus, self.plus)

    def is_zero(self) -> bool:
        return self.norm() == 0

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.plus, other.plus)),
                          tuple(a + b for a, b in zip(self.minus, other.minus)))

    def try_sub(self, other: "MultiIndex"):
        """self - other if the result stays in N_0^{2N}, else None."""
        p = tuple(a - b for a, b in zip(self.plus, other.plus))
        q = tuple(a - b for a, b in zip(self.minus, other.minus))
        if any(v < 0 for v in p + q):
            return None
        return MultiIndex(p, q)

    def __repr__(self):
        return f"({','.join(map(str, self.plus))}|{','.join(map(str, self.minus))})"


def unit_index(N: int, j: int, conjugated: bool = False) -> MultiIndex:
    """e^j (or its conjugate): 1 in slot j of the plus (minus) part."""
    e = tuple(1 if i == j else 0 for i in range(N))
    z = (0,) * N
    return MultiIndex(z, e) if conjugated else MultiIndex(e, z)


def dot_lambda(m: MultiIndex, lambdas) -> float:
    lam = np.asarray(lambdas, dtype=float)
    if lam.size != m.N:
        raise ValueError("frequency vector length mismatch")
    return float(sum((p - q) * l for p, q, l in zip(m.plus, m.minus, lam)))


def precedes(n: MultiIndex, m: MultiIndex) -> bool:
    """Strict partial order: componentwise total-degree dominance plus
    strictly smaller total order."""
    if n.N != m.N:
        raise ValueError("multi-index dimensions differ")
    if n.norm() >= m.norm():
        return False
    return all(np + nm <= mp + mm for np, nm, mp, mm
               in zip(n.plus, n.minus, m.plus, m.minus))


def z_power(z, m: MultiIndex) -> complex:
    z = np.asarray(z, dtype=complex)
    out = 1.0 + 0.0j
    for zj, p, q in zip(z, m.plus, m.minus):
        if p:
            out *= zj ** p
        if q:
            out *= np.conj(zj) ** q
    return complex(out)


def dz_power(z, m: MultiIndex, w) -> complex:
    """Real-directional derivative of z^m at z along the tangent w."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = 0.0 + 0.0j
    for j in range(m.N):
        if m.plus[j]:
            down = m.try_sub(unit_index(m.N, j))
            out += m.plus[j] * z_power(z, down) * w[j]
        if m.minus[j]:
            down = m.try_sub(unit_index(m.N, j, conjugated=True))
            out += m.minus[j] * z_power(z, down) * np.conj(w[j])
    return complex(out)


def enumerate_indices(N: int, max_order: int):
    """All multi-indices in N_0^{2N} of total order <= max_order."""
    for total in range(max_order + 1):
        for cuts in itertools.combinations(range(total + 2 * N - 1), 2 * N - 1):
            parts = []
            prev = -1
            for c in cuts:
                parts.append(c - prev - 1)
                prev = c
            parts.append(total + 2 * N - 2 - prev)
            yield MultiIndex(tuple(parts[:N]), tuple(parts[N:]))


def _order_bound(lambda1: float, mass: float):
    """Largest M with (M-1) lambda1 < mass, plus a flag for the boundary
    case where mass / lambda1 is an exact integer."""
    if lambda1 <= 0 or mass <= 0:
        raise ValueError("need positive lambda1 and mass")
    r = mass / lambda1
    k = round(r)
    boundary = abs(r - k) < 1e-9 * max(1.0, r)
    if boundary:
        return int(k), True
    return int(math.floor(r)) + 1, False


def compute_M(lambdas, mass: float) -> int:
    """Largest M in N with (M-1) lambda_1 < mass."""
    lam = np.sort(np.asarray(lambdas, dtype=float))
    M, boundary = _order_bound(float(lam[0]), mass)
    if boundary:
        raise DegenerateInputError(
            f"M lambda_1 = mass exactly (lambda_1={lam[0]}, mass={mass}); "
            "the maximal order is ill-conditioned at this boundary")
    return M


@dataclass
class GenericityReport:
    ok: bool
    M: int
    violations: list  # (MultiIndex, rule, value)

    def summary(self) -> str:
        if self.ok:
            return "ok"
        lines = [f"{m!r}: {rule} (value={val:.6g})"
                 for m, rule, val in self.violations]
        return "; ".join(lines)


def check_generic(lambdas, mass: float) -> GenericityReport:
    """Scan all orders <= M for (m.lam)^2 = mass^2 and orders <= 2M for
    frequency-zero indices with unbalanced plus/minus parts."""
    lam = np.asarray(lambdas, dtype=float)
    N = lam.size
    M, _ = _order_bound(float(lam.min()), mass)
    violations = []
    for m in enumerate_indices(N, 2 * M):
        if m.is_zero():
            continue
        om = dot_lambda(m, lam)
        if m.norm() <= M and abs(om * om - mass * mass) < _GEN_TOL:
            violations.append((m, "frequency-square hits mass^2", om))
        if abs(om) < _GEN_TOL and m.plus != m.minus:
            violations.append((m, "zero frequency with unbalanced index", om))
    return GenericityReport(not violations, M, violations)


@dataclass
class IndexTables:
    """Finite resonance tables for a frequency vector below threshold."""

    lambdas: tuple
    mass: float
    M: int
    nr: list
    r_min: list
    lambda0: list
    lambda_j: list          # one list per mode j
    lambda_j_bar: list

    @property
    def N(self) -> int:
        return len(self.lambdas)

    def omega(self, m: MultiIndex) -> float:
        return dot_lambda(m, self.lambdas)

    def to_report(self) -> dict:
        def enc(ms):
            return [[list(m.plus), list(m.minus)] for m in ms]
        return {
            "lambdas": list(self.lambdas),
            "mass": self.mass,
            "M": self.M,
            "NR": enc(self.nr),
            "R_min": enc(self.r_min),
            "Lambda0": enc(self.lambda0),
            "Lambda_j": [enc(s) for s in self.lambda_j],
        }


def _sorted(ms):
    return sorted(ms, key=lambda m: (m.norm(), m.plus, m.minus))


def build_tables(lambdas, mass: float, *, require_generic: bool = True) -> IndexTables:
    """Exhaustively classify all multi-indices of order <= M.

    Orders above M never enter the recursion (they all have a resonant-minimal
    predecessor), so the finite scan is complete.
    """
    lam = np.asarray(lambdas, dtype=float)
    if not np.all(np.diff(lam) > 0) or lam[0] <= 0:
        raise ValueError("frequencies must be strictly increasing and positive")
    if lam[-1] >= mass:
        raise ValueError("all frequencies must lie below the threshold mass")
    report = check_generic(lam, mass)
    if require_generic and not report.ok:
        raise GenericityError(report)
    M = report.M
    N = lam.size

    everything = list(enumerate_indices(N, M))
    in_R = {m for m in everything if abs(dot_lambda(m, lam)) > mass}
    r_min = [m for m in in_R
             if not any(precedes(n, m) for n in in_R if n is not m)]
    interior = {m for m in everything
                if any(precedes(n, m) for n in r_min)}
    nr = [m for m in everything if m not in interior and m not in set(r_min)]

    lambda_j, lambda_j_bar = [], []
    for j in range(N):
        vals = [m for m in nr if abs(dot_lambda(m, lam) - lam[j]) < _EQ_TOL]
        lambda_j.append(_sorted(vals))
        lambda_j_bar.append(_sorted([m.conjugate() for m in vals]))
    lambda0 = [m for m in nr
               if not m.is_zero() and abs(dot_lambda(m, lam)) < _EQ_TOL]

    tables = IndexTables(
        lambdas=tuple(float(v) for v in lam),
        mass=float(mass),
        M=M,
        nr=_sorted(nr),
        r_min=_sorted(r_min),
        lambda0=_sorted(lambda0),
        lambda_j=lambda_j,
        lambda_j_bar=lambda_j_bar,
    )
    _validate_tables(tables)
    return tables


def _validate_tables(t: IndexTables) -> None:
    nr_set = set(t.nr)
    for m in t.nr:
        if m.conjugate() not in nr_set:
            raise AssertionError(f"NR not closed under conjugation at {m!r}")
        if abs(t.omega(m)) >= t.mass:
            raise AssertionError(f"non-resonant index {m!r} at or above threshold")
    for m in t.r_min:
        if not (all(v == 0 for v in m.plus) or all(v == 0 for v in m.minus)):
            raise AssertionError(f"resonant-minimal index {m!r} mixes signs")
    for m in t.lambda0:
        if m.conjugate() not in set(t.lambda0):
            raise AssertionError("Lambda_0 not closed under conjugation")
