"""Uniform symmetric 1D grids and the fields living on them.

Provides the bilinear pairing, the real inner product, the symplectic form
of the first-order formulation, derivatives (spectral on periodic grids,
4th-order stencils on clamped ones), Bessel-type Fourier multipliers and the
weighted norms used by the diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (BoxOverflowError, GridMismatchError,
                     UnsupportedOperationError)

__all__ = [
    "Grid", "Field", "StatePair", "WeightParams",
    "quadrature", "pairing", "real_pairing", "symplectic_form",
    "derivative", "bessel_multiplier", "weighted_norm", "jbracket",
]


# ----------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class Grid:
    """Uniform grid symmetric about x = 0 on [-X, X].

    Periodic grids sample [-X, X) with spacing 2X/n (n even); clamped grids
    include both endpoints with spacing 2X/(n-1).
    """

    half_width: float
    n: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.boundary not in ("periodic", "clamped"):
            raise ValueError(f"unknown boundary kind {self.boundary!r}")
        if self.boundary == "periodic":
            if self.n < 64 or self.n % 2:
                raise ValueError("periodic grids need n >= 64 and n even")
        elif self.n < 16:
            raise ValueError("clamped grids need n >= 16")

    @property
    def h(self) -> float:
        if self.boundary == "periodic":
            return 2.0 * self.half_width / self.n
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return -self.half_width + self.h * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        if self.boundary != "periodic":
            raise UnsupportedOperationError("wavenumbers need a periodic grid")
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def zeros(self, complex_: bool = False) -> np.ndarray:
        return np.zeros(self.n, dtype=np.complex128 if complex_ else np.float64)

    def same_as(self, other: "Grid") -> bool:
        return (self.boundary == other.boundary and self.n == other.n
                and math.isclose(self.half_width, other.half_width))


def _check_same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("operands live on different grids")


# ----------------------------------------------------------------------
# fields


@dataclass
class Field:
    """Scalar samples (real or complex) on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise ValueError("value array does not match the grid")

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values))

    def real_part(self) -> "Field":
        return Field(self.grid, np.real(self.values).copy())

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def __add__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c):
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


@dataclass
class StatePair:
    """Two-component state (position and momentum components)."""

    first: Field
    second: Field

    def __post_init__(self):
        if not self.first.grid.same_as(self.second.grid):
            raise GridMismatchError("pair components live on different grids")

    @classmethod
    def from_arrays(cls, grid: Grid, u1, u2) -> "StatePair":
        return cls(Field(grid, np.asarray(u1)), Field(grid, np.asarray(u2)))

    @classmethod
    def zero(cls, grid: Grid, complex_: bool = False) -> "StatePair":
        return cls.from_arrays(grid, grid.zeros(complex_), grid.zeros(complex_))

    @property
    def grid(self) -> Grid:
        return self.first.grid

    @property
    def f1(self) -> np.ndarray:
        return self.first.values

    @property
    def f2(self) -> np.ndarray:
        return self.second.values

    def conj(self) -> "StatePair":
        return StatePair(self.first.conj(), self.second.conj())

    def real_part(self) -> "StatePair":
        return StatePair(self.first.real_part(), self.second.real_part())

    def copy(self) -> "StatePair":
        return StatePair(self.first.copy(), self.second.copy())

    def apply_J(self) -> "StatePair":
        """J (u1, u2) = (u2, -u1)."""
        return StatePair.from_arrays(self.grid, self.f2.copy(), -self.f1)

    def apply_Jinv(self) -> "StatePair":
        """J^{-1} (u1, u2) = (-u2, u1)."""
        return StatePair.from_arrays(self.grid, -self.f2, self.f1.copy())

    def __add__(self, other):
        return StatePair(self.first + other.first, self.second + other.second)

    def __sub__(self, other):
        return StatePair(self.first - other.first, self.second - other.second)

    def __mul__(self, c):
        return StatePair(self.first * c, self.second * c)

    __rmul__ = __mul__

    def __neg__(self):
        return StatePair(-self.first, -self.second)


# ----------------------------------------------------------------------
# quadrature and pairings


def quadrature(grid: Grid, values: np.ndarray):
    """Integrate samples over the box (Riemann sum on periodic grids,
    trapezoid on clamped ones)."""
    if grid.boundary == "periodic":
        return grid.h * values.sum()
    return grid.h * (values.sum() - 0.5 * (values[0] + values[-1]))


def _raw(u):
    if isinstance(u, Field):
        return u.grid, (u.values,)
    if isinstance(u, StatePair):
        return u.grid, (u.f1, u.f2)
    raise TypeError(f"expected Field or StatePair, got {type(u)!r}")


def pairing(u, v):
    """Bilinear pairing (u, v) = integral of u^T v, no conjugation."""
    gu, cu = _raw(u)
    gv, cv = _raw(v)
    if not gu.same_as(gv):
        raise GridMismatchError("pairing operands on different grids")
    if len(cu) != len(cv):
        raise GridMismatchError("pairing mixes scalar and two-component data")
    acc = sum(quadrature(gu, a * b) for a, b in zip(cu, cv))
    return acc


def real_pairing(u, v):
    """Real inner product <u, v> = Re (u, conj v)."""
    gv, cv = _raw(v)
    if isinstance(v, Field):
        vc = v.conj()
    else:
        vc = v.conj()
    return float(np.real(pairing(u, vc)))


def symplectic_form(u: StatePair, v: StatePair) -> float:
    """Omega(u, v) = <J^{-1} u, v>."""
    if not isinstance(u, StatePair) or not isinstance(v, StatePair):
        raise TypeError("symplectic_form needs two-component states")
    return real_pairing(u.apply_Jinv(), v)


def bilinear_symplectic(u: StatePair, v: StatePair):
    """Complex-bilinear version (J^{-1} u, v); equals Omega on real states."""
    return pairing(u.apply_Jinv(), v)


# ----------------------------------------------------------------------
# derivatives

# one-sided / semi-one-sided 4th order rows (first derivative)
_D1_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D1_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
# second derivative edge rows
_D2_EDGE0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_D2_EDGE1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0


def _derivative_array(grid: Grid, v: np.ndarray, order: int,
                      method: str = "auto") -> np.ndarray:
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    h = grid.h
    if grid.boundary == "periodic" and method == "auto":
        k = grid.wavenumbers
        sym = (1j * k) ** order
        out = np.fft.ifft(sym * np.fft.fft(v))
        if not np.iscomplexobj(v):
            return out.real.copy()
        return out
    # clamped: centered 4th order stencil, one-sided rows at the edges
    out = np.empty_like(v)
    if order == 1:
        out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
        out[0] = _D1_EDGE0 @ v[:5] / h
        out[1] = _D1_EDGE1 @ v[:5] / h
        out[-1] = -(_D1_EDGE0 @ v[-1:-6:-1]) / h
        out[-2] = -(_D1_EDGE1 @ v[-1:-6:-1]) / h
    else:
        out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2]
                     + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
        out[0] = _D2_EDGE0 @ v[:6] / (h * h)
        out[1] = _D2_EDGE1 @ v[:6] / (h * h)
        out[-1] = _D2_EDGE0 @ v[-1:-7:-1] / (h * h)
        out[-2] = _D2_EDGE1 @ v[-1:-7:-1] / (h * h)
    return out


def derivative(f, order: int = 1):
    """d^order/dx^order, spectral (periodic) or 4th order stencil (clamped)."""
    if isinstance(f, Field):
        return Field(f.grid, _derivative_array(f.grid, f.values, order))
    if isinstance(f, StatePair):
        return StatePair(derivative(f.first, order), derivative(f.second, order))
    raise TypeError("derivative expects Field or StatePair")


def derivative_array(grid: Grid, v: np.ndarray, order: int = 1,
                     method: str = "auto") -> np.ndarray:
    """Array-level derivative for internal hot paths.

    method="stencil" forces the finite-difference path even on periodic
    grids (needed for samples that are smooth on the box but not periodic).
    """
    return _derivative_array(grid, v, order, method)


# ----------------------------------------------------------------------
# Fourier multipliers


def bessel_multiplier_array(grid: Grid, v: np.ndarray, eps: float,
                            exponent: float) -> np.ndarray:
    if grid.boundary != "periodic":
        raise UnsupportedOperationError(
            "Bessel multipliers are transform based and need a periodic grid; "
            "window the field onto a periodic box first")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0 or exponent == 0:
        return v.copy()
    k = grid.wavenumbers
    mult = (1.0 + (eps * k) ** 2) ** (exponent / 2.0)
    out = np.fft.ifft(mult * np.fft.fft(v))
    if not np.iscomplexobj(v):
        return out.real.copy()
    return out


def bessel_multiplier(f, eps: float, exponent: float):
    """Apply (1 + eps^2 k^2)^(exponent/2) mode-wise on a periodic grid."""
    if isinstance(f, Field):
        return Field(f.grid, bessel_multiplier_array(f.grid, f.values, eps, exponent))
    if isinstance(f, StatePair):
        return StatePair(bessel_multiplier(f.first, eps, exponent),
                         bessel_multiplier(f.second, eps, exponent))
    raise TypeError("bessel_multiplier expects Field or StatePair")


# ----------------------------------------------------------------------
# weights and norms


def jbracket(x):
    """Smoothed absolute value sqrt(1 + x^2)."""
    return np.sqrt(1.0 + np.square(x))


@dataclass(frozen=True)
class WeightParams:
    """Rates and scales of the weighted norms.

    a is the localization rate of the weighted energy norm, kappa the rate of
    the strongest localized L2 norm, A and B the outer/inner virial scales,
    eps the smoothing scale of the Bessel multiplier and a2 the exponential
    rate that the profile coefficients decay with.
    """

    a: float
    kappa: float
    A: float
    B: float
    eps: float
    a2: float

    def __post_init__(self):
        if min(self.a, self.kappa, self.A, self.B, self.eps) <= 0:
            raise ValueError("all weight parameters must be positive")
        if self.A < 2.0 / self.kappa:
            raise ValueError(
                f"A={self.A} too small: the localized-norm comparison needs "
                f"A >= 2/kappa = {2.0 / self.kappa:.3g}")

    @classmethod
    def for_spectrum(cls, mass: float, lambda_max: float, a1: float, *,
                     A: float = 40.0, B: float = 8.0, eps: float = 0.25,
                     a: float | None = None,
                     kappa: float | None = None) -> "WeightParams":
        if not 0 < lambda_max < mass:
            raise ValueError("need 0 < lambda_max < mass")
        kappa_max = min(mass - lambda_max, a1) / 10.0
        if kappa is None:
            kappa = kappa_max
        elif not 0 < kappa <= kappa_max + 1e-12:
            raise ValueError(f"kappa must lie in (0, {kappa_max:.4g}]")
        a2 = 0.5 * math.sqrt(mass * mass - lambda_max * lambda_max)
        if a is None:
            a = kappa
        return cls(a=a, kappa=kappa, A=A, B=B, eps=eps, a2=a2)


_NORM_KINDS = ("H1", "H1_minus_a", "SigmaA", "L2_minus_kappa", "Sigma_exp")


def _as_pair(u) -> StatePair:
    if isinstance(u, StatePair):
        return u
    if isinstance(u, Field):
        return StatePair(u, Field(u.grid, np.zeros_like(u.values)))
    raise TypeError("expected Field or StatePair")


def _l2(grid, arr):
    return math.sqrt(abs(quadrature(grid, np.abs(arr) ** 2)))


def _pair_l2(grid, u1, u2):
    return math.sqrt(abs(quadrature(grid, np.abs(u1) ** 2 + np.abs(u2) ** 2)))


def _energy_norm(grid, u1, u2):
    """H1 norm of the first component plus L2 of the second, combined."""
    du1 = _derivative_array(grid, u1, 1)
    val = quadrature(grid, np.abs(u1) ** 2 + np.abs(du1) ** 2 + np.abs(u2) ** 2)
    return math.sqrt(abs(val))


def weighted_norm(u, kind: str, params: WeightParams) -> float:
    """Evaluate one of the named weighted norms of the estimates."""
    if kind not in _NORM_KINDS:
        raise ValueError(f"unknown norm kind {kind!r}; choose from {_NORM_KINDS}")
    p = _as_pair(u)
    grid, x = p.grid, p.grid.x
    u1, u2 = p.f1, p.f2
    if kind == "H1":
        return _energy_norm(grid, u1, u2)
    if kind == "H1_minus_a":
        w = 1.0 / np.cosh(params.a * x)
        return _energy_norm(grid, w * u1, w * u2)
    if kind == "SigmaA":
        w = 1.0 / np.cosh(2.0 * x / params.A)
        du1 = _derivative_array(grid, u1, 1)
        return _l2(grid, w * du1) + _pair_l2(grid, w * u1, w * u2) / params.A
    if kind == "L2_minus_kappa":
        w = 1.0 / np.cosh(params.kappa * x)
        return _pair_l2(grid, w * u1, w * u2)
    # Sigma_exp
    expo = params.a2 * jbracket(x)
    if expo.max() > 700.0:
        raise BoxOverflowError(
            "exp(a2 <x>) overflows double precision on this box; "
            "shrink the half-width or lower a2")
    w = np.exp(expo)
    return _energy_norm(grid, w * u1, w * u2)
