"""Iterated Darboux transformations.

Each step factorizes L_k - lambda_k^2 = A_k A_k^* through the node-free
ground state psi_k, removes the lowest eigenvalue and produces the next
potential V_{k+1} = V_k - 2 (log psi_k)''.  After N steps the final
potential V_D has empty discrete spectrum below the threshold; the operators
A_k compose to the intertwiner used by the transformed variable, together
with its smoothing conjugation and left inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ChainError, UnsupportedOperationError
from .grid import (Field, Grid, StatePair, bessel_multiplier_array,
                   derivative_array, quadrature)
from .spectral import (SchrodingerOperator, Spectrum, discrete_spectrum,
                       resolvent_apply)

__all__ = [
    "DarbouxChain", "build_chain", "ground_state", "check_repulsive_potential",
]


def smooth_plateau(s: np.ndarray) -> np.ndarray:
    """C^2 plateau: 1 for s <= 0, 0 for s >= 1, quintic blend between."""
    t = np.clip(s, 0.0, 1.0)
    return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def tail_window(grid: Grid, start_frac: float = 0.8,
                stop_frac: float = 0.9) -> np.ndarray:
    """Smooth cutoff equal to 1 on |x| <= start_frac X, 0 beyond stop_frac X."""
    X = grid.half_width
    s = (np.abs(grid.x) - start_frac * X) / ((stop_frac - start_frac) * X)
    return smooth_plateau(s)


def ground_state(op: SchrodingerOperator, spectrum: Spectrum | None = None):
    """Normalized strictly positive lowest eigenfunction."""
    spec = spectrum if spectrum is not None else discrete_spectrum(op)
    if spec.N == 0:
        raise ChainError("operator has no bound state below the threshold")
    psi = spec.phi(1)
    amax = np.max(np.abs(psi))
    core = np.abs(psi) > 1e-10 * amax
    if np.any(psi[core] <= 0):
        raise ChainError("computed ground state changes sign; eigensolver "
                         "returned an inconsistent lowest mode")
    return psi, spec


def _log_derivative(grid: Grid, psi: np.ndarray, beta: float) -> np.ndarray:
    """psi'/psi with a smooth blend to the asymptotic slopes -+ beta where
    the eigenvector tail is below the trust floor."""
    amax = np.max(np.abs(psi))
    level = np.log10(np.maximum(np.abs(psi) / amax, 1e-300))
    # Three zones. Core: spectral derivative of psi divided by psi (exact to
    # rounding while psi is O(1)). Tail: psi is node free, so psi'/psi is the
    # stencil derivative of log psi, which keeps relative accuracy as psi
    # decays (the log is not periodic across the box seam, hence no spectral
    # path). Deep tail: the eigenvector is rounding noise, use the asymptote.
    w_core = derivative_array(grid, psi, 1) / np.where(np.abs(psi) > 1e-300,
                                                       psi, 1e-300)
    logpsi = np.log(np.maximum(psi, 1e-300))
    w_tail = derivative_array(grid, logpsi, 1, method="stencil")
    w_asym = -np.sign(grid.x) * beta
    core_blend = smooth_plateau((-2.0 - level) / 1.0)
    w_num = core_blend * w_core + (1.0 - core_blend) * w_tail
    tail_blend = smooth_plateau((-5.0 - level) / 2.0)
    return tail_blend * w_num + (1.0 - tail_blend) * w_asym


@dataclass
class DarbouxChain:
    """Potentials V_1..V_{N+1} and the factorization data linking them."""

    op: SchrodingerOperator
    potentials: list            # N + 1 arrays
    ground_states: list         # N arrays
    log_derivs: list            # N arrays (psi_k'/psi_k, tail regularized)
    removed: np.ndarray         # lambda_k^2 in removal order
    spectra: list               # Spectrum of each L_k, k = 1..N+1

    @property
    def N(self) -> int:
        return len(self.ground_states)

    @property
    def grid(self) -> Grid:
        return self.op.grid

    @property
    def mass_sq(self) -> float:
        return self.op.mass_sq

    @property
    def V_D(self) -> np.ndarray:
        return self.potentials[-1]

    def operator(self, k: int) -> SchrodingerOperator:
        """L_k for k = 1..N+1 (1-based; N+1 is the transformed operator)."""
        return SchrodingerOperator(self.grid, self.potentials[k - 1],
                                   self.mass_sq, self.op.stencil_order)

    # -- first order factors ------------------------------------------------

    def apply_A(self, k: int, f: np.ndarray) -> np.ndarray:
        """A_k f = f' + (psi_k'/psi_k) f."""
        return derivative_array(self.grid, f, 1) + self.log_derivs[k - 1] * f

    def apply_A_star(self, k: int, f: np.ndarray) -> np.ndarray:
        """A_k^* f = -f' + (psi_k'/psi_k) f."""
        return -derivative_array(self.grid, f, 1) + self.log_derivs[k - 1] * f

    def apply_calA(self, f: np.ndarray) -> np.ndarray:
        """A_1 ... A_N, rightmost factor first."""
        out = f
        for k in range(self.N, 0, -1):
            out = self.apply_A(k, out)
        return out

    def apply_calA_star(self, f: np.ndarray) -> np.ndarray:
        """A_N^* ... A_1^*, rightmost factor first."""
        out = f
        for k in range(1, self.N + 1):
            out = self.apply_A_star(k, out)
        return out

    # -- smoothing conjugation ----------------------------------------------

    def _window(self) -> np.ndarray:
        return tail_window(self.grid)

    def T_apply_array(self, eps: float, f: np.ndarray) -> np.ndarray:
        if self.N == 0:
            return f.copy()
        out = self.apply_calA_star(f) * self._window()
        return bessel_multiplier_array(self.grid, out, eps, -self.N)

    def T_apply(self, eps: float, eta: StatePair) -> StatePair:
        """Transformed variable v: the smoothed intertwiner applied to both
        components."""
        return StatePair.from_arrays(self.grid,
                                     self.T_apply_array(eps, eta.f1),
                                     self.T_apply_array(eps, eta.f2))

    def T_left_inverse_array(self, spectrum: Spectrum, eps: float,
                             v: np.ndarray) -> np.ndarray:
        """Reconstruct u from v = T u for u in the continuous subspace:
        undo the multiplier, apply the forward intertwiner, project and
        invert the deflated resolvents at each removed eigenvalue."""
        if self.N == 0:
            return v.copy()
        out = bessel_multiplier_array(self.grid, v, eps, +self.N)
        out = self.apply_calA(out)
        out = spectrum.project_Pc_array(out)
        for j in range(1, spectrum.N + 1):
            mu = spectrum.eigenvalues[j - 1]
            out = resolvent_apply(self.op, mu, spectrum.project_Pc_array(out),
                                  deflate=(spectrum.phi(j), mu))
        return out

    def commutator_VD_array(self, eps: float, f: np.ndarray) -> np.ndarray:
        """[multiplier, V_D] applied to the intertwined field."""
        if eps == 0 or self.N == 0:
            return np.zeros_like(f)
        g = self.apply_calA_star(f) * self._window()
        a = bessel_multiplier_array(self.grid, self.V_D * g, eps, -self.N)
        b = self.V_D * bessel_multiplier_array(self.grid, g, eps, -self.N)
        return a - b

    # -- verification helpers -----------------------------------------------

    def check_conjugation(self, f: np.ndarray) -> float:
        """Relative size of (intertwiner L_1 - L_D intertwiner) f."""
        lhs = self.apply_calA_star(self.op.apply(f))
        rhs = self.operator(self.N + 1).apply(self.apply_calA_star(f))
        return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(f), 1e-300))

    def check_factorization(self, f: np.ndarray) -> float:
        """Relative size of (A_1..A_N A_N^*..A_1^* - prod (L_1 - mu_j)) f."""
        lhs = self.apply_calA(self.apply_calA_star(f))
        rhs = f.copy()
        for mu in self.removed:
            rhs = self.op.apply(rhs) - mu * rhs
        return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(f), 1e-300))

    def check_repulsive(self) -> "RepulsiveReport":
        return check_repulsive_potential(self.grid, self.V_D)

    def decay_rate_at_edge(self) -> float:
        """Fitted exponential decay rate of V_D over the outer part of its
        resolved range (between 1e-2 and 1e-5 of its peak, clear of both the
        core and the rounding floor)."""
        x, V = self.grid.x, np.abs(self.V_D)
        vmax = V.max()
        if vmax < 1e-200:
            return math.inf
        sel = (V > 1e-5 * vmax) & (V < 1e-2 * vmax) & (np.abs(x) > 1.0)
        if sel.sum() < 8:
            return math.inf
        coeffs = np.polyfit(np.abs(x[sel]), np.log(V[sel]), 1)
        return float(-coeffs[0])


@dataclass
class RepulsiveReport:
    sign_ok: bool
    nonzero_ok: bool
    max_positive: float
    min_value: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.sign_ok and self.nonzero_ok

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (f"repulsiveness {verdict}: max x V' = {self.max_positive:.3e}, "
                f"min x V' = {self.min_value:.3e} (tol {self.tolerance:.1e}; "
                f"sign {'ok' if self.sign_ok else 'violated'}, "
                f"nondegeneracy {'ok' if self.nonzero_ok else 'violated'})")


def check_repulsive_potential(grid: Grid, V: np.ndarray) -> RepulsiveReport:
    """x V'(x) <= 0 everywhere and strictly negative somewhere."""
    xvp = grid.x * derivative_array(grid, V, 1)
    tol = 1e-6 * max(1.0, float(np.max(np.abs(xvp))))
    return RepulsiveReport(
        sign_ok=bool(np.max(xvp) <= tol),
        nonzero_ok=bool(np.min(xvp) < -10.0 * tol),
        max_positive=float(np.max(xvp)),
        min_value=float(np.min(xvp)),
        tolerance=tol,
    )


def build_chain(op: SchrodingerOperator,
                spectrum: Spectrum | None = None) -> DarbouxChain:
    """Remove all bound states one by one, verifying removal at each step.

    Uses the eigen-equation form (log psi)'' = V + m^2 - lambda^2 - (psi'/psi)^2
    so that only first derivatives of the computed eigenvector enter.
    """
    spec1 = spectrum if spectrum is not None else discrete_spectrum(op)
    expected = list(spec1.eigenvalues)
    potentials = [op.potential.copy()]
    grounds, logds, spectra = [], [], [spec1]
    current, spec = op, spec1

    for step in range(spec1.N):
        if spec.N == 0:
            raise ChainError(f"step {step + 1}: expected a remaining bound state")
        mu = spec.eigenvalues[0]
        if abs(mu - expected[step]) > 1e-6 * max(1.0, abs(expected[step])):
            raise ChainError(
                f"step {step + 1}: lowest remaining eigenvalue {mu:.9g} does "
                f"not match the original spectrum value {expected[step]:.9g}")
        psi, _ = ground_state(current, spec)
        beta = math.sqrt(max(op.mass_sq - mu, 0.0))
        w = _log_derivative(op.grid, psi, beta)
        V_next = 2.0 * w * w - potentials[-1] - 2.0 * (op.mass_sq - mu)
        grounds.append(psi)
        logds.append(w)
        potentials.append(V_next)
        current = SchrodingerOperator(op.grid, V_next, op.mass_sq,
                                      op.stencil_order)
        spec = discrete_spectrum(current)
        spectra.append(spec)
        if spec.N != spec1.N - step - 1:
            raise ChainError(
                f"step {step + 1}: expected {spec1.N - step - 1} remaining "
                f"bound states, found {spec.N}")

    return DarbouxChain(op=op, potentials=potentials, ground_states=grounds,
                        log_derivs=logds,
                        removed=np.asarray(expected), spectra=spectra)
