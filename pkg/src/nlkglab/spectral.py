"""Discretized Schrodinger operators L = -d2/dx2 + V + mass^2.

Bound states below the threshold mass^2, the projection onto the continuous
subspace, banded/sparse resolvents (optionally deflated against a bound
state) and bounded generalized eigenfunctions above the threshold with
radiation boundary conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateInputError, SingularSolveError
from .grid import Field, Grid, StatePair, quadrature

__all__ = [
    "SchrodingerOperator", "Spectrum", "ScatteringState",
    "discrete_spectrum", "resolvent_apply", "scattering_state",
]

_THRESHOLD_GUARD = 1e-6  # relative exclusion zone around mass^2


# second-derivative stencils (negative Laplacian rows are -1 * these)
_STENCILS = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
}


@dataclass
class SchrodingerOperator:
    grid: Grid
    potential: np.ndarray
    mass_sq: float
    stencil_order: int = 4

    def __post_init__(self):
        self.potential = np.asarray(self.potential, dtype=float)
        if self.potential.shape != (self.grid.n,):
            raise ValueError("potential samples do not match the grid")
        if self.stencil_order not in (2, 4):
            raise ValueError("stencil_order must be 2 or 4")
        if self.mass_sq <= 0:
            raise ValueError("mass_sq must be positive")
        self._matrix = None

    @property
    def bandwidth(self) -> int:
        return self.stencil_order // 2

    def decay_report(self, a1: float, prefactor: float) -> dict:
        """Check |V| <= prefactor * exp(-a1 |x|) at the box edge."""
        x, V = self.grid.x, self.potential
        edge = np.abs(x) >= 0.9 * self.grid.half_width
        bound = prefactor * np.exp(-a1 * np.abs(x[edge]))
        worst = float(np.max(np.abs(V[edge]) - bound))
        return {"ok": bool(worst <= 1e-12), "worst_excess": worst}

    def matrix(self) -> sp.csr_matrix:
        """Sparse matrix of the operator (interior stencil rows; clamped
        grids truncate outside the box, periodic grids wrap)."""
        if self._matrix is not None:
            return self._matrix
        n, h = self.grid.n, self.grid.h
        bw = self.bandwidth
        coeffs = -_STENCILS[self.stencil_order] / (h * h)
        diag = coeffs[bw] + self.potential + self.mass_sq
        mat = sp.lil_matrix((n, n))
        mat.setdiag(diag)
        for off in range(1, bw + 1):
            c = coeffs[bw + off]
            mat.setdiag(np.full(n - off, c), off)
            mat.setdiag(np.full(n - off, c), -off)
            if self.grid.boundary == "periodic":
                for k in range(off):
                    mat[k, n - off + k] = c
                    mat[n - off + k, k] = c
        self._matrix = mat.tocsr()
        return self._matrix

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix() @ v

    def apply_pair(self, u: StatePair) -> StatePair:
        """Matrix operator diag(L, 1) on a two-component state."""
        return StatePair.from_arrays(u.grid, self.apply(u.f1), u.f2.copy())


@dataclass
class Spectrum:
    """Bound states of a discretized operator, sorted by eigenvalue."""

    op: SchrodingerOperator
    eigenvalues: np.ndarray          # lambda_j^2, ascending
    eigenfunctions: list             # L2 normalized real arrays
    residuals: np.ndarray

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambdas(self) -> np.ndarray:
        return np.sqrt(self.eigenvalues)

    @property
    def grid(self) -> Grid:
        return self.op.grid

    def phi(self, j: int) -> np.ndarray:
        """Eigenfunction for lambda_j^2, 1-based index."""
        return self.eigenfunctions[j - 1]

    def matrix_eigvector(self, j: int) -> StatePair:
        """Eigenvector (phi_j, i lambda_j phi_j) of the linearized flow."""
        if not 1 <= j <= self.N:
            raise IndexError(f"mode index {j} out of range 1..{self.N}")
        phi = self.phi(j).astype(complex)
        lam = self.lambdas[j - 1]
        return StatePair.from_arrays(self.grid, phi, 1j * lam * phi)

    def project_Pc_array(self, v: np.ndarray) -> np.ndarray:
        out = v.astype(complex) if np.iscomplexobj(v) else v.copy()
        for phi in self.eigenfunctions:
            out = out - quadrature(self.grid, phi * out) * phi
        return out

    def project_Pc(self, f):
        if isinstance(f, Field):
            return Field(f.grid, self.project_Pc_array(f.values))
        if isinstance(f, StatePair):
            return StatePair.from_arrays(f.grid,
                                         self.project_Pc_array(f.f1),
                                         self.project_Pc_array(f.f2))
        return self.project_Pc_array(np.asarray(f))

    def report(self) -> str:
        lines = [f"bound states: {self.N} (threshold mass^2 = {self.op.mass_sq:.12g})"]
        for j in range(self.N):
            lines.append(
                f"  j={j + 1}: lambda^2 = {self.eigenvalues[j]:.12g}, "
                f"lambda = {self.lambdas[j]:.12g}, residual = {self.residuals[j]:.3e}")
        return "\n".join(lines)


def _refine_eigenpair(mat, ev: float, v: np.ndarray, rounds: int = 2):
    """Inverse iteration with Rayleigh updates.

    Krylov eigenvectors carry a flat noise floor in their exponential tails;
    solving against the shifted operator restores the true decay because the
    resolvent kernel itself decays.
    """
    shifted = None
    for _ in range(rounds):
        if shifted is None:
            offset = 1e-9 * max(1.0, abs(ev))
            shifted = spla.splu((mat - (ev + offset)
                                 * sp.identity(mat.shape[0], format="csr")).tocsc())
        w = shifted.solve(v)
        nrm = np.linalg.norm(w)
        if not np.isfinite(nrm) or nrm == 0.0:
            return ev, v
        v = w / nrm
    ev = float(v @ (mat @ v)) / float(v @ v)
    return ev, v


def _fix_sign(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Make the first extremum from the left positive."""
    amax = np.max(np.abs(v))
    dv = np.diff(v)
    for i in range(1, len(v) - 1):
        if abs(v[i]) > 1e-6 * amax and dv[i - 1] * dv[i] <= 0:
            return -v if v[i] < 0 else v
    return -v if v[np.argmax(np.abs(v))] < 0 else v


def discrete_spectrum(op: SchrodingerOperator, *, max_states: int = 32) -> Spectrum:
    """All eigenvalues strictly below mass^2 with normalized eigenfunctions.

    Eigenvalues within the relative guard band of the threshold are refused;
    resolvents and scattering data degrade there.
    """
    m2 = op.mass_sq
    guard = _THRESHOLD_GUARD * m2
    upper = m2 + 10.0 * guard
    lo = m2 + float(np.min(op.potential)) - 1.0

    # shift-invert about a point below the whole spectrum returns the lowest
    # eigenvalues first; grow k until the threshold region is covered
    mat = op.matrix().tocsc()
    k = 8
    while True:
        k = min(k, op.grid.n - 2)
        vals, vecs = spla.eigsh(mat, k=k, sigma=lo, which="LM")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals[-1] > upper or k >= min(max_states, op.grid.n - 2):
            break
        k *= 2
    keep = vals <= upper
    vals, vecs = vals[keep], vecs[:, keep]

    # States just below threshold are pathological only when they are
    # localized; the discretized continuum edge (a box-filling mode that can
    # land on either side of m^2, exactly at it for a periodic free box) is
    # silently excluded instead.
    edge_zone = np.abs(op.grid.x) > 0.9 * op.grid.half_width
    for idx, v in enumerate(vals):
        if m2 - guard <= v < m2:
            vec = vecs[:, idx]
            localized = np.max(np.abs(vec[edge_zone])) < 1e-3 * np.max(np.abs(vec))
            if localized:
                raise DegenerateInputError(
                    f"eigenvalue {v:.9g} within the guard band below the "
                    f"threshold {m2:.9g}; the operator is too close to a "
                    "threshold resonance")
    keep = np.asarray(vals) < m2 - guard
    vals, vecs = list(np.asarray(vals)[keep]), vecs[:, keep]
    if vals and vals[0] <= 0:
        raise DegenerateInputError(
            f"lowest eigenvalue {vals[0]:.6g} is not positive; the spectral "
            "condition 0 < lambda_1 requires a shallower potential or larger mass")

    phis, residuals = [], []
    mat = op.matrix()
    refined = []
    for idx, ev in enumerate(vals):
        v = np.ascontiguousarray(vecs[:, idx], dtype=float)
        ev, v = _refine_eigenpair(mat, ev, v)
        refined.append(ev)
        v = v / math.sqrt(abs(quadrature(op.grid, v * v)))
        v = _fix_sign(op.grid, v)
        phis.append(v)
        residuals.append(float(np.linalg.norm(mat @ v - ev * v)
                               / max(np.linalg.norm(v), 1e-300)))
    vals = refined
    return Spectrum(op=op, eigenvalues=np.asarray(vals, dtype=float),
                    eigenfunctions=phis, residuals=np.asarray(residuals))


# ----------------------------------------------------------------------
# resolvents


def _solve_real_matrix(lu, rhs: np.ndarray) -> np.ndarray:
    """Solve a real factorized system against a possibly complex rhs."""
    if np.iscomplexobj(rhs):
        parts = lu.solve(np.column_stack([rhs.real, rhs.imag]))
        return parts[:, 0] + 1j * parts[:, 1]
    return lu.solve(rhs)


def _lu_solve(op: SchrodingerOperator, omega: float, rhs: np.ndarray) -> np.ndarray:
    mat = (op.matrix() - omega * sp.identity(op.grid.n, format="csr")).tocsc()
    try:
        lu = spla.splu(mat)
        sol = _solve_real_matrix(lu, rhs)
    except RuntimeError as exc:
        raise SingularSolveError(f"factorization at omega={omega:.9g} failed: {exc}")
    return sol


def resolvent_apply(op: SchrodingerOperator, omega: float, f,
                    *, deflate: tuple | None = None,
                    rel_tol: float = 1e-10):
    """Solve (L - omega) g = f.

    With deflate=(phi, eigenvalue) the solve is restricted to the orthogonal
    complement of the bound state phi via a bordered system (f is projected
    off phi first), which is the projected resolvent at omega = lambda_j^2.
    """
    arr = f.values if isinstance(f, Field) else np.asarray(f)
    grid = op.grid
    if deflate is None:
        sol = _lu_solve(op, omega, arr)
        resid = np.linalg.norm(op.apply(sol) - omega * sol - arr)
        scale = np.linalg.norm(arr)
        if scale > 0 and (resid > 1e-6 * max(scale, np.linalg.norm(sol) * 1e-12)
                          or not np.all(np.isfinite(sol))
                          or np.linalg.norm(sol) > 1e12 * scale):
            raise SingularSolveError(
                f"resolvent at omega={omega:.9g} is singular or ill-conditioned "
                f"(residual {resid:.2e}, amplification {np.linalg.norm(sol) / scale:.2e})")
    else:
        phi, _ = deflate
        w = grid.h * np.ones(grid.n)
        if grid.boundary == "clamped":
            w[0] *= 0.5
            w[-1] *= 0.5
        rhs_in = arr - quadrature(grid, phi * arr) * phi
        a = (op.matrix() - omega * sp.identity(grid.n, format="csr")).tolil()
        col = (w * phi).reshape(-1, 1)
        bordered = sp.bmat([[a, col], [col.T, None]], format="csc")
        rhs = np.concatenate([rhs_in, [0.0]])
        sol_full = _solve_real_matrix(spla.splu(bordered), rhs)
        sol = sol_full[:-1]
        if not np.all(np.isfinite(sol)):
            raise SingularSolveError("deflated resolvent solve produced non-finite values")
    if isinstance(f, Field):
        return Field(grid, sol)
    return sol


# ----------------------------------------------------------------------
# scattering states


@dataclass
class ScatteringState:
    """Bounded generalized eigenfunction with unit incoming amplitude."""

    grid: Grid
    omega: float
    k: float
    incoming: str                 # "left" or "right"
    values: np.ndarray            # first component g1; lift with g2 = i omega g1
    transmission: complex
    reflection: complex

    def as_pair(self) -> StatePair:
        return StatePair.from_arrays(self.grid, self.values,
                                     1j * self.omega * self.values)

    def unitarity_defect(self) -> float:
        return abs(abs(self.transmission) ** 2 + abs(self.reflection) ** 2 - 1.0)


# 4th order one-sided first-derivative rows (offsets 0..4 and -1..3)
_BC_EDGE = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_ROW_SEMI1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0  # d2 at offset -1..4


def scattering_state(op: SchrodingerOperator, omega: float,
                     incoming: str = "left") -> ScatteringState:
    """Solve (L - omega^2) g = 0 with radiation conditions g' = +- i k g at
    the box edges and unit incoming amplitude, k = sqrt(omega^2 - mass^2).

    Negative omega returns the complex conjugate state (same k).
    """
    if omega ** 2 <= op.mass_sq:
        raise ValueError("scattering needs omega^2 above the threshold mass^2")
    if incoming not in ("left", "right"):
        raise ValueError("incoming must be 'left' or 'right'")
    if omega < 0:
        st = scattering_state(op, -omega, incoming)
        return ScatteringState(st.grid, omega, st.k, incoming,
                               np.conj(st.values), np.conj(st.transmission),
                               np.conj(st.reflection))

    grid = op.grid
    n, h, x = grid.n, grid.h, grid.x
    k = math.sqrt(omega * omega - op.mass_sq)
    h2 = h * h
    Veff = op.potential + op.mass_sq - omega * omega

    rows, cols, data = [], [], []

    def add(i, j, v):
        rows.append(i)
        cols.append(j)
        data.append(v)

    # interior: 4th order centered; rows 1 and n-2 use the semi-one-sided row
    c4 = _STENCILS[4]
    for i in range(2, n - 2):
        for off in range(-2, 3):
            add(i, i + off, -c4[off + 2] / h2)
        add(i, i, Veff[i])
    for j, c in enumerate(_ROW_SEMI1):
        add(1, j, -c / h2)
        add(n - 2, n - 1 - j, -c / h2)
    add(1, 1, Veff[1])
    add(n - 2, n - 2, Veff[n - 2])

    rhs = np.zeros(n, dtype=complex)
    # boundary rows: one-sided 4th order derivative with the Robin condition
    for j, c in enumerate(_BC_EDGE):
        add(0, j, c / h)
        add(n - 1, n - 1 - j, -c / h)
    if incoming == "left":
        add(0, 0, 1j * k)             # g' + i k g = 2 i k e^{i k x} at the left
        add(n - 1, n - 1, -1j * k)    # g' - i k g = 0 at the right (outgoing)
        rhs[0] = 2j * k * np.exp(1j * k * x[0])
    else:
        add(0, 0, 1j * k)             # g' + i k g = 0 at the left (outgoing)
        add(n - 1, n - 1, -1j * k)    # g' - i k g = -2 i k e^{-i k x} at the right
        rhs[n - 1] = -2j * k * np.exp(-1j * k * x[-1])

    mat = sp.csc_matrix((data, (rows, cols)), shape=(n, n), dtype=complex)
    g = spla.splu(mat).solve(rhs)

    if incoming == "left":
        t = complex(g[-1] * np.exp(-1j * k * x[-1]))
        r = complex((g[0] - np.exp(1j * k * x[0])) * np.exp(1j * k * x[0]))
    else:
        t = complex(g[0] * np.exp(1j * k * x[0]))
        r = complex((g[-1] - np.exp(-1j * k * x[-1])) * np.exp(-1j * k * x[-1]))
    return ScatteringState(grid, omega, k, incoming, g, t, r)
