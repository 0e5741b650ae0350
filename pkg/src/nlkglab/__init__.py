"""Desk-scale numerical laboratory for 1D nonlinear Klein-Gordon equations
with trapping potentials: spectra, Darboux chains, dressed mode profiles,
Fermi-golden-rule coefficients, time integration with modulation
decomposition, and the virial/localized-norm diagnostics."""

__version__ = "0.1.0"

from .kernels import BACKEND as stepper_backend  # noqa: F401
