"""Pure-numpy fallback for the leapfrog kernel.

Mirrors nlkglab._stepper.step_batch operation for operation so both backends
agree to rounding error.
"""

from __future__ import annotations

import numpy as np


def _accel(u1, Veff, fcoeffs, inv12h2, out):
    # 4th order periodic Laplacian
    np.multiply(u1, -30.0, out=out)
    out += 16.0 * np.roll(u1, 1)
    out += 16.0 * np.roll(u1, -1)
    out -= np.roll(u1, 2)
    out -= np.roll(u1, -2)
    out *= inv12h2
    out -= Veff * u1
    if fcoeffs.size:
        acc = np.zeros_like(u1)
        for c in fcoeffs[::-1]:
            acc *= u1
            acc += c
        out -= u1 * u1 * acc
    return out


def step_batch(u1, u2, Veff, fcoeffs, h, dt, nsteps, damping):
    n = u1.shape[0]
    damped = damping.shape[0] == n
    inv12h2 = 1.0 / (12.0 * h * h)
    half = 0.5 * dt
    acc = np.empty(n, dtype=np.float64)
    for _ in range(nsteps):
        _accel(u1, Veff, fcoeffs, inv12h2, acc)
        u2 += half * acc
        u1 += dt * u2
        _accel(u1, Veff, fcoeffs, inv12h2, acc)
        u2 += half * acc
        if damped:
            u1 *= damping
            u2 *= damping
    return 0
