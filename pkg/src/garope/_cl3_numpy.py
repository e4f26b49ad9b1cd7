"""Vectorized numpy fallback for the fixed-size Cl(3,0) kernels.

Coefficient layout per 8-slot element: (1, e1, e2, e12, e3, e31, e23, e123).
The expanded 64-term expressions below were generated from the generic
blade-table product in that layout and are locked in by a test that
re-derives them; edit the generator, not these lines.
"""

import numpy as np

REVERSE_SIGNS = np.array([1.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def gp_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product of (n, 8) against (n, 8), row-wise."""
    a0, a1, a2, a3, a4, a5, a6, a7 = (a[:, i] for i in range(8))
    b0, b1, b2, b3, b4, b5, b6, b7 = (b[:, i] for i in range(8))
    out = np.empty_like(a)
    out[:, 0] = a0*b0 + a1*b1 + a2*b2 - a3*b3 + a4*b4 - a5*b5 - a6*b6 - a7*b7
    out[:, 1] = a0*b1 + a1*b0 - a2*b3 + a3*b2 + a4*b5 - a5*b4 - a6*b7 - a7*b6
    out[:, 2] = a0*b2 + a1*b3 + a2*b0 - a3*b1 - a4*b6 - a5*b7 + a6*b4 - a7*b5
    out[:, 3] = a0*b3 + a1*b2 - a2*b1 + a3*b0 + a4*b7 + a5*b6 - a6*b5 + a7*b4
    out[:, 4] = a0*b4 - a1*b5 + a2*b6 - a3*b7 + a4*b0 + a5*b1 - a6*b2 - a7*b3
    out[:, 5] = a0*b5 - a1*b4 + a2*b7 - a3*b6 + a4*b1 + a5*b0 + a6*b3 + a7*b2
    out[:, 6] = a0*b6 + a1*b7 + a2*b4 + a3*b5 - a4*b2 - a5*b3 + a6*b0 + a7*b1
    out[:, 7] = a0*b7 + a1*b6 + a2*b5 + a3*b4 + a4*b3 + a5*b2 + a6*b1 + a7*b0
    return out


def rotor_sandwich_batch(r: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Row-wise R a ~R for even rotors r; reversion signs folded into the
    second product so no reversed copy of r is materialized."""
    t = gp_batch(r, a)
    t0, t1, t2, t3, t4, t5, t6, t7 = (t[:, i] for i in range(8))
    r0, r1, r2, r3, r4, r5, r6, r7 = (r[:, i] for i in range(8))
    out = np.empty_like(a)
    out[:, 0] = t0*r0 + t1*r1 + t2*r2 + t3*r3 + t4*r4 + t5*r5 + t6*r6 + t7*r7
    out[:, 1] = t0*r1 + t1*r0 + t2*r3 + t3*r2 - t4*r5 - t5*r4 + t6*r7 + t7*r6
    out[:, 2] = t0*r2 - t1*r3 + t2*r0 - t3*r1 + t4*r6 + t5*r7 + t6*r4 + t7*r5
    out[:, 3] = -t0*r3 + t1*r2 - t2*r1 + t3*r0 - t4*r7 - t5*r6 + t6*r5 + t7*r4
    out[:, 4] = t0*r4 + t1*r5 - t2*r6 + t3*r7 + t4*r0 + t5*r1 - t6*r2 + t7*r3
    out[:, 5] = -t0*r5 - t1*r4 - t2*r7 + t3*r6 + t4*r1 + t5*r0 - t6*r3 + t7*r2
    out[:, 6] = -t0*r6 - t1*r7 + t2*r4 - t3*r5 - t4*r2 + t5*r3 + t6*r0 + t7*r1
    out[:, 7] = -t0*r7 - t1*r6 - t2*r5 + t3*r4 - t4*r3 + t5*r2 + t6*r1 + t7*r0
    return out
