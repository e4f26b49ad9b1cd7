"""Quaternion algebra mapped onto the even subalgebra of Cl(3,0).

Quaternions are float64 arrays of shape (..., 4) in (w, x, y, z) order,
i.e. scalar first then the i, j, k coefficients. Pure quaternions double
as 3D vectors and are passed around as plain (..., 3) arrays.

The basis correspondence with Cl(3,0) is 1 -> 1, i -> e12, j -> e23,
k -> e13, which matches both multiplication tables cell for cell and
therefore turns the Hamilton product into the geometric product.
"""

from __future__ import annotations

import numpy as np

from .ga import Algebra, Multivector, UNIT_TOL

PURE_RESIDUE_TOL = 1e-12  # scalar residue allowed after a sandwich, then truncated

# (i, j, k) coefficients live at blade masks 0b011, 0b110, 0b101
_EVEN_MASKS = (0, 0b011, 0b110, 0b101)


def quat(w: float, x: float, y: float, z: float) -> np.ndarray:
    return np.array([w, x, y, z], dtype=np.float64)


def hamilton_product(p, q) -> np.ndarray:
    """Hamilton product on (..., 4) arrays, broadcasting like numpy."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    pw, px, py, pz = (p[..., i] for i in range(4))
    qw, qx, qy, qz = (q[..., i] for i in range(4))
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def _require_unit(r: np.ndarray) -> None:
    mag = np.sum(r * r, axis=-1)
    if np.any(np.abs(mag - 1.0) > UNIT_TOL):
        raise ValueError("quaternion rotor is not unit norm")


def quat_rotor(axis, half_angle) -> np.ndarray:
    """Unit rotor cos(h) + sin(h) u for a unit pure-quaternion axis u.

    Broadcasts: axis (..., 3) against half_angle (...,). The axis must be
    unit length within UNIT_TOL (normalize upstream; a zero axis is an
    error, not a convention).
    """
    axis = np.asarray(axis, dtype=np.float64)
    half_angle = np.asarray(half_angle, dtype=np.float64)
    mag = np.sum(axis * axis, axis=-1)
    if np.any(np.abs(mag - 1.0) > UNIT_TOL):
        raise ValueError("rotation axis must be a unit 3-vector")
    w = np.cos(half_angle)
    xyz = np.sin(half_angle)[..., None] * axis
    return np.concatenate([w[..., None], xyz], axis=-1)


def quat_sandwich(r, v) -> np.ndarray:
    """Rotate pure quaternion(s) v (..., 3) by unit rotor(s) r: r v r^-1.

    The scalar part of the result is round-off only; it is checked to be
    below PURE_RESIDUE_TOL (scaled by |v| above unit magnitude) and then
    dropped so the output is exactly pure.
    """
    r = np.asarray(r, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    _require_unit(r)
    vq = np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)
    out = hamilton_product(hamilton_product(r, vq), conjugate(r))
    scale = max(1.0, float(np.max(np.sqrt(np.sum(v * v, axis=-1)), initial=0.0)))
    residue = float(np.max(np.abs(out[..., 0]), initial=0.0))
    if residue > PURE_RESIDUE_TOL * scale:
        raise ValueError(f"sandwich scalar residue {residue!r} exceeds tolerance")
    return out[..., 1:]


def quat_to_rotation_matrix(r) -> np.ndarray:
    """3x3 proper rotation matrix M with M v = quat_sandwich(r, v)."""
    r = np.asarray(r, dtype=np.float64)
    _require_unit(r)
    w, x, y, z = (r[..., i] for i in range(4))
    row0 = np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1)
    row1 = np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1)
    row2 = np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def quat_to_even_cl3(q) -> Multivector:
    """Embed a quaternion into the even subalgebra of Cl(3,0).

    Exact coefficient placement (1, i, j, k) -> (1, e12, e23, e13); a
    product homomorphism, inverted by even_cl3_to_quat.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4,):
        raise ValueError("expected a single quaternion of shape (4,)")
    coeffs = np.zeros(8)
    for qi, mask in enumerate(_EVEN_MASKS):
        coeffs[mask] = q[qi]
    return Multivector(3, coeffs)


def even_cl3_to_quat(mv: Multivector, odd_tol: float = 1e-12) -> np.ndarray:
    """Inverse embedding; rejects multivectors with odd-grade content."""
    if mv.dim != 3:
        raise ValueError("expected a Cl(3,0) multivector")
    odd = Algebra(3).grades % 2 == 1
    worst = float(np.max(np.abs(mv.coeffs[odd]), initial=0.0))
    if worst > odd_tol:
        raise ValueError(f"multivector has odd-grade coefficients up to {worst!r}")
    return np.array([mv.coeffs[mask] for mask in _EVEN_MASKS])
