"""Attention-score experiments over the positional encodings.

Scores are pre-softmax scaled dot products; softmax is monotone and would
only blur the tolerances, so equivariance is measured on the raw scores.
The interesting dichotomy: methods whose two coordinate rotations commute
(rope1d, mixed) give scores that depend only on position differences,
while spherical/quatro/care with non-parallel axes do not — a uniform
shift of all positions moves their scores by a measurable gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encodings import (
    METHOD_WIDTHS,
    EncodingMethod,
    TokenBlock,
    apply_encoding,
    care_apply,
    mixed_apply,
    quatro_apply,
    rope1d_apply,
    spherical_apply,
)

MIN_DIRECTIONS = 100
_DIRECTION_SEED = 20240915  # fixed so commutator sampling is reproducible


@dataclass(frozen=True)
class AttentionScores:
    """Pre-softmax score matrices, one tokens x tokens slab per batch row."""

    scores: np.ndarray  # (batch, tokens, tokens)

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 3 or scores.shape[1] != scores.shape[2]:
            raise ValueError("scores must be batch x tokens x tokens")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores contain non-finite values")
        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)

    @property
    def tokens(self) -> int:
        return self.scores.shape[1]


def score_matrix(
    q_block: TokenBlock, k_block: TokenBlock, method: EncodingMethod
) -> AttentionScores:
    """Encode queries and keys, then form (Q K^T) / sqrt(head_dim)."""
    if q_block.data.shape != k_block.data.shape:
        raise ValueError("query and key blocks must share batch/tokens/head_dim")
    if not np.array_equal(q_block.positions, k_block.positions):
        raise ValueError("query and key blocks must share positions")
    q = apply_encoding(q_block, method).data
    k = apply_encoding(k_block, method).data
    scores = np.einsum("btd,bsd->bts", q, k) / np.sqrt(q_block.head_dim)
    return AttentionScores(scores=scores)


def shift_positions(block: TokenBlock, shift) -> TokenBlock:
    """Same data, every position moved by one common 2D offset."""
    shift = np.asarray(shift, dtype=np.float64)
    if shift.shape != (2,):
        raise ValueError("shift must be a 2-vector")
    return TokenBlock(data=block.data, positions=block.positions + shift)


def shift_invariance_gap(method: EncodingMethod, block: TokenBlock, shift) -> float:
    """Max-abs score change when all positions move by a common shift.

    Zero (to round-off) exactly when the method's position rotations
    commute, so relative offsets are all that matter.
    """
    base = score_matrix(block, block, method).scores
    moved_block = shift_positions(block, shift)
    moved = score_matrix(moved_block, moved_block, method).scores
    return float(np.max(np.abs(base - moved)))


def _unit_directions(width: int, count: int) -> np.ndarray:
    """Deterministic unit-sphere sample: circle / Fibonacci sphere / seeded."""
    if count < MIN_DIRECTIONS:
        raise ValueError(f"need at least {MIN_DIRECTIONS} directions")
    if width == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    if width == 3:
        i = np.arange(count, dtype=np.float64)
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = np.sqrt(1.0 - z * z)
        phi = i * np.pi * (3.0 - np.sqrt(5.0))  # golden angle
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    pts = np.random.default_rng(_DIRECTION_SEED).standard_normal((count, width))
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def _band_rotation(method: EncodingMethod, band: int):
    """The sub-vector rotation v -> R(p) v for one schedule band."""
    theta = float(method.schedule.band_angles[band])
    sx, sy = method.scale_x, method.scale_y
    tag = method.tag

    def rotate(p, v):
        ax = theta * sx * float(p[0])
        ay = theta * sy * float(p[1])
        if tag == "rope1d":
            return rope1d_apply(v, ax)
        if tag == "mixed":
            return mixed_apply(v, ax + ay, method.axes.axes_x[band])
        if tag == "spherical":
            return spherical_apply(v, ax, ay)
        if tag == "quatro":
            return quatro_apply(v, ax, ay, method.axes.axes_x[band], method.axes.axes_y[band])
        return care_apply(v, ax, ay, method.axes.axes_x[band], method.axes.axes_y[band])

    return rotate


def commutator_norm(
    method: EncodingMethod, p_a, p_b, band: int = 0, directions: int = 128
) -> float:
    """Operator gap ||R(p_a) R(p_b) - R(p_b) R(p_a)|| on one band.

    Measured as the max output difference between the two application
    orders over >= 100 deterministic unit directions of the carrier space.
    Zero iff the band's rotations at the two positions commute (always
    true for rope1d/mixed, generically false otherwise).
    """
    if not 0 <= band < method.schedule.num_bands:
        raise ValueError("band index out of range")
    rotate = _band_rotation(method, band)
    dirs = _unit_directions(METHOD_WIDTHS[method.tag], directions)
    ab = rotate(p_a, rotate(p_b, dirs))
    ba = rotate(p_b, rotate(p_a, dirs))
    return float(np.max(np.abs(ab - ba)))


def axial_rope(block: TokenBlock, base: float = 10000.0) -> TokenBlock:
    """Axial 1D-RoPE baseline: first half of head_dim rotated by p_x,
    second half by p_y, each through the plain rope1d method. A trivial
    composition for comparison runs, not a first-class method."""
    half = block.head_dim // 2
    if half < 2:
        raise ValueError("axial baseline needs head_dim >= 4")
    swapped = block.positions[:, ::-1]
    front = TokenBlock(data=block.data[:, :, :half], positions=block.positions)
    back = TokenBlock(data=block.data[:, :, half:], positions=swapped)
    out_front = apply_encoding(front, EncodingMethod.configure("rope1d", half, base))
    out_back = apply_encoding(back, EncodingMethod.configure("rope1d", block.head_dim - half, base))
    data = np.concatenate([out_front.data, out_back.data], axis=-1)
    return TokenBlock(data=data, positions=block.positions)
