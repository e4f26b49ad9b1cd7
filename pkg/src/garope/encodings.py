"""Positional encoding methods over 2D position grids.

Five methods act on query/key sub-vectors, distinguished by carrier width:

* ``rope1d``   - width 2, planar rotation by theta_i * p_x.
* ``mixed``    - width 3, one shared rotation axis, angle
  theta_i * (s_x p_x + s_y p_y); the two position coordinates commute.
* ``spherical``- width 3, fixed-axis pair: an xy-plane rotation by the
  p_y angle applied first, then a yz-plane rotation by the p_x angle.
* ``quatro``   - width 3, two learnable-axis quaternion rotors; the p_x
  rotor is the outer one in the conjugation.
* ``care``     - width 8, full Cl(3,0) multivector sub-vectors conjugated
  by a composite rotor; here the p_y rotor is the outer one.

Angles come from a per-band frequency schedule theta_i scaled by
per-coordinate speed factors. ``*_rotate`` functions take grid positions;
the ``*_apply`` variants take the resolved angles directly (used by the
finite-difference gradient checks).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cl3
from .quaternion import hamilton_product, quat_rotor, quat_sandwich, quat_to_rotation_matrix

METHODS = ("rope1d", "mixed", "spherical", "quatro", "care")
METHOD_WIDTHS = {"rope1d": 2, "mixed": 3, "spherical": 3, "quatro": 3, "care": 8}

AXIS_MIN_NORM = 1e-8  # raw learnable axes below this are degenerate

# Fixed axis pair that makes the two-rotor methods reproduce the
# fixed-axis spherical method: the p_x rotor about i generates the
# yz-plane rotation, the p_y rotor about k the xy-plane rotation.
SPHERICAL_AXIS_X = np.array([1.0, 0.0, 0.0])
SPHERICAL_AXIS_Y = np.array([0.0, 0.0, 1.0])


def unit_axis(axis) -> np.ndarray:
    """Normalize (..., 3) axes, rejecting raw norms below AXIS_MIN_NORM."""
    axis = np.asarray(axis, dtype=np.float64)
    norm = np.sqrt(np.sum(axis * axis, axis=-1, keepdims=True))
    if np.any(norm < AXIS_MIN_NORM):
        raise ValueError("degenerate rotation axis (norm below 1e-8)")
    return axis / norm


def grade1_rotation_axis(axis) -> np.ndarray:
    """3-space axis about which a bivector-parameterized rotor turns vectors.

    An axis (a_i, a_j, a_k) names the bivector a_i e12 + a_j e23 + a_k e13.
    Acting on grade-1 coefficients, the sandwich by its exponential is the
    rotation about (-a_j, a_k, -a_i): the dual vector of the bivector, with
    orientation fixed by the same convention that sends exp((t/2) e12) e1
    to cos(t) e1 - sin(t) e2. Pinned numerically by a generator test.
    """
    axis = np.asarray(axis, dtype=np.float64)
    return np.stack([-axis[..., 1], axis[..., 2], -axis[..., 0]], axis=-1)


@dataclass(frozen=True)
class FrequencySchedule:
    """Per-band angular speeds theta_i = base**(-i / num_bands)."""

    base: float
    num_bands: int
    band_angles: np.ndarray = field(repr=False)

    @classmethod
    def for_bands(cls, num_bands: int, base: float = 10000.0) -> "FrequencySchedule":
        if num_bands < 1:
            raise ValueError("schedule needs at least one band")
        if base <= 1.0:
            raise ValueError("schedule base must exceed 1")
        i = np.arange(num_bands, dtype=np.float64)
        angles = base ** (-i / num_bands)  # == base**(-2i / (2*num_bands))
        angles.flags.writeable = False
        return cls(base=float(base), num_bands=num_bands, band_angles=angles)


@dataclass(frozen=True)
class AxisParams:
    """Raw per-band rotation axes for the x and y position coordinates."""

    axes_x: np.ndarray  # (num_bands, 3)
    axes_y: np.ndarray

    def __post_init__(self):
        for name in ("axes_x", "axes_y"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise ValueError(f"{name} must have shape (num_bands, 3)")
            if np.any(np.linalg.norm(arr, axis=1) < AXIS_MIN_NORM):
                raise ValueError(f"{name} contains a degenerate axis")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.axes_x.shape != self.axes_y.shape:
            raise ValueError("axes_x and axes_y must cover the same bands")

    @property
    def num_bands(self) -> int:
        return self.axes_x.shape[0]

    def unit_x(self) -> np.ndarray:
        return unit_axis(self.axes_x)

    def unit_y(self) -> np.ndarray:
        return unit_axis(self.axes_y)

    @classmethod
    def shared(cls, axis_x, axis_y, num_bands: int) -> "AxisParams":
        ax = np.tile(np.asarray(axis_x, dtype=np.float64), (num_bands, 1))
        ay = np.tile(np.asarray(axis_y, dtype=np.float64), (num_bands, 1))
        return cls(ax, ay)


@dataclass(frozen=True)
class EncodingMethod:
    """A method tag plus everything needed to apply it to a block."""

    tag: str
    schedule: FrequencySchedule
    axes: AxisParams | None = None
    scale_x: float = 1.0
    scale_y: float = 1.0

    def __post_init__(self):
        if self.tag not in METHODS:
            raise ValueError(f"unknown encoding method {self.tag!r}")
        if self.tag in ("mixed", "quatro", "care"):
            if self.axes is None:
                raise ValueError(f"{self.tag} needs axis parameters")
            if self.axes.num_bands != self.schedule.num_bands:
                raise ValueError("axis bands do not match schedule bands")
            if self.tag == "mixed":
                ux, uy = self.axes.unit_x(), self.axes.unit_y()
                if np.max(np.abs(ux - uy)) > 1e-9:
                    raise ValueError("mixed encoding needs one shared axis")

    @property
    def width(self) -> int:
        return METHOD_WIDTHS[self.tag]

    @classmethod
    def configure(
        cls,
        tag: str,
        head_dim: int,
        base: float = 10000.0,
        axes_x=None,
        axes_y=None,
        scale_x: float = 1.0,
        scale_y: float = 1.0,
    ) -> "EncodingMethod":
        """Build a method for a given head_dim, filling in default axes.

        Defaults: quatro/care use the spherical-equivalent fixed pair,
        mixed shares the xy-plane axis (0, 0, 1) for both coordinates.
        rope1d and spherical have no free axes and reject explicit ones.
        """
        width = METHOD_WIDTHS[tag] if tag in METHODS else None
        if width is None:
            raise ValueError(f"unknown encoding method {tag!r}")
        num_bands = head_dim // width
        if num_bands < 1:
            raise ValueError(f"head_dim {head_dim} is below the {tag} sub-vector width {width}")
        schedule = FrequencySchedule.for_bands(num_bands, base)
        axes = None
        if tag in ("mixed", "quatro", "care"):
            if axes_x is None:
                axes_x = np.tile(
                    SPHERICAL_AXIS_Y if tag == "mixed" else SPHERICAL_AXIS_X,
                    (num_bands, 1),
                )
            if axes_y is None:
                axes_y = axes_x if tag == "mixed" else np.tile(SPHERICAL_AXIS_Y, (num_bands, 1))
            axes_x = _per_band(axes_x, num_bands, "axes_x")
            axes_y = _per_band(axes_y, num_bands, "axes_y")
            axes = AxisParams(axes_x, axes_y)
        elif axes_x is not None or axes_y is not None:
            raise ValueError(f"{tag} has fixed axes; remove the axis parameters")
        return cls(tag=tag, schedule=schedule, axes=axes, scale_x=float(scale_x), scale_y=float(scale_y))


def _per_band(axes, num_bands: int, name: str) -> np.ndarray:
    arr = np.asarray(axes, dtype=np.float64)
    if arr.shape == (3,):
        arr = np.tile(arr, (num_bands, 1))
    if arr.shape != (num_bands, 3):
        raise ValueError(f"{name} must be one 3-vector or shape ({num_bands}, 3)")
    return arr


@dataclass(frozen=True)
class TokenBlock:
    """batch x tokens x head_dim values plus one 2D position per token."""

    data: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        pos = np.asarray(self.positions, dtype=np.float64)
        if data.ndim != 3:
            raise ValueError("block data must be batch x tokens x head_dim")
        if pos.shape != (data.shape[1], 2):
            raise ValueError("positions must be (tokens, 2) matching the block")
        if not (np.all(np.isfinite(data)) and np.all(np.isfinite(pos))):
            raise ValueError("block contains non-finite values")
        for arr in (data, pos):
            arr.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "positions", pos)

    @property
    def batch(self) -> int:
        return self.data.shape[0]

    @property
    def tokens(self) -> int:
        return self.data.shape[1]

    @property
    def head_dim(self) -> int:
        return self.data.shape[2]


def grid_positions(grid_h: int, grid_w: int, origin=(0.0, 0.0)) -> np.ndarray:
    """Row-major (tokens, 2) integer grid; p_x runs along columns."""
    rows, cols = np.meshgrid(np.arange(grid_h), np.arange(grid_w), indexing="ij")
    pos = np.stack([cols.ravel() + origin[0], rows.ravel() + origin[1]], axis=-1)
    return pos.astype(np.float64)


def random_block(batch: int, head_dim: int, positions, seed: int) -> TokenBlock:
    """Standard-normal block with fixed positions, reproducible by seed."""
    positions = np.asarray(positions, dtype=np.float64)
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((batch, positions.shape[0], head_dim))
    return TokenBlock(data=data, positions=positions)


# ---------------------------------------------------------------------------
# single sub-vector operations


def _pos_angles(p, theta: float, scale_x: float, scale_y: float) -> tuple[float, float]:
    p = np.asarray(p, dtype=np.float64)
    return float(theta * scale_x * p[0]), float(theta * scale_y * p[1])


def rope1d_apply(v, angle: float) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([c * v[..., 0] - s * v[..., 1], s * v[..., 0] + c * v[..., 1]], axis=-1)


def rope1d_rotate(v, p: float, theta: float) -> np.ndarray:
    """Planar rotation of a 2-vector by theta * p."""
    return rope1d_apply(v, theta * float(p))


def _rot_xy(angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.stack(
        [np.stack([c, -s, z], -1), np.stack([s, c, z], -1), np.stack([z, z, o], -1)], axis=-2
    )


def _rot_yz(angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.stack(
        [np.stack([o, z, z], -1), np.stack([z, c, -s], -1), np.stack([z, s, c], -1)], axis=-2
    )


def spherical_apply(v, angle_x: float, angle_y: float) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    step = np.einsum("...ij,...j->...i", _rot_xy(angle_y), v)
    return np.einsum("...ij,...j->...i", _rot_yz(angle_x), step)


def spherical_rotate(v, p, theta: float, scale_x: float = 1.0, scale_y: float = 1.0) -> np.ndarray:
    """Fixed-axis 3-vector rotation: xy-plane by the p_y angle first, then
    yz-plane by the p_x angle. The two steps do not commute."""
    ax, ay = _pos_angles(p, theta, scale_x, scale_y)
    return spherical_apply(v, ax, ay)


def quatro_apply(v, angle_x: float, angle_y: float, axis_x, axis_y) -> np.ndarray:
    ux, uy = unit_axis(axis_x), unit_axis(axis_y)
    rotor = hamilton_product(quat_rotor(ux, angle_x / 2.0), quat_rotor(uy, angle_y / 2.0))
    return quat_sandwich(rotor, v)


def quatro_rotate(
    v, p, axis_x, axis_y, theta: float, scale_x: float = 1.0, scale_y: float = 1.0
) -> np.ndarray:
    """Two-rotor quaternion rotation of a 3-vector; the x rotor conjugates
    outermost, so the composite rotor is r_x * r_y."""
    ax, ay = _pos_angles(p, theta, scale_x, scale_y)
    return quatro_apply(v, ax, ay, axis_x, axis_y)


def mixed_apply(v, angle: float, axis) -> np.ndarray:
    u = unit_axis(axis)
    v = np.asarray(v, dtype=np.float64)
    c, s = np.cos(angle), np.sin(angle)
    return c * v + s * np.cross(u, v) + (1.0 - c) * np.sum(u * v, axis=-1, keepdims=True) * u


def mixed_rotate(
    v, p, axis, theta: float, scale_x: float = 1.0, scale_y: float = 1.0
) -> np.ndarray:
    """Shared-axis rotation by the combined angle theta * (s_x p_x + s_y p_y).

    Closed form (axis-angle); identical to quatro_rotate with both axes set
    to the shared axis, because same-plane rotors compose additively.
    """
    ax, ay = _pos_angles(p, theta, scale_x, scale_y)
    return mixed_apply(v, ax + ay, axis)


def mv8_bivector(axis) -> np.ndarray:
    """mv8 bivector slots for an axis (a_i, a_j, a_k): a_i e12 + a_j e23 +
    a_k e13, with the e13 component stored on the e31 slot as -a_k."""
    axis = np.asarray(axis, dtype=np.float64)
    out = np.zeros(axis.shape[:-1] + (8,))
    out[..., 3] = axis[..., 0]
    out[..., 6] = axis[..., 1]
    out[..., 5] = -axis[..., 2]
    return out


def mv8_rotor(axis, half_angle) -> np.ndarray:
    """Unit mv8 rotor cos(h) + sin(h) B(axis); broadcasts like quat_rotor."""
    u = unit_axis(axis)
    half_angle = np.asarray(half_angle, dtype=np.float64)
    out = np.sin(half_angle)[..., None] * mv8_bivector(u)
    out[..., 0] = np.cos(half_angle)
    return out


def care_apply(m, angle_x: float, angle_y: float, axis_x, axis_y) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    rx = mv8_rotor(axis_x, np.asarray(angle_x) / 2.0)
    ry = mv8_rotor(axis_y, np.asarray(angle_y) / 2.0)
    out = cl3.mv8_rotor_sandwich(cl3.mv8_product(ry, rx), m)
    # scalar and e123 commute with every rotor, so these channels are
    # exactly invariant; copy them through instead of keeping the
    # kernel's re-accumulated (round-off-bearing) values
    out[..., 0] = m[..., 0]
    out[..., 7] = m[..., 7]
    return out


def care_rotate(
    m, p, axis_x, axis_y, theta: float, scale_x: float = 1.0, scale_y: float = 1.0
) -> np.ndarray:
    """Conjugate an 8-slot multivector by the composite rotor R_y R_x (the
    y rotor outermost, unlike quatro). Scalar and e123 slots are invariant;
    every grade's norm is preserved."""
    ax, ay = _pos_angles(p, theta, scale_x, scale_y)
    return care_apply(m, ax, ay, axis_x, axis_y)


# ---------------------------------------------------------------------------
# analytic angle gradients


def _mv8_commutator_half(b: np.ndarray, m: np.ndarray) -> np.ndarray:
    return 0.5 * (cl3.mv8_product(b, m) - cl3.mv8_product(m, b))


def rotation_gradient(
    tag: str,
    v,
    p,
    theta: float,
    coordinate: str,
    axis_x=None,
    axis_y=None,
    scale_x: float = 1.0,
    scale_y: float = 1.0,
) -> np.ndarray:
    """Derivative of the rotated sub-vector w.r.t. one resolved angle.

    ``coordinate`` picks angle_x or angle_y (the angle after the schedule
    and speed scaling, so d angle/d p is not included). Uses the rotor
    derivative d/dt (R a ~R) = (B (R a ~R) - (R a ~R) B) / 2 for the rotor
    whose angle moves, conjugated through the remaining outer rotor; for
    3-vector carriers that commutator is the cross product with the axis.
    """
    if coordinate not in ("angle_x", "angle_y"):
        raise ValueError("coordinate must be angle_x or angle_y")
    ax, ay = _pos_angles(p, theta, scale_x, scale_y)
    wrt_x = coordinate == "angle_x"

    if tag == "rope1d":
        if not wrt_x:
            return np.zeros(np.shape(np.asarray(v, dtype=np.float64)))
        out = rope1d_apply(v, ax)
        return np.stack([-out[..., 1], out[..., 0]], axis=-1)

    if tag == "mixed":
        u = unit_axis(axis_x)
        return np.cross(u, mixed_apply(v, ax + ay, u))

    if tag == "spherical":
        axis_x, axis_y = SPHERICAL_AXIS_X, SPHERICAL_AXIS_Y
        tag = "quatro"

    if tag == "quatro":
        ux, uy = unit_axis(axis_x), unit_axis(axis_y)
        if wrt_x:  # outer rotor
            return np.cross(ux, quatro_apply(v, ax, ay, ux, uy))
        rx = quat_rotor(ux, ax / 2.0)
        ry = quat_rotor(uy, ay / 2.0)
        return quat_sandwich(rx, np.cross(uy, quat_sandwich(ry, v)))

    if tag == "care":
        ux, uy = unit_axis(axis_x), unit_axis(axis_y)
        bx, by = mv8_bivector(ux), mv8_bivector(uy)
        rx = mv8_rotor(ux, ax / 2.0)
        ry = mv8_rotor(uy, ay / 2.0)
        if not wrt_x:  # outer rotor
            out = cl3.mv8_rotor_sandwich(cl3.mv8_product(ry, rx), v)
            return _mv8_commutator_half(by, out)
        inner = cl3.mv8_rotor_sandwich(rx, v)
        return cl3.mv8_rotor_sandwich(ry, _mv8_commutator_half(bx, inner))

    raise ValueError(f"unknown encoding method {tag!r}")


# ---------------------------------------------------------------------------
# block application


def _band_split(head_dim: int, width: int) -> tuple[int, int]:
    bands = head_dim // width
    if bands < 1:
        raise ValueError(f"head_dim {head_dim} is below the sub-vector width {width}")
    return bands, head_dim - bands * width


def apply_encoding(
    block: TokenBlock, method: EncodingMethod, inverse: bool = False, cl3_backend: str | None = None
) -> TokenBlock:
    """Rotate every sub-vector of the block by its band/position angles.

    head_dim splits into floor(head_dim / width) contiguous sub-vectors;
    leftover trailing dims pass through untouched. ``inverse=True`` applies
    the inverse rotations (conjugate rotors), recovering the input of a
    forward pass up to round-off. ``cl3_backend`` pins the Cl(3,0) kernel
    implementation for the care method (benchmark use).
    """
    bands, remainder = _band_split(block.head_dim, method.width)
    if method.schedule.num_bands != bands:
        raise ValueError(
            f"schedule has {method.schedule.num_bands} bands, block needs {bands}"
        )
    theta = method.schedule.band_angles  # (bands,)
    pos = block.positions
    angles_x = theta[None, :] * (method.scale_x * pos[:, 0])[:, None]  # (tokens, bands)
    angles_y = theta[None, :] * (method.scale_y * pos[:, 1])[:, None]
    if inverse:
        sign = -1.0
        angles_x, angles_y = sign * angles_x, sign * angles_y

    body = block.data[:, :, : bands * method.width]
    sub = body.reshape(block.batch, block.tokens, bands, method.width)

    if method.tag == "rope1d":
        c, s = np.cos(angles_x), np.sin(angles_x)  # p_y does not contribute
        x, y = sub[..., 0], sub[..., 1]
        out = np.stack([c * x - s * y, s * x + c * y], axis=-1)
    elif method.tag == "mixed":
        u = method.axes.unit_x()  # (bands, 3), shared with y
        ang = angles_x + angles_y
        c, s = np.cos(ang)[None, ..., None], np.sin(ang)[None, ..., None]
        cross = np.cross(u[None, None], sub)
        dot = np.sum(u[None, None] * sub, axis=-1, keepdims=True)
        out = c * sub + s * cross + (1.0 - c) * dot * u[None, None]
    elif method.tag in ("spherical", "quatro"):
        if method.tag == "spherical":
            ux = np.tile(SPHERICAL_AXIS_X, (bands, 1))
            uy = np.tile(SPHERICAL_AXIS_Y, (bands, 1))
        else:
            ux, uy = method.axes.unit_x(), method.axes.unit_y()
        rx = quat_rotor(ux[None], angles_x / 2.0)  # (tokens, bands, 4)
        ry = quat_rotor(uy[None], angles_y / 2.0)
        rotor = hamilton_product(rx, ry)
        if inverse:
            # inverse of (r_x r_y at +angles) is its conjugate; the sign
            # flip above built r_x(-ax) r_y(-ay), whose order is wrong, so
            # rebuild: conj(r) = r_y(-ay) r_x(-ax)
            rotor = hamilton_product(ry, rx)
        mats = quat_to_rotation_matrix(rotor)  # (tokens, bands, 3, 3)
        out = np.einsum("tbij,ctbj->ctbi", mats, sub)
    elif method.tag == "care":
        ux, uy = method.axes.unit_x(), method.axes.unit_y()
        rx = mv8_rotor(ux[None], angles_x / 2.0)  # (tokens, bands, 8)
        ry = mv8_rotor(uy[None], angles_y / 2.0)
        rotor = cl3.mv8_product(ry, rx)
        if inverse:
            rotor = cl3.mv8_product(rx, ry)  # conjugate of the forward rotor
        tiled = np.broadcast_to(rotor, sub.shape)
        out = cl3.mv8_rotor_sandwich(tiled, sub, backend=cl3_backend)
        out[..., 0] = sub[..., 0]  # exactly invariant channels, as in care_apply
        out[..., 7] = sub[..., 7]
    else:  # pragma: no cover - tags validated in EncodingMethod
        raise ValueError(f"unknown encoding method {method.tag!r}")

    data = np.empty_like(block.data)
    data[:, :, : bands * method.width] = out.reshape(block.batch, block.tokens, -1)
    if remainder:
        data[:, :, bands * method.width :] = block.data[:, :, bands * method.width :]
    return TokenBlock(data=data, positions=block.positions)
