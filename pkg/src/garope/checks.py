"""Named invariant suites behind the ``check`` and ``equiv`` commands.

Each suite re-derives its expected values from an independent oracle (the
generic blade-table engine, rotation matrices, closed-form identities) so
a sign or table error in the fast paths cannot hide. Suites are seeded
and pure: same seed, same printed detail, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import cl3
from .attention import commutator_norm, shift_invariance_gap
from .encodings import (
    SPHERICAL_AXIS_X,
    SPHERICAL_AXIS_Y,
    EncodingMethod,
    apply_encoding,
    care_rotate,
    grade1_rotation_axis,
    grid_positions,
    mixed_apply,
    mixed_rotate,
    quatro_rotate,
    random_block,
    spherical_rotate,
    unit_axis,
)
from .ga import Algebra, Multivector, rotor_exp, sandwich
from .quaternion import (
    _EVEN_MASKS,
    hamilton_product,
    quat_rotor,
    quat_sandwich,
    quat_to_even_cl3,
    quat_to_rotation_matrix,
)


class CheckFailure(AssertionError):
    """An invariant suite found a violation; message names the property."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


_ORIENT = np.array(cl3._SLOT_ORIENTATION, dtype=np.float64)


def _ga_rows_product(a_rows: np.ndarray, b_rows: np.ndarray) -> np.ndarray:
    """Generic-engine geometric product on mv8-layout rows (the oracle)."""
    alg = Algebra(3)
    return _ORIENT * alg.gp(a_rows * _ORIENT, b_rows * _ORIENT)


def _random_rotor_rows(rng: np.random.Generator, n: int) -> np.ndarray:
    axes = unit_axis(rng.standard_normal((n, 3)))
    half = rng.uniform(-np.pi, np.pi, n)
    rows = np.zeros((n, 8))
    rows[:, 0] = np.cos(half)
    s = np.sin(half)
    rows[:, 3] = s * axes[:, 0]
    rows[:, 6] = s * axes[:, 1]
    rows[:, 5] = -s * axes[:, 2]
    return rows


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailure(message)


# ---------------------------------------------------------------------------
# suites


def _suite_ga_product_laws(seed: int) -> str:
    rng = np.random.default_rng([seed, 0])
    alg = Algebra(3)
    worst = 0.0
    for _ in range(50):
        a, b, c = (rng.standard_normal(8) for _ in range(3))
        left = alg.gp(alg.gp(a, b), c)
        right = alg.gp(a, alg.gp(b, c))
        worst = max(worst, float(np.max(np.abs(left - right))))
        s, t = rng.standard_normal(2)
        lin = alg.gp(s * a + t * b, c) - (s * alg.gp(a, c) + t * alg.gp(b, c))
        worst = max(worst, float(np.max(np.abs(lin))))
    _require(worst <= 1e-12, f"associativity/bilinearity deviation {worst:.3e} > 1e-12")
    for i in range(3):
        ei = np.zeros(8)
        ei[1 << i] = 1.0
        sq = alg.gp(ei, ei)
        _require(sq[0] == 1.0 and np.all(sq[1:] == 0.0), f"e{i + 1}^2 != 1")
        for j in range(i + 1, 3):
            ej = np.zeros(8)
            ej[1 << j] = 1.0
            anti = alg.gp(ei, ej) + alg.gp(ej, ei)
            _require(np.all(anti == 0.0), f"e{i + 1} e{j + 1} does not anticommute")
    return f"assoc/linear dev {worst:.3e} on 50 triples; generator table exact"


def _suite_ga_rotor_sandwich(seed: int) -> str:
    rng = np.random.default_rng([seed, 1])
    alg = Algebra(3)
    worst_norm = 0.0
    worst_inv = 0.0
    for _ in range(100):
        coeffs = np.zeros(8)
        coeffs[[3, 5, 6]] = rng.standard_normal(3)  # bivector masks e12, e13, e23
        biv = Multivector(3, coeffs)
        rotor = rotor_exp(biv * (1.0 / biv.norm()), rng.uniform(-np.pi, np.pi))
        mv = Multivector(3, rng.standard_normal(8))
        out = sandwich(rotor, mv)
        for grade in range(4):
            d = abs(out.grade(grade).norm() - mv.grade(grade).norm())
            worst_norm = max(worst_norm, d)
        back = sandwich(~rotor, out)
        worst_inv = max(worst_inv, float(np.max(np.abs(back.coeffs - mv.coeffs))))
    _require(worst_norm <= 1e-12, f"grade-norm deviation {worst_norm:.3e} > 1e-12")
    _require(worst_inv <= 1e-12, f"sandwich inverse deviation {worst_inv:.3e} > 1e-12")
    return f"grade norms {worst_norm:.3e}, inverse {worst_inv:.3e} on 100 rotors"


def _suite_quat_isomorphism(seed: int) -> str:
    basis = np.eye(4)
    for qi in range(4):
        for qj in range(4):
            ham = hamilton_product(basis[qi], basis[qj])
            ga = (quat_to_even_cl3(basis[qi]) * quat_to_even_cl3(basis[qj])).coeffs
            expect = quat_to_even_cl3(ham).coeffs
            _require(np.array_equal(ga, expect), f"basis pair ({qi},{qj}) mismatched")
    rng = np.random.default_rng([seed, 2])
    worst = 0.0
    for _ in range(1000):
        p, q = rng.standard_normal(4), rng.standard_normal(4)
        ham = quat_to_even_cl3(hamilton_product(p, q)).coeffs
        ga = (quat_to_even_cl3(p) * quat_to_even_cl3(q)).coeffs
        worst = max(worst, float(np.max(np.abs(ham - ga))))
    _require(worst <= 1e-12, f"random-pair homomorphism deviation {worst:.3e} > 1e-12")
    return f"16 basis pairs exact; 1000 random pairs dev {worst:.3e}"


def _suite_quat_rotation(seed: int) -> str:
    rng = np.random.default_rng([seed, 3])
    axes = unit_axis(rng.standard_normal((1000, 3)))
    half = rng.uniform(-np.pi, np.pi, 1000)
    rotors = quat_rotor(axes, half)
    vecs = rng.standard_normal((1000, 3))
    via_sandwich = quat_sandwich(rotors, vecs)
    via_matrix = np.einsum("nij,nj->ni", quat_to_rotation_matrix(rotors), vecs)
    worst = float(np.max(np.abs(via_sandwich - via_matrix)))
    _require(worst <= 1e-12, f"sandwich vs matrix deviation {worst:.3e} > 1e-12")
    dets = np.linalg.det(quat_to_rotation_matrix(rotors))
    worst_det = float(np.max(np.abs(dets - 1.0)))
    _require(worst_det <= 1e-12, f"rotation determinant off by {worst_det:.3e}")
    return f"1000 rotor/vector pairs dev {worst:.3e}; det drift {worst_det:.3e}"


def _suite_cl3_oracle(seed: int) -> str:
    rng = np.random.default_rng([seed, 4])
    n = 10_000
    a = rng.standard_normal((n, 8))
    b = rng.standard_normal((n, 8))
    dev_gp = float(np.max(np.abs(cl3.mv8_product(a, b) - _ga_rows_product(a, b))))
    _require(dev_gp <= 1e-13, f"mv8_product vs generic engine deviation {dev_gp:.3e} > 1e-13")
    rotors = _random_rotor_rows(rng, n)
    fast = cl3.mv8_rotor_sandwich(rotors, a)
    slow = _ga_rows_product(_ga_rows_product(rotors, a), cl3.mv8_reverse(rotors))
    dev_sw = float(np.max(np.abs(fast - slow)))
    _require(dev_sw <= 1e-13, f"mv8_rotor_sandwich vs generic deviation {dev_sw:.3e} > 1e-13")
    return f"product dev {dev_gp:.3e}, sandwich dev {dev_sw:.3e} on {n} rows"


def _suite_cl3_invariant_channels(seed: int) -> str:
    rng = np.random.default_rng([seed, 5])
    n = 2000
    rotors = _random_rotor_rows(rng, n)
    a = rng.standard_normal((n, 8))
    out = cl3.mv8_rotor_sandwich(rotors, a)
    scale = np.maximum(1.0, np.abs(a[:, [0, 7]]))
    drift = float(np.max(np.abs(out[:, [0, 7]] - a[:, [0, 7]]) / scale))
    _require(drift <= 1e-15, f"scalar/e123 slots drift {drift:.3e} > 1e-15")
    if cl3.have_extension():
        same = np.array_equal(
            cl3.mv8_rotor_sandwich(rotors, a, backend="cython"),
            cl3.mv8_rotor_sandwich(rotors, a, backend="numpy"),
        )
        _require(same, "cython and numpy kernels disagree bitwise")
        note = "; backends bitwise equal"
    else:
        note = "; extension absent, numpy only"
    return f"invariant-channel drift {drift:.3e} on {n} rows" + note


def reduction_deviations(
    seed: int, samples: int = 1000, grid_h: int = 14, grid_w: int = 14, base: float = 10000.0
) -> dict[str, float]:
    """Max deviation of each special-case reduction over random samples.

    The four claims: quatro with the orthogonal fixed pair reproduces
    spherical; quatro with parallel axes reproduces mixed; care restricted
    to a grade-1 carrier reproduces a quaternion rotation (axes remapped
    through the bivector correspondence, conjugation order aligned); care
    with parallel axes on grade-1 reproduces mixed about the remapped axis.
    """
    rng = np.random.default_rng([seed, 6])
    grid = grid_positions(grid_h, grid_w)
    schedule = EncodingMethod.configure("quatro", 64, base=base).schedule
    dev = dict.fromkeys(
        (
            "quatro_orthogonal_vs_spherical",
            "quatro_parallel_vs_mixed",
            "care_grade1_vs_quatro",
            "care_parallel_vs_mixed",
        ),
        0.0,
    )
    for _ in range(samples):
        p = grid[rng.integers(0, grid.shape[0])]
        theta = float(schedule.band_angles[rng.integers(0, schedule.num_bands)])
        v = rng.standard_normal(3)

        a = quatro_rotate(v, p, SPHERICAL_AXIS_X, SPHERICAL_AXIS_Y, theta)
        b = spherical_rotate(v, p, theta)
        dev["quatro_orthogonal_vs_spherical"] = max(
            dev["quatro_orthogonal_vs_spherical"], float(np.max(np.abs(a - b)))
        )

        u = unit_axis(rng.standard_normal(3))
        a = quatro_rotate(v, p, u, 2.5 * u, theta)  # parallel, different raw norms
        b = mixed_rotate(v, p, u, theta)
        dev["quatro_parallel_vs_mixed"] = max(
            dev["quatro_parallel_vs_mixed"], float(np.max(np.abs(a - b)))
        )

        ux = unit_axis(rng.standard_normal(3))
        uy = unit_axis(rng.standard_normal(3))
        m = np.zeros(8)
        m[[1, 2, 4]] = v
        out8 = care_rotate(m, p, ux, uy, theta)
        # order-aligned quaternion oracle: care conjugates y outermost
        rx = quat_rotor(grade1_rotation_axis(ux), theta * p[0] / 2.0)
        ry = quat_rotor(grade1_rotation_axis(uy), theta * p[1] / 2.0)
        b = quat_sandwich(hamilton_product(ry, rx), v)
        dev["care_grade1_vs_quatro"] = max(
            dev["care_grade1_vs_quatro"], float(np.max(np.abs(out8[[1, 2, 4]] - b)))
        )

        out8 = care_rotate(m, p, ux, 0.5 * ux, theta)  # parallel pair
        b = mixed_apply(v, theta * (p[0] + p[1]), grade1_rotation_axis(ux))
        dev["care_parallel_vs_mixed"] = max(
            dev["care_parallel_vs_mixed"], float(np.max(np.abs(out8[[1, 2, 4]] - b)))
        )
    return dev


def _suite_rotary_reductions(seed: int) -> str:
    dev = reduction_deviations(seed, samples=300)
    worst = max(dev.values())
    _require(worst <= 1e-10, f"reduction deviation {worst:.3e} > 1e-10")
    parts = ", ".join(f"{k.split('_vs_')[0]} {v:.2e}" for k, v in dev.items())
    return f"300 samples each: {parts}"


def _suite_rotary_norms(seed: int) -> str:
    rng = np.random.default_rng([seed, 7])
    pos = grid_positions(5, 5)
    worst_norm = 0.0
    worst_channel = 0.0
    worst_round = 0.0
    for tag, head_dim in (("rope1d", 10), ("mixed", 9), ("spherical", 10), ("quatro", 10), ("care", 17)):
        axes_x = rng.standard_normal(3) if tag in ("mixed", "quatro", "care") else None
        axes_y = rng.standard_normal(3) if tag in ("quatro", "care") else None
        method = EncodingMethod.configure(
            tag, head_dim, axes_x=axes_x, axes_y=axes_y, scale_x=1.2, scale_y=0.7
        )
        block = random_block(2, head_dim, pos, seed=seed + head_dim)
        out = apply_encoding(block, method)
        bands, width = method.schedule.num_bands, method.width
        sub_in = block.data[:, :, : bands * width].reshape(2, pos.shape[0], bands, width)
        sub_out = out.data[:, :, : bands * width].reshape(2, pos.shape[0], bands, width)
        norms = np.abs(
            np.linalg.norm(sub_out, axis=-1) - np.linalg.norm(sub_in, axis=-1)
        )
        worst_norm = max(worst_norm, float(np.max(norms)))
        if tag == "care":
            for slots in ((0,), (1, 2, 4), (3, 5, 6), (7,)):  # per-grade slot groups
                g = np.abs(
                    np.linalg.norm(sub_out[..., slots], axis=-1)
                    - np.linalg.norm(sub_in[..., slots], axis=-1)
                )
                worst_norm = max(worst_norm, float(np.max(g)))
            drift = np.max(np.abs(sub_out[..., [0, 7]] - sub_in[..., [0, 7]]))
            worst_channel = max(worst_channel, float(drift))
        back = apply_encoding(out, method, inverse=True)
        worst_round = max(worst_round, float(np.max(np.abs(back.data - block.data))))
    _require(worst_norm <= 1e-10, f"norm preservation deviation {worst_norm:.3e} > 1e-10")
    _require(worst_channel <= 1e-15, f"care invariant channels drift {worst_channel:.3e} > 1e-15")
    _require(worst_round <= 1e-10, f"inverse round-trip deviation {worst_round:.3e} > 1e-10")
    return (
        f"norms {worst_norm:.3e}, care channels {worst_channel:.3e}, round-trip {worst_round:.3e}"
    )


def _suite_harness_equivariance(seed: int) -> str:
    from .fixtures import WITNESS_GAP_FLOOR, WITNESSES, evaluate_witness

    rng = np.random.default_rng([seed, 8])
    pos = grid_positions(4, 4)
    block = random_block(1, 6, pos, seed=seed + 100)
    mixed = EncodingMethod.configure("mixed", 6)
    rope = EncodingMethod.configure("rope1d", 6)
    worst_inv = 0.0
    for _ in range(25):
        shift = rng.uniform(-10.0, 10.0, 2)
        worst_inv = max(worst_inv, shift_invariance_gap(mixed, block, shift))
        worst_inv = max(worst_inv, shift_invariance_gap(rope, block, shift))
    _require(worst_inv <= 1e-8, f"commuting-method shift gap {worst_inv:.3e} > 1e-8")
    gaps = [evaluate_witness(w) for w in WITNESSES]
    _require(
        min(gaps) > WITNESS_GAP_FLOOR,
        f"witness gap {min(gaps):.3e} not above {WITNESS_GAP_FLOOR}",
    )
    spherical = EncodingMethod.configure("spherical", 6)
    wit = commutator_norm(spherical, (np.pi / 2, 0.0), (0.0, np.pi / 2))
    _require(wit > 0.1, f"spherical commutator witness {wit:.3e} not above 0.1")
    par = EncodingMethod.configure(
        "quatro", 6, axes_x=np.array([0.6, -0.3, 0.9]), axes_y=np.array([1.2, -0.6, 1.8])
    )
    zero = max(
        commutator_norm(par, tuple(rng.uniform(-3, 3, 2)), tuple(rng.uniform(-3, 3, 2)))
        for _ in range(5)
    )
    _require(zero <= 1e-12, f"parallel-axes commutator {zero:.3e} > 1e-12")
    return (
        f"commuting gaps {worst_inv:.3e}; witness gaps {gaps[0]:.3f}/{gaps[1]:.3f}; "
        f"commutators {wit:.3f} vs {zero:.1e}"
    )


SUITES: tuple[tuple[str, Callable[[int], str]], ...] = (
    ("ga-product-laws", _suite_ga_product_laws),
    ("ga-rotor-sandwich", _suite_ga_rotor_sandwich),
    ("quat-cl3-isomorphism", _suite_quat_isomorphism),
    ("quat-rotation-matrix", _suite_quat_rotation),
    ("cl3-oracle-equivalence", _suite_cl3_oracle),
    ("cl3-invariant-channels", _suite_cl3_invariant_channels),
    ("rotary-reductions", _suite_rotary_reductions),
    ("rotary-norm-preservation", _suite_rotary_norms),
    ("harness-equivariance", _suite_harness_equivariance),
)


def run_all(seed: int) -> list[CheckResult]:
    """Run every suite; failures become results, not exceptions."""
    results = []
    for name, fn in SUITES:
        try:
            detail = fn(seed)
            results.append(CheckResult(name=name, passed=True, detail=detail))
        except CheckFailure as exc:
            results.append(CheckResult(name=name, passed=False, detail=str(exc)))
    return results
