"""Kernel benchmark harness (small workloads; timing itself is not asserted)."""

import numpy as np
import pytest

from garope import bench, cl3
from garope.encodings import EncodingMethod, apply_encoding, random_block


def tiny_report(**overrides):
    params = dict(batch=1, tokens=12, head_dim=16, reps=30, seed=3)
    params.update(overrides)
    return bench.run_bench(**params)


class TestRunBench:
    def test_default_kernel_set(self):
        names = bench.default_kernels()
        assert {"rope1d", "quatro", "care_fast", "care_generic"} <= set(names)
        assert ("care_fast_py" in names) == cl3.have_extension()

    def test_rows_cover_requested_kernels(self):
        report = tiny_report(kernels=("rope1d", "care_fast"))
        assert [r.kernel for r in report.rows] == ["rope1d", "care_fast"]
        for row in report.rows:
            assert (row.batch, row.tokens, row.head_dim, row.reps) == (1, 12, 16, 30)
            assert row.min_ns > 0
            assert row.min_ns <= row.median_ns <= row.mean_ns * 1.0000001
            assert row.rot_per_sec == pytest.approx(1e9 / row.median_ns)

    def test_band_counts_per_kernel(self):
        report = tiny_report(kernels=("rope1d", "quatro", "care_fast"))
        bands = {r.kernel: r.bands for r in report.rows}
        assert bands == {"rope1d": 8, "quatro": 5, "care_fast": 2}

    def test_care_variants_share_checksum(self):
        kernels = ["care_fast", "care_generic"]
        if cl3.have_extension():
            kernels.append("care_fast_py")
        report = tiny_report(kernels=tuple(kernels))
        sums = [r.checksum for r in report.rows]
        assert max(sums) - min(sums) <= 1e-10 * max(1.0, abs(sums[0]))

    def test_checksum_is_reproducible(self):
        a = tiny_report(kernels=("quatro",)).rows[0].checksum
        b = tiny_report(kernels=("quatro",)).rows[0].checksum
        assert a == b

    def test_checksum_matches_direct_encoding(self):
        report = tiny_report(kernels=("care_fast",))
        block = random_block(1, 16, bench._bench_positions(12), seed=3)
        # run_bench seeds its block identically
        rng = np.random.default_rng(3)
        data = rng.standard_normal((1, 12, 16))
        assert np.array_equal(block.data, data)
        out = apply_encoding(
            type(block)(data=data, positions=bench._bench_positions(12)),
            EncodingMethod.configure("care", 16),
        )
        assert report.rows[0].checksum == float(np.sum(out.data))

    def test_reps_floor_enforced(self):
        with pytest.raises(ValueError, match="reps"):
            tiny_report(reps=29)

    def test_sizes_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            tiny_report(tokens=0)

    def test_unknown_kernel_rejected(self):
        with pytest.raises(ValueError, match="unknown kernel"):
            tiny_report(kernels=("rope1d", "warp_drive"))

    def test_prime_token_count_still_works(self):
        report = tiny_report(tokens=13, kernels=("rope1d",))
        assert report.rows[0].tokens == 13


class TestCsv:
    def test_header_and_shape(self):
        report = tiny_report(kernels=("rope1d", "care_fast"))
        text = report.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "kernel,batch,tokens,head_dim,reps,min_ns,median_ns,mean_ns,rot_per_sec,checksum"
        assert len(lines) == 3
        assert text.endswith("\n")

    def test_rows_parse_back(self):
        report = tiny_report(kernels=("quatro",))
        lines = report.to_csv().strip().split("\n")
        fields = lines[1].split(",")
        assert fields[0] == "quatro"
        assert [int(f) for f in fields[1:5]] == [1, 12, 16, 30]
        assert float(fields[5]) <= float(fields[6])
        # checksum is repr'd at full precision
        assert float(fields[9]) == report.rows[0].checksum


class TestGenericEngineAgreement:
    def test_generic_path_matches_fast_kernel(self):
        block = random_block(2, 24, bench._bench_positions(15), seed=8)
        method = EncodingMethod.configure("care", 24)
        fast = apply_encoding(block, method)
        generic = bench._encode_care_generic(block, method)
        assert np.max(np.abs(fast.data - generic.data)) <= 1e-12
        assert np.array_equal(fast.positions, generic.positions)

    def test_generic_sandwich_rows_is_the_oracle(self):
        rng = np.random.default_rng(14)
        half = rng.standard_normal(5)
        axis = rng.standard_normal((5, 3))
        axis /= np.linalg.norm(axis, axis=1, keepdims=True)
        from garope.encodings import mv8_rotor

        rotors = mv8_rotor(axis, half)
        rows = rng.standard_normal((5, 8))
        fast = cl3.mv8_rotor_sandwich(rotors, rows)
        generic = bench._generic_sandwich_rows(rotors, rows)
        assert np.max(np.abs(fast - generic)) <= 1e-13
